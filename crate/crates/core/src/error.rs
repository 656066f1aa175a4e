use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the formula is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular matrix: |det| = {0:e}")]
    Singular(f64),

    /// `U_{N-1}(Phi)` is too large for the linear-scale matrix power.
    #[error(
        "Chebyshev value {0:e} overflows the linear-scale path; use the log-domain transmission"
    )]
    Overflow(f64),

    /// Two band edges could not be separated by the scan grid.
    #[error("band edges not resolved near E = {energy}: {reason}")]
    Resolution { energy: f64, reason: String },

    /// The dispersion relation has no sign change on the band's bracket.
    #[error("no bracket for Phi(E) = {target} on [{lo}, {hi}] in band {band}")]
    Bracket {
        band: usize,
        target: f64,
        lo: f64,
        hi: f64,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
