//! Electron transport through a finite Kronig-Penney lattice.
//!
//! A device of fixed length `L` is cut into `N` cells, each made of a
//! rectangular barrier of height `V` and width `lambda` followed by a
//! field-free well of width `delta`, with `gamma = lambda / delta` held fixed.
//! The crate evaluates
//!
//! * the single-cell transfer matrix `M` and its half-trace `Phi(E)`
//!   ([`kernel`]),
//! * `M^N` and the exact transmission coefficient through the Chebyshev
//!   polynomials of the second kind ([`chebyshev`], [`transport`]),
//! * the `N -> infinity` continuum limit, where the lattice behaves like a
//!   single uniform barrier of height `E_o = gamma V / (1 + gamma)`,
//! * the Landauer resistivity `(1 - S) / S` in both regimes,
//! * the band structure obtained by inverting `cos(xi p_N) = Phi(E)`
//!   ([`dispersion`]).
//!
//! Everything here works in model units: lengths in nanometres and energies
//! in units of 0.038 eV, so that `hbar^2 / 2m = 1`. See [`units`] for the
//! conversions.

pub mod chebyshev;
pub mod dispersion;
mod error;
pub mod kernel;
pub mod mat2;
pub mod selfcheck;
mod special;
pub mod transport;
pub mod units;

pub use chebyshev::{cheb_u, m_power_cheb, ChebValue};
pub use dispersion::{
    band_edges, band_solve, band_structure, continuum_dispersion, dirac_comb_lhs, Band,
    BandStructure, BlochCondition, DiracCombParams,
};
pub use error::{Error, Result};
pub use kernel::{
    amplitude_trace, cell_geometry, e_threshold, phi_kernel, AmplitudeTrace, CellGeometry,
    ModelParams, PhiKernel, WaveNumbers,
};
pub use mat2::{EigenPair, Mat2C};
pub use transport::{
    resistivity_limit, resistivity_n, transmission_limit, transmission_n, Resistivity, Transmission,
};
pub use units::UnitSystem;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
