//! Transmission coefficient and Landauer resistivity.
//!
//! For `N` cells `S_N = [1 + (c U_{N-1}(Phi))^2]^{-1}`, with `c` and `Phi`
//! from [`phi_kernel`]. In the continuum limit (`N -> infinity` at fixed `L`
//! and `gamma`) the lattice acts as one barrier of height `E_o`:
//!
//! ```text
//! S = [1 + E_o^2 / (4E) * g(E)^2]^{-1},   g = sin(L sqrt(E - E_o)) / sqrt(E - E_o)
//! ```
//!
//! continued to `sinh` below `E_o`. Both are computed from `x^2 = (1 - S)/S`
//! carried in log form, so that gap floors far below `f64::MIN_POSITIVE`
//! still come out with a finite `log10_s` and resistivities above `f64::MAX`
//! with a finite `log10_rho`.

use std::f64::consts::LN_10;

use crate::chebyshev::cheb_u;
use crate::kernel::{phi_kernel, ModelParams};
use crate::mat2::mat_power_direct;
use crate::special::{ln_abs_shz, shz};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmission {
    /// Transmission coefficient in `[0, 1]`; underflows to 0 in deep gaps.
    pub s: f64,
    /// `log10(s)`, finite even when `s` underflows.
    pub log10_s: f64,
    /// `U_{N-1}(Phi)` vanishes to within `1e-12 N`.
    pub resonance: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resistivity {
    /// `(1 - s) / s`; `+inf` when it exceeds `f64::MAX`.
    pub rho: f64,
    pub log10_rho: f64,
}

/// `x^2 = (1 - S) / S` in linear and log form.
#[derive(Debug, Clone, Copy)]
struct Excess {
    x2: f64,
    ln_x2: f64,
}

impl Excess {
    const NONE: Excess = Excess {
        x2: 0.0,
        ln_x2: f64::NEG_INFINITY,
    };

    /// From `ln|x|`, optionally with the linear value when it is known.
    fn from_ln_abs(ln_abs: f64, linear: Option<f64>) -> Self {
        if ln_abs == f64::NEG_INFINITY {
            return Excess::NONE;
        }
        let ln_x2 = 2.0 * ln_abs;
        let x2 = match linear {
            Some(x) if x.abs() < 1e150 => x * x,
            _ => ln_x2.exp(),
        };
        Excess { x2, ln_x2 }
    }

    fn transmission(self, resonance: bool) -> Transmission {
        if self.x2.is_finite() {
            Transmission {
                s: 1.0 / (1.0 + self.x2),
                log10_s: -self.x2.ln_1p() / LN_10,
                resonance,
            }
        } else {
            let log10_s = -(self.ln_x2 + (-self.ln_x2).exp().ln_1p()) / LN_10;
            Transmission {
                s: 10f64.powf(log10_s),
                log10_s,
                resonance,
            }
        }
    }

    fn resistivity(self) -> Resistivity {
        Resistivity {
            rho: self.x2,
            log10_rho: self.ln_x2 / LN_10,
        }
    }
}

impl Resistivity {
    /// `(1 - s) / s` for a given transmission coefficient.
    pub fn from_s(s: f64) -> Resistivity {
        let rho = (1.0 - s) / s;
        Resistivity {
            rho,
            log10_rho: rho.log10(),
        }
    }
}

fn excess_n(e: f64, p: &ModelParams) -> Result<(Excess, bool)> {
    let kern = phi_kernel(e, p)?;
    let u = cheb_u(p.n as i64 - 1, kern.phi);
    let resonance = u.value.abs() <= 1e-12 * p.n as f64;
    if kern.c == 0.0 || u.sign == 0 {
        return Ok((Excess::NONE, resonance));
    }
    let linear = u.value.is_finite().then_some(kern.c * u.value);
    Ok((
        Excess::from_ln_abs(kern.c.abs().ln() + u.log_abs, linear),
        resonance,
    ))
}

/// Exact transmission through `N` cells.
pub fn transmission_n(e: f64, p: &ModelParams) -> Result<Transmission> {
    let (x, resonance) = excess_n(e, p)?;
    Ok(x.transmission(resonance))
}

/// `rho_N = (1 - S_N) / S_N`.
pub fn resistivity_n(e: f64, p: &ModelParams) -> Result<Resistivity> {
    Ok(excess_n(e, p)?.0.resistivity())
}

/// `1 / |(M^N)_11|^2` with `M^N` from repeated squaring. Independent of the
/// Chebyshev route and meant as its cross-check; it has no log-domain
/// fallback.
pub fn transmission_by_power(e: f64, p: &ModelParams) -> Result<f64> {
    let kern = phi_kernel(e, p)?;
    let mn = mat_power_direct(&kern.m, p.n);
    Ok(1.0 / mn.a11.norm_sqr())
}

fn check_limit_args(e: f64, gamma: f64, v: f64, l: f64) -> Result<()> {
    if !(e > 0.0 && e.is_finite()) {
        return Err(Error::domain(format!(
            "energy must be finite and > 0, got {e}"
        )));
    }
    ModelParams::new(v, gamma, l, 1).map(|_| ())
}

/// `ln|g(E)|` with `g = sin(L sqrt(E - E_o)) / sqrt(E - E_o)` and its
/// continuation, plus `g` itself when representable.
fn ln_abs_g(e: f64, e_o: f64, l: f64) -> (f64, Option<f64>) {
    let window = 1e-8 * e_o.max(1.0);
    let q = e_o - e;
    let (ln_abs, _) = ln_abs_shz(q, l, window);
    let g = shz(q, l, window);
    (ln_abs, g.is_finite().then_some(g))
}

/// Continuum-limit transmission for fixed `gamma`, `V` and `L`.
pub fn transmission_limit(e: f64, gamma: f64, v: f64, l: f64) -> Result<Transmission> {
    check_limit_args(e, gamma, v, l)?;
    let e_o = gamma * v / (1.0 + gamma);
    if e_o == 0.0 {
        return Ok(Excess::NONE.transmission(true));
    }
    let (ln_g, g) = ln_abs_g(e, e_o, l);
    let amp = e_o / (2.0 * e.sqrt());
    let x = Excess::from_ln_abs(amp.ln() + ln_g, g.map(|g| amp * g));
    Ok(x.transmission(x.x2 == 0.0))
}

/// Continuum-limit resistivity written directly in the barrier parameters,
/// `(V gamma)^2 / ((1 + gamma)^2 4E) * g(E)^2`.
pub fn resistivity_limit(e: f64, gamma: f64, v: f64, l: f64) -> Result<Resistivity> {
    check_limit_args(e, gamma, v, l)?;
    if gamma == 0.0 || v == 0.0 {
        return Ok(Excess::NONE.resistivity());
    }
    let e_o = gamma * v / (1.0 + gamma);
    let (ln_g, g) = ln_abs_g(e, e_o, l);
    let ln_pref = 2.0 * (v * gamma).ln() - 2.0 * gamma.ln_1p() - (4.0 * e).ln();
    let linear = g.map(|g| (v * gamma) / (1.0 + gamma) * g / (4.0 * e).sqrt());
    Ok(Excess::from_ln_abs(0.5 * ln_pref + ln_g, linear).resistivity())
}
