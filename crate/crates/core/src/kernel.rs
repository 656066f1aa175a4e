//! Single-cell physics: geometry, wave numbers, the cell transfer matrix `M`
//! and its half-trace `Phi(E)`, plus node-by-node reconstruction of the wave
//! amplitudes.
//!
//! `Phi` and the entries of `M` are evaluated from their explicit real forms.
//! Writing `q = V - E` (so `z = sqrt(q)`), the barrier enters only through
//! `cosh(z lambda)` and `sinh(z lambda) / z`, both real for either sign of
//! `q`. For `E > V` this is the analytic continuation `z = i w`, and for
//! `|E - V|` below [`ModelParams::v_window`] the ratio is replaced by its
//! Taylor series so the `E = V` point carries no `0 / 0`.

use crate::mat2::{t_mat, Mat2C};
use crate::special::{chz, shz};
use crate::{Error, Result, C64};

/// Barrier height, barrier/well ratio, device length and cell count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Barrier height `V`.
    pub v: f64,
    /// `gamma = lambda / delta`.
    pub gamma: f64,
    /// Total length `L`.
    pub l: f64,
    /// Number of cells `N`.
    pub n: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellGeometry {
    /// Well width `delta_N`.
    pub delta: f64,
    /// Barrier width `lambda_N`.
    pub lambda: f64,
    /// Period `p_N = delta_N + lambda_N = L / N`.
    pub period: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveNumbers {
    /// `k = sqrt(E)`.
    pub k: f64,
    /// `z = sqrt(V - E)`: real below the barrier top, imaginary above.
    pub z: C64,
}

/// Everything known about one cell at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiKernel {
    /// `Re(m11)`, the half-trace of `M`.
    pub phi: f64,
    /// `Im(m11)`.
    pub m11_im: f64,
    /// `(V / 2kz) sinh(z lambda)`, so that `m12 = i c e^{-i k delta}`.
    pub c: f64,
    pub m: Mat2C,
}

impl ModelParams {
    pub fn new(v: f64, gamma: f64, l: f64, n: u64) -> Result<Self> {
        let p = Self { v, gamma, l, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v.is_finite() && self.v >= 0.0) {
            return Err(Error::domain(format!(
                "barrier height must be >= 0, got {}",
                self.v
            )));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::domain(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        if !(self.l.is_finite() && self.l > 0.0) {
            return Err(Error::domain(format!("length must be > 0, got {}", self.l)));
        }
        if self.n == 0 {
            return Err(Error::domain("the lattice needs at least one cell"));
        }
        Ok(())
    }

    pub fn with_n(&self, n: u64) -> Self {
        Self { n, ..*self }
    }

    pub fn geometry(&self) -> CellGeometry {
        cell_geometry(self)
    }

    /// `E_o = gamma V / (1 + gamma)`.
    pub fn e_o(&self) -> f64 {
        e_threshold(self)
    }

    /// Half-width of the energy window around `V` handled by series.
    pub fn v_window(&self) -> f64 {
        1e-8 * self.v.max(1.0)
    }

    pub fn wave_numbers(&self, e: f64) -> WaveNumbers {
        WaveNumbers {
            k: e.sqrt(),
            z: C64::new(self.v - e, 0.0).sqrt(),
        }
    }
}

pub fn cell_geometry(p: &ModelParams) -> CellGeometry {
    let n = p.n as f64;
    let delta = p.l / ((1.0 + p.gamma) * n);
    let lambda = p.gamma * p.l / ((1.0 + p.gamma) * n);
    CellGeometry {
        delta,
        lambda,
        period: p.l / n,
    }
}

pub fn e_threshold(p: &ModelParams) -> f64 {
    p.gamma * p.v / (1.0 + p.gamma)
}

/// Evaluates `Phi(E)` and the full single-cell matrix.
pub fn phi_kernel(e: f64, p: &ModelParams) -> Result<PhiKernel> {
    p.validate()?;
    if !(e > 0.0 && e.is_finite()) {
        return Err(Error::domain(format!(
            "energy must be finite and > 0, got {e}"
        )));
    }
    let g = p.geometry();
    let k = e.sqrt();
    let q = p.v - e;
    let sh = shz(q, g.lambda, p.v_window());
    let ch = chz(q, g.lambda);
    let (sin_kd, cos_kd) = (k * g.delta).sin_cos();

    // (z^2 - k^2) / (2 k z) * sinh(z lambda)
    let mix = (q - e) / (2.0 * k) * sh;
    let phi = cos_kd * ch + mix * sin_kd;
    let m11_im = -sin_kd * ch + mix * cos_kd;
    let c = p.v / (2.0 * k) * sh;

    if !(phi.is_finite() && m11_im.is_finite() && c.is_finite()) {
        return Err(Error::domain(format!(
            "barrier too opaque for double precision at E = {e} (z lambda too large)"
        )));
    }

    let m11 = C64::new(phi, m11_im);
    let m12 = C64::new(c * sin_kd, c * cos_kd);
    Ok(PhiKernel {
        phi,
        m11_im,
        c,
        m: Mat2C::new(m11, m12, m12.conj(), m11.conj()),
    })
}

/// Wave amplitudes in every region for a given outgoing amplitude.
///
/// Plane-wave pairs use the global coordinate, `A e^{ikx} + B e^{-ikx}`.
/// Barrier pairs are referenced to the barrier's left node `x_{2l-2}`,
/// `B1 e^{z s} + B2 e^{-z s}` with `s = x - x_{2l-2}`, which keeps them
/// representable on long devices where `e^{z x}` would overflow.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrace {
    /// `x_0 .. x_{2N-1}`: barrier left and right edges, alternating.
    pub nodes: Vec<f64>,
    /// `(A_{2l}, A_{2l+1})` for `l = 0..=N`; index 0 is the incident side.
    pub plane_amps: Vec<(C64, C64)>,
    /// `(B_{2l-1}, B_{2l})` for barriers `l = 1..=N`.
    pub barrier_amps: Vec<(C64, C64)>,
    pub k: f64,
    pub z: C64,
}

impl AmplitudeTrace {
    pub fn n_cells(&self) -> usize {
        self.barrier_amps.len()
    }

    /// `|A_{2N}|^2 / |A_0|^2`.
    pub fn transmission(&self) -> f64 {
        let a0 = self.plane_amps[0].0.norm_sqr();
        let out = self.plane_amps[self.n_cells()].0.norm_sqr();
        out / a0
    }

    /// Rescales every amplitude so that `A_0 = 1`.
    pub fn normalized(&self) -> AmplitudeTrace {
        let s = self.plane_amps[0].0.inv();
        let f = |(a, b): &(C64, C64)| (a * s, b * s);
        AmplitudeTrace {
            nodes: self.nodes.clone(),
            plane_amps: self.plane_amps.iter().map(f).collect(),
            barrier_amps: self.barrier_amps.iter().map(f).collect(),
            k: self.k,
            z: self.z,
        }
    }

    fn plane_wave(&self, l: usize, x: f64) -> (C64, C64) {
        let (a, b) = self.plane_amps[l];
        let ik = C64::new(0.0, self.k);
        let fwd = a * (ik * x).exp();
        let bwd = b * (-ik * x).exp();
        (fwd + bwd, ik * (fwd - bwd))
    }

    fn barrier_wave(&self, l: usize, x: f64) -> (C64, C64) {
        let (b1, b2) = self.barrier_amps[l - 1];
        let s = x - self.nodes[2 * l - 2];
        let up = b1 * (self.z * s).exp();
        let down = b2 * (-self.z * s).exp();
        (up + down, self.z * (up - down))
    }

    /// Mismatch of `(Psi, Psi')` across every node, computed by evaluating
    /// the exponentials on each side and scaled by the local amplitude.
    /// Derivatives are measured in units of `max(k, |z|)`.
    pub fn node_residuals(&self) -> Vec<f64> {
        let kappa = self.k.max(self.z.norm()).max(f64::MIN_POSITIVE);
        let mut out = Vec::with_capacity(self.nodes.len());
        for (i, &x) in self.nodes.iter().enumerate() {
            let l = i / 2 + 1;
            let (left, right) = if i % 2 == 0 {
                (self.plane_wave(l - 1, x), self.barrier_wave(l, x))
            } else {
                (self.barrier_wave(l, x), self.plane_wave(l, x))
            };
            let scale = left
                .0
                .norm()
                .max(left.1.norm() / kappa)
                .max(right.0.norm())
                .max(right.1.norm() / kappa)
                .max(f64::MIN_POSITIVE);
            let d = (left.0 - right.0)
                .norm()
                .max((left.1 - right.1).norm() / kappa);
            out.push(d / scale);
        }
        out
    }

    pub fn max_residual(&self) -> f64 {
        self.node_residuals().into_iter().fold(0.0, f64::max)
    }
}

/// Back-propagates `(A_{2N}, A_{2N+1}) = (a_out, 0)` through every cell.
pub fn amplitude_trace(e: f64, p: &ModelParams, a_out: C64) -> Result<AmplitudeTrace> {
    p.validate()?;
    if !(e > 0.0 && e.is_finite()) {
        return Err(Error::domain(format!(
            "energy must be finite and > 0, got {e}"
        )));
    }
    if (e - p.v).abs() <= p.v_window() {
        return Err(Error::domain(
            "amplitude trace is undefined at E = V (barrier basis degenerates)",
        ));
    }
    if a_out == C64::new(0.0, 0.0) {
        return Err(Error::domain("outgoing amplitude must be non-zero"));
    }
    let g = p.geometry();
    let n = p.n as usize;
    let wn = p.wave_numbers(e);
    let ik = C64::new(0.0, wn.k);

    let nodes: Vec<f64> = (0..2 * n)
        .map(|i| {
            let cell = (i / 2) as f64 * g.period;
            if i % 2 == 0 {
                cell
            } else {
                cell + g.lambda
            }
        })
        .collect();

    let t_z0 = t_mat(wn.z, 0.0)?;
    let t_z_lambda_inv = t_mat(wn.z, g.lambda)?.inv()?;

    let mut plane = vec![(C64::new(0.0, 0.0), C64::new(0.0, 0.0)); n + 1];
    let mut barrier = vec![(C64::new(0.0, 0.0), C64::new(0.0, 0.0)); n];
    plane[n] = (a_out, C64::new(0.0, 0.0));
    for l in (1..=n).rev() {
        let right_edge = nodes[2 * l - 1];
        let left_edge = nodes[2 * l - 2];
        let wave = t_mat(ik, right_edge)?.apply(plane[l]);
        let b = t_z_lambda_inv.apply(wave);
        barrier[l - 1] = b;
        let wave = t_z0.apply(b);
        plane[l - 1] = t_mat(ik, left_edge)?.inv()?.apply(wave);
    }
    if plane
        .iter()
        .chain(barrier.iter())
        .any(|(a, b)| !(a.is_finite() && b.is_finite()))
    {
        return Err(Error::domain(format!(
            "amplitudes overflow at E = {e}; the lattice is too opaque for a linear-scale trace"
        )));
    }

    Ok(AmplitudeTrace {
        nodes,
        plane_amps: plane,
        barrier_amps: barrier,
        k: wn.k,
        z: wn.z,
    })
}
