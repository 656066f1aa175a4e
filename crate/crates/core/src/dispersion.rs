//! Band structure from the Bloch condition `cos(xi p) = Phi(E)`.
//!
//! Energies with `|Phi(E)| <= 1` carry Bloch states and form bands; the rest
//! are gaps. [`band_edges`] scans `Phi` on a fine grid and bisects every
//! change of sign of `|Phi| - 1`; [`band_solve`] inverts the relation inside
//! one band, again by bisection. Both work for any [`BlochCondition`]: the
//! finite lattice ([`ModelParams`]) and the Dirac-comb reference model
//! ([`DiracCombParams`]).

use std::f64::consts::PI;

use crate::kernel::{phi_kernel, ModelParams};
use crate::{Error, Result};

/// A periodic structure described by the half-trace of its cell matrix.
pub trait BlochCondition {
    /// `Phi(E)`: right-hand side of `cos(xi p) = Phi(E)`.
    fn half_trace(&self, e: f64) -> Result<f64>;

    /// Lattice period `p`.
    fn period(&self) -> f64;

    /// Number of scan points used by [`band_edges`] below `e_max`.
    fn scan_points(&self, e_max: f64) -> usize;

    /// True when `Phi(E) = cos(sqrt(E) p)` exactly, so there are no gaps and
    /// the dispersion is the free parabola.
    fn is_gapless(&self) -> bool;

    /// Cell count reported in [`BandStructure::n`].
    fn cells(&self) -> u64 {
        1
    }
}

const MAX_SCAN_POINTS: usize = 100_000_000;

impl BlochCondition for ModelParams {
    fn half_trace(&self, e: f64) -> Result<f64> {
        Ok(phi_kernel(e, self)?.phi)
    }

    fn period(&self) -> f64 {
        self.geometry().period
    }

    fn scan_points(&self, e_max: f64) -> usize {
        let pts = 64.0 * self.n as f64 * (e_max / self.v.max(f64::MIN_POSITIVE) + 1.0);
        (pts.ceil() as usize).clamp(1024, MAX_SCAN_POINTS)
    }

    fn is_gapless(&self) -> bool {
        self.v == 0.0 || self.gamma == 0.0
    }

    fn cells(&self) -> u64 {
        self.n
    }
}

/// Dirac-comb lattice: delta barriers of intensity `Lambda` spaced `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracCombParams {
    /// `P = Lambda delta / 2`.
    pub p_strength: f64,
    pub delta: f64,
    /// `Lambda`, the limit of `V lambda`.
    pub lambda_cap: f64,
}

impl DiracCombParams {
    pub fn new(p_strength: f64, delta: f64) -> Result<Self> {
        if !(p_strength.is_finite() && p_strength >= 0.0) {
            return Err(Error::domain(format!("P must be >= 0, got {p_strength}")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::domain(format!("spacing must be > 0, got {delta}")));
        }
        Ok(Self {
            p_strength,
            delta,
            lambda_cap: 2.0 * p_strength / delta,
        })
    }

    /// From the delta intensity `Lambda = lim V lambda`.
    pub fn from_intensity(lambda_cap: f64, delta: f64) -> Result<Self> {
        let mut d = Self::new(lambda_cap * delta / 2.0, delta)?;
        d.lambda_cap = lambda_cap;
        Ok(d)
    }
}

impl BlochCondition for DiracCombParams {
    fn half_trace(&self, e: f64) -> Result<f64> {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::domain(format!(
                "energy must be finite and > 0, got {e}"
            )));
        }
        Ok(dirac_comb_lhs(e.sqrt(), self))
    }

    fn period(&self) -> f64 {
        self.delta
    }

    fn scan_points(&self, e_max: f64) -> usize {
        let zones = (e_max.sqrt() * self.delta / PI).ceil() + 1.0;
        ((4096.0 * zones) as usize).clamp(1024, MAX_SCAN_POINTS)
    }

    fn is_gapless(&self) -> bool {
        self.p_strength == 0.0
    }
}

/// `P sin(k delta) / (k delta) + cos(k delta)`.
pub fn dirac_comb_lhs(k: f64, d: &DiracCombParams) -> f64 {
    let x = k * d.delta;
    let sinc = if x.abs() < 1e-8 { 1.0 } else { x.sin() / x };
    d.p_strength * sinc + x.cos()
}

/// `E = E_o + xi^2`.
pub fn continuum_dispersion(xi: f64, e_o: f64) -> f64 {
    e_o + xi * xi
}

#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    /// 1-based, counted from the bottom of the spectrum.
    pub index: usize,
    pub e_lo: f64,
    pub e_hi: f64,
    /// False when the band runs past the scanned range (or the spectrum is
    /// gapless), in which case `e_hi` is only the scan limit and
    /// [`band_solve`] reaches only the part of the zone below it.
    pub complete: bool,
    pub xi_samples: Vec<f64>,
    pub e_samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    pub n: u64,
    pub period: f64,
    pub bands: Vec<Band>,
    /// `(E_lo, E_hi)` intervals with `|Phi| > 1`, ascending.
    pub gaps: Vec<(f64, f64)>,
}

impl BandStructure {
    pub fn band(&self, index: usize) -> Option<&Band> {
        index.checked_sub(1).and_then(|i| self.bands.get(i))
    }

    /// Interior edges, i.e. every band boundary that borders a gap.
    pub fn interior_edges(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for b in &self.bands {
            if b.e_lo > 0.0 {
                out.push(b.e_lo);
            }
            if b.complete {
                out.push(b.e_hi);
            }
        }
        out
    }
}

/// Bisects `f` on `[a, b]` where `f(a)` and `f(b)` differ in sign, down to
/// adjacent floats or `tol`. Returns the bracket.
fn bisect<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let side_a = f(a)? > 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) || (b - a).abs() <= tol {
            break;
        }
        if (f(m)? > 0.0) == side_a {
            a = m;
        } else {
            b = m;
        }
    }
    Ok((a, b))
}

fn gap_indicator<C: BlochCondition + ?Sized>(cond: &C, e: f64) -> Result<f64> {
    Ok(cond.half_trace(e)?.abs() - 1.0)
}

/// Locates every band edge below `e_max`.
///
/// The returned bands carry edges only; use [`band_structure`] for samples.
pub fn band_edges<C: BlochCondition + ?Sized>(cond: &C, e_max: f64) -> Result<BandStructure> {
    if !(e_max > 0.0 && e_max.is_finite()) {
        return Err(Error::domain(format!(
            "e_max must be finite and > 0, got {e_max}"
        )));
    }
    let period = cond.period();
    if cond.is_gapless() {
        return Ok(BandStructure {
            n: cond.cells(),
            period,
            bands: vec![Band {
                index: 1,
                e_lo: 0.0,
                e_hi: e_max,
                complete: false,
                xi_samples: Vec::new(),
                e_samples: Vec::new(),
            }],
            gaps: Vec::new(),
        });
    }

    let m = cond.scan_points(e_max);
    let step = e_max / m as f64;
    let grid: Vec<f64> = (1..=m).map(|i| step * i as f64).collect();
    let vals = grid
        .iter()
        .map(|&e| gap_indicator(cond, e))
        .collect::<Result<Vec<f64>>>()?;

    // every transition of |Phi| - 1 between consecutive samples, as
    // (lo, hi) brackets on the grid
    let mut brackets: Vec<(f64, f64)> = Vec::new();
    for i in 0..m - 1 {
        let (a, b) = (vals[i] > 0.0, vals[i + 1] > 0.0);
        if a != b {
            brackets.push((grid[i], grid[i + 1]));
        } else if !a && i > 0 {
            // a sampled local maximum of |Phi| inside a band may hide a gap
            // narrower than one cell
            let (l, c, r) = (vals[i - 1], vals[i], vals[i + 1]);
            if c >= l && c >= r && -c < 2.0 * ((c - l).abs() + (c - r).abs()) {
                brackets.extend(hidden_gap(cond, grid[i - 1], grid[i + 1])?);
            }
        }
    }
    brackets.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut edges = Vec::with_capacity(brackets.len());
    for (lo, hi) in brackets {
        let (a, b) = bisect(|e| gap_indicator(cond, e), lo, hi, 0.0)?;
        // keep the endpoint on the band side
        let edge = if gap_indicator(cond, a)? <= 0.0 { a } else { b };
        edges.push(edge);
    }

    let start_in_band = vals[0] <= 0.0;
    let mut bands = Vec::new();
    let mut gaps = Vec::new();
    let mut cursor = 0.0;
    let mut in_band = start_in_band;
    for &edge in &edges {
        if in_band {
            bands.push((cursor, edge, true));
        } else {
            gaps.push((cursor, edge));
        }
        cursor = edge;
        in_band = !in_band;
    }
    if in_band {
        bands.push((cursor, e_max, false));
    } else {
        gaps.push((cursor, e_max));
    }
    for w in edges.windows(2) {
        if w[1] - w[0] <= 0.0 {
            return Err(Error::Resolution {
                energy: w[0],
                reason: "two edges collapsed onto one energy".into(),
            });
        }
    }

    Ok(BandStructure {
        n: cond.cells(),
        period,
        bands: bands
            .into_iter()
            .enumerate()
            .map(|(i, (lo, hi, complete))| Band {
                index: i + 1,
                e_lo: lo,
                e_hi: hi,
                complete,
                xi_samples: Vec::new(),
                e_samples: Vec::new(),
            })
            .collect(),
        gaps,
    })
}

/// Two rounds of 64-fold refinement around a near-touching maximum of
/// `|Phi|`. Returns brackets for any edges found.
fn hidden_gap<C: BlochCondition + ?Sized>(cond: &C, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>> {
    const SUB: usize = 64;
    let (mut lo, mut hi) = (lo, hi);
    let mut peak = f64::NEG_INFINITY;
    for _round in 0..2 {
        let h = (hi - lo) / SUB as f64;
        let pts: Vec<f64> = (0..=SUB).map(|j| lo + h * j as f64).collect();
        let vals = pts
            .iter()
            .map(|&e| gap_indicator(cond, e))
            .collect::<Result<Vec<f64>>>()?;
        let mut found = Vec::new();
        for j in 0..SUB {
            if (vals[j] > 0.0) != (vals[j + 1] > 0.0) {
                found.push((pts[j], pts[j + 1]));
            }
        }
        if !found.is_empty() {
            return Ok(found);
        }
        let (jmax, &vmax) = vals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty refinement grid");
        peak = vmax;
        lo = pts[jmax.saturating_sub(1)];
        hi = pts[(jmax + 1).min(SUB)];
    }
    if peak > -1e-12 {
        return Err(Error::Resolution {
            energy: 0.5 * (lo + hi),
            reason: format!(
                "|Phi| touches 1 within {:.1e} without a resolvable gap",
                -peak
            ),
        });
    }
    Ok(Vec::new())
}

/// Energy on band `band_index` whose Bloch wavevector is `xi`.
pub fn band_solve<C: BlochCondition + ?Sized>(
    cond: &C,
    structure: &BandStructure,
    band_index: usize,
    xi: f64,
) -> Result<f64> {
    let band = structure
        .band(band_index)
        .ok_or_else(|| Error::domain(format!("no band with index {band_index}")))?;
    let p = cond.period();
    let zone = PI / p;
    if !(xi >= -1e-12 * zone && xi <= zone * (1.0 + 1e-12)) {
        return Err(Error::domain(format!(
            "xi = {xi} outside [0, pi/p = {zone}]"
        )));
    }
    if cond.is_gapless() {
        return Ok(xi * xi);
    }
    let target = (xi * p).cos();
    let bracket_err = || Error::Bracket {
        band: band_index,
        target,
        lo: band.e_lo,
        hi: band.e_hi,
    };
    if band.e_lo <= 0.0 {
        return Err(bracket_err());
    }
    let f_lo = cond.half_trace(band.e_lo)? - target;
    let f_hi = cond.half_trace(band.e_hi)? - target;
    const EDGE_SLACK: f64 = 1e-9;
    if f_lo == 0.0 {
        return Ok(band.e_lo);
    }
    if f_hi == 0.0 {
        return Ok(band.e_hi);
    }
    if (f_lo > 0.0) == (f_hi > 0.0) {
        // target sits at (or rounding-close beyond) an edge value
        // an open band ends at the scan limit, not at |Phi| = 1
        let (e, f) = if f_lo.abs() <= f_hi.abs() || !band.complete {
            (band.e_lo, f_lo)
        } else {
            (band.e_hi, f_hi)
        };
        return if f.abs() <= EDGE_SLACK {
            Ok(e)
        } else {
            Err(bracket_err())
        };
    }
    let (a, b) = bisect(
        |e| Ok(cond.half_trace(e)? - target),
        band.e_lo,
        band.e_hi,
        1e-12,
    )?;
    Ok(0.5 * (a + b))
}

/// Edges plus `xi_steps` samples of `E(xi)` over `[0, pi/p]` for each
/// complete band, keeping at most `max_bands` bands.
///
/// A gapless spectrum is returned as one extended-zone parabola sampled over
/// `xi in [0, sqrt(e_max)]`.
pub fn band_structure<C: BlochCondition + ?Sized>(
    cond: &C,
    e_max: f64,
    max_bands: Option<usize>,
    xi_steps: usize,
) -> Result<BandStructure> {
    if xi_steps < 2 {
        return Err(Error::domain("need at least two xi samples per band"));
    }
    let mut s = band_edges(cond, e_max)?;
    if cond.is_gapless() {
        let top = e_max.sqrt();
        let b = &mut s.bands[0];
        b.xi_samples = (0..xi_steps)
            .map(|j| top * j as f64 / (xi_steps - 1) as f64)
            .collect();
        b.e_samples = b.xi_samples.iter().map(|x| x * x).collect();
        return Ok(s);
    }
    s.bands.retain(|b| b.complete);
    if let Some(mb) = max_bands {
        s.bands.truncate(mb);
    }
    let zone = PI / cond.period();
    let xis: Vec<f64> = (0..xi_steps)
        .map(|j| zone * j as f64 / (xi_steps - 1) as f64)
        .collect();
    for i in 0..s.bands.len() {
        let idx = s.bands[i].index;
        let mut es = Vec::with_capacity(xis.len());
        for &xi in &xis {
            es.push(band_solve_in(cond, &s.bands[i], idx, xi)?);
        }
        s.bands[i].xi_samples = xis.clone();
        s.bands[i].e_samples = es;
    }
    // the gap list still describes the whole scanned range
    Ok(s)
}

fn band_solve_in<C: BlochCondition + ?Sized>(
    cond: &C,
    band: &Band,
    idx: usize,
    xi: f64,
) -> Result<f64> {
    let single = BandStructure {
        n: cond.cells(),
        period: cond.period(),
        bands: vec![Band {
            index: 1,
            ..band.clone()
        }],
        gaps: Vec::new(),
    };
    band_solve(cond, &single, 1, xi).map_err(|e| match e {
        Error::Bracket { target, lo, hi, .. } => Error::Bracket {
            band: idx,
            target,
            lo,
            hi,
        },
        other => other,
    })
}
