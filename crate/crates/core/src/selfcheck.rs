//! Embedded oracle suites, runnable from a release binary.
//!
//! Each suite draws its cases from a seeded ChaCha stream, so a run is
//! reproducible from the seed alone.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chebyshev::{
    cheb_u, cheb_u_recurrence, cheb_u_with, m_power_cheb, Regime, CONFLUENCE_WINDOW,
};
use crate::kernel::{amplitude_trace, phi_kernel, ModelParams};
use crate::mat2::mat_power_direct;
use crate::transport::{transmission_by_power, transmission_limit, transmission_n};
use crate::units::{UnitSystem, ENERGY_QUANTUM_EV};
use crate::C64;

/// Deliberate corruption used to confirm that the suites can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Runs the unit suite with a perturbed energy quantum.
    EnergyQuantum,
    /// Compares `M^{N+1}` from the Chebyshev form against `M^N`.
    ChebyshevIndex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest error seen, in the suite's own measure.
    pub worst: f64,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "suite={} status={} cases={} failures={} worst={:.3e} seconds={:.3}",
            self.name,
            if self.passed() { "pass" } else { "fail" },
            self.cases,
            self.failures,
            self.worst,
            self.seconds
        )
    }
}

struct Tally {
    cases: usize,
    failures: usize,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cases: 0,
            failures: 0,
            worst: 0.0,
        }
    }

    /// Records one case with error `err` against tolerance `tol`.
    fn check(&mut self, err: f64, tol: f64) {
        self.cases += 1;
        if err.is_nan() || err > tol {
            self.failures += 1;
        }
        if err.is_nan() {
            self.worst = f64::NAN;
        } else if !self.worst.is_nan() {
            self.worst = self.worst.max(err);
        }
    }

    fn fail(&mut self) {
        self.cases += 1;
        self.failures += 1;
    }
}

type Suite = fn(&mut ChaCha8Rng, Fault, &mut Tally);

const SUITES: &[(&str, Suite)] = &[
    ("units", units),
    ("chebyshev_vs_power", chebyshev_vs_power),
    ("sl2_determinant", sl2_determinant),
    ("chebyshev_identity", chebyshev_identity),
    ("branch_continuity", branch_continuity),
    ("convergence_trend", convergence_trend),
    ("amplitude_continuity", amplitude_continuity),
];

/// Runs every suite with the given seed.
pub fn run_all(seed: u64, fault: Fault) -> Vec<SuiteReport> {
    SUITES
        .iter()
        .enumerate()
        .map(|(i, &(name, suite))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let mut tally = Tally::new();
            let start = Instant::now();
            suite(&mut rng, fault, &mut tally);
            SuiteReport {
                name,
                cases: tally.cases,
                failures: tally.failures,
                worst: tally.worst,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

fn random_params(rng: &mut ChaCha8Rng, max_n: u64) -> ModelParams {
    ModelParams {
        v: rng.gen_range(1.0..20.0),
        gamma: rng.gen_range(0.02..1.0),
        l: rng.gen_range(10.0..500.0),
        n: rng.gen_range(1..=max_n),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn units(rng: &mut ChaCha8Rng, fault: Fault, t: &mut Tally) {
    let sys = match fault {
        Fault::EnergyQuantum => UnitSystem {
            energy_quantum: ENERGY_QUANTUM_EV * 1.001,
            ..UnitSystem::STANDARD
        },
        _ => UnitSystem::STANDARD,
    };
    t.check(rel(sys.ev_to_model(0.5), 13.157894736842104), 1e-14);
    t.check(rel(sys.model_to_ev(1.0), 0.038), 1e-15);
    t.check(rel(sys.nm_to_model(500.0), 500.0), 0.0);
    for _ in 0..200 {
        let x: f64 = rng.gen_range(-1e6..1e6);
        let scale = x.abs().max(1.0);
        t.check(
            (sys.model_to_ev(sys.ev_to_model(x)) - x).abs() / scale,
            1e-14,
        );
        t.check(
            (sys.model_to_nm(sys.nm_to_model(x)) - x).abs() / scale,
            1e-14,
        );
    }
}

fn chebyshev_vs_power(rng: &mut ChaCha8Rng, fault: Fault, t: &mut Tally) {
    for _ in 0..500 {
        let p = random_params(rng, 64);
        let e = rng.gen_range(1e-3..2.0) * p.v;
        let Ok(kern) = phi_kernel(e, &p) else {
            t.fail();
            continue;
        };
        let n_cheb = if fault == Fault::ChebyshevIndex {
            p.n + 1
        } else {
            p.n
        };
        let direct = mat_power_direct(&kern.m, p.n);
        match m_power_cheb(&kern, n_cheb) {
            Ok(m) if direct.max_abs() < 1e250 => t.check(m.rel_diff(&direct), 1e-9),
            Ok(_) | Err(crate::Error::Overflow(_)) => {}
            Err(_) => t.fail(),
        }
        if let (Ok(s), Ok(s_pow)) = (transmission_n(e, &p), transmission_by_power(e, &p)) {
            if s_pow > 0.0 {
                t.check(rel(s.s, s_pow), 1e-9);
            }
        } else {
            t.fail();
        }
    }
}

fn sl2_determinant(rng: &mut ChaCha8Rng, _fault: Fault, t: &mut Tally) {
    for _ in 0..1000 {
        let p = random_params(rng, 64);
        let e = rng.gen_range(1e-3..2.0) * p.v;
        match phi_kernel(e, &p) {
            Ok(k) => {
                // measured on the unit-scaled matrix so thick barriers, whose
                // entries square past f64::MAX, stay checkable
                let s = k.m.max_abs().max(1.0);
                let inv_s2 = 1.0 / (s * s);
                let m = k.m.scale(C64::new(1.0 / s, 0.0));
                t.check((m.det() - C64::new(inv_s2, 0.0)).norm(), 1e-12);
                let pseudo = m.a11.norm_sqr() - m.a12.norm_sqr();
                t.check((pseudo - inv_s2).abs(), 1e-10);
            }
            Err(_) => t.fail(),
        }
    }
}

fn chebyshev_identity(rng: &mut ChaCha8Rng, _fault: Fault, t: &mut Tally) {
    for _ in 0..1000 {
        let n: i64 = rng.gen_range(1..=40);
        let x: f64 = rng.gen_range(-5.0..5.0);
        let a = cheb_u(n - 1, x).value;
        let b = cheb_u(n, x).value;
        let c = cheb_u(n - 2, x).value;
        let scale = (a * a).max(1.0);
        t.check((a * a - b * c - 1.0).abs() / scale, 1e-9);
        let r = cheb_u_recurrence(n, x);
        t.check((b - r).abs() / r.abs().max(1.0), 1e-10);
    }
}

fn branch_continuity(rng: &mut ChaCha8Rng, _fault: Fault, t: &mut Tally) {
    for _ in 0..200 {
        // M just inside and just outside the series window around E = V
        let p = random_params(rng, 64);
        let w = p.v_window();
        for side in [-1.0, 1.0] {
            let inside = phi_kernel(p.v + side * w * (1.0 - 1e-6), &p);
            let outside = phi_kernel(p.v + side * w * (1.0 + 1e-6), &p);
            match (inside, outside) {
                (Ok(a), Ok(b)) => t.check(a.m.rel_diff(&b.m), 1e-9),
                _ => t.fail(),
            }
        }
        // U_n at the confluent window edges, evaluated by both neighbours
        let n: i64 = rng.gen_range(1..=100_000);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        for (edge, other) in [
            (1.0 - CONFLUENCE_WINDOW, Regime::Trigonometric),
            (1.0 + CONFLUENCE_WINDOW, Regime::Hyperbolic),
        ] {
            let x = sign * edge;
            let conf = cheb_u_with(Regime::Confluent, n, x).value;
            let outer = cheb_u_with(other, n, x).value;
            // sin((n+1)t)/sin t crosses zero; measure against its envelope
            let envelope = 1.0 / (1.0 - x * x).abs().sqrt();
            t.check((outer - conf).abs() / conf.abs().max(envelope), 1e-6);
        }
    }
}

fn convergence_trend(_rng: &mut ChaCha8Rng, _fault: Fault, t: &mut Tally) {
    let base = ModelParams {
        v: 0.5 / ENERGY_QUANTUM_EV,
        gamma: 0.1,
        l: 500.0,
        n: 1,
    };
    let e_o = base.e_o();
    for factor in [1.5, 3.0, 10.0] {
        let e = factor * e_o;
        let Ok(limit) = transmission_limit(e, base.gamma, base.v, base.l) else {
            t.fail();
            continue;
        };
        let errs: Vec<f64> = [1_000u64, 10_000, 100_000]
            .iter()
            .map(|&n| {
                transmission_n(e, &base.with_n(n))
                    .map(|s| (s.s - limit.s).abs())
                    .unwrap_or(f64::NAN)
            })
            .collect();
        // the error falls off like 1/N^2 once N is large
        t.check(errs[2], 1e-3);
        t.check(errs[2] / errs[1].max(1e-300), 0.05);
        t.check(errs[1] / errs[0].max(1e-300), 0.5);
    }
}

fn amplitude_continuity(rng: &mut ChaCha8Rng, _fault: Fault, t: &mut Tally) {
    for _ in 0..100 {
        let p = random_params(rng, 32);
        let mut e = rng.gen_range(1e-3..2.0) * p.v;
        if (e - p.v).abs() <= 2.0 * p.v_window() {
            e += 4.0 * p.v_window();
        }
        match amplitude_trace(e, &p, C64::new(1.0, 0.0)) {
            Ok(trace) => {
                t.check(trace.max_residual(), 1e-9);
                if let Ok(s) = transmission_n(e, &p) {
                    if s.s > 1e-200 {
                        t.check(rel(trace.transmission(), s.s), 1e-8);
                    }
                }
            }
            Err(_) => t.fail(),
        }
    }
}
