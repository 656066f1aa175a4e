//! Chebyshev polynomials of the second kind, `U_n(x)`, for any real `x`.
//!
//! `U_n` satisfies `U_n = 2x U_{n-1} - U_{n-2}` with `U_{-1} = 0`,
//! `U_0 = 1`. Inside `[-1, 1]` it oscillates, `U_n(cos t) = sin((n+1)t) /
//! sin t`; outside it grows like `|x + sqrt(x^2 - 1)|^n`, which for a
//! transfer matrix in a band gap means values far past `f64::MAX`. Values are
//! therefore returned together with `ln|U_n|`, which stays finite.
//!
//! Evaluation works on `|x|` and restores the sign with `U_n(-x) =
//! (-1)^n U_n(x)`. Three regimes:
//!
//! * `|x| <= 1 - w`: `sin((n+1)t) / sin t` with `t = acos|x|`;
//! * `|x| >= 1 + w`: `sinh((n+1)a) / sinh a` with `a = acosh|x|`;
//! * `||x| - 1| < w`: `(n+1) sinc((n+1)t) / sinc t` with the angle taken from
//!   `1 - |x|` directly (or its hyperbolic twin), which reduces to `n + 1`
//!   at `|x| = 1` without a `0/0`.
//!
//! `w` is [`CONFLUENCE_WINDOW`].

use crate::kernel::PhiKernel;
use crate::mat2::Mat2C;
use crate::special::ln_sinh;
use crate::{Error, Result, C64};

/// Half-width of the window around `|x| = 1` handled by the confluent form.
pub const CONFLUENCE_WINDOW: f64 = 1e-7;

/// Largest `|U_{N-1}|` accepted by the linear-scale matrix power.
pub const LINEAR_POWER_LIMIT: f64 = 1e280;

/// `U_n(x)` with its log-magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebValue {
    /// `U_n(x)`; may be infinite when the true value exceeds `f64::MAX`.
    pub value: f64,
    /// `ln|U_n(x)|`; `-inf` exactly when `value == 0`.
    pub log_abs: f64,
    /// -1, 0 or +1.
    pub sign: i8,
}

impl ChebValue {
    pub const ZERO: ChebValue = ChebValue {
        value: 0.0,
        log_abs: f64::NEG_INFINITY,
        sign: 0,
    };
    pub const ONE: ChebValue = ChebValue {
        value: 1.0,
        log_abs: 0.0,
        sign: 1,
    };

    fn from_value(value: f64) -> Self {
        ChebValue {
            value,
            log_abs: value.abs().ln(),
            sign: sign_of(value),
        }
    }

    fn from_log(log_abs: f64, sign: i8) -> Self {
        ChebValue {
            value: f64::from(sign) * log_abs.exp(),
            log_abs,
            sign,
        }
    }

    fn negated(self) -> Self {
        ChebValue {
            value: -self.value,
            log_abs: self.log_abs,
            sign: -self.sign,
        }
    }
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Evaluation route for [`cheb_u_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Trigonometric,
    Hyperbolic,
    Confluent,
}

impl Regime {
    pub fn for_argument(x: f64) -> Regime {
        let d = x.abs() - 1.0;
        if d.abs() < CONFLUENCE_WINDOW {
            Regime::Confluent
        } else if d < 0.0 {
            Regime::Trigonometric
        } else {
            Regime::Hyperbolic
        }
    }
}

/// `U_n(x)` for `n >= -1` (negative `n` continues the recurrence backwards).
pub fn cheb_u(n: i64, x: f64) -> ChebValue {
    cheb_u_with(Regime::for_argument(x), n, x)
}

/// `U_n(x)` forced through one regime. The trigonometric route needs
/// `|x| <= 1` and the hyperbolic one `|x| >= 1`; the confluent route is exact
/// everywhere but intended for `|x|` close to 1.
pub fn cheb_u_with(regime: Regime, n: i64, x: f64) -> ChebValue {
    if !x.is_finite() {
        return ChebValue {
            value: f64::NAN,
            log_abs: f64::NAN,
            sign: 0,
        };
    }
    match n {
        -1 => return ChebValue::ZERO,
        0 => return ChebValue::ONE,
        n if n < -1 => return cheb_u_with(regime, -n - 2, x).negated(),
        _ => {}
    }
    let y = x.abs();
    let v = match regime {
        Regime::Trigonometric => trig(n, y),
        Regime::Hyperbolic => hyperbolic(n, y),
        Regime::Confluent => confluent(n, y),
    };
    if x < 0.0 && n % 2 == 1 {
        v.negated()
    } else {
        v
    }
}

fn trig(n: i64, y: f64) -> ChebValue {
    if y == 0.0 {
        return match n % 4 {
            0 => ChebValue::ONE,
            2 => ChebValue::ONE.negated(),
            _ => ChebValue::ZERO,
        };
    }
    let t = y.min(1.0).acos();
    let s = ((1.0 - y) * (1.0 + y)).max(0.0).sqrt();
    if s == 0.0 {
        return ChebValue::from_value((n + 1) as f64);
    }
    ChebValue::from_value(((n + 1) as f64 * t).sin() / s)
}

fn hyperbolic(n: i64, y: f64) -> ChebValue {
    let y = y.max(1.0);
    let sinh_a = ((y - 1.0) * (y + 1.0)).sqrt();
    if sinh_a == 0.0 {
        return ChebValue::from_value((n + 1) as f64);
    }
    let a = y.acosh();
    let m = (n + 1) as f64 * a;
    if m < 700.0 {
        ChebValue::from_value(m.sinh() / sinh_a)
    } else {
        ChebValue::from_log(ln_sinh(m) - sinh_a.ln(), 1)
    }
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 * (1.0 - t2 / 20.0)
    } else {
        t.sin() / t
    }
}

fn sinhc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 + t2 / 6.0 * (1.0 + t2 / 20.0)
    } else {
        t.sinh() / t
    }
}

fn confluent(n: i64, y: f64) -> ChebValue {
    let np1 = (n + 1) as f64;
    let u = 1.0 - y;
    if u >= 0.0 {
        // acos(1 - u) = 2 asin(sqrt(u / 2)), without forming 1 - u again
        let t = 2.0 * (0.5 * u).sqrt().asin();
        ChebValue::from_value(np1 * sinc(np1 * t) / sinc(t))
    } else {
        let a = 2.0 * (-0.5 * u).sqrt().asinh();
        let m = np1 * a;
        if m < 700.0 {
            ChebValue::from_value(np1 * sinhc(m) / sinhc(a))
        } else {
            ChebValue::from_log(ln_sinh(m) - m.ln() + np1.ln() - sinhc(a).ln(), 1)
        }
    }
}

/// The plain three-term recurrence, `n >= -1`. Exact up to rounding and
/// used as an oracle for modest `n`.
pub fn cheb_u_recurrence(n: i64, x: f64) -> f64 {
    if n < 0 {
        return 0.0;
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `M^N = U_{N-1}(Phi) M - U_{N-2}(Phi) I`.
pub fn m_power_cheb(kern: &PhiKernel, n: u64) -> Result<Mat2C> {
    if n == 0 {
        return Err(Error::domain("matrix power via Chebyshev needs N >= 1"));
    }
    let n = n as i64;
    let u1 = cheb_u(n - 1, kern.phi);
    if u1.value.is_nan() || u1.value.abs() > LINEAR_POWER_LIMIT {
        return Err(Error::Overflow(u1.value.abs()));
    }
    let u2 = cheb_u(n - 2, kern.phi);
    Ok(kern.m.scale(C64::new(u1.value, 0.0)) - Mat2C::IDENTITY.scale(C64::new(u2.value, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{phi_kernel, ModelParams};
    use crate::mat2::mat_power_direct;
    use crate::units::ev_to_model;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn initial_values() {
        for &x in &[-3.0, -1.0, -0.2, 0.0, 0.7, 1.0, 4.0] {
            assert_eq!(cheb_u(-1, x), ChebValue::ZERO);
            assert_eq!(cheb_u(0, x), ChebValue::ONE);
        }
    }

    #[test]
    fn small_cases() {
        assert!((cheb_u(3, 0.5).value + 1.0).abs() < 1e-15);
        assert_eq!(cheb_u(1, 1.0).value, 2.0);
        assert_eq!(cheb_u(1, -1.0).value, -2.0);
        assert_eq!(cheb_u(2, 1.0).value, 3.0);
        assert_eq!(cheb_u(2, -1.0).value, 3.0);
        assert_eq!(cheb_u(-2, 0.3).value, -1.0);
    }

    #[test]
    fn hyperbolic_against_recurrence() {
        let closed = cheb_u(9, 1.5).value;
        let oracle = cheb_u_recurrence(9, 1.5);
        assert!(rel(closed, oracle) <= 1e-12);
        // 64 steps
        assert!(rel(cheb_u(64, 1.5).value, cheb_u_recurrence(64, 1.5)) <= 1e-12);
    }

    #[test]
    fn log_form_survives_overflow() {
        let v = cheb_u(2000, 3.0);
        assert!(v.value.is_infinite());
        // ln U_n(3) ~ (n+1) acosh(3) - ln(2 sinh(acosh 3))
        let a = 3f64.acosh();
        let expect = 2001.0 * a - (2.0 * a.sinh()).ln();
        assert!((v.log_abs - expect).abs() < 1e-10);
        assert_eq!(v.sign, 1);
        let v = cheb_u(2001, -3.0);
        assert_eq!(v.sign, -1);
    }

    #[test]
    fn zero_has_log_sentinel() {
        // U_1(0) = 0
        let v = cheb_u(1, 0.0);
        assert_eq!(v.value, 0.0);
        assert_eq!(v.sign, 0);
        assert_eq!(v.log_abs, f64::NEG_INFINITY);
    }

    #[test]
    fn regimes_agree_near_one() {
        for &x in &[1.0 - 1e-7, 1.0 + 1e-7, -1.0 + 1e-7, -1.0 - 1e-7] {
            for &n in &[1i64, 5, 40, 1000, 100_000] {
                let conf = cheb_u_with(Regime::Confluent, n, x).value;
                let other = if x.abs() < 1.0 {
                    cheb_u_with(Regime::Trigonometric, n, x).value
                } else {
                    cheb_u_with(Regime::Hyperbolic, n, x).value
                };
                assert!(rel(other, conf) <= 1e-6, "n={n} x={x}: {other} vs {conf}");
                if n <= 64 {
                    assert!(rel(cheb_u_recurrence(n, x), conf) <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn confluent_reduces_to_n_plus_one() {
        for n in 0..50 {
            let v = cheb_u_with(Regime::Confluent, n, 1.0).value;
            assert_eq!(v, (n + 1) as f64);
            let v = cheb_u(n, -1.0).value;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(v, sign * (n + 1) as f64);
        }
    }

    #[test]
    fn power_n1_is_m() {
        let p = ModelParams::new(ev_to_model(0.5), 0.1, 500.0, 30).unwrap();
        let kern = phi_kernel(2.0, &p).unwrap();
        assert_eq!(m_power_cheb(&kern, 1).unwrap(), kern.m);
    }

    #[test]
    fn power_n2_is_square() {
        let p = ModelParams::new(ev_to_model(0.5), 0.1, 500.0, 30).unwrap();
        for &e in &[0.5, 2.0, 14.0] {
            let kern = phi_kernel(e, &p).unwrap();
            let sq = kern.m * kern.m;
            assert!(m_power_cheb(&kern, 2).unwrap().rel_diff(&sq) <= 1e-13);
        }
    }

    #[test]
    fn power_diagonal_identities() {
        let p = ModelParams::new(6.0, 0.3, 40.0, 20).unwrap();
        let kern = phi_kernel(4.0, &p).unwrap();
        let mn = m_power_cheb(&kern, 20).unwrap();
        let un = cheb_u(20, kern.phi).value;
        let un1 = cheb_u(19, kern.phi).value;
        let scale = mn.max_abs();
        assert!((mn.a11 - (un - kern.m.a22 * un1)).norm() <= 1e-12 * scale);
        assert!((mn.a22 - (un - kern.m.a11 * un1)).norm() <= 1e-12 * scale);
        assert!((mn.a11 - mn.a22.conj()).norm() <= 1e-12 * scale);
        assert!((mn.a12 - mn.a21.conj()).norm() <= 1e-12 * scale);
    }

    #[test]
    fn power_overflow_is_reported() {
        let p = ModelParams::new(ev_to_model(0.5), 0.1, 1000.0, 5000).unwrap();
        let kern = phi_kernel(0.05, &p).unwrap();
        assert!(kern.phi > 1.0);
        assert!(matches!(m_power_cheb(&kern, 5000), Err(Error::Overflow(_))));
        assert!(m_power_cheb(&kern, 0).is_err());
    }

    fn band_params() -> impl Strategy<Value = (ModelParams, f64)> {
        (1.0f64..20.0, 0.02f64..1.0, 10.0f64..500.0, 0.05f64..2.0)
            .prop_map(|(v, g, l, f)| (ModelParams::new(v, g, l, 50).unwrap(), f * v))
    }

    proptest! {
        #[test]
        fn pell_identity(n in 1i64..=40, x in -5.0f64..5.0) {
            let a = cheb_u(n - 1, x).value;
            let b = cheb_u(n, x).value;
            let c = cheb_u(n - 2, x).value;
            let resid = (a * a - b * c - 1.0).abs();
            // outside [-1, 1] the terms reach 1e80, so only a relative bound
            // is representable there
            let scale = if x.abs() <= 1.0 { 1.0 } else { (a * a).max(1.0) };
            prop_assert!(resid <= 1e-9 * scale, "{resid}");
        }

        #[test]
        fn closed_forms_match_recurrence(n in 0i64..=64, x in -2.0f64..2.0) {
            let closed = cheb_u(n, x).value;
            let exact = cheb_u_recurrence(n, x);
            // near a zero of U_n relative error is meaningless; compare to
            // the local magnitude instead
            let scale = exact.abs().max(if x.abs() <= 1.0 { 1.0 } else { 0.0 });
            prop_assert!((closed - exact).abs() <= 1e-11 * scale.max(f64::MIN_POSITIVE),
                "U_{}({}) = {} vs {}", n, x, closed, exact);
        }

        #[test]
        fn log_and_value_agree(n in 0i64..500, x in -3.0f64..3.0) {
            let v = cheb_u(n, x);
            if v.value != 0.0 && v.value.abs() < 1e300 {
                let rebuilt = f64::from(v.sign) * v.log_abs.exp();
                prop_assert!(rel(rebuilt, v.value) <= 1e-10);
            }
        }

        #[test]
        fn power_is_unimodular((p, e) in band_params(), n in 1u64..=64) {
            let kern = phi_kernel(e, &p).unwrap();
            let mn = match m_power_cheb(&kern, n) {
                Err(Error::Overflow(_)) => return Ok(()),
                r => r.unwrap(),
            };
            // in a gap the entries pass 1e154 and det overflows; take it on
            // the unit-scaled matrix and compare against 1/s^2 instead
            let s = mn.max_abs().max(1.0);
            let det = mn.scale(C64::new(1.0 / s, 0.0)).det();
            prop_assert!((det - C64::new(1.0 / (s * s), 0.0)).norm() <= 1e-10, "{det} at scale {s:e}");
        }

        #[test]
        fn power_matches_squaring((p, e) in band_params(), n in 1u64..=64) {
            let e = p.e_o() + (e / (2.0 * p.v)) * (2.0 * p.v - p.e_o());
            let kern = phi_kernel(e, &p).unwrap();
            let cheb = match m_power_cheb(&kern, n) {
                Err(Error::Overflow(_)) => return Ok(()),
                r => r.unwrap(),
            };
            let direct = mat_power_direct(&kern.m, n);
            prop_assert!(cheb.rel_diff(&direct) <= 1e-9, "{}", cheb.rel_diff(&direct));
        }
    }
}
