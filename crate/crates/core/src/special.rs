//! Overflow-safe hyperbolic helpers shared by the kernel and transport code.

/// `ln(sinh(y))` for `y > 0`, finite far beyond the range where `sinh`
/// overflows.
pub(crate) fn ln_sinh(y: f64) -> f64 {
    debug_assert!(y >= 0.0);
    if y < 20.0 {
        y.sinh().ln()
    } else {
        y + (-(-2.0 * y).exp()).ln_1p() - std::f64::consts::LN_2
    }
}

/// Signed square-root "sinc" of the barrier: `sinh(sqrt(q) w) / sqrt(q)` for
/// `q > 0`, `sin(sqrt(-q) w) / sqrt(-q)` for `q < 0`, and its Taylor series
/// `w (1 + q w^2 / 6 + q^2 w^4 / 120)` when `|q| <= window`.
pub(crate) fn shz(q: f64, w: f64, window: f64) -> f64 {
    if q.abs() <= window {
        let y = q * w * w;
        w * (1.0 + y / 6.0 * (1.0 + y / 20.0 * (1.0 + y / 42.0)))
    } else if q > 0.0 {
        let s = q.sqrt();
        (s * w).sinh() / s
    } else {
        let s = (-q).sqrt();
        (s * w).sin() / s
    }
}

/// Companion of [`shz`]: `cosh(sqrt(q) w)` continued to `cos(sqrt(-q) w)`.
pub(crate) fn chz(q: f64, w: f64) -> f64 {
    if q >= 0.0 {
        (q.sqrt() * w).cosh()
    } else {
        ((-q).sqrt() * w).cos()
    }
}

/// Natural log of `|shz(q, w)|` and its sign, without overflow for large
/// `sqrt(q) w`.
pub(crate) fn ln_abs_shz(q: f64, w: f64, window: f64) -> (f64, f64) {
    if q > window {
        let s = q.sqrt();
        let y = s * w;
        if y > 700.0 {
            return (ln_sinh(y) - s.ln(), 1.0);
        }
    }
    let v = shz(q, w, window);
    (v.abs().ln(), v.signum())
}
