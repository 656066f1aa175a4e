//! Complex 2x2 matrices.
//!
//! Every transfer matrix in the model (`Delta`, `T`, `Q_j`, `M`, `M^N`) is a
//! 2x2 complex matrix, so this module carries a small fixed-size type instead
//! of a general linear-algebra dependency.

use std::ops::{Add, Mul, Sub};

use crate::{Error, Result, C64};

/// Row-major complex 2x2 matrix `[[a11, a12], [a21, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2C {
    pub a11: C64,
    pub a12: C64,
    pub a21: C64,
    pub a22: C64,
}

/// Eigenvalues of a unimodular matrix, `mu1 <= mu2` on the real branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub mu1: C64,
    pub mu2: C64,
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

impl Mat2C {
    pub const IDENTITY: Mat2C = Mat2C {
        a11: ONE,
        a12: ZERO,
        a21: ZERO,
        a22: ONE,
    };

    pub const fn new(a11: C64, a12: C64, a21: C64, a22: C64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn from_real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self::new(a11.into(), a12.into(), a21.into(), a22.into())
    }

    pub fn diag(d1: C64, d2: C64) -> Self {
        Self::new(d1, ZERO, ZERO, d2)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn det(&self) -> C64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> C64 {
        self.a11 + self.a22
    }

    pub fn inv(&self) -> Result<Mat2C> {
        let d = self.det();
        if d.norm().is_nan() || d.norm() <= 1e-300 {
            return Err(Error::Singular(d.norm()));
        }
        let r = d.inv();
        Ok(Self::new(
            self.a22 * r,
            -self.a12 * r,
            -self.a21 * r,
            self.a11 * r,
        ))
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.is_finite())
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: (C64, C64)) -> (C64, C64) {
        (
            self.a11 * v.0 + self.a12 * v.1,
            self.a21 * v.0 + self.a22 * v.1,
        )
    }

    /// Largest entrywise difference, measured against the largest entry of
    /// `reference`.
    pub fn rel_diff(&self, reference: &Mat2C) -> f64 {
        let scale = reference.max_abs().max(f64::MIN_POSITIVE);
        (*self - *reference).max_abs() / scale
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, o: Mat2C) -> Mat2C {
        Mat2C::new(
            self.a11 + o.a11,
            self.a12 + o.a12,
            self.a21 + o.a21,
            self.a22 + o.a22,
        )
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, o: Mat2C) -> Mat2C {
        Mat2C::new(
            self.a11 - o.a11,
            self.a12 - o.a12,
            self.a21 - o.a21,
            self.a22 - o.a22,
        )
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, o: Mat2C) -> Mat2C {
        Mat2C::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

pub fn mul(a: &Mat2C, b: &Mat2C) -> Mat2C {
    *a * *b
}

pub fn inv(a: &Mat2C) -> Result<Mat2C> {
    a.inv()
}

pub fn det(a: &Mat2C) -> C64 {
    a.det()
}

/// `Delta[alpha x] = diag(e^{alpha x}, e^{-alpha x})`.
pub fn delta_mat(alpha: C64, x: f64) -> Result<Mat2C> {
    let ax = alpha * x;
    if !ax.is_finite() {
        return Err(Error::domain(format!("non-finite exponent {ax} in Delta")));
    }
    let m = Mat2C::diag(ax.exp(), (-ax).exp());
    if !m.is_finite() {
        return Err(Error::domain(format!("exponent {ax} overflows in Delta")));
    }
    Ok(m)
}

/// `T[alpha, x]`: maps the coefficients of `(e^{alpha x}, e^{-alpha x})` to
/// the value and first derivative of the wave at `x`.
pub fn t_mat(alpha: C64, x: f64) -> Result<Mat2C> {
    if alpha == ZERO {
        return Err(Error::domain("T[alpha, x] is singular at alpha = 0"));
    }
    let d = delta_mat(alpha, x)?;
    Ok(Mat2C::new(d.a11, d.a22, alpha * d.a11, -alpha * d.a22))
}

/// `m^n` by binary exponentiation.
pub fn mat_power_direct(m: &Mat2C, n: u64) -> Mat2C {
    let mut acc = Mat2C::IDENTITY;
    let mut base = *m;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        e >>= 1;
        if e > 0 {
            base = base * base;
        }
    }
    acc
}

/// Eigenvalues of a unimodular matrix with half-trace `phi`:
/// `phi -+ sqrt(phi^2 - 1)`, on the unit circle when `|phi| < 1`.
pub fn eigenvalues_sl2(phi: f64) -> EigenPair {
    let disc = phi * phi - 1.0;
    if disc >= 0.0 {
        let r = disc.sqrt();
        // The smaller-magnitude root from the product avoids cancellation.
        let (mu1, mu2) = if phi >= 0.0 {
            let big = phi + r;
            (1.0 / big, big)
        } else {
            let big = phi - r;
            (big, 1.0 / big)
        };
        EigenPair {
            mu1: mu1.into(),
            mu2: mu2.into(),
        }
    } else {
        let s = (-disc).sqrt();
        EigenPair {
            mu1: C64::new(phi, -s),
            mu2: C64::new(phi, s),
        }
    }
}
