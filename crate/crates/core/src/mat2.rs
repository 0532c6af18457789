//! 2×2 complex matrices.

use crate::scalar::{lit, Real};
use num_complex::Complex;
use num_traits::{One, Zero};
use std::ops::Mul;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        Self::diag(Complex::one(), Complex::one())
    }

    pub fn diag(a: Complex<T>, d: Complex<T>) -> Self {
        Self::new(a, Complex::zero(), Complex::zero(), d)
    }

    /// Exchanges the two basis vectors.
    pub fn swap() -> Self {
        Self::new(Complex::zero(), Complex::one(), Complex::one(), Complex::zero())
    }

    pub fn upper(a: Complex<T>, b: Complex<T>, d: Complex<T>) -> Self {
        Self::new(a, b, Complex::zero(), d)
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        Self::new(self.m[1][1] / d, -self.m[0][1] / d, -self.m[1][0] / d, self.m[0][0] / d)
    }

    pub fn apply(&self, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = self.m[i][j] - o.m[i][j];
            }
        }
        r
    }

    pub fn sup_norm(&self) -> T {
        self.m.iter().flatten().fold(T::zero(), |a, z| a.max(z.norm()))
    }

    pub fn dist(&self, o: &Self) -> T {
        self.sub(o).sup_norm()
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn from_columns(u: [Complex<T>; 2], v: [Complex<T>; 2]) -> Self {
        Self::new(u[0], v[0], u[1], v[1])
    }

    /// Both eigenvalues, ordered arbitrarily.
    pub fn eigenvalues(&self) -> [Complex<T>; 2] {
        let half = lit::<T>(0.5);
        let h = self.trace() * half;
        let disc = (h * h - self.det()).sqrt();
        [h + disc, h - disc]
    }

    /// A nonzero vector spanning ker(M − μ), taken from the larger row of M − μ.
    pub fn eigenvector(&self, mu: Complex<T>) -> Option<[Complex<T>; 2]> {
        let a = self.m[0][0] - mu;
        let b = self.m[0][1];
        let c = self.m[1][0];
        let d = self.m[1][1] - mu;
        let r0 = a.norm().hypot(b.norm());
        let r1 = c.norm().hypot(d.norm());
        if r0.max(r1) == T::zero() {
            return None;
        }
        Some(if r0 >= r1 { [b, -a] } else { [d, -c] })
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// Rescales so the largest-modulus entry equals 1.
pub fn normalize_line<T: Real>(v: [Complex<T>; 2]) -> [Complex<T>; 2] {
    let k = if v[0].norm() >= v[1].norm() { 0 } else { 1 };
    let s = v[k];
    [v[0] / s, v[1] / s]
}

/// Projective distance |u ∧ v| / (|u||v|), the sine of the angle between the lines.
pub fn line_distance<T: Real>(u: [Complex<T>; 2], v: [Complex<T>; 2]) -> T {
    let w = u[0] * v[1] - u[1] * v[0];
    let nu = u[0].norm().hypot(u[1].norm());
    let nv = v[0].norm().hypot(v[1].norm());
    w.norm() / (nu * nv)
}
