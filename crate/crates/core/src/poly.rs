//! Complex polynomials in ascending coefficient order and their roots.
//!
//! Roots come from the eigenvalues of the companion matrix (shifted QR on the
//! Hessenberg form) followed by a few Newton steps on the original polynomial.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use num_complex::Complex;
use num_traits::{One, Zero};

/// Horner evaluation; `coeffs[k]` multiplies `z^k`.
pub fn eval<T: Real>(coeffs: &[Complex<T>], z: Complex<T>) -> Complex<T> {
    coeffs.iter().rev().fold(Complex::zero(), |acc, &c| acc * z + c)
}

/// Value and first derivative in one pass.
pub fn eval_with_derivative<T: Real>(coeffs: &[Complex<T>], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = Complex::zero();
    let mut dp = Complex::zero();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

pub fn derivative<T: Real>(coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * lit::<T>(k as f64))
        .collect()
}

pub fn mul<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex::zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

/// Index of the highest coefficient whose modulus exceeds `rel * max|c|`.
pub fn degree<T: Real>(coeffs: &[Complex<T>], rel: T) -> Option<usize> {
    let scale = coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()));
    if scale == T::zero() {
        return None;
    }
    coeffs.iter().rposition(|c| c.norm() > rel * scale)
}

pub fn max_modulus<T: Real>(coeffs: &[Complex<T>]) -> T {
    coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
}

/// All complex roots of the polynomial, with multiplicity.
pub fn roots<T: Real>(coeffs: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let n = match degree(coeffs, T::epsilon()) {
        None | Some(0) => return Ok(Vec::new()),
        Some(n) => n,
    };
    let lead = coeffs[n];
    if n == 1 {
        return Ok(vec![-coeffs[0] / lead]);
    }
    // Upper Hessenberg companion matrix of the monic polynomial.
    let mut h = vec![vec![Complex::<T>::zero(); n]; n];
    for k in 0..n {
        h[0][k] = -coeffs[n - 1 - k] / lead;
    }
    for k in 1..n {
        h[k][k - 1] = Complex::one();
    }
    let mut rts = hessenberg_eigenvalues(h)?;
    for z in rts.iter_mut() {
        *z = newton_polish(coeffs, *z);
    }
    Ok(rts)
}

fn newton_polish<T: Real>(coeffs: &[Complex<T>], mut z: Complex<T>) -> Complex<T> {
    let mut best = (eval(coeffs, z).norm(), z);
    for _ in 0..8 {
        let (p, dp) = eval_with_derivative(coeffs, z);
        if dp.norm() == T::zero() {
            break;
        }
        z = z - p / dp;
        let r = eval(coeffs, z).norm();
        if r < best.0 {
            best = (r, z);
        } else {
            break;
        }
    }
    best.1
}

/// Eigenvalues of an upper Hessenberg matrix by single-shift complex QR with deflation.
pub fn hessenberg_eigenvalues<T: Real>(mut h: Vec<Vec<Complex<T>>>) -> Result<Vec<Complex<T>>> {
    let n = h.len();
    let mut eig = vec![Complex::zero(); n];
    if n == 0 {
        return Ok(eig);
    }
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h[0][0];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let s = h[l - 1][l - 1].norm() + h[l][l].norm();
            if h[l][l - 1].norm() <= eps * s.max(T::min_positive_value()) {
                h[l][l - 1] = Complex::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[hi][hi];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 60 * n {
            return Err(Error::RootFinding);
        }
        let shift = if iter % 11 == 10 {
            h[hi][hi] + Complex::new(h[hi][hi - 1].norm(), T::zero())
        } else {
            wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };
        for k in l..=hi {
            h[k][k] = h[k][k] - shift;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            for j in k..=hi {
                let x = h[k][j];
                let y = h[k + 1][j];
                h[k][j] = c.conj() * x + s.conj() * y;
                h[k + 1][j] = -s * x + c * y;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = l + idx;
            for row in h.iter_mut().take((k + 2).min(hi) + 1).skip(l) {
                let x = row[k];
                let y = row[k + 1];
                row[k] = x * c + y * s;
                row[k + 1] = -(x * s.conj()) + y * c.conj();
            }
        }
        for k in l..=hi {
            h[k][k] = h[k][k] + shift;
        }
    }
    Ok(eig)
}

fn givens<T: Real>(x: Complex<T>, y: Complex<T>) -> (Complex<T>, Complex<T>) {
    let r = x.norm().hypot(y.norm());
    if r == T::zero() {
        return (Complex::one(), Complex::zero());
    }
    (x / r, y / r)
}

fn wilkinson_shift<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let half = lit::<T>(0.5);
    let tr = (a + d) * half;
    let det = a * d - b * c;
    let disc = (tr * tr - det).sqrt();
    let m1 = tr + disc;
    let m2 = tr - disc;
    if (m1 - d).norm() < (m2 - d).norm() {
        m1
    } else {
        m2
    }
}
