//! Meromorphic quadratic differentials on the marked sphere.
//!
//! φ = N(z) / ∏_{p finite} (z − p)² dz². Every puncture is a double pole; at ∞ the
//! chart w = 1/z is used.

use crate::error::{Error, Result};
use crate::poly;
use crate::scalar::{cplx, lit, to_c64, Real};
use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Puncture<T> {
    Finite(Complex<T>),
    Infinity,
}

impl<T: Real> Puncture<T> {
    pub fn finite(&self) -> Option<Complex<T>> {
        match *self {
            Puncture::Finite(z) => Some(z),
            Puncture::Infinity => None,
        }
    }
}

/// Relative tolerance used for exact-membership tests (ℝ₋, ¼ℤ, hypersurface).
fn membership_tol<T: Real>() -> T {
    lit::<T>(1e3) * T::epsilon()
}

/// Square root λ of a quadratic residue with Re λ > 0.
pub fn levelt_exponent<T: Real>(a: Complex<T>) -> Result<Complex<T>> {
    let tol = membership_tol::<T>();
    let scale = T::one().max(a.norm());
    let c = to_c64(a);
    if a.im.abs() <= tol * scale {
        if a.re <= T::zero() {
            return Err(Error::NonGenericResidue { re: c.re, im: c.im, reason: "residue on the closed negative real axis" });
        }
        let four = a.re * lit(4.0);
        if (four - four.round()).abs() <= tol * scale * lit(4.0) {
            return Err(Error::NonGenericResidue { re: c.re, im: c.im, reason: "residue in (1/4)Z" });
        }
    }
    let l = a.sqrt();
    let l = if l.re < T::zero() { -l } else { l };
    Ok(l)
}

/// α² + β² + γ² − 2αβ − 2αγ − 2βγ.
pub fn hypersurface_value<T: Real>(alpha: Complex<T>, beta: Complex<T>, gamma: Complex<T>) -> Complex<T> {
    let two = lit::<T>(2.0);
    alpha * alpha + beta * beta + gamma * gamma - (alpha * beta + alpha * gamma + beta * gamma) * two
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkedSphere<T> {
    pub punctures: Vec<Puncture<T>>,
    pub residues: Vec<Complex<T>>,
    pub levelt: Vec<Complex<T>>,
}

impl<T: Real> MarkedSphere<T> {
    pub fn new(punctures: Vec<Puncture<T>>, residues: Vec<Complex<T>>) -> Result<Self> {
        if punctures.len() < 3 {
            return Err(Error::NonGenericDifferential("fewer than three punctures".into()));
        }
        if punctures.len() != residues.len() {
            return Err(Error::NonGenericDifferential("one residue per puncture required".into()));
        }
        if punctures.iter().filter(|p| matches!(p, Puncture::Infinity)).count() > 1 {
            return Err(Error::NonGenericDifferential("infinity listed twice".into()));
        }
        let fin: Vec<_> = punctures.iter().filter_map(|p| p.finite()).collect();
        for i in 0..fin.len() {
            for j in 0..i {
                if (fin[i] - fin[j]).norm() <= membership_tol::<T>() * T::one().max(fin[i].norm()) {
                    return Err(Error::NonGenericDifferential("coincident punctures".into()));
                }
            }
        }
        let levelt = residues.iter().map(|&a| levelt_exponent(a)).collect::<Result<Vec<_>>>()?;
        Ok(MarkedSphere { punctures, residues, levelt })
    }

    /// No genericity checks; λ is the principal square root. For algebraic identities only.
    pub fn new_unchecked(punctures: Vec<Puncture<T>>, residues: Vec<Complex<T>>) -> Self {
        let levelt = residues.iter().map(|a| a.sqrt()).collect();
        MarkedSphere { punctures, residues, levelt }
    }

    pub fn len(&self) -> usize {
        self.punctures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.punctures.is_empty()
    }

    pub fn infinity_index(&self) -> Option<usize> {
        self.punctures.iter().position(|p| matches!(p, Puncture::Infinity))
    }
}

/// A point together with a continuously chosen value of √φ there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchState<T> {
    pub z: Complex<T>,
    pub value: Complex<T>,
}

/// Chooses the square root of `phi` nearest `reference`.
/// Also returns |cos| of the angle between the choice and the reference; values
/// near 0 mean the two candidates are almost equidistant.
pub fn nearest_root<T: Real>(phi: Complex<T>, reference: Complex<T>) -> (Complex<T>, T) {
    let s = phi.sqrt();
    let dot = (s * reference.conj()).re;
    let denom = s.norm() * reference.norm();
    let cos = if denom > T::zero() { dot.abs() / denom } else { T::zero() };
    (if dot >= T::zero() { s } else { -s }, cos)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticDifferential<T> {
    pub marked: MarkedSphere<T>,
    /// Ascending coefficients of N.
    pub numerator: Vec<Complex<T>>,
}

impl<T: Real> QuadraticDifferential<T> {
    /// The unique differential with residues α, β, γ at 0, 1, ∞.
    pub fn three_point(alpha: Complex<T>, beta: Complex<T>, gamma: Complex<T>) -> Result<Self> {
        // The hypersurface is checked first: (4, 1, 1) reports it rather than the resonance.
        let h = hypersurface_value(alpha, beta, gamma);
        let scale = alpha.norm() + beta.norm() + gamma.norm();
        if h.norm() <= membership_tol::<T>() * scale * scale {
            return Err(Error::OnHypersurface { value: to_c64(h).norm() });
        }
        for a in [alpha, beta, gamma] {
            levelt_exponent(a)?;
        }
        let numerator = vec![alpha, -(alpha - beta + gamma), gamma];
        let punctures = vec![
            Puncture::Finite(Complex::zero()),
            Puncture::Finite(Complex::one()),
            Puncture::Infinity,
        ];
        Self::from_numerator(punctures, numerator)
    }

    /// Builds φ from its numerator; residues are computed and must be generic.
    pub fn from_numerator(punctures: Vec<Puncture<T>>, numerator: Vec<Complex<T>>) -> Result<Self> {
        let raw = Self::from_numerator_unchecked(punctures, numerator)?;
        let marked = MarkedSphere::new(raw.marked.punctures, raw.marked.residues)?;
        Ok(QuadraticDifferential { marked, numerator: raw.numerator })
    }

    /// Checks only the pole orders, not residue genericity.
    pub fn from_numerator_unchecked(punctures: Vec<Puncture<T>>, numerator: Vec<Complex<T>>) -> Result<Self> {
        let n_fin = punctures.iter().filter(|p| p.finite().is_some()).count();
        let has_inf = n_fin < punctures.len();
        if punctures.len() < 3 || n_fin < 2 {
            return Err(Error::NonGenericDifferential("at least three punctures, two of them finite".into()));
        }
        let deg = poly::degree(&numerator, T::epsilon() * lit(16.0))
            .ok_or_else(|| Error::NonGenericDifferential("zero numerator".into()))?;
        let want = if has_inf { 2 * n_fin - 2 } else { 2 * n_fin - 4 };
        if deg != want {
            return Err(Error::NonGenericDifferential(format!(
                "numerator degree {deg} inconsistent with double poles (expected {want})"
            )));
        }
        let mut numerator = numerator;
        numerator.truncate(deg + 1);
        let residues: Vec<_> = punctures
            .iter()
            .map(|p| match p {
                Puncture::Infinity => numerator[deg],
                Puncture::Finite(z) => {
                    let mut d = Complex::<T>::one();
                    for q in punctures.iter().filter_map(|q| q.finite()) {
                        if q != *z {
                            d = d * (z - q) * (z - q);
                        }
                    }
                    poly::eval(&numerator, *z) / d
                }
            })
            .collect();
        for (i, a) in residues.iter().enumerate() {
            if a.norm() == T::zero() {
                return Err(Error::NonGenericDifferential(format!("no double pole at puncture {i}")));
            }
        }
        Ok(QuadraticDifferential { marked: MarkedSphere::new_unchecked(punctures, residues), numerator })
    }

    /// The three-point differential without residue genericity checks.
    pub fn three_point_unchecked(alpha: Complex<T>, beta: Complex<T>, gamma: Complex<T>) -> Result<Self> {
        let punctures = vec![
            Puncture::Finite(Complex::zero()),
            Puncture::Finite(Complex::one()),
            Puncture::Infinity,
        ];
        Self::from_numerator_unchecked(punctures, vec![alpha, -(alpha - beta + gamma), gamma])
    }

    pub fn finite_punctures(&self) -> impl Iterator<Item = (usize, Complex<T>)> + '_ {
        self.marked.punctures.iter().enumerate().filter_map(|(i, p)| p.finite().map(|z| (i, z)))
    }

    fn denominator_at(&self, z: Complex<T>) -> Complex<T> {
        self.finite_punctures().fold(Complex::one(), |acc, (_, p)| acc * (z - p) * (z - p))
    }

    /// The coefficient of dz² at z.
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        poly::eval(&self.numerator, z) / self.denominator_at(z)
    }

    pub fn residue_at(&self, p: usize) -> Complex<T> {
        self.marked.residues[p]
    }

    pub fn lambda(&self, p: usize) -> Complex<T> {
        self.marked.levelt[p]
    }

    /// φ multiplied by a nonzero constant.
    pub fn scaled(&self, c: Complex<T>) -> Result<Self> {
        Self::from_numerator(self.marked.punctures.clone(), self.numerator.iter().map(|&x| x * c).collect())
    }

    /// Simple zeros of φ. Fails if two roots or a root and a puncture are within `tol`.
    pub fn zeros(&self, tol: T) -> Result<Vec<Complex<T>>> {
        let rts = poly::roots(&self.numerator)?;
        for i in 0..rts.len() {
            for j in 0..i {
                if (rts[i] - rts[j]).norm() < tol {
                    return Err(Error::NonGenericDifferential("repeated zero".into()));
                }
            }
            for (_, p) in self.finite_punctures() {
                if (rts[i] - p).norm() < tol {
                    return Err(Error::NonGenericDifferential("zero at a puncture".into()));
                }
            }
        }
        let mut rts = rts;
        rts.sort_by(|a, b| {
            (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap_or(std::cmp::Ordering::Equal)
        });
        Ok(rts)
    }

    /// c in φ = c(z − b)(1 + O(z − b)) dz² at a simple zero b.
    pub fn linear_coefficient(&self, b: Complex<T>) -> Complex<T> {
        let (_, dn) = poly::eval_with_derivative(&self.numerator, b);
        dn / self.denominator_at(b)
    }

    /// Continues the tracked branch of √φ to `z_next`, choosing the root nearest the current value.
    pub fn continue_sqrt(&self, state: BranchState<T>, z_next: Complex<T>) -> Result<BranchState<T>> {
        let (value, cos) = nearest_root(self.eval(z_next), state.value);
        if cos <= lit(1e-3) {
            let c = to_c64(z_next);
            return Err(Error::BranchAmbiguity { re: c.re, im: c.im });
        }
        Ok(BranchState { z: z_next, value })
    }

    /// Finite singular points: zeros and finite punctures.
    pub fn singular_points(&self, zeros: &[Complex<T>]) -> Vec<Complex<T>> {
        zeros.iter().copied().chain(self.finite_punctures().map(|(_, p)| p)).collect()
    }

    /// Continues along a polyline, subdividing each segment so no step exceeds a
    /// quarter of the distance to the nearest singular point. Fails if the
    /// polyline comes within `clearance` of one.
    pub fn continue_along(
        &self,
        start: BranchState<T>,
        polyline: &[Complex<T>],
        zeros: &[Complex<T>],
        clearance: T,
    ) -> Result<BranchState<T>> {
        let sing = self.singular_points(zeros);
        let mut st = start;
        for &target in polyline {
            let a = st.z;
            if segment_distance(a, target, &sing) < clearance {
                return Err(Error::PathThroughSingularity);
            }
            let mut s = T::zero();
            while s < T::one() {
                let here = a + (target - a) * s;
                let d = sing.iter().fold(T::infinity(), |m, &p| m.min((here - p).norm()));
                let len = (target - a).norm();
                let ds = if len > T::zero() { (d * lit(0.25) / len).max(lit(1e-6)) } else { T::one() };
                s = (s + ds).min(T::one());
                st = self.continue_sqrt(st, a + (target - a) * s)?;
            }
        }
        Ok(st)
    }

    pub fn to_json(&self) -> QuadDiffJson {
        QuadDiffJson {
            punctures: self
                .marked
                .punctures
                .iter()
                .map(|p| match p {
                    Puncture::Infinity => PunctureJson::Inf("inf".into()),
                    Puncture::Finite(z) => PunctureJson::Point(pair(*z)),
                })
                .collect(),
            residues: self.marked.residues.iter().map(|&a| pair(a)).collect(),
            numerator: self.numerator.iter().map(|&a| pair(a)).collect(),
        }
    }

    /// Parses and checks that the stated residues match the numerator.
    pub fn from_json(j: &QuadDiffJson) -> Result<Self> {
        let punctures = j
            .punctures
            .iter()
            .enumerate()
            .map(|(i, p)| match p {
                PunctureJson::Inf(s) if s == "inf" => Ok(Puncture::Infinity),
                PunctureJson::Inf(s) => Err(Error::schema(format!("punctures[{i}]"), format!("unknown marker {s:?}"))),
                PunctureJson::Point(z) => Ok(Puncture::Finite(cplx(z[0], z[1]))),
            })
            .collect::<Result<Vec<_>>>()?;
        let numerator = j.numerator.iter().map(|z| cplx(z[0], z[1])).collect();
        let phi = Self::from_numerator(punctures, numerator)?;
        if j.residues.len() != phi.marked.len() {
            return Err(Error::schema("residues", "one residue per puncture required"));
        }
        for (i, r) in j.residues.iter().enumerate() {
            let given: Complex<T> = cplx(r[0], r[1]);
            let have = phi.residue_at(i);
            if (given - have).norm() > lit::<T>(1e-8) * T::one().max(have.norm()) {
                return Err(Error::schema(format!("residues[{i}]"), "residue does not match numerator"));
            }
        }
        Ok(phi)
    }
}

fn pair<T: Real>(z: Complex<T>) -> [f64; 2] {
    let c = to_c64(z);
    [c.re, c.im]
}

/// Distance from the segment [a, b] to the nearest of `pts`.
pub fn segment_distance<T: Real>(a: Complex<T>, b: Complex<T>, pts: &[Complex<T>]) -> T {
    let d = b - a;
    let l2 = d.norm_sqr();
    pts.iter().fold(T::infinity(), |m, &p| {
        let s = if l2 > T::zero() { ((p - a) * d.conj()).re / l2 } else { T::zero() };
        let s = s.max(T::zero()).min(T::one());
        m.min((a + d * s - p).norm())
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PunctureJson {
    Inf(String),
    Point([f64; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadDiffJson {
    pub punctures: Vec<PunctureJson>,
    pub residues: Vec<[f64; 2]>,
    pub numerator: Vec<[f64; 2]>,
}
