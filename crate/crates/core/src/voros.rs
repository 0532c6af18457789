//! Voros nonabelianisation: SL(2) transport on the base built from an odd abelian system.
//!
//! Region frames list the two lifts of a region in stored order: corner 0 (sink at
//! the lower-index puncture) first. Crossing-local frames are (sink, source) with
//! respect to the crossed ray's puncture; `frame_swap` converts between the two.

use crate::abelian::OddAbelianSystem;
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::scalar::{exp_2pi_i, from_c64, lit, scaled_tol, to_c64, Real};
use crate::stokes::{minus, plus, vertex_loop, Carrier, CombinatorialPath, StokesGraph, Tour, Vertex};
use num_complex::Complex;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sl2Transport<T> {
    pub matrix: Mat2<T>,
    /// Spectral regions over the start region, in frame order.
    pub source: [usize; 2],
    pub target: [usize; 2],
}

/// Monodromy of the standard puncture loops at the basepoint region.
#[derive(Clone, Debug, PartialEq)]
pub struct Sl2Representation<T> {
    pub basepoint: usize,
    /// Punctures in generator order; the ordered product of their matrices is the identity.
    pub order: Vec<usize>,
    /// Indexed by puncture.
    pub matrices: Vec<Mat2<T>>,
    pub lambda: Vec<Complex<T>>,
}

/// A word in the generators: (generator position in `order`, inverted).
pub type Word = Vec<(usize, bool)>;

impl<T: Real> Sl2Representation<T> {
    pub fn generators(&self) -> impl Iterator<Item = &Mat2<T>> {
        self.order.iter().map(|&p| &self.matrices[p])
    }

    /// ‖M_{o₁}⋯M_{oₙ} − I‖.
    pub fn relation_residual(&self) -> T {
        self.generators().fold(Mat2::identity(), |acc, m| acc * *m).dist(&Mat2::identity())
    }

    pub fn word(&self, w: &[(usize, bool)]) -> Mat2<T> {
        w.iter().fold(Mat2::identity(), |acc, &(g, inv)| {
            let m = self.matrices[self.order[g]];
            acc * if inv { m.inverse() } else { m }
        })
    }

    pub fn conjugate(&self, g: &Mat2<T>) -> Self {
        let gi = g.inverse();
        Sl2Representation { matrices: self.matrices.iter().map(|m| *g * *m * gi).collect(), ..self.clone() }
    }

    /// Structural checks plus det, trace and relation residuals against `tol`.
    pub fn check(&self, tol: T) -> Result<()> {
        let n = self.matrices.len();
        if self.lambda.len() != n {
            return Err(Error::schema("lambda", "one exponent per puncture required"));
        }
        let mut seen = vec![false; n];
        for &p in &self.order {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::schema("order", "generator order must be a permutation of the punctures"));
            }
        }
        if self.order.len() != n {
            return Err(Error::schema("order", "generator order must list every puncture"));
        }
        for (p, m) in self.matrices.iter().enumerate() {
            if !m.is_finite() {
                return Err(Error::schema(format!("punctures[{p}].matrix"), "entries must be finite"));
            }
            if (m.det() - Complex::one()).norm() > tol {
                return Err(Error::schema(format!("punctures[{p}].matrix"), "determinant is not 1"));
            }
        }
        let rel = self.relation_residual();
        if !(rel <= tol) {
            return Err(Error::RelationViolated { deviation: rel.to_f64().unwrap_or(f64::INFINITY) });
        }
        Ok(())
    }
}

/// Random words of a fixed length in `n` generators and their inverses.
pub fn random_words(n: usize, count: usize, len: usize, seed: u64) -> Vec<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..len).map(|_| (rng.gen_range(0..n), rng.gen_bool(0.5))).collect()).collect()
}

/// Δ for every spectral ray: transport along the detour for α₊, zero for α₋.
pub fn delta_table<T: Real>(sys: &OddAbelianSystem<T>) -> Vec<Complex<T>> {
    let n = sys.sg.base.rays.len();
    let mut d = vec![Complex::zero(); 2 * n];
    for a in 0..n {
        d[plus(a)] = sys.transport(sys.sg.detour_path(a));
        d[minus(a)] = Complex::zero();
    }
    d
}

/// V_α = 1 + Δ(α₊)·E₁₂ in the (sink, source) frame.
pub fn voros_from_delta<T: Real>(delta: &[Complex<T>], alpha: usize) -> Mat2<T> {
    Mat2::upper(Complex::one(), delta[plus(alpha)], Complex::one())
}

pub fn voros_matrix<T: Real>(sys: &OddAbelianSystem<T>, alpha: usize) -> Sl2Transport<T> {
    let sd = sys.sg.base.sides[alpha];
    let frame = |r: usize, c: usize| [2 * r + c, 2 * r + 1 - c];
    let delta = sys.transport(sys.sg.detour_path(alpha));
    Sl2Transport {
        matrix: Mat2::upper(Complex::one(), delta, Complex::one()),
        source: frame(sd.cw, sd.corner_cw),
        target: frame(sd.ccw, sd.corner_ccw),
    }
}

/// Permutation from the stored region frame to the (sink, source) frame at `corner`.
fn frame_swap<T: Real>(corner: usize) -> Mat2<T> {
    if corner == 0 {
        Mat2::identity()
    } else {
        Mat2::swap()
    }
}

/// Forward crossing matrices of every base ray, in region frames, from a Δ table.
pub fn crossing_matrices<T: Real>(sys: &OddAbelianSystem<T>, delta: &[Complex<T>]) -> Vec<Mat2<T>> {
    let g = &sys.sg.base;
    (0..g.rays.len())
        .map(|a| {
            let sd = g.sides[a];
            let p = Mat2::diag(sys.t[minus(a)], sys.t[plus(a)]) * voros_from_delta(delta, a);
            frame_swap::<T>(sd.corner_ccw) * p * frame_swap(sd.corner_cw)
        })
        .collect()
}

/// Matrix transport along a base path: the product of crossing matrices, latest on the left.
pub fn transport_with<T: Real>(fwd: &[Mat2<T>], path: &CombinatorialPath) -> Mat2<T> {
    path.crossings.iter().fold(Mat2::identity(), |acc, c| {
        let m = if c.forward { fwd[c.ray] } else { fwd[c.ray].inverse() };
        m * acc
    })
}

pub fn transport_sl2<T: Real>(sys: &OddAbelianSystem<T>, path: &CombinatorialPath) -> Result<Sl2Transport<T>> {
    if path.carrier != Carrier::Base {
        return Err(Error::FrameMismatch("SL(2) transport runs along base paths".into()));
    }
    path.validate(&sys.sg.base)?;
    let fwd = crossing_matrices(sys, &delta_table(sys));
    let frame = |r: usize| [2 * r, 2 * r + 1];
    Ok(Sl2Transport { matrix: transport_with(&fwd, path), source: frame(path.start()), target: frame(path.end()) })
}

/// Transport around the small anticlockwise loop at a branch vertex.
pub fn branch_monodromy<T: Real>(sys: &OddAbelianSystem<T>, b: usize) -> Sl2Transport<T> {
    let l = vertex_loop(&sys.sg.base, Vertex::Branch(b), 0);
    transport_sl2(sys, &l).expect("vertex loops are valid base paths")
}

/// Rounding in a product grows with the factors' norms, so the branch check divides
/// ‖M − I‖ by Π max(1, ‖C‖) over the crossings. Equals 1 for well-scaled systems.
pub fn loop_condition<T: Real>(fwd: &[Mat2<T>], path: &CombinatorialPath) -> T {
    path.crossings.iter().fold(T::one(), |k, c| {
        let m = if c.forward { fwd[c.ray] } else { fwd[c.ray].inverse() };
        k * T::one().max(m.sup_norm())
    })
}

/// Default tolerance on ‖M − I‖ for branch monodromy.
pub fn branch_tolerance<T: Real>() -> T {
    scaled_tol(1e-9)
}

pub fn nonabelianise<T: Real>(sys: &OddAbelianSystem<T>) -> Result<Sl2Representation<T>> {
    nonabelianise_with(sys, branch_tolerance())
}

pub fn nonabelianise_with<T: Real>(sys: &OddAbelianSystem<T>, branch_tol: T) -> Result<Sl2Representation<T>> {
    sys.check_structure()?;
    let g = &sys.sg.base;
    let fwd = crossing_matrices(sys, &delta_table(sys));
    for b in 0..g.branches.len() {
        let l = vertex_loop(g, Vertex::Branch(b), 0);
        let m = transport_with(&fwd, &l);
        let dev = m.dist(&Mat2::identity()) / loop_condition(&fwd, &l);
        if !(dev < branch_tol) {
            return Err(Error::BranchMonodromyNontrivial { branch: b, deviation: dev.to_f64().unwrap_or(f64::INFINITY) });
        }
    }
    let tour = Tour::new(g)?;
    let mut matrices = vec![Mat2::identity(); g.poles.len()];
    let mut order = Vec::with_capacity(g.poles.len());
    for gen in tour.puncture_generators() {
        let Vertex::Pole(p) = gen.vertex else { unreachable!() };
        matrices[p] = transport_with(&fwd, &gen.path);
        order.push(p);
    }
    Ok(Sl2Representation { basepoint: tour.basepoint, order, matrices, lambda: sys.lambda.clone() })
}

/// Comparison of two representations on conjugation-invariant data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub generator_trace_deviation: f64,
    pub word_trace_deviation: f64,
    pub words: usize,
}

impl TraceReport {
    pub fn max(&self) -> f64 {
        self.generator_trace_deviation.max(self.word_trace_deviation)
    }
}

/// Relative trace deviation |a − b| / max(1, |a|).
fn trace_dev<T: Real>(a: Complex<T>, b: Complex<T>) -> f64 {
    ((a - b).norm() / T::one().max(a.norm())).to_f64().unwrap_or(f64::INFINITY)
}

pub fn compare_traces<T: Real>(a: &Sl2Representation<T>, b: &Sl2Representation<T>, words: &[Word]) -> TraceReport {
    let mut gen = 0.0f64;
    for p in 0..a.matrices.len() {
        let d = trace_dev(a.matrices[p].trace(), b.matrices.get(p).map_or(Complex::new(T::nan(), T::zero()), |m| m.trace()));
        gen = gen.max(if d.is_nan() { f64::INFINITY } else { d });
    }
    let mut wd = 0.0f64;
    let same_order = a.order == b.order;
    for w in words {
        let d = if same_order { trace_dev(a.word(w).trace(), b.word(w).trace()) } else { f64::INFINITY };
        wd = wd.max(if d.is_nan() { f64::INFINITY } else { d });
    }
    TraceReport { generator_trace_deviation: gen, word_trace_deviation: wd, words: words.len() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaturalityReport {
    /// ‖D·M·D⁻¹ − M′‖ over the generators, D the diagonal gauge at the basepoint.
    pub conjugation_deviation: f64,
    pub traces: TraceReport,
}

/// Compares nonabelianise(gauge(sys, c)) with the basepoint conjugate of nonabelianise(sys).
pub fn naturality_check<T: Real>(sys: &OddAbelianSystem<T>, c: &[Complex<T>], seed: u64) -> Result<NaturalityReport> {
    let a = nonabelianise(sys)?;
    let b = nonabelianise(&sys.gauge_transform(c))?;
    let bp = a.basepoint;
    let d = Mat2::diag(c[2 * bp], c[2 * bp + 1]);
    let conj = a.conjugate(&d);
    let dev = conj.matrices.iter().zip(&b.matrices).fold(T::zero(), |m, (x, y)| m.max(x.dist(y) / T::one().max(x.sup_norm())));
    let words = random_words(a.order.len(), 20, 6, seed);
    Ok(NaturalityReport {
        conjugation_deviation: dev.to_f64().unwrap_or(f64::INFINITY),
        traces: compare_traces(&a, &b, &words),
    })
}

/// Expected trace 2·cos(2πλ) = exp(2πiλ) + exp(−2πiλ).
pub fn expected_trace<T: Real>(lambda: Complex<T>) -> Complex<T> {
    let q = exp_2pi_i(lambda);
    q + q.inv()
}

pub const REP_SCHEMA: &str = "sl2-representation/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PunctureRepJson {
    pub puncture: usize,
    pub lambda: [f64; 2],
    /// Row-major entries a, b, c, d.
    pub matrix: [[f64; 2]; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepJson {
    pub schema: String,
    pub basepoint: usize,
    /// Generators in relation order.
    pub generators: Vec<PunctureRepJson>,
}

fn pair<T: Real>(z: Complex<T>) -> [f64; 2] {
    let c = to_c64(z);
    [c.re, c.im]
}

fn unpair<T: Real>(p: [f64; 2]) -> Complex<T> {
    from_c64(num_complex::Complex64::new(p[0], p[1]))
}

impl<T: Real> Sl2Representation<T> {
    pub fn to_json(&self) -> RepJson {
        RepJson {
            schema: REP_SCHEMA.into(),
            basepoint: self.basepoint,
            generators: self
                .order
                .iter()
                .map(|&p| {
                    let m = &self.matrices[p].m;
                    PunctureRepJson {
                        puncture: p,
                        lambda: pair(self.lambda[p]),
                        matrix: [pair(m[0][0]), pair(m[0][1]), pair(m[1][0]), pair(m[1][1])],
                    }
                })
                .collect(),
        }
    }

    pub fn from_json(j: &RepJson) -> Result<Self> {
        if j.schema != REP_SCHEMA {
            return Err(Error::schema("schema", format!("expected {REP_SCHEMA:?}, found {:?}", j.schema)));
        }
        let n = j.generators.len();
        let mut matrices = vec![Mat2::identity(); n];
        let mut lambda = vec![Complex::zero(); n];
        let mut order = Vec::with_capacity(n);
        for (k, gj) in j.generators.iter().enumerate() {
            if gj.puncture >= n || order.contains(&gj.puncture) {
                return Err(Error::schema(format!("generators[{k}].puncture"), "punctures must be a permutation of 0..n"));
            }
            let e = gj.matrix.map(unpair::<T>);
            matrices[gj.puncture] = Mat2::new(e[0], e[1], e[2], e[3]);
            lambda[gj.puncture] = unpair(gj.lambda);
            order.push(gj.puncture);
        }
        let rep = Sl2Representation { basepoint: j.basepoint, order, matrices, lambda };
        rep.check(scaled_tol::<T>(1e-6).max(lit(1e-6)))?;
        Ok(rep)
    }
}

/// The tour generators of `g` as base paths, in relation order (punctures only).
pub fn generator_paths(g: &StokesGraph) -> Result<Vec<(usize, CombinatorialPath)>> {
    let tour = Tour::new(g)?;
    Ok(tour
        .puncture_generators()
        .map(|gen| {
            let Vertex::Pole(p) = gen.vertex else { unreachable!() };
            (p, gen.path.clone())
        })
        .collect())
}

/// Generator trace check against the Levelt exponents.
pub fn trace_residual<T: Real>(rep: &Sl2Representation<T>) -> T {
    rep.matrices
        .iter()
        .zip(&rep.lambda)
        .fold(T::zero(), |m, (x, &l)| m.max((x.trace() - expected_trace(l)).norm()))
}
