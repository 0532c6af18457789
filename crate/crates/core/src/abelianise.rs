//! Abelianisation: from an SL(2) representation with generic Levelt data back to an
//! odd abelian system on the spectral graph.
//!
//! The representation is first realised as a flat connection on the Stokes regions
//! (crossing matrices `F`), trivial on rays outside the tour's spanning tree. Sink
//! eigenlines are then carried around each puncture and the abelian data is read
//! off in the resulting line bases.

use crate::abelian::{HolonomyVector, OddAbelianSystem};
use crate::error::{Error, Result};
use crate::mat2::{line_distance, normalize_line, Mat2};
use crate::scalar::{exp_2pi_i, scaled_tol, Real};
use crate::stokes::{minus, plus, vertex_loop, SpectralGraph, StokesGraph, Tour, Vertex};
use crate::voros::{compare_traces, delta_table, nonabelianise, random_words, transport_with, Sl2Representation, TraceReport};
use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub type Line<T> = [Complex<T>; 2];

#[derive(Clone, Debug, PartialEq)]
pub struct FramedRep<T> {
    pub rep: Sl2Representation<T>,
    /// Eigenline of M_p for exp(+2πiλ_p).
    pub sink: Vec<Line<T>>,
    /// Eigenline of M_p for exp(−2πiλ_p).
    pub source: Vec<Line<T>>,
}

/// `lines[I][c]` is the sink line of the puncture at corner c of region I, in I's frame.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionLines<T> {
    pub lines: Vec<[Line<T>; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransversalityReport {
    /// Projective distance between the two lines of each region.
    pub distance: Vec<f64>,
    pub failures: Vec<usize>,
}

impl TransversalityReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Minimum |q − 1/q| for the two eigenvalues of a local monodromy to count as distinct.
pub fn degeneracy_tolerance<T: Real>() -> T {
    scaled_tol(1e-8)
}

pub fn frame<T: Real>(rep: &Sl2Representation<T>) -> Result<FramedRep<T>> {
    let mut sink = Vec::with_capacity(rep.matrices.len());
    let mut source = Vec::with_capacity(rep.matrices.len());
    for (p, m) in rep.matrices.iter().enumerate() {
        let q = exp_2pi_i(rep.lambda[p]);
        let scale = T::one().max(m.sup_norm());
        if !((q - q.inv()).norm() > degeneracy_tolerance::<T>()) {
            return Err(Error::DegenerateMonodromy { puncture: p, reason: "exp(2πiλ) = exp(−2πiλ): resonant exponent".into() });
        }
        let mut pair = [[Complex::zero(); 2]; 2];
        for (slot, mu) in [q, q.inv()].into_iter().enumerate() {
            let v = m
                .eigenvector(mu)
                .map(normalize_line)
                .ok_or_else(|| Error::DegenerateMonodromy { puncture: p, reason: "scalar monodromy".into() })?;
            let mv = m.apply(v);
            let res = (mv[0] - mu * v[0]).norm().max((mv[1] - mu * v[1]).norm());
            if !(res <= scaled_tol::<T>(1e-7) * scale) {
                return Err(Error::DegenerateMonodromy {
                    puncture: p,
                    reason: format!("exp(±2πiλ) is not an eigenvalue of the monodromy (residual {:e})", res.to_f64().unwrap_or(f64::NAN)),
                });
            }
            pair[slot] = v;
        }
        if !(line_distance(pair[0], pair[1]) > degeneracy_tolerance::<T>()) {
            return Err(Error::DegenerateMonodromy { puncture: p, reason: "eigenlines coincide".into() });
        }
        sink.push(pair[0]);
        source.push(pair[1]);
    }
    Ok(FramedRep { rep: rep.clone(), sink, source })
}

/// Flat connection on the base regions realising `rep` along the tour generators.
///
/// Rays outside the tour's tree get the identity. Vertices are solved children first:
/// each vertex loop crosses exactly one unknown ray, the one towards its tree parent.
pub fn base_connection<T: Real>(rep: &Sl2Representation<T>, g: &StokesGraph) -> Result<Vec<Mat2<T>>> {
    if rep.matrices.len() != g.poles.len() {
        return Err(Error::FrameMismatch("representation and graph have different puncture counts".into()));
    }
    let tour = Tour::new(g)?;
    let order: Vec<usize> = tour
        .puncture_generators()
        .map(|gen| match gen.vertex {
            Vertex::Pole(p) => p,
            Vertex::Branch(_) => unreachable!(),
        })
        .collect();
    if order != rep.order || rep.basepoint != tour.basepoint {
        return Err(Error::FrameMismatch("representation generators were not produced on this graph".into()));
    }
    let target = |v: Vertex| match v {
        Vertex::Pole(p) => rep.matrices[p],
        Vertex::Branch(_) => Mat2::identity(),
    };
    let mut fwd: Vec<Option<Mat2<T>>> = (0..g.rays.len()).map(|r| if tour.tree_ray[r] { None } else { Some(Mat2::identity()) }).collect();
    for &v in tour.bfs.iter().skip(1).rev() {
        let (_, ray) = tour.parent[crate::stokes::tour::vertex_index(g, v)].expect("non-root vertex");
        let gen = tour.generator(v);
        let l = vertex_loop(g, v, gen.sector);
        let j = l.crossings.iter().position(|c| c.ray == ray).expect("parent ray at vertex");
        let mat = |k: usize| {
            let c = l.crossings[k];
            let f = fwd[c.ray].expect("child rays are solved first");
            if c.forward {
                f
            } else {
                f.inverse()
            }
        };
        let before = (0..j).fold(Mat2::identity(), |acc, k| mat(k) * acc);
        let after = (j + 1..l.crossings.len()).fold(Mat2::identity(), |acc, k| mat(k) * acc);
        let x = after.inverse() * target(v) * before.inverse();
        fwd[ray] = Some(if l.crossings[j].forward { x } else { x.inverse() });
    }
    let fwd: Vec<Mat2<T>> = fwd.into_iter().map(|f| f.expect("every ray solved")).collect();
    let root = tour.generator(tour.root);
    let m = transport_with(&fwd, &vertex_loop(g, tour.root, root.sector));
    let want = target(tour.root);
    let dev = m.dist(&want) / T::one().max(want.sup_norm());
    if !(dev <= scaled_tol::<T>(1e-8)) {
        return Err(Error::RelationViolated { deviation: dev.to_f64().unwrap_or(f64::INFINITY) });
    }
    Ok(fwd)
}

/// Carries each sink eigenline anticlockwise around its puncture, starting from the
/// sector where the tour first reaches it (there the loop transport is M_p itself).
pub fn continue_lines<T: Real>(fr: &FramedRep<T>, g: &StokesGraph, fwd: &[Mat2<T>]) -> Result<RegionLines<T>> {
    let tour = Tour::new(g)?;
    let mut lines: Vec<[Option<Line<T>>; 2]> = vec![[None, None]; g.regions.len()];
    for (p, rot) in g.poles.iter().enumerate() {
        let start = tour.generator(Vertex::Pole(p)).sector;
        let n = rot.len();
        let mut v = fr.sink[p];
        for i in 0..n {
            let k = (start + i) % n;
            let (region, corner) = g.pole_sectors[p][k];
            lines[region][corner] = Some(normalize_line(v));
            // Anticlockwise around a puncture crosses the next ray backwards.
            let next = rot[(k + 1) % n];
            v = fwd[next].inverse().apply(v);
        }
    }
    let lines = lines
        .into_iter()
        .enumerate()
        .map(|(i, [a, b])| match (a, b) {
            (Some(a), Some(b)) => Ok([a, b]),
            _ => Err(Error::FrameMismatch(format!("region {i} has a corner not reached from its puncture"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionLines { lines })
}

pub fn check_transverse<T: Real>(rl: &RegionLines<T>, tol: T) -> TransversalityReport {
    let mut distance = Vec::with_capacity(rl.lines.len());
    let mut failures = Vec::new();
    for (i, [a, b]) in rl.lines.iter().enumerate() {
        let d = line_distance(*a, *b);
        if !(d > tol) {
            failures.push(i);
        }
        distance.push(d.to_f64().unwrap_or(f64::NAN));
    }
    TransversalityReport { distance, failures }
}

pub fn transversality_tolerance<T: Real>() -> T {
    scaled_tol(1e-7)
}

/// Abelian data read off from the line bases, plus the extracted off-diagonal entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Extraction<T> {
    pub system: OddAbelianSystem<T>,
    /// Δ(α₊) in the normalisation of the Voros factor: the raw off-diagonal entry divided by t(α₋).
    pub delta: Vec<Complex<T>>,
}

/// Coefficients (x, y) with x·u + y·v = w.
fn solve2<T: Real>(u: Line<T>, v: Line<T>, w: Line<T>) -> (Complex<T>, Complex<T>) {
    let det = u[0] * v[1] - u[1] * v[0];
    ((w[0] * v[1] - w[1] * v[0]) / det, (u[0] * w[1] - u[1] * w[0]) / det)
}

pub fn extract<T: Real>(fr: &FramedRep<T>, rl: &RegionLines<T>, sg: &SpectralGraph, fwd: &[Mat2<T>]) -> Result<Extraction<T>> {
    let g = &sg.base;
    let report = check_transverse(rl, transversality_tolerance());
    if !report.passes() {
        return Err(Error::TransversalityFailure { regions: report.failures });
    }
    let n = g.rays.len();
    let mut t = vec![Complex::zero(); 2 * n];
    let mut delta = vec![Complex::zero(); 2 * n];
    for a in 0..n {
        let sd = g.sides[a];
        let (li, lj) = (&rl.lines[sd.cw], &rl.lines[sd.ccw]);
        let (ci, cj) = (sd.corner_cw, sd.corner_ccw);
        let f = fwd[a];
        // F·e_i′ = t₋·e_j′ with i′, j′ the sink lifts at α's puncture.
        let (x, y) = solve2(lj[cj], lj[1 - cj], f.apply(li[ci]));
        let (u, w) = solve2(lj[cj], lj[1 - cj], f.apply(li[1 - ci]));
        let scale = x.norm().max(y.norm());
        if !(y.norm() <= scaled_tol::<T>(1e-6) * scale) {
            return Err(Error::FrameMismatch(format!("sink line is not preserved across ray {a}")));
        }
        t[minus(a)] = x;
        t[plus(a)] = w;
        delta[plus(a)] = u / x;
    }
    let mut m = vec![Complex::zero(); 2 * g.regions.len()];
    for (i, [a, b]) in rl.lines.iter().enumerate() {
        let det = a[0] * b[1] - a[1] * b[0];
        if !(det.norm() > T::zero()) {
            return Err(Error::NormalizationFailure { region: i });
        }
        m[2 * i] = det.inv();
        m[2 * i + 1] = -det.inv();
    }
    let system = OddAbelianSystem { sg: sg.clone(), lambda: fr.rep.lambda.clone(), t, m };
    Ok(Extraction { system, delta })
}

/// Full abelianisation pipeline.
pub fn abelianise<T: Real>(rep: &Sl2Representation<T>, sg: &SpectralGraph) -> Result<Extraction<T>> {
    let fr = frame(rep)?;
    let fwd = base_connection(rep, &sg.base)?;
    let rl = continue_lines(&fr, &sg.base, &fwd)?;
    extract(&fr, &rl, sg, &fwd)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbRoundtripReport {
    /// Largest relative deviation between holonomy vectors.
    pub holonomy_deviation: f64,
    /// Largest relative deviation between extracted Δ and detour transport.
    pub delta_deviation: f64,
    pub validation: f64,
}

impl AbRoundtripReport {
    pub fn max(&self) -> f64 {
        self.holonomy_deviation.max(self.delta_deviation).max(self.validation)
    }
}

pub fn delta_consistency<T: Real>(ex: &Extraction<T>) -> f64 {
    let recomputed = delta_table(&ex.system);
    ex.delta
        .iter()
        .zip(&recomputed)
        .map(|(a, b)| ((*a - *b).norm() / a.norm().max(b.norm()).max(T::min_positive_value())).to_f64().unwrap_or(f64::INFINITY))
        .filter(|d| !d.is_nan())
        .fold(0.0, f64::max)
}

/// abelianise ∘ nonabelianise on the holonomy vector.
pub fn roundtrip_ab<T: Real>(sys: &OddAbelianSystem<T>) -> Result<AbRoundtripReport> {
    let rep = nonabelianise(sys)?;
    let ex = abelianise(&rep, &sys.sg)?;
    let h0: HolonomyVector<T> = sys.holonomy_vector()?;
    let h1 = ex.system.holonomy_vector()?;
    Ok(AbRoundtripReport {
        holonomy_deviation: h0.max_relative_deviation(&h1).to_f64().unwrap_or(f64::INFINITY),
        delta_deviation: delta_consistency(&ex),
        validation: ex.system.validate().worst(),
    })
}

/// nonabelianise ∘ abelianise on generator and word traces.
pub fn roundtrip_nonab<T: Real>(rep: &Sl2Representation<T>, sg: &SpectralGraph, seed: u64) -> Result<TraceReport> {
    let ex = abelianise(rep, sg)?;
    let back = nonabelianise(&ex.system)?;
    let words = random_words(rep.order.len(), 20, 6, seed);
    Ok(compare_traces(rep, &back, &words))
}

/// Diagonal representation M_p = diag(exp(−2πiλ_p), exp(2πiλ_p)); needs Σλ ∈ ℤ for the relation.
pub fn diagonal_rep<T: Real>(order: Vec<usize>, basepoint: usize, lambda: Vec<Complex<T>>) -> Sl2Representation<T> {
    let matrices = lambda
        .iter()
        .map(|&l| {
            let q = exp_2pi_i(l);
            Mat2::diag(q.inv(), q)
        })
        .collect();
    Sl2Representation { basepoint, order, matrices, lambda }
}

