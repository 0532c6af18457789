//! Odd abelian local systems on the punctured spectral curve, as transition data on
//! the spectral graph.
//!
//! `t[e]` is the transport across spectral ray e in its forward direction; the
//! backward crossing contributes `1 / t[e]`. `m[i]` are the odd structure constants.
//! Sign convention: the loop around the sink lift p₋ has monodromy exp(+2πiλ_p) and
//! the loop around the source lift p₊ has exp(−2πiλ_p).

use crate::error::{Error, Result};
use crate::scalar::{exp_2pi_i, from_c64, lit, to_c64, Real};
use crate::stokes::{loop_basis, minus, plus, sigma, CombinatorialPath, LoopId, RegionGraph, SpanningTree, SpectralGraph};
use num_complex::Complex;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq)]
pub struct OddAbelianSystem<T> {
    pub sg: SpectralGraph,
    pub lambda: Vec<Complex<T>>,
    pub t: Vec<Complex<T>>,
    pub m: Vec<Complex<T>>,
}

/// Worst violation within one invariant family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub max: f64,
    pub location: Option<String>,
}

impl Residual {
    fn new() -> Self {
        Residual { max: 0.0, location: None }
    }

    fn record(&mut self, value: f64, location: impl FnOnce() -> String) {
        if !(value <= self.max) {
            self.max = if value.is_nan() { f64::INFINITY } else { value };
            self.location = Some(location());
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub odd_skew: Residual,
    pub odd_flatness: Residual,
    pub puncture: Residual,
    pub ramification: Residual,
}

impl ValidationReport {
    pub fn worst(&self) -> f64 {
        [&self.odd_skew, &self.odd_flatness, &self.puncture, &self.ramification].iter().fold(0.0, |m, r| m.max(r.max))
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.worst() <= tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyVector<T> {
    pub entries: Vec<(LoopId, Complex<T>)>,
}

impl<T: Real> HolonomyVector<T> {
    /// Largest relative deviation between matching entries; infinite if the loop ids differ.
    pub fn max_relative_deviation(&self, other: &Self) -> T {
        if self.entries.len() != other.entries.len() {
            return T::infinity();
        }
        self.entries.iter().zip(&other.entries).fold(T::zero(), |m, ((a, x), (b, y))| {
            if a != b {
                return T::infinity();
            }
            m.max((*x - *y).norm() / x.norm().max(y.norm()))
        })
    }
}

/// Relative residual |a − b| / max(|a|, |b|, tiny).
fn rel<T: Real>(a: Complex<T>, b: Complex<T>) -> f64 {
    let d = (a - b).norm() / a.norm().max(b.norm()).max(T::min_positive_value());
    d.to_f64().unwrap_or(f64::INFINITY)
}

impl<T: Real> OddAbelianSystem<T> {
    /// Checks sizes and that every entry is finite and nonzero.
    pub fn check_structure(&self) -> Result<()> {
        let sg = &self.sg;
        if self.lambda.len() != sg.base.poles.len() {
            return Err(Error::schema("lambda", "one exponent per puncture required"));
        }
        if self.t.len() != sg.ray_count() {
            return Err(Error::schema("t", format!("expected {} spectral rays, found {}", sg.ray_count(), self.t.len())));
        }
        if self.m.len() != sg.region_count() {
            return Err(Error::schema("m", format!("expected {} spectral regions, found {}", sg.region_count(), self.m.len())));
        }
        for (i, z) in self.t.iter().enumerate() {
            if !(z.norm() > T::zero()) || !z.norm().is_finite() {
                return Err(Error::schema(format!("t[{i}]"), "transport must be finite and nonzero"));
            }
        }
        for (i, z) in self.m.iter().enumerate() {
            if !(z.norm() > T::zero()) || !z.norm().is_finite() {
                return Err(Error::schema(format!("m[{i}]"), "odd structure constant must be finite and nonzero"));
            }
        }
        for (i, l) in self.lambda.iter().enumerate() {
            if !(l.re > T::zero()) {
                return Err(Error::schema(format!("lambda[{i}]"), "Levelt exponent needs positive real part"));
            }
        }
        Ok(())
    }

    /// Product of the crossing values along the reduced path.
    pub fn transport(&self, path: &CombinatorialPath) -> Complex<T> {
        path.reduce().crossings.iter().fold(Complex::one(), |acc, c| {
            if c.forward {
                acc * self.t[c.ray]
            } else {
                acc / self.t[c.ray]
            }
        })
    }

    /// Residuals of all four invariant families.
    pub fn validate(&self) -> ValidationReport {
        let sg = &self.sg;
        let mut odd_skew = Residual::new();
        for i in 0..sg.region_count() {
            odd_skew.record(rel(self.m[sigma(i)], -self.m[i]), || format!("region {i}"));
        }
        let mut odd_flatness = Residual::new();
        for e in 0..sg.ray_count() {
            let (i, j) = sg.ray_ends(e);
            odd_flatness.record(rel(self.m[j], self.m[i] * self.t[e] * self.t[sigma(e)]), || format!("ray {e}"));
        }
        let mut puncture = Residual::new();
        for p in 0..sg.base.poles.len() {
            let q = exp_2pi_i(self.lambda[p]);
            puncture.record(rel(self.transport(&sg.puncture_lift_loop(p, true)), q), || format!("sink lift of {p}"));
            puncture.record(rel(self.transport(&sg.puncture_lift_loop(p, false)), q.inv()), || format!("source lift of {p}"));
        }
        let mut ramification = Residual::new();
        for b in 0..sg.base.branches.len() {
            ramification.record(rel(self.transport(&sg.ramification_loop(b)), -Complex::<T>::one()), || format!("branch {b}"));
        }
        ValidationReport { odd_skew, odd_flatness, puncture, ramification }
    }

    /// t(e: i→j) ↦ c(j)·t(e)·c(i)⁻¹ and m(i) ↦ m(i)·c(i)·c(σi).
    pub fn gauge_transform(&self, c: &[Complex<T>]) -> Self {
        let sg = &self.sg;
        let t = (0..sg.ray_count())
            .map(|e| {
                let (i, j) = sg.ray_ends(e);
                c[j] * self.t[e] / c[i]
            })
            .collect();
        let m = (0..sg.region_count()).map(|i| self.m[i] * c[i] * c[sigma(i)]).collect();
        OddAbelianSystem { sg: sg.clone(), lambda: self.lambda.clone(), t, m }
    }

    pub fn holonomy_vector(&self) -> Result<HolonomyVector<T>> {
        let basis = loop_basis(&self.sg)?;
        Ok(HolonomyVector { entries: basis.iter().map(|(id, p)| (*id, self.transport(p))).collect() })
    }

    /// Gauge that makes every spanning-tree crossing of the cover equal to 1.
    pub fn tree_gauge(&self) -> Result<Vec<Complex<T>>> {
        let tree = SpanningTree::new(&self.sg)?;
        let mut c = vec![Complex::one(); self.sg.region_count()];
        for &y in &tree.order[1..] {
            let e = tree.parent[y].expect("non-root has a parent");
            let (a, b) = self.sg.ray_ends(e.ray);
            // New forward value c(b)·t·c(a)⁻¹ must be 1.
            if e.forward {
                c[y] = c[a] / self.t[e.ray];
            } else {
                c[y] = c[b] * self.t[e.ray];
            }
        }
        Ok(c)
    }
}

/// Random odd abelian system with the given Levelt exponents.
///
/// Transports on negative rays are drawn log-uniformly from the annulus 1/2 ≤ |t| ≤ 2,
/// one per puncture is solved from the sink monodromy, positive rays follow from odd
/// flatness, and the result is put in spanning-tree gauge.
pub fn random_system<T: Real>(sg: &SpectralGraph, lambda: &[Complex<T>], seed: u64) -> Result<OddAbelianSystem<T>> {
    if lambda.len() != sg.base.poles.len() {
        return Err(Error::InconsistentConstraints("one exponent per puncture required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ln2 = std::f64::consts::LN_2;
    let annulus = |rng: &mut ChaCha8Rng| -> Complex<T> {
        let r = rng.gen_range(-ln2..=ln2).exp();
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        from_c64(num_complex::Complex64::from_polar(r, th))
    };
    let g = &sg.base;
    let mut m = vec![Complex::<T>::zero(); sg.region_count()];
    for r in 0..g.regions.len() {
        let z = annulus(&mut rng);
        m[2 * r] = z;
        m[2 * r + 1] = -z;
    }
    let mut t = vec![Complex::<T>::zero(); sg.ray_count()];
    for a in 0..g.rays.len() {
        t[minus(a)] = annulus(&mut rng);
    }
    for (p, rot) in g.poles.iter().enumerate() {
        // The sink loop crosses each α₋ at p once, backwards.
        let loop_p = sg.puncture_lift_loop(p, true);
        let fixed = rot[0];
        let others = loop_p
            .crossings
            .iter()
            .filter(|c| c.ray != minus(fixed))
            .fold(Complex::<T>::one(), |acc, c| if c.forward { acc * t[c.ray] } else { acc / t[c.ray] });
        let count = loop_p.crossings.iter().filter(|c| c.ray == minus(fixed)).count();
        if count != 1 || loop_p.crossings.iter().any(|c| c.ray % 2 == 1 || c.forward) {
            return Err(Error::InconsistentConstraints(format!("sink loop of puncture {p} is not a cycle of negative rays")));
        }
        // others / t(fixed) = exp(2πiλ)
        t[minus(fixed)] = others / exp_2pi_i(lambda[p]);
    }
    for a in 0..g.rays.len() {
        let (i, j) = sg.ray_ends(minus(a));
        t[plus(a)] = m[j] / (m[i] * t[minus(a)]);
    }
    let raw = OddAbelianSystem { sg: sg.clone(), lambda: lambda.to_vec(), t, m };
    let c = raw.tree_gauge()?;
    let sys = raw.gauge_transform(&c);
    let report = sys.validate();
    let tol = if T::epsilon() < lit(1e-10) { 1e-10 } else { 1e-3 };
    if !report.passes(tol) {
        return Err(Error::InconsistentConstraints(format!("sampled system fails validation: {report:?}")));
    }
    Ok(sys)
}

/// Exponent vector of a closed path over spectral rays.
fn exponents(sg: &SpectralGraph, p: &CombinatorialPath) -> Vec<i64> {
    let mut v = vec![0i64; sg.ray_count()];
    for c in &p.crossings {
        v[c.ray] += if c.forward { 1 } else { -1 };
    }
    v
}

/// Rank over ℚ of integer row vectors (fraction-free elimination).
fn rank(mut rows: Vec<Vec<i128>>) -> usize {
    let ncol = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..ncol {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(r, piv);
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let (a, b) = (rows[r][col], rows[i][col]);
                for k in 0..ncol {
                    rows[i][k] = rows[i][k] * a - rows[r][k] * b;
                }
                let g = rows[i].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
                if g > 1 {
                    rows[i].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        r += 1;
    }
    r
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Cotree loop count, constraint rank and free parameter count of the system space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterCount {
    pub cotree_loops: usize,
    pub constraint_rank: usize,
    pub free: usize,
}

/// Constraints: γ·σγ for every cotree loop, the sink loop of every puncture and every
/// ramification loop, written in cotree coordinates (tree crossings are gauged to 1).
pub fn parameter_count(sg: &SpectralGraph) -> Result<ParameterCount> {
    let tree = SpanningTree::new(sg)?;
    let cotree: Vec<usize> = (0..sg.ray_count()).filter(|&r| !tree.in_tree[r]).collect();
    let project = |v: Vec<i64>| cotree.iter().map(|&r| v[r] as i128).collect::<Vec<i128>>();
    let mut rows = Vec::new();
    for (_, l) in tree.cotree_loops(sg, crate::stokes::Carrier::Cover) {
        let a = exponents(sg, &l);
        let b = exponents(sg, &sg.sigma_path(&l));
        rows.push(project(a.iter().zip(&b).map(|(x, y)| x + y).collect()));
    }
    for p in 0..sg.base.poles.len() {
        rows.push(project(exponents(sg, &sg.puncture_lift_loop(p, true))));
    }
    for b in 0..sg.base.branches.len() {
        rows.push(project(exponents(sg, &sg.ramification_loop(b))));
    }
    let constraint_rank = rank(rows);
    Ok(ParameterCount { cotree_loops: cotree.len(), constraint_rank, free: cotree.len() - constraint_rank })
}

pub const SYSTEM_SCHEMA: &str = "odd-abelian-system/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportJson {
    pub ray: usize,
    /// "forward" or "backward"; the value is the transport across the ray in that direction.
    pub direction: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemJson {
    pub schema: String,
    /// Spectral graph file, relative to this file.
    pub graph_ref: String,
    pub lambda: Vec<[f64; 2]>,
    pub t: Vec<TransportJson>,
    pub m: Vec<[f64; 2]>,
}

fn pair<T: Real>(z: Complex<T>) -> [f64; 2] {
    let c = to_c64(z);
    [c.re, c.im]
}

impl<T: Real> OddAbelianSystem<T> {
    pub fn to_json(&self, graph_ref: &str) -> SystemJson {
        SystemJson {
            schema: SYSTEM_SCHEMA.into(),
            graph_ref: graph_ref.into(),
            lambda: self.lambda.iter().map(|&l| pair(l)).collect(),
            t: self
                .t
                .iter()
                .enumerate()
                .map(|(ray, &z)| {
                    let c = to_c64(z);
                    TransportJson { ray, direction: "forward".into(), re: c.re, im: c.im }
                })
                .collect(),
            m: self.m.iter().map(|&z| pair(z)).collect(),
        }
    }

    /// Builds a system over an already loaded cover; checks structure, not invariants.
    pub fn from_json(j: &SystemJson, sg: &SpectralGraph) -> Result<Self> {
        if j.schema != SYSTEM_SCHEMA {
            return Err(Error::schema("schema", format!("expected {SYSTEM_SCHEMA:?}, found {:?}", j.schema)));
        }
        let mut t = vec![None; sg.ray_count()];
        for (k, e) in j.t.iter().enumerate() {
            if e.ray >= sg.ray_count() {
                return Err(Error::schema(format!("t[{k}].ray"), "no such spectral ray"));
            }
            if t[e.ray].is_some() {
                return Err(Error::schema(format!("t[{k}]"), "duplicate entry for ray"));
            }
            let z: Complex<T> = from_c64(num_complex::Complex64::new(e.re, e.im));
            t[e.ray] = Some(match e.direction.as_str() {
                "forward" => z,
                "backward" => z.inv(),
                other => return Err(Error::schema(format!("t[{k}].direction"), format!("unknown direction {other:?}"))),
            });
        }
        let t = t
            .into_iter()
            .enumerate()
            .map(|(i, z)| z.ok_or_else(|| Error::schema("t", format!("missing spectral ray {i}"))))
            .collect::<Result<Vec<_>>>()?;
        let sys = OddAbelianSystem {
            sg: sg.clone(),
            lambda: j.lambda.iter().map(|l| from_c64(num_complex::Complex64::new(l[0], l[1]))).collect(),
            t,
            m: j.m.iter().map(|l| from_c64(num_complex::Complex64::new(l[0], l[1]))).collect(),
        };
        sys.check_structure()?;
        Ok(sys)
    }
}
