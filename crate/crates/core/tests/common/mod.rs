#![allow(dead_code)]

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use stokes_core::foliation::{is_saddle_free, saddle_integral, Classification};
use stokes_core::quad_diff::QuadDiffJson;
use stokes_core::stokes::io::{parse, SpectralGraphJson};
use stokes_core::stokes::{assemble, double_cover, Carrier, CombinatorialPath, Crossing, RegionGraph, SpectralGraph, StokesGraph};
use stokes_core::{QuadraticDifferential, Trajectory, TraceConfig};

/// Residues at 0, 1, ∞ used across the suites; saddle-free with margin.
pub const TRIPLE: [(f64, f64); 3] = [(0.6, 0.2), (0.9, -0.3), (0.5, 0.4)];

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn triple_phi(t: [(f64, f64); 3]) -> QuadraticDifferential {
    QuadraticDifferential::three_point(C::new(t[0].0, t[0].1), C::new(t[1].0, t[1].1), C::new(t[2].0, t[2].1)).unwrap()
}

pub fn phi_0_4() -> QuadraticDifferential {
    let j: QuadDiffJson = parse(&read_fixture("phi_0_4.json")).unwrap();
    QuadraticDifferential::from_json(&j).unwrap()
}

pub struct Traced {
    pub zeros: Vec<C>,
    pub cfg: TraceConfig,
    pub leaves: Vec<Trajectory>,
    pub graph: StokesGraph,
    pub cover: SpectralGraph,
    pub lambda: Vec<C>,
}

pub fn trace(phi: &QuadraticDifferential) -> Traced {
    let zeros = phi.zeros(1e-12).unwrap();
    let cfg = TraceConfig::for_differential(phi, &zeros);
    let leaves = match is_saddle_free(phi, &zeros, &cfg).unwrap() {
        Classification::SaddleFree(l) => l,
        other => panic!("expected a saddle-free differential, got {}", if matches!(other, Classification::HasSaddle { .. }) { "a saddle" } else { "inconclusive" }),
    };
    let graph = assemble(phi, &leaves).unwrap();
    let cover = double_cover(&graph).unwrap();
    let lambda = (0..phi.marked.len()).map(|p| phi.lambda(p)).collect();
    Traced { zeros, cfg, leaves, graph, cover, lambda }
}

/// Cover and exponents stored in a spectral fixture.
pub fn spectral_fixture(name: &str) -> (SpectralGraph, Vec<C>) {
    let j: SpectralGraphJson = parse(&read_fixture(name)).unwrap();
    let sg = j.to_cover().unwrap();
    let lambda = j.lambda.unwrap().iter().map(|l| C::new(l[0], l[1])).collect();
    (sg, lambda)
}

/// Rejection sample of residue triples that are generic and keep |Im| of the saddle
/// integral away from zero.
pub fn sample_triples(count: usize, seed: u64) -> Vec<[(f64, f64); 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let mut t = [(0.0, 0.0); 3];
        for r in t.iter_mut() {
            *r = (rng.gen_range(0.1..1.5), rng.gen_range(-0.8..0.8));
        }
        let Ok(phi) = QuadraticDifferential::three_point(C::new(t[0].0, t[0].1), C::new(t[1].0, t[1].1), C::new(t[2].0, t[2].1)) else {
            continue;
        };
        let Ok(zeros) = phi.zeros(1e-8) else { continue };
        let Ok(w) = saddle_integral(&phi, &zeros) else { continue };
        if w.im.abs() > 1e-2 * w.norm().max(1.0) {
            out.push(t);
        }
    }
    out
}

/// Random walk of `len` crossings starting in `start`.
pub fn random_walk<G: RegionGraph>(g: &G, carrier: Carrier, start: usize, len: usize, rng: &mut ChaCha8Rng) -> CombinatorialPath {
    let mut p = CombinatorialPath::empty(carrier, start);
    for _ in 0..len {
        let here = p.end();
        let options: Vec<Crossing> = (0..g.ray_count())
            .flat_map(|r| {
                let (a, b) = g.ray_ends(r);
                let mut v = Vec::new();
                if a == here {
                    v.push(Crossing::fwd(r));
                }
                if b == here {
                    v.push(Crossing::bwd(r));
                }
                v
            })
            .collect();
        let c = options[rng.gen_range(0..options.len())];
        p.push(g, c).unwrap();
    }
    p
}

/// Random walk closed up through the spanning tree.
pub fn random_loop<G: RegionGraph>(g: &G, carrier: Carrier, start: usize, len: usize, rng: &mut ChaCha8Rng) -> CombinatorialPath {
    let out = random_walk(g, carrier, start, len, rng);
    let tree = stokes_core::stokes::SpanningTree::new(g).unwrap();
    let back = tree.path_to(g, carrier, out.end()).inverse();
    let to_start = tree.path_to(g, carrier, start);
    out.concat(&back).unwrap().concat(&to_start).unwrap()
}
