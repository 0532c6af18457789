#![allow(dead_code)]

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::{Command, Output};
use stokes_core::foliation::saddle_integral;
use stokes_core::QuadraticDifferential;

pub const TRIPLE: [(f64, f64); 3] = [(0.6, 0.2), (0.9, -0.3), (0.5, 0.4)];

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn stokes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stokes")).args(args).output().expect("binary runs")
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

/// `--residues re,im` three times.
pub fn residue_args(t: [(f64, f64); 3]) -> Vec<String> {
    t.iter().flat_map(|(re, im)| ["--residues".to_string(), format!("{re},{im}")]).collect()
}

pub fn phi_of(t: [(f64, f64); 3]) -> QuadraticDifferential {
    QuadraticDifferential::three_point(C::new(t[0].0, t[0].1), C::new(t[1].0, t[1].1), C::new(t[2].0, t[2].1)).unwrap()
}

/// Generic triples with |Im| of the saddle integral at least 1e-2·max(1, |w|).
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

fn rotated(psi: f64) -> [(f64, f64); 3] {
    let u = C::from_polar(1.0, psi);
    TRIPLE.map(|(re, im)| {
        let z = C::new(re, im) * u;
        (z.re, z.im)
    })
}

fn saddle_im(psi: f64) -> f64 {
    let phi = phi_of(rotated(psi));
    let w = saddle_integral(&phi, &phi.zeros(1e-12).unwrap()).unwrap();
    if w.re < 0.0 {
        -w.im
    } else {
        w.im
    }
}

/// A triple on the saddle locus: all residues rotated by the phase that makes the
/// saddle integral real, found by bisection.
pub fn saddle_triple() -> [(f64, f64); 3] {
    let phi = phi_of(TRIPLE);
    let w = saddle_integral(&phi, &phi.zeros(1e-12).unwrap()).unwrap();
    let pi = std::f64::consts::PI;
    let guess = (-2.0 * w.arg()).rem_euclid(2.0 * pi) - pi;
    let guess = if saddle_im(guess).abs() < saddle_im(guess + pi).abs() { guess } else { guess + pi };
    let (mut lo, mut hi) = (guess - 0.2, guess + 0.2);
    assert!(saddle_im(lo).signum() != saddle_im(hi).signum());
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if saddle_im(mid).signum() == saddle_im(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    rotated(0.5 * (lo + hi))
}
