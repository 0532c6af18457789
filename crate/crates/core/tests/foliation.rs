mod common;

use num_complex::Complex64 as C;
use stokes_core::foliation::{critical_directions, is_saddle_free, saddle_integral, Classification, Endpoint, Tracer};
use stokes_core::QuadraticDifferential;

const THIRD: f64 = std::f64::consts::TAU / 3.0;

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

#[test]
fn rotating_phi_rotates_the_critical_directions() {
    let phi = common::triple_phi(common::TRIPLE);
    let psi = 0.9;
    let rot = phi.scaled(C::from_polar(1.0, psi)).unwrap();
    let b = phi.zeros(1e-8).unwrap()[0];
    let th = critical_directions(&phi, b).unwrap();
    let tr = critical_directions(&rot, b).unwrap();
    for t in tr {
        let best = th.iter().map(|&s| angle_gap(t, s - psi / 3.0)).fold(f64::MAX, f64::min);
        assert!(best < 1e-12);
    }
    for k in 0..3 {
        assert!(angle_gap(th[(k + 1) % 3], th[k]) - THIRD < 1e-12);
    }
}

#[test]
fn generic_triple_is_saddle_free_with_two_leaves_per_puncture() {
    let t = common::trace(&common::triple_phi(common::TRIPLE));
    assert_eq!(t.leaves.len(), 6);
    let mut hits = [0; 3];
    for l in &t.leaves {
        let Endpoint::Pole(p) = l.endpoint else { panic!("leaf without a pole") };
        hits[p] += 1;
    }
    assert_eq!(hits, [2, 2, 2]);
}

#[test]
fn pole_endpoints_lie_in_the_capture_region() {
    let phi = common::triple_phi(common::TRIPLE);
    let t = common::trace(&phi);
    for l in &t.leaves {
        let Endpoint::Pole(p) = l.endpoint else { unreachable!() };
        match phi.marked.punctures[p].finite() {
            Some(z) => assert!((l.terminal() - z).norm() <= t.cfg.pole_radius),
            None => assert!(l.terminal().norm() >= t.cfg.far_radius),
        }
    }
}

#[test]
fn zero_arclength_budget_is_inconclusive() {
    let phi = common::triple_phi(common::TRIPLE);
    let zeros = phi.zeros(1e-12).unwrap();
    let mut cfg = stokes_core::TraceConfig::for_differential(&phi, &zeros);
    cfg.max_arclength_w = 0.0;
    assert!(matches!(is_saddle_free(&phi, &zeros, &cfg).unwrap(), Classification::Inconclusive(_)));
}

#[test]
fn leaves_are_horizontal_and_converged() {
    let phi = common::triple_phi(common::TRIPLE);
    let t = common::trace(&phi);
    let tracer = Tracer::new(&phi, t.zeros.clone(), t.cfg.clone()).unwrap();
    for l in &t.leaves {
        assert!(tracer.horizontal_drift(l).unwrap() <= 1e-6);
    }
    let mut half = t.cfg.clone();
    half.rtol *= 0.5;
    half.atol *= 0.5;
    let Classification::SaddleFree(fine) = is_saddle_free(&phi, &t.zeros, &half).unwrap() else { panic!() };
    for (a, b) in t.leaves.iter().zip(&fine) {
        assert_eq!(a.endpoint, b.endpoint);
        assert!((a.terminal() - b.terminal()).norm() < 1e-5);
    }
}

#[test]
fn halving_the_pole_radius_keeps_the_endpoints() {
    let phi = common::triple_phi(common::TRIPLE);
    let t = common::trace(&phi);
    let mut cfg = t.cfg.clone();
    cfg.pole_radius *= 0.5;
    let Classification::SaddleFree(l2) = is_saddle_free(&phi, &t.zeros, &cfg).unwrap() else { panic!() };
    for (a, b) in t.leaves.iter().zip(&l2) {
        assert_eq!(a.endpoint, b.endpoint);
    }
}

#[test]
fn leaves_never_return_to_their_zero() {
    let t = common::trace(&common::triple_phi(common::TRIPLE));
    for l in &t.leaves {
        let b = t.zeros[l.source_zero];
        assert!(l.points.iter().all(|&z| (z - b).norm() > t.cfg.zero_radius));
    }
}

fn rotated(psi: f64) -> QuadraticDifferential {
    let u = C::from_polar(1.0, psi);
    let t = common::TRIPLE.map(|(re, im)| C::new(re, im) * u);
    QuadraticDifferential::three_point(t[0], t[1], t[2]).unwrap()
}

/// Im of the saddle integral of the rotated triple, branch fixed by Re ≥ 0.
fn saddle_im(psi: f64) -> f64 {
    let phi = rotated(psi);
    let w = saddle_integral(&phi, &phi.zeros(1e-12).unwrap()).unwrap();
    if w.re < 0.0 {
        -w.im
    } else {
        w.im
    }
}

/// Rotating every residue by e^{iψ} rotates the saddle integral by e^{iψ/2}, so the
/// family crosses the saddle locus near ψ = −2·arg w. Bisection pins the crossing.
fn saddle_rotation() -> f64 {
    let phi = rotated(0.0);
    let w = saddle_integral(&phi, &phi.zeros(1e-12).unwrap()).unwrap();
    let guess = (-2.0 * w.arg()).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
    let guess = if saddle_im(guess).abs() < saddle_im(guess + std::f64::consts::PI).abs() { guess } else { guess + std::f64::consts::PI };
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
    0.5 * (lo + hi)
}

#[test]
fn bisected_saddle_triple_is_detected() {
    let psi = saddle_rotation();
    assert!(saddle_im(psi).abs() < 1e-6);
    let phi = rotated(psi);
    let zeros = phi.zeros(1e-12).unwrap();
    let cfg = stokes_core::TraceConfig::for_differential(&phi, &zeros);
    let cl = is_saddle_free(&phi, &zeros, &cfg).unwrap();
    assert!(!cl.is_saddle_free());
    if let Classification::HasSaddle { trajectories, .. } = cl {
        assert!(trajectories.iter().any(|t| matches!(t.endpoint, Endpoint::Saddle(_))));
    }
}

#[test]
fn conjugate_residues_conjugate_the_saddle_integral() {
    let t = common::TRIPLE;
    let phi = common::triple_phi(t);
    let bar = common::triple_phi([(t[0].0, -t[0].1), (t[1].0, -t[1].1), (t[2].0, -t[2].1)]);
    let w = saddle_integral(&phi, &phi.zeros(1e-12).unwrap()).unwrap();
    let wb = saddle_integral(&bar, &bar.zeros(1e-12).unwrap()).unwrap();
    // Equal up to the sign of the branch.
    let d = (wb - w.conj()).norm().min((wb + w.conj()).norm());
    assert!(d < 1e-9 * w.norm());
}
