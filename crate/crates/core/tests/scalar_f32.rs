mod common;

use num_complex::Complex32;
use stokes_core::abelian::random_system;
use stokes_core::abelianise::roundtrip_ab;
use stokes_core::quad_diff::QuadraticDifferential;
use stokes_core::voros::{nonabelianise, trace_residual};

#[test]
fn single_precision_pipeline_runs_at_reduced_accuracy() {
    let (sg, lambda) = common::spectral_fixture("spectral_0_3.json");
    let lambda: Vec<Complex32> = lambda.iter().map(|l| Complex32::new(l.re as f32, l.im as f32)).collect();
    let sys = random_system::<f32>(&sg, &lambda, 3).unwrap();
    assert!(sys.validate().passes(1e-3));
    let rep = nonabelianise(&sys).unwrap();
    for m in &rep.matrices {
        assert!((m.det() - 1.0).norm() < 1e-3);
    }
    assert!(trace_residual(&rep) < 1e-3);
    assert!(roundtrip_ab(&sys).unwrap().max() < 1e-2);
}

#[test]
fn single_precision_zeros_match_double() {
    let t = common::TRIPLE;
    let c = |i: usize| Complex32::new(t[i].0 as f32, t[i].1 as f32);
    let phi = QuadraticDifferential::<f32>::three_point(c(0), c(1), c(2)).unwrap();
    let z32 = phi.zeros(1e-4).unwrap();
    let z64 = common::triple_phi(t).zeros(1e-12).unwrap();
    for (a, b) in z32.iter().zip(&z64) {
        assert!(((a.re as f64 - b.re).powi(2) + (a.im as f64 - b.im).powi(2)).sqrt() < 1e-5);
    }
}
