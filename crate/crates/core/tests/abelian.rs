mod common;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stokes_core::abelian::{parameter_count, random_system, SystemJson};
use stokes_core::scalar::exp_2pi_i;
use stokes_core::stokes::io::parse;
use stokes_core::stokes::{Carrier, LoopId, SpanningTree};
use stokes_core::OddAbelianSystem;

fn system(name: &str, seed: u64) -> OddAbelianSystem {
    let (sg, lambda) = common::spectral_fixture(name);
    random_system(&sg, &lambda, seed).unwrap()
}

fn random_gauge(n: usize, rng: &mut ChaCha8Rng) -> Vec<C> {
    (0..n).map(|_| C::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU))).collect()
}

#[test]
fn random_systems_satisfy_every_invariant() {
    for name in ["spectral_0_3.json", "spectral_0_4.json"] {
        for seed in 0..20 {
            let r = system(name, seed).validate();
            assert!(r.passes(1e-10), "{name} seed {seed}: {r:?}");
        }
    }
}

#[test]
fn corrupted_structure_constant_breaks_oddness() {
    let mut sys = system("spectral_0_3.json", 4);
    sys.m[2] *= 1.5;
    let r = sys.validate();
    assert!(r.odd_skew.max > 0.1);
    assert_eq!(r.odd_skew.location.as_deref(), Some("region 2"));
}

#[test]
fn scaled_transport_breaks_odd_flatness() {
    let mut sys = system("spectral_0_3.json", 4);
    sys.t[5] *= 2.0;
    let r = sys.validate();
    assert!(r.odd_flatness.max > 0.1);
    assert!(r.odd_skew.max < 1e-12);
}

#[test]
fn unit_gauge_is_the_identity() {
    let sys = system("spectral_0_4.json", 2);
    let one = vec![C::new(1.0, 0.0); sys.m.len()];
    assert_eq!(sys.gauge_transform(&one), sys);
}

#[test]
fn sign_flip_on_a_sigma_orbit_keeps_the_system_valid() {
    let sys = system("spectral_0_4.json", 2);
    let mut c = vec![C::new(1.0, 0.0); sys.m.len()];
    c[6] = C::new(-1.0, 0.0);
    c[7] = C::new(-1.0, 0.0);
    let g = sys.gauge_transform(&c);
    assert!(g.validate().passes(1e-12));
    assert_eq!(g.m, sys.m);
    assert_ne!(g.t, sys.t);
}

#[test]
fn holonomies_of_sigma_pairs_give_structure_constant_ratios() {
    let sys = system("spectral_0_4.json", 9);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..30 {
        let p = common::random_walk(&sys.sg, Carrier::Cover, rng.gen_range(0..12), 20, &mut rng);
        let lhs = sys.transport(&p) * sys.transport(&sys.sg.sigma_path(&p));
        let rhs = sys.m[p.end()] / sys.m[p.start()];
        assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
    }
}

#[test]
fn puncture_lifts_have_inverse_monodromy() {
    for seed in 0..100 {
        let sys = system("spectral_0_3.json", seed);
        for p in 0..3 {
            let sink = sys.transport(&sys.sg.puncture_lift_loop(p, true));
            let source = sys.transport(&sys.sg.puncture_lift_loop(p, false));
            assert!((sink * source - 1.0).norm() < 1e-10);
            assert!((sink - exp_2pi_i(sys.lambda[p])).norm() < 1e-10 * sink.norm());
        }
        for b in 0..2 {
            assert!((sys.transport(&sys.sg.ramification_loop(b)) + 1.0).norm() < 1e-10);
        }
    }
}

#[test]
fn seeds_differ_only_in_the_free_holonomies() {
    let a = system("spectral_0_4.json", 1);
    let b = system("spectral_0_4.json", 2);
    let tree = SpanningTree::new(&a.sg).unwrap();
    for (e, &in_tree) in tree.in_tree.iter().enumerate() {
        if in_tree {
            assert!((a.t[e] - 1.0).norm() < 1e-14 && (b.t[e] - 1.0).norm() < 1e-14);
        }
    }
    let (ha, hb) = (a.holonomy_vector().unwrap(), b.holonomy_vector().unwrap());
    let mut cotree_moved = false;
    for ((id, x), (_, y)) in ha.entries.iter().zip(&hb.entries) {
        match id {
            LoopId::Cotree(_) => cotree_moved |= (x - y).norm() > 1e-6,
            _ => assert!((x - y).norm() < 1e-10 * x.norm(), "{id}"),
        }
    }
    assert!(cotree_moved);
}

#[test]
fn free_parameter_count_depends_only_on_the_topology() {
    let (s3, _) = common::spectral_fixture("spectral_0_3.json");
    let (s4, _) = common::spectral_fixture("spectral_0_4.json");
    let c3 = parameter_count(&s3).unwrap();
    let c4 = parameter_count(&s4).unwrap();
    assert_eq!((c3.cotree_loops, c3.free), (7, 0));
    assert_eq!((c4.cotree_loops, c4.free), (24 - 12 + 1, 2));
    for t in common::sample_triples(4, 11) {
        let tr = common::trace(&common::triple_phi(t));
        assert_eq!(parameter_count(&tr.cover).unwrap(), c3);
    }
}

#[test]
fn system_json_round_trips() {
    let sys = system("spectral_0_4.json", 5);
    let text = serde_json::to_string(&sys.to_json("spectral_0_4.json")).unwrap();
    let j: SystemJson = parse(&text).unwrap();
    assert_eq!(j.graph_ref, "spectral_0_4.json");
    assert_eq!(OddAbelianSystem::from_json(&j, &sys.sg).unwrap(), sys);
}

#[test]
fn backward_entries_are_inverted_on_read() {
    let sys = system("spectral_0_3.json", 5);
    let mut j = sys.to_json("spectral_0_3.json");
    let inv = sys.t[3].inv();
    j.t[3].direction = "backward".into();
    j.t[3].re = inv.re;
    j.t[3].im = inv.im;
    let back = OddAbelianSystem::from_json(&j, &sys.sg).unwrap();
    assert!((back.t[3] - sys.t[3]).norm() < 1e-15);
}

#[test]
fn zero_transport_is_rejected() {
    let sys = system("spectral_0_3.json", 5);
    let mut j = sys.to_json("spectral_0_3.json");
    j.t[0].re = 0.0;
    j.t[0].im = 0.0;
    assert!(matches!(
        OddAbelianSystem::from_json(&j, &sys.sg),
        Err(stokes_core::Error::SchemaViolation { location, .. }) if location == "t[0]"
    ));
}

#[test]
fn sampling_is_deterministic() {
    assert_eq!(system("spectral_0_4.json", 77), system("spectral_0_4.json", 77));
    assert_ne!(system("spectral_0_4.json", 77), system("spectral_0_4.json", 78));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gauge_leaves_holonomy_and_validity_alone(seed in 0u64..1000, gseed in any::<u64>()) {
        let sys = system("spectral_0_4.json", seed);
        let mut rng = ChaCha8Rng::seed_from_u64(gseed);
        let g = sys.gauge_transform(&random_gauge(sys.m.len(), &mut rng));
        prop_assert!(g.validate().passes(1e-10));
        let d = sys.holonomy_vector().unwrap().max_relative_deviation(&g.holonomy_vector().unwrap());
        prop_assert!(d < 1e-12, "deviation {}", d);
    }

    #[test]
    fn transport_is_a_groupoid_morphism(seed in 0u64..1000, wseed in any::<u64>()) {
        let sys = system("spectral_0_3.json", seed);
        let mut rng = ChaCha8Rng::seed_from_u64(wseed);
        let p = common::random_walk(&sys.sg, Carrier::Cover, rng.gen_range(0..6), 12, &mut rng);
        let q = common::random_walk(&sys.sg, Carrier::Cover, p.end(), 12, &mut rng);
        let pq = sys.transport(&p.concat(&q).unwrap());
        let prod = sys.transport(&p) * sys.transport(&q);
        prop_assert!((pq - prod).norm() <= 1e-11 * prod.norm());
        prop_assert!((sys.transport(&p.inverse()) * sys.transport(&p) - 1.0).norm() < 1e-11);
    }
}
