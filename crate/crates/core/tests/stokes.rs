mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stokes_core::stokes::canonical::isomorphic;
use stokes_core::stokes::io::{read_spectral, read_stokes, write_spectral, write_stokes};
use stokes_core::stokes::{
    assemble, double_cover, loop_basis, sigma, svg, vertex_loop, winding_numbers, Carrier, LoopId, RegionGraph, SpanningTree, Tour,
    Vertex,
};
use stokes_core::Error;

#[test]
fn three_punctures_give_two_branch_points_six_rays_three_regions() {
    let t = common::trace(&common::triple_phi(common::TRIPLE));
    assert_eq!((t.graph.branches.len(), t.graph.rays.len(), t.graph.regions.len()), (2, 6, 3));
    assert_eq!(t.graph.genus, 0);
    assert_eq!((t.cover.region_count(), t.cover.ray_count(), t.cover.ramification.len()), (6, 12, 2));
}

#[test]
fn four_punctures_give_four_branch_points_twelve_rays_six_regions() {
    let g = read_stokes(&common::read_fixture("stokes_0_4.json")).unwrap();
    assert_eq!((g.branches.len(), g.rays.len(), g.regions.len()), (4, 12, 6));
    let v = g.poles.len() + g.branches.len();
    assert_eq!(v as i64 - g.rays.len() as i64 + g.regions.len() as i64, 2);
    let sg = double_cover(&g).unwrap();
    assert_eq!((sg.region_count(), sg.ray_count()), (12, 24));
}

#[test]
fn every_region_is_a_quadrilateral_with_two_punctures() {
    let t = common::trace(&common::triple_phi(common::TRIPLE));
    for r in &t.graph.regions {
        assert!(r.poles[0] <= r.poles[1]);
        for (i, &ray) in r.rays.iter().enumerate() {
            assert_eq!(t.graph.rays[ray].pole, r.poles[i / 2]);
        }
    }
    // Each ray borders two regions, so ray sides count every region four times.
    let mut seen = vec![0; t.graph.regions.len()];
    for s in &t.graph.sides {
        seen[s.cw] += 1;
        seen[s.ccw] += 1;
    }
    assert!(seen.iter().all(|&k| k == 4));
}

#[test]
fn sigma_is_a_free_involution_commuting_with_the_ray_ends() {
    let (sg, _) = common::spectral_fixture("spectral_0_4.json");
    for e in 0..sg.ray_count() {
        assert_eq!(sigma(sigma(e)), e);
        let (a, b) = sg.ray_ends(e);
        assert_eq!(sg.ray_ends(sigma(e)), (sigma(a), sigma(b)));
        assert_ne!(a, sigma(a));
    }
    for s in 0..sg.region_count() {
        assert_eq!(sg.sink_of(sigma(s)), sg.base.regions[s / 2].poles[1 - s % 2]);
    }
}

#[test]
fn ramification_loop_closes_after_two_turns() {
    let (sg, _) = common::spectral_fixture("spectral_0_3.json");
    for b in 0..sg.base.branches.len() {
        let once = vertex_loop(&sg.base, Vertex::Branch(b), 0);
        let start = 2 * once.start();
        assert_eq!(sg.lift(&once, start).unwrap().end(), sigma(start));
        let l = sg.ramification_loop(b);
        assert_eq!(l.len(), 6);
        assert!(l.is_closed());
        assert_eq!(l.crossings.iter().map(|c| c.ray).collect::<Vec<_>>(), sg.ramification[b].to_vec());
    }
}

#[test]
fn detours_wind_once_clockwise_around_their_branch_point() {
    for name in ["spectral_0_3.json", "spectral_0_4.json"] {
        let (sg, _) = common::spectral_fixture(name);
        for a in 0..sg.base.rays.len() {
            let d = sg.detour_path(a);
            assert_eq!(d.len(), 3);
            assert_eq!(d.end(), sigma(d.start()));
            // Starts on the source side of α's puncture, ends on the sink side.
            assert_eq!(sg.sink_of(d.end()), sg.base.rays[a].pole);
            let base = sg.project(d);
            assert!(base.is_closed());
            for (v, w) in winding_numbers(&sg.base, &base) {
                let want = if v == Vertex::Branch(sg.base.rays[a].branch) { -1 } else { 0 };
                assert_eq!(w, want, "ray {a} vertex {v:?}");
            }
            let twice = d.concat(&sg.sigma_path(d)).unwrap();
            assert!(twice.is_closed());
            assert_eq!(twice.reduce().len(), 6);
        }
    }
}

#[test]
fn vertex_loops_wind_once_around_their_vertex() {
    let g = read_stokes(&common::read_fixture("stokes_0_4.json")).unwrap();
    for b in 0..g.branches.len() {
        for (v, w) in winding_numbers(&g, &vertex_loop(&g, Vertex::Branch(b), 1)) {
            assert_eq!(w, i64::from(v == Vertex::Branch(b)));
        }
    }
}

#[test]
fn tour_generators_wind_around_one_puncture_and_multiply_to_one() {
    for name in ["stokes_0_3.json", "stokes_0_4.json"] {
        let g = read_stokes(&common::read_fixture(name)).unwrap();
        let tour = Tour::new(&g).unwrap();
        assert_eq!(tour.generators.len(), g.poles.len() + g.branches.len());
        let mut product = stokes_core::stokes::CombinatorialPath::empty(Carrier::Base, tour.basepoint);
        for gen in tour.generators.iter().rev() {
            assert!(gen.path.is_closed() && gen.path.start() == tour.basepoint);
            let w = winding_numbers(&g, &gen.path);
            let around = w.iter().find(|(v, _)| *v == gen.vertex).unwrap().1;
            let p0 = w.iter().find(|(v, _)| *v == Vertex::Pole(0)).unwrap().1;
            assert_eq!(around - p0, if gen.vertex == Vertex::Pole(0) { 0 } else { 1 });
            product = product.concat(&gen.path).unwrap();
        }
        assert!(product.reduce().is_empty());
    }
}

#[test]
fn lifts_are_exchanged_by_sigma() {
    let (sg, _) = common::spectral_fixture("spectral_0_4.json");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let p = common::random_walk(&sg.base, Carrier::Base, 2, 15, &mut rng);
        let a = sg.lift(&p, 4).unwrap();
        let b = sg.lift(&p, 5).unwrap();
        assert_eq!(sg.sigma_path(&a), b);
        assert_eq!(sg.project(&a), p);
    }
}

#[test]
fn loop_basis_has_one_cotree_loop_per_extra_ray() {
    let (sg, _) = common::spectral_fixture("spectral_0_3.json");
    let basis = loop_basis(&sg).unwrap();
    let cotree = basis.iter().filter(|(id, _)| matches!(id, LoopId::Cotree(_))).count();
    assert_eq!(cotree, 12 - 6 + 1);
    assert_eq!(basis.len(), 7 + 2 * 3 + 2);
    assert!(basis.iter().all(|(_, p)| p.is_closed() && p.start() == 0));
    let tree = SpanningTree::new(&sg.base).unwrap();
    assert_eq!(tree.cotree_loops(&sg.base, Carrier::Base).len(), 4);
}

#[test]
fn missing_leaf_is_a_count_mismatch() {
    let phi = common::triple_phi(common::TRIPLE);
    let t = common::trace(&phi);
    assert!(matches!(assemble(&phi, &t.leaves[1..]), Err(Error::CountMismatch(_))));
}

#[test]
fn traced_graph_matches_the_hand_written_fixture() {
    let t = common::trace(&common::triple_phi(common::TRIPLE));
    let hand = read_stokes(&common::read_fixture("stokes_0_3.json")).unwrap();
    assert!(isomorphic(&t.graph, &hand));
    let (sg, lambda) = common::spectral_fixture("spectral_0_3.json");
    assert_eq!(sg, t.cover);
    for (a, b) in lambda.iter().zip(&t.lambda) {
        assert!((a - b).norm() < 1e-15);
    }
}

#[test]
fn relabelled_graph_is_isomorphic_but_a_different_one_is_not() {
    let g = read_stokes(&common::read_fixture("stokes_0_3.json")).unwrap();
    let perm = [3, 4, 5, 0, 1, 2];
    let rays = perm.iter().map(|&r| g.rays[r]).collect::<Vec<_>>();
    let inv = |r: usize| perm.iter().position(|&x| x == r).unwrap();
    let branches = g.branches.iter().rev().map(|b| b.map(inv)).collect::<Vec<_>>();
    let rays = rays.into_iter().map(|mut r| {
        r.branch = 1 - r.branch;
        r
    });
    let poles = g.poles.iter().map(|p| p.iter().map(|&r| inv(r)).collect()).collect();
    let h = stokes_core::stokes::StokesGraph::from_rotation(rays.collect(), branches, poles).unwrap();
    assert!(isomorphic(&g, &h));
    let four = read_stokes(&common::read_fixture("stokes_0_4.json")).unwrap();
    assert!(!isomorphic(&g, &four));
}

#[test]
fn graph_files_round_trip() {
    for name in ["stokes_0_3.json", "stokes_0_4.json"] {
        let g = read_stokes(&common::read_fixture(name)).unwrap();
        assert_eq!(read_stokes(&write_stokes(&g)).unwrap(), g);
    }
    for name in ["spectral_0_3.json", "spectral_0_4.json"] {
        let sg = read_spectral(&common::read_fixture(name)).unwrap();
        assert_eq!(read_spectral(&write_spectral(&sg)).unwrap(), sg);
    }
}

#[test]
fn degree_two_branch_vertex_is_a_schema_violation() {
    match read_stokes(&common::read_fixture("stokes_degree2.json")) {
        Err(Error::SchemaViolation { location, .. }) => assert_eq!(location, "branch_vertices[1]"),
        other => panic!("expected a schema violation, got {other:?}"),
    }
}

#[test]
fn tampered_derived_table_is_rejected() {
    let text = common::read_fixture("spectral_0_3.json");
    let mut j: serde_json::Value = serde_json::from_str(&text).unwrap();
    let d = &mut j["detours"][0][0]["forward"];
    *d = serde_json::Value::Bool(!d.as_bool().unwrap());
    assert!(matches!(read_spectral(&j.to_string()), Err(Error::SchemaViolation { .. })));
}

#[test]
fn svg_draws_punctures_and_branch_points() {
    let phi = common::triple_phi(common::TRIPLE);
    let t = common::trace(&phi);
    let geo = stokes_core::stokes::Geometry::from_leaves(&phi, &t.zeros, &t.leaves);
    let s = svg::render(&t.graph, Some(&geo));
    assert!(s.starts_with("<svg"));
    // 0 and 1 are finite; ∞ is labelled in the corner.
    assert_eq!(s.matches("<circle").count(), 2);
    assert_eq!(s.matches("stroke=\"crimson\"").count(), 3 * 2);
    assert_eq!(s.matches("<polyline").count(), 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduction_is_idempotent_and_inverse_cancels(seed in any::<u64>(), start in 0usize..12) {
        let (sg, _) = common::spectral_fixture("spectral_0_4.json");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::random_walk(&sg, Carrier::Cover, start, 50, &mut rng);
        let r = p.reduce();
        prop_assert_eq!(r.reduce(), r.clone());
        prop_assert!(r.validate(&sg).is_ok());
        prop_assert_eq!((r.start(), r.end()), (p.start(), p.end()));
        prop_assert!(p.concat(&p.inverse()).unwrap().reduce().is_empty());
    }

    #[test]
    fn lifting_commutes_with_reduction(seed in any::<u64>(), start in 0usize..6, sheet in 0usize..2) {
        let (sg, _) = common::spectral_fixture("spectral_0_4.json");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::random_walk(&sg.base, Carrier::Base, start, 50, &mut rng);
        let s = 2 * start + sheet;
        prop_assert_eq!(sg.lift(&p.reduce(), s).unwrap(), sg.lift(&p, s).unwrap().reduce());
    }
}
