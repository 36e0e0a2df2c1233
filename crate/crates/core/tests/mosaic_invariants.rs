//! Structural invariants of simulated mosaics and sampled processes.

use gilbert::geom::{Angle, Line, Point, Rect};
use gilbert::mosaic::{build_line_arrangement, build_mosaic, census, VertexKind};
use gilbert::motorsim::{simulate, simulate_motorcycles, SimOptions};
use gilbert::procs::{sample_line_process, sample_sites, LineProcessSpec, ModelSpec, SitePattern};
use gilbert::tropical::{germ_grain, CentroidKind, CurveLaw};
use proptest::prelude::*;

fn model(which: u8) -> ModelSpec {
    match which % 3 {
        0 => ModelSpec::tropical_lines(1.0).unwrap(),
        1 => ModelSpec::rectangular(1.0).unwrap(),
        _ => ModelSpec::from_set_law(
            1.0,
            [0.0, 70.0, 160.0, 250.0].map(Angle::from_degrees).to_vec(),
            vec![(vec![0, 1, 2], 0.5), (vec![1, 2, 3], 0.3), (vec![0, 1, 2, 3], 0.2)],
        )
        .unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn simulated_mosaics_are_planar_and_convex(which in 0u8..3, k in 1u32..=3, side in 3.0f64..8.0, seed in any::<u64>()) {
        let spec = model(which);
        let window = Rect::square(side);
        let sites = sample_sites(&spec, window, seed).unwrap();
        let r = simulate(&sites, k, &[], SimOptions::new(window.expand(3.0))).unwrap();
        let g = build_mosaic(&r).unwrap();
        prop_assert!(g.euler_holds(), "{:?}", g.euler_counts());
        // Sites whose directions leave a gap above π give reflex corners; the
        // first two models have no such gap.
        if which < 2 {
            prop_assert!(g.bounded_faces().all(|f| f.convex));
        }
        let degree_sum: usize = g.degrees().iter().sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
        for (v, x) in g.vertices.iter().enumerate() {
            match x.kind {
                VertexKind::Grave => prop_assert_eq!(g.degree(v), 3),
                VertexKind::Crossing => prop_assert_eq!(g.degree(v), 4),
                VertexKind::Horizon => prop_assert_eq!(g.degree(v), 1),
                VertexKind::Site => prop_assert!(g.degree(v) >= 1),
                _ => {}
            }
        }
        // Each lost life leaves a grave or a crossing.
        let graves = g.vertices.iter().filter(|x| x.kind == VertexKind::Grave).count();
        prop_assert_eq!(graves, r.dead_count());
    }

    #[test]
    fn germ_grain_mosaics_are_planar(k in 1u32..=2, seed in any::<u64>()) {
        let law = CurveLaw::Random { degrees: vec![1, 2, 3], spread: 1.0 };
        let window = Rect::square(6.0);
        let gg = germ_grain(&law, 0.5, &window, k, CentroidKind::MassCenter, seed).unwrap();
        let r = simulate_motorcycles(gg.motorcycles, gg.obstacles, SimOptions::new(window.expand(4.0))).unwrap();
        let g = build_mosaic(&r).unwrap();
        prop_assert!(g.euler_holds(), "{:?}", g.euler_counts());
    }

    #[test]
    fn line_arrangements_are_simple(seed in any::<u64>(), mu in 0.3f64..2.0) {
        let lp = LineProcessSpec::new(vec![(Angle::EAST, mu), (Angle::NORTH, mu), (Angle::from_degrees(45.0), mu)]).unwrap();
        let bbox = Rect::square(8.0);
        let lines = sample_line_process(&lp, &bbox.corners(), seed).unwrap();
        let g = build_line_arrangement(&lines, &bbox);
        prop_assert!(g.euler_holds());
        prop_assert!(g.bounded_faces().all(|f| f.convex));
        let inner = g.vertices.iter().enumerate().filter(|(_, x)| x.crossing.is_some());
        for (v, _) in inner {
            prop_assert_eq!(g.degree(v), 4);
        }
    }
}

#[test]
fn site_and_line_counts_have_poisson_means() {
    let spec = ModelSpec::tropical_lines(2.0).unwrap();
    let window = Rect::square(5.0);
    let n = 400;
    let mean_sites = (0..n).map(|s| sample_sites(&spec, window, s).unwrap().len() as f64).sum::<f64>() / n as f64;
    assert!((mean_sites - 50.0).abs() < 4.0 * (50.0f64 / n as f64).sqrt(), "{mean_sites}");
    let lp = LineProcessSpec::new(vec![(Angle::EAST, 1.5), (Angle::from_degrees(30.0), 0.5)]).unwrap();
    let poly = [Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(0.0, 3.0)];
    let expected: f64 = [Angle::EAST, Angle::from_degrees(30.0)].iter().map(|&a| lp.expected_hits(a, &poly).unwrap()).sum();
    let mean_lines = (0..n).map(|s| sample_line_process(&lp, &poly, s).unwrap().len() as f64).sum::<f64>() / n as f64;
    assert!((mean_lines - expected).abs() < 4.0 * (expected / n as f64).sqrt(), "{mean_lines} vs {expected}");
}

#[test]
fn sampling_is_reproducible() {
    let spec = ModelSpec::rectangular(1.0).unwrap();
    let a = sample_sites(&spec, Rect::square(4.0), 9).unwrap();
    let b = sample_sites(&spec, Rect::square(4.0), 9).unwrap();
    assert_eq!(a, b);
    let mut buf = Vec::new();
    a.write_csv(&mut buf).unwrap();
    let back = SitePattern::read_csv(&buf[..], a.window, a.angles.clone()).unwrap();
    assert_eq!(back.len(), a.len());
    for (x, y) in back.sites.iter().zip(&a.sites) {
        assert!(x.location.dist(y.location) < 1e-12 && x.angle_set == y.angle_set);
    }
}

#[test]
fn grid_census_is_exact() {
    let mut lines = Vec::new();
    for i in 0..10 {
        lines.push(Line::new(Angle::EAST, i as f64));
        lines.push(Line::new(Angle::NORTH, -(i as f64)));
    }
    let g = build_line_arrangement(&lines, &Rect::new(-0.5, -0.5, 9.5, 9.5));
    let c = census(&g, &Rect::new(0.25, 0.25, 8.25, 8.25)).unwrap();
    // 8×8 unit cells with centroids inside, 64 crossings.
    let (v, f) = ((c.lambda0 * c.area).round(), (c.lambda2 * c.area).round());
    assert_eq!((v, f), (64.0, 64.0));
}
