//! Properties of tropical curves checked against a direct min-plus evaluation.

use gilbert::geom::{Angle, Point, Segment};
use gilbert::procs::stream_rng;
use gilbert::tropical::{body_radius, curve, random_standard, regular_subdivision, stable_intersection, TropCurve, TropPoly};
use proptest::prelude::*;
use rand::Rng;

/// Minimum of `c + i·x + j·y` and every monomial within `tol` of it.
fn argmins(f: &TropPoly, p: Point, tol: f64) -> Vec<(u32, u32)> {
    let vals: Vec<((u32, u32), f64)> =
        f.coeffs().iter().map(|(&(i, j), &c)| ((i, j), c + i as f64 * p.x + j as f64 * p.y)).collect();
    let m = vals.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    vals.into_iter().filter(|v| v.1 <= m + tol).map(|v| v.0).collect()
}

fn on_zero_set(f: &TropPoly, p: Point) -> bool {
    argmins(f, p, 1e-7).len() >= 2
}

/// Distance from `p` to the union of body segments and arms.
fn distance_to_curve(c: &TropCurve, p: Point) -> f64 {
    let body = c.body_segments().iter().map(|s| s.distance_to(p)).fold(f64::INFINITY, f64::min);
    let arms = c
        .arms
        .iter()
        .map(|a| {
            let t = (p - a.apex).dot(a.direction.vec()).max(0.0);
            (a.apex + a.direction.vec() * t).dist(p)
        })
        .fold(f64::INFINITY, f64::min);
    body.min(arms).min(c.vertices.iter().map(|v| v.dist(p)).fold(f64::INFINITY, f64::min))
}

fn poly(d: u32, spread: f64, seed: u64) -> TropPoly {
    random_standard(d, spread, &mut stream_rng(seed, 3))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    /// Points sampled on the body and arms are zeros; every vertex attains the minimum three times.
    #[test]
    fn curve_lies_in_zero_set(d in 1u32..=5, spread in 0.5f64..6.0, seed in any::<u64>()) {
        let f = poly(d, spread, seed);
        let c = curve(&f).unwrap();
        for v in &c.vertices {
            prop_assert!(argmins(&f, *v, 1e-7).len() >= 3);
        }
        for s in c.body_segments() {
            for t in [0.1, 0.37, 0.5, 0.81] {
                prop_assert!(on_zero_set(&f, s.start + (s.end - s.start) * t));
            }
        }
        for a in &c.arms {
            for t in [0.01, 1.0, 17.0, 400.0] {
                prop_assert!(on_zero_set(&f, a.apex + a.direction.vec() * t), "arm {:?} leaves the zero set", a);
            }
        }
    }

    /// Conversely, zeros found by bisection along random segments lie on the curve.
    #[test]
    fn zero_set_lies_on_curve(d in 1u32..=4, spread in 0.5f64..5.0, seed in any::<u64>()) {
        let f = poly(d, spread, seed);
        let c = curve(&f).unwrap();
        let mut rng = stream_rng(seed, 4);
        let r = 3.0 * spread + 2.0;
        let mut found = 0;
        for _ in 0..40 {
            let mut a = Point::new(rng.random_range(-r..r), rng.random_range(-r..r));
            let mut b = Point::new(rng.random_range(-r..r), rng.random_range(-r..r));
            let region = |p: Point| argmins(&f, p, 0.0)[0];
            if region(a) == region(b) {
                continue;
            }
            for _ in 0..80 {
                let m = (a + b) * 0.5;
                if region(m) == region(a) { a = m } else { b = m }
            }
            found += 1;
            prop_assert!(distance_to_curve(&c, (a + b) * 0.5) < 1e-6);
        }
        prop_assert!(found > 0);
    }

    /// Arm multiplicities sum to the degree in each of the three directions.
    #[test]
    fn degree_many_arms_per_direction(d in 1u32..=6, spread in 0.0f64..4.0, seed in any::<u64>()) {
        let c = curve(&poly(d, spread, seed)).unwrap();
        prop_assert_eq!(c.arm_census(), [d, d, d]);
    }

    /// Bounded edges are normal to their dual edges and the cells tile the standard triangle.
    #[test]
    fn duality_with_subdivision(d in 1u32..=5, spread in 0.5f64..4.0, seed in any::<u64>()) {
        let f = poly(d, spread, seed);
        let c = curve(&f).unwrap();
        let s = regular_subdivision(&f).unwrap();
        let area: f64 = s.cells.iter().map(|cell| {
            let p: Vec<Point> = cell.corners.iter().map(|&(i, j)| Point::new(i as f64, j as f64)).collect();
            gilbert::geom::signed_area(&p)
        }).sum();
        prop_assert!((area - (d * d) as f64 / 2.0).abs() < 1e-9);
        for e in &c.edges {
            let seg = Segment::new(c.vertices[e.a], c.vertices[e.b]);
            let dual = Point::new(e.dual.1.0 as f64 - e.dual.0.0 as f64, e.dual.1.1 as f64 - e.dual.0.1 as f64);
            prop_assert!(seg.direction().dot(dual).abs() < 1e-7 * (1.0 + seg.length()) * dual.norm());
        }
    }

    /// Shifting the exponent weights translates the curve; scaling coefficients scales it.
    #[test]
    fn translation_and_scale_invariance(d in 1u32..=4, seed in any::<u64>(), u in -3.0f64..3.0, v in -3.0f64..3.0, t in 0.2f64..5.0) {
        let f = poly(d, 2.0, seed);
        let c = curve(&f).unwrap();
        let moved = curve(&f.rescaled(u, v)).unwrap();
        let scaled = curve(&TropPoly::new(f.coeffs().iter().map(|(&e, &x)| (e, t * x))).unwrap()).unwrap();
        prop_assert_eq!(moved.vertices.len(), c.vertices.len());
        for ((p, q), s) in c.vertices.iter().zip(&moved.vertices).zip(&scaled.vertices) {
            prop_assert!(q.dist(*p - Point::new(u, v)) < 1e-9);
            prop_assert!(s.dist(*p * t) < 1e-9 * (1.0 + t * p.norm()));
        }
        prop_assert_eq!(moved.arm_census(), c.arm_census());
    }

    /// Stable intersection counts `d₁·d₂` points with multiplicity.
    #[test]
    fn bezout(d1 in 1u32..=4, d2 in 1u32..=4, seed in any::<u64>()) {
        let a = curve(&poly(d1, 3.0, seed)).unwrap();
        let b = curve(&poly(d2, 3.0, seed ^ 0x55)).unwrap();
        let pts = stable_intersection(&a, &b, seed).unwrap();
        prop_assert_eq!(pts.iter().map(|p| p.1).sum::<u32>(), d1 * d2);
    }
}

#[test]
fn body_fits_in_twice_the_spread() {
    let mut rng = stream_rng(2024, 0);
    let mut worst: f64 = 0.0;
    for n in 0..10_000 {
        let d = 1 + (n % 4) as u32;
        let f = random_standard(d, rng.random_range(0.1..5.0), &mut rng);
        let c = curve(&f).unwrap();
        let spread = f.spread();
        worst = worst.max(body_radius(&c) / spread);
        assert!(body_radius(&c) <= 2.0 * spread + 1e-9, "radius {} exceeds 2·{spread}", body_radius(&c));
    }
    assert!(worst > 0.1, "bound never approached: {worst}");
}

#[test]
fn arm_directions_are_east_north_southwest() {
    let c = curve(&TropPoly::tropical_line()).unwrap();
    let mut dirs: Vec<f64> = c.arms.iter().map(|a| a.direction.degrees()).collect();
    dirs.sort_by(f64::total_cmp);
    assert_eq!(dirs, vec![Angle::EAST.degrees(), Angle::NORTH.degrees(), Angle::SOUTHWEST.degrees()]);
}

#[test]
fn malformed_polynomials_are_rejected() {
    assert!(TropPoly::parse("0 0 1\n1 0 x\n").is_err());
    assert!(curve(&TropPoly::new([((0, 0), 0.0), ((1, 1), 0.0)]).unwrap()).is_err());
    assert!(TropPoly::new([((0, 0), f64::NAN)]).is_err());
}
