//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use gilbert::geom::{ray_intersection, ray_segment_intersection, Angle, Point, Rect, Segment};
use gilbert::motorsim::{simulate_motorcycles, Killer, Motorcycle, Obstacle, SimOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A life lost, as `(victim, order_index, victim_age, killer)` where the
/// killer is `Ok(motorcycle)` or `Err(complex_id)`.
pub type OracleEvent = (usize, u32, f64, Result<usize, usize>);

/// Fixed-point oracle: start with every path running to the horizon and
/// recompute all pairwise crossings against the current path lengths until
/// nothing changes.
pub fn brute_force(bikes: &[Motorcycle], obstacles: &[Obstacle], horizon: Rect) -> (Vec<f64>, Vec<OracleEvent>) {
    let h: Vec<f64> = bikes.iter().map(|m| horizon.exit_distance(m.origin, m.angle.vec())).collect();
    let mut len = h.clone();
    for _ in 0..10_000 {
        let mut next = h.clone();
        let mut events = Vec::new();
        for (i, m) in bikes.iter().enumerate() {
            let mut hits: Vec<(f64, Result<usize, usize>)> = Vec::new();
            for (j, o) in bikes.iter().enumerate() {
                if j == i || o.source_id == m.source_id {
                    continue;
                }
                if let Some((_, ti, tj)) = ray_intersection(m.origin, m.angle, o.origin, o.angle) {
                    if ti <= h[i] && tj < ti - 1e-12 && tj <= len[j] {
                        hits.push((ti, Ok(j)));
                    }
                }
            }
            for o in obstacles.iter().filter(|o| o.complex_id != m.source_id) {
                let mut ts: Vec<f64> = o
                    .segments
                    .iter()
                    .filter_map(|s| ray_segment_intersection(m.origin, m.angle.vec(), s).map(|r| r.0))
                    .filter(|&t| t <= h[i])
                    .collect();
                ts.sort_by(f64::total_cmp);
                ts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
                hits.extend(ts.into_iter().map(|t| (t, Err(o.complex_id))));
            }
            hits.sort_by(|a, b| a.0.total_cmp(&b.0));
            let k = m.lives as usize;
            if hits.len() >= k {
                next[i] = hits[k - 1].0;
            }
            for (n, (t, who)) in hits.into_iter().take(k).enumerate() {
                events.push((i, n as u32 + 1, t, who));
            }
        }
        if next == len {
            events.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
            return (len, events);
        }
        len = next;
    }
    panic!("oracle did not stabilise");
}

/// Polygon clipping of a convex polygon by the half-plane `n·p <= c`.
pub fn clip_halfplane(poly: &[Point], n: Point, c: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (fa, fb) = (n.dot(a) - c, n.dot(b) - c);
        if fa <= 0.0 {
            out.push(a);
        }
        if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
            out.push(a + (b - a) * (fa / (fa - fb)));
        }
    }
    out
}

/// Number of corners of a convex polygon after merging coincident and collinear points.
pub fn proper_corners(poly: &[Point]) -> usize {
    let mut pts: Vec<Point> = Vec::new();
    for &p in poly {
        if pts.last().is_none_or(|q: &Point| q.dist(p) > 1e-9) {
            pts.push(p);
        }
    }
    while pts.len() > 1 && pts[0].dist(*pts.last().unwrap()) <= 1e-9 {
        pts.pop();
    }
    let n = pts.len();
    (0..n)
        .filter(|&i| {
            let (a, b, c) = (pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
            (b - a).cross(c - b).abs() > 1e-9
        })
        .count()
}

pub fn segment(ax: f64, ay: f64, bx: f64, by: f64) -> Segment {
    Segment::new(Point::new(ax, ay), Point::new(bx, by))
}

pub fn random_config(seed: u64, n: usize, k: u32, with_obstacles: bool) -> (Vec<Motorcycle>, Vec<Obstacle>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angles = [Angle::EAST, Angle::NORTH, Angle::SOUTHWEST, Angle::new(2.0), Angle::WEST];
    let mut bikes = Vec::new();
    let mut source = 0;
    while bikes.len() < n {
        let o = Point::new(rng.random_range(0.0..10.0), rng.random_range(0.0..10.0));
        let per_site = rng.random_range(1..=3usize).min(n - bikes.len());
        let start = rng.random_range(0..angles.len());
        for a in 0..per_site {
            bikes.push(Motorcycle {
                id: bikes.len(),
                origin: o,
                angle: angles[(start + 2 * a) % angles.len()],
                lives: k,
                source_id: source,
                weight: 1,
            });
        }
        source += 1;
    }
    if bikes.iter().all(|m| m.angle.is_parallel(bikes[0].angle)) {
        let a = if bikes[0].angle.is_parallel(Angle::NORTH) { Angle::EAST } else { Angle::NORTH };
        bikes.last_mut().unwrap().angle = a;
    }
    let mut obstacles = Vec::new();
    if with_obstacles {
        for c in 0..2 {
            let p = Point::new(rng.random_range(0.0..10.0), rng.random_range(0.0..10.0));
            let q = p + Point::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let r = q + Point::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            obstacles.push(Obstacle { complex_id: 1000 + c, segments: vec![Segment::new(p, q), Segment::new(q, r)] });
        }
    }
    (bikes, obstacles)
}

/// Runs `simulate_motorcycles` on one random instance and compares it with [`brute_force`].
pub fn check_against_oracle(seed: u64, n: usize, k: u32, with_obstacles: bool, chunk: Option<f64>) -> Result<(), String> {
    let (bikes, obstacles) = random_config(seed, n, k, with_obstacles);
    let horizon = Rect::new(-5.0, -5.0, 15.0, 15.0);
    let opts = SimOptions { horizon, chunk };
    let r = simulate_motorcycles(bikes.clone(), obstacles.clone(), opts).map_err(|e| format!("seed {seed}: {e}"))?;
    let (len, expected) = brute_force(&bikes, &obstacles, horizon);
    for (t, l) in r.trails.iter().zip(&len) {
        if (t.length() - l).abs() >= 1e-9 {
            return Err(format!("seed {seed}: trail {} has length {} vs {}", t.id, t.length(), l));
        }
    }
    let mut got: Vec<_> = r
        .events
        .iter()
        .map(|e| {
            let who = match e.killer {
                Killer::Motorcycle(j) => Ok(j),
                Killer::Obstacle { complex_id, .. } => Err(complex_id),
            };
            (e.victim, e.order_index, e.victim_age, who)
        })
        .collect();
    got.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    if got.len() != expected.len() {
        return Err(format!("seed {seed}: {} events vs {}", got.len(), expected.len()));
    }
    for (g, e) in got.iter().zip(&expected) {
        if (g.0, g.1, g.3) != (e.0, e.1, e.3) || (g.2 - e.2).abs() >= 1e-9 {
            return Err(format!("seed {seed}: event {g:?} vs {e:?}"));
        }
    }
    Ok(())
}
