//! Event-driven simulation of motorcycles with `k` lives.
//!
//! Every motorcycle starts at time 0 with unit speed, so a motorcycle's age
//! at a point equals the global time at which it gets there. A motorcycle
//! loses a life where it reaches a point already covered by the trail of a
//! motorcycle from another source (one that got there strictly earlier and
//! was still alive), or where it crosses an obstacle of another complex.
//!
//! Candidate crossings are generated lazily, one chunk of path at a time:
//! the killer of a point at age `t` started within distance `t` of it, so
//! when a motorcycle enters the chunk `[cD, (c+1)D)` only origins within
//! `(c+1)D` of that chunk can matter. Chunks are expanded at time `cD`,
//! before any event of that chunk is processed, and are never expanded for
//! dead motorcycles.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::geom::{kill_region, ray_intersection, ray_segment_intersection, Angle, Point, Rect, Segment, T_EPS};
use crate::limits::solve_wstar;
use crate::procs::{ModelSpec, SitePattern};

#[derive(Debug, Clone, PartialEq)]
pub struct Motorcycle {
    pub id: usize,
    pub origin: Point,
    pub angle: Angle,
    pub lives: u32,
    /// Site or complex the motorcycle belongs to; equal sources never interact.
    pub source_id: usize,
    /// Arm multiplicity; carried along, never used by the dynamics.
    pub weight: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Obstacle {
    pub complex_id: usize,
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Killer {
    Motorcycle(usize),
    Obstacle { complex_id: usize, segment: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionEvent {
    pub victim: usize,
    pub killer: Killer,
    pub location: Point,
    pub victim_age: f64,
    /// Zero for obstacles.
    pub killer_age: f64,
    pub fatal: bool,
    /// Which life was lost, starting at 1.
    pub order_index: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trail {
    pub id: usize,
    pub segment: Segment,
    /// Still alive when it left the horizon box.
    pub censored: bool,
}

impl Trail {
    pub fn length(&self) -> f64 {
        self.segment.length()
    }
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub motorcycles: Vec<Motorcycle>,
    /// Ordered by victim age.
    pub events: Vec<CollisionEvent>,
    /// Indexed like `motorcycles`.
    pub trails: Vec<Trail>,
    pub obstacles: Vec<Obstacle>,
    pub horizon: Rect,
}

impl SimResult {
    pub fn dead_count(&self) -> usize {
        self.trails.iter().filter(|t| !t.censored).count()
    }

    /// Whether `p` lies on some recorded trail, within `tol`.
    pub fn covers(&self, p: Point, tol: f64) -> bool {
        self.trails.iter().any(|t| t.segment.distance_to(p) <= tol)
    }

    pub fn events_of(&self, victim: usize) -> impl Iterator<Item = &CollisionEvent> {
        self.events.iter().filter(move |e| e.victim == victim)
    }

    /// CSV columns: victim_id, killer_kind, killer_id, x, y, victim_age, killer_age, order_index, fatal.
    pub fn write_events_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record([
            "victim_id",
            "killer_kind",
            "killer_id",
            "x",
            "y",
            "victim_age",
            "killer_age",
            "order_index",
            "fatal",
        ])?;
        for e in &self.events {
            let (kind, id) = match e.killer {
                Killer::Motorcycle(j) => ("motorcycle", j),
                Killer::Obstacle { complex_id, .. } => ("obstacle", complex_id),
            };
            wr.write_record([
                e.victim.to_string(),
                kind.to_string(),
                id.to_string(),
                e.location.x.to_string(),
                e.location.y.to_string(),
                e.victim_age.to_string(),
                e.killer_age.to_string(),
                e.order_index.to_string(),
                e.fatal.to_string(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// CSV columns: id, x0, y0, x1, y1, angle, censored.
    pub fn write_trails_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["id", "x0", "y0", "x1", "y1", "angle", "censored"])?;
        for (t, m) in self.trails.iter().zip(&self.motorcycles) {
            wr.write_record([
                t.id.to_string(),
                t.segment.start.x.to_string(),
                t.segment.start.y.to_string(),
                t.segment.end.x.to_string(),
                t.segment.end.y.to_string(),
                m.angle.radians().to_string(),
                t.censored.to_string(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    /// Motorcycles still alive when they leave this box are frozen there.
    pub horizon: Rect,
    /// Path length per candidate-generation chunk; chosen from the origin density when `None`.
    pub chunk: Option<f64>,
}

impl SimOptions {
    pub fn new(horizon: Rect) -> Self {
        SimOptions { horizon, chunk: None }
    }
}

/// Windows for minus-sampling around a core window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimPlan {
    pub core: Rect,
    pub margin: f64,
    /// Sites are sampled here: core ⊕ margin.
    pub sample_window: Rect,
    /// Simulation horizon: core ⊕ 2·margin.
    pub horizon: Rect,
}

impl SimPlan {
    pub fn new(core: Rect, margin: f64) -> Result<Self> {
        if core.is_empty() {
            return Err(Error::EmptyWindow);
        }
        if !(margin >= 0.0 && margin.is_finite()) {
            return Err(Error::InvalidInput(format!("margin must be finite and nonnegative, got {margin}")));
        }
        Ok(SimPlan { core, margin, sample_window: core.expand(margin), horizon: core.expand(2.0 * margin) })
    }

    pub fn options(&self) -> SimOptions {
        SimOptions::new(self.horizon)
    }
}

/// `4·max_φ w*_φ·√k`.
pub fn default_margin(spec: &ModelSpec, k: u32) -> Result<f64> {
    let w = solve_wstar(spec)?;
    Ok(4.0 * w.w.iter().cloned().fold(0.0, f64::max) * (k as f64).sqrt())
}

/// One motorcycle per angle in each site's set, sourced by site index.
pub fn motorcycles_from_sites(sites: &SitePattern, k: u32) -> Vec<Motorcycle> {
    let mut out = Vec::new();
    for (s, site) in sites.sites.iter().enumerate() {
        for &a in &site.angle_set {
            out.push(Motorcycle {
                id: out.len(),
                origin: site.location,
                angle: sites.angles[a],
                lives: k,
                source_id: s,
                weight: 1,
            });
        }
    }
    out
}

pub fn simulate(sites: &SitePattern, k: u32, obstacles: &[Obstacle], opts: SimOptions) -> Result<SimResult> {
    if k < 1 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    simulate_motorcycles(motorcycles_from_sites(sites, k), obstacles.to_vec(), opts)
}

/// Runs the dynamics. Ids are reassigned to positions in `motorcycles`.
pub fn simulate_motorcycles(
    mut motorcycles: Vec<Motorcycle>,
    obstacles: Vec<Obstacle>,
    opts: SimOptions,
) -> Result<SimResult> {
    if motorcycles.iter().any(|m| m.lives < 1) {
        return Err(Error::InvalidInput("every motorcycle needs at least one life".into()));
    }
    if opts.horizon.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if motorcycles.len() >= 2 && obstacles.iter().all(|o| o.segments.is_empty()) {
        let a0 = motorcycles[0].angle;
        if motorcycles.iter().all(|m| m.angle.is_parallel(a0)) {
            return Err(Error::MayNotTerminate("all motorcycles are parallel and there are no obstacles".into()));
        }
    }
    for (i, m) in motorcycles.iter_mut().enumerate() {
        m.id = i;
    }
    let mut engine = Engine::new(&motorcycles, &obstacles, opts);
    engine.run();
    let Engine { events, death, horizon_dist, .. } = engine;
    let trails = motorcycles
        .iter()
        .map(|m| {
            let len = death[m.id].unwrap_or(horizon_dist[m.id]);
            Trail {
                id: m.id,
                segment: Segment::new(m.origin, m.origin + m.angle.vec() * len),
                censored: death[m.id].is_none(),
            }
        })
        .collect();
    Ok(SimResult { motorcycles, events, trails, obstacles, horizon: opts.horizon })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Task {
    Expand { chunk: usize },
    Hit { killer: Killer, killer_age: f64, location: Point },
}

#[derive(Debug, Clone, Copy)]
struct Queued {
    time: f64,
    victim: usize,
    task: Task,
}

impl Queued {
    fn key(&self) -> (u8, usize, u8, usize, usize) {
        match self.task {
            Task::Expand { .. } => (0, self.victim, 0, 0, 0),
            Task::Hit { killer: Killer::Motorcycle(j), .. } => (1, self.victim, 0, j, 0),
            Task::Hit { killer: Killer::Obstacle { complex_id, segment }, .. } => {
                (1, self.victim, 1, complex_id, segment)
            }
        }
    }
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    // reversed so BinaryHeap pops the earliest task
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then_with(|| other.key().cmp(&self.key()))
    }
}

/// Uniform bucket grid over the horizon box.
struct Grid<T> {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<T>>,
}

impl<T: Copy> Grid<T> {
    fn new(area: Rect, cell: f64) -> Self {
        let nx = ((area.width() / cell).ceil() as usize).clamp(1, 4096);
        let ny = ((area.height() / cell).ceil() as usize).clamp(1, 4096);
        let cell = (area.width() / nx as f64).max(area.height() / ny as f64);
        Grid { origin: Point::new(area.xmin, area.ymin), cell, nx, ny, buckets: vec![Vec::new(); nx * ny] }
    }

    fn index_range(&self, lo: f64, hi: f64, base: f64, n: usize) -> (usize, usize) {
        let a = ((lo - base) / self.cell).floor().max(0.0) as usize;
        let b = ((hi - base) / self.cell).floor().max(0.0) as usize;
        (a.min(n - 1), b.min(n - 1))
    }

    fn cells(&self, r: &Rect) -> impl Iterator<Item = usize> + '_ {
        let (x0, x1) = self.index_range(r.xmin, r.xmax, self.origin.x, self.nx);
        let (y0, y1) = self.index_range(r.ymin, r.ymax, self.origin.y, self.ny);
        (y0..=y1).flat_map(move |y| (x0..=x1).map(move |x| y * self.nx + x))
    }

    fn insert(&mut self, r: &Rect, v: T) {
        let ids: Vec<usize> = self.cells(r).collect();
        for c in ids {
            self.buckets[c].push(v);
        }
    }

    fn query<'a>(&'a self, r: &Rect) -> impl Iterator<Item = T> + 'a {
        self.cells(r).flat_map(move |c| self.buckets[c].iter().copied())
    }
}

fn bbox(a: Point, b: Point) -> Rect {
    Rect::new(a.x.min(b.x), a.y.min(b.y), a.x.max(b.x), a.y.max(b.y))
}

struct Engine<'a> {
    bikes: &'a [Motorcycle],
    obstacles: &'a [Obstacle],
    chunk: f64,
    origins: Grid<usize>,
    segments: Grid<(usize, usize)>,
    horizon_dist: Vec<f64>,
    lives: Vec<u32>,
    death: Vec<Option<f64>>,
    queue: BinaryHeap<Queued>,
    events: Vec<CollisionEvent>,
}

impl<'a> Engine<'a> {
    fn new(bikes: &'a [Motorcycle], obstacles: &'a [Obstacle], opts: SimOptions) -> Self {
        let h = opts.horizon;
        let diag = (h.width().powi(2) + h.height().powi(2)).sqrt();
        let chunk = opts
            .chunk
            .filter(|c| *c > 0.0)
            .unwrap_or_else(|| {
                let density = bikes.len().max(1) as f64 / h.area();
                3.0 / density.sqrt()
            })
            .min(diag);
        let mut origins = Grid::new(h, chunk);
        for m in bikes {
            origins.insert(&bbox(m.origin, m.origin), m.id);
        }
        let mut segments = Grid::new(h, chunk);
        for (oi, o) in obstacles.iter().enumerate() {
            for (si, s) in o.segments.iter().enumerate() {
                segments.insert(&bbox(s.start, s.end), (oi, si));
            }
        }
        let horizon_dist = bikes
            .iter()
            .map(|m| {
                let closed = m.origin.x >= h.xmin && m.origin.x <= h.xmax && m.origin.y >= h.ymin && m.origin.y <= h.ymax;
                if closed {
                    h.exit_distance(m.origin, m.angle.vec())
                } else {
                    0.0
                }
            })
            .collect();
        let mut queue = BinaryHeap::with_capacity(bikes.len() * 4);
        for m in bikes {
            queue.push(Queued { time: 0.0, victim: m.id, task: Task::Expand { chunk: 0 } });
        }
        Engine {
            bikes,
            obstacles,
            chunk,
            origins,
            segments,
            horizon_dist,
            lives: bikes.iter().map(|m| m.lives).collect(),
            death: vec![None; bikes.len()],
            queue,
            events: Vec::new(),
        }
    }

    fn run(&mut self) {
        while let Some(q) = self.queue.pop() {
            let i = q.victim;
            if self.death[i].is_some() {
                continue;
            }
            match q.task {
                Task::Expand { chunk } => self.expand(i, chunk),
                Task::Hit { killer, killer_age, location } => {
                    if let Killer::Motorcycle(j) = killer {
                        if self.death[j].is_some_and(|d| d < killer_age) {
                            continue;
                        }
                    }
                    self.lives[i] -= 1;
                    let fatal = self.lives[i] == 0;
                    if fatal {
                        self.death[i] = Some(q.time);
                    }
                    self.events.push(CollisionEvent {
                        victim: i,
                        killer,
                        location,
                        victim_age: q.time,
                        killer_age,
                        fatal,
                        order_index: self.bikes[i].lives - self.lives[i],
                    });
                }
            }
        }
    }

    fn expand(&mut self, i: usize, c: usize) {
        let m = &self.bikes[i];
        let h = self.horizon_dist[i];
        let (t0, t1) = (c as f64 * self.chunk, (c + 1) as f64 * self.chunk);
        if t0 >= h {
            return;
        }
        let d = m.angle.vec();
        let (a, b) = (m.origin + d * t0, m.origin + d * t1.min(h));
        let in_chunk = |t: f64| t >= t0 && t < t1 && t <= h;

        let reach = bbox(a, b).expand(t1);
        for j in self.origins.query(&reach) {
            let o = &self.bikes[j];
            if o.source_id == m.source_id || o.angle.is_parallel(m.angle) {
                continue;
            }
            if let Some((p, ti, tj)) = ray_intersection(m.origin, m.angle, o.origin, o.angle) {
                if in_chunk(ti) && tj < ti - T_EPS && tj <= self.horizon_dist[j] {
                    self.queue.push(Queued {
                        time: ti,
                        victim: i,
                        task: Task::Hit { killer: Killer::Motorcycle(j), killer_age: tj, location: p },
                    });
                }
            }
        }

        let mut hits: Vec<(usize, usize, f64)> = Vec::new();
        for (oi, si) in self.segments.query(&bbox(a, b)) {
            let complex_id = self.obstacles[oi].complex_id;
            if complex_id == m.source_id || hits.iter().any(|&(o, s, _)| o == oi && s == si) {
                continue;
            }
            if let Some((t, _)) = ray_segment_intersection(m.origin, d, &self.obstacles[oi].segments[si]) {
                if in_chunk(t) {
                    hits.push((oi, si, t));
                }
            }
        }
        // a path through a polyline vertex meets two segments of one complex at one point
        hits.sort_by(|x, y| x.0.cmp(&y.0).then(x.2.total_cmp(&y.2)).then(x.1.cmp(&y.1)));
        let mut last: Option<(usize, f64)> = None;
        for (oi, si, t) in hits {
            if last.is_some_and(|(lo, lt)| lo == oi && (t - lt).abs() < 1e-9) {
                continue;
            }
            last = Some((oi, t));
            self.queue.push(Queued {
                time: t,
                victim: i,
                task: Task::Hit {
                    killer: Killer::Obstacle { complex_id: self.obstacles[oi].complex_id, segment: si },
                    killer_age: 0.0,
                    location: m.origin + d * t,
                },
            });
        }

        if t1 < h {
            self.queue.push(Queued { time: t1, victim: i, task: Task::Expand { chunk: c + 1 } });
        }
    }
}

/// Number of motorcycles of other sources whose origin lies in the region
/// `τ_b ∘ T^{y,y}_{φψ}` for their direction `ψ`, with `φ` the direction of `b`.
pub fn count_potential_killers(motorcycles: &[Motorcycle], b: &Motorcycle, y: f64) -> Result<usize> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::InvalidInput(format!("y must be positive, got {y}")));
    }
    let mut n = 0;
    for a in motorcycles {
        if a.source_id == b.source_id || a.angle.approx_eq(b.angle, T_EPS) {
            continue;
        }
        let r = kill_region(b.angle, a.angle, y, y)?;
        if r.contains(a.origin - r.translation_to(b.origin)) {
            n += 1;
        }
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathStats {
    pub mean: f64,
    /// Unbiased sample variance; zero with fewer than two values.
    pub variance: f64,
    pub count: usize,
    /// Motorcycles in the class that were still alive at the horizon.
    pub censored: usize,
}

/// `L^k` statistics over motorcycles of direction `by` whose origin lies in `core`.
pub fn path_length_stats(result: &SimResult, by: Angle, core: &Rect) -> PathStats {
    let mut lengths = Vec::new();
    let mut censored = 0;
    for (m, t) in result.motorcycles.iter().zip(&result.trails) {
        if !m.angle.approx_eq(by, 1e-9) || !core.contains(m.origin) {
            continue;
        }
        if t.censored {
            censored += 1;
        } else {
            lengths.push(t.length());
        }
    }
    let count = lengths.len();
    let mean = if count > 0 { lengths.iter().sum::<f64>() / count as f64 } else { 0.0 };
    let variance = if count > 1 {
        lengths.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (count - 1) as f64
    } else {
        0.0
    };
    PathStats { mean, variance, count, censored }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procs::Site;

    fn two_sites(b: Point) -> SitePattern {
        SitePattern::new(
            Rect::new(-10.0, -10.0, 10.0, 10.0),
            vec![Angle::EAST, Angle::NORTH],
            vec![
                Site { location: Point::ORIGIN, angle_set: vec![0] },
                Site { location: b, angle_set: vec![1] },
            ],
        )
        .unwrap()
    }

    fn opts() -> SimOptions {
        SimOptions::new(Rect::new(-10.0, -10.0, 10.0, 10.0))
    }

    #[test]
    fn tie_does_not_kill() {
        let r = simulate(&two_sites(Point::new(1.0, -1.0)), 1, &[], opts()).unwrap();
        assert!(r.events.is_empty());
        assert!(r.trails.iter().all(|t| t.censored));
    }

    #[test]
    fn earlier_arrival_kills() {
        let r = simulate(&two_sites(Point::new(1.0, -0.5)), 1, &[], opts()).unwrap();
        assert_eq!(r.events.len(), 1);
        let e = &r.events[0];
        assert_eq!((e.victim, e.killer, e.fatal, e.order_index), (0, Killer::Motorcycle(1), true, 1));
        assert!((e.victim_age - 1.0).abs() < 1e-12 && (e.killer_age - 0.5).abs() < 1e-12);
        assert!((r.trails[0].length() - 1.0).abs() < 1e-12);
        assert!(r.trails[1].censored);
        let s = path_length_stats(&r, Angle::EAST, &Rect::new(-5.0, -5.0, 5.0, 5.0));
        assert_eq!((s.count, s.censored), (1, 0));
        assert!((s.mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn survivor_is_censored_in_stats() {
        let r = simulate(&two_sites(Point::new(1.0, -0.5)), 1, &[], opts()).unwrap();
        let s = path_length_stats(&r, Angle::NORTH, &Rect::new(-5.0, -5.0, 5.0, 5.0));
        assert_eq!((s.count, s.censored), (0, 1));
    }

    #[test]
    fn parallel_input_and_zero_lives_rejected() {
        let p = SitePattern::new(
            Rect::square(1.0),
            vec![Angle::EAST],
            vec![
                Site { location: Point::new(0.1, 0.1), angle_set: vec![0] },
                Site { location: Point::new(0.1, 0.5), angle_set: vec![0] },
            ],
        )
        .unwrap();
        assert!(matches!(simulate(&p, 1, &[], opts()), Err(Error::MayNotTerminate(_))));
        assert!(simulate(&two_sites(Point::new(1.0, -0.5)), 0, &[], opts()).is_err());
    }

    #[test]
    fn obstacle_kills_unless_same_complex() {
        let bike = Motorcycle { id: 0, origin: Point::ORIGIN, angle: Angle::EAST, lives: 1, source_id: 7, weight: 1 };
        let wall = |id| Obstacle {
            complex_id: id,
            segments: vec![
                Segment::new(Point::new(2.0, -1.0), Point::new(2.0, 0.0)),
                Segment::new(Point::new(2.0, 0.0), Point::new(2.0, 1.0)),
            ],
        };
        let r = simulate_motorcycles(vec![bike.clone()], vec![wall(3)], opts()).unwrap();
        assert_eq!(r.events.len(), 1);
        assert!((r.trails[0].length() - 2.0).abs() < 1e-12);
        assert_eq!(r.events[0].killer_age, 0.0);
        let r = simulate_motorcycles(vec![bike], vec![wall(7)], opts()).unwrap();
        assert!(r.events.is_empty() && r.trails[0].censored);
    }

    #[test]
    fn potential_killers_basic() {
        let b = Motorcycle { id: 0, origin: Point::ORIGIN, angle: Angle::EAST, lives: 1, source_id: 0, weight: 1 };
        assert_eq!(count_potential_killers(&[], &b, 1.0).unwrap(), 0);
        let a = Motorcycle { origin: Point::new(0.5, -0.25), angle: Angle::NORTH, source_id: 1, id: 1, ..b.clone() };
        assert_eq!(count_potential_killers(&[a.clone()], &b, 1.0).unwrap(), 1);
        let far = Motorcycle { origin: Point::new(0.5, -0.75), ..a };
        assert_eq!(count_potential_killers(&[far], &b, 1.0).unwrap(), 0);
    }
}
