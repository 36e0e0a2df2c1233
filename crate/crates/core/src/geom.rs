//! Planar primitives and the kill regions `T^{w_φ,w_ψ}_{φψ}`.
//!
//! A kill region collects the start positions from which a ψ-motorcycle
//! that travels at most `w_ψ` crosses the first `w_φ` of a φ-motorcycle's
//! path before the φ-motorcycle gets there. Coordinates are relative to
//! the region's own frame; [`KillRegion::translated_to`] moves the vertex
//! `−w_φ·vec(φ)` onto a motorcycle origin.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Absolute tolerance on coordinates.
pub const EPS: f64 = 1e-9;

/// Ray parameters at or below this are treated as the ray origin.
pub const T_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-d cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Mul<Point> for f64 {
    type Output = Point;
    fn mul(self, p: Point) -> Point {
        p * self
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Direction in radians, canonicalized to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Angle(f64);

impl Angle {
    pub const EAST: Angle = Angle(0.0);
    pub const NORTH: Angle = Angle(PI / 2.0);
    pub const WEST: Angle = Angle(PI);
    pub const SOUTH: Angle = Angle(3.0 * PI / 2.0);
    pub const SOUTHWEST: Angle = Angle(5.0 * PI / 4.0);

    pub fn new(radians: f64) -> Self {
        let r = radians.rem_euclid(TAU);
        // rem_euclid can round up to exactly 2π for tiny negative inputs
        Angle(if r >= TAU { 0.0 } else { r })
    }

    pub fn from_degrees(deg: f64) -> Self {
        Angle::new(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    /// Unit vector `vec(φ)`.
    pub fn vec(self) -> Point {
        let (s, c) = self.0.sin_cos();
        Point::new(c, s)
    }

    /// `φ^⊥ = φ + π/2`.
    pub fn perp(self) -> Angle {
        Angle::new(self.0 + PI / 2.0)
    }

    pub fn opposite(self) -> Angle {
        Angle::new(self.0 + PI)
    }

    /// Orientation of the undirected line, in `[0, π)`.
    pub fn orientation(self) -> Angle {
        let r = self.0.rem_euclid(PI);
        Angle(if r >= PI - T_EPS { 0.0 } else { r })
    }

    /// Equality modulo 2π within `tol` radians.
    pub fn approx_eq(self, other: Angle, tol: f64) -> bool {
        let d = (self.0 - other.0).abs();
        d <= tol || (TAU - d) <= tol
    }

    pub fn is_parallel(self, other: Angle) -> bool {
        (self.0 - other.0).sin().abs() <= T_EPS
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: Point,
    pub end: Point,
}

impl Segment {
    pub fn new(start: Point, end: Point) -> Self {
        Segment { start, end }
    }

    pub fn length(&self) -> f64 {
        self.start.dist(self.end)
    }

    pub fn is_degenerate(&self) -> bool {
        self.length() <= EPS
    }

    pub fn midpoint(&self) -> Point {
        (self.start + self.end) * 0.5
    }

    pub fn direction(&self) -> Point {
        let d = self.end - self.start;
        d * (1.0 / d.norm())
    }

    /// Distance from `p` to the closed segment.
    pub fn distance_to(&self, p: Point) -> f64 {
        let d = self.end - self.start;
        let len2 = d.dot(d);
        if len2 == 0.0 {
            return p.dist(self.start);
        }
        let t = ((p - self.start).dot(d) / len2).clamp(0.0, 1.0);
        p.dist(self.start + d * t)
    }
}

/// Axis-aligned rectangle `[xmin, xmax] × [ymin, ymax]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Self {
        Rect { xmin, ymin, xmax, ymax }
    }

    /// `[0, side]²`.
    pub fn square(side: f64) -> Self {
        Rect::new(0.0, 0.0, side, side)
    }

    /// Rectangle with the given half extents around `c`.
    pub fn centered(c: Point, half_width: f64, half_height: f64) -> Self {
        Rect::new(c.x - half_width, c.y - half_height, c.x + half_width, c.y + half_height)
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width().max(0.0) * self.height().max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        !(self.width() > 0.0 && self.height() > 0.0)
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))
    }

    /// Minkowski sum with the square `[-m, m]²`.
    pub fn expand(&self, m: f64) -> Rect {
        Rect::new(self.xmin - m, self.ymin - m, self.xmax + m, self.ymax + m)
    }

    /// Half-open containment `[xmin, xmax) × [ymin, ymax)`, so tiled windows count each point once.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.xmin && p.x < self.xmax && p.y >= self.ymin && p.y < self.ymax
    }

    pub fn contains_rect(&self, o: &Rect) -> bool {
        o.xmin >= self.xmin && o.xmax <= self.xmax && o.ymin >= self.ymin && o.ymax <= self.ymax
    }

    /// Corners in counter-clockwise order.
    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.xmin, self.ymin),
            Point::new(self.xmax, self.ymin),
            Point::new(self.xmax, self.ymax),
            Point::new(self.xmin, self.ymax),
        ]
    }

    /// Distance travelled from `o` (inside) along `dir` before leaving the rectangle.
    pub fn exit_distance(&self, o: Point, dir: Point) -> f64 {
        let mut t = f64::INFINITY;
        if dir.x > 0.0 {
            t = t.min((self.xmax - o.x) / dir.x);
        } else if dir.x < 0.0 {
            t = t.min((self.xmin - o.x) / dir.x);
        }
        if dir.y > 0.0 {
            t = t.min((self.ymax - o.y) / dir.y);
        } else if dir.y < 0.0 {
            t = t.min((self.ymin - o.y) / dir.y);
        }
        t.max(0.0)
    }

    /// Parameter interval `[t0, t1]` of the line `o + t·dir` inside the closed rectangle.
    pub fn clip_line(&self, o: Point, dir: Point) -> Option<(f64, f64)> {
        let mut t0 = f64::NEG_INFINITY;
        let mut t1 = f64::INFINITY;
        for (p, d, lo, hi) in [
            (o.x, dir.x, self.xmin, self.xmax),
            (o.y, dir.y, self.ymin, self.ymax),
        ] {
            if d.abs() < 1e-300 {
                if p < lo || p > hi {
                    return None;
                }
            } else {
                let (a, b) = ((lo - p) / d, (hi - p) / d);
                t0 = t0.max(a.min(b));
                t1 = t1.min(a.max(b));
            }
        }
        (t0 < t1).then_some((t0, t1))
    }

    /// Whether the closed segment meets the closed rectangle.
    pub fn intersects_segment(&self, s: &Segment) -> bool {
        let d = s.end - s.start;
        match self.clip_line(s.start, d) {
            Some((t0, t1)) => t1 >= 0.0 && t0 <= 1.0,
            None => false,
        }
    }
}

/// Infinite line `{p : ⟨p, vec(φ^⊥)⟩ = offset}` with direction `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub direction: Angle,
    pub offset: f64,
}

impl Line {
    pub fn new(direction: Angle, offset: f64) -> Self {
        Line { direction, offset }
    }

    /// Point of the line closest to the origin.
    pub fn foot(&self) -> Point {
        self.direction.perp().vec() * self.offset
    }

    pub fn clip(&self, r: &Rect) -> Option<Segment> {
        let (o, d) = (self.foot(), self.direction.vec());
        r.clip_line(o, d).map(|(t0, t1)| Segment::new(o + d * t0, o + d * t1))
    }

    /// Intersection point of two non-parallel lines.
    pub fn intersect(&self, other: &Line) -> Option<Point> {
        let (d1, d2) = (self.direction.vec(), other.direction.vec());
        let den = d1.cross(d2);
        if den.abs() <= T_EPS {
            return None;
        }
        let (p1, p2) = (self.foot(), other.foot());
        let t = (p2 - p1).cross(d2) / den;
        Some(p1 + d1 * t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    Triangle,
    Trapezium,
}

/// The polygon `T^{w_φ,w_ψ}_{φψ}`, vertices in cyclic order starting at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct KillRegion {
    pub kind: RegionKind,
    pub vertices: Vec<Point>,
    pub w_phi: f64,
    pub w_psi: f64,
    pub phi: Angle,
    pub psi: Angle,
}

pub fn kill_region(phi: Angle, psi: Angle, w_phi: f64, w_psi: f64) -> Result<KillRegion> {
    if phi.approx_eq(psi, T_EPS) {
        return Err(Error::IdenticalAngles(phi.radians()));
    }
    if !(w_phi >= 0.0 && w_psi >= 0.0) || !w_phi.is_finite() || !w_psi.is_finite() {
        return Err(Error::InvalidInput(format!(
            "region widths must be finite and nonnegative, got ({w_phi}, {w_psi})"
        )));
    }
    let (vp, vq) = (phi.vec(), psi.vec());
    let (kind, vertices) = if w_psi >= w_phi {
        (RegionKind::Triangle, vec![Point::ORIGIN, -w_phi * vp, -w_phi * vq])
    } else {
        let corner = (w_psi - w_phi) * vp - w_psi * vq;
        (RegionKind::Trapezium, vec![Point::ORIGIN, -w_phi * vp, corner, -w_psi * vq])
    };
    Ok(KillRegion { kind, vertices, w_phi, w_psi, phi, psi })
}

impl KillRegion {
    /// Closed-form area.
    pub fn area(&self) -> f64 {
        let s = (self.psi.radians() - self.phi.radians()).sin().abs() / 2.0;
        match self.kind {
            RegionKind::Triangle => s * self.w_phi * self.w_phi,
            RegionKind::Trapezium => s * (2.0 * self.w_phi * self.w_psi - self.w_psi * self.w_psi),
        }
    }

    /// Offset that places vertex `−w_φ·vec(φ)` at `b`.
    pub fn translation_to(&self, b: Point) -> Point {
        b + self.w_phi * self.phi.vec()
    }

    pub fn translated_to(&self, b: Point) -> Vec<Point> {
        let t = self.translation_to(b);
        self.vertices.iter().map(|&v| v + t).collect()
    }

    /// Interior membership; regions of zero area contain nothing.
    pub fn contains(&self, p: Point) -> bool {
        if self.area() <= 1e-15 {
            return false;
        }
        convex_contains(&self.vertices, p)
    }
}

pub fn region_area(r: &KillRegion) -> f64 {
    r.area()
}

/// Signed shoelace area; positive for counter-clockwise loops.
pub fn signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        s += pts[i].cross(pts[(i + 1) % n]);
    }
    0.5 * s
}

pub fn shoelace_area(pts: &[Point]) -> Result<f64> {
    if pts.len() < 3 {
        return Err(Error::TooFewPoints(pts.len()));
    }
    Ok(signed_area(pts).abs())
}

/// Area centroid of a simple polygon; falls back to the vertex mean when the area vanishes.
pub fn polygon_centroid(pts: &[Point]) -> Point {
    let a = signed_area(pts);
    let n = pts.len();
    if a.abs() < 1e-14 {
        let s = pts.iter().fold(Point::ORIGIN, |acc, &p| acc + p);
        return s * (1.0 / n.max(1) as f64);
    }
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let (p, q) = (pts[i], pts[(i + 1) % n]);
        let c = p.cross(q);
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    Point::new(cx / (6.0 * a), cy / (6.0 * a))
}

/// Strict interior test for a convex polygon of either orientation.
pub fn convex_contains(poly: &[Point], p: Point) -> bool {
    let sign = signed_area(poly).signum();
    let n = poly.len();
    (0..n).all(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        sign * (b - a).cross(p - a) > 0.0
    })
}

/// Crossing of the open rays `o_i + t·vec(φ_i)`, `t > 0`, as `(point, t1, t2)`.
pub fn ray_intersection(o1: Point, phi1: Angle, o2: Point, phi2: Angle) -> Option<(Point, f64, f64)> {
    let (d1, d2) = (phi1.vec(), phi2.vec());
    let den = d1.cross(d2);
    if den.abs() <= T_EPS {
        return None;
    }
    let w = o2 - o1;
    let t1 = w.cross(d2) / den;
    let t2 = w.cross(d1) / den;
    if t1 <= T_EPS || t2 <= T_EPS {
        return None;
    }
    Some((o1 + d1 * t1, t1, t2))
}

/// Crossing of the ray `o + t·d` (`t > 0`, `d` unit) with a closed segment, as `(t, s)`
/// where `s ∈ [0, 1]` is the parameter along the segment.
pub fn ray_segment_intersection(o: Point, d: Point, seg: &Segment) -> Option<(f64, f64)> {
    let e = seg.end - seg.start;
    let den = d.cross(e);
    if den.abs() <= T_EPS * e.norm().max(1.0) {
        return None;
    }
    let w = seg.start - o;
    let t = w.cross(e) / den;
    let s = w.cross(d) / den;
    (t > T_EPS && (0.0..=1.0).contains(&s)).then_some((t, s))
}
