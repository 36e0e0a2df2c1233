//! Min-plus plane curves and the germ-grain ensemble built from them.
//!
//! A polynomial `min(c_ij + i·x + j·y)` is lifted to the points
//! `(i, j, c_ij)`; the lower hull projects to a subdivision of its Newton
//! polygon whose cells are dual to curve vertices, interior edges to
//! bounded edges and boundary edges to arms. A cell with plane
//! `c = γ + a·i + b·j` sits at the curve vertex `(−a, −b)`, where all of
//! the cell's monomials attain the minimum `γ`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geom::{Angle, Point, Rect, Segment};
use crate::motorsim::{Motorcycle, Obstacle};
use crate::procs::{poisson, stream_rng};

/// Relative tolerance for ties between monomials and for coplanar lifts.
pub const TIE_TOL: f64 = 1e-9;

pub type Exponent = (u32, u32);

#[derive(Debug, Clone, PartialEq)]
pub struct TropPoly {
    coeffs: BTreeMap<Exponent, f64>,
}

impl TropPoly {
    pub fn new(terms: impl IntoIterator<Item = (Exponent, f64)>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (e, c) in terms {
            if !c.is_finite() {
                return Err(Error::InvalidInput(format!("coefficient of {e:?} must be finite")));
            }
            if coeffs.insert(e, c).is_some() {
                return Err(Error::InvalidInput(format!("monomial {e:?} given twice")));
            }
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("polynomial needs at least one monomial".into()));
        }
        Ok(TropPoly { coeffs })
    }

    /// `x ⊕ y ⊕ 0`.
    pub fn tropical_line() -> Self {
        TropPoly::new([((0, 0), 0.0), ((1, 0), 0.0), ((0, 1), 0.0)]).expect("valid")
    }

    pub fn coeffs(&self) -> &BTreeMap<Exponent, f64> {
        &self.coeffs
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    /// Newton polygon equals `conv{(0,0), (d,0), (0,d)}`.
    pub fn is_standard(&self) -> bool {
        let d = self.degree();
        d >= 1 && [(0, 0), (d, 0), (0, d)].iter().all(|e| self.coeffs.contains_key(e))
    }

    /// Largest difference between two coefficients.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self.coeffs.values().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &c| (l.min(c), h.max(c)));
        hi - lo
    }

    /// `c_ij ← c_ij + i·u + j·v`, whose curve is the original translated by `(−u, −v)`.
    pub fn rescaled(&self, u: f64, v: f64) -> Self {
        TropPoly { coeffs: self.coeffs.iter().map(|(&(i, j), &c)| ((i, j), c + i as f64 * u + j as f64 * v)).collect() }
    }

    /// Minimum value and the monomials attaining it within the tie tolerance.
    pub fn eval(&self, x: f64, y: f64) -> (f64, Vec<Exponent>) {
        let vals: Vec<(Exponent, f64)> =
            self.coeffs.iter().map(|(&(i, j), &c)| ((i, j), c + i as f64 * x + j as f64 * y)).collect();
        let min = vals.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        let tol = TIE_TOL * (1.0 + min.abs());
        (min, vals.into_iter().filter(|v| v.1 - min <= tol).map(|v| v.0).collect())
    }

    pub fn is_zero(&self, x: f64, y: f64) -> bool {
        self.eval(x, y).1.len() >= 2
    }

    /// One monomial per line as `i j c`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::InvalidInput(format!("line {}: expected `i j c`, got `{line}`", n + 1));
            if f.len() != 3 {
                return Err(bad());
            }
            let i = f[0].parse().map_err(|_| bad())?;
            let j = f[1].parse().map_err(|_| bad())?;
            let c = f[2].parse().map_err(|_| bad())?;
            terms.push(((i, j), c));
        }
        TropPoly::new(terms)
    }

    pub fn to_text(&self) -> String {
        self.coeffs.iter().map(|(&(i, j), c)| format!("{i} {j} {c}\n")).collect()
    }
}

/// A cell of the regular subdivision with the plane `c = γ + a·i + b·j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    /// Polygon corners in counter-clockwise order.
    pub corners: Vec<Exponent>,
    pub plane: (f64, f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subdivision {
    pub cells: Vec<Cell>,
}

impl Subdivision {
    /// Lattice points that are corners of some cell.
    pub fn vertices(&self) -> Vec<Exponent> {
        let mut v: Vec<Exponent> = self.cells.iter().flat_map(|c| c.corners.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Edges as sorted corner pairs, with the cells on either side.
    pub fn edges(&self) -> Vec<((Exponent, Exponent), Vec<usize>)> {
        let mut map: BTreeMap<(Exponent, Exponent), Vec<usize>> = BTreeMap::new();
        for (ci, c) in self.cells.iter().enumerate() {
            let n = c.corners.len();
            for k in 0..n {
                let (p, q) = (c.corners[k], c.corners[(k + 1) % n]);
                map.entry(if p < q { (p, q) } else { (q, p) }).or_default().push(ci);
            }
        }
        map.into_iter().collect()
    }
}

fn lattice_cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn hull(points: &[Exponent]) -> Vec<Exponent> {
    let mut p = points.to_vec();
    p.sort_unstable();
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let f = |e: Exponent| (e.0 as f64, e.1 as f64);
    let mut lower: Vec<Exponent> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && lattice_cross(f(lower[lower.len() - 2]), f(lower[lower.len() - 1]), f(q)) <= 0.0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<Exponent> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && lattice_cross(f(upper[upper.len() - 2]), f(upper[upper.len() - 1]), f(q)) <= 0.0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Projection of the lower hull of the lifted support.
///
/// Lifted points lying on a common lower facet form one cell (the convex
/// hull of their projections), so coplanar lifts give a coarser cell
/// rather than an arbitrary triangulation.
pub fn regular_subdivision(f: &TropPoly) -> Result<Subdivision> {
    let pts: Vec<(Exponent, f64)> = f.coeffs.iter().map(|(&e, &c)| (e, c)).collect();
    let scale = 1.0 + pts.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    let tol = TIE_TOL * scale;
    let mut cells: Vec<Cell> = Vec::new();
    let n = pts.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let (p, q, r) = (pts[a], pts[b], pts[c]);
                let (pi, pj) = (p.0 .0 as f64, p.0 .1 as f64);
                let (u, v) = ((q.0 .0 as f64 - pi, q.0 .1 as f64 - pj), (r.0 .0 as f64 - pi, r.0 .1 as f64 - pj));
                let det = u.0 * v.1 - u.1 * v.0;
                if det == 0.0 {
                    continue;
                }
                let (dq, dr) = (q.1 - p.1, r.1 - p.1);
                let sa = (dq * v.1 - dr * u.1) / det;
                let sb = (u.0 * dr - v.0 * dq) / det;
                let g = p.1 - sa * pi - sb * pj;
                let height = |e: Exponent| g + sa * e.0 as f64 + sb * e.1 as f64;
                if pts.iter().any(|&(e, cc)| cc < height(e) - tol) {
                    continue;
                }
                if cells.iter().any(|cell| (cell.plane.1 - sa).abs() < 1e-7 && (cell.plane.2 - sb).abs() < 1e-7) {
                    continue;
                }
                let on: Vec<Exponent> = pts.iter().filter(|&&(e, cc)| (cc - height(e)).abs() <= tol).map(|p| p.0).collect();
                cells.push(Cell { corners: hull(&on), plane: (g, sa, sb) });
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::InvalidInput("support is collinear; the curve has no vertices".into()));
    }
    cells.sort_by(|x, y| x.corners.cmp(&y.corners));
    Ok(Subdivision { cells })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundedEdge {
    pub a: usize,
    pub b: usize,
    pub multiplicity: u32,
    /// The dual subdivision edge.
    pub dual: (Exponent, Exponent),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arm {
    pub apex: Point,
    pub direction: Angle,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TropCurve {
    pub degree: u32,
    /// One per subdivision cell, in cell order.
    pub vertices: Vec<Point>,
    pub edges: Vec<BoundedEdge>,
    pub arms: Vec<Arm>,
    pub subdivision: Subdivision,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lattice_length(p: Exponent, q: Exponent) -> u32 {
    gcd(p.0.abs_diff(q.0), p.1.abs_diff(q.1))
}

/// Tropical curve of a standard polynomial.
pub fn curve(f: &TropPoly) -> Result<TropCurve> {
    if !f.is_standard() {
        return Err(Error::InvalidInput("curve needs a standard polynomial of degree at least 1".into()));
    }
    let d = f.degree();
    let subdivision = regular_subdivision(f)?;
    let vertices: Vec<Point> = subdivision.cells.iter().map(|c| Point::new(-c.plane.1, -c.plane.2)).collect();
    let mut edges = Vec::new();
    let mut arms = Vec::new();
    for ((p, q), cells) in subdivision.edges() {
        let m = lattice_length(p, q);
        match cells.as_slice() {
            [a, b] => edges.push(BoundedEdge { a: *a, b: *b, multiplicity: m, dual: (p, q) }),
            [a] => {
                let direction = if p.0 == 0 && q.0 == 0 {
                    Angle::EAST
                } else if p.1 == 0 && q.1 == 0 {
                    Angle::NORTH
                } else if p.0 + p.1 == d && q.0 + q.1 == d {
                    Angle::SOUTHWEST
                } else {
                    return Err(Error::InvalidInput(format!("boundary edge {p:?}-{q:?} is not on the standard triangle")));
                };
                arms.push(Arm { apex: vertices[*a], direction, multiplicity: m });
            }
            _ => return Err(Error::InvalidInput(format!("edge {p:?}-{q:?} is shared by {} cells", cells.len()))),
        }
    }
    Ok(TropCurve { degree: d, vertices, edges, arms, subdivision })
}

impl TropCurve {
    pub fn body_segments(&self) -> Vec<Segment> {
        self.edges.iter().map(|e| Segment::new(self.vertices[e.a], self.vertices[e.b])).collect()
    }

    pub fn translated(&self, t: Point) -> TropCurve {
        let mut c = self.clone();
        for v in &mut c.vertices {
            *v = *v + t;
        }
        for a in &mut c.arms {
            a.apex = a.apex + t;
        }
        c
    }

    /// Arm multiplicities summed per direction (east, north, southwest).
    pub fn arm_census(&self) -> [u32; 3] {
        let mut out = [0; 3];
        for a in &self.arms {
            out[direction_index(a.direction)] += a.multiplicity;
        }
        out
    }

    /// Self-contained SVG: body bold, arms thin, multiplicities above 1 as labels.
    pub fn to_svg(&self, view: &Rect) -> String {
        let scale = 600.0 / view.width().max(view.height());
        let tx = |p: Point| ((p.x - view.xmin) * scale, (view.ymax - p.y) * scale);
        let reach = 2.0 * (view.width() + view.height());
        let mut s = format!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#,
            w = view.width() * scale,
            h = view.height() * scale
        );
        s.push('\n');
        s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        let label = |s: &mut String, p: Point, m: u32| {
            if m > 1 {
                let (x, y) = tx(p);
                let _ = writeln!(s, r#"<text x="{x:.1}" y="{y:.1}" font-size="12" fill="red">{m}</text>"#);
            }
        };
        for e in &self.edges {
            let (a, b) = (self.vertices[e.a], self.vertices[e.b]);
            let ((x0, y0), (x1, y1)) = (tx(a), tx(b));
            let _ = writeln!(s, r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x1:.1}" y2="{y1:.1}" stroke="black" stroke-width="3"/>"#);
            label(&mut s, (a + b) * 0.5, e.multiplicity);
        }
        for a in &self.arms {
            let end = a.apex + a.direction.vec() * reach;
            let ((x0, y0), (x1, y1)) = (tx(a.apex), tx(end));
            let _ = writeln!(s, r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x1:.1}" y2="{y1:.1}" stroke="black" stroke-width="1"/>"#);
            label(&mut s, a.apex + a.direction.vec() * (0.1 * view.width()), a.multiplicity);
        }
        s.push_str("</svg>\n");
        s
    }
}

fn direction_index(a: Angle) -> usize {
    if a.approx_eq(Angle::EAST, 1e-9) {
        0
    } else if a.approx_eq(Angle::NORTH, 1e-9) {
        1
    } else {
        2
    }
}

/// Radius of the smallest disc containing the body.
pub fn body_radius(c: &TropCurve) -> f64 {
    min_enclosing_circle(&c.vertices).1
}

fn circle_two(a: Point, b: Point) -> (Point, f64) {
    let m = (a + b) * 0.5;
    (m, a.dist(m))
}

fn circle_three(a: Point, b: Point, c: Point) -> Option<(Point, f64)> {
    let (bx, by, cx, cy) = (b.x - a.x, b.y - a.y, c.x - a.x, c.y - a.y);
    let d = 2.0 * (bx * cy - by * cx);
    if d.abs() < 1e-300 {
        return None;
    }
    let (b2, c2) = (bx * bx + by * by, cx * cx + cy * cy);
    let o = Point::new(a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d);
    Some((o, o.dist(a)))
}

/// Incremental minimal enclosing circle; exact up to rounding.
pub fn min_enclosing_circle(pts: &[Point]) -> (Point, f64) {
    let inside = |c: &(Point, f64), p: Point| p.dist(c.0) <= c.1 * (1.0 + 1e-12) + 1e-12;
    let Some(&first) = pts.first() else {
        return (Point::ORIGIN, 0.0);
    };
    let mut c = (first, 0.0);
    for i in 1..pts.len() {
        if inside(&c, pts[i]) {
            continue;
        }
        c = (pts[i], 0.0);
        for j in 0..i {
            if inside(&c, pts[j]) {
                continue;
            }
            c = circle_two(pts[i], pts[j]);
            for k in 0..j {
                if !inside(&c, pts[k]) {
                    c = circle_three(pts[i], pts[j], pts[k]).unwrap_or_else(|| {
                        // collinear: the farthest pair spans the circle
                        [circle_two(pts[i], pts[k]), circle_two(pts[j], pts[k])]
                            .into_iter()
                            .fold(c, |best, x| if x.1 > best.1 { x } else { best })
                    });
                }
            }
        }
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentroidKind {
    /// Apex of the east arm with the smallest `y`, then smallest `x`.
    MinYEastApex,
    /// Apex of the north arm with the smallest `x`, then smallest `y`.
    MinXNorthApex,
    /// Length-weighted centre of the body; the vertex mean when it has no edges.
    MassCenter,
}

pub fn centroid(c: &TropCurve, kind: CentroidKind) -> Point {
    let pick = |dir: Angle, key: fn(&Point) -> (f64, f64)| {
        c.arms
            .iter()
            .filter(|a| a.direction.approx_eq(dir, 1e-9))
            .map(|a| a.apex)
            .min_by(|p, q| {
                let (kp, kq) = (key(p), key(q));
                kp.0.total_cmp(&kq.0).then(kp.1.total_cmp(&kq.1))
            })
            .unwrap_or(Point::ORIGIN)
    };
    match kind {
        CentroidKind::MinYEastApex => pick(Angle::EAST, |p| (p.y, p.x)),
        CentroidKind::MinXNorthApex => pick(Angle::NORTH, |p| (p.x, p.y)),
        CentroidKind::MassCenter => {
            let segs = c.body_segments();
            let total: f64 = segs.iter().map(|s| s.length()).sum();
            if total > 0.0 {
                segs.iter().fold(Point::ORIGIN, |acc, s| acc + s.midpoint() * (s.length() / total))
            } else {
                let n = c.vertices.len() as f64;
                c.vertices.iter().fold(Point::ORIGIN, |acc, &v| acc + v * (1.0 / n))
            }
        }
    }
}

/// A facet of a curve as a parametrised piece `start + t·dir`, `t ∈ [0, len]`.
struct Facet {
    start: Point,
    dir: Point,
    len: f64,
    primitive: (i64, i64),
    multiplicity: u32,
}

fn facets(c: &TropCurve, shift: Point) -> Vec<Facet> {
    let mut out = Vec::new();
    for e in &c.edges {
        let (a, b) = (c.vertices[e.a] + shift, c.vertices[e.b] + shift);
        let ((p0, p1), (q0, q1)) = ((e.dual.0 .0 as i64, e.dual.0 .1 as i64), (e.dual.1 .0 as i64, e.dual.1 .1 as i64));
        let g = gcd((q0 - p0).unsigned_abs() as u32, (q1 - p1).unsigned_abs() as u32) as i64;
        // curve edges are normal to their dual edges
        let primitive = (-(q1 - p1) / g, (q0 - p0) / g);
        let len = a.dist(b);
        if len > 0.0 {
            out.push(Facet { start: a, dir: (b - a) * (1.0 / len), len, primitive, multiplicity: e.multiplicity });
        }
    }
    for a in &c.arms {
        let primitive = match direction_index(a.direction) {
            0 => (1, 0),
            1 => (0, 1),
            _ => (-1, -1),
        };
        out.push(Facet {
            start: a.apex + shift,
            dir: a.direction.vec(),
            len: f64::INFINITY,
            primitive,
            multiplicity: a.multiplicity,
        });
    }
    out
}

/// Intersection points of `c1` and a generically shifted `c2`, with
/// multiplicity `m₁·m₂·|det(u₁, u₂)|` for primitive facet directions `u`.
pub fn stable_intersection(c1: &TropCurve, c2: &TropCurve, seed: u64) -> Result<Vec<(Point, u32)>> {
    let mut rng = stream_rng(seed, 0x5ab1e);
    let magnitude = 1e-6 * (1.0 + body_radius(c1).max(body_radius(c2)));
    const ATTEMPTS: usize = 3;
    'draw: for _ in 0..=ATTEMPTS {
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        let shift = Point::new(theta.cos(), theta.sin()) * (magnitude * (0.5 + rng.random::<f64>()));
        let (f1, f2) = (facets(c1, Point::ORIGIN), facets(c2, shift));
        let mut out = Vec::new();
        for a in &f1 {
            for b in &f2 {
                let den = a.dir.cross(b.dir);
                let w = b.start - a.start;
                if den.abs() < 1e-12 {
                    // parallel facets must not overlap
                    if w.cross(a.dir).abs() < 1e-12 {
                        let (s0, s1) = (w.dot(a.dir), w.dot(a.dir) + b.len * b.dir.dot(a.dir));
                        let (lo, hi) = (s0.min(s1), s0.max(s1));
                        if hi >= -1e-12 && lo <= a.len + 1e-12 {
                            continue 'draw;
                        }
                    }
                    continue;
                }
                let s = w.cross(b.dir) / den;
                let t = w.cross(a.dir) / den;
                let eps = 1e-12 * (1.0 + magnitude);
                let near_end = |x: f64, len: f64| x.abs() <= eps || (len.is_finite() && (x - len).abs() <= eps);
                if s < -eps || t < -eps || s > a.len + eps || t > b.len + eps {
                    continue;
                }
                if near_end(s, a.len) || near_end(t, b.len) {
                    continue 'draw;
                }
                let det = (a.primitive.0 * b.primitive.1 - a.primitive.1 * b.primitive.0).unsigned_abs() as u32;
                out.push((a.start + a.dir * s, a.multiplicity * b.multiplicity * det));
            }
        }
        return Ok(out);
    }
    Err(Error::Degenerate(ATTEMPTS))
}

/// Law of the random curve attached to each germ.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveLaw {
    /// Degree uniform on `degrees`; every monomial of degree at most `d` present
    /// with an independent uniform `[0, spread]` coefficient.
    Random { degrees: Vec<u32>, spread: f64 },
    /// The same polynomial at every germ; its spread must not exceed `bound`.
    Fixed { poly: TropPoly, bound: f64 },
}

impl CurveLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            CurveLaw::Random { degrees, spread } => {
                if degrees.is_empty() || degrees.contains(&0) || !(*spread >= 0.0 && spread.is_finite()) {
                    return Err(Error::InvalidInput("random curve law needs positive degrees and a finite spread".into()));
                }
            }
            CurveLaw::Fixed { poly, bound } => {
                if !poly.is_standard() {
                    return Err(Error::InvalidInput("fixed curve law needs a standard polynomial".into()));
                }
                if !(poly.spread() <= *bound) {
                    return Err(Error::InvalidInput(format!(
                        "coefficient spread {} exceeds the bound {bound}",
                        poly.spread()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Coefficient spread bound `C`.
    pub fn spread_bound(&self) -> f64 {
        match self {
            CurveLaw::Random { spread, .. } => *spread,
            CurveLaw::Fixed { bound, .. } => *bound,
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> TropPoly {
        match self {
            CurveLaw::Random { degrees, spread } => {
                let d = degrees[rng.random_range(0..degrees.len())];
                random_standard(d, *spread, rng)
            }
            CurveLaw::Fixed { poly, .. } => poly.clone(),
        }
    }
}

/// Full-support polynomial of degree `d` with i.i.d. uniform `[0, spread]` coefficients.
pub fn random_standard<R: Rng>(d: u32, spread: f64, rng: &mut R) -> TropPoly {
    let mut terms = Vec::new();
    for i in 0..=d {
        for j in 0..=d - i {
            terms.push(((i, j), rng.random::<f64>() * spread));
        }
    }
    TropPoly::new(terms).expect("nonempty finite support")
}

#[derive(Debug, Clone)]
pub struct GermGrain {
    pub germs: Vec<Point>,
    /// Curves already placed with their centroid at the germ.
    pub curves: Vec<TropCurve>,
    /// One per germ, with `complex_id` the germ index; point bodies have no segments.
    pub obstacles: Vec<Obstacle>,
    pub motorcycles: Vec<Motorcycle>,
}

/// Poisson germs on `window`, each carrying an independent curve whose
/// body becomes an obstacle and whose arms become motorcycles with `k` lives.
pub fn germ_grain(law: &CurveLaw, lambda: f64, window: &Rect, k: u32, kind: CentroidKind, seed: u64) -> Result<GermGrain> {
    law.validate()?;
    if !(lambda >= 0.0 && lambda.is_finite()) || k < 1 {
        return Err(Error::InvalidInput("need lambda >= 0 and k >= 1".into()));
    }
    let mut rng = stream_rng(seed, 0x6e61);
    let n = poisson(&mut rng, lambda * window.area());
    let mut out = GermGrain { germs: Vec::new(), curves: Vec::new(), obstacles: Vec::new(), motorcycles: Vec::new() };
    for g in 0..n {
        let germ = Point::new(
            window.xmin + rng.random::<f64>() * window.width(),
            window.ymin + rng.random::<f64>() * window.height(),
        );
        let c = curve(&law.sample(&mut rng))?;
        let c = c.translated(germ - centroid(&c, kind));
        out.obstacles.push(Obstacle { complex_id: g, segments: c.body_segments() });
        let mut arms: Vec<Arm> = Vec::new();
        for a in &c.arms {
            match arms.iter_mut().find(|b| b.apex.dist(a.apex) < 1e-12 && b.direction == a.direction) {
                Some(b) => b.multiplicity += a.multiplicity,
                None => arms.push(*a),
            }
        }
        for a in arms {
            out.motorcycles.push(Motorcycle {
                id: out.motorcycles.len(),
                origin: a.apex,
                angle: a.direction,
                lives: k,
                source_id: g,
                weight: a.multiplicity,
            });
        }
        out.germs.push(germ);
        out.curves.push(c);
    }
    Ok(out)
}

/// Mean number of distinct arms per direction (east, north, southwest), by Monte Carlo.
pub fn mean_arm_counts(law: &CurveLaw, samples: usize, seed: u64) -> Result<[f64; 3]> {
    law.validate()?;
    let mut rng = stream_rng(seed, 0xa4);
    let mut acc = [0.0; 3];
    for _ in 0..samples.max(1) {
        for a in &curve(&law.sample(&mut rng))?.arms {
            acc[direction_index(a.direction)] += 1.0;
        }
    }
    Ok(acc.map(|x| x / samples.max(1) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn plane_cubic() -> TropPoly {
        TropPoly::new([
            ((0, 3), 3.0),
            ((0, 2), 1.0),
            ((1, 2), 1.0),
            ((0, 1), 9.0),
            ((1, 1), 0.0),
            ((2, 1), 1.0),
            ((0, 0), 3.0),
            ((1, 0), 1.0),
            ((2, 0), 8.0),
            ((3, 0), 2.0),
        ])
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = TropPoly::tropical_line();
        assert_eq!(f.eval(2.0, 3.0), (0.0, vec![(0, 0)]));
        let (v, mut arg) = f.eval(0.0, 5.0);
        arg.sort_unstable();
        assert_eq!((v, arg), (0.0, vec![(0, 0), (1, 0)]));
    }

    #[test]
    fn tropical_line_curve() {
        let c = curve(&TropPoly::tropical_line()).unwrap();
        assert_eq!(c.vertices.len(), 1);
        assert!(c.vertices[0].dist(Point::ORIGIN) < 1e-12);
        assert!(c.edges.is_empty());
        assert_eq!(c.arm_census(), [1, 1, 1]);
        assert_eq!(body_radius(&c), 0.0);
        for kind in [CentroidKind::MinYEastApex, CentroidKind::MinXNorthApex, CentroidKind::MassCenter] {
            assert!(centroid(&c, kind).dist(Point::ORIGIN) < 1e-12);
        }
    }

    #[test]
    fn cubed_line_has_triple_arms() {
        let f = TropPoly::new([((0, 0), 0.0), ((3, 0), 0.0), ((0, 3), 0.0)]).unwrap();
        let c = curve(&f).unwrap();
        assert_eq!(c.arms.len(), 3);
        assert!(c.arms.iter().all(|a| a.multiplicity == 3 && a.apex.dist(Point::ORIGIN) < 1e-12));
    }

    #[test]
    fn equal_coefficients_give_one_cell() {
        let mut rng = stream_rng(1, 1);
        let f = random_standard(3, 0.0, &mut rng);
        let s = regular_subdivision(&f).unwrap();
        assert_eq!(s.cells.len(), 1);
        assert_eq!(s.cells[0].corners.len(), 3);
    }

    #[test]
    fn plane_cubic_subdivision() {
        let f = plane_cubic();
        let s = regular_subdivision(&f).unwrap();
        let v = s.vertices();
        assert!(!v.contains(&(0, 1)) && !v.contains(&(2, 0)));
        let c = curve(&f).unwrap();
        assert_eq!(c.arm_census(), [3, 3, 3]);
        let r = body_radius(&c);
        assert!(r.is_finite() && r <= 18.0);
        let vtx = c.vertices[0];
        assert!(f.eval(vtx.x, vtx.y).1.len() >= 3);
    }

    #[test]
    fn line_intersections() {
        let l = curve(&TropPoly::tropical_line()).unwrap();
        let m = l.translated(Point::new(0.3, -0.7));
        let x = stable_intersection(&l, &m, 3).unwrap();
        assert_eq!(x.len(), 1);
        assert_eq!(x[0].1, 1);
        let cubed = curve(&TropPoly::new([((0, 0), 0.0), ((3, 0), 0.0), ((0, 3), 0.0)]).unwrap()).unwrap();
        let x = stable_intersection(&m, &cubed, 4).unwrap();
        assert_eq!(x.iter().map(|p| p.1).sum::<u32>(), 3);
        assert_eq!(x.len(), 1);
    }

    #[test]
    fn text_round_trip() {
        let f = plane_cubic();
        assert_eq!(TropPoly::parse(&f.to_text()).unwrap(), f);
        assert!(TropPoly::parse("1 2").is_err());
    }

    #[test]
    fn spread_bound_enforced() {
        let law = CurveLaw::Fixed { poly: plane_cubic(), bound: 1.0 };
        assert!(germ_grain(&law, 1.0, &Rect::square(1.0), 1, CentroidKind::MassCenter, 0).is_err());
    }
}
