//! Planar mosaics built from simulation output or from line arrangements.
//!
//! Trails and obstacle segments are carriers; each is cut at every vertex
//! lying on it. For simulations the cut points come straight from the
//! event log (an event names both the victim trail and the killer's
//! carrier), so no trail-trail intersection is recomputed. Faces are traced
//! on a half-edge structure with the face to the left of each half-edge.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::geom::{polygon_centroid, signed_area, Angle, Line, Point, Rect, Segment};
use crate::motorsim::{Killer, SimResult};

const ON_CARRIER_TOL: f64 = 1e-6;
const FLAT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Site,
    /// Where a motorcycle died on another carrier.
    Grave,
    /// Two carriers crossing.
    Crossing,
    /// Degree two with collinear edges.
    Flat,
    ComplexVertex,
    /// Where a carrier was cut by the horizon box.
    Horizon,
}

impl VertexKind {
    pub fn name(self) -> &'static str {
        match self {
            VertexKind::Site => "site",
            VertexKind::Grave => "grave",
            VertexKind::Crossing => "crossing",
            VertexKind::Flat => "flat",
            VertexKind::ComplexVertex => "complex_vertex",
            VertexKind::Horizon => "horizon",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub location: Point,
    pub kind: VertexKind,
    /// Motorcycles starting here for site vertices, otherwise 1.
    pub multiplicity: usize,
    /// Orientations (mod π) of the carriers crossing here.
    pub crossing: Option<(Angle, Angle)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfEdge {
    pub origin: usize,
    /// Unit direction of travel, taken from the carrier.
    pub direction: Point,
    pub next: usize,
    pub face: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceRecord {
    pub id: usize,
    /// First half-edge of the loop.
    pub start: usize,
    pub vertices: Vec<usize>,
    pub area: f64,
    pub centroid: Point,
    pub bounded: bool,
    pub component: usize,
    /// Loop vertices where the boundary turns.
    pub proper_vertex_count: usize,
    /// Proper vertex count when it lies in `3..=6`.
    pub polytrope_class: Option<usize>,
    pub convex: bool,
}

/// Half-edge `2e` runs along edge `e` in carrier direction, `2e + 1` against it.
#[derive(Debug, Clone, Default)]
pub struct MosaicGraph {
    pub vertices: Vec<Vertex>,
    pub half_edges: Vec<HalfEdge>,
    pub faces: Vec<FaceRecord>,
    /// Component index per vertex.
    pub component: Vec<usize>,
    pub components: usize,
}

impl MosaicGraph {
    pub fn edge_count(&self) -> usize {
        self.half_edges.len() / 2
    }

    pub fn twin(h: usize) -> usize {
        h ^ 1
    }

    pub fn head(&self, h: usize) -> usize {
        self.half_edges[h ^ 1].origin
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees()[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for h in &self.half_edges {
            d[h.origin] += 1;
        }
        d
    }

    pub fn edge_segment(&self, e: usize) -> Segment {
        Segment::new(self.vertices[self.half_edges[2 * e].origin].location, self.vertices[self.head(2 * e)].location)
    }

    pub fn bounded_faces(&self) -> impl Iterator<Item = &FaceRecord> {
        self.faces.iter().filter(|f| f.bounded)
    }

    /// `(V, E, F_bounded)` for each connected component.
    pub fn euler_counts(&self) -> Vec<(usize, usize, usize)> {
        let mut c = vec![(0, 0, 0); self.components];
        for &k in &self.component {
            c[k].0 += 1;
        }
        for e in 0..self.edge_count() {
            c[self.component[self.half_edges[2 * e].origin]].1 += 1;
        }
        for f in self.bounded_faces() {
            c[f.component].2 += 1;
        }
        c
    }

    /// `V − E + F_bounded = 1` on every component.
    pub fn euler_holds(&self) -> bool {
        self.euler_counts().iter().all(|&(v, e, f)| v as i64 - e as i64 + f as i64 == 1)
    }

    /// CSV columns: x, y, kind, degree.
    pub fn write_vertices_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["x", "y", "kind", "degree"])?;
        let deg = self.degrees();
        for (v, d) in self.vertices.iter().zip(deg) {
            wr.write_record([v.location.x.to_string(), v.location.y.to_string(), v.kind.name().into(), d.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// CSV columns: face_id, class, area, centroid_x, centroid_y; bounded faces only.
    pub fn write_faces_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["face_id", "class", "area", "centroid_x", "centroid_y"])?;
        for f in self.bounded_faces() {
            let class = f.polytrope_class.map(|c| c.to_string()).unwrap_or_else(|| "none".into());
            wr.write_record([
                f.id.to_string(),
                class,
                f.area.to_string(),
                f.centroid.x.to_string(),
                f.centroid.y.to_string(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Self-contained SVG of the part of the mosaic inside `view`.
    pub fn to_svg(&self, view: &Rect) -> String {
        let scale = 800.0 / view.width().max(view.height());
        let tx = |p: Point| ((p.x - view.xmin) * scale, (view.ymax - p.y) * scale);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
            view.width() * scale,
            view.height() * scale,
            view.width() * scale,
            view.height() * scale
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r#"<g stroke="black" stroke-width="0.8">"#);
        for e in 0..self.edge_count() {
            let seg = self.edge_segment(e);
            if !view.intersects_segment(&seg) {
                continue;
            }
            let ((x0, y0), (x1, y1)) = (tx(seg.start), tx(seg.end));
            let _ = writeln!(s, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}"/>"#);
        }
        let _ = writeln!(s, "</g>");
        for v in self.vertices.iter().filter(|v| view.contains(v.location)) {
            let colour = match v.kind {
                VertexKind::Site => "red",
                VertexKind::Grave => "blue",
                VertexKind::Crossing => "green",
                VertexKind::Flat => "orange",
                VertexKind::ComplexVertex => "purple",
                VertexKind::Horizon => "gray",
            };
            let (x, y) = tx(v.location);
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2" fill="{colour}"/>"#);
        }
        s.push_str("</svg>\n");
        s
    }
}

struct Carrier {
    start: Point,
    dir: Point,
    orientation: Angle,
    cuts: Vec<(f64, usize)>,
}

impl Carrier {
    fn new(seg: Segment) -> Self {
        let dir = seg.direction();
        Carrier { start: seg.start, dir, orientation: Angle::new(dir.angle()).orientation(), cuts: Vec::new() }
    }

    fn param(&self, p: Point) -> f64 {
        (p - self.start).dot(self.dir)
    }
}

#[derive(Default)]
struct Builder {
    vertices: Vec<Vertex>,
    carriers: Vec<Carrier>,
}

impl Builder {
    fn vertex(&mut self, location: Point, kind: VertexKind) -> usize {
        self.vertices.push(Vertex { location, kind, multiplicity: 1, crossing: None });
        self.vertices.len() - 1
    }

    fn finish(self) -> MosaicGraph {
        let Builder { mut vertices, carriers } = self;
        let mut half_edges = Vec::new();
        for mut c in carriers {
            c.cuts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            c.cuts.dedup_by_key(|x| x.1);
            for w in c.cuts.windows(2) {
                let ((_, a), (_, b)) = (w[0], w[1]);
                if a == b {
                    continue;
                }
                half_edges.push(HalfEdge { origin: a, direction: c.dir, next: usize::MAX, face: usize::MAX });
                half_edges.push(HalfEdge { origin: b, direction: -c.dir, next: usize::MAX, face: usize::MAX });
            }
        }
        let n = vertices.len();
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (h, he) in half_edges.iter().enumerate() {
            out[he.origin].push(h);
        }
        for list in &mut out {
            list.sort_by(|&a, &b| half_edges[a].direction.angle().total_cmp(&half_edges[b].direction.angle()));
        }
        let mut slot = vec![0usize; half_edges.len()];
        for list in &out {
            for (i, &h) in list.iter().enumerate() {
                slot[h] = i;
            }
        }
        for h in 0..half_edges.len() {
            let t = h ^ 1;
            let v = half_edges[t].origin;
            let list = &out[v];
            half_edges[h].next = list[(slot[t] + list.len() - 1) % list.len()];
        }
        for (v, list) in out.iter().enumerate() {
            if list.len() == 2 && vertices[v].kind != VertexKind::Horizon {
                let (a, b) = (half_edges[list[0]].direction, half_edges[list[1]].direction);
                if a.cross(b).abs() < FLAT_TOL && a.dot(b) < 0.0 && vertices[v].kind != VertexKind::ComplexVertex {
                    vertices[v].kind = VertexKind::Flat;
                }
            }
        }

        let mut uf: Vec<usize> = (0..n).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for e in 0..half_edges.len() / 2 {
            let (a, b) = (find(&mut uf, half_edges[2 * e].origin), find(&mut uf, half_edges[2 * e + 1].origin));
            if a != b {
                uf[a] = b;
            }
        }
        let mut comp_id: HashMap<usize, usize> = HashMap::new();
        let mut component = vec![0; n];
        for v in 0..n {
            let r = find(&mut uf, v);
            let next = comp_id.len();
            component[v] = *comp_id.entry(r).or_insert(next);
        }
        let components = comp_id.len();

        let mut faces: Vec<FaceRecord> = Vec::new();
        for h0 in 0..half_edges.len() {
            if half_edges[h0].face != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut loop_vertices = Vec::new();
            let mut turns = 0;
            let mut convex = true;
            let mut h = h0;
            loop {
                half_edges[h].face = id;
                loop_vertices.push(half_edges[h].origin);
                let nx = half_edges[h].next;
                let (a, b) = (half_edges[h].direction, half_edges[nx].direction);
                let cr = a.cross(b);
                if !(cr.abs() < FLAT_TOL && a.dot(b) > 0.0) {
                    turns += 1;
                }
                if cr < -FLAT_TOL || (cr.abs() < FLAT_TOL && a.dot(b) < 0.0) {
                    convex = false;
                }
                h = nx;
                if h == h0 {
                    break;
                }
            }
            let pts: Vec<Point> = loop_vertices.iter().map(|&v| vertices[v].location).collect();
            faces.push(FaceRecord {
                id,
                start: h0,
                area: signed_area(&pts),
                centroid: polygon_centroid(&pts),
                vertices: loop_vertices,
                bounded: true,
                component: component[half_edges[h0].origin],
                proper_vertex_count: turns,
                polytrope_class: (3..=6).contains(&turns).then_some(turns),
                convex,
            });
        }
        let mut outer: Vec<Option<usize>> = vec![None; components];
        for f in &faces {
            let slot = &mut outer[f.component];
            if slot.is_none_or(|o| f.area < faces[o].area) {
                *slot = Some(f.id);
            }
        }
        for o in outer.into_iter().flatten() {
            faces[o].bounded = false;
            faces[o].polytrope_class = None;
            faces[o].convex = false;
        }
        MosaicGraph { vertices, half_edges, faces, component, components }
    }
}

/// Mosaic of the trails and obstacles of a simulation.
///
/// Crossings of two trails reached at exactly the same age leave no event
/// and therefore no vertex; under the Poisson model they have probability 0.
pub fn build_mosaic(result: &SimResult) -> Result<MosaicGraph> {
    let mut b = Builder::default();
    let ntrail = result.trails.len();
    for t in &result.trails {
        b.carriers.push(Carrier::new(t.segment));
    }
    // obstacle carriers follow the trails, in (complex, segment) order
    let mut obstacle_carrier: HashMap<(usize, usize), usize> = HashMap::new();
    let mut complex_vertices: HashMap<usize, Vec<usize>> = HashMap::new();
    for o in &result.obstacles {
        for (si, s) in o.segments.iter().enumerate() {
            if s.is_degenerate() {
                continue;
            }
            let c = b.carriers.len();
            b.carriers.push(Carrier::new(*s));
            obstacle_carrier.insert((o.complex_id, si), c);
            for p in [s.start, s.end] {
                let known = complex_vertices
                    .get(&o.complex_id)
                    .and_then(|vs| vs.iter().copied().find(|&v| b.vertices[v].location.dist(p) < 1e-9));
                let v = match known {
                    Some(v) => v,
                    None => {
                        let v = b.vertex(p, VertexKind::ComplexVertex);
                        complex_vertices.entry(o.complex_id).or_default().push(v);
                        v
                    }
                };
                let param = b.carriers[c].param(p);
                b.carriers[c].cuts.push((param, v));
            }
        }
    }

    let mut sites: HashMap<(usize, u64, u64), usize> = HashMap::new();
    for (i, (m, t)) in result.motorcycles.iter().zip(&result.trails).enumerate() {
        if t.segment.is_degenerate() {
            continue;
        }
        let on_complex = complex_vertices
            .get(&m.source_id)
            .and_then(|vs| vs.iter().copied().find(|&v| b.vertices[v].location.dist(m.origin) < 1e-9));
        let v = match on_complex {
            Some(v) => v,
            None => {
                let key = (m.source_id, m.origin.x.to_bits(), m.origin.y.to_bits());
                match sites.get(&key) {
                    Some(&v) => {
                        b.vertices[v].multiplicity += 1;
                        v
                    }
                    None => {
                        let v = b.vertex(m.origin, VertexKind::Site);
                        sites.insert(key, v);
                        v
                    }
                }
            }
        };
        b.carriers[i].cuts.push((0.0, v));
        if t.censored {
            let h = b.vertex(t.segment.end, VertexKind::Horizon);
            b.carriers[i].cuts.push((t.length(), h));
        }
    }

    for (index, e) in result.events.iter().enumerate() {
        let bad = |reason: String| Error::InconsistentEventLog { index, reason };
        if e.victim >= ntrail {
            return Err(bad(format!("unknown victim {}", e.victim)));
        }
        let victim = &result.trails[e.victim].segment;
        if victim.distance_to(e.location) > ON_CARRIER_TOL {
            return Err(bad("location is not on the victim's trail".into()));
        }
        let kc = match e.killer {
            Killer::Motorcycle(j) => {
                if j >= ntrail {
                    return Err(bad(format!("unknown killer {j}")));
                }
                if result.trails[j].segment.distance_to(e.location) > ON_CARRIER_TOL {
                    return Err(bad(format!("location is not on the trail of killer {j}")));
                }
                j
            }
            Killer::Obstacle { complex_id, segment } => {
                let c = *obstacle_carrier
                    .get(&(complex_id, segment))
                    .ok_or_else(|| bad(format!("unknown obstacle segment {complex_id}/{segment}")))?;
                let seg = result.obstacles.iter().find(|o| o.complex_id == complex_id).map(|o| o.segments[segment]);
                if seg.is_none_or(|s| s.distance_to(e.location) > ON_CARRIER_TOL) {
                    return Err(bad("location is not on the obstacle segment".into()));
                }
                c
            }
        };
        let kind = if e.fatal { VertexKind::Grave } else { VertexKind::Crossing };
        let v = b.vertex(e.location, kind);
        if !e.fatal {
            b.vertices[v].crossing =
                Some(sorted_pair(b.carriers[e.victim].orientation, b.carriers[kc].orientation));
        }
        b.carriers[e.victim].cuts.push((e.victim_age, v));
        let p = b.carriers[kc].param(e.location);
        b.carriers[kc].cuts.push((p, v));
    }

    // bodies of different complexes may cross each other
    let obstacle_ids: Vec<(usize, usize)> = {
        let mut v: Vec<_> = obstacle_carrier.keys().copied().collect();
        v.sort_unstable();
        v
    };
    for (x, &(ca, sa)) in obstacle_ids.iter().enumerate() {
        for &(cb, sb) in &obstacle_ids[x + 1..] {
            if ca == cb {
                continue;
            }
            let (ia, ib) = (obstacle_carrier[&(ca, sa)], obstacle_carrier[&(cb, sb)]);
            let sega = result.obstacles.iter().find(|o| o.complex_id == ca).unwrap().segments[sa];
            let segb = result.obstacles.iter().find(|o| o.complex_id == cb).unwrap().segments[sb];
            if let Some(p) = proper_crossing(&sega, &segb) {
                let v = b.vertex(p, VertexKind::Crossing);
                b.vertices[v].crossing = Some(sorted_pair(b.carriers[ia].orientation, b.carriers[ib].orientation));
                let (pa, pb) = (b.carriers[ia].param(p), b.carriers[ib].param(p));
                b.carriers[ia].cuts.push((pa, v));
                b.carriers[ib].cuts.push((pb, v));
            }
        }
    }
    Ok(b.finish())
}

fn sorted_pair(a: Angle, b: Angle) -> (Angle, Angle) {
    if a.radians() <= b.radians() {
        (a, b)
    } else {
        (b, a)
    }
}

fn proper_crossing(a: &Segment, b: &Segment) -> Option<Point> {
    let (d, e) = (a.end - a.start, b.end - b.start);
    let den = d.cross(e);
    if den.abs() < 1e-14 {
        return None;
    }
    let w = b.start - a.start;
    let (s, t) = (w.cross(e) / den, w.cross(d) / den);
    (s > 1e-12 && s < 1.0 - 1e-12 && t > 1e-12 && t < 1.0 - 1e-12).then(|| a.start + d * s)
}

/// Arrangement of the lines inside `bbox`; lines are cut where they leave it.
pub fn build_line_arrangement(lines: &[Line], bbox: &Rect) -> MosaicGraph {
    let mut b = Builder::default();
    let mut clipped: Vec<(usize, Segment)> = Vec::new();
    for l in lines {
        if let Some(s) = l.clip(bbox) {
            if s.is_degenerate() {
                continue;
            }
            let c = b.carriers.len();
            b.carriers.push(Carrier::new(s));
            for p in [s.start, s.end] {
                let v = b.vertex(p, VertexKind::Horizon);
                let param = b.carriers[c].param(p);
                b.carriers[c].cuts.push((param, v));
            }
            clipped.push((c, s));
        }
    }
    for (x, &(ca, sa)) in clipped.iter().enumerate() {
        for &(cb, sb) in &clipped[x + 1..] {
            if let Some(p) = proper_crossing(&sa, &sb) {
                let v = b.vertex(p, VertexKind::Crossing);
                b.vertices[v].crossing = Some(sorted_pair(b.carriers[ca].orientation, b.carriers[cb].orientation));
                let (pa, pb) = (b.carriers[ca].param(p), b.carriers[cb].param(p));
                b.carriers[ca].cuts.push((pa, v));
                b.carriers[cb].cuts.push((pb, v));
            }
        }
    }
    b.finish()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Census {
    pub area: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Sites counted once per motorcycle starting there.
    pub lambda0_weighted: f64,
    pub vertex_intensity: Vec<(VertexKind, f64)>,
    /// Mean loop length over bounded faces with centroid in the window.
    pub mean_vertices_per_face: f64,
    /// `2λ₁/λ₂`, the asymptotic value of the mean above.
    pub edge_face_ratio: f64,
    /// `λ₁ − λ₀`, which equals `λ₂` in the limit.
    pub euler_lambda2: f64,
}

/// Intensities per unit area of `core`: vertices by location, edges by
/// midpoint and bounded faces by centroid.
pub fn census(g: &MosaicGraph, core: &Rect) -> Result<Census> {
    if core.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let area = core.area();
    let mut by_kind: HashMap<VertexKind, usize> = HashMap::new();
    let (mut v, mut vw) = (0usize, 0usize);
    for x in g.vertices.iter().filter(|x| core.contains(x.location)) {
        v += 1;
        vw += x.multiplicity;
        *by_kind.entry(x.kind).or_default() += 1;
    }
    let e = (0..g.edge_count()).filter(|&e| core.contains(g.edge_segment(e).midpoint())).count();
    let faces: Vec<&FaceRecord> = g.bounded_faces().filter(|f| core.contains(f.centroid)).collect();
    let f = faces.len();
    let loop_len: usize = faces.iter().map(|f| f.vertices.len()).sum();
    let mut vertex_intensity: Vec<(VertexKind, f64)> =
        by_kind.into_iter().map(|(k, n)| (k, n as f64 / area)).collect();
    vertex_intensity.sort_by_key(|x| x.0);
    let (l0, l1, l2) = (v as f64 / area, e as f64 / area, f as f64 / area);
    Ok(Census {
        area,
        lambda0: l0,
        lambda1: l1,
        lambda2: l2,
        lambda0_weighted: vw as f64 / area,
        vertex_intensity,
        mean_vertices_per_face: if f > 0 { loop_len as f64 / f as f64 } else { 0.0 },
        edge_face_ratio: if l2 > 0.0 { 2.0 * l1 / l2 } else { 0.0 },
        euler_lambda2: l1 - l0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolytropeCensus {
    pub area: f64,
    /// Face counts with 3, 4, 5 and 6 proper vertices.
    pub counts: [usize; 4],
    /// Faces outside `3..=6`; nonzero only for non-tropical input or a bug.
    pub unclassified: usize,
    pub nonconvex: usize,
}

impl PolytropeCensus {
    pub fn intensity(&self) -> [f64; 4] {
        self.counts.map(|c| c as f64 / self.area)
    }

    /// `Σ p_i`.
    pub fn total(&self) -> f64 {
        self.intensity().iter().sum()
    }

    /// `Σ (3+i)·p_i`.
    pub fn weighted_total(&self) -> f64 {
        self.intensity().iter().enumerate().map(|(i, p)| (3 + i) as f64 * p).sum()
    }
}

pub fn classify_polytropes(g: &MosaicGraph, core: &Rect) -> Result<PolytropeCensus> {
    if core.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let mut c = PolytropeCensus { area: core.area(), counts: [0; 4], unclassified: 0, nonconvex: 0 };
    for f in g.bounded_faces().filter(|f| core.contains(f.centroid)) {
        match f.polytrope_class {
            Some(k) => c.counts[k - 3] += 1,
            None => c.unclassified += 1,
        }
        if !f.convex {
            c.nonconvex += 1;
        }
    }
    Ok(c)
}

/// Intensity of crossing vertices per unordered pair of carrier orientations.
pub fn intersection_type_census(g: &MosaicGraph, core: &Rect) -> Result<Vec<((Angle, Angle), f64)>> {
    if core.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let mut out: Vec<((Angle, Angle), usize)> = Vec::new();
    for v in g.vertices.iter().filter(|v| core.contains(v.location)) {
        if let Some((a, b)) = v.crossing {
            match out.iter_mut().find(|(k, _)| k.0.approx_eq(a, 1e-9) && k.1.approx_eq(b, 1e-9)) {
                Some(x) => x.1 += 1,
                None => out.push(((a, b), 1)),
            }
        }
    }
    out.sort_by(|x, y| x.0 .0.radians().total_cmp(&y.0 .0.radians()).then(x.0 .1.radians().total_cmp(&y.0 .1.radians())));
    Ok(out.into_iter().map(|(k, n)| (k, n as f64 / core.area())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motorsim::{simulate, SimOptions};
    use crate::procs::{Site, SitePattern};

    fn grid(n: usize) -> MosaicGraph {
        let mut lines = Vec::new();
        for i in 0..n {
            lines.push(Line::new(Angle::EAST, i as f64 + 0.5));
            lines.push(Line::new(Angle::NORTH, -(i as f64 + 0.5)));
        }
        build_line_arrangement(&lines, &Rect::new(0.0, 0.0, n as f64, n as f64))
    }

    #[test]
    fn manhattan_grid_is_all_quads() {
        let g = grid(5);
        let c = classify_polytropes(&g, &Rect::new(0.0, 0.0, 5.0, 5.0)).unwrap();
        assert_eq!(c.counts, [0, 16, 0, 0]);
        assert_eq!(c.unclassified + c.nonconvex, 0);
        assert!(g.euler_holds());
        assert!(g.bounded_faces().all(|f| (f.area - 1.0).abs() < 1e-12));
    }

    #[test]
    fn single_tropical_line_has_no_bounded_faces() {
        let p = SitePattern::new(
            Rect::new(-1.0, -1.0, 1.0, 1.0),
            vec![Angle::EAST, Angle::NORTH, Angle::SOUTHWEST],
            vec![Site { location: Point::ORIGIN, angle_set: vec![0, 1, 2] }],
        )
        .unwrap();
        let r = simulate(&p, 1, &[], SimOptions::new(Rect::new(-5.0, -5.0, 5.0, 5.0))).unwrap();
        let g = build_mosaic(&r).unwrap();
        let sites: Vec<_> = g.vertices.iter().filter(|v| v.kind == VertexKind::Site).collect();
        assert_eq!(sites.len(), 1);
        assert_eq!((sites[0].multiplicity, g.degree(0)), (3, 3));
        assert_eq!(r.trails.iter().filter(|t| t.censored).count(), 3);
        assert_eq!(g.bounded_faces().count(), 0);
        assert!(g.euler_holds());
    }

    #[test]
    fn two_motorcycle_hand_trace() {
        let p = SitePattern::new(
            Rect::new(-5.0, -5.0, 5.0, 5.0),
            vec![Angle::EAST, Angle::NORTH],
            vec![
                Site { location: Point::ORIGIN, angle_set: vec![0] },
                Site { location: Point::new(1.0, -0.5), angle_set: vec![1] },
            ],
        )
        .unwrap();
        let r = simulate(&p, 1, &[], SimOptions::new(Rect::new(-5.0, -5.0, 5.0, 5.0))).unwrap();
        let g = build_mosaic(&r).unwrap();
        let count = |k| g.vertices.iter().filter(|v| v.kind == k).count();
        assert_eq!((count(VertexKind::Site), count(VertexKind::Grave), count(VertexKind::Horizon)), (2, 1, 1));
        let grave = g.vertices.iter().position(|v| v.kind == VertexKind::Grave).unwrap();
        assert_eq!(g.degree(grave), 3);
        assert_eq!(g.edge_count(), 3);
        assert!(g.euler_holds());
    }

    #[test]
    fn empty_mosaic_census_is_zero() {
        let g = MosaicGraph::default();
        let c = census(&g, &Rect::square(1.0)).unwrap();
        assert_eq!((c.lambda0, c.lambda1, c.lambda2), (0.0, 0.0, 0.0));
        assert!(census(&g, &Rect::new(0.0, 0.0, 0.0, 1.0)).is_err());
    }
}
