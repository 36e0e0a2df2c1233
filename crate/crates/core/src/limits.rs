//! Closed-form limit theory.
//!
//! * `ℰ(w, φ)`: expected number of first-arriving crossers on the first
//!   `w_φ` of a φ-motorcycle's path, when every ψ-motorcycle travels `w_ψ`.
//! * `w*`: the unique positive solution of `ℰ(w*, φ) = 1` for all `φ`,
//!   found by the staircase procedure (raise unfixed coordinates together,
//!   fix the ones that reach 1 first).
//! * The limiting Poisson line process puts intensity `w*_φ·ν_φ` on lines
//!   of direction `φ`.
//! * Polytrope face densities of the tropical limit line process, and the
//!   arm-body mean crossing count.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::geom::{kill_region, Angle, Segment, T_EPS};
use crate::procs::{ModelSpec, LineProcessSpec};

/// Per-angle weights aligned with a model's angle list.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub angles: Vec<Angle>,
    pub w: Vec<f64>,
}

impl WeightVector {
    pub fn new(angles: Vec<Angle>, w: Vec<f64>) -> Result<Self> {
        if angles.len() != w.len() || w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidInput("weights must be finite, nonnegative, one per angle".into()));
        }
        Ok(WeightVector { angles, w })
    }

    pub fn uniform(angles: &[Angle], value: f64) -> Self {
        WeightVector { angles: angles.to_vec(), w: vec![value; angles.len()] }
    }

    pub fn get(&self, phi: Angle) -> Result<f64> {
        self.angles
            .iter()
            .position(|a| a.approx_eq(phi, 1e-12))
            .map(|i| self.w[i])
            .ok_or(Error::UnknownAngle(phi.radians()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        WeightVector { angles: self.angles.clone(), w: self.w.iter().map(|v| v * c).collect() }
    }
}

fn region_area_between(angles: &[Angle], w: &[f64], i: usize, j: usize) -> f64 {
    // angles are distinct, so the region is always defined
    kill_region(angles[i], angles[j], w[i], w[j]).map(|r| r.area()).unwrap_or(0.0)
}

/// `Σ_{ψ≠φ} |T^{w_φ,w_ψ}_{φψ}|·ν_ψ` for `φ = angles[i]`.
pub fn crossing_rate(angles: &[Angle], nu: &[f64], w: &[f64], i: usize) -> f64 {
    (0..angles.len())
        .filter(|&j| j != i && nu[j] > 0.0)
        .map(|j| region_area_between(angles, w, i, j) * nu[j])
        .sum()
}

/// `ℰ(w, φ)` in its per-direction form.
pub fn expected_crossings(spec: &ModelSpec, w: &WeightVector, phi: Angle) -> Result<f64> {
    let i = spec.index_of(phi)?;
    check_weights(spec, w)?;
    Ok(crossing_rate(&spec.angles, &spec.nu_all(), &w.w, i))
}

/// `ℰ(w, φ)` as the double sum over angle sets `Q ⊆ A∖{φ}` and `ψ ∈ Q`.
pub fn expected_crossings_by_subsets(spec: &ModelSpec, w: &WeightVector, phi: Angle) -> Result<f64> {
    let i = spec.index_of(phi)?;
    check_weights(spec, w)?;
    let others: Vec<usize> = (0..spec.num_angles()).filter(|&j| j != i).collect();
    let mut total = 0.0;
    for mask in 1u64..(1u64 << others.len()) {
        let q: Vec<usize> = others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &j)| j).collect();
        let mut with_phi = q.clone();
        with_phi.push(i);
        with_phi.sort_unstable();
        let weight = spec.mu_indices(&with_phi) + spec.mu_indices(&q);
        if weight == 0.0 {
            continue;
        }
        let areas: f64 = q.iter().map(|&j| region_area_between(&spec.angles, &w.w, i, j)).sum();
        total += areas * weight;
    }
    Ok(total)
}

fn check_weights(spec: &ModelSpec, w: &WeightVector) -> Result<()> {
    if w.w.len() != spec.num_angles() {
        return Err(Error::InvalidInput("weight vector does not match the angle list".into()));
    }
    Ok(())
}

const BISECTION_TOL: f64 = 1e-12;
const ARGMAX_TOL: f64 = 1e-10;
const MAX_STAGES: usize = 200;

/// Solves `ℰ(w*, φ) = 1` for every direction.
pub fn solve_wstar(spec: &ModelSpec) -> Result<WeightVector> {
    spec.check_no_parallel_line()?;
    let w = solve_wstar_rates(&spec.angles, &spec.nu_all())?;
    WeightVector::new(spec.angles.clone(), w)
}

/// Staircase solver on raw motorcycle intensities `ν`.
///
/// Invariant: fixed coordinates never exceed the common level of the
/// unfixed ones, so their regions are triangles whose area no longer moves.
pub fn solve_wstar_rates(angles: &[Angle], nu: &[f64]) -> Result<Vec<f64>> {
    let m = angles.len();
    if nu.len() != m {
        return Err(Error::InvalidInput("one intensity per angle required".into()));
    }
    let mut w = vec![0.0; m];
    let mut fixed = vec![false; m];
    let mut level = 0.0f64;
    for _ in 0..MAX_STAGES {
        let unfixed: Vec<usize> = (0..m).filter(|&i| !fixed[i]).collect();
        if unfixed.is_empty() {
            return Ok(w);
        }
        let at = |c: f64, w: &mut Vec<f64>| -> f64 {
            for &i in &unfixed {
                w[i] = c;
            }
            unfixed.iter().map(|&i| crossing_rate(angles, nu, w, i)).fold(f64::NEG_INFINITY, f64::max)
        };
        let (mut lo, mut hi) = (level, level.max(1.0));
        let mut doublings = 0;
        while at(hi, &mut w) < 1.0 {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > 1100 || !hi.is_finite() {
                return Err(Error::NonConvergence(format!(
                    "crossing rate of {} directions never reaches 1",
                    unfixed.len()
                )));
            }
        }
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if at(mid, &mut w) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        level = 0.5 * (lo + hi);
        at(level, &mut w);
        let rates: Vec<(usize, f64)> = unfixed.iter().map(|&i| (i, crossing_rate(angles, nu, &w, i))).collect();
        let top = rates.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
        for (i, r) in rates {
            if r >= top - ARGMAX_TOL {
                fixed[i] = true;
            }
        }
    }
    Err(Error::NonConvergence(format!("more than {MAX_STAGES} stages")))
}

/// Limiting line process: direction `φ` gets line intensity `w_φ·ν_φ`.
pub fn limit_measure(spec: &ModelSpec, w: &WeightVector) -> Result<LineProcessSpec> {
    check_weights(spec, w)?;
    let nu = spec.nu_all();
    LineProcessSpec::new(spec.angles.iter().zip(&w.w).zip(&nu).map(|((&a, &wi), &n)| (a, wi * n)).collect())
}

/// Closed-form constants of the tropical-line limit at unit site intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TropicalConstants {
    /// Line intensity of the horizontal and of the vertical direction.
    pub mu_axis: f64,
    /// Line intensity of the diagonal direction.
    pub mu_diag: f64,
    /// Crossing intensity of horizontal with vertical lines.
    pub p_axis_axis: f64,
    /// Crossing intensity of an axis direction with the diagonal.
    pub p_axis_diag: f64,
}

pub fn tropical_constants() -> TropicalConstants {
    let mu_axis = 2f64.powf(0.75) / (1.0 + SQRT_2).sqrt();
    let mu_diag = (SQRT_2 + 3.0) / 4.0 * mu_axis;
    TropicalConstants {
        mu_axis,
        mu_diag,
        p_axis_axis: 2.0 * SQRT_2 / (SQRT_2 + 1.0),
        p_axis_diag: (SQRT_2 + 3.0) / (2.0 * (SQRT_2 + 1.0)),
    }
}

/// Faces cut from one rectangle by parallel diagonal chords.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FaceCensus {
    pub triangles: usize,
    pub quads: usize,
    pub pentagons: usize,
    pub hexagons: usize,
}

impl FaceCensus {
    pub fn total(&self) -> usize {
        self.triangles + self.quads + self.pentagons + self.hexagons
    }

    pub fn as_array(&self) -> [usize; 4] {
        [self.triangles, self.quads, self.pentagons, self.hexagons]
    }

    fn bump(&mut self, sides: usize) {
        match sides {
            3 => self.triangles += 1,
            4 => self.quads += 1,
            5 => self.pentagons += 1,
            _ => self.hexagons += 1,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Block {
    A,
    B,
    C,
}

/// Census of a rectangle cut by `n_a` corner chords on one side, `n_b`
/// through-chords and `n_c` corner chords on the other, in sorted order.
pub fn rectangle_face_census(n_a: usize, n_b: usize, n_c: usize) -> FaceCensus {
    let chords: Vec<Block> = std::iter::repeat(Block::A)
        .take(n_a)
        .chain(std::iter::repeat(Block::B).take(n_b))
        .chain(std::iter::repeat(Block::C).take(n_c))
        .collect();
    let mut c = FaceCensus::default();
    match (chords.first(), chords.last()) {
        (None, _) | (_, None) => c.bump(4),
        (Some(&first), Some(&last)) => {
            c.bump(match first {
                Block::A => 3,
                Block::B => 4,
                Block::C => 5,
            });
            c.bump(match last {
                Block::C => 3,
                Block::B => 4,
                Block::A => 5,
            });
        }
    }
    for pair in chords.windows(2) {
        c.bump(match (pair[0], pair[1]) {
            (x, y) if x == y => 4,
            (Block::A, Block::C) => 6,
            _ => 5,
        });
    }
    c
}

/// Expected census `(e_3, e_4, e_5, e_6)` when the block counts are
/// independent Poisson with means `a`, `b`, `c`.
pub fn expected_face_census(a: f64, b: f64, c: f64) -> [f64; 4] {
    let (ea, eb, ec) = ((-a).exp(), (-b).exp(), (-c).exp());
    let tri = (1.0 - ea) + (1.0 - ec);
    let hex = eb * (1.0 - ea) * (1.0 - ec);
    let pent = (1.0 - ea) * (1.0 - eb) + (1.0 - eb) * (1.0 - ec) + ea * eb * (1.0 - ec) + eb * ec * (1.0 - ea);
    let quad = 1.0 + a + b + c - tri - pent - hex;
    [tri, quad, pent, hex]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityMethod {
    Integral,
    MonteCarlo,
}

/// Intensities of faces with 3, 4, 5 and 6 proper vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytropeDensities {
    pub p: [f64; 4],
    /// Quadrature error estimate or Monte Carlo standard error, per class.
    pub error: [f64; 4],
    pub method: DensityMethod,
}

impl PolytropeDensities {
    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    /// `Σ (3+i)·p_i`.
    pub fn weighted_total(&self) -> f64 {
        self.p.iter().enumerate().map(|(i, v)| (3 + i) as f64 * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Gauss-Legendre nodes per panel; the error estimate reruns with 1.5× as many.
    pub nodes: usize,
    /// Ratio between consecutive panel widths.
    pub growth: f64,
    /// Integration range in units of the decay length `1/μ_rect`.
    pub decay_lengths: f64,
    pub tolerance: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { nodes: 16, growth: 1.5, decay_lengths: 48.0, tolerance: 1e-10 }
    }
}

/// Face densities of the line process with horizontal and vertical
/// intensity `mu_rect` and diagonal intensity `mu_diag`.
///
/// The rectangles of the axis grid have i.i.d. `Exp(mu_rect)` sides; for
/// a rectangle `x × y` the diagonal chord counts per block are Poisson with
/// means `μ_diag·min(x,y)/√2`, `μ_diag·|x−y|/√2`, `μ_diag·min(x,y)/√2`.
/// The integrand is symmetric in `x, y`, so the half `x = y + s` is
/// integrated in `(s, y)` where it is smooth. Panels grow geometrically
/// from a width set by the fastest exponential rate in the integrand.
pub fn polytrope_densities_integral(mu_rect: f64, mu_diag: f64, opts: QuadOptions) -> Result<PolytropeDensities> {
    if !(mu_rect > 0.0 && mu_rect.is_finite()) || !(mu_diag >= 0.0 && mu_diag.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "need mu_rect > 0 and mu_diag >= 0, got ({mu_rect}, {mu_diag})"
        )));
    }
    if opts.nodes == 0 || !(opts.growth > 1.0) || !(opts.decay_lengths > 0.0) {
        return Err(Error::InvalidInput("quadrature needs nodes > 0, growth > 1, positive range".into()));
    }
    let coarse = integrate_densities(mu_rect, mu_diag, opts.nodes, opts);
    let fine = integrate_densities(mu_rect, mu_diag, opts.nodes + opts.nodes / 2, opts);
    let mut error = [0.0; 4];
    for i in 0..4 {
        error[i] = (fine[i] - coarse[i]).abs();
    }
    let worst = error.iter().cloned().fold(0.0, f64::max);
    if !(worst <= opts.tolerance) {
        return Err(Error::Quadrature { estimate: worst, tolerance: opts.tolerance });
    }
    Ok(PolytropeDensities { p: fine, error, method: DensityMethod::Integral })
}

fn geometric_panels(first: f64, len: f64, growth: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut a, mut h) = (0.0, first);
    while a < len {
        let b = (a + h).min(len);
        out.push((a, b));
        a = b;
        h *= growth;
    }
    out
}

fn integrate_densities(mu: f64, mu_d: f64, nodes: usize, opts: QuadOptions) -> [f64; 4] {
    let rule = GaussLegendre::new(NonZeroUsize::new(nodes).expect("nodes > 0"));
    let fastest = 2.0 * mu + SQRT_2 * mu_d;
    let first = 0.25 / fastest;
    // weight e^{-μ(2y+s)}: y decays twice as fast as s
    let s_panels = geometric_panels(first, opts.decay_lengths / mu, opts.growth);
    let y_panels = geometric_panels(first, opts.decay_lengths / (2.0 * mu), opts.growth);
    let mut out = [0.0; 4];
    for (class, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for &(y0, y1) in &y_panels {
            acc += rule.integrate(y0, y1, |y| {
                let a = mu_d * y * FRAC_1_SQRT_2;
                s_panels
                    .iter()
                    .map(|&(s0, s1)| {
                        rule.integrate(s0, s1, |s| {
                            let b = mu_d * s * FRAC_1_SQRT_2;
                            expected_face_census(a, b, a)[class] * (-mu * (2.0 * y + s)).exp()
                        })
                    })
                    .sum::<f64>()
            });
        }
        *slot = 2.0 * mu.powi(4) * acc;
    }
    out
}

/// Crossing intensity `Σ p_i` implied by the two line families, which fixes both face constraints:
/// `Σ p_i = X` and `Σ (3+i)·p_i = 4X`.
pub fn polytrope_vertex_intensity(mu_rect: f64, mu_diag: f64) -> f64 {
    mu_rect * mu_rect + SQRT_2 * mu_rect * mu_diag
}

/// Mean number of crossings between a body and the arms, in the limit.
///
/// `body` lists `(orientation, total length)`; `d` and `mu` are ordered
/// (horizontal, vertical, diagonal). Orientations 0, π/4 and π/2 use the
/// dedicated coefficients; any other orientation `o` is weighted by the
/// sines of its angles to the three line families.
pub fn arm_body_mean(body: &[(Angle, f64)], d: [f64; 3], mu: [f64; 3], lambda: f64) -> Result<f64> {
    if body.iter().any(|&(_, l)| !(l >= 0.0)) {
        return Err(Error::InvalidInput("body segment lengths must be nonnegative".into()));
    }
    let [dh, dv, dd] = d;
    let [mh, mv, md] = mu;
    let mut m = 0.0;
    for &(o, l) in body {
        let o = o.orientation();
        let term = if o.approx_eq(Angle::EAST, T_EPS) {
            dv * mv + FRAC_1_SQRT_2 * dd * md
        } else if o.approx_eq(Angle::new(PI / 4.0), T_EPS) {
            FRAC_1_SQRT_2 * dh * mh + FRAC_1_SQRT_2 * dv * mv
        } else if o.approx_eq(Angle::NORTH, T_EPS) {
            dh * mh + FRAC_1_SQRT_2 * dd * md
        } else {
            let r = o.radians();
            (r - PI / 2.0).sin().abs() * dv * mv + r.sin().abs() * dh * mh + (r - PI / 4.0).sin().abs() * dd * md
        };
        m += l * term;
    }
    Ok(lambda * m)
}

/// Groups body segments by orientation for [`arm_body_mean`].
pub fn body_orientation_lengths(segments: &[Segment]) -> Vec<(Angle, f64)> {
    let mut out: Vec<(Angle, f64)> = Vec::new();
    for s in segments.iter().filter(|s| !s.is_degenerate()) {
        let o = Angle::new(s.direction().angle()).orientation();
        match out.iter_mut().find(|(a, _)| a.approx_eq(o, 1e-9)) {
            Some(e) => e.1 += s.length(),
            None => out.push((o, s.length())),
        }
    }
    out
}
