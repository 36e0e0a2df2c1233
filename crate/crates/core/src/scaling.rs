//! Convergence of the rescaled mosaic `𝒢^k(λ/k)` to its limit line process.
//!
//! At site intensity `λ/k` a motorcycle travels about `k·w*_φ(λ)` before
//! its `k`-th hit, so inside a fixed window the trails look like lines.
//! Per direction, the number of trails entering the window is compared with
//! the Poisson mean `w*_φ·ν_φ·(width of the window across φ)`, and the
//! offsets of those trails across the window with the uniform law.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{Angle, Point, Rect, Segment};
use crate::limits::{solve_wstar_rates, DensityMethod, PolytropeDensities, WeightVector};
use crate::mosaic::{build_line_arrangement, classify_polytropes, MosaicGraph};
use crate::motorsim::{simulate, simulate_motorcycles, SimPlan, SimResult};
use crate::procs::{sample_line_process, sample_sites, LineProcessSpec, ModelSpec};
use crate::tropical::{germ_grain, mean_arm_counts, CentroidKind, CurveLaw};

/// What is attached to each Poisson point.
#[derive(Debug, Clone)]
pub enum Source {
    /// Point sites carrying angle sets.
    Sites(ModelSpec),
    /// Tropical curves: bodies are obstacles and arms are motorcycles.
    GermGrain { law: CurveLaw, centroid: CentroidKind, arm_samples: usize },
}

impl Source {
    /// Directions and motorcycle intensities at germ intensity `lambda`.
    pub fn directions(&self, lambda: f64, seed: u64) -> Result<(Vec<Angle>, Vec<f64>)> {
        match self {
            Source::Sites(spec) => {
                let s = spec.with_lambda(lambda)?;
                Ok((s.angles.clone(), s.nu_all()))
            }
            Source::GermGrain { law, arm_samples, .. } => {
                let d = mean_arm_counts(law, *arm_samples, seed)?;
                Ok((vec![Angle::EAST, Angle::NORTH, Angle::SOUTHWEST], d.iter().map(|x| lambda * x).collect()))
            }
        }
    }

    /// Limit weights `w*` and line process at germ intensity `lambda`.
    pub fn limit(&self, lambda: f64, seed: u64) -> Result<(WeightVector, LineProcessSpec)> {
        let (angles, nu) = self.directions(lambda, seed)?;
        let w = WeightVector::new(angles.clone(), solve_wstar_rates(&angles, &nu)?)?;
        let lp = LineProcessSpec::new(angles.iter().zip(&w.w).zip(&nu).map(|((&a, &wi), &n)| (a, wi * n)).collect())?;
        Ok((w, lp))
    }

    /// One realisation with `k` lives at germ intensity `lambda` on the plan's windows.
    pub fn simulate(&self, lambda: f64, k: u32, plan: &SimPlan, seed: u64) -> Result<SimResult> {
        match self {
            Source::Sites(spec) => {
                let sites = sample_sites(&spec.with_lambda(lambda)?, plan.sample_window, seed)?;
                simulate(&sites, k, &[], plan.options())
            }
            Source::GermGrain { law, centroid, .. } => {
                let gg = germ_grain(law, lambda, &plan.sample_window, k, *centroid, seed)?;
                simulate_motorcycles(gg.motorcycles, gg.obstacles, plan.options())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergeOptions {
    /// Measurement window `W`.
    pub window: Rect,
    /// Counts are averaged over a `tiles × tiles` block of translates of `W`.
    pub tiles: usize,
    pub replicates: usize,
    pub seed: u64,
    /// Margin in units of `max_φ w*_φ(λ/k)·√k`.
    pub margin_factor: f64,
    /// Intensity `λ` before dividing by `k`.
    pub lambda: f64,
}

impl ConvergeOptions {
    pub fn new(window: Rect, replicates: usize, seed: u64) -> Self {
        ConvergeOptions { window, tiles: 1, replicates, seed, margin_factor: 4.0, lambda: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionReport {
    pub angle: Angle,
    /// Mean number of trails of this direction entering a translate of `W` from outside.
    pub mean_count: f64,
    pub count_se: f64,
    /// Poisson mean of the limit process.
    pub limit_mean: f64,
    /// `(mean_count − limit_mean)/limit_mean`.
    pub rel_error: f64,
    /// Kolmogorov–Smirnov distance of pooled normalised offsets from uniform.
    pub ks: f64,
    /// Share of crossing trails whose origin lies within `√k·w*_φ(λ/k)` upstream of the window.
    pub strip_rate: f64,
    /// `mean(L^k)/(√k·w*_φ(λ/k))` over trails of this direction that died.
    pub concentration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeReport {
    pub k: u32,
    pub replicates: usize,
    pub per_direction: Vec<DirectionReport>,
}

fn across_interval(window: &Rect, phi: Angle) -> (f64, f64) {
    let n = phi.perp().vec();
    window.corners().iter().map(|c| c.dot(n)).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Kolmogorov–Smirnov distance of a sample in `[0, 1]` from the uniform law.
pub fn ks_uniform(sample: &mut [f64]) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &u)| ((i + 1) as f64 / n - u).max(u - i as f64 / n))
        .fold(0.0, f64::max)
}

struct Replicate {
    counts: Vec<usize>,
    offsets: Vec<Vec<f64>>,
    in_strip: Vec<usize>,
    length_sum: Vec<f64>,
    dead: Vec<usize>,
}

pub fn converge(source: &Source, k: u32, opts: &ConvergeOptions) -> Result<ConvergeReport> {
    if k < 1 || opts.replicates == 0 {
        return Err(Error::InvalidInput("need k >= 1 and at least one replicate".into()));
    }
    if opts.window.is_empty() || opts.tiles == 0 {
        return Err(Error::EmptyWindow);
    }
    let tiles: Vec<Rect> = (0..opts.tiles * opts.tiles)
        .map(|t| {
            let (i, j) = ((t % opts.tiles) as f64, (t / opts.tiles) as f64);
            let (w, h) = (opts.window.width(), opts.window.height());
            Rect::new(opts.window.xmin + i * w, opts.window.ymin + j * h, opts.window.xmax + i * w, opts.window.ymax + j * h)
        })
        .collect();
    let core = Rect::new(opts.window.xmin, opts.window.ymin, tiles[tiles.len() - 1].xmax, tiles[tiles.len() - 1].ymax);
    let scaled = opts.lambda / k as f64;
    let (w_scaled, _) = source.limit(scaled, opts.seed)?;
    let (_, lp) = source.limit(opts.lambda, opts.seed)?;
    let angles = w_scaled.angles.clone();
    let sqrt_k = (k as f64).sqrt();
    let margin = opts.margin_factor * w_scaled.w.iter().cloned().fold(0.0, f64::max) * sqrt_k;
    let plan = SimPlan::new(core, margin)?;
    let reps: Vec<Result<Replicate>> = (0..opts.replicates)
        .into_par_iter()
        .map(|r| {
            let res = source.simulate(scaled, k, &plan, opts.seed.wrapping_add(r as u64))?;
            let m = angles.len();
            let mut rep = Replicate {
                counts: vec![0; m],
                offsets: vec![Vec::new(); m],
                in_strip: vec![0; m],
                length_sum: vec![0.0; m],
                dead: vec![0; m],
            };
            for (bike, trail) in res.motorcycles.iter().zip(&res.trails) {
                let Some(d) = angles.iter().position(|a| a.approx_eq(bike.angle, 1e-9)) else { continue };
                if !trail.censored && plan.core.contains(bike.origin) {
                    rep.length_sum[d] += trail.length();
                    rep.dead[d] += 1;
                }
                if !core.intersects_segment(&trail.segment) {
                    continue;
                }
                let reach = sqrt_k * w_scaled.w[d];
                for tile in &tiles {
                    // A chain crossing the window enters it from outside; trails
                    // born inside have density `1/k` and vanish in the limit.
                    if tile.contains(bike.origin) || !tile.intersects_segment(&trail.segment) {
                        continue;
                    }
                    rep.counts[d] += 1;
                    let (lo, hi) = across_interval(tile, bike.angle);
                    rep.offsets[d].push((bike.origin.dot(bike.angle.perp().vec()) - lo) / (hi - lo));
                    let entry = tile.clip_line(bike.origin, bike.angle.vec()).map(|(t0, _)| t0.max(0.0));
                    if entry.is_some_and(|t| t <= reach) {
                        rep.in_strip[d] += 1;
                    }
                }
            }
            Ok(rep)
        })
        .collect();
    let reps: Vec<Replicate> = reps.into_iter().collect::<Result<_>>()?;
    let n = reps.len() as f64;
    let mut per_direction = Vec::new();
    for (d, &angle) in angles.iter().enumerate() {
        let per_tile = tiles.len() as f64;
        let counts: Vec<f64> = reps.iter().map(|r| r.counts[d] as f64 / per_tile).collect();
        let mean = counts.iter().sum::<f64>() / n;
        let var = if n > 1.0 { counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        let (lo, hi) = across_interval(&opts.window, angle);
        let limit_mean = lp.intensity_of(angle)? * (hi - lo);
        let mut offsets: Vec<f64> = reps.iter().flat_map(|r| r.offsets[d].iter().copied()).collect();
        let total: usize = reps.iter().map(|r| r.counts[d]).sum();
        let strip: usize = reps.iter().map(|r| r.in_strip[d]).sum();
        let dead: usize = reps.iter().map(|r| r.dead[d]).sum();
        let lsum: f64 = reps.iter().map(|r| r.length_sum[d]).sum();
        per_direction.push(DirectionReport {
            angle,
            mean_count: mean,
            count_se: (var / n).sqrt(),
            limit_mean,
            rel_error: if limit_mean > 0.0 { (mean - limit_mean) / limit_mean } else { 0.0 },
            ks: if offsets.is_empty() { 0.0 } else { ks_uniform(&mut offsets) },
            strip_rate: if total > 0 { strip as f64 / total as f64 } else { 0.0 },
            concentration: if dead > 0 { lsum / dead as f64 / (sqrt_k * w_scaled.w[d]) } else { 0.0 },
        });
    }
    Ok(ConvergeReport { k, replicates: reps.len(), per_direction })
}

/// Arrangement of one sample of the limit line process, drawn on `core ⊕ pad`.
pub fn sample_limit_mosaic(lp: &LineProcessSpec, core: &Rect, pad: f64, seed: u64) -> Result<MosaicGraph> {
    let bbox = core.expand(pad);
    let poly: Vec<Point> = bbox.corners().to_vec();
    let lines = sample_line_process(lp, &poly, seed)?;
    Ok(build_line_arrangement(&lines, &bbox))
}

/// Mean number of crossings between the segment and the limit lines, by Monte Carlo.
pub fn segment_crossings_mc(lp: &LineProcessSpec, body: &[Segment], replicates: usize, seed: u64) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for s in body {
        for p in [s.start, s.end] {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
    }
    if body.is_empty() {
        return Ok((0.0, 0.0));
    }
    let bbox = Rect::new(lo.x, lo.y, hi.x, hi.y).expand(1.0);
    let poly = bbox.corners().to_vec();
    let counts: Vec<f64> = (0..replicates.max(1))
        .into_par_iter()
        .map(|r| -> Result<f64> {
            let lines = sample_line_process(lp, &poly, seed.wrapping_add(r as u64))?;
            let mut n = 0usize;
            for l in &lines {
                let (o, d) = (l.foot(), l.direction.vec());
                for s in body {
                    let e = s.end - s.start;
                    let den = d.cross(e);
                    if den.abs() < 1e-15 {
                        continue;
                    }
                    let u = (s.start - o).cross(d) / den;
                    if (0.0..=1.0).contains(&u) {
                        n += 1;
                    }
                }
            }
            Ok(n as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let m = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / m;
    let var = if m > 1.0 { counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (m - 1.0) } else { 0.0 };
    Ok((mean, (var / m).sqrt()))
}

/// Face densities of the limit arrangement with horizontal and vertical
/// intensity `mu_rect` and diagonal intensity `mu_diag`, by sampling
/// `replicates` arrangements on `window` and counting faces by centroid.
pub fn polytrope_densities_mc(
    mu_rect: f64,
    mu_diag: f64,
    window: &Rect,
    replicates: usize,
    seed: u64,
) -> Result<PolytropeDensities> {
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if replicates == 0 {
        return Err(Error::InvalidInput("need at least one replicate".into()));
    }
    let mut dirs = vec![(Angle::EAST, mu_rect), (Angle::NORTH, mu_rect)];
    if mu_diag > 0.0 {
        dirs.push((Angle::new(std::f64::consts::FRAC_PI_4), mu_diag));
    }
    let lp = LineProcessSpec::new(dirs)?;
    // Faces with centroid in the window lie within a few mean cell widths of it.
    let pad = 8.0 / mu_rect;
    let per_rep: Vec<[f64; 4]> = (0..replicates)
        .into_par_iter()
        .map(|r| -> Result<[f64; 4]> {
            let g = sample_limit_mosaic(&lp, window, pad, seed.wrapping_add(r as u64))?;
            Ok(classify_polytropes(&g, window)?.intensity())
        })
        .collect::<Result<_>>()?;
    let n = per_rep.len() as f64;
    let mut p = [0.0; 4];
    let mut error = [0.0; 4];
    for i in 0..4 {
        let mean = per_rep.iter().map(|x| x[i]).sum::<f64>() / n;
        let var = if n > 1.0 { per_rep.iter().map(|x| (x[i] - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        p[i] = mean;
        error[i] = (var / n).sqrt();
    }
    Ok(PolytropeDensities { p, error, method: DensityMethod::MonteCarlo })
}
