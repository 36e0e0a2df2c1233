//! Driving randomness: compound Poisson sites with angle marks and
//! Poisson line processes with atomic direction measure.
//!
//! Randomness comes from ChaCha8 streams. One seed addresses a family of
//! independent streams, so replicate `r` of a run uses stream `r` of the
//! run seed (see [`stream_rng`]).

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::geom::{Angle, Line, Point, Rect, T_EPS};

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Poisson variate; a zero mean yields zero.
pub fn poisson<R: Rng>(rng: &mut R, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|p| p.sample(rng) as usize).unwrap_or(0)
}

/// Law of the marked sites: intensity, angle list, multiplicity law `π_m`,
/// and for each `m` a law `A^m` on `m`-subsets of the angle list.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub lambda: f64,
    pub angles: Vec<Angle>,
    /// `multiplicity_probs[m - 1] = π_m`.
    pub multiplicity_probs: Vec<f64>,
    /// `angle_set_law[m - 1]` lists `(sorted index set of size m, probability)`.
    pub angle_set_law: Vec<Vec<(Vec<usize>, f64)>>,
}

impl ModelSpec {
    pub fn new(
        lambda: f64,
        angles: Vec<Angle>,
        multiplicity_probs: Vec<f64>,
        angle_set_law: Vec<Vec<(Vec<usize>, f64)>>,
    ) -> Result<Self> {
        let spec = ModelSpec { lambda, angles, multiplicity_probs, angle_set_law };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds `π` and `A^m` from a law on angle sets given directly.
    pub fn from_set_law(lambda: f64, angles: Vec<Angle>, sets: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let m_max = angles.len();
        let mut pi = vec![0.0; m_max];
        let mut law: Vec<Vec<(Vec<usize>, f64)>> = vec![Vec::new(); m_max];
        for (mut q, p) in sets {
            q.sort_unstable();
            if q.is_empty() || q.len() > m_max {
                return Err(Error::InvalidInput(format!("angle set {q:?} has invalid size")));
            }
            pi[q.len() - 1] += p;
            law[q.len() - 1].push((q, p));
        }
        for (m, entries) in law.iter_mut().enumerate() {
            if pi[m] > 0.0 {
                for e in entries.iter_mut() {
                    e.1 /= pi[m];
                }
            }
        }
        ModelSpec::new(lambda, angles, pi, law)
    }

    /// Every site launches motorcycles east, north and southwest.
    pub fn tropical_lines(lambda: f64) -> Result<Self> {
        let angles = vec![Angle::EAST, Angle::NORTH, Angle::SOUTHWEST];
        ModelSpec::from_set_law(lambda, angles, vec![(vec![0, 1, 2], 1.0)])
    }

    /// Every site launches motorcycles east, north, west and south.
    pub fn rectangular(lambda: f64) -> Result<Self> {
        let angles = vec![Angle::EAST, Angle::NORTH, Angle::WEST, Angle::SOUTH];
        ModelSpec::from_set_law(lambda, angles, vec![(vec![0, 1, 2, 3], 1.0)])
    }

    /// Every site carries the full angle list.
    pub fn full_sets(lambda: f64, angles: Vec<Angle>) -> Result<Self> {
        let all = (0..angles.len()).collect();
        ModelSpec::from_set_law(lambda, angles, vec![(all, 1.0)])
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        ModelSpec::new(lambda, self.angles.clone(), self.multiplicity_probs.clone(), self.angle_set_law.clone())
    }

    fn validate(&self) -> Result<()> {
        let m_max = self.angles.len();
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidInput(format!("intensity must be positive, got {}", self.lambda)));
        }
        if m_max == 0 {
            return Err(Error::InvalidInput("empty angle list".into()));
        }
        for i in 0..m_max {
            for j in 0..i {
                if self.angles[i].approx_eq(self.angles[j], T_EPS) {
                    return Err(Error::InvalidInput(format!("duplicate angle {}", self.angles[i])));
                }
            }
        }
        if self.multiplicity_probs.len() != m_max || self.angle_set_law.len() != m_max {
            return Err(Error::InvalidInput("multiplicity law must have one entry per m in 1..=M".into()));
        }
        let total: f64 = self.multiplicity_probs.iter().sum();
        if self.multiplicity_probs.iter().any(|&p| !(p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("multiplicity probabilities must sum to 1, got {total}")));
        }
        for (m0, entries) in self.angle_set_law.iter().enumerate() {
            let m = m0 + 1;
            let mut mass = 0.0;
            for (q, p) in entries {
                let sorted = q.windows(2).all(|w| w[0] < w[1]);
                if q.len() != m || !sorted || q.iter().any(|&i| i >= m_max) || !(*p >= 0.0) {
                    return Err(Error::InvalidInput(format!("bad angle set {q:?} for multiplicity {m}")));
                }
                mass += p;
            }
            if self.multiplicity_probs[m0] > 0.0 && (mass - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!("law A^{m} sums to {mass}, not 1")));
            }
        }
        self.check_no_parallel_line()
    }

    /// Two supported directions that are neither equal nor opposite must exist.
    pub fn check_no_parallel_line(&self) -> Result<()> {
        let live: Vec<usize> = (0..self.angles.len()).filter(|&i| self.nu(i) > 0.0).collect();
        let ok = live
            .iter()
            .any(|&i| live.iter().any(|&j| !self.angles[i].is_parallel(self.angles[j])));
        if ok {
            Ok(())
        } else {
            Err(Error::NoParallelLine(
                "need two directions with positive intensity that are not parallel".into(),
            ))
        }
    }

    pub fn num_angles(&self) -> usize {
        self.angles.len()
    }

    pub fn index_of(&self, phi: Angle) -> Result<usize> {
        self.angles
            .iter()
            .position(|a| a.approx_eq(phi, 1e-12))
            .ok_or(Error::UnknownAngle(phi.radians()))
    }

    /// `μ_Q = λ·π_{|Q|}·A^{|Q|}(Q)` for a sorted index set.
    pub fn mu_indices(&self, q: &[usize]) -> f64 {
        if q.is_empty() || q.len() > self.angles.len() {
            return 0.0;
        }
        let m0 = q.len() - 1;
        let a: f64 = self.angle_set_law[m0].iter().filter(|(s, _)| s == q).map(|(_, p)| p).sum();
        self.lambda * self.multiplicity_probs[m0] * a
    }

    /// `μ_Q` for a set of angles; unknown angles are an error.
    pub fn mu_of(&self, q: &[Angle]) -> Result<f64> {
        let mut idx = q.iter().map(|&a| self.index_of(a)).collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        idx.dedup();
        if idx.len() != q.len() {
            return Err(Error::InvalidInput("angle set has repeated angles".into()));
        }
        Ok(self.mu_indices(&idx))
    }

    /// All angle sets with positive mass, with their `μ_Q`.
    pub fn supported_sets(&self) -> Vec<(Vec<usize>, f64)> {
        let mut out = Vec::new();
        for (m0, entries) in self.angle_set_law.iter().enumerate() {
            for (q, p) in entries {
                let mu = self.lambda * self.multiplicity_probs[m0] * p;
                if mu > 0.0 {
                    out.push((q.clone(), mu));
                }
            }
        }
        out
    }

    /// `ν_φ = Σ_{Q ∋ φ} μ_Q`, the intensity of motorcycles with direction `angles[i]`.
    pub fn nu(&self, i: usize) -> f64 {
        self.supported_sets().iter().filter(|(q, _)| q.contains(&i)).map(|(_, mu)| mu).sum()
    }

    pub fn nu_all(&self) -> Vec<f64> {
        (0..self.angles.len()).map(|i| self.nu(i)).collect()
    }

    pub fn mean_multiplicity(&self) -> f64 {
        self.multiplicity_probs.iter().enumerate().map(|(m0, p)| (m0 + 1) as f64 * p).sum()
    }

    /// No isolated sites, and consecutive angle gaps at most π for every supported set.
    pub fn is_mosaic_grade(&self) -> bool {
        if self.multiplicity_probs[0] > 0.0 {
            return false;
        }
        self.supported_sets().iter().all(|(q, _)| {
            let mut a: Vec<f64> = q.iter().map(|&i| self.angles[i].radians()).collect();
            a.sort_by(f64::total_cmp);
            let n = a.len();
            (0..n).all(|i| {
                let gap = if i + 1 < n { a[i + 1] - a[i] } else { a[0] + std::f64::consts::TAU - a[n - 1] };
                gap <= std::f64::consts::PI + T_EPS
            })
        })
    }

    fn draw_set<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        let m0 = categorical(rng, &self.multiplicity_probs);
        let entries = &self.angle_set_law[m0];
        let weights: Vec<f64> = entries.iter().map(|(_, p)| *p).collect();
        entries[categorical(rng, &weights)].0.clone()
    }
}

fn categorical<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    pub location: Point,
    /// Sorted indices into [`SitePattern::angles`].
    pub angle_set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SitePattern {
    pub window: Rect,
    pub angles: Vec<Angle>,
    pub sites: Vec<Site>,
}

impl SitePattern {
    pub fn new(window: Rect, angles: Vec<Angle>, sites: Vec<Site>) -> Result<Self> {
        for s in &sites {
            if s.angle_set.is_empty() || s.angle_set.iter().any(|&i| i >= angles.len()) {
                return Err(Error::InvalidInput(format!("site {} has invalid angle set", s.location)));
            }
        }
        Ok(SitePattern { window, angles, sites })
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// CSV with columns `x, y, angle_indices` (indices separated by `;`).
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["x", "y", "angle_indices"])?;
        for s in &self.sites {
            let idx: Vec<String> = s.angle_set.iter().map(|i| i.to_string()).collect();
            wr.write_record([s.location.x.to_string(), s.location.y.to_string(), idx.join(";")])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, window: Rect, angles: Vec<Angle>) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut sites = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let num = |k: usize| -> Result<f64> {
                rec.get(k)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::InvalidInput(format!("bad site record {rec:?}")))
            };
            let set = rec
                .get(2)
                .unwrap_or("")
                .split(';')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::InvalidInput(format!("bad angle indices: {e}")))?;
            sites.push(Site { location: Point::new(num(0)?, num(1)?), angle_set: set });
        }
        SitePattern::new(window, angles, sites)
    }
}

/// Samples the marked sites on `window`.
///
/// Draw order: site count, then per site `x`, `y`, multiplicity and angle set.
pub fn sample_sites(spec: &ModelSpec, window: Rect, seed: u64) -> Result<SitePattern> {
    sample_sites_with(spec, window, &mut stream_rng(seed, 0))
}

pub fn sample_sites_with<R: Rng>(spec: &ModelSpec, window: Rect, rng: &mut R) -> Result<SitePattern> {
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let n = poisson(rng, spec.lambda * window.area());
    let mut sites = Vec::with_capacity(n);
    for _ in 0..n {
        let x = window.xmin + rng.random::<f64>() * window.width();
        let y = window.ymin + rng.random::<f64>() * window.height();
        let angle_set = spec.draw_set(rng);
        sites.push(Site { location: Point::new(x, y), angle_set });
    }
    Ok(SitePattern { window, angles: spec.angles.clone(), sites })
}

/// Poisson line process given by its per-direction line intensities.
///
/// Lines with direction `φ` have normal `φ^⊥`; their offsets along `φ^⊥`
/// form a Poisson process of the direction's intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct LineProcessSpec {
    pub per_direction: Vec<(Angle, f64)>,
}

impl LineProcessSpec {
    pub fn new(per_direction: Vec<(Angle, f64)>) -> Result<Self> {
        if per_direction.iter().any(|&(_, v)| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput("line intensities must be finite and nonnegative".into()));
        }
        Ok(LineProcessSpec { per_direction })
    }

    /// `Λ`, the total line intensity.
    pub fn lambda_total(&self) -> f64 {
        self.per_direction.iter().map(|(_, v)| v).sum()
    }

    /// `Θ`: mass at each normal direction `φ + π/2`.
    pub fn theta(&self) -> Vec<(Angle, f64)> {
        let total = self.lambda_total();
        self.per_direction
            .iter()
            .map(|&(a, v)| (a.perp(), if total > 0.0 { v / total } else { 0.0 }))
            .collect()
    }

    pub fn intensity_of(&self, phi: Angle) -> Result<f64> {
        self.per_direction
            .iter()
            .find(|(a, _)| a.approx_eq(phi, 1e-12))
            .map(|(_, v)| *v)
            .ok_or(Error::UnknownAngle(phi.radians()))
    }

    /// Expected number of direction-`phi` lines hitting a convex polygon.
    pub fn expected_hits(&self, phi: Angle, window: &[Point]) -> Result<f64> {
        let (lo, hi) = projection(window, phi.perp().vec());
        Ok(self.intensity_of(phi)? * (hi - lo))
    }

    /// Intensity of crossing points between direction classes `i` and `j`.
    pub fn crossing_intensity(&self, i: usize, j: usize) -> f64 {
        let (a, va) = self.per_direction[i];
        let (b, vb) = self.per_direction[j];
        va * vb * (a.radians() - b.radians()).sin().abs()
    }
}

fn projection(poly: &[Point], axis: Point) -> (f64, f64) {
    poly.iter().map(|p| p.dot(axis)).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

/// Lines of the process hitting the convex polygon `window`, direction by direction.
pub fn sample_line_process(lp: &LineProcessSpec, window: &[Point], seed: u64) -> Result<Vec<Line>> {
    sample_line_process_with(lp, window, &mut stream_rng(seed, 0))
}

pub fn sample_line_process_with<R: Rng>(lp: &LineProcessSpec, window: &[Point], rng: &mut R) -> Result<Vec<Line>> {
    if window.len() < 3 {
        return Err(Error::TooFewPoints(window.len()));
    }
    let mut lines = Vec::new();
    for &(phi, intensity) in &lp.per_direction {
        let (lo, hi) = projection(window, phi.perp().vec());
        let n = poisson(rng, intensity * (hi - lo));
        for _ in 0..n {
            lines.push(Line::new(phi, lo + rng.random::<f64>() * (hi - lo)));
        }
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn mu_examples() {
        let t = ModelSpec::tropical_lines(2.5).unwrap();
        assert_eq!(t.mu_of(&[Angle::EAST, Angle::NORTH, Angle::SOUTHWEST]).unwrap(), 2.5);
        assert_eq!(t.mu_of(&[Angle::EAST]).unwrap(), 0.0);
        assert!(matches!(t.mu_of(&[Angle::WEST]), Err(Error::UnknownAngle(_))));
        let r = ModelSpec::rectangular(1.0).unwrap();
        assert_eq!(r.mu_indices(&[0, 1, 2, 3]), 1.0);
        assert_eq!(t.nu_all(), vec![2.5; 3]);
        assert!(t.is_mosaic_grade() && r.is_mosaic_grade());
    }

    #[test]
    fn antiparallel_only_spec_is_rejected() {
        let e = ModelSpec::full_sets(1.0, vec![Angle::EAST, Angle::WEST]);
        assert!(matches!(e, Err(Error::NoParallelLine(_))));
    }

    #[test]
    fn sampling_is_deterministic_and_marked() {
        let spec = ModelSpec::tropical_lines(10.0).unwrap();
        let a = sample_sites(&spec, Rect::square(1.0), 7).unwrap();
        let b = sample_sites(&spec, Rect::square(1.0), 7).unwrap();
        assert_eq!(a, b);
        assert!(a.sites.iter().all(|s| s.angle_set == vec![0, 1, 2]));
        assert!(a.sites.iter().all(|s| a.window.contains(s.location)));
        assert!(sample_sites(&spec, Rect::new(0.0, 0.0, 0.0, 1.0), 1).is_err());
    }

    #[test]
    fn site_count_moments() {
        let spec = ModelSpec::tropical_lines(10.0).unwrap();
        let reps = 10_000;
        let counts: Vec<f64> = (0..reps)
            .map(|r| sample_sites_with(&spec, Rect::square(1.0), &mut stream_rng(3, r)).unwrap().len() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / reps as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        assert!((mean - 10.0).abs() < 3.0 * (10.0 / reps as f64).sqrt(), "mean {mean}");
        // sd of the sample variance of Poisson(10) is about sqrt((10 + 2*100)/n)
        assert!((var - 10.0).abs() < 3.0 * (210.0 / reps as f64).sqrt(), "var {var}");
    }

    #[test]
    fn csv_round_trip() {
        let spec = ModelSpec::rectangular(5.0).unwrap();
        let p = sample_sites(&spec, Rect::square(2.0), 11).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let back = SitePattern::read_csv(&buf[..], p.window, p.angles.clone()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn line_process_counts() {
        let lp = LineProcessSpec::new(vec![(Angle::EAST, 1.5), (Angle::new(std::f64::consts::FRAC_PI_4), 2.0), (Angle::NORTH, 0.0)]).unwrap();
        let sq = Rect::square(1.0).corners();
        assert!((lp.expected_hits(Angle::new(std::f64::consts::FRAC_PI_4), &sq).unwrap() - 2.0 * SQRT_2).abs() < 1e-12);
        let reps = 4000;
        let mut north = 0;
        let mut total = 0.0;
        for r in 0..reps {
            let lines = sample_line_process_with(&lp, &sq, &mut stream_rng(5, r)).unwrap();
            north += lines.iter().filter(|l| l.direction == Angle::NORTH).count();
            total += lines.len() as f64;
            assert!(lines.iter().all(|l| l.clip(&Rect::square(1.0)).is_some()));
        }
        assert_eq!(north, 0);
        let mean = total / reps as f64;
        let want = 1.5 + 2.0 * SQRT_2;
        assert!((mean - want).abs() < 3.0 * (want / reps as f64).sqrt());
        let th: f64 = lp.theta().iter().map(|t| t.1).sum();
        assert!((th - 1.0).abs() < 1e-12);
    }
}
