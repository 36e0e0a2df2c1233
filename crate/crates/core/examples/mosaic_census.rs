//! Vertex, edge and face intensities of `𝒢^k` for the tropical-lines and
//! rectangular models, next to the mass-transport values.
use gilbert::geom::Rect;
use gilbert::mosaic::{build_mosaic, census};
use gilbert::motorsim::{default_margin, simulate, SimPlan};
use gilbert::procs::{sample_sites, ModelSpec};

fn main() -> gilbert::Result<()> {
    for (name, spec) in [("tropical", ModelSpec::tropical_lines(1.0)?), ("rectangular", ModelSpec::rectangular(1.0)?)] {
        let m = spec.mean_multiplicity();
        for k in 1..=3u32 {
            let plan = SimPlan::new(Rect::square(40.0), default_margin(&spec, k)?)?;
            let sites = sample_sites(&spec, plan.sample_window, 7 + k as u64)?;
            let g = build_mosaic(&simulate(&sites, k, &[], plan.options())?)?;
            let c = census(&g, &plan.core)?;
            let kf = k as f64;
            println!(
                "{name:<11} k={k}: λ0 {:.3} ({:.0})  λ1 {:.3} ({:.0})  λ2 {:.3} ({:.0})  Euler {}",
                c.lambda0,
                1.0 + m * kf,
                c.lambda1,
                2.0 * m * kf,
                c.lambda2,
                m * kf - 1.0,
                g.euler_holds()
            );
        }
    }
    Ok(())
}
