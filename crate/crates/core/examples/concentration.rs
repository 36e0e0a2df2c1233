//! Path lengths `L^k/√k` concentrate around `w*` as the number of lives grows.
use gilbert::geom::{Angle, Rect};
use gilbert::limits::solve_wstar;
use gilbert::motorsim::{default_margin, path_length_stats, simulate, SimPlan};
use gilbert::procs::{sample_sites, ModelSpec};

fn main() -> gilbert::Result<()> {
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ks = if args.is_empty() { vec![1, 4, 9, 25] } else { args };
    for k in ks {
        let spec = ModelSpec::tropical_lines(1.0)?;
        let w = solve_wstar(&spec)?;
        let plan = SimPlan::new(Rect::square(20.0), default_margin(&spec, k)?)?;
        let mut line = format!("k = {k:>3}:");
        for (i, phi) in [Angle::EAST, Angle::NORTH, Angle::SOUTHWEST].into_iter().enumerate() {
            let (mut sum, mut n) = (0.0, 0usize);
            for seed in 0..4 {
                let sites = sample_sites(&spec, plan.sample_window, seed)?;
                let r = simulate(&sites, k, &[], plan.options())?;
                let s = path_length_stats(&r, phi, &plan.core);
                sum += s.mean * s.count as f64;
                n += s.count;
            }
            let mean = sum / n as f64 / (k as f64).sqrt();
            line += &format!("  φ={:>5.1}°: L/√k = {mean:.4} (w* = {:.4}, ratio {:.4})", phi.degrees(), w.w[i], mean / w.w[i]);
        }
        println!("{line}");
    }
    Ok(())
}
