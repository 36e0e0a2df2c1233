//! Germ-grain input: random tropical curves whose bodies block and whose arms ride.
use gilbert::geom::Rect;
use gilbert::mosaic::{build_mosaic, census};
use gilbert::motorsim::{simulate_motorcycles, SimPlan};
use gilbert::tropical::{germ_grain, mean_arm_counts, CentroidKind, CurveLaw};

fn main() -> gilbert::Result<()> {
    let law = CurveLaw::Random { degrees: vec![1, 2, 3], spread: 1.0 };
    println!("mean arms (E, N, SW): {:?}", mean_arm_counts(&law, 5000, 1)?);
    let plan = SimPlan::new(Rect::square(20.0), 12.0)?;
    let gg = germ_grain(&law, 0.5, &plan.sample_window, 2, CentroidKind::MassCenter, 4)?;
    println!("germs {}, arms {}", gg.germs.len(), gg.motorcycles.len());
    let r = simulate_motorcycles(gg.motorcycles, gg.obstacles, plan.options())?;
    let g = build_mosaic(&r)?;
    let c = census(&g, &plan.core)?;
    println!("λ0 {:.3}, λ1 {:.3}, λ2 {:.3}, Euler {}", c.lambda0, c.lambda1, c.lambda2, g.euler_holds());
    for (kind, v) in &c.vertex_intensity {
        println!("  {:<14} {v:.3}", kind.name());
    }
    Ok(())
}
