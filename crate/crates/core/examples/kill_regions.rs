//! Kill regions of the tropical-line directions at the limit weights.
//!
//! A motorcycle of direction `ψ` started inside `K(φ, ψ)` (translated to
//! `b`) crosses the path `[b, b + w_φ·φ]` before its own length `w_ψ` runs out.
use gilbert::geom::{kill_region, Angle, Point};
use gilbert::limits::solve_wstar;
use gilbert::procs::ModelSpec;

fn main() -> gilbert::Result<()> {
    let spec = ModelSpec::tropical_lines(1.0)?;
    let w = solve_wstar(&spec)?;
    for (i, &phi) in spec.angles.iter().enumerate() {
        for (j, &psi) in spec.angles.iter().enumerate() {
            if i == j {
                continue;
            }
            let k = kill_region(phi, psi, w.w[i], w.w[j])?;
            let corners: Vec<String> =
                k.translated_to(Point::new(0.0, 0.0)).iter().map(|p| format!("({:.3}, {:.3})", p.x, p.y)).collect();
            println!(
                "K({:>5.1}°, {:>5.1}°): area {:.6}  corners {}",
                phi.degrees(),
                psi.degrees(),
                k.area(),
                corners.join(" ")
            );
        }
    }
    let k = kill_region(Angle::EAST, Angle::NORTH, 1.0, 1.0)?;
    println!("unit weights east/north: area {:.3}, contains (0.7, -0.3): {}", k.area(), k.contains(Point::new(0.7, -0.3)));
    Ok(())
}
