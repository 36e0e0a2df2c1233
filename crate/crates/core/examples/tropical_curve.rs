//! A plane tropical cubic: its dual subdivision, bounded edges and arms.
use gilbert::geom::Rect;
use gilbert::tropical::{body_radius, curve, TropPoly};

fn main() -> gilbert::Result<()> {
    let f = TropPoly::parse(
        "0 3 3\n0 2 1\n1 2 1\n0 1 9\n1 1 0\n2 1 1\n0 0 3\n1 0 1\n2 0 8\n3 0 2\n",
    )?;
    let c = curve(&f)?;
    println!("subdivision cells:");
    for (cell, v) in c.subdivision.cells.iter().zip(&c.vertices) {
        println!("  {:?} -> vertex ({:.2}, {:.2})", cell.corners, v.x, v.y);
    }
    let used = c.subdivision.vertices();
    println!("unused lattice points: {:?}", [(0, 1), (2, 0)].iter().filter(|p| !used.contains(p)).collect::<Vec<_>>());
    for e in &c.edges {
        println!("  edge {} - {} multiplicity {}", e.a, e.b, e.multiplicity);
    }
    println!("arms per direction (E, N, SW): {:?}", c.arm_census());
    println!("body radius {:.3}, spread {}", body_radius(&c), f.spread());
    let svg = c.to_svg(&Rect::new(-12.0, -12.0, 12.0, 12.0));
    println!("svg: {} bytes", svg.len());
    Ok(())
}
