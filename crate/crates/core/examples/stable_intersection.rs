//! Stable intersections of random curves count `d₁·d₂` points with multiplicity.
use gilbert::procs::stream_rng;
use gilbert::tropical::{curve, random_standard, stable_intersection};

fn main() -> gilbert::Result<()> {
    let mut rng = stream_rng(5, 0);
    for (d1, d2) in [(1, 1), (1, 3), (2, 2), (3, 4)] {
        let a = curve(&random_standard(d1, 4.0, &mut rng))?;
        let b = curve(&random_standard(d2, 4.0, &mut rng))?;
        let pts = stable_intersection(&a, &b, 9)?;
        let total: u32 = pts.iter().map(|p| p.1).sum();
        println!("degrees {d1} and {d2}: {} points, total multiplicity {total}", pts.len());
    }
    Ok(())
}
