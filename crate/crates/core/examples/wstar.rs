//! Limit weights `w*` and line intensities for a few angle-set laws.
use gilbert::geom::Angle;
use gilbert::limits::{expected_crossings, limit_measure, solve_wstar, tropical_constants};
use gilbert::procs::ModelSpec;

fn show(name: &str, spec: &ModelSpec) -> gilbert::Result<()> {
    let w = solve_wstar(spec)?;
    let lp = limit_measure(spec, &w)?;
    println!("{name}");
    for (i, &phi) in spec.angles.iter().enumerate() {
        // At the fixed point every direction expects exactly one crossing.
        let e = expected_crossings(spec, &w, phi)?;
        println!("  {:>6.1}°  w* = {:.9}  line intensity = {:.9}  E[crossings] = {e:.12}", phi.degrees(), w.w[i], lp.per_direction[i].1);
    }
    println!("  Λ = {:.9}", lp.lambda_total());
    Ok(())
}

fn main() -> gilbert::Result<()> {
    show("tropical lines", &ModelSpec::tropical_lines(1.0)?)?;
    let c = tropical_constants();
    println!("  closed forms: axis {:.9}, diagonal {:.9}", c.mu_axis, c.mu_diag);
    show("rectangular", &ModelSpec::rectangular(1.0)?)?;
    let angles = [0.0, 60.0, 150.0, 250.0].map(Angle::from_degrees).to_vec();
    let mixed = ModelSpec::from_set_law(2.0, angles, vec![(vec![0, 1], 0.5), (vec![2], 0.3), (vec![0, 2, 3], 0.2)])?;
    show("mixed angle sets at λ = 2", &mixed)?;
    Ok(())
}
