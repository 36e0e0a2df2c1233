//! Polytrope face densities of the tropical limit line process.
use gilbert::limits::{polytrope_densities_integral, polytrope_vertex_intensity, tropical_constants, QuadOptions};

fn main() -> gilbert::Result<()> {
    let k = tropical_constants();
    let d = polytrope_densities_integral(k.mu_axis, k.mu_diag, QuadOptions::default())?;
    for (sides, (p, e)) in (3..).zip(d.p.iter().zip(&d.error)) {
        println!("p{sides} = {p:.10}  (error estimate {e:.1e})");
    }
    println!("sum = {:.12}, weighted sum = {:.12}", d.total(), d.weighted_total());
    println!("vertex intensity = {:.12}", polytrope_vertex_intensity(k.mu_axis, k.mu_diag));
    Ok(())
}
