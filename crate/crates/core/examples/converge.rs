//! Rescaled mosaics `𝒢^k(λ/k)` against the Poisson line process of the limit.
use gilbert::geom::Rect;
use gilbert::procs::ModelSpec;
use gilbert::scaling::{converge, ConvergeOptions, Source};

fn main() -> gilbert::Result<()> {
    let source = Source::Sites(ModelSpec::tropical_lines(1.0)?);
    let mut opts = ConvergeOptions::new(Rect::square(30.0), 4, 3);
    opts.tiles = 4;
    opts.margin_factor = 2.0;
    for k in [2, 8, 32] {
        let r = converge(&source, k, &opts)?;
        for d in &r.per_direction {
            println!(
                "k={k:>2} {:>5.1}°: crossings {:.2} ± {:.2} vs {:.2} ({:+.2}%), KS {:.3}, strip {:.3}, L/(√k w*) {:.3}",
                d.angle.degrees(),
                d.mean_count,
                d.count_se,
                d.limit_mean,
                100.0 * d.rel_error,
                d.ks,
                d.strip_rate,
                d.concentration
            );
        }
    }
    Ok(())
}
