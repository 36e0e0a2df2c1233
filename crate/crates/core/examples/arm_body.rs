//! Mean crossings of limit arms with a fixed body: formula against sampling.
use gilbert::limits::{arm_body_mean, body_orientation_lengths};
use gilbert::procs::stream_rng;
use gilbert::scaling::{segment_crossings_mc, Source};
use gilbert::tropical::{curve, mean_arm_counts, random_standard, CentroidKind, CurveLaw};

fn main() -> gilbert::Result<()> {
    let law = CurveLaw::Random { degrees: vec![1, 2, 3], spread: 1.0 };
    let d = mean_arm_counts(&law, 20_000, 2)?;
    let source = Source::GermGrain { law, centroid: CentroidKind::MassCenter, arm_samples: 20_000 };
    let (w, lp) = source.limit(1.0, 2)?;
    let body = curve(&random_standard(4, 3.0, &mut stream_rng(8, 0)))?.body_segments();
    let m = arm_body_mean(&body_orientation_lengths(&body), d, [w.w[0], w.w[1], w.w[2]], 1.0)?;
    let (mc, se) = segment_crossings_mc(&lp, &body, 4000, 3)?;
    println!("body of {} segments: formula {m:.4}, sampled {mc:.4} ± {se:.4}", body.len());
    Ok(())
}
