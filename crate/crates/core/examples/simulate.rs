//! One realisation of the tropical-lines process with two lives, and its event log.
use gilbert::geom::Rect;
use gilbert::motorsim::{default_margin, simulate, SimPlan};
use gilbert::procs::{sample_sites, ModelSpec};

fn main() -> gilbert::Result<()> {
    let spec = ModelSpec::tropical_lines(1.0)?;
    let k = 2;
    let plan = SimPlan::new(Rect::square(15.0), default_margin(&spec, k)?)?;
    let sites = sample_sites(&spec, plan.sample_window, 42)?;
    let r = simulate(&sites, k, &[], plan.options())?;
    let fatal = r.events.iter().filter(|e| e.fatal).count();
    println!("sites {}, motorcycles {}, events {} ({fatal} fatal)", sites.len(), r.motorcycles.len(), r.events.len());
    println!("dead {}, censored {}", r.dead_count(), r.trails.iter().filter(|t| t.censored).count());
    for e in r.events.iter().take(5) {
        println!(
            "  victim {:>4} at ({:>7.3}, {:>7.3}) age {:.3}, hit #{}, fatal {}",
            e.victim, e.location.x, e.location.y, e.victim_age, e.order_index, e.fatal
        );
    }
    let mut csv = Vec::new();
    r.write_events_csv(&mut csv)?;
    println!("events.csv would hold {} bytes", csv.len());
    Ok(())
}
