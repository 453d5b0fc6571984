//! The single-image assessment pitfall: scores all three filters on one
//! corrupted image, marks the per-measure winners, then repeats with a
//! second image to show the ranking flip that motivates replication.
//!
//! ```bash
//! cargo run --example single_image_scorecard
//! ```

use specklab::distributions::Looks;
use specklab::filters::{apply_filter, FilterMethod, FilterSpec};
use specklab::metrics::{assess, Metric, MetricRecord};
use specklab::phantom::{build_phantom, corrupt, PhantomLayout, Situation};
use specklab::rng::Rng;

fn scorecard(
    layout: &specklab::phantom::PhantomLayout,
    truth: &specklab::image::Image,
    corrupted: &specklab::image::Image,
    looks: Looks,
) -> specklab::Result<Vec<(FilterMethod, MetricRecord)>> {
    FilterMethod::ALL
        .iter()
        .map(|&method| {
            let spec = FilterSpec::new(method, 7, looks)?;
            let filtered = apply_filter(corrupted, &spec)?;
            Ok((method, assess(&filtered, layout, truth)?))
        })
        .collect()
}

fn print_scorecard(records: &[(FilterMethod, MetricRecord)]) {
    println!(
        "{:>8} {:>14} {:>14} {:>14} {:>14}",
        "filter", "ENL", "line pres.", "edge gradient", "edge variance"
    );
    for (method, record) in records {
        print!("{:>8}", method.name());
        for metric in Metric::ALL {
            let value = record.get(metric);
            let is_best = records
                .iter()
                .all(|(_, other)| !metric.better(other.get(metric), value));
            print!("{:>13.2}{}", value, if is_best { "*" } else { " " });
        }
        println!();
    }
}

fn main() -> specklab::Result<()> {
    let looks = Looks::new(1.0)?;
    let base = PhantomLayout::canonical();
    let situation = Situation::standard(3, looks, base.contrast_ratio, base.background_mean)?;
    let layout = situation.truth_layout(&base)?;
    let truth = build_phantom(&layout)?;

    for (label, seed) in [("image A", 101u64), ("image B", 102u64)] {
        let corrupted = corrupt(&layout, &situation, &mut Rng::from_seed(seed))?;
        let records = scorecard(&layout, &truth, &corrupted, looks)?;
        println!("--- {label} (seed {seed}), * = best per measure ---");
        print_scorecard(&records);
        println!();
    }
    println!(
        "The starred winners move between two images drawn from the same model —\n\
         single-image rankings are unreliable; see the monte_carlo_boxplots example."
    );
    Ok(())
}
