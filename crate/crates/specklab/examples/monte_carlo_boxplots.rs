//! A compact replicated experiment: three situations, three filters, 20
//! seeded replications. Emits the results table, boxplot summaries, one SVG
//! panel per measure and the per-replication winner report.
//!
//! ```bash
//! cargo run --example monte_carlo_boxplots [output-dir]
//! ```
//!
//! The full seven-situation, 100-replication run is available from the CLI:
//! `specklab mc --out results.csv`.

use specklab::metrics::Metric;
use specklab::montecarlo::{conflict_report, run_experiment, summarize_all, ExperimentSpec};
use specklab::io::results::{write_results, write_summary};
use specklab::svg::render_boxplot_svg;

use std::path::PathBuf;
use std::time::Instant;

fn main() -> specklab::Result<()> {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("specklab-demo"));
    std::fs::create_dir_all(&out_dir)?;

    let mut spec = ExperimentSpec::default_run();
    spec.situations = vec![0, 1, 3];
    spec.replications = 20;

    let start = Instant::now();
    let results = run_experiment(&spec)?;
    println!(
        "{} records ({} situations x {} filters x {} replications) in {:.1?}",
        results.len(),
        spec.situations.len(),
        spec.filters.len(),
        spec.replications,
        start.elapsed()
    );

    write_results(&out_dir.join("results.csv"), &results)?;
    let summaries = summarize_all(&results)?;
    write_summary(&out_dir.join("summary.csv"), &summaries)?;
    for metric in Metric::ALL {
        let path = out_dir.join(format!("{}.svg", metric.name()));
        std::fs::write(&path, render_boxplot_svg(metric, &summaries))?;
    }

    println!("\nfive-number summaries of the equivalent number of looks:");
    println!(
        "{:>10} {:>6} {:>9} {:>9} {:>9} {:>9} {:>9} {:>4}",
        "situation", "filter", "min", "q1", "median", "q3", "max", "out"
    );
    for s in summaries.iter().filter(|s| s.metric == Metric::Enl) {
        println!(
            "{:>10} {:>6} {:>9.3} {:>9.3} {:>9.3} {:>9.3} {:>9.3} {:>4}",
            s.situation,
            s.filter.name(),
            s.min,
            s.q1,
            s.median,
            s.q3,
            s.max,
            s.outliers.len()
        );
    }

    let report = conflict_report(&results)?;
    println!("\nper-replication winners (fraction of replications won):");
    print!("{report}");
    println!(
        "\nwrote results.csv, summary.csv and one SVG per measure to {}",
        out_dir.display()
    );
    Ok(())
}
