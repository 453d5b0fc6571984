//! Command-line pipeline: phantom generation, corruption, filtering,
//! assessment, replicated experiments and report emission.
//!
//! Every command is deterministic given its flags — seeds are explicit and
//! the wall clock is never consulted — and echoes its fully resolved
//! configuration to a `<output>.prov` sidecar. Exit codes: 0 on success,
//! 1 on runtime errors, 2 on validation errors.

use crate::distributions::Looks;
use crate::error::{Error, Result};
use crate::estimation::estimate_enl;
use crate::filters::{apply_filter, FilterMethod, FilterSpec, FitFallback};
use crate::image::Image;
use crate::io::format_f64;
use crate::io::fimg::{read_fimg, write_fimg};
use crate::io::keyval::{read_experiment, read_layout};
use crate::io::pgm::write_pgm;
use crate::io::provenance::write_provenance;
use crate::io::results::{
    read_results, record_to_csv, results_row, write_results, write_summary, RESULTS_HEADER,
};
use crate::metrics::{assess_with, AssessOptions, EdgeAggregation, Metric};
use crate::montecarlo::{
    conflict_report, run_replication, sort_canonically, summarize_all, ExperimentSpec,
    ReplicationResult,
};
use crate::phantom::{build_phantom, corrupt, PhantomLayout, Situation};
use crate::rng::Rng;
use crate::svg::render_boxplot_svg;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use std::collections::HashSet;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

#[derive(Debug, Parser)]
#[command(
    name = "specklab",
    version,
    about = "Speckle simulation, despeckling filters and replicated filter assessment"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render the noise-free phantom image
    Phantom(PhantomArgs),
    /// Corrupt the phantom with speckle under one situation
    Corrupt(CorruptArgs),
    /// Despeckle an image
    Filter(FilterArgs),
    /// Score a filtered image against its truth
    Assess(AssessArgs),
    /// Run a replicated experiment (situations x filters x replications)
    Mc(McArgs),
    /// Summaries, plots and the winner report from an existing results table
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    /// Layout file; the canonical 256x256 layout when omitted
    #[arg(long)]
    pub layout: Option<PathBuf>,
    /// Output image (FIMG)
    #[arg(long)]
    pub out: PathBuf,
    /// Optional lossy 16-bit PGM export for viewing
    #[arg(long)]
    pub pgm: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorruptArgs {
    /// Layout file; canonical when omitted
    #[arg(long)]
    pub layout: Option<PathBuf>,
    /// Situation id (0 = constant truth, 1..=6 heterogeneous)
    #[arg(long)]
    pub situation: u8,
    /// Number of looks of the speckle
    #[arg(long, default_value_t = 1.0)]
    pub looks: f64,
    /// Corruption seed
    #[arg(long)]
    pub seed: u64,
    /// Overrides the layout's contrast ratio
    #[arg(long)]
    pub contrast_ratio: Option<f64>,
    /// Output image (FIMG)
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the matching truth image (FIMG)
    #[arg(long)]
    pub truth_out: Option<PathBuf>,
    /// Optional lossy PGM export
    #[arg(long)]
    pub pgm: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Input image (FIMG)
    #[arg(long = "in")]
    pub input: PathBuf,
    /// lee, mapg0 or mapgh
    #[arg(long)]
    pub method: String,
    /// Odd window side length
    #[arg(long, default_value_t = 7)]
    pub window: usize,
    /// Number of looks assumed by the filter
    #[arg(long, default_value_t = 1.0, conflicts_with = "estimate_looks")]
    pub looks: f64,
    /// Estimate the looks from the layout's homogeneous block instead
    #[arg(long)]
    pub estimate_looks: bool,
    /// Layout providing the homogeneous block for --estimate-looks
    #[arg(long)]
    pub layout: Option<PathBuf>,
    /// window-mean or identity: output when a local moment fit fails
    #[arg(long, default_value = "window-mean")]
    pub fallback: String,
    /// Output image (FIMG)
    #[arg(long)]
    pub out: PathBuf,
    /// Optional lossy PGM export
    #[arg(long)]
    pub pgm: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AssessArgs {
    /// Filtered image (FIMG)
    #[arg(long)]
    pub filtered: PathBuf,
    /// Truth image (FIMG)
    #[arg(long)]
    pub truth: PathBuf,
    /// Layout providing the regions of interest; canonical when omitted
    #[arg(long)]
    pub layout: Option<PathBuf>,
    /// widest (default) or wide-strips: which edges contribute
    #[arg(long, default_value = "widest")]
    pub edges: String,
    /// Output CSV (one record)
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Experiment spec file; the documented default experiment when omitted
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Results CSV
    #[arg(long)]
    pub out: PathBuf,
    /// Boxplot summary CSV (default: `<out stem>_summary.csv`)
    #[arg(long)]
    pub summary_out: Option<PathBuf>,
    /// Directory for the per-metric SVG panels (default: next to --out)
    #[arg(long)]
    pub svg_dir: Option<PathBuf>,
    /// Winner report (default: `<out stem>_conflicts.txt`)
    #[arg(long)]
    pub conflicts_out: Option<PathBuf>,
    /// Worker threads (default: one per core)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Continue from a partial results file left by an interrupted run
    #[arg(long)]
    pub resume: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Results CSV produced by mc
    #[arg(long)]
    pub results: PathBuf,
    /// Boxplot summary CSV (default: `<results stem>_summary.csv`)
    #[arg(long)]
    pub summary_out: Option<PathBuf>,
    /// Directory for the per-metric SVG panels (default: next to --results)
    #[arg(long)]
    pub svg_dir: Option<PathBuf>,
    /// Winner report (default: `<results stem>_conflicts.txt`)
    #[arg(long)]
    pub conflicts_out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Phantom(args) => cmd_phantom(args),
        Command::Corrupt(args) => cmd_corrupt(args),
        Command::Filter(args) => cmd_filter(args),
        Command::Assess(args) => cmd_assess(args),
        Command::Mc(args) => cmd_mc(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn load_layout(path: &Option<PathBuf>) -> Result<(PhantomLayout, String)> {
    match path {
        Some(p) => Ok((read_layout(p)?, p.display().to_string())),
        None => Ok((PhantomLayout::canonical(), "canonical".to_string())),
    }
}

// The sidecar must suffice to re-run the artifact byte-identically, so the
// geometry goes in whole rather than as a path that may change underneath.
fn push_layout_geometry(layout: &PhantomLayout, entries: &mut Vec<(&'static str, String)>) {
    entries.push(("width", layout.width.to_string()));
    entries.push(("height", layout.height.to_string()));
    entries.push(("strip_rows", format!("{}..{}", layout.strip_row_start, layout.strip_row_end)));
    entries.push((
        "strips",
        layout
            .strips
            .iter()
            .map(|s| format!("{}@{}", s.width, s.col))
            .collect::<Vec<_>>()
            .join(","),
    ));
    entries.push(("point_row", layout.point_row.to_string()));
    entries.push((
        "point_cols",
        layout.point_cols.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
    ));
    let hb = layout.homogeneous_block;
    entries.push(("homogeneous_block", format!("{},{},{},{}", hb.x0, hb.y0, hb.x1, hb.y1)));
}

fn export_pgm(
    image: &Image,
    pgm: &Option<PathBuf>,
    entries: &mut Vec<(&'static str, String)>,
) -> Result<()> {
    if let Some(path) = pgm {
        let quant = write_pgm(path, image)?;
        entries.push(("pgm", path.display().to_string()));
        entries.push(("pgm_min", format_f64(quant.min)));
        entries.push(("pgm_max", format_f64(quant.max)));
    }
    Ok(())
}

fn cmd_phantom(args: PhantomArgs) -> Result<()> {
    let (layout, layout_ref) = load_layout(&args.layout)?;
    let image = build_phantom(&layout)?;
    write_fimg(&args.out, &image)?;
    let mut entries = vec![
        ("command", "phantom".to_string()),
        ("layout", layout_ref),
        ("out", args.out.display().to_string()),
        ("background_mean", format_f64(layout.background_mean)),
        ("contrast_ratio", format_f64(layout.contrast_ratio)),
    ];
    push_layout_geometry(&layout, &mut entries);
    export_pgm(&image, &args.pgm, &mut entries)?;
    write_provenance(&args.out, &entries)
}

fn cmd_corrupt(args: CorruptArgs) -> Result<()> {
    let (mut layout, layout_ref) = load_layout(&args.layout)?;
    if let Some(ratio) = args.contrast_ratio {
        layout = layout.with_contrast_ratio(ratio);
    }
    let looks = Looks::new(args.looks)?;
    let situation =
        Situation::standard(args.situation, looks, layout.contrast_ratio, layout.background_mean)?;
    let truth_layout = situation.truth_layout(&layout)?;
    let image = corrupt(&truth_layout, &situation, &mut Rng::from_seed(args.seed))?;
    write_fimg(&args.out, &image)?;
    if let Some(truth_path) = &args.truth_out {
        write_fimg(truth_path, &build_phantom(&truth_layout)?)?;
    }
    let mut entries = vec![
        ("command", "corrupt".to_string()),
        ("layout", layout_ref),
        ("situation", args.situation.to_string()),
        ("looks", format_f64(args.looks)),
        ("seed", args.seed.to_string()),
        ("contrast_ratio", format_f64(layout.contrast_ratio)),
        ("background_mean", format_f64(truth_layout.background_mean)),
        ("out", args.out.display().to_string()),
    ];
    push_layout_geometry(&truth_layout, &mut entries);
    if let Some(p) = &args.truth_out {
        entries.push(("truth_out", p.display().to_string()));
    }
    export_pgm(&image, &args.pgm, &mut entries)?;
    write_provenance(&args.out, &entries)
}

fn cmd_filter(args: FilterArgs) -> Result<()> {
    let image = read_fimg(&args.input)?;
    let method = FilterMethod::parse(&args.method)?;
    let fallback = FitFallback::parse(&args.fallback)?;

    let mut entries = vec![
        ("command", "filter".to_string()),
        ("in", args.input.display().to_string()),
        ("method", method.name().to_string()),
        ("window", args.window.to_string()),
        ("fallback", fallback.name().to_string()),
    ];
    let looks = if args.estimate_looks {
        let (layout, layout_ref) = load_layout(&args.layout)?;
        layout.validate()?;
        let estimated = estimate_enl(&layout.homogeneous_block.extract(&image))?;
        // An empirical equivalent number of looks can dip below the
        // single-look floor on noisy blocks; the model requires L >= 1.
        let clamped = estimated.max(1.0);
        entries.push(("looks_source", format!("estimated from {layout_ref}")));
        entries.push(("estimated_enl", format_f64(estimated)));
        entries.push(("looks", format_f64(clamped)));
        Looks::new(clamped)?
    } else {
        entries.push(("looks_source", "flag".to_string()));
        entries.push(("looks", format_f64(args.looks)));
        Looks::new(args.looks)?
    };

    let spec = FilterSpec::new(method, args.window, looks)?.with_fallback(fallback);
    let filtered = apply_filter(&image, &spec)?;
    write_fimg(&args.out, &filtered)?;
    entries.push(("out", args.out.display().to_string()));
    export_pgm(&filtered, &args.pgm, &mut entries)?;
    write_provenance(&args.out, &entries)
}

fn cmd_assess(args: AssessArgs) -> Result<()> {
    let filtered = read_fimg(&args.filtered)?;
    let truth = read_fimg(&args.truth)?;
    let (layout, layout_ref) = load_layout(&args.layout)?;
    let edges = match args.edges.as_str() {
        "widest" => EdgeAggregation::WidestStrip,
        "wide-strips" => EdgeAggregation::AllWideStrips,
        other => {
            return Err(Error::Validation(vec![format!(
                "unknown edge mode '{other}' (expected widest or wide-strips)"
            )]))
        }
    };
    let record = assess_with(&filtered, &layout, &truth, AssessOptions { edges })?;
    fs::write(&args.out, record_to_csv(&record))?;
    let entries = vec![
        ("command", "assess".to_string()),
        ("filtered", args.filtered.display().to_string()),
        ("truth", args.truth.display().to_string()),
        ("layout", layout_ref),
        ("edges", args.edges.clone()),
        ("out", args.out.display().to_string()),
    ];
    write_provenance(&args.out, &entries)
}

fn derived_path(base: &Path, suffix: &str, extension: &str) -> PathBuf {
    let stem = base.file_stem().unwrap_or_default().to_string_lossy();
    base.with_file_name(format!("{stem}{suffix}.{extension}"))
}

fn partial_path(out: &Path) -> PathBuf {
    let name = out.file_name().unwrap_or_default().to_string_lossy();
    out.with_file_name(format!("{name}.partial"))
}

type PartialState = (Vec<ReplicationResult>, HashSet<(u8, u32)>);

/// Loads complete (situation, replication) groups from a partial results
/// file. A group is complete when every requested filter's row is present.
fn load_partial(path: &Path, spec: &ExperimentSpec) -> Result<PartialState> {
    let rows = read_results(path)?;
    let filters: HashSet<FilterMethod> = spec.filters.iter().copied().collect();
    let coordinates: HashSet<(u8, u32)> = spec.tasks().into_iter().collect();

    let mut kept = Vec::new();
    let mut done = HashSet::new();
    let mut groups: std::collections::BTreeMap<(u8, u32), Vec<ReplicationResult>> =
        std::collections::BTreeMap::new();
    for row in rows {
        if coordinates.contains(&(row.situation, row.replication)) {
            groups.entry((row.situation, row.replication)).or_default().push(row);
        }
    }
    for (coord, mut rows) in groups {
        rows.sort_by_key(|r| r.filter);
        rows.dedup_by_key(|r| r.filter);
        let have: HashSet<FilterMethod> = rows.iter().map(|r| r.filter).collect();
        if have == filters {
            kept.extend(rows);
            done.insert(coord);
        }
    }
    Ok((kept, done))
}

fn run_tasks_streaming(
    spec: &ExperimentSpec,
    tasks: &[(u8, u32)],
    partial: &Path,
    fresh: bool,
) -> Result<Vec<ReplicationResult>> {
    let mut file = fs::OpenOptions::new().create(true).append(true).open(partial)?;
    if fresh {
        writeln!(file, "{RESULTS_HEADER}")?;
        file.flush()?;
    }
    let sink = Mutex::new(file);

    let nested: Vec<Vec<ReplicationResult>> = tasks
        .par_iter()
        .map(|&(situation, replication)| {
            let rows = run_replication(spec, situation, replication)?;
            {
                // One lock per completed task keeps groups contiguous, so an
                // interrupted run loses at most the in-flight groups.
                let mut file = sink.lock().expect("sink lock");
                for row in &rows {
                    writeln!(file, "{}", results_row(row))?;
                }
                file.flush()?;
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

fn emit_reports(
    results: &[ReplicationResult],
    summary_out: &Path,
    svg_dir: &Path,
    conflicts_out: &Path,
) -> Result<()> {
    let summaries = summarize_all(results)?;
    write_summary(summary_out, &summaries)?;
    fs::create_dir_all(svg_dir)?;
    for metric in Metric::ALL {
        let svg = render_boxplot_svg(metric, &summaries);
        fs::write(svg_dir.join(format!("{}.svg", metric.name())), svg)?;
    }
    match conflict_report(results) {
        Ok(report) => fs::write(conflicts_out, report.to_string())?,
        Err(Error::InsufficientData(why)) => {
            eprintln!("skipping winner report: {why}");
        }
        Err(other) => return Err(other),
    }
    Ok(())
}

fn cmd_mc(args: McArgs) -> Result<()> {
    let (spec, spec_ref) = match &args.spec {
        Some(path) => (read_experiment(path)?, path.display().to_string()),
        None => (ExperimentSpec::default_run(), "default".to_string()),
    };
    spec.validate()?;

    let partial = partial_path(&args.out);
    let (existing, done) = if partial.exists() {
        if !args.resume {
            return Err(Error::Validation(vec![format!(
                "partial results file {} exists; pass --resume to continue or remove it",
                partial.display()
            )]));
        }
        load_partial(&partial, &spec)?
    } else {
        (Vec::new(), HashSet::new())
    };

    let tasks: Vec<(u8, u32)> =
        spec.tasks().into_iter().filter(|coord| !done.contains(coord)).collect();

    let run_all = || -> Result<Vec<ReplicationResult>> {
        run_tasks_streaming(&spec, &tasks, &partial, existing.is_empty())
    };
    let new_results = match args.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Validation(vec![format!("thread pool: {e}")]))?
            .install(run_all),
        None => run_all(),
    }?;

    let mut results = existing;
    results.extend(new_results);
    sort_canonically(&mut results);
    write_results(&args.out, &results)?;
    fs::remove_file(&partial)?;

    let summary_out =
        args.summary_out.clone().unwrap_or_else(|| derived_path(&args.out, "_summary", "csv"));
    let svg_dir = args
        .svg_dir
        .clone()
        .unwrap_or_else(|| args.out.parent().unwrap_or_else(|| Path::new(".")).to_path_buf());
    let conflicts_out = args
        .conflicts_out
        .clone()
        .unwrap_or_else(|| derived_path(&args.out, "_conflicts", "txt"));
    emit_reports(&results, &summary_out, &svg_dir, &conflicts_out)?;

    let filters: Vec<&str> = spec.sorted_filters().iter().map(|f| f.name()).collect();
    let situations: Vec<String> = spec.situations.iter().map(|s| s.to_string()).collect();
    let entries = vec![
        ("command", "mc".to_string()),
        ("spec", spec_ref),
        ("situations", situations.join(",")),
        ("filters", filters.join(",")),
        ("replications", spec.replications.to_string()),
        ("master_seed", spec.master_seed.to_string()),
        ("looks", format_f64(spec.looks.get())),
        ("window", spec.window.to_string()),
        ("contrast_ratio", format_f64(spec.contrast_ratio)),
        ("threads", args.threads.map_or("auto".to_string(), |n| n.to_string())),
        ("resumed", args.resume.to_string()),
        ("out", args.out.display().to_string()),
        ("summary_out", summary_out.display().to_string()),
        ("svg_dir", svg_dir.display().to_string()),
        ("conflicts_out", conflicts_out.display().to_string()),
    ];
    write_provenance(&args.out, &entries)
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let results = read_results(&args.results)?;
    if results.is_empty() {
        return Err(Error::InsufficientData("results file holds no rows".into()));
    }
    let summary_out = args
        .summary_out
        .clone()
        .unwrap_or_else(|| derived_path(&args.results, "_summary", "csv"));
    let svg_dir = args.svg_dir.clone().unwrap_or_else(|| {
        args.results.parent().unwrap_or_else(|| Path::new(".")).to_path_buf()
    });
    let conflicts_out = args
        .conflicts_out
        .clone()
        .unwrap_or_else(|| derived_path(&args.results, "_conflicts", "txt"));
    emit_reports(&results, &summary_out, &svg_dir, &conflicts_out)?;
    let entries = vec![
        ("command", "report".to_string()),
        ("results", args.results.display().to_string()),
        ("rows", results.len().to_string()),
        ("summary_out", summary_out.display().to_string()),
        ("svg_dir", svg_dir.display().to_string()),
        ("conflicts_out", conflicts_out.display().to_string()),
    ];
    write_provenance(&summary_out, &entries)
}
