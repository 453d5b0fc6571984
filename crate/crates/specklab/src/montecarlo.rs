//! Replicated filter assessment: situations × filters × seeded replications,
//! with five-number boxplot summaries and a per-replication winner report.
//!
//! The replication unit is one corrupted image. All filters of a replication
//! see the same image, mirroring a per-image filter comparison and reducing
//! comparison variance. Seeds derive from the master seed and the
//! (situation, replication) coordinate only, never from the filter, and the
//! canonical result order is (situation, replication, filter) regardless of
//! how tasks were scheduled.

use crate::distributions::Looks;
use crate::error::{Error, Result};
use crate::filters::{apply_filter, FilterMethod, FilterSpec};
use crate::metrics::{assess, Metric, MetricRecord};
use crate::phantom::{build_phantom, corrupt, PhantomLayout, Situation};
use crate::rng::{mix64, Rng};

use rayon::prelude::*;

/// Master seed of the documented default experiment.
pub const DEFAULT_MASTER_SEED: u64 = 0x5EED_5EED;

/// Everything that determines an experiment's output.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub situations: Vec<u8>,
    pub filters: Vec<FilterMethod>,
    pub replications: u32,
    pub master_seed: u64,
    pub looks: Looks,
    pub window: usize,
    pub layout: PhantomLayout,
    pub contrast_ratio: f64,
}

impl ExperimentSpec {
    /// The default run: all seven situations, all three filters, 100
    /// replications of the canonical 256x256 layout at one look with 7x7
    /// windows.
    pub fn default_run() -> Self {
        ExperimentSpec {
            situations: (0..=6).collect(),
            filters: FilterMethod::ALL.to_vec(),
            replications: 100,
            master_seed: DEFAULT_MASTER_SEED,
            looks: Looks::new(1.0).expect("static value"),
            window: 7,
            layout: PhantomLayout::canonical(),
            contrast_ratio: 4.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if self.situations.is_empty() {
            violations.push("at least one situation is required".to_string());
        }
        if self.situations.iter().any(|&s| s > 6) {
            violations.push("situation ids must be 0..=6".to_string());
        }
        let mut dedup = self.situations.clone();
        dedup.sort_unstable();
        dedup.dedup();
        if dedup.len() != self.situations.len() {
            violations.push("situations must be distinct".to_string());
        }
        if self.filters.is_empty() {
            violations.push("at least one filter is required".to_string());
        }
        let mut fdedup = self.filters.clone();
        fdedup.sort();
        fdedup.dedup();
        if fdedup.len() != self.filters.len() {
            violations.push("filters must be distinct".to_string());
        }
        if self.replications == 0 {
            violations.push("at least one replication is required".to_string());
        }
        if self.window < 3 || self.window.is_multiple_of(2) {
            violations.push(format!("window side must be odd and at least 3, got {}", self.window));
        }
        if !(self.contrast_ratio > 1.0) {
            violations.push(format!("contrast ratio must exceed 1, got {}", self.contrast_ratio));
        }
        if let Err(Error::Validation(inner)) = self.layout.validate() {
            violations.extend(inner);
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(violations))
        }
    }

    /// The layout actually corrupted, with the spec's contrast applied.
    pub fn effective_layout(&self) -> PhantomLayout {
        self.layout.clone().with_contrast_ratio(self.contrast_ratio)
    }

    /// Filters in canonical order.
    pub fn sorted_filters(&self) -> Vec<FilterMethod> {
        let mut f = self.filters.clone();
        f.sort();
        f
    }

    /// All (situation, replication) coordinates in canonical order.
    pub fn tasks(&self) -> Vec<(u8, u32)> {
        let mut situations = self.situations.clone();
        situations.sort_unstable();
        situations
            .iter()
            .flat_map(|&s| (0..self.replications).map(move |r| (s, r)))
            .collect()
    }
}

/// One assessed (situation, filter, replication) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationResult {
    pub situation: u8,
    pub filter: FilterMethod,
    pub replication: u32,
    pub seed: u64,
    pub record: MetricRecord,
}

/// Derives the corruption seed of one (situation, replication) coordinate.
///
/// Both the master seed and the packed coordinate pass through the bijective
/// SplitMix64 step before being combined, so distinct coordinates map to
/// distinct seeds for any fixed master, and distinct masters map to distinct
/// seeds for any fixed coordinate. The filter deliberately plays no part.
pub fn derive_seed(master: u64, situation: u8, replication: u32) -> u64 {
    mix64(master) ^ mix64(((situation as u64) << 32) | replication as u64)
}

/// Runs one replication: corrupt once with the derived seed, then filter and
/// assess with every requested filter. Results follow the spec's filter
/// order after sorting.
pub fn run_replication(
    spec: &ExperimentSpec,
    situation_id: u8,
    replication: u32,
) -> Result<Vec<ReplicationResult>> {
    let coordinate = |filter: Option<String>, source: Error| Error::Experiment {
        situation: situation_id,
        replication,
        filter,
        source: Box::new(source),
    };

    let layout = spec.effective_layout();
    let situation =
        Situation::standard(situation_id, spec.looks, spec.contrast_ratio, layout.background_mean)
            .map_err(|e| coordinate(None, e))?;
    let truth_layout = situation.truth_layout(&layout).map_err(|e| coordinate(None, e))?;
    let truth = build_phantom(&truth_layout).map_err(|e| coordinate(None, e))?;

    let seed = derive_seed(spec.master_seed, situation_id, replication);
    let corrupted = corrupt(&truth_layout, &situation, &mut Rng::from_seed(seed))
        .map_err(|e| coordinate(None, e))?;

    let mut out = Vec::with_capacity(spec.filters.len());
    for filter in spec.sorted_filters() {
        let fspec = FilterSpec::new(filter, spec.window, spec.looks)
            .map_err(|e| coordinate(Some(filter.name().into()), e))?;
        let filtered = apply_filter(&corrupted, &fspec)
            .map_err(|e| coordinate(Some(filter.name().into()), e))?;
        let record = assess(&filtered, &truth_layout, &truth)
            .map_err(|e| coordinate(Some(filter.name().into()), e))?;
        out.push(ReplicationResult { situation: situation_id, filter, replication, seed, record });
    }
    Ok(out)
}

/// Runs the full experiment over the current thread pool. The output is
/// sorted canonically, so it is bitwise-identical for any worker count.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ReplicationResult>> {
    spec.validate()?;
    let tasks = spec.tasks();
    let nested: Vec<Vec<ReplicationResult>> = tasks
        .par_iter()
        .map(|&(s, r)| run_replication(spec, s, r))
        .collect::<Result<_>>()?;
    let mut results: Vec<ReplicationResult> = nested.into_iter().flatten().collect();
    sort_canonically(&mut results);
    Ok(results)
}

/// Canonical result order: situation, replication, filter.
pub fn sort_canonically(results: &mut [ReplicationResult]) {
    results.sort_by_key(|r| (r.situation, r.replication, r.filter));
}

/// Five-number summary with Tukey outliers for one (situation, filter,
/// metric) group.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxplotSummary {
    pub situation: u8,
    pub filter: FilterMethod,
    pub metric: Metric,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Values beyond 1.5×IQR from the hinges; excluded from min/max.
    pub outliers: Vec<f64>,
}

impl BoxplotSummary {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

fn median_of(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

// Quartile convention: median of the lower/upper half, excluding the middle
// element when the count is odd. For 1..=5 this gives q1 = 1.5, q3 = 4.5.
fn five_number(sorted: &[f64]) -> (f64, f64, f64) {
    let n = sorted.len();
    let half = n / 2;
    let q1 = median_of(&sorted[..half]);
    let q3 = median_of(&sorted[n - half..]);
    (q1, median_of(sorted), q3)
}

fn summarize_group(
    situation: u8,
    filter: FilterMethod,
    metric: Metric,
    values: &mut [f64],
) -> BoxplotSummary {
    values.sort_by(f64::total_cmp);
    let (q1, median, q3) = five_number(values);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let outliers: Vec<f64> =
        values.iter().copied().filter(|v| *v < lo_fence || *v > hi_fence).collect();
    let inliers: Vec<f64> =
        values.iter().copied().filter(|v| *v >= lo_fence && *v <= hi_fence).collect();
    BoxplotSummary {
        situation,
        filter,
        metric,
        min: inliers.first().copied().unwrap_or(q1),
        q1,
        median,
        q3,
        max: inliers.last().copied().unwrap_or(q3),
        outliers,
    }
}

/// Summarizes one metric over every (situation, filter) group present in the
/// results. Requires at least 5 replications per group.
pub fn summarize(results: &[ReplicationResult], metric: Metric) -> Result<Vec<BoxplotSummary>> {
    let mut groups: Vec<(u8, FilterMethod)> =
        results.iter().map(|r| (r.situation, r.filter)).collect();
    groups.sort();
    groups.dedup();
    let mut out = Vec::with_capacity(groups.len());
    for (situation, filter) in groups {
        let mut values: Vec<f64> = results
            .iter()
            .filter(|r| r.situation == situation && r.filter == filter)
            .map(|r| r.record.get(metric))
            .collect();
        if values.len() < 5 {
            return Err(Error::InsufficientData(format!(
                "situation {situation}, filter {} has only {} replications (need 5)",
                filter.name(),
                values.len()
            )));
        }
        out.push(summarize_group(situation, filter, metric, &mut values));
    }
    Ok(out)
}

/// All four metrics' summaries, in metric-major order.
pub fn summarize_all(results: &[ReplicationResult]) -> Result<Vec<BoxplotSummary>> {
    let mut out = Vec::new();
    for metric in Metric::ALL {
        out.extend(summarize(results, metric)?);
    }
    Ok(out)
}

/// Winner statistics of one (situation, metric) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictEntry {
    pub situation: u8,
    pub metric: Metric,
    /// Fraction of replications each filter wins, in canonical filter order.
    pub winner_fractions: Vec<(FilterMethod, f64)>,
    /// Set when at least two replications exist: true when no filter wins
    /// more than 80% of them, i.e. the single-image ranking is unstable.
    pub unstable: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConflictReport {
    pub entries: Vec<ConflictEntry>,
}

impl ConflictReport {
    /// True when any (situation, metric) cell has an unstable winner.
    pub fn any_unstable(&self) -> bool {
        self.entries.iter().any(|e| e.unstable == Some(true))
    }

    pub fn entry(&self, situation: u8, metric: Metric) -> Option<&ConflictEntry> {
        self.entries.iter().find(|e| e.situation == situation && e.metric == metric)
    }
}

impl std::fmt::Display for ConflictReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:<10} {:<14} {:<30} unstable", "situation", "metric", "winner fractions")?;
        for e in &self.entries {
            let fractions = e
                .winner_fractions
                .iter()
                .map(|(m, frac)| format!("{}={frac:.2}", m.name()))
                .collect::<Vec<_>>()
                .join(" ");
            let unstable = match e.unstable {
                Some(true) => "yes",
                Some(false) => "no",
                None => "undefined",
            };
            writeln!(f, "{:<10} {:<14} {:<30} {}", e.situation, e.metric.name(), fractions, unstable)?;
        }
        Ok(())
    }
}

/// For every situation and metric, the fraction of replications in which
/// each filter ranks best under the direction-of-merit convention. Exact
/// ties go to the earliest filter in canonical order.
pub fn conflict_report(results: &[ReplicationResult]) -> Result<ConflictReport> {
    let mut filters: Vec<FilterMethod> = results.iter().map(|r| r.filter).collect();
    filters.sort();
    filters.dedup();
    if filters.len() < 2 {
        return Err(Error::InsufficientData(
            "winner analysis requires at least two filters".into(),
        ));
    }
    let mut situations: Vec<u8> = results.iter().map(|r| r.situation).collect();
    situations.sort_unstable();
    situations.dedup();

    let mut entries = Vec::new();
    for &situation in &situations {
        let mut replications: Vec<u32> = results
            .iter()
            .filter(|r| r.situation == situation)
            .map(|r| r.replication)
            .collect();
        replications.sort_unstable();
        replications.dedup();

        for metric in Metric::ALL {
            let mut wins = vec![0usize; filters.len()];
            let mut counted = 0usize;
            for &rep in &replications {
                let cell: Vec<Option<f64>> = filters
                    .iter()
                    .map(|&f| {
                        results
                            .iter()
                            .find(|r| {
                                r.situation == situation && r.replication == rep && r.filter == f
                            })
                            .map(|r| r.record.get(metric))
                    })
                    .collect();
                if cell.iter().any(Option::is_none) {
                    continue; // incomplete cell: no winner awarded
                }
                let mut best = 0usize;
                for i in 1..filters.len() {
                    if metric.better(cell[i].unwrap(), cell[best].unwrap()) {
                        best = i;
                    }
                }
                wins[best] += 1;
                counted += 1;
            }
            if counted == 0 {
                continue;
            }
            let fractions: Vec<(FilterMethod, f64)> = filters
                .iter()
                .zip(&wins)
                .map(|(&f, &w)| (f, w as f64 / counted as f64))
                .collect();
            let unstable = (counted >= 2)
                .then(|| fractions.iter().all(|(_, frac)| *frac <= 0.8));
            entries.push(ConflictEntry { situation, metric, winner_fractions: fractions, unstable });
        }
    }
    Ok(ConflictReport { entries })
}
