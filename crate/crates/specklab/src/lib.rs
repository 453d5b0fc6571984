//! specklab — a workbench for speckle noise and its removal.
//!
//! Coherent imaging (radar, sonar, ultrasound) observes `Z = X·Y`: an
//! unobserved backscatter `X` multiplied by unit-mean Gamma speckle `Y`.
//! This crate provides, end to end:
//!
//! * the return-law distributions of that multiplicative model (constant,
//!   K, heavy-tailed G0 and inverse-Gaussian GH backscatter), with densities,
//!   exact samplers and closed-form fractional moments;
//! * moment-based estimators: the equivalent number of looks and per-window
//!   `(alpha, gamma)` / `(omega, sigma)` fits;
//! * three despeckling filters — Lee's filter and two closed-form MAP
//!   filters — plus the numerical posterior-argmax oracle that validates the
//!   closed forms;
//! * a deterministic phantom ("points and strips") with a region-of-interest
//!   registry, speckle corruption, and the four protocol quality measures;
//! * a seeded, replicated Monte Carlo harness with boxplot summaries and a
//!   per-replication winner (conflict) report.
//!
//! The `specklab` binary chains these into a file-based pipeline; the
//! `examples/` directory shows each capability as a runnable program.
//!
//! Reproducibility: every random quantity derives from an explicit 64-bit
//! seed through a fixed generator (ChaCha with 8 rounds, SplitMix64 seed
//! expansion), so equal seeds give bitwise-equal outputs for a given build.

// Negated comparisons like `!(x > 0.0)` are deliberate throughout: they
// treat NaN as out of domain in a single test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod estimation;
pub mod filters;
pub mod image;
pub mod io;
pub mod metrics;
pub mod montecarlo;
pub mod numeric;
pub mod phantom;
pub mod rng;
pub mod svg;

pub use distributions::{
    return_pdf, sample, speckle_pdf, theoretical_moment, ConstantParams, G0Params, GHParams,
    KParams, Looks, ReturnModel,
};
pub use error::{Error, Result};
pub use estimation::{estimate_enl, fit_g0_moments, fit_gh_moments, lee_local_stats, SampleStats};
pub use filters::{
    apply_filter, map_g0_estimate, map_gh_estimate, numerical_map_oracle, BackscatterPrior,
    FilterMethod, FilterSpec, FitFallback,
};
pub use image::Image;
pub use metrics::{assess, metric_edge, metric_enl, metric_line, Metric, MetricRecord};
pub use montecarlo::{
    conflict_report, derive_seed, run_experiment, summarize, BoxplotSummary, ExperimentSpec,
    ReplicationResult,
};
pub use phantom::{build_phantom, corrupt, PhantomLayout, Situation};
pub use rng::Rng;
