//! Acceptance suite: one test per shipping criterion, each printing a
//! `[PASS]`/`[FAIL]` line with its measurement.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//! The two experiment-level criteria share one pair of full default runs
//! (single-threaded and eight-threaded), computed once per process.
//!
//! Known red: `c7_situation_zero_dispersion_exception` asserts the strict
//! per-metric IQR dominance of the heterogeneous situations exactly as
//! specified, and that comparison is structurally unattainable — the test
//! prints the violation table and the analysis.

use specklab::distributions::{
    sample, theoretical_moment, G0Params, GHParams, Looks, ReturnModel,
};
use specklab::estimation::{estimate_enl, fit_g0_moments, fit_gh_moments, SampleStats};
use specklab::filters::{
    apply_filter, map_g0_estimate, map_gh_estimate, numerical_map_oracle, BackscatterPrior,
    FilterMethod, FilterSpec,
};
use specklab::io::results::results_to_string;
use specklab::metrics::{assess, metric_enl, Metric};
use specklab::montecarlo::{
    conflict_report, run_experiment, summarize, ExperimentSpec, ReplicationResult,
};
use specklab::numeric::integrate_half_line;
use specklab::phantom::{build_phantom, corrupt, PhantomLayout, Situation};
use specklab::rng::Rng;

use std::sync::OnceLock;
use std::time::{Duration, Instant};

const CATALOG: [(f64, f64); 6] = [
    (-2.0, 230.0),
    (-2.0, 50.0),
    (-4.0, 690.0),
    (-4.0, 150.0),
    (-10.0, 2070.0),
    (-10.0, 450.0),
];

fn looks(l: f64) -> Looks {
    Looks::new(l).unwrap()
}

fn report(name: &str, pass: bool, detail: &str) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}

struct DefaultRuns {
    csv_single: String,
    csv_eight: String,
    results: Vec<ReplicationResult>,
    elapsed: Duration,
}

fn default_runs() -> &'static DefaultRuns {
    static RUNS: OnceLock<DefaultRuns> = OnceLock::new();
    RUNS.get_or_init(|| {
        let spec = ExperimentSpec::default_run();
        let start = Instant::now();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_experiment(&spec))
            .unwrap();
        let eight = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| run_experiment(&spec))
            .unwrap();
        let elapsed = start.elapsed();
        DefaultRuns {
            csv_single: results_to_string(&single),
            csv_eight: results_to_string(&eight),
            results: eight,
            elapsed,
        }
    })
}

// MAP closed forms against numerical maximization of the log-posterior, over
// the full parameter grids, to 1e-5 relative. Budget: 10 s.
#[test]
fn c1_map_closed_forms_match_posterior_argmax() {
    let start = Instant::now();
    let mut max_rel: f64 = 0.0;
    let mut cases = 0usize;
    for (alpha, gamma) in CATALOG {
        let params = G0Params::new(alpha, gamma).unwrap();
        for z in [1.0, 50.0, 230.0, 2000.0] {
            for l in [1.0, 4.0] {
                let closed = map_g0_estimate(z, params, looks(l));
                let oracle =
                    numerical_map_oracle(z, &BackscatterPrior::ReciprocalGamma(params), looks(l))
                        .unwrap();
                max_rel = max_rel.max(((closed - oracle) / closed).abs());
                cases += 1;
            }
        }
    }
    for omega in [0.5, 2.0, 10.0] {
        for sigma in [50.0, 230.0] {
            let params = GHParams::new(omega, sigma).unwrap();
            for z in [1.0, 50.0, 230.0, 2000.0] {
                for l in [1.0, 4.0] {
                    let closed = map_gh_estimate(z, params, looks(l));
                    let oracle = numerical_map_oracle(
                        z,
                        &BackscatterPrior::InverseGaussian(params),
                        looks(l),
                    )
                    .unwrap();
                    max_rel = max_rel.max(((closed - oracle) / closed).abs());
                    cases += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = max_rel < 1e-5 && elapsed < Duration::from_secs(10);
    report(
        "MAP closed forms vs posterior argmax",
        pass,
        &format!("{cases} cases, max relative error {max_rel:.2e}, {elapsed:.2?}"),
    );
    assert!(max_rel < 1e-5, "max relative error {max_rel}");
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
}

// Every density integrates to 1 +/- 1e-6 by adaptive quadrature across the
// situation catalog's parameters and L in {1, 2, 4, 8}. Budget: 30 s.
#[test]
fn c2_densities_normalize_to_one() {
    use specklab::distributions::{return_pdf, speckle_pdf};

    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut cases = 0usize;
    let mut check = |integral: f64| {
        worst = worst.max((integral - 1.0).abs());
        cases += 1;
    };

    for l in [1.0, 2.0, 4.0, 8.0] {
        let lk = looks(l);
        check(integrate_half_line(|x| speckle_pdf(x, lk).unwrap(), 1.0, 1e-9));

        let mut models = Vec::new();
        // Constant and Gamma-backscatter (K) grids span the catalog's two
        // background means; the K shape ladder mirrors its -alpha ladder.
        for mean in [230.0, 50.0] {
            models.push(ReturnModel::constant_gamma(mean, lk).unwrap());
            for shape in [2.0, 4.0, 10.0] {
                models.push(ReturnModel::k(shape, shape / mean, lk).unwrap());
            }
        }
        for (alpha, gamma) in CATALOG {
            models.push(ReturnModel::g0(alpha, gamma, lk).unwrap());
        }
        for omega in [0.5, 2.0, 10.0] {
            for sigma in [50.0, 230.0] {
                models.push(ReturnModel::gh(omega, sigma, lk).unwrap());
            }
        }
        for model in models {
            let scale = model.mean().unwrap();
            check(integrate_half_line(|z| return_pdf(z, &model).unwrap(), scale, 1e-9));
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-6 && elapsed < Duration::from_secs(30);
    report(
        "density normalization",
        pass,
        &format!("{cases} integrals, worst |∫-1| = {worst:.2e}, {elapsed:.2?}"),
    );
    assert!(worst <= 1e-6, "worst normalization defect {worst}");
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
}

// gamma/(-alpha-1) reproduces the catalog's background-mean column exactly.
#[test]
fn c3_situation_catalog_is_internally_consistent() {
    let expected = [230.0, 50.0, 230.0, 50.0, 230.0, 50.0];
    let mut pass = true;
    for (i, (alpha, gamma)) in CATALOG.iter().enumerate() {
        if gamma / (-alpha - 1.0) != expected[i] {
            pass = false;
        }
        let situation = Situation::standard(i as u8 + 1, looks(1.0), 4.0, 230.0).unwrap();
        if situation.background_mean().unwrap() != expected[i] {
            pass = false;
        }
    }
    report(
        "situation catalog background means",
        pass,
        "gamma/(-alpha-1) = 230, 50, 230, 50, 230, 50 exactly",
    );
    assert!(pass);
}

// Moment fits recover parameters from exact theoretical moments, and the
// equivalent number of looks recovers L from homogeneous draws. Budget: 20 s.
#[test]
fn c4_moment_fits_and_enl_round_trip() {
    let start = Instant::now();
    let mut worst_g0: f64 = 0.0;
    let mut worst_gh: f64 = 0.0;

    let stats_for = |model: &ReturnModel| SampleStats {
        n: 49,
        mean: theoretical_moment(model, 1.0).unwrap(),
        variance: 0.0,
        half_moment: theoretical_moment(model, 0.5).unwrap(),
    };

    for l in [1.0, 4.0] {
        for (alpha, gamma) in CATALOG {
            let model = ReturnModel::g0(alpha, gamma, looks(l)).unwrap();
            let fit = fit_g0_moments(&stats_for(&model), looks(l));
            let p = fit.params.expect("fit must converge on exact moments");
            worst_g0 = worst_g0
                .max(((p.alpha() - alpha) / alpha).abs())
                .max(((p.gamma() - gamma) / gamma).abs());
        }
        for omega in [0.5, 2.0, 10.0] {
            for sigma in [50.0, 230.0] {
                let model = ReturnModel::gh(omega, sigma, looks(l)).unwrap();
                let fit = fit_gh_moments(&stats_for(&model), looks(l));
                let p = fit.params.expect("fit must converge on exact moments");
                worst_gh = worst_gh
                    .max(((p.omega() - omega) / omega).abs())
                    .max(((p.sigma() - sigma) / sigma).abs());
            }
        }
    }

    let mut worst_enl: f64 = 0.0;
    for l in [1.0, 4.0] {
        let model = ReturnModel::constant_gamma(230.0, looks(l)).unwrap();
        let draws = sample(&mut Rng::from_seed(404), &model, 100_000).unwrap();
        let enl = estimate_enl(&draws).unwrap();
        worst_enl = worst_enl.max(((enl - l) / l).abs());
    }

    let elapsed = start.elapsed();
    let pass = worst_g0 < 1e-4 && worst_gh < 1e-3 && worst_enl < 0.05
        && elapsed < Duration::from_secs(20);
    report(
        "moment-fit and ENL round trips",
        pass,
        &format!(
            "worst relative errors: heavy-tail fit {worst_g0:.2e}, \
             inverse-Gaussian fit {worst_gh:.2e}, ENL {worst_enl:.2e}, {elapsed:.2?}"
        ),
    );
    assert!(worst_g0 < 1e-4, "heavy-tail fit error {worst_g0}");
    assert!(worst_gh < 1e-3, "inverse-Gaussian fit error {worst_gh}");
    assert!(worst_enl < 0.05, "ENL error {worst_enl}");
    assert!(elapsed < Duration::from_secs(20), "took {elapsed:?}");
}

// Truth self-assessment is exactly clean, and every filter strictly raises
// the ENL on single-look constant-truth images in all 20 seeded trials.
// Budget: 2 min.
#[test]
fn c5_protocol_sanity() {
    let start = Instant::now();
    let layout = PhantomLayout::canonical();
    let truth = build_phantom(&layout).unwrap();
    let record = assess(&truth, &layout, &truth).unwrap();
    let self_clean = record.line_preservation == 0.0 && record.edge_variance == 0.0;

    let situation = Situation::standard(0, looks(1.0), 4.0, 230.0).unwrap();
    let mut increases = 0usize;
    let mut trials = 0usize;
    for trial in 0..20u64 {
        let img = corrupt(&layout, &situation, &mut Rng::from_seed(9000 + trial)).unwrap();
        let enl_in = metric_enl(&img, &layout.homogeneous_block).unwrap();
        for method in FilterMethod::ALL {
            let spec = FilterSpec::new(method, 7, looks(1.0)).unwrap();
            let filtered = apply_filter(&img, &spec).unwrap();
            let enl_out = metric_enl(&filtered, &layout.homogeneous_block).unwrap();
            trials += 1;
            if enl_out > enl_in {
                increases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = self_clean && increases == trials && elapsed < Duration::from_secs(120);
    report(
        "protocol sanity",
        pass,
        &format!(
            "self-assessment line/edge-variance = {}/{}; ENL increased in {increases}/{trials} \
             filter trials, {elapsed:.2?}",
            record.line_preservation, record.edge_variance
        ),
    );
    assert!(self_clean, "truth self-assessment not clean: {record:?}");
    assert_eq!(increases, trials, "a filter failed to raise the ENL");
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
}

// With the default master seed, the per-replication ENL winner between the
// Lee and G0 MAP filters flips in at least one heterogeneous situation
// (instability flag set).
#[test]
fn c6_enl_winner_instability_between_lee_and_map_g0() {
    let runs = default_runs();
    let pair: Vec<ReplicationResult> = runs
        .results
        .iter()
        .copied()
        .filter(|r| matches!(r.filter, FilterMethod::Lee | FilterMethod::MapG0))
        .collect();
    let conflicts = conflict_report(&pair).unwrap();
    let unstable: Vec<u8> = (1..=6)
        .filter(|&sit| {
            conflicts
                .entry(sit, Metric::Enl)
                .is_some_and(|e| e.unstable == Some(true))
        })
        .collect();
    let pass = !unstable.is_empty();
    let fractions: Vec<String> = (1..=6)
        .map(|sit| {
            let e = conflicts.entry(sit, Metric::Enl).unwrap();
            format!(
                "s{sit} {}",
                e.winner_fractions
                    .iter()
                    .map(|(f, frac)| format!("{}={frac:.2}", f.name()))
                    .collect::<Vec<_>>()
                    .join("/")
            )
        })
        .collect();
    report(
        "ENL winner instability (Lee vs G0 MAP)",
        pass,
        &format!("unstable in situations {unstable:?}; fractions: {}", fractions.join(", ")),
    );
    assert!(pass, "no heterogeneous situation had an unstable ENL winner");
}

// The literal criterion: for every metric and filter, the situation-0
// cross-replication IQR is strictly smaller than in each of situations 1-6.
//
// KNOWN RED. The comparison is structurally unattainable under the pinned
// defaults, for two seed-independent reasons:
//   1. the situation catalog alternates background means 230/50, so the
//      intensity-valued measures (line, edge gradient, edge variance) of
//      situation 0 (at 230) carry ~4.6x the scale of situations 2, 4, 6 —
//      every intensity violation below is against those situations;
//   2. ENL levels differ by an order of magnitude across situations
//      (smoothing lifts constant-truth ENL to ~25 while the heavy tails
//      crush heterogeneous ENL to 0.2-4), and the absolute dispersion of an
//      ENL estimate scales with its level.
// A relative (IQR/median) reading also fails, marginally, against the
// mildest-heterogeneity situations. The underlying claim holds for the
// strongly heterogeneous situations; the uniform strict inequality does not.
#[test]
fn c7_situation_zero_dispersion_exception() {
    let runs = default_runs();
    let mut violations = Vec::new();
    let mut comparisons = 0usize;
    for metric in Metric::ALL {
        let summaries = summarize(&runs.results, metric).unwrap();
        for filter in FilterMethod::ALL {
            let iqr = |sit: u8| {
                summaries
                    .iter()
                    .find(|s| s.situation == sit && s.filter == filter)
                    .map(|s| s.iqr())
                    .unwrap()
            };
            let base = iqr(0);
            for sit in 1..=6u8 {
                comparisons += 1;
                if base >= iqr(sit) {
                    violations.push(format!(
                        "{}/{}: IQR(s0) = {base:.4} >= IQR(s{sit}) = {:.4}",
                        metric.name(),
                        filter.name(),
                        iqr(sit)
                    ));
                }
            }
        }
    }
    let pass = violations.is_empty();
    report(
        "situation-0 dispersion exception",
        pass,
        &format!(
            "{} of {comparisons} strict IQR comparisons violated{}",
            violations.len(),
            if pass { String::new() } else { format!(":\n    {}", violations.join("\n    ")) }
        ),
    );
    assert!(
        pass,
        "situation-0 IQR is not uniformly smallest ({} violations; structural — see the \
         test's doc comment): {}",
        violations.len(),
        violations.join("; ")
    );
}

// The full default experiment produces byte-identical results at 1 and 8
// worker threads, within the runtime budget.
#[test]
fn c8_full_experiment_is_deterministic_across_thread_counts() {
    let runs = default_runs();
    let identical = runs.csv_single == runs.csv_eight;
    let within_budget = runs.elapsed < Duration::from_secs(30 * 60);
    let pass = identical && within_budget;
    report(
        "thread-count determinism of the default experiment",
        pass,
        &format!(
            "2100-record CSVs byte-identical: {identical}; both runs took {:.1?} (budget 30 min)",
            runs.elapsed
        ),
    );
    assert!(identical, "results differ between 1 and 8 worker threads");
    assert!(within_budget, "took {:?}", runs.elapsed);
}
