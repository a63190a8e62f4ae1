//! Subcommand implementations.
//!
//! Every command prints an aligned table (or verdict lines) for humans and,
//! with `--out`, writes the JSON-lines run record. `--jobs` only changes
//! scheduling, never results, so it is deliberately absent from config
//! echoes.

use std::path::PathBuf;

use clap::Args;
use colp_core::colp::fit_colp_fixed;
use colp_core::synth::SweepRow;
use colp_core::{
    complexity, decide, fit_colp_exhaustive, fit_colp_greedy_restarts, read_manifest,
    read_pair_discretized, run_ablation, run_scenario, run_sweep, CausalConfig, CausalVerdict,
    ColpConfig, ColpFit, Decision, Direction, Error, Link, PairFile, PairedSample, Permutation,
    RepOutcome, Result, Scenario, ScenarioConfig, SearchChoice,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{print_table, write_plot_data, PlotRow, RunRecord};

/// Options shared by every command that fits models.
#[derive(Debug, Clone, Args, Serialize)]
pub struct EngineOpts {
    /// Link function: logit or probit.
    #[arg(long, default_value = "logit")]
    pub link: Link,
    /// Permutation search: auto (exhaustive up to 6 levels, else greedy),
    /// exhaustive, or greedy.
    #[arg(long, default_value = "auto")]
    pub search: SearchChoice,
    /// Log-likelihood gaps with |gap| at or below this count as ties.
    #[arg(long = "tie-tol", default_value_t = 1e-6)]
    pub tie_tol: f64,
    /// Greedy restarts (1 = identity initialization only).
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    /// Exhaustive search refuses variables with more levels than this.
    #[arg(long, default_value_t = 8)]
    pub max_exhaustive_levels: usize,
}

impl EngineOpts {
    fn causal_config(&self, seed: u64) -> CausalConfig {
        CausalConfig {
            link: self.link,
            search: self.search,
            tie_tolerance: self.tie_tol,
            colp: ColpConfig {
                max_exhaustive_levels: self.max_exhaustive_levels,
                ..ColpConfig::default()
            },
            greedy_restarts: self.restarts,
            seed,
        }
    }
}

fn format_float(v: f64) -> String {
    format!("{v:.4}")
}

// ---------------------------------------------------------------------------
// discover

#[derive(Debug, Args)]
pub struct DiscoverArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Candidate cause column.
    #[arg(long)]
    pub x: String,
    /// Candidate effect column.
    #[arg(long)]
    pub y: String,
    /// Discretize a numeric x column into this many quantile bins.
    #[arg(long)]
    pub discretize_x: Option<usize>,
    /// Discretize a numeric y column into this many quantile bins.
    #[arg(long)]
    pub discretize_y: Option<usize>,
    /// Seed for greedy restart initializations.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub engine: EngineOpts,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Write the JSON-lines run record here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct DiscoverEcho<'a> {
    input: String,
    x: &'a str,
    y: &'a str,
    discretize_x: Option<usize>,
    discretize_y: Option<usize>,
    seed: u64,
    #[serde(flatten)]
    engine: &'a EngineOpts,
}

#[derive(Serialize)]
struct DirectionRecord {
    direction: Direction,
    joint_log_likelihood: f64,
    marginal_log_likelihood: f64,
    conditional_log_likelihood: f64,
    /// Effect-category names in fitted rank order.
    ordering: Vec<String>,
    /// One-based ranks of the canonical optimal permutation.
    sigma: Vec<usize>,
    search: String,
    evaluations: usize,
    converged: bool,
    separation: bool,
}

fn direction_record(
    fit: &colp_core::DirectionFit,
    effect_labels: &[String],
) -> DirectionRecord {
    DirectionRecord {
        direction: fit.direction,
        joint_log_likelihood: fit.joint_log_likelihood,
        marginal_log_likelihood: fit.marginal_log_likelihood,
        conditional_log_likelihood: fit.colp.ordinal.log_likelihood,
        ordering: fit
            .colp
            .sigma
            .ordering_labels(effect_labels)
            .into_iter()
            .map(str::to_string)
            .collect(),
        sigma: fit.colp.sigma.one_based(),
        search: fit.colp.search.to_string(),
        evaluations: fit.colp.evaluations,
        converged: fit.colp.ordinal.converged,
        separation: fit.colp.ordinal.separation,
    }
}

#[derive(Serialize)]
struct VerdictRecord {
    record: &'static str,
    n: usize,
    rows_dropped: usize,
    x_levels: usize,
    y_levels: usize,
    decision: Decision,
    log_likelihood_gap: f64,
    tie_tolerance: f64,
    forward: DirectionRecord,
    backward: DirectionRecord,
}

fn verdict_record(
    verdict: &CausalVerdict,
    sample: &PairedSample,
    rows_dropped: usize,
) -> VerdictRecord {
    VerdictRecord {
        record: "verdict",
        n: sample.n(),
        rows_dropped,
        x_levels: sample.s_levels(),
        y_levels: sample.l_levels(),
        decision: verdict.decision,
        log_likelihood_gap: verdict.log_likelihood_gap,
        tie_tolerance: verdict.tie_tolerance,
        forward: direction_record(&verdict.forward, sample.y_labels()),
        backward: direction_record(&verdict.backward, sample.x_labels()),
    }
}

fn print_verdict(verdict: &CausalVerdict, sample: &PairedSample) {
    println!("decision: {}", verdict.decision);
    println!(
        "log-likelihood gap (forward - backward): {:.6}",
        verdict.log_likelihood_gap
    );
    let fwd_order = verdict
        .forward
        .colp
        .sigma
        .ordering_labels(sample.y_labels())
        .join(" < ");
    let bwd_order = verdict
        .backward
        .colp
        .sigma
        .ordering_labels(sample.x_labels())
        .join(" < ");
    print_table(
        &["direction", "joint-ll", "search", "ordering"],
        &[
            vec![
                "x_to_y".into(),
                format!("{:.4}", verdict.forward.joint_log_likelihood),
                verdict.forward.colp.search.to_string(),
                fwd_order,
            ],
            vec![
                "y_to_x".into(),
                format!("{:.4}", verdict.backward.joint_log_likelihood),
                verdict.backward.colp.search.to_string(),
                bwd_order,
            ],
        ],
    );
    if verdict.any_separation() {
        println!("note: a conditional fit flagged separation; the gap may be unstable");
    }
}

pub fn discover(args: &DiscoverArgs) -> Result<()> {
    let pair = PairFile {
        path: args.input.clone(),
        x_column: args.x.clone(),
        y_column: args.y.clone(),
        truth: None,
        description: String::new(),
    };
    let (sample, report) = read_pair_discretized(&pair, args.discretize_x, args.discretize_y)?;
    let config = args.engine.causal_config(args.seed);
    let verdict = decide(&sample, &config)?;

    let echo = DiscoverEcho {
        input: args.input.display().to_string(),
        x: &args.x,
        y: &args.y,
        discretize_x: args.discretize_x,
        discretize_y: args.discretize_y,
        seed: args.seed,
        engine: &args.engine,
    };
    let mut record = RunRecord::start("discover", &echo, args.out.clone())?;
    println!(
        "pair: {} (n={}, dropped={})",
        args.input.display(),
        sample.n(),
        report.rows_dropped
    );
    print_verdict(&verdict, &sample);
    record.push(&verdict_record(&verdict, &sample, report.rows_dropped))?;
    record.finish()
}

// ---------------------------------------------------------------------------
// fit

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Predictor column.
    #[arg(long)]
    pub x: String,
    /// Response column.
    #[arg(long)]
    pub y: String,
    /// Discretize a numeric x column into this many quantile bins.
    #[arg(long)]
    pub discretize_x: Option<usize>,
    /// Discretize a numeric y column into this many quantile bins.
    #[arg(long)]
    pub discretize_y: Option<usize>,
    /// Fix the response ordering (comma-separated 1-based ranks) instead of
    /// searching.
    #[arg(long, value_delimiter = ',')]
    pub sigma: Option<Vec<usize>>,
    /// Seed for greedy restart initializations.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub engine: EngineOpts,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Write the JSON-lines run record here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct FitEcho<'a> {
    input: String,
    x: &'a str,
    y: &'a str,
    discretize_x: Option<usize>,
    discretize_y: Option<usize>,
    sigma: Option<Vec<usize>>,
    seed: u64,
    #[serde(flatten)]
    engine: &'a EngineOpts,
}

#[derive(Serialize)]
struct FitRecord {
    record: &'static str,
    n: usize,
    rows_dropped: usize,
    x_levels: usize,
    y_levels: usize,
    ordering: Vec<String>,
    sigma: Vec<usize>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
    log_likelihood: f64,
    converged: bool,
    iterations: usize,
    separation: bool,
    search: String,
    evaluations: usize,
    complexity: colp_core::ComplexityReport,
}

fn resolve_search(sample: &PairedSample, choice: SearchChoice) -> SearchChoice {
    match choice {
        SearchChoice::Auto => {
            if sample.l_levels() <= 6 && sample.s_levels() <= 6 {
                SearchChoice::Exhaustive
            } else {
                SearchChoice::Greedy
            }
        }
        other => other,
    }
}

pub fn fit(args: &FitArgs) -> Result<()> {
    let pair = PairFile {
        path: args.input.clone(),
        x_column: args.x.clone(),
        y_column: args.y.clone(),
        truth: None,
        description: String::new(),
    };
    let (sample, report) = read_pair_discretized(&pair, args.discretize_x, args.discretize_y)?;
    let colp_cfg = ColpConfig {
        max_exhaustive_levels: args.engine.max_exhaustive_levels,
        ..ColpConfig::default()
    };
    let fit: ColpFit = match &args.sigma {
        Some(ranks) => {
            let sigma = Permutation::from_one_based(ranks)?;
            fit_colp_fixed(&sample, args.engine.link, &sigma, &colp_cfg)?
        }
        None => match resolve_search(&sample, args.engine.search) {
            SearchChoice::Exhaustive => fit_colp_exhaustive(&sample, args.engine.link, &colp_cfg)?,
            _ => fit_colp_greedy_restarts(
                &sample,
                args.engine.link,
                args.engine.restarts,
                args.seed,
                &colp_cfg,
            )?,
        },
    };
    let report_counts = complexity(sample.l_levels(), sample.s_levels())?;

    println!(
        "fit of {} | {} on {} (n={}, dropped={})",
        args.y,
        args.x,
        args.input.display(),
        sample.n(),
        report.rows_dropped
    );
    println!(
        "ordering of {}: {}",
        args.y,
        fit.sigma.ordering_labels(sample.y_labels()).join(" < ")
    );
    let beta_rows: Vec<Vec<String>> = sample
        .x_labels()
        .iter()
        .zip(fit.ordinal.params.beta())
        .map(|(label, b)| vec![label.clone(), format_float(*b)])
        .collect();
    print_table(&["level", "beta"], &beta_rows);
    println!(
        "thresholds: {}",
        fit.ordinal
            .params
            .gamma()
            .iter()
            .map(|g| format_float(*g))
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!(
        "log-likelihood {:.4} | {} search, {} fits | converged: {}{}",
        fit.ordinal.log_likelihood,
        fit.search,
        fit.evaluations,
        fit.ordinal.converged,
        if fit.ordinal.separation {
            " | separation flagged"
        } else {
            ""
        }
    );
    println!(
        "parameters: this model {}, ordinal {}, multinomial {}, saturated joint {}",
        report_counts.colp, report_counts.ordinal, report_counts.multinomial, report_counts.saturated
    );

    let echo = FitEcho {
        input: args.input.display().to_string(),
        x: &args.x,
        y: &args.y,
        discretize_x: args.discretize_x,
        discretize_y: args.discretize_y,
        sigma: args.sigma.clone(),
        seed: args.seed,
        engine: &args.engine,
    };
    let mut record = RunRecord::start("fit", &echo, args.out.clone())?;
    record.push(&FitRecord {
        record: "fit",
        n: sample.n(),
        rows_dropped: report.rows_dropped,
        x_levels: sample.s_levels(),
        y_levels: sample.l_levels(),
        ordering: fit
            .sigma
            .ordering_labels(sample.y_labels())
            .into_iter()
            .map(str::to_string)
            .collect(),
        sigma: fit.sigma.one_based(),
        beta: fit.ordinal.params.beta().to_vec(),
        gamma: fit.ordinal.params.gamma().to_vec(),
        log_likelihood: fit.ordinal.log_likelihood,
        converged: fit.ordinal.converged,
        iterations: fit.ordinal.iterations,
        separation: fit.ordinal.separation,
        search: fit.search.to_string(),
        evaluations: fit.evaluations,
        complexity: report_counts,
    })?;
    record.finish()
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario: 1, 2, or 3.
    #[arg(long)]
    pub scenario: Scenario,
    /// Sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    pub n: Vec<usize>,
    /// Replications per sample size.
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    /// Master seed (required: reproducibility is not optional).
    #[arg(long)]
    pub seed: u64,
    /// Override the scenario's default number of levels (L = S).
    #[arg(long)]
    pub levels: Option<usize>,
    /// Hidden-confounder level count (scenario 3).
    #[arg(long, default_value_t = 5)]
    pub confounder_levels: usize,
    /// Standard deviation of the generating coefficients.
    #[arg(long, default_value_t = 1.0)]
    pub beta_sd: f64,
    /// Count ties as incorrect instead of half credit.
    #[arg(long)]
    pub tie_incorrect: bool,
    /// Score ordering recovery by the better of the two orientations.
    #[arg(long)]
    pub tau_best_orientation: bool,
    #[command(flatten)]
    pub engine: EngineOpts,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Write the JSON-lines run record here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write plot-ready TSV (x = n) here.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
}

#[derive(Serialize)]
struct SimulateEcho<'a> {
    scenario: Scenario,
    n: &'a [usize],
    reps: usize,
    seed: u64,
    levels: usize,
    confounder_levels: usize,
    beta_sd: f64,
    tie_incorrect: bool,
    tau_best_orientation: bool,
    #[serde(flatten)]
    engine: &'a EngineOpts,
}

#[derive(Serialize)]
struct ReplicationRecord<'a> {
    record: &'static str,
    n: usize,
    #[serde(flatten)]
    outcome: &'a RepOutcome,
}

#[derive(Serialize)]
struct ScenarioSummary {
    record: &'static str,
    n: usize,
    reps: usize,
    accuracy: f64,
    accuracy_se: f64,
    mean_tau: f64,
}

fn scenario_config(args: &SimulateArgs, n: usize) -> ScenarioConfig {
    let mut config = ScenarioConfig::new(args.scenario);
    if let Some(levels) = args.levels {
        config.l_levels = levels;
        config.s_levels = levels;
    }
    config.n = n;
    config.reps = args.reps;
    config.seed = args.seed;
    config.link = args.engine.link;
    config.beta_sd = args.beta_sd;
    config.confounder_levels = args.confounder_levels;
    config.tau_best_orientation = args.tau_best_orientation;
    config
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    if args.n.is_empty() {
        return Err(Error::InvalidConfig("need at least one sample size".into()));
    }
    let causal = args.engine.causal_config(args.seed);
    let echo = SimulateEcho {
        scenario: args.scenario,
        n: &args.n,
        reps: args.reps,
        seed: args.seed,
        levels: scenario_config(args, args.n[0]).l_levels,
        confounder_levels: args.confounder_levels,
        beta_sd: args.beta_sd,
        tie_incorrect: args.tie_incorrect,
        tau_best_orientation: args.tau_best_orientation,
        engine: &args.engine,
    };
    let mut record = RunRecord::start("simulate", &echo, args.out.clone())?;

    let mut table_rows = Vec::new();
    let mut plot_rows = Vec::new();
    for &n in &args.n {
        let config = scenario_config(args, n);
        let run = run_scenario(&config, &causal, args.tie_incorrect)?;
        for outcome in &run.outcomes {
            record.push(&ReplicationRecord {
                record: "replication",
                n,
                outcome,
            })?;
        }
        record.push(&ScenarioSummary {
            record: "summary",
            n,
            reps: args.reps,
            accuracy: run.accuracy,
            accuracy_se: run.accuracy_se,
            mean_tau: run.mean_tau,
        })?;
        table_rows.push(vec![
            n.to_string(),
            format_float(run.accuracy),
            format_float(run.accuracy_se),
            format_float(run.mean_tau),
        ]);
        plot_rows.push(PlotRow {
            x: n.to_string(),
            accuracy: run.accuracy,
            se: run.accuracy_se,
            mean_tau: Some(run.mean_tau),
        });
    }
    println!(
        "scenario {} | levels {} | reps {} | seed {}",
        args.scenario, echo.levels, args.reps, args.seed
    );
    print_table(&["n", "accuracy", "se", "mean_tau"], &table_rows);
    if let Some(path) = &args.plot_data {
        write_plot_data(path, &plot_rows)?;
    }
    record.finish()
}

// ---------------------------------------------------------------------------
// ablate

#[derive(Debug, Args)]
pub struct AblateArgs {
    /// Target Kendall tau values for the frozen forward ordering.
    #[arg(long, value_delimiter = ',', default_value = "0,0.2,0.4,0.6,0.8,1")]
    pub taus: Vec<f64>,
    /// Sample size per replication.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Replications per tau.
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    /// Master seed (required: reproducibility is not optional).
    #[arg(long)]
    pub seed: u64,
    /// Number of levels (L = S).
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    /// Standard deviation of the generating coefficients.
    #[arg(long, default_value_t = 1.0)]
    pub beta_sd: f64,
    /// Count ties as incorrect instead of half credit.
    #[arg(long)]
    pub tie_incorrect: bool,
    #[command(flatten)]
    pub engine: EngineOpts,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Write the JSON-lines run record here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write plot-ready TSV (x = target tau) here.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
}

#[derive(Serialize)]
struct AblateEcho<'a> {
    taus: &'a [f64],
    n: usize,
    reps: usize,
    seed: u64,
    levels: usize,
    beta_sd: f64,
    tie_incorrect: bool,
    #[serde(flatten)]
    engine: &'a EngineOpts,
}

#[derive(Serialize)]
struct AblationRepRecord<'a> {
    record: &'static str,
    target_tau: f64,
    #[serde(flatten)]
    outcome: &'a RepOutcome,
}

#[derive(Serialize)]
struct AblationSummary<'a> {
    record: &'static str,
    target_tau: f64,
    achieved_tau: f64,
    sigma: &'a Permutation,
    reps: usize,
    accuracy: f64,
    accuracy_se: f64,
}

pub fn ablate(args: &AblateArgs) -> Result<()> {
    let mut config = ScenarioConfig::new(Scenario::S1);
    config.l_levels = args.levels;
    config.s_levels = args.levels;
    config.n = args.n;
    config.reps = args.reps;
    config.seed = args.seed;
    config.link = args.engine.link;
    config.beta_sd = args.beta_sd;
    let causal = args.engine.causal_config(args.seed);

    let echo = AblateEcho {
        taus: &args.taus,
        n: args.n,
        reps: args.reps,
        seed: args.seed,
        levels: args.levels,
        beta_sd: args.beta_sd,
        tie_incorrect: args.tie_incorrect,
        engine: &args.engine,
    };
    let mut record = RunRecord::start("ablate", &echo, args.out.clone())?;

    let table = run_ablation(&config, &causal, &args.taus, args.tie_incorrect)?;
    let mut table_rows = Vec::new();
    let mut plot_rows = Vec::new();
    for row in &table.rows {
        for outcome in &row.run.outcomes {
            record.push(&AblationRepRecord {
                record: "replication",
                target_tau: row.target_tau,
                outcome,
            })?;
        }
        record.push(&AblationSummary {
            record: "summary",
            target_tau: row.target_tau,
            achieved_tau: row.achieved_tau,
            sigma: &row.sigma,
            reps: args.reps,
            accuracy: row.run.accuracy,
            accuracy_se: row.run.accuracy_se,
        })?;
        table_rows.push(vec![
            format!("{:.2}", row.target_tau),
            format!("{:.2}", row.achieved_tau),
            format_float(row.run.accuracy),
            format_float(row.run.accuracy_se),
        ]);
        plot_rows.push(PlotRow {
            x: row.target_tau.to_string(),
            accuracy: row.run.accuracy,
            se: row.run.accuracy_se,
            mean_tau: None,
        });
    }
    println!(
        "fixed-ordering study | levels {} | n {} | reps {} | seed {}",
        args.levels, args.n, args.reps, args.seed
    );
    print_table(&["target_tau", "achieved_tau", "accuracy", "se"], &table_rows);
    if let Some(path) = &args.plot_data {
        write_plot_data(path, &plot_rows)?;
    }
    record.finish()
}

// ---------------------------------------------------------------------------
// sweep

/// Level counts given as an inclusive "3..12" range or a comma list.
#[derive(Debug, Clone)]
pub struct LevelList(pub Vec<usize>);

fn parse_levels(raw: &str) -> std::result::Result<LevelList, String> {
    let parse_one = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad level count {s:?}"))
    };
    if let Some((lo, hi)) = raw.split_once("..") {
        let lo = parse_one(lo)?;
        let hi = parse_one(hi)?;
        if lo > hi {
            return Err(format!("empty range {raw:?}"));
        }
        Ok(LevelList((lo..=hi).collect()))
    } else {
        raw.split(',')
            .map(parse_one)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(LevelList)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Level counts: an inclusive range "3..12" or a comma list "3,5,7".
    #[arg(long, value_parser = parse_levels)]
    pub levels: LevelList,
    /// Sample size per replication.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Replications per level count.
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    /// Master seed (required: reproducibility is not optional).
    #[arg(long)]
    pub seed: u64,
    /// Standard deviation of the generating coefficients.
    #[arg(long, default_value_t = 1.0)]
    pub beta_sd: f64,
    /// Count ties as incorrect instead of half credit.
    #[arg(long)]
    pub tie_incorrect: bool,
    /// Score ordering recovery by the better of the two orientations.
    #[arg(long)]
    pub tau_best_orientation: bool,
    #[command(flatten)]
    pub engine: EngineOpts,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Write the JSON-lines run record here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write plot-ready TSV (x = level count) here.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
}

#[derive(Serialize)]
struct SweepEcho<'a> {
    levels: &'a [usize],
    n: usize,
    reps: usize,
    seed: u64,
    beta_sd: f64,
    tie_incorrect: bool,
    tau_best_orientation: bool,
    #[serde(flatten)]
    engine: &'a EngineOpts,
}

#[derive(Serialize)]
struct SweepRepRecord<'a> {
    record: &'static str,
    levels: usize,
    #[serde(flatten)]
    outcome: &'a RepOutcome,
}

#[derive(Serialize)]
struct SweepSummary {
    record: &'static str,
    levels: usize,
    reps: usize,
    accuracy: f64,
    accuracy_se: f64,
    mean_tau: f64,
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let mut config = ScenarioConfig::new(Scenario::S1);
    config.n = args.n;
    config.reps = args.reps;
    config.seed = args.seed;
    config.link = args.engine.link;
    config.beta_sd = args.beta_sd;
    config.tau_best_orientation = args.tau_best_orientation;
    let causal = args.engine.causal_config(args.seed);

    let echo = SweepEcho {
        levels: &args.levels.0,
        n: args.n,
        reps: args.reps,
        seed: args.seed,
        beta_sd: args.beta_sd,
        tie_incorrect: args.tie_incorrect,
        tau_best_orientation: args.tau_best_orientation,
        engine: &args.engine,
    };
    let mut record = RunRecord::start("sweep", &echo, args.out.clone())?;

    let table = run_sweep(&config, &causal, &args.levels.0, args.tie_incorrect)?;
    let mut table_rows = Vec::new();
    let mut plot_rows = Vec::new();
    for SweepRow { levels, run } in &table.rows {
        for outcome in &run.outcomes {
            record.push(&SweepRepRecord {
                record: "replication",
                levels: *levels,
                outcome,
            })?;
        }
        record.push(&SweepSummary {
            record: "summary",
            levels: *levels,
            reps: args.reps,
            accuracy: run.accuracy,
            accuracy_se: run.accuracy_se,
            mean_tau: run.mean_tau,
        })?;
        table_rows.push(vec![
            levels.to_string(),
            format_float(run.accuracy),
            format_float(run.accuracy_se),
            format_float(run.mean_tau),
        ]);
        plot_rows.push(PlotRow {
            x: levels.to_string(),
            accuracy: run.accuracy,
            se: run.accuracy_se,
            mean_tau: Some(run.mean_tau),
        });
    }
    println!(
        "level sweep | n {} | reps {} | seed {}",
        args.n, args.reps, args.seed
    );
    print_table(&["levels", "accuracy", "se", "mean_tau"], &table_rows);
    if let Some(path) = &args.plot_data {
        write_plot_data(path, &plot_rows)?;
    }
    record.finish()
}

// ---------------------------------------------------------------------------
// bench

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Pair-collection directory containing pairs.csv.
    #[arg(long)]
    pub dir: PathBuf,
    /// Seed for greedy restart initializations.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Count ties as incorrect instead of half credit.
    #[arg(long)]
    pub tie_incorrect: bool,
    #[command(flatten)]
    pub engine: EngineOpts,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Write the JSON-lines run record here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct BenchEcho<'a> {
    dir: String,
    seed: u64,
    tie_incorrect: bool,
    #[serde(flatten)]
    engine: &'a EngineOpts,
}

#[derive(Serialize)]
struct PairRecord {
    record: &'static str,
    file: String,
    x_column: String,
    y_column: String,
    n: usize,
    rows_dropped: usize,
    truth: Option<Direction>,
    decision: Decision,
    /// Credit toward accuracy; absent when the pair carries no truth.
    score: Option<f64>,
    log_likelihood_gap: f64,
    forward_ordering: Vec<String>,
    backward_ordering: Vec<String>,
    separation: bool,
}

#[derive(Serialize)]
struct BenchSummary {
    record: &'static str,
    pairs: usize,
    scored_pairs: usize,
    accuracy: Option<f64>,
}

fn pair_score(truth: Direction, decision: Decision, tie_incorrect: bool) -> f64 {
    match (truth, decision) {
        (Direction::XToY, Decision::XToY) | (Direction::YToX, Decision::YToX) => 1.0,
        (_, Decision::Tie) => {
            if tie_incorrect {
                0.0
            } else {
                0.5
            }
        }
        _ => 0.0,
    }
}

pub fn bench(args: &BenchArgs) -> Result<()> {
    let pairs = read_manifest(&args.dir)?;
    let causal = args.engine.causal_config(args.seed);

    let results: Vec<PairRecord> = pairs
        .par_iter()
        .map(|pair| {
            let (sample, report) = colp_core::read_pair(pair)?;
            let verdict = decide(&sample, &causal)?;
            let score = pair
                .truth
                .map(|t| pair_score(t, verdict.decision, args.tie_incorrect));
            Ok(PairRecord {
                record: "pair",
                file: pair
                    .path
                    .file_name()
                    .map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_else(|| pair.path.display().to_string()),
                x_column: pair.x_column.clone(),
                y_column: pair.y_column.clone(),
                n: sample.n(),
                rows_dropped: report.rows_dropped,
                truth: pair.truth,
                decision: verdict.decision,
                score,
                log_likelihood_gap: verdict.log_likelihood_gap,
                forward_ordering: verdict
                    .forward
                    .colp
                    .sigma
                    .ordering_labels(sample.y_labels())
                    .into_iter()
                    .map(str::to_string)
                    .collect(),
                backward_ordering: verdict
                    .backward
                    .colp
                    .sigma
                    .ordering_labels(sample.x_labels())
                    .into_iter()
                    .map(str::to_string)
                    .collect(),
                separation: verdict.any_separation(),
            })
        })
        .collect::<Result<_>>()?;

    let scored: Vec<f64> = results.iter().filter_map(|r| r.score).collect();
    let accuracy = if scored.is_empty() {
        None
    } else {
        Some(scored.iter().sum::<f64>() / scored.len() as f64)
    };

    let echo = BenchEcho {
        dir: args.dir.display().to_string(),
        seed: args.seed,
        tie_incorrect: args.tie_incorrect,
        engine: &args.engine,
    };
    let mut record = RunRecord::start("bench", &echo, args.out.clone())?;
    let mut table_rows = Vec::new();
    for r in &results {
        record.push(r)?;
        table_rows.push(vec![
            r.file.clone(),
            format!("{} -> {}", r.x_column, r.y_column),
            r.truth.map(|t| t.to_string()).unwrap_or_else(|| "?".into()),
            r.decision.to_string(),
            r.score.map(|s| format!("{s:.1}")).unwrap_or_else(|| "-".into()),
            format!("{:.4}", r.log_likelihood_gap),
        ]);
    }
    record.push(&BenchSummary {
        record: "summary",
        pairs: results.len(),
        scored_pairs: scored.len(),
        accuracy,
    })?;

    println!("pair collection: {}", args.dir.display());
    print_table(
        &["file", "pair", "truth", "decision", "score", "gap"],
        &table_rows,
    );
    match accuracy {
        Some(acc) => println!(
            "accuracy: {:.4} over {} labeled pairs",
            acc,
            scored.len()
        ),
        None => println!("accuracy: n/a (no labeled pairs)"),
    }
    record.finish()
}
