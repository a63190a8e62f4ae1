//! Seeded generators for the benchmark scenarios, plus the ablation and
//! category-sweep harnesses built on them.
//!
//! Scenario 1 draws a uniform cause with 5 levels, fresh standard-normal
//! coefficients per replication, and thresholds calibrated so every effect
//! category has population probability 1/L; the generating ordering is the
//! identity. Scenario 2 is the same with 10 levels. Scenario 3 adds a
//! uniform confounder Z feeding both X and Y through the same kind of
//! conditionals, then drops Z from the emitted sample.
//!
//! Everything is a pure function of (config, seed): replications get split
//! generator streams and can run in parallel without changing results.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::causal::{decide, decide_with_fixed_forward, CausalConfig, CausalVerdict, Decision};
use crate::rng::replication_rng;
use crate::{kendall_tau, Error, Link, PairedSample, Permutation, Result};

/// Which generating process to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    S1,
    S2,
    S3,
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scenario::S1 => "s1",
            Scenario::S2 => "s2",
            Scenario::S3 => "s3",
        })
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "s1" => Ok(Scenario::S1),
            "2" | "s2" => Ok(Scenario::S2),
            "3" | "s3" => Ok(Scenario::S3),
            other => Err(Error::InvalidConfig(format!(
                "unknown scenario {other:?}, expected 1, 2, or 3"
            ))),
        }
    }
}

/// Generator settings. `new` fills the per-scenario level-count defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub l_levels: usize,
    pub s_levels: usize,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub link: Link,
    pub beta_sd: f64,
    pub confounder_levels: usize,
    /// Score the estimated ordering by the better of its two orientations
    /// instead of canonical-vs-canonical.
    pub tau_best_orientation: bool,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        let levels = match scenario {
            Scenario::S1 | Scenario::S3 => 5,
            Scenario::S2 => 10,
        };
        Self {
            scenario,
            l_levels: levels,
            s_levels: levels,
            n: 1000,
            reps: 200,
            seed: 0,
            link: Link::Logit,
            beta_sd: 1.0,
            confounder_levels: 5,
            tau_best_orientation: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l_levels < 3 || self.s_levels < 3 {
            return Err(Error::InvalidConfig(format!(
                "scenario needs at least 3 levels per variable, got L={}, S={}",
                self.l_levels, self.s_levels
            )));
        }
        if self.n == 0 || self.reps == 0 {
            return Err(Error::InvalidConfig(
                "sample size and replication count must be positive".into(),
            ));
        }
        if !(self.beta_sd.is_finite() && self.beta_sd > 0.0) {
            return Err(Error::InvalidConfig("beta_sd must be positive".into()));
        }
        if self.scenario == Scenario::S3 && self.confounder_levels < 2 {
            return Err(Error::InvalidConfig(
                "confounder needs at least 2 levels".into(),
            ));
        }
        Ok(())
    }
}

/// What one replication was generated from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Always the identity: the data are ordered by construction.
    pub sigma_true: Permutation,
    pub params: GenParams,
}

/// Generating parameters, recorded for reproducibility.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenParams {
    Direct {
        omega: Vec<f64>,
        beta: Vec<f64>,
        /// Thresholds gamma_1..gamma_{L-1} with gamma_1 = 0.
        gamma: Vec<f64>,
    },
    Confounded {
        z_levels: usize,
        beta_zx: Vec<f64>,
        /// Cause thresholds eta_1..eta_{S-1} with eta_1 = 0.
        eta: Vec<f64>,
        beta_xy: Vec<f64>,
        beta_zy: Vec<f64>,
        /// Effect thresholds gamma_1..gamma_{L-1} with gamma_1 = 0.
        gamma: Vec<f64>,
    },
}

/// Output of threshold calibration: the shifted threshold ladder (first
/// entry exactly 0), the equally shifted latent offsets, and the shift that
/// was applied. The shift is model-equivalent: it cancels inside every
/// F(gamma - beta) evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibrated {
    /// gamma_1..gamma_{L-1}; gamma[0] == 0.
    pub gamma: Vec<f64>,
    /// Offsets minus the shift, aligned with the input vector.
    pub beta: Vec<f64>,
    pub shift: f64,
}

/// Solve for thresholds making the mixture marginal uniform: gamma_j such
/// that `sum_s omega_s F(gamma_j - beta_s) = j / L`, found by bisection to
/// 1e-10, then shifted so gamma_1 = 0 with the same shift applied to the
/// offsets.
pub fn calibrate_thresholds(
    beta: &[f64],
    omega: &[f64],
    link: Link,
    l_levels: usize,
) -> Result<Calibrated> {
    if beta.len() != omega.len() || beta.is_empty() {
        return Err(Error::CalibrationFailed(format!(
            "offset and weight lengths disagree: {} vs {}",
            beta.len(),
            omega.len()
        )));
    }
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::NonFiniteParameter("beta"));
    }
    let total: f64 = omega.iter().sum();
    if omega.iter().any(|&w| !(w >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::CalibrationFailed(
            "weights must be a probability distribution".into(),
        ));
    }
    if l_levels < 2 {
        return Err(Error::CalibrationFailed(
            "need at least 2 response levels".into(),
        ));
    }

    let mixture_cdf = |g: f64| -> f64 {
        beta.iter()
            .zip(omega)
            .map(|(&b, &w)| w * link.cdf(g - b))
            .sum()
    };
    let (beta_min, beta_max) = beta
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &b| {
            (lo.min(b), hi.max(b))
        });

    let mut gamma_raw = Vec::with_capacity(l_levels - 1);
    for j in 1..l_levels {
        let target = j as f64 / l_levels as f64;
        let base = link.inverse_cdf(target);
        let mut lo = base + beta_min;
        let mut hi = base + beta_max;
        // The mixture cdf brackets the target between the extreme offsets.
        for _ in 0..200 {
            if hi - lo <= 1e-10 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mixture_cdf(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if hi - lo > 1e-9 {
            return Err(Error::CalibrationFailed(format!(
                "bisection did not tighten for threshold {j}"
            )));
        }
        gamma_raw.push(0.5 * (lo + hi));
    }

    let shift = gamma_raw[0];
    let mut gamma: Vec<f64> = gamma_raw.iter().map(|g| g - shift).collect();
    gamma[0] = 0.0;
    let beta_shifted = beta.iter().map(|b| b - shift).collect();
    Ok(Calibrated {
        gamma,
        beta: beta_shifted,
        shift,
    })
}

/// Band probabilities of an L-level ordinal response at one latent offset,
/// under the identity ordering. `gamma` is the calibrated ladder
/// (gamma_1..gamma_{L-1}).
fn ordinal_pmf(gamma: &[f64], offset: f64, link: Link) -> Vec<f64> {
    let l = gamma.len() + 1;
    let mut pmf = Vec::with_capacity(l);
    let mut prev = 0.0;
    for &g in gamma {
        let c = link.cdf(g - offset);
        pmf.push((c - prev).max(0.0));
        prev = c;
    }
    pmf.push((1.0 - prev).max(0.0));
    pmf
}

fn draw_categorical<R: Rng>(rng: &mut R, pmf: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut cum = 0.0;
    for (level, &p) in pmf.iter().enumerate() {
        cum += p;
        if u < cum {
            return level;
        }
    }
    pmf.len() - 1
}

/// Generate one replication's sample and its ground truth. Identical
/// (config, rep) always produce the identical sample.
pub fn generate_replication(
    config: &ScenarioConfig,
    rep: usize,
) -> Result<(PairedSample, GroundTruth)> {
    config.validate()?;
    let mut rng = replication_rng(config.seed, rep as u64);
    let normal = Normal::new(0.0, config.beta_sd)
        .map_err(|e| Error::InvalidConfig(format!("bad beta_sd: {e}")))?;
    let l = config.l_levels;
    let s = config.s_levels;
    let link = config.link;

    match config.scenario {
        Scenario::S1 | Scenario::S2 => {
            let beta_raw: Vec<f64> = (0..s).map(|_| normal.sample(&mut rng)).collect();
            let omega = vec![1.0 / s as f64; s];
            let cal = calibrate_thresholds(&beta_raw, &omega, link, l)?;
            let pmfs: Vec<Vec<f64>> = cal
                .beta
                .iter()
                .map(|&b| ordinal_pmf(&cal.gamma, b, link))
                .collect();
            let mut x = Vec::with_capacity(config.n);
            let mut y = Vec::with_capacity(config.n);
            for _ in 0..config.n {
                let xi = rng.random_range(0..s);
                let yi = draw_categorical(&mut rng, &pmfs[xi]);
                x.push(xi);
                y.push(yi);
            }
            let sample = PairedSample::new(x, y, s, l)?;
            let truth = GroundTruth {
                sigma_true: Permutation::identity(l),
                params: GenParams::Direct {
                    omega,
                    beta: cal.beta,
                    gamma: cal.gamma,
                },
            };
            Ok((sample, truth))
        }
        Scenario::S3 => {
            let zl = config.confounder_levels;
            // Stage 1: X given Z, thresholds balanced over the uniform Z.
            let beta_zx_raw: Vec<f64> = (0..zl).map(|_| normal.sample(&mut rng)).collect();
            let z_weights = vec![1.0 / zl as f64; zl];
            let cal_x = calibrate_thresholds(&beta_zx_raw, &z_weights, link, s)?;
            let x_given_z: Vec<Vec<f64>> = cal_x
                .beta
                .iter()
                .map(|&b| ordinal_pmf(&cal_x.gamma, b, link))
                .collect();

            // Stage 2: Y given (X, Z) through concatenated dummy predictors;
            // the mixture for balancing runs over the joint (x, z) law.
            let beta_xy_raw: Vec<f64> = (0..s).map(|_| normal.sample(&mut rng)).collect();
            let beta_zy_raw: Vec<f64> = (0..zl).map(|_| normal.sample(&mut rng)).collect();
            let mut offsets = Vec::with_capacity(s * zl);
            let mut weights = Vec::with_capacity(s * zl);
            for (z, x_pmf) in x_given_z.iter().enumerate() {
                for (xi, &px) in x_pmf.iter().enumerate() {
                    offsets.push(beta_xy_raw[xi] + beta_zy_raw[z]);
                    weights.push(px / zl as f64);
                }
            }
            let cal_y = calibrate_thresholds(&offsets, &weights, link, l)?;
            // Absorb the calibration shift into the X block.
            let beta_xy: Vec<f64> = beta_xy_raw.iter().map(|b| b - cal_y.shift).collect();

            let mut x = Vec::with_capacity(config.n);
            let mut y = Vec::with_capacity(config.n);
            for _ in 0..config.n {
                let zi = rng.random_range(0..zl);
                let xi = draw_categorical(&mut rng, &x_given_z[zi]);
                let y_pmf = ordinal_pmf(&cal_y.gamma, beta_xy[xi] + beta_zy_raw[zi], link);
                let yi = draw_categorical(&mut rng, &y_pmf);
                x.push(xi);
                y.push(yi);
            }
            // Z is dropped: the emitted pair has a hidden confounder.
            let sample = PairedSample::new(x, y, s, l)?;
            let truth = GroundTruth {
                sigma_true: Permutation::identity(l),
                params: GenParams::Confounded {
                    z_levels: zl,
                    beta_zx: cal_x.beta,
                    eta: cal_x.gamma,
                    beta_xy,
                    beta_zy: beta_zy_raw,
                    gamma: cal_y.gamma,
                },
            };
            Ok((sample, truth))
        }
    }
}

/// Per-replication benchmark result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepOutcome {
    pub rep: usize,
    pub decision: Decision,
    /// 1 for the true direction, 0 for the wrong one; ties score 0.5 unless
    /// configured to count as incorrect.
    pub score: f64,
    pub log_likelihood_gap: f64,
    pub gap_per_observation: f64,
    /// Kendall's tau between the estimated forward ordering and the truth.
    pub kendall_tau_forward: f64,
    pub separation: bool,
}

/// Aggregated scenario results.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioRun {
    pub outcomes: Vec<RepOutcome>,
    pub accuracy: f64,
    /// Binomial standard error sqrt(acc * (1 - acc) / reps).
    pub accuracy_se: f64,
    pub mean_tau: f64,
}

fn score_decision(decision: Decision, tie_incorrect: bool) -> f64 {
    match decision {
        Decision::XToY => 1.0,
        Decision::YToX => 0.0,
        Decision::Tie => {
            if tie_incorrect {
                0.0
            } else {
                0.5
            }
        }
    }
}

fn outcome_from(
    rep: usize,
    n: usize,
    verdict: &CausalVerdict,
    truth: &GroundTruth,
    tie_incorrect: bool,
    tau_best_orientation: bool,
) -> Result<RepOutcome> {
    let tau_canonical = kendall_tau(
        &verdict.forward.colp.sigma,
        &truth.sigma_true.canonicalize(),
    )?;
    let tau = if tau_best_orientation {
        tau_canonical.abs()
    } else {
        tau_canonical
    };
    Ok(RepOutcome {
        rep,
        decision: verdict.decision,
        score: score_decision(verdict.decision, tie_incorrect),
        log_likelihood_gap: verdict.log_likelihood_gap,
        gap_per_observation: verdict.log_likelihood_gap / n as f64,
        kendall_tau_forward: tau,
        separation: verdict.any_separation(),
    })
}

fn aggregate(outcomes: Vec<RepOutcome>) -> ScenarioRun {
    let reps = outcomes.len() as f64;
    let accuracy = outcomes.iter().map(|o| o.score).sum::<f64>() / reps;
    let accuracy_se = (accuracy * (1.0 - accuracy) / reps).sqrt();
    let mean_tau = outcomes.iter().map(|o| o.kendall_tau_forward).sum::<f64>() / reps;
    ScenarioRun {
        outcomes,
        accuracy,
        accuracy_se,
        mean_tau,
    }
}

/// Generate and decide every replication; replications run in parallel and
/// aggregate in index order.
pub fn run_scenario(
    config: &ScenarioConfig,
    causal: &CausalConfig,
    tie_incorrect: bool,
) -> Result<ScenarioRun> {
    config.validate()?;
    let outcomes: Vec<RepOutcome> = (0..config.reps)
        .into_par_iter()
        .map(|rep| {
            let (data, truth) = generate_replication(config, rep)?;
            let verdict = decide(&data, causal)?;
            outcome_from(
                rep,
                config.n,
                &verdict,
                &truth,
                tie_incorrect,
                config.tau_best_orientation,
            )
        })
        .collect::<Result<_>>()?;
    Ok(aggregate(outcomes))
}

/// Identity-adjacent permutation whose tau against the identity meets or
/// just passes the target, built by greedy adjacent swaps. Returns the
/// permutation and the tau it actually achieves (targets between the
/// reachable grid values are passed, not hit).
pub fn permutation_at_tau(l_levels: usize, target: f64) -> Result<(Permutation, f64)> {
    if !(-1.0..=1.0).contains(&target) {
        return Err(Error::InvalidConfig(format!(
            "target tau {target} outside [-1, 1]"
        )));
    }
    let identity = Permutation::identity(l_levels);
    let mut map: Vec<usize> = (0..l_levels).collect();
    let mut current = identity.clone();
    let mut tau = 1.0;
    while tau > target {
        // First adjacent in-order pair from the left; none means fully
        // reversed (tau = -1).
        let Some(i) = (0..l_levels - 1).find(|&i| map[i] < map[i + 1]) else {
            break;
        };
        map.swap(i, i + 1);
        current = Permutation::from_map(map.clone())?;
        tau = kendall_tau(&current, &identity)?;
    }
    Ok((current, tau))
}

/// One row of the fixed-ordering study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationRow {
    pub target_tau: f64,
    pub achieved_tau: f64,
    pub sigma: Permutation,
    pub run: ScenarioRun,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationTable {
    pub rows: Vec<AblationRow>,
}

/// For each target tau, freeze the forward ordering at a permutation that
/// far from the truth and measure decision accuracy. The backward side
/// still searches, so a badly fixed forward ordering loses the comparison.
pub fn run_ablation(
    config: &ScenarioConfig,
    causal: &CausalConfig,
    taus: &[f64],
    tie_incorrect: bool,
) -> Result<AblationTable> {
    config.validate()?;
    if config.scenario != Scenario::S1 {
        return Err(Error::InvalidConfig(
            "the ablation study runs under scenario 1".into(),
        ));
    }
    let mut rows = Vec::with_capacity(taus.len());
    for &target in taus {
        let (sigma, achieved) = permutation_at_tau(config.l_levels, target)?;
        let outcomes: Vec<RepOutcome> = (0..config.reps)
            .into_par_iter()
            .map(|rep| {
                let (data, truth) = generate_replication(config, rep)?;
                let verdict = decide_with_fixed_forward(&data, &sigma, causal)?;
                outcome_from(
                    rep,
                    config.n,
                    &verdict,
                    &truth,
                    tie_incorrect,
                    config.tau_best_orientation,
                )
            })
            .collect::<Result<_>>()?;
        rows.push(AblationRow {
            target_tau: target,
            achieved_tau: achieved,
            sigma: sigma.clone(),
            run: aggregate(outcomes),
        });
    }
    Ok(AblationTable { rows })
}

/// One row of the varying-category-count sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub levels: usize,
    pub run: ScenarioRun,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// Run the scenario at each L = S in `level_counts` and tabulate accuracy
/// and mean ordering recovery.
pub fn run_sweep(
    config: &ScenarioConfig,
    causal: &CausalConfig,
    level_counts: &[usize],
    tie_incorrect: bool,
) -> Result<SweepTable> {
    let mut rows = Vec::with_capacity(level_counts.len());
    for &levels in level_counts {
        let mut cfg = config.clone();
        cfg.l_levels = levels;
        cfg.s_levels = levels;
        rows.push(SweepRow {
            levels,
            run: run_scenario(&cfg, causal, tie_incorrect)?,
        });
    }
    Ok(SweepTable { rows })
}
