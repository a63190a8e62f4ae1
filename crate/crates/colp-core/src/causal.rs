//! Causal direction inference for a categorical pair.
//!
//! Two hypotheses compete: X causes Y, or Y causes X. Each is a joint model
//! made of a multinomial marginal for the cause and a permuted-ordinal
//! conditional for the effect, so the backward fit is the forward machinery
//! applied to the swapped pair. The direction with the larger maximized
//! joint log-likelihood wins; gaps inside the tie tolerance are reported as
//! ties rather than forced to a side.
//!
//! Both directions always use the same search mode and optimizer settings —
//! anything else would bias the comparison.

use serde::{Deserialize, Serialize};

use crate::colp::{
    fit_colp_exhaustive, fit_colp_fixed, fit_colp_greedy_restarts, ColpConfig, ColpFit,
};
use crate::{conditional_pmf, Error, Link, PairedSample, Permutation, Result};

/// Causal orientation of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    XToY,
    YToX,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::XToY => "x_to_y",
            Direction::YToX => "y_to_x",
        })
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x_to_y" => Ok(Direction::XToY),
            "y_to_x" => Ok(Direction::YToX),
            other => Err(Error::InvalidConfig(format!(
                "unknown direction {other:?}, expected x_to_y or y_to_x"
            ))),
        }
    }
}

/// Outcome of the likelihood comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    XToY,
    YToX,
    Tie,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Decision::XToY => "x_to_y",
            Decision::YToX => "y_to_x",
            Decision::Tie => "tie",
        })
    }
}

/// Permutation search selection for the conditional fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchChoice {
    /// Exhaustive up to 6 levels on both sides, greedy beyond.
    Auto,
    Exhaustive,
    Greedy,
}

impl std::str::FromStr for SearchChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SearchChoice::Auto),
            "exhaustive" => Ok(SearchChoice::Exhaustive),
            "greedy" => Ok(SearchChoice::Greedy),
            other => Err(Error::InvalidConfig(format!(
                "unknown search {other:?}, expected auto, exhaustive, or greedy"
            ))),
        }
    }
}

/// Settings for the whole comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CausalConfig {
    pub link: Link,
    pub search: SearchChoice,
    /// Gaps with |gap| at or below this are ties.
    pub tie_tolerance: f64,
    pub colp: ColpConfig,
    /// Random restarts for greedy search (1 = identity start only).
    pub greedy_restarts: usize,
    /// Seed for restart initializations beyond the first.
    pub seed: u64,
}

impl Default for CausalConfig {
    fn default() -> Self {
        Self {
            link: Link::Logit,
            search: SearchChoice::Auto,
            tie_tolerance: 1e-6,
            colp: ColpConfig::default(),
            greedy_restarts: 1,
            seed: 0,
        }
    }
}

/// Maximum-likelihood multinomial marginal: relative frequencies, with the
/// log-likelihood using the 0 log 0 = 0 convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalFit {
    pub probs: Vec<f64>,
    pub log_likelihood: f64,
}

pub fn marginal_mle(counts: &[usize]) -> Result<MarginalFit> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::AllZeroCounts);
    }
    let n = total as f64;
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let log_likelihood = counts
        .iter()
        .zip(&probs)
        .filter(|(&c, _)| c > 0)
        .map(|(&c, &p)| c as f64 * p.ln())
        .sum();
    Ok(MarginalFit {
        probs,
        log_likelihood,
    })
}

/// One causal hypothesis, fully fitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectionFit {
    pub direction: Direction,
    /// Marginal of the hypothesized cause (omega-hat or rho-hat).
    pub marginal_probs: Vec<f64>,
    pub marginal_log_likelihood: f64,
    /// Conditional fit of effect given cause, with roles swapped for y_to_x.
    pub colp: ColpFit,
    /// Exactly marginal plus conditional log-likelihood.
    pub joint_log_likelihood: f64,
}

impl DirectionFit {
    /// Fitted joint probabilities, cause-major: rows index the hypothesized
    /// cause's levels, columns the effect's. Row sums reproduce the
    /// marginal probabilities because each conditional pmf telescopes to 1.
    pub fn joint_pmf(&self) -> Result<Vec<Vec<f64>>> {
        (0..self.marginal_probs.len())
            .map(|cause| {
                let pmf = conditional_pmf(
                    &self.colp.ordinal.params,
                    &self.colp.sigma,
                    self.colp.link,
                    cause,
                )?;
                Ok(pmf.iter().map(|p| p * self.marginal_probs[cause]).collect())
            })
            .collect()
    }
}

/// Both hypotheses side by side and the decision between them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CausalVerdict {
    pub forward: DirectionFit,
    pub backward: DirectionFit,
    /// Forward minus backward joint log-likelihood.
    pub log_likelihood_gap: f64,
    pub decision: Decision,
    pub tie_tolerance: f64,
}

impl CausalVerdict {
    /// True when either direction's conditional fit flagged separation.
    pub fn any_separation(&self) -> bool {
        self.forward.colp.ordinal.separation || self.backward.colp.ordinal.separation
    }
}

fn resolve_search(data: &PairedSample, config: &CausalConfig) -> SearchChoice {
    match config.search {
        SearchChoice::Auto => {
            if data.l_levels() <= 6 && data.s_levels() <= 6 {
                SearchChoice::Exhaustive
            } else {
                SearchChoice::Greedy
            }
        }
        other => other,
    }
}

fn check_gates(data: &PairedSample) -> Result<()> {
    if data.l_levels() <= 2 || data.s_levels() <= 2 {
        return Err(Error::DimensionGate {
            s_levels: data.s_levels(),
            l_levels: data.l_levels(),
        });
    }
    Ok(())
}

fn fit_oriented(
    oriented: &PairedSample,
    direction: Direction,
    search: SearchChoice,
    fixed_sigma: Option<&Permutation>,
    config: &CausalConfig,
) -> Result<DirectionFit> {
    if oriented.distinct_y() < 2 {
        return Err(Error::DegenerateData(format!(
            "effect column under {direction} has a single observed level"
        )));
    }
    let marginal = marginal_mle(&oriented.x_counts())?;
    let colp = match fixed_sigma {
        Some(sigma) => fit_colp_fixed(oriented, config.link, sigma, &config.colp)?,
        None => match search {
            SearchChoice::Exhaustive => {
                fit_colp_exhaustive(oriented, config.link, &config.colp)?
            }
            SearchChoice::Greedy => fit_colp_greedy_restarts(
                oriented,
                config.link,
                config.greedy_restarts,
                config.seed,
                &config.colp,
            )?,
            SearchChoice::Auto => unreachable!("resolved before dispatch"),
        },
    };
    let joint_log_likelihood = marginal.log_likelihood + colp.ordinal.log_likelihood;
    Ok(DirectionFit {
        direction,
        marginal_probs: marginal.probs,
        marginal_log_likelihood: marginal.log_likelihood,
        colp,
        joint_log_likelihood,
    })
}

/// Fit one causal hypothesis. For y_to_x the pair is swapped and the same
/// machinery runs, so the two directions are treated identically.
pub fn fit_direction(
    data: &PairedSample,
    direction: Direction,
    config: &CausalConfig,
) -> Result<DirectionFit> {
    check_gates(data)?;
    let search = resolve_search(data, config);
    let oriented = match direction {
        Direction::XToY => data.clone(),
        Direction::YToX => data.swapped(),
    };
    fit_oriented(&oriented, direction, search, None, config)
}

fn decide_inner(
    data: &PairedSample,
    fixed_forward: Option<&Permutation>,
    config: &CausalConfig,
) -> Result<CausalVerdict> {
    check_gates(data)?;
    let search = resolve_search(data, config);
    let forward_data = data.clone();
    let backward_data = data.swapped();
    let (forward, backward) = rayon::join(
        || fit_oriented(&forward_data, Direction::XToY, search, fixed_forward, config),
        || fit_oriented(&backward_data, Direction::YToX, search, None, config),
    );
    let forward = forward?;
    let backward = backward?;
    let log_likelihood_gap = forward.joint_log_likelihood - backward.joint_log_likelihood;
    let decision = if log_likelihood_gap > config.tie_tolerance {
        Decision::XToY
    } else if log_likelihood_gap < -config.tie_tolerance {
        Decision::YToX
    } else {
        Decision::Tie
    };
    Ok(CausalVerdict {
        forward,
        backward,
        log_likelihood_gap,
        decision,
        tie_tolerance: config.tie_tolerance,
    })
}

/// Fit both hypotheses on the same data and compare their maximized joint
/// likelihoods. Deterministic given data, config, and seed.
pub fn decide(data: &PairedSample, config: &CausalConfig) -> Result<CausalVerdict> {
    decide_inner(data, None, config)
}

/// Like [`decide`] but with the forward conditional's ordering frozen at
/// `sigma` (no search on that side). The backward direction still searches;
/// this deliberately breaks search parity and exists to measure how much
/// learning the ordering matters.
pub fn decide_with_fixed_forward(
    data: &PairedSample,
    sigma: &Permutation,
    config: &CausalConfig,
) -> Result<CausalVerdict> {
    decide_inner(data, Some(sigma), config)
}

/// Log-likelihood of the saturated bivariate multinomial fit, the upper
/// bound for any joint model of the pair.
pub fn saturated_log_likelihood(data: &PairedSample) -> f64 {
    let n = data.n() as f64;
    data.contingency()
        .iter()
        .flatten()
        .filter(|&&c| c > 0)
        .map(|&c| c as f64 * (c as f64 / n).ln())
        .sum()
}
