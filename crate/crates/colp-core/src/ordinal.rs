//! Cumulative-link ordinal regression with a fixed label permutation.
//!
//! The model for a categorical response with L levels and a categorical
//! predictor with S levels is
//!
//! `P(Y <= l | X = s) = F(gamma_{perm(l)} - beta_s)`
//!
//! with thresholds `gamma_0 = -inf < gamma_1 = 0 < gamma_2 < ... <
//! gamma_{L-1} < gamma_L = +inf`. The permutation reorders the response
//! categories so that an ordinal fit applies; fitting with permutation
//! `perm` is the same as fitting plain ordinal regression on the relabeled
//! responses `perm(y_i)`.
//!
//! Maximum likelihood runs over the unconstrained parameterization
//! `(beta, delta)` with `gamma_2 = exp(delta_2)` and
//! `gamma_j = gamma_{j-1} + exp(delta_j)`, which keeps the thresholds
//! strictly ordered at every iterate. The optimizer is damped Newton with
//! backtracking line search; the Hessian comes from central differences of
//! the analytic gradient and the step falls back to steepest descent when
//! the Hessian is not positive definite.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Link, PairedSample, Permutation, Result};

/// Probabilities below this floor are clamped inside logarithms.
const LOG_FLOOR: f64 = 1e-300;

/// Unconstrained threshold increments are capped at exp(+-DELTA_CAP) so a
/// collapsing or exploding band cannot produce ties or overflow.
const DELTA_CAP: f64 = 30.0;

/// Parameters of one conditional fit: per-predictor-level coefficients and
/// the free thresholds `gamma_2..gamma_{L-1}` (all strictly above the fixed
/// `gamma_1 = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrdinalParams {
    beta: Vec<f64>,
    gamma: Vec<f64>,
}

impl OrdinalParams {
    pub fn new(beta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFiniteParameter("beta"));
        }
        if gamma.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteParameter("gamma"));
        }
        let mut prev = 0.0;
        for &g in &gamma {
            if g <= prev {
                return Err(Error::InvalidThresholds(format!(
                    "{g} does not exceed its predecessor {prev}"
                )));
            }
            prev = g;
        }
        Ok(Self { beta, gamma })
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// Free thresholds `gamma_2..gamma_{L-1}` (length L-2).
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn s_levels(&self) -> usize {
        self.beta.len()
    }

    pub fn l_levels(&self) -> usize {
        self.gamma.len() + 2
    }

    /// Full threshold ladder `[-inf, 0, gamma..., +inf]`, indexed 0..=L.
    pub fn thresholds(&self) -> Vec<f64> {
        let mut t = Vec::with_capacity(self.gamma.len() + 3);
        t.push(f64::NEG_INFINITY);
        t.push(0.0);
        t.extend_from_slice(&self.gamma);
        t.push(f64::INFINITY);
        t
    }
}

/// Result of one maximum-likelihood fit at a fixed permutation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrdinalFit {
    pub params: OrdinalParams,
    pub log_likelihood: f64,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Set when an observed cell probability fell below the separation floor
    /// at termination or a coefficient ran into the cap.
    pub separation: bool,
}

/// Optimizer settings. Fits are deterministic given data, permutation, link,
/// config, and initialization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitConfig {
    pub max_iterations: usize,
    /// Convergence: infinity norm of the gradient.
    pub gradient_tolerance: f64,
    /// |beta| beyond this cap flags separation and stops the fit.
    pub beta_cap: f64,
    /// Observed probabilities below this at termination flag separation.
    pub probability_floor: f64,
    /// Relative step for the finite-difference Hessian.
    pub hessian_step: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_tolerance: 1e-8,
            beta_cap: 30.0,
            probability_floor: 1e-12,
            hessian_step: 1e-5,
        }
    }
}

/// Probability mass between two thresholds, offset by the linear predictor:
/// F(hi) - F(lo), evaluated in the mirrored tail when both arguments are
/// positive to avoid cancellation.
fn band_prob(link: Link, lo: f64, hi: f64) -> f64 {
    let p = if lo > 0.0 {
        link.cdf(-lo) - link.cdf(-hi)
    } else {
        link.cdf(hi) - link.cdf(lo)
    };
    p.max(0.0)
}

fn validate_dims(params: &OrdinalParams, sigma: &Permutation, data: &PairedSample) -> Result<()> {
    if sigma.len() != data.l_levels() || params.l_levels() != data.l_levels() {
        return Err(Error::InvalidConfig(format!(
            "level counts disagree: permutation {}, params {}, data {}",
            sigma.len(),
            params.l_levels(),
            data.l_levels()
        )));
    }
    if params.s_levels() != data.s_levels() {
        return Err(Error::InvalidConfig(format!(
            "predictor level counts disagree: params {}, data {}",
            params.s_levels(),
            data.s_levels()
        )));
    }
    Ok(())
}

/// Conditional pmf `[P(Y = l | X = s)]_{l = 0..L-1}` (0-based levels).
/// Entries are nonnegative and telescope to 1.
pub fn conditional_pmf(
    params: &OrdinalParams,
    sigma: &Permutation,
    link: Link,
    s: usize,
) -> Result<Vec<f64>> {
    if sigma.len() != params.l_levels() {
        return Err(Error::InvalidConfig(format!(
            "permutation length {} but params have {} levels",
            sigma.len(),
            params.l_levels()
        )));
    }
    if s >= params.s_levels() {
        return Err(Error::LevelOutOfRange {
            axis: "x",
            index: s,
            levels: params.s_levels(),
        });
    }
    let t = params.thresholds();
    let beta_s = params.beta[s];
    Ok((0..sigma.len())
        .map(|level| {
            let r = sigma.rank_of(level);
            band_prob(link, t[r] - beta_s, t[r + 1] - beta_s)
        })
        .collect())
}

/// Per-cell sufficient statistics after the rank transform: observation
/// counts by (predictor level, response rank).
struct RankCounts {
    counts: Vec<Vec<usize>>,
    n: usize,
}

impl RankCounts {
    fn build(data: &PairedSample, sigma: &Permutation) -> Self {
        let mut counts = vec![vec![0usize; data.l_levels()]; data.s_levels()];
        for (&xi, &yi) in data.x().iter().zip(data.y()) {
            counts[xi][sigma.rank_of(yi)] += 1;
        }
        Self {
            counts,
            n: data.n(),
        }
    }

    fn observed_x(&self) -> Vec<bool> {
        self.counts
            .iter()
            .map(|row| row.iter().any(|&c| c > 0))
            .collect()
    }
}

/// `-sum_i log P(Y = y_i | X = x_i)` under the given parameters. Cell
/// probabilities are clamped at 1e-300 inside the log, so the value stays
/// finite even under separation.
pub fn negative_log_likelihood(
    params: &OrdinalParams,
    sigma: &Permutation,
    link: Link,
    data: &PairedSample,
) -> Result<f64> {
    validate_dims(params, sigma, data)?;
    let rc = RankCounts::build(data, sigma);
    Ok(nll_from_counts(&rc, &params.beta, &params.thresholds(), link).0)
}

/// Smallest observed-cell probability under the parameters; drives the
/// separation diagnostic.
pub fn min_observed_probability(
    params: &OrdinalParams,
    sigma: &Permutation,
    link: Link,
    data: &PairedSample,
) -> Result<f64> {
    validate_dims(params, sigma, data)?;
    let rc = RankCounts::build(data, sigma);
    Ok(nll_from_counts(&rc, &params.beta, &params.thresholds(), link).1)
}

fn nll_from_counts(rc: &RankCounts, beta: &[f64], t: &[f64], link: Link) -> (f64, f64) {
    let mut nll = 0.0;
    let mut min_prob = f64::INFINITY;
    for (s, row) in rc.counts.iter().enumerate() {
        let b = beta[s];
        for (r, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let p = band_prob(link, t[r] - b, t[r + 1] - b);
            min_prob = min_prob.min(p);
            nll -= c as f64 * p.max(LOG_FLOOR).ln();
        }
    }
    (nll, min_prob)
}

/// Gradient of the negative log-likelihood with respect to
/// `(beta_1..beta_S, delta_2..delta_{L-1})`, where the deltas are the log
/// threshold increments. Length S + L - 2. Coefficients of predictor levels
/// absent from the data get an exactly-zero gradient.
pub fn nll_gradient(
    params: &OrdinalParams,
    sigma: &Permutation,
    link: Link,
    data: &PairedSample,
) -> Result<Vec<f64>> {
    validate_dims(params, sigma, data)?;
    let rc = RankCounts::build(data, sigma);
    let t = params.thresholds();
    let increments: Vec<f64> = (0..params.gamma.len())
        .map(|k| t[k + 2] - t[k + 1])
        .collect();
    Ok(gradient_from_counts(&rc, &params.beta, &t, &increments, link))
}

/// Shared gradient kernel. `increments[k] = gamma_{k+2} - gamma_{k+1}` is
/// d gamma / d delta for the chain rule onto the unconstrained deltas.
fn gradient_from_counts(
    rc: &RankCounts,
    beta: &[f64],
    t: &[f64],
    increments: &[f64],
    link: Link,
) -> Vec<f64> {
    let s_levels = beta.len();
    let l_levels = t.len() - 1;
    let mut grad_beta = vec![0.0; s_levels];
    // Gradient with respect to the constrained thresholds t[2..=L-1].
    let mut grad_t = vec![0.0; l_levels.saturating_sub(2)];

    for (s, row) in rc.counts.iter().enumerate() {
        let b = beta[s];
        for (r, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let lo = t[r] - b;
            let hi = t[r + 1] - b;
            let p = band_prob(link, lo, hi).max(LOG_FLOOR);
            let f_lo = link.pdf(lo);
            let f_hi = link.pdf(hi);
            let w = c as f64 / p;
            // d(-log p)/d beta_s = (f_hi - f_lo) / p
            grad_beta[s] += w * (f_hi - f_lo);
            // d(-log p)/d t[r+1] = -f_hi / p ; d(-log p)/d t[r] = f_lo / p
            if (2..l_levels).contains(&(r + 1)) {
                grad_t[r + 1 - 2] -= w * f_hi;
            }
            if (2..l_levels).contains(&r) {
                grad_t[r - 2] += w * f_lo;
            }
        }
    }

    // t[j] = sum of increments up to j, so d t[j] / d delta_k = increments[k]
    // for j >= k: suffix sums.
    let mut grad_delta = vec![0.0; grad_t.len()];
    let mut suffix = 0.0;
    for k in (0..grad_t.len()).rev() {
        suffix += grad_t[k];
        grad_delta[k] = increments[k] * suffix;
    }

    let mut grad = grad_beta;
    grad.extend_from_slice(&grad_delta);
    grad
}

/// Thresholds from the unconstrained deltas, with the increment capped to
/// keep the ladder strictly ordered in floating point.
fn thresholds_from_delta(delta: &[f64], l_levels: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(l_levels + 1);
    t.push(f64::NEG_INFINITY);
    t.push(0.0);
    let mut cur = 0.0;
    for &d in delta {
        cur += d.clamp(-DELTA_CAP, DELTA_CAP).exp();
        t.push(cur);
    }
    t.push(f64::INFINITY);
    t
}

fn capped_increments(delta: &[f64]) -> Vec<f64> {
    delta
        .iter()
        .map(|&d| d.clamp(-DELTA_CAP, DELTA_CAP).exp())
        .collect()
}

/// Maximum-likelihood fit from the default initialization (beta = 0,
/// thresholds from the empirical cumulative rank frequencies).
pub fn fit_ordinal(
    data: &PairedSample,
    sigma: &Permutation,
    link: Link,
    config: &FitConfig,
) -> Result<OrdinalFit> {
    let (fit, _) = fit_ordinal_traced(data, sigma, link, config, None)?;
    Ok(fit)
}

/// Same as [`fit_ordinal`] but starting from explicit parameters.
pub fn fit_ordinal_with_init(
    data: &PairedSample,
    sigma: &Permutation,
    link: Link,
    config: &FitConfig,
    init: &OrdinalParams,
) -> Result<OrdinalFit> {
    let (fit, _) = fit_ordinal_traced(data, sigma, link, config, Some(init))?;
    Ok(fit)
}

/// Fit plus the trace of accepted objective values, for diagnostics.
pub fn fit_ordinal_traced(
    data: &PairedSample,
    sigma: &Permutation,
    link: Link,
    config: &FitConfig,
    init: Option<&OrdinalParams>,
) -> Result<(OrdinalFit, Vec<f64>)> {
    let l_levels = data.l_levels();
    let s_levels = data.s_levels();
    if l_levels < 2 {
        return Err(Error::DegenerateData(
            "response needs at least 2 declared levels".into(),
        ));
    }
    if sigma.len() != l_levels {
        return Err(Error::InvalidConfig(format!(
            "permutation length {} but data has {} response levels",
            sigma.len(),
            l_levels
        )));
    }
    if data.n() < l_levels {
        return Err(Error::TooFewObservations {
            need: l_levels,
            got: data.n(),
            levels: l_levels,
        });
    }
    if let Some(p) = init {
        validate_dims(p, sigma, data)?;
    }

    let rc = RankCounts::build(data, sigma);
    let observed = rc.observed_x();
    let n_delta = l_levels - 2;

    // theta = (beta over observed levels only, delta); unobserved beta stay 0.
    let free_beta: Vec<usize> = (0..s_levels).filter(|&s| observed[s]).collect();
    let dim = free_beta.len() + n_delta;

    let mut theta = vec![0.0; dim];
    match init {
        Some(p) => {
            for (k, &s) in free_beta.iter().enumerate() {
                theta[k] = p.beta()[s];
            }
            let t = p.thresholds();
            for j in 0..n_delta {
                theta[free_beta.len() + j] = (t[j + 2] - t[j + 1]).ln().clamp(-DELTA_CAP, DELTA_CAP);
            }
        }
        None => {
            let init_delta = initial_delta(&rc, link, l_levels);
            theta[free_beta.len()..].copy_from_slice(&init_delta);
        }
    }

    let unpack_beta = |theta: &[f64]| {
        let mut beta = vec![0.0; s_levels];
        for (k, &s) in free_beta.iter().enumerate() {
            beta[s] = theta[k];
        }
        beta
    };

    let objective = |theta: &[f64]| -> f64 {
        let beta = unpack_beta(theta);
        let t = thresholds_from_delta(&theta[free_beta.len()..], l_levels);
        nll_from_counts(&rc, &beta, &t, link).0
    };

    let gradient = |theta: &[f64]| -> Vec<f64> {
        let beta = unpack_beta(theta);
        let delta = &theta[free_beta.len()..];
        let t = thresholds_from_delta(delta, l_levels);
        let inc = capped_increments(delta);
        let full = gradient_from_counts(&rc, &beta, &t, &inc, link);
        let mut g = Vec::with_capacity(dim);
        for &s in &free_beta {
            g.push(full[s]);
        }
        g.extend_from_slice(&full[s_levels..]);
        g
    };

    let mut value = objective(&theta);
    let mut trace = vec![value];
    let mut iterations = 0;
    let mut converged = false;
    let mut separation = false;

    for _ in 0..config.max_iterations {
        let grad = gradient(&theta);
        let gnorm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gnorm <= config.gradient_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let hess = fd_hessian(&gradient, &theta, config.hessian_step);
        let newton = Cholesky::new(hess).map(|ch| {
            let d = ch.solve(&DVector::from_vec(grad.iter().map(|g| -g).collect()));
            d.iter().copied().collect::<Vec<f64>>()
        });

        let mut moved = false;
        if let Some(dir) = newton {
            let slope: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
            if let Some((next, next_value)) = line_search(&objective, &theta, &grad, &dir, value) {
                theta = next;
                value = next_value;
                trace.push(value);
                moved = true;
            } else if slope < 0.0 && slope.abs() <= 1e-9 * value.abs().max(1.0) {
                // Predicted reduction is below the f64 resolution of the
                // objective; the line search cannot verify descent there.
                // Take the undamped Newton step and let the gradient check
                // decide convergence.
                let trial: Vec<f64> = theta.iter().zip(&dir).map(|(t, d)| t + d).collect();
                let trial_value = objective(&trial);
                if trial_value.is_finite() && trial_value <= value + 1e-9 * value.abs().max(1.0) {
                    if trial_value < value {
                        trace.push(trial_value);
                    }
                    theta = trial;
                    value = trial_value;
                    moved = true;
                }
            }
        }
        if !moved {
            // Steepest descent, scaled so the first trial step is modest.
            let dir: Vec<f64> = grad.iter().map(|g| -g / gnorm.max(1.0)).collect();
            if let Some((next, next_value)) = line_search(&objective, &theta, &grad, &dir, value) {
                theta = next;
                value = next_value;
                trace.push(value);
                moved = true;
            }
        }
        if !moved {
            break; // no descent step found; report at the current iterate
        }

        if theta[..free_beta.len()]
            .iter()
            .any(|b| b.abs() > config.beta_cap)
        {
            separation = true;
            break;
        }
    }

    let grad = gradient(&theta);
    let gradient_norm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    if !converged {
        converged = gradient_norm <= config.gradient_tolerance;
    }

    let beta = unpack_beta(&theta);
    let t = thresholds_from_delta(&theta[free_beta.len()..], l_levels);
    let (final_nll, min_prob) = nll_from_counts(&rc, &beta, &t, link);
    if min_prob < config.probability_floor {
        separation = true;
    }

    let params = OrdinalParams::new(beta, t[2..l_levels].to_vec())?;
    let fit = OrdinalFit {
        params,
        log_likelihood: -final_nll,
        converged,
        iterations,
        gradient_norm,
        separation,
    };
    Ok((fit, trace))
}

/// Initial deltas from the empirical cumulative rank frequencies: the
/// no-predictor thresholds shifted so the first one sits at 0.
fn initial_delta(rc: &RankCounts, link: Link, l_levels: usize) -> Vec<f64> {
    let mut rank_counts = vec![0usize; l_levels];
    for row in &rc.counts {
        for (r, &c) in row.iter().enumerate() {
            rank_counts[r] += c;
        }
    }
    let n = rc.n as f64;
    let clamp = 0.5 / n;
    let mut raw = Vec::with_capacity(l_levels - 1);
    let mut cum = 0usize;
    for rank_count in rank_counts.iter().take(l_levels - 1) {
        cum += rank_count;
        let freq = (cum as f64 / n).clamp(clamp, 1.0 - clamp);
        raw.push(link.inverse_cdf(freq));
    }
    // Strictly increasing increments; empty ranks would otherwise tie.
    let mut delta = Vec::with_capacity(l_levels.saturating_sub(2));
    for j in 1..raw.len() {
        let inc = (raw[j] - raw[j - 1]).max(1e-3);
        delta.push(inc.ln());
    }
    delta
}

/// Central-difference Hessian of the analytic gradient, symmetrized.
fn fd_hessian(gradient: &dyn Fn(&[f64]) -> Vec<f64>, theta: &[f64], rel_step: f64) -> DMatrix<f64> {
    let dim = theta.len();
    let mut h = DMatrix::zeros(dim, dim);
    let mut probe = theta.to_vec();
    for j in 0..dim {
        let step = rel_step * (1.0 + theta[j].abs());
        probe[j] = theta[j] + step;
        let g_hi = gradient(&probe);
        probe[j] = theta[j] - step;
        let g_lo = gradient(&probe);
        probe[j] = theta[j];
        for i in 0..dim {
            h[(i, j)] = (g_hi[i] - g_lo[i]) / (2.0 * step);
        }
    }
    let ht = h.transpose();
    (h + ht) * 0.5
}

/// Backtracking Armijo line search; returns the accepted point and value.
fn line_search(
    objective: &dyn Fn(&[f64]) -> f64,
    theta: &[f64],
    grad: &[f64],
    dir: &[f64],
    value: f64,
) -> Option<(Vec<f64>, f64)> {
    let slope: f64 = grad.iter().zip(dir).map(|(g, d)| g * d).sum();
    if slope >= 0.0 {
        return None;
    }
    let mut step = 1.0;
    for _ in 0..60 {
        let trial: Vec<f64> = theta.iter().zip(dir).map(|(t, d)| t + step * d).collect();
        let trial_value = objective(&trial);
        // Strict decrease keeps the accepted trajectory monotone even when
        // the Armijo bound rounds to the current value.
        if trial_value.is_finite()
            && trial_value <= value + 1e-4 * step * slope
            && trial_value < value
        {
            return Some((trial, trial_value));
        }
        step *= 0.5;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn figure_params() -> OrdinalParams {
        OrdinalParams::new(vec![1.0, -1.0, 1.0], vec![1.0]).unwrap()
    }

    #[test]
    fn pmf_matches_hand_computed_values() {
        let sigma = Permutation::from_one_based(&[1, 3, 2]).unwrap();
        let pmf = conditional_pmf(&figure_params(), &sigma, Link::Logit, 0).unwrap();
        assert!((pmf[0] - 0.26894).abs() < 5e-6);
        assert!((pmf[1] - 0.5).abs() < 5e-6);
        assert!((pmf[2] - 0.23106).abs() < 5e-6);
    }

    #[test]
    fn pmf_normalizes_for_random_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let l = rng.random_range(2..=8);
            let s = rng.random_range(1..=8);
            let beta: Vec<f64> = (0..s).map(|_| rng.random_range(-3.0..3.0)).collect();
            let mut gamma = Vec::new();
            let mut cur = 0.0;
            for _ in 0..l - 2 {
                cur += rng.random_range(0.05..2.0);
                gamma.push(cur);
            }
            let params = OrdinalParams::new(beta, gamma).unwrap();
            let sigma = random_perm(l, &mut rng);
            let link = if rng.random_bool(0.5) {
                Link::Logit
            } else {
                Link::Probit
            };
            for si in 0..s {
                let pmf = conditional_pmf(&params, &sigma, link, si).unwrap();
                let total: f64 = pmf.iter().sum();
                assert!((total - 1.0).abs() <= 1e-12, "sum {total}");
                assert!(pmf.iter().all(|&p| p >= 0.0));
            }
        }
    }

    #[test]
    fn zero_free_threshold_rejected() {
        assert!(OrdinalParams::new(vec![0.0, 0.0, 0.0], vec![0.0]).is_err());
        assert!(OrdinalParams::new(vec![0.0], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn nll_single_observation_half_probability() {
        // s = 0 with beta_0 = 0, sigma identity, L = 2: P(Y=0) = F(0) = 0.5.
        let params = OrdinalParams::new(vec![0.0], vec![]).unwrap();
        let sigma = Permutation::identity(2);
        let data = PairedSample::new(vec![0], vec![0], 1, 2).unwrap();
        let nll = negative_log_likelihood(&params, &sigma, Link::Logit, &data).unwrap();
        assert!((nll - 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn nll_additive_over_copies() {
        let params = figure_params();
        let sigma = Permutation::from_one_based(&[1, 3, 2]).unwrap();
        let one = PairedSample::new(vec![1], vec![2], 3, 3).unwrap();
        let five = PairedSample::new(vec![1; 5], vec![2; 5], 3, 3).unwrap();
        let nll1 = negative_log_likelihood(&params, &sigma, Link::Logit, &one).unwrap();
        let nll5 = negative_log_likelihood(&params, &sigma, Link::Logit, &five).unwrap();
        assert!((nll5 - 5.0 * nll1).abs() < 1e-12);
    }

    #[test]
    fn nll_matches_per_observation_lookup() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let l = rng.random_range(3..=6);
            let s = rng.random_range(2..=6);
            let params = random_params(s, l, &mut rng);
            let sigma = random_perm(l, &mut rng);
            let n = 80;
            let x: Vec<usize> = (0..n).map(|_| rng.random_range(0..s)).collect();
            let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..l)).collect();
            let data = PairedSample::new(x, y, s, l).unwrap();
            let nll = negative_log_likelihood(&params, &sigma, Link::Logit, &data).unwrap();
            // Independent naive summation through the pmf.
            let mut oracle = 0.0;
            for i in 0..n {
                let pmf = conditional_pmf(&params, &sigma, Link::Logit, data.x()[i]).unwrap();
                oracle -= pmf[data.y()[i]].ln();
            }
            assert!((nll - oracle).abs() <= 1e-12 * oracle.abs().max(1.0));
        }
    }

    fn random_params(s: usize, l: usize, rng: &mut ChaCha8Rng) -> OrdinalParams {
        let beta: Vec<f64> = (0..s).map(|_| rng.random_range(-2.0..2.0)).collect();
        let mut gamma = Vec::new();
        let mut cur = 0.0;
        for _ in 0..l - 2 {
            cur += rng.random_range(0.1..1.5);
            gamma.push(cur);
        }
        OrdinalParams::new(beta, gamma).unwrap()
    }

    fn random_perm(l: usize, rng: &mut ChaCha8Rng) -> Permutation {
        let mut map: Vec<usize> = (0..l).collect();
        map.shuffle(rng);
        Permutation::from_map(map).unwrap()
    }

    fn fd_gradient(
        params: &OrdinalParams,
        sigma: &Permutation,
        link: Link,
        data: &PairedSample,
        step: f64,
    ) -> Vec<f64> {
        // Finite differences in the (beta, delta) parameterization.
        let s = params.s_levels();
        let l = params.l_levels();
        let t = params.thresholds();
        let mut theta: Vec<f64> = params.beta().to_vec();
        for j in 0..l - 2 {
            theta.push((t[j + 2] - t[j + 1]).ln());
        }
        let eval = |theta: &[f64]| -> f64 {
            let beta = theta[..s].to_vec();
            let mut gamma = Vec::new();
            let mut cur = 0.0;
            for &d in &theta[s..] {
                cur += d.exp();
                gamma.push(cur);
            }
            let p = OrdinalParams::new(beta, gamma).unwrap();
            negative_log_likelihood(&p, sigma, link, data).unwrap()
        };
        (0..theta.len())
            .map(|j| {
                let mut hi = theta.clone();
                let mut lo = theta.clone();
                hi[j] += step;
                lo[j] -= step;
                (eval(&hi) - eval(&lo)) / (2.0 * step)
            })
            .collect()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..20 {
            let l = rng.random_range(3..=8);
            let s = rng.random_range(3..=8);
            let params = random_params(s, l, &mut rng);
            let sigma = random_perm(l, &mut rng);
            let n = 200;
            let x: Vec<usize> = (0..n).map(|_| rng.random_range(0..s)).collect();
            let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..l)).collect();
            let data = PairedSample::new(x, y, s, l).unwrap();
            let link = if rng.random_bool(0.5) {
                Link::Logit
            } else {
                Link::Probit
            };
            let analytic = nll_gradient(&params, &sigma, link, &data).unwrap();
            let numeric = fd_gradient(&params, &sigma, link, &data, 1e-5);
            let scale = analytic.iter().fold(1.0f64, |m, g| m.max(g.abs()));
            for (a, f) in analytic.iter().zip(&numeric) {
                assert!(
                    (a - f).abs() / scale <= 1e-6,
                    "gradient mismatch: {a} vs {f} (scale {scale})"
                );
            }
        }
    }

    #[test]
    fn gradient_zero_for_unobserved_predictor_level() {
        // Only level 1 of 3 appears in the data.
        let params = random_params(3, 4, &mut ChaCha8Rng::seed_from_u64(5));
        let sigma = Permutation::identity(4);
        let data = PairedSample::new(vec![1; 8], vec![0, 1, 2, 3, 0, 1, 2, 3], 3, 4).unwrap();
        let grad = nll_gradient(&params, &sigma, Link::Logit, &data).unwrap();
        assert_eq!(grad[0], 0.0);
        assert_eq!(grad[2], 0.0);
        assert!(grad[1].abs() > 0.0);
    }

    /// Draw a sample from known parameters under the identity permutation.
    fn sample_from(
        params: &OrdinalParams,
        link: Link,
        n: usize,
        rng: &mut ChaCha8Rng,
    ) -> PairedSample {
        let s = params.s_levels();
        let l = params.l_levels();
        let sigma = Permutation::identity(l);
        let pmfs: Vec<Vec<f64>> = (0..s)
            .map(|si| conditional_pmf(params, &sigma, link, si).unwrap())
            .collect();
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let xi = rng.random_range(0..s);
            let u: f64 = rng.random();
            let mut cum = 0.0;
            let mut yi = l - 1;
            for (level, &p) in pmfs[xi].iter().enumerate() {
                cum += p;
                if u < cum {
                    yi = level;
                    break;
                }
            }
            x.push(xi);
            y.push(yi);
        }
        PairedSample::new(x, y, s, l).unwrap()
    }

    #[test]
    fn fit_recovers_generating_parameters() {
        let truth = OrdinalParams::new(vec![0.8, -0.6, 0.2, 1.4], vec![0.9, 1.7]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let data = sample_from(&truth, Link::Logit, 100_000, &mut rng);
        let sigma = Permutation::identity(4);
        let fit = fit_ordinal(&data, &sigma, Link::Logit, &FitConfig::default()).unwrap();
        assert!(fit.converged, "gradient norm {}", fit.gradient_norm);
        for (est, tru) in fit.params.beta().iter().zip(truth.beta()) {
            assert!((est - tru).abs() < 0.05, "beta {est} vs {tru}");
        }
        for (est, tru) in fit.params.gamma().iter().zip(truth.gamma()) {
            assert!((est - tru).abs() < 0.05, "gamma {est} vs {tru}");
        }
    }

    #[test]
    fn binary_response_accepted() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let truth = OrdinalParams::new(vec![0.5, -0.5], vec![]).unwrap();
        let data = sample_from(&truth, Link::Logit, 5000, &mut rng);
        let fit = fit_ordinal(
            &data,
            &Permutation::identity(2),
            Link::Logit,
            &FitConfig::default(),
        )
        .unwrap();
        assert!(fit.converged);
        assert!(fit.params.gamma().is_empty());
        assert!(fit.log_likelihood <= 0.0);
    }

    #[test]
    fn refit_from_solution_is_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let truth = OrdinalParams::new(vec![0.4, -1.0, 0.7], vec![1.2]).unwrap();
        let data = sample_from(&truth, Link::Logit, 2000, &mut rng);
        let sigma = Permutation::identity(3);
        let cfg = FitConfig::default();
        let fit = fit_ordinal(&data, &sigma, Link::Logit, &cfg).unwrap();
        let refit = fit_ordinal_with_init(&data, &sigma, Link::Logit, &cfg, &fit.params).unwrap();
        assert!((refit.log_likelihood - fit.log_likelihood).abs() < 1e-8);
    }

    #[test]
    fn reversal_gives_equal_log_likelihood() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let truth = OrdinalParams::new(vec![0.9, -0.4, 0.1, -1.1], vec![0.8, 1.6]).unwrap();
        let data = sample_from(&truth, Link::Logit, 1500, &mut rng);
        for sigma in perm::enumerate_canonical(4).take(6) {
            let a = fit_ordinal(&data, &sigma, Link::Logit, &FitConfig::default()).unwrap();
            let b = fit_ordinal(
                &data,
                &sigma.reversal(),
                Link::Logit,
                &FitConfig::default(),
            )
            .unwrap();
            assert!(
                (a.log_likelihood - b.log_likelihood).abs() < 1e-6,
                "{} vs {}",
                a.log_likelihood,
                b.log_likelihood
            );
        }
    }

    #[test]
    fn accepted_steps_decrease_nll() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let truth = OrdinalParams::new(vec![1.5, -0.3, 0.2], vec![0.7, 1.9]).unwrap();
        let data = sample_from(&truth, Link::Logit, 800, &mut rng);
        let (fit, trace) = fit_ordinal_traced(
            &data,
            &Permutation::identity(4),
            Link::Logit,
            &FitConfig::default(),
            None,
        )
        .unwrap();
        assert!(fit.converged);
        for w in trace.windows(2) {
            assert!(w[1] < w[0], "non-decreasing step: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn gradient_norm_small_at_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let truth = OrdinalParams::new(vec![0.3, -0.9, 1.1], vec![1.0]).unwrap();
        let data = sample_from(&truth, Link::Probit, 3000, &mut rng);
        let fit = fit_ordinal(
            &data,
            &Permutation::identity(3),
            Link::Probit,
            &FitConfig::default(),
        )
        .unwrap();
        assert!(fit.converged);
        assert!(fit.gradient_norm <= FitConfig::default().gradient_tolerance);
    }

    #[test]
    fn too_few_observations_rejected() {
        let data = PairedSample::new(vec![0, 1], vec![0, 1], 2, 3).unwrap();
        let err = fit_ordinal(
            &data,
            &Permutation::identity(3),
            Link::Logit,
            &FitConfig::default(),
        );
        assert!(matches!(err, Err(Error::TooFewObservations { .. })));
    }

    #[test]
    fn separation_flagged_on_perfectly_separated_data() {
        // Each predictor level maps deterministically to one response level.
        let x = vec![0, 0, 0, 1, 1, 1, 2, 2, 2];
        let y = vec![0, 0, 0, 1, 1, 1, 2, 2, 2];
        let data = PairedSample::new(x, y, 3, 3).unwrap();
        let fit = fit_ordinal(
            &data,
            &Permutation::identity(3),
            Link::Logit,
            &FitConfig::default(),
        )
        .unwrap();
        assert!(fit.separation);
    }
}
