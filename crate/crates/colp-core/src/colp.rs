//! Fitting the full classifier: ordinal regression with the category
//! ordering itself a fitted parameter.
//!
//! The likelihood at a fixed permutation comes from [`crate::ordinal`]; this
//! module supplies the search over permutations. Exhaustive search scores
//! every ordering (by default one member of each reversal pair, since the
//! maximized likelihood is reversal-invariant); greedy search hill-climbs
//! through transposition neighborhoods, moving to the best strictly
//! improving neighbor until none improves.
//!
//! Fits at different permutations are independent and run in parallel; the
//! winner is selected by a total order on (log-likelihood rounded to 1e-9,
//! lexicographic rank vector), so results do not depend on scheduling.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ordinal::{fit_ordinal, FitConfig, OrdinalFit, OrdinalParams};
use crate::rng::replication_rng;
use crate::{conditional_pmf, perm, Error, Link, PairedSample, Permutation, Result};

/// How the optimal permutation was searched for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    Exhaustive,
    Greedy,
    /// No search: the ordering was supplied by the caller.
    Fixed,
}

impl std::fmt::Display for SearchMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SearchMethod::Exhaustive => "exhaustive",
            SearchMethod::Greedy => "greedy",
            SearchMethod::Fixed => "fixed",
        })
    }
}

/// Search settings on top of the per-permutation optimizer config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColpConfig {
    pub fit: FitConfig,
    /// Exhaustive search refuses more response levels than this.
    pub max_exhaustive_levels: usize,
    /// Score all L! permutations instead of one per reversal pair.
    pub full_enumeration: bool,
    /// Restrict greedy moves to swaps of adjacent positions.
    pub adjacent_only: bool,
}

impl Default for ColpConfig {
    fn default() -> Self {
        Self {
            fit: FitConfig::default(),
            max_exhaustive_levels: 8,
            full_enumeration: false,
            adjacent_only: false,
        }
    }
}

/// The fitted classifier: optimal ordering (canonical), its conditional fit,
/// and how much work the search did.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColpFit {
    pub sigma: Permutation,
    pub ordinal: OrdinalFit,
    pub link: Link,
    pub search: SearchMethod,
    /// Number of per-permutation maximum-likelihood fits performed.
    pub evaluations: usize,
}

/// Parameter counts of the competing model families for an L-level response
/// and S-level predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityReport {
    /// Ordinal regression: L - 2 + S.
    pub ordinal: usize,
    /// Multinomial regression: (L - 1) * S.
    pub multinomial: usize,
    /// Ordering-as-parameter classifier: 2L + S - 4.
    pub colp: usize,
    /// Joint causal model (marginal + conditional): 2L + 2S - 5.
    pub causal_colp: usize,
    /// Saturated bivariate multinomial: S * L - 1.
    pub saturated: usize,
    /// With only 2 levels on either side the families coincide and the
    /// counts are not comparable.
    pub degenerate: bool,
}

/// Exact parameter counts. Requires L, S >= 2; strictly fewer parameters
/// than the multinomial alternatives once L, S > 2.
pub fn complexity(l_levels: usize, s_levels: usize) -> Result<ComplexityReport> {
    if l_levels < 2 || s_levels < 2 {
        return Err(Error::InvalidConfig(format!(
            "complexity needs L, S >= 2, got L={l_levels}, S={s_levels}"
        )));
    }
    Ok(ComplexityReport {
        ordinal: l_levels - 2 + s_levels,
        multinomial: (l_levels - 1) * s_levels,
        colp: 2 * l_levels + s_levels - 4,
        causal_colp: 2 * l_levels + 2 * s_levels - 5,
        saturated: s_levels * l_levels - 1,
        degenerate: l_levels == 2 || s_levels == 2,
    })
}

/// One scored permutation. The key orders candidates by rounded
/// log-likelihood, ties broken toward the lexicographically smallest rank
/// vector, making every reduction order-independent.
struct Candidate {
    key: i64,
    sigma: Permutation,
    fit: OrdinalFit,
}

fn ll_key(log_likelihood: f64) -> i64 {
    if log_likelihood.is_nan() {
        return i64::MIN;
    }
    (log_likelihood * 1e9).round().clamp(i64::MIN as f64, i64::MAX as f64) as i64
}

fn better(a: Candidate, b: Candidate) -> Candidate {
    if a.key != b.key {
        if a.key > b.key {
            a
        } else {
            b
        }
    } else if a.sigma <= b.sigma {
        a
    } else {
        b
    }
}

fn score(
    data: &PairedSample,
    link: Link,
    fit_cfg: &FitConfig,
    sigma: Permutation,
) -> Result<Candidate> {
    let fit = fit_ordinal(data, &sigma, link, fit_cfg)?;
    Ok(Candidate {
        key: ll_key(fit.log_likelihood),
        sigma,
        fit,
    })
}

/// Transform fitted parameters to the reversed permutation's coordinates.
/// Reversal maps thresholds t_j to t_{L-1} - t_{L-j} and coefficients to
/// t_{L-1} - beta_s; the implied category probabilities are unchanged.
fn reverse_params(params: &OrdinalParams) -> Result<OrdinalParams> {
    let l = params.l_levels();
    let t = params.thresholds();
    let top = t[l - 1];
    let beta = params.beta().iter().map(|b| top - b).collect();
    let gamma = (2..l).map(|j| top - t[l - j]).collect();
    OrdinalParams::new(beta, gamma)
}

fn finish(
    candidate: Candidate,
    link: Link,
    search: SearchMethod,
    evaluations: usize,
) -> Result<ColpFit> {
    let (sigma, ordinal) = if candidate.sigma.is_canonical() {
        (candidate.sigma, candidate.fit)
    } else {
        let mut fit = candidate.fit;
        fit.params = reverse_params(&fit.params)?;
        (candidate.sigma.reversal(), fit)
    };
    Ok(ColpFit {
        sigma,
        ordinal,
        link,
        search,
        evaluations,
    })
}

/// Score every permutation and keep the best. With the default reversal
/// shortcut this costs L!/2 fits; `full_enumeration` scores all L!.
pub fn fit_colp_exhaustive(
    data: &PairedSample,
    link: Link,
    config: &ColpConfig,
) -> Result<ColpFit> {
    let l = data.l_levels();
    if l > config.max_exhaustive_levels {
        return Err(Error::ExhaustiveGateExceeded {
            levels: l,
            gate: config.max_exhaustive_levels,
        });
    }
    let sigmas: Vec<Permutation> = if config.full_enumeration {
        perm::enumerate_all(l).collect()
    } else {
        perm::enumerate_canonical(l).collect()
    };
    let evaluations = sigmas.len();
    let candidates: Vec<Candidate> = sigmas
        .into_par_iter()
        .map(|sigma| score(data, link, &config.fit, sigma))
        .collect::<Result<_>>()?;
    let best = candidates
        .into_iter()
        .reduce(better)
        .expect("at least one permutation");
    finish(best, link, SearchMethod::Exhaustive, evaluations)
}

/// Hill-climb from `init`: evaluate every transposition neighbor, move to
/// the best strictly improving one, stop when none improves. Deterministic
/// given the initialization.
pub fn fit_colp_greedy(
    data: &PairedSample,
    link: Link,
    init: &Permutation,
    config: &ColpConfig,
) -> Result<ColpFit> {
    if init.len() != data.l_levels() {
        return Err(Error::InvalidConfig(format!(
            "initial permutation length {} but data has {} response levels",
            init.len(),
            data.l_levels()
        )));
    }
    let mut current = score(data, link, &config.fit, init.clone())?;
    let mut evaluations = 1;
    loop {
        let neighbors = if config.adjacent_only {
            current.sigma.adjacent_neighbors()
        } else {
            current.sigma.transposition_neighbors()
        };
        if neighbors.is_empty() {
            break;
        }
        evaluations += neighbors.len();
        let scored: Vec<Candidate> = neighbors
            .into_par_iter()
            .map(|sigma| score(data, link, &config.fit, sigma))
            .collect::<Result<_>>()?;
        let best = scored.into_iter().reduce(better).expect("nonempty");
        if best.key > current.key {
            current = best;
        } else {
            break;
        }
    }
    finish(current, link, SearchMethod::Greedy, evaluations)
}

/// Greedy search from the identity plus `restarts - 1` random initial
/// orderings drawn from seeded streams; returns the best local optimum.
pub fn fit_colp_greedy_restarts(
    data: &PairedSample,
    link: Link,
    restarts: usize,
    seed: u64,
    config: &ColpConfig,
) -> Result<ColpFit> {
    if restarts == 0 {
        return Err(Error::InvalidConfig("restarts must be at least 1".into()));
    }
    let l = data.l_levels();
    let mut best: Option<ColpFit> = None;
    let mut evaluations = 0;
    for r in 0..restarts {
        let init = if r == 0 {
            Permutation::identity(l)
        } else {
            // Separate stream domain from data generation.
            let mut rng = replication_rng(seed ^ 0x5e1e_c7ed, r as u64);
            let mut map: Vec<usize> = (0..l).collect();
            map.shuffle(&mut rng);
            Permutation::from_map(map)?
        };
        let fit = fit_colp_greedy(data, link, &init, config)?;
        evaluations += fit.evaluations;
        best = Some(match best {
            None => fit,
            Some(prev) => {
                let a = Candidate {
                    key: ll_key(prev.ordinal.log_likelihood),
                    sigma: prev.sigma.clone(),
                    fit: prev.ordinal.clone(),
                };
                let b = Candidate {
                    key: ll_key(fit.ordinal.log_likelihood),
                    sigma: fit.sigma.clone(),
                    fit: fit.ordinal.clone(),
                };
                if better(a, b).sigma == prev.sigma {
                    prev
                } else {
                    fit
                }
            }
        });
    }
    let mut fit = best.expect("restarts >= 1");
    fit.evaluations = evaluations;
    Ok(fit)
}

/// Single fit at a caller-supplied ordering, wrapped like a search result
/// (one evaluation, reported canonically).
pub fn fit_colp_fixed(
    data: &PairedSample,
    link: Link,
    sigma: &Permutation,
    config: &ColpConfig,
) -> Result<ColpFit> {
    let candidate = score(data, link, &config.fit, sigma.clone())?;
    finish(candidate, link, SearchMethod::Fixed, 1)
}

/// Conditional category probabilities under the fitted ordering; sums to 1.
pub fn predict_proba(fit: &ColpFit, s: usize) -> Result<Vec<f64>> {
    conditional_pmf(&fit.ordinal.params, &fit.sigma, fit.link, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn sample_from(
        params: &OrdinalParams,
        sigma: &Permutation,
        omega: &[f64],
        link: Link,
        n: usize,
        rng: &mut ChaCha8Rng,
    ) -> PairedSample {
        let s_levels = params.s_levels();
        let pmfs: Vec<Vec<f64>> = (0..s_levels)
            .map(|s| conditional_pmf(params, sigma, link, s).unwrap())
            .collect();
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let ux: f64 = rng.random();
            let mut xi = s_levels - 1;
            let mut cum = 0.0;
            for (s, &w) in omega.iter().enumerate() {
                cum += w;
                if ux < cum {
                    xi = s;
                    break;
                }
            }
            let uy: f64 = rng.random();
            let mut yi = pmfs[xi].len() - 1;
            let mut cy = 0.0;
            for (l, &p) in pmfs[xi].iter().enumerate() {
                cy += p;
                if uy < cy {
                    yi = l;
                    break;
                }
            }
            x.push(xi);
            y.push(yi);
        }
        PairedSample::new(x, y, s_levels, params.l_levels()).unwrap()
    }

    fn figure_model() -> (OrdinalParams, Permutation, Vec<f64>) {
        (
            OrdinalParams::new(vec![1.0, -1.0, 1.0], vec![1.0]).unwrap(),
            Permutation::from_one_based(&[1, 3, 2]).unwrap(),
            vec![0.25, 0.25, 0.5],
        )
    }

    #[test]
    fn complexity_counts() {
        let r = complexity(5, 5).unwrap();
        assert_eq!(
            (r.ordinal, r.multinomial, r.colp, r.causal_colp, r.saturated),
            (8, 20, 11, 15, 24)
        );
        assert!(!r.degenerate);

        let r = complexity(3, 3).unwrap();
        assert_eq!(r.colp, 5);
        assert_eq!(r.multinomial, 6);
        assert!(r.colp < r.multinomial);

        // Binary response: the counts coincide and the report says so.
        let r = complexity(2, 4).unwrap();
        assert_eq!(r.colp, r.ordinal);
        assert_eq!(r.colp, r.multinomial);
        assert!(r.degenerate);

        assert!(complexity(1, 3).is_err());
    }

    #[test]
    fn complexity_strict_inequalities_on_grid() {
        for l in 3..=12 {
            for s in 3..=12 {
                let r = complexity(l, s).unwrap();
                assert!(r.colp < r.multinomial, "L={l} S={s}");
                assert!(r.causal_colp < r.saturated, "L={l} S={s}");
            }
        }
    }

    #[test]
    fn reversed_params_give_same_pmf() {
        let (params, sigma, _) = figure_model();
        let rev_sigma = sigma.reversal();
        let rev_params = reverse_params(&params).unwrap();
        for s in 0..3 {
            let a = conditional_pmf(&params, &sigma, Link::Logit, s).unwrap();
            let b = conditional_pmf(&rev_params, &rev_sigma, Link::Logit, s).unwrap();
            for (pa, pb) in a.iter().zip(&b) {
                assert!((pa - pb).abs() < 1e-12, "{pa} vs {pb}");
            }
        }
    }

    #[test]
    fn exhaustive_matches_naive_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (params, sigma, omega) = figure_model();
        let data = sample_from(&params, &sigma, &omega, Link::Logit, 400, &mut rng);
        let config = ColpConfig {
            full_enumeration: true,
            ..ColpConfig::default()
        };
        let fit = fit_colp_exhaustive(&data, Link::Logit, &config).unwrap();
        assert_eq!(fit.evaluations, 6);

        // Naive double loop with the same tie rule.
        let mut best: Option<(i64, Permutation, f64)> = None;
        for cand in perm::enumerate_all(3) {
            let f = fit_ordinal(&data, &cand, Link::Logit, &config.fit).unwrap();
            let key = ll_key(f.log_likelihood);
            best = Some(match best {
                None => (key, cand, f.log_likelihood),
                Some(prev) => {
                    if key > prev.0 || (key == prev.0 && cand < prev.1) {
                        (key, cand, f.log_likelihood)
                    } else {
                        prev
                    }
                }
            });
        }
        let (_, naive_sigma, naive_ll) = best.unwrap();
        assert_eq!(fit.ordinal.log_likelihood, naive_ll);
        assert_eq!(fit.sigma, naive_sigma.canonicalize());
    }

    #[test]
    fn reversal_shortcut_matches_full_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let params =
            OrdinalParams::new(vec![0.8, -0.7, 0.3, 1.2], vec![0.6, 1.4]).unwrap();
        let sigma = Permutation::from_one_based(&[2, 4, 1, 3]).unwrap();
        let omega = vec![0.25; 4];
        let data = sample_from(&params, &sigma, &omega, Link::Logit, 600, &mut rng);
        let full = fit_colp_exhaustive(
            &data,
            Link::Logit,
            &ColpConfig {
                full_enumeration: true,
                ..ColpConfig::default()
            },
        )
        .unwrap();
        let half = fit_colp_exhaustive(&data, Link::Logit, &ColpConfig::default()).unwrap();
        assert_eq!(half.evaluations, 12);
        assert_eq!(full.evaluations, 24);
        assert!(
            (full.ordinal.log_likelihood - half.ordinal.log_likelihood).abs() < 1e-6,
            "{} vs {}",
            full.ordinal.log_likelihood,
            half.ordinal.log_likelihood
        );
        assert_eq!(full.sigma, half.sigma);
    }

    #[test]
    fn exhaustive_gate() {
        let data = PairedSample::new(vec![0; 20], (0..20).map(|i| i % 9).collect(), 1, 9).unwrap();
        let err = fit_colp_exhaustive(&data, Link::Logit, &ColpConfig::default());
        assert!(matches!(err, Err(Error::ExhaustiveGateExceeded { .. })));
    }

    #[test]
    fn greedy_at_optimum_stops_immediately() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let (params, sigma, omega) = figure_model();
        let data = sample_from(&params, &sigma, &omega, Link::Logit, 800, &mut rng);
        let config = ColpConfig::default();
        let exhaustive = fit_colp_exhaustive(&data, Link::Logit, &config).unwrap();
        let greedy = fit_colp_greedy(&data, Link::Logit, &exhaustive.sigma, &config).unwrap();
        assert_eq!(greedy.sigma, exhaustive.sigma);
        // One initial fit plus a single neighborhood scan of L(L-1)/2 = 3.
        assert_eq!(greedy.evaluations, 1 + 3);
        assert!(greedy.ordinal.log_likelihood <= exhaustive.ordinal.log_likelihood + 1e-9);
    }

    #[test]
    fn greedy_recovers_figure_ordering() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let (params, sigma, omega) = figure_model();
        let data = sample_from(&params, &sigma, &omega, Link::Logit, 4000, &mut rng);
        let config = ColpConfig::default();
        let fit =
            fit_colp_greedy(&data, Link::Logit, &Permutation::identity(3), &config).unwrap();
        // The generating ordering ranks the middle category at an extreme.
        assert_eq!(fit.sigma, sigma.canonicalize());
        let exhaustive = fit_colp_exhaustive(&data, Link::Logit, &config).unwrap();
        assert!(exhaustive.ordinal.log_likelihood >= fit.ordinal.log_likelihood - 1e-9);
    }

    #[test]
    fn independent_data_still_returns_canonical_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let x: Vec<usize> = (0..600).map(|_| rng.random_range(0..3)).collect();
        let y: Vec<usize> = (0..600).map(|_| rng.random_range(0..3)).collect();
        let data = PairedSample::new(x, y, 3, 3).unwrap();
        let fit = fit_colp_exhaustive(&data, Link::Logit, &ColpConfig::default()).unwrap();
        assert!(fit.sigma.is_canonical());
    }

    #[test]
    fn predict_proba_sums_to_one_and_tracks_empirical_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let (params, sigma, _) = figure_model();
        let omega = vec![1.0 / 3.0; 3];
        let data = sample_from(&params, &sigma, &omega, Link::Logit, 30_000, &mut rng);
        let fit = fit_colp_exhaustive(&data, Link::Logit, &ColpConfig::default()).unwrap();
        let table = data.contingency();
        for s in 0..3 {
            let pmf = predict_proba(&fit, s).unwrap();
            let total: f64 = pmf.iter().sum();
            assert!((total - 1.0).abs() <= 1e-12);
            let model_mode = pmf
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0;
            let empirical_mode = table[s]
                .iter()
                .enumerate()
                .max_by_key(|&(_, &c)| c)
                .unwrap()
                .0;
            assert_eq!(model_mode, empirical_mode, "level {s}");
        }
    }

    #[test]
    fn greedy_restarts_no_worse_than_single_run() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let params =
            OrdinalParams::new(vec![1.1, -0.9, 0.2, 0.7], vec![0.5, 1.3]).unwrap();
        let sigma = Permutation::from_one_based(&[3, 1, 4, 2]).unwrap();
        let omega = vec![0.25; 4];
        let data = sample_from(&params, &sigma, &omega, Link::Logit, 700, &mut rng);
        let config = ColpConfig::default();
        let single =
            fit_colp_greedy(&data, Link::Logit, &Permutation::identity(4), &config).unwrap();
        let multi = fit_colp_greedy_restarts(&data, Link::Logit, 4, 99, &config).unwrap();
        assert!(multi.ordinal.log_likelihood >= single.ordinal.log_likelihood - 1e-9);
        assert!(multi.evaluations >= single.evaluations);
    }
}
