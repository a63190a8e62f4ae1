//! Link functions for cumulative-link models.
//!
//! Both links are strictly increasing CDFs, symmetric about 0, with an
//! everywhere-positive density. Those properties are what the rest of the
//! crate relies on: band probabilities telescope to 1 and every category
//! keeps positive mass at finite parameters.

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Cumulative-link function: logistic or standard normal CDF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    #[default]
    Logit,
    Probit,
}

impl Link {
    /// CDF value F(x) in [0, 1]; handles infinite arguments.
    pub fn cdf(self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        match self {
            Link::Logit => {
                // Stable sigmoid for both tails.
                if x >= 0.0 {
                    1.0 / (1.0 + (-x).exp())
                } else {
                    let e = x.exp();
                    e / (1.0 + e)
                }
            }
            Link::Probit => 0.5 * erfc(-x / std::f64::consts::SQRT_2),
        }
    }

    /// Density F'(x).
    pub fn pdf(self, x: f64) -> f64 {
        if x.is_infinite() {
            return 0.0;
        }
        match self {
            Link::Logit => {
                let e = (-x.abs()).exp();
                let d = 1.0 + e;
                e / (d * d)
            }
            Link::Probit => (-0.5 * x * x).exp() * INV_SQRT_2PI,
        }
    }

    /// Quantile function F^{-1}(p) for p in [0, 1], with infinite endpoints.
    pub fn inverse_cdf(self, p: f64) -> f64 {
        assert!((0.0..=1.0).contains(&p), "probability out of range: {p}");
        if p == 0.0 {
            return f64::NEG_INFINITY;
        }
        if p == 1.0 {
            return f64::INFINITY;
        }
        match self {
            Link::Logit => p.ln() - (-p).ln_1p(),
            Link::Probit => {
                let z = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
                // One Newton step against our own cdf tightens the rational
                // approximation to full round-trip precision in the body of
                // the distribution.
                let f = self.pdf(z);
                if f > 1e-280 {
                    z - (self.cdf(z) - p) / f
                } else {
                    z
                }
            }
        }
    }

    /// Short identifier used in run records.
    pub fn name(self) -> &'static str {
        match self {
            Link::Logit => "logit",
            Link::Probit => "probit",
        }
    }
}

impl std::fmt::Display for Link {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Link {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "logit" => Ok(Link::Logit),
            "probit" => Ok(Link::Probit),
            other => Err(crate::Error::InvalidConfig(format!(
                "unknown link {other:?}, expected logit or probit"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINKS: [Link; 2] = [Link::Logit, Link::Probit];

    #[test]
    fn cdf_is_half_at_zero() {
        for link in LINKS {
            assert!((link.cdf(0.0) - 0.5).abs() < 1e-15, "{link}");
        }
    }

    #[test]
    fn cdf_strictly_increasing() {
        for link in LINKS {
            let mut prev = link.cdf(-8.0);
            let mut x = -8.0 + 0.05;
            while x <= 8.0 {
                let c = link.cdf(x);
                assert!(c > prev, "{link} not increasing at {x}");
                prev = c;
                x += 0.05;
            }
        }
    }

    #[test]
    fn pdf_positive_on_working_range() {
        // The density is positive everywhere in exact arithmetic; in f64 the
        // probit density underflows around |x| = 38.6 and the logistic one
        // around |x| = 745. Check well inside those limits.
        for x in [-37.0, -8.0, -1.0, 0.0, 1.0, 8.0, 37.0] {
            assert!(Link::Probit.pdf(x) > 0.0, "probit pdf at {x}");
        }
        for x in [-700.0, -8.0, 0.0, 8.0, 700.0] {
            assert!(Link::Logit.pdf(x) > 0.0, "logit pdf at {x}");
        }
    }

    #[test]
    fn logit_round_trip() {
        let mut x = -8.0;
        while x <= 8.0 {
            let back = Link::Logit.inverse_cdf(Link::Logit.cdf(x));
            assert!((back - x).abs() <= 1e-10, "logit round trip at {x}: {back}");
            x += 0.01;
        }
    }

    #[test]
    fn probit_round_trip() {
        // Above x ~ 5.2 the f64 spacing of cdf values near 1 exceeds what a
        // 1e-10 round trip requires, so the upper tail is checked against the
        // quantization bound instead of a flat tolerance. The lower tail keeps
        // full relative precision all the way down.
        let mut x = -8.0;
        while x <= 8.0 {
            let back = Link::Probit.inverse_cdf(Link::Probit.cdf(x));
            let tol = if x <= 5.0 {
                1e-10
            } else {
                1e-10 + 4.0 * f64::EPSILON / Link::Probit.pdf(x)
            };
            assert!(
                (back - x).abs() <= tol,
                "probit round trip at {x}: {back}, tol {tol}"
            );
            x += 0.01;
        }
    }

    #[test]
    fn inverse_cdf_endpoints() {
        for link in LINKS {
            assert_eq!(link.inverse_cdf(0.0), f64::NEG_INFINITY);
            assert_eq!(link.inverse_cdf(1.0), f64::INFINITY);
            assert_eq!(link.cdf(f64::NEG_INFINITY), 0.0);
            assert_eq!(link.cdf(f64::INFINITY), 1.0);
        }
    }

    #[test]
    fn probit_matches_known_values() {
        // Phi(1.96) and Phi(-1.64) from standard normal tables; the erfc
        // backend is good to about a picounit here.
        assert!((Link::Probit.cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-11);
        assert!((Link::Probit.cdf(-1.644_853_626_951_472_7) - 0.05).abs() < 1e-11);
    }

    #[test]
    fn logit_matches_known_values() {
        assert!((Link::Logit.cdf(-1.0) - 0.268_941_421_369_995_1).abs() < 1e-12);
        assert!((Link::Logit.inverse_cdf(0.2) - (-1.386_294_361_119_890_6)).abs() < 1e-12);
    }
}
