//! Property tests for the structural invariants that must hold for any
//! input, not just the handpicked cases in the unit tests.

use colp_core::{
    conditional_pmf, discretize, kendall_tau, marginal_mle, perm, Link, OrdinalParams, Permutation,
};
use proptest::prelude::*;

fn perm_strategy(max_len: usize) -> impl Strategy<Value = Permutation> {
    (2..=max_len).prop_flat_map(|len| {
        Just((0..len).collect::<Vec<usize>>())
            .prop_shuffle()
            .prop_map(|map| Permutation::from_map(map).unwrap())
    })
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent_and_canonical(p in perm_strategy(8)) {
        let once = p.canonicalize();
        prop_assert!(once.is_canonical());
        prop_assert_eq!(once.canonicalize(), once.clone());
        // A permutation and its reversal share a canonical form.
        prop_assert_eq!(p.reversal().canonicalize(), once);
    }

    #[test]
    fn neighbors_are_symmetric_and_complete(p in perm_strategy(7)) {
        let neighbors = p.transposition_neighbors();
        let len = p.len();
        prop_assert_eq!(neighbors.len(), len * (len - 1) / 2);
        for nb in &neighbors {
            prop_assert!(nb != &p);
            prop_assert!(nb.transposition_neighbors().contains(&p));
        }
    }

    #[test]
    fn kendall_tau_is_symmetric_and_bounded(
        (a, b) in (2usize..=8).prop_flat_map(|len| {
            let one = Just((0..len).collect::<Vec<usize>>())
                .prop_shuffle()
                .prop_map(|m| Permutation::from_map(m).unwrap());
            let other = Just((0..len).collect::<Vec<usize>>())
                .prop_shuffle()
                .prop_map(|m| Permutation::from_map(m).unwrap());
            (one, other)
        })
    ) {
        let ab = kendall_tau(&a, &b).unwrap();
        let ba = kendall_tau(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!((-1.0..=1.0).contains(&ab));
        prop_assert_eq!(kendall_tau(&a, &a).unwrap(), 1.0);
        prop_assert_eq!(kendall_tau(&a, &a.reversal()).unwrap(), -1.0);
    }

    #[test]
    fn enumeration_yields_distinct_valid_permutations(len in 2usize..=6) {
        let all: Vec<Permutation> = perm::enumerate_all(len).collect();
        let expected: usize = (1..=len).product();
        prop_assert_eq!(all.len(), expected);
        let distinct: std::collections::HashSet<_> = all.iter().cloned().collect();
        prop_assert_eq!(distinct.len(), expected);
        let canonical = perm::enumerate_canonical(len).count();
        prop_assert_eq!(canonical, expected / 2);
    }

    #[test]
    fn conditional_pmf_normalizes(
        s in 1usize..=6,
        l in 2usize..=8,
        seed in any::<u64>(),
        probit in any::<bool>(),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let beta: Vec<f64> = (0..s).map(|_| rng.random_range(-4.0..4.0)).collect();
        let mut gamma = Vec::new();
        let mut cur = 0.0;
        for _ in 0..l - 2 {
            cur += rng.random_range(0.01..2.5);
            gamma.push(cur);
        }
        let params = OrdinalParams::new(beta, gamma).unwrap();
        let mut map: Vec<usize> = (0..l).collect();
        use rand::seq::SliceRandom;
        map.shuffle(&mut rng);
        let sigma = Permutation::from_map(map).unwrap();
        let link = if probit { Link::Probit } else { Link::Logit };
        for level in 0..s {
            let pmf = conditional_pmf(&params, &sigma, link, level).unwrap();
            let total: f64 = pmf.iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-12, "sum {}", total);
            prop_assert!(pmf.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn discretize_is_monotone_and_in_range(
        values in prop::collection::vec(-1e6f64..1e6, 30..200),
        bins in 2usize..=8,
    ) {
        match discretize(&values, bins) {
            Ok(codes) => {
                prop_assert!(codes.iter().all(|&c| c < bins));
                let mut order: Vec<usize> = (0..values.len()).collect();
                order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
                for w in order.windows(2) {
                    prop_assert!(codes[w[0]] <= codes[w[1]]);
                }
            }
            // Colliding cut points are a legitimate rejection, not a bug.
            Err(colp_core::Error::TooFewDistinctValues { .. })
            | Err(colp_core::Error::CollapsedQuantiles { .. }) => {}
            Err(other) => prop_assert!(false, "unexpected error {other}"),
        }
    }

    #[test]
    fn marginal_mle_is_a_distribution(counts in prop::collection::vec(0usize..500, 1..10)) {
        prop_assume!(counts.iter().sum::<usize>() > 0);
        let fit = marginal_mle(&counts).unwrap();
        let total: f64 = fit.probs.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert!(fit.log_likelihood <= 0.0);
    }
}
