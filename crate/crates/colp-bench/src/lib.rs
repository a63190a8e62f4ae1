//! Shared setup for the criterion benches: deterministic samples drawn from
//! the scenario generators.

use colp_core::{generate_replication, PairedSample, Scenario, ScenarioConfig};

/// A seeded scenario-1 sample with L = S = `levels`.
pub fn scenario_sample(levels: usize, n: usize, seed: u64) -> PairedSample {
    let config = ScenarioConfig {
        l_levels: levels,
        s_levels: levels,
        n,
        reps: 1,
        seed,
        ..ScenarioConfig::new(Scenario::S1)
    };
    let (sample, _) = generate_replication(&config, 0).expect("generation");
    sample
}
