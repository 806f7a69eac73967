//! Seeded inputs shared by the benchmarks.

use tricorr_core::states::{random_density, rng_from_seed};
use tricorr_core::DensityMatrix;

pub const BENCH_SEED: u64 = 99;

/// A random mixed state of local dimension `d`, identical on every call.
pub fn fixture_state(d: usize) -> DensityMatrix {
    random_density(&mut rng_from_seed(BENCH_SEED + d as u64), d).expect("valid dimension")
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixtures_are_reproducible() {
        assert_eq!(super::fixture_state(3), super::fixture_state(3));
    }
}
