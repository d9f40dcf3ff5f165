//! Reference parameter suites shared by the acceptance run and the CLI tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ucp_core::PotentialSpec;

/// Seed of the randomized suite.
pub const SUITE_SEED: u64 = 7;
/// k-points per randomized spec.
pub const K_POINTS: usize = 64;
/// Half-width of the excluded band around `k² = V`.
pub const DEGENERATE_BAND: f64 = 1e-6;
/// Upper bound of the ρ range in the randomized suite.
pub const RHO_MAX: f64 = 6.0;

/// Randomized valid specs: N in 2..=6, S in 0..=5, μ in [0.2, 2], ν = 0 or in
/// [0.2, 2], ρ above the positivity threshold and below 6, L in [1, 25], V in [1, 50].
pub fn random_suite(seed: u64, count: usize) -> Vec<PotentialSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut specs = Vec::with_capacity(count);
    while specs.len() < count {
        let n = rng.gen_range(2..=6usize);
        let stages = rng.gen_range(0..=5usize);
        let mu = rng.gen_range(0.2..=2.0);
        let nu = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.2..=2.0) };
        let rho_min = f64::max(1.05, ((n - 1) as f64).powf(1.0 / (mu + nu)) + 0.05);
        if rho_min >= RHO_MAX {
            continue;
        }
        let rho = rng.gen_range(rho_min..RHO_MAX);
        let length = rng.gen_range(1.0..=25.0);
        let height = rng.gen_range(1.0..=50.0);
        let spec = PotentialSpec::new(n, rho, mu, nu, stages, length, height);
        if spec.check().is_ok() {
            specs.push(spec);
        }
    }
    specs
}

/// `count` midpoints tiling `(0.1, 3√V]`, minus those within the degenerate band.
pub fn suite_k_points(spec: &PotentialSpec, count: usize) -> Vec<f64> {
    let hi = 3.0 * spec.height.sqrt();
    (0..count)
        .map(|i| 0.1 + (hi - 0.1) * (i as f64 + 0.5) / count as f64)
        .filter(|k| (k * k - spec.height).abs() >= DEGENERATE_BAND)
        .collect()
}

/// Scaling-law family: L = 1, ρ = 3.5, μ = 0.5, ν = 1.5, height set later.
pub fn scaling_spec(n: usize, stages: usize) -> PotentialSpec {
    PotentialSpec::new(n, 3.5, 0.5, 1.5, stages, 1.0, 0.0)
}

/// `(N, S)` pairs of the scaling suite.
pub const SCALING_CASES: [(usize, usize); 8] = [(2, 4), (3, 4), (4, 4), (5, 4), (8, 4), (8, 2), (8, 3), (8, 5)];
/// Unscaled barrier height of the scaling suite.
pub const SCALING_V0: f64 = 10.0;
/// Fit range of the scaling suite.
pub const SCALING_K: (f64, f64) = (1e2, 1e4);

/// Resonance panels: N = 2..5 with ρ = N + 0.1, μ = 0, ν = 1, L = 5, V = 25.
pub fn resonance_spec(n: usize) -> PotentialSpec {
    let stages = if n == 3 { 1 } else { 2 };
    PotentialSpec::new(n, n as f64 + 0.1, 0.0, 1.0, stages, 5.0, 25.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_is_reproducible_and_valid() {
        let a = random_suite(SUITE_SEED, 50);
        assert_eq!(a, random_suite(SUITE_SEED, 50));
        for spec in &a {
            assert!(spec.check().is_ok());
            assert!((2..=6).contains(&spec.n) && spec.stages <= 5 && spec.rho < RHO_MAX);
        }
    }

    #[test]
    fn k_points_skip_degenerate_band() {
        let spec = PotentialSpec::new(2, 3.0, 1.0, 0.0, 1, 1.0, 4.0);
        let ks = suite_k_points(&spec, 64);
        assert!(ks.len() <= 64 && ks.iter().all(|k| *k > 0.1 && *k <= 6.0));
        assert!(ks.iter().all(|k| (k * k - 4.0).abs() >= DEGENERATE_BAND));
    }
}
