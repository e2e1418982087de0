//! Randomized instances of the per-prime inequality behind the square-moduli large sieve.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqfree::large_sieve::{verify_sqsieve_inequality, SqSieveCheck};
use sqfree::Result;

pub const TRIAL_PRIMES: [u64; 4] = [2, 3, 5, 7];

#[derive(Clone, Debug, PartialEq)]
pub struct AppendixSummary {
    pub trials: u64,
    pub inequality_failures: u64,
    pub plancherel_failures: u64,
    /// Largest `|Σ|c_a|^2 - (q - ω)ω| / ((q - ω)ω)` seen.
    pub max_plancherel_error: f64,
    /// Smallest `lhs / rhs` over instances with `rhs > 0`.
    pub min_ratio: f64,
    /// The worked instance `p = 2`, removed class `0 mod 4`, `a_n = 1` on `{1, 2, 3}`.
    pub hand_case: SqSieveCheck,
}

impl AppendixSummary {
    pub fn passed(&self) -> bool {
        self.inequality_failures == 0 && self.plancherel_failures == 0
    }
}

/// `trials` instances with `p` uniform in [`TRIAL_PRIMES`], `k = 2`, `ω` uniform in
/// `[1, p^2 - 1]`, a uniform removed set of that size, and coefficients uniform in the
/// unit square on up to three periods (zero on removed classes).
pub fn run_appendix_trials(trials: u64, seed: u64) -> Result<AppendixSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = AppendixSummary {
        trials,
        inequality_failures: 0,
        plancherel_failures: 0,
        max_plancherel_error: 0.0,
        min_ratio: f64::INFINITY,
        hand_case: verify_sqsieve_inequality(2, 2, &[0], 1, &[Complex64::new(1.0, 0.0); 3])?,
    };
    for _ in 0..trials {
        let p = TRIAL_PRIMES[rng.random_range(0..TRIAL_PRIMES.len())];
        let q = p * p;
        let omega = rng.random_range(1..q);
        let removed: Vec<u64> =
            sample(&mut rng, q as usize, omega as usize).into_iter().map(|i| i as u64).collect();
        let start = rng.random_range(-100i64..100);
        let len = rng.random_range(1..=3 * q as usize);
        let coefficients: Vec<Complex64> = (0..len)
            .map(|i| {
                let r = (start + i as i64).rem_euclid(q as i64) as u64;
                let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                if removed.contains(&r) {
                    Complex64::new(0.0, 0.0)
                } else {
                    c
                }
            })
            .collect();
        let check = verify_sqsieve_inequality(p, 2, &removed, start, &coefficients)?;
        summary.inequality_failures += u64::from(!check.holds);
        summary.plancherel_failures += u64::from(!check.plancherel_holds);
        let err = (check.plancherel_sum - check.plancherel_expected).abs() / check.plancherel_expected;
        summary.max_plancherel_error = summary.max_plancherel_error.max(err);
        if check.rhs > 0.0 {
            summary.min_ratio = summary.min_ratio.min(check.lhs / check.rhs);
        }
    }
    Ok(summary)
}
