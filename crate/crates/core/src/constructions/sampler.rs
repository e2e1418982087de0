use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::properties::FiniteSet;
use crate::sieve::arith::checked_pow;
use crate::sieve::{check_power, kfree_window, PrimeTable};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerConfig {
    pub c: f64,
    pub x_max: u64,
    pub seed: u64,
    pub k: u32,
}

/// `min(C ln n ln ln n / n, 1)`.
pub fn inclusion_probability(c: f64, n: u64) -> f64 {
    let ln = (n as f64).ln();
    (c * ln * ln.ln() / n as f64).min(1.0)
}

fn validate(cfg: &SamplerConfig) -> Result<PrimeTable> {
    check_power(cfg.k)?;
    if !(cfg.c > 0.0 && cfg.c.is_finite()) {
        return Err(Error::Argument(format!("C must be positive, got {}", cfg.c)));
    }
    if cfg.x_max < 3 {
        return Err(Error::Argument(format!("x_max must be at least 3, got {}", cfg.x_max)));
    }
    Ok(PrimeTable::covering(cfg.x_max, cfg.k)?)
}

/// Random subset of the `k`-free integers in `[3, x_max]`: `n` is kept when its
/// uniform draw falls below the inclusion probability.
///
/// The draw for `n` is the 64-bit word at position `2n` of the ChaCha8 stream keyed
/// by `seed`, so the outcome for each `n` does not depend on the range sampled.
pub fn sample_counterexample(cfg: &SamplerConfig) -> Result<FiniteSet> {
    let table = validate(cfg)?;
    let flags = kfree_window(3, cfg.x_max - 2, cfg.k, &table)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_word_pos(6);
    let mut members = Vec::new();
    for n in 3..=cfg.x_max {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if flags.contains(n) && u < inclusion_probability(cfg.c, n) {
            members.push(n);
        }
    }
    FiniteSet::from_u64s(&members)
}

/// `Σ μ_n` over the `k`-free `n` in `[3, x_max]`: the expected sample size.
pub fn expected_sample_size(cfg: &SamplerConfig) -> Result<f64> {
    let table = validate(cfg)?;
    let flags = kfree_window(3, cfg.x_max - 2, cfg.k, &table)?;
    Ok(flags.members().map(|n| inclusion_probability(cfg.c, n)).sum())
}

/// Unoccupied non-zero classes modulo `p^k` of `A ∩ [x]`, for one prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occupancy {
    pub prime: u64,
    pub modulus: u64,
    pub unoccupied: Vec<u64>,
}

impl Occupancy {
    pub fn is_full(&self) -> bool {
        self.unoccupied.is_empty()
    }
}

/// For each prime `p <= ln x`, the non-zero classes modulo `p^k` that `A ∩ [x]` misses.
pub fn occupancy_probe(set: &FiniteSet, x: u64, k: u32) -> Result<Vec<Occupancy>> {
    check_power(k)?;
    let bound = if x == 0 { 0 } else { (x as f64).ln().floor() as u64 };
    let part = set.up_to(&x.into());
    PrimeTable::new(bound)?
        .primes()
        .iter()
        .map(|&p| {
            let modulus = checked_pow(p, k).ok_or(Error::Argument("modulus overflow".into()))?;
            let mut hit = vec![false; modulus as usize];
            for r in part.residues(modulus) {
                hit[r as usize] = true;
            }
            let unoccupied = (1..modulus).filter(|&r| !hit[r as usize]).collect();
            Ok(Occupancy { prime: p, modulus, unoccupied })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seed: u64) -> SamplerConfig {
        SamplerConfig { c: 5.0, x_max: 100_000, seed, k: 2 }
    }

    #[test]
    fn probabilities() {
        assert!((inclusion_probability(5.0, 3) - 0.172_203_498_570_409).abs() < 1e-12);
        assert_eq!(inclusion_probability(100.0, 3), 1.0);
    }

    #[test]
    fn samples_are_kfree_and_reproducible() {
        let a = sample_counterexample(&cfg(11)).unwrap();
        let b = sample_counterexample(&cfg(11)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_counterexample(&cfg(12)).unwrap());
        let table = PrimeTable::new(400).unwrap();
        for n in a.to_u64s().unwrap() {
            assert!(n >= 3);
            assert_eq!(table.smallest_power_divisor(n, 2), Ok(None));
        }
        let always = SamplerConfig { c: 100.0, x_max: 3, seed: 0, k: 2 };
        assert_eq!(sample_counterexample(&always).unwrap().to_u64s(), Some(vec![3]));
    }

    #[test]
    fn prefix_draws_do_not_depend_on_range() {
        let long = sample_counterexample(&SamplerConfig { x_max: 5000, ..cfg(4) }).unwrap();
        let short = sample_counterexample(&SamplerConfig { x_max: 2000, ..cfg(4) }).unwrap();
        assert_eq!(long.up_to(&2000u64.into()), short);
    }

    #[test]
    fn occupancy_examples() {
        let sf: Vec<u64> = (1..=100u64)
            .filter(|n| (2u64..=10).all(|d| n % (d * d) != 0))
            .collect();
        let rows = occupancy_probe(&FiniteSet::from_u64s(&sf).unwrap(), 100, 2).unwrap();
        assert_eq!(rows.iter().map(|r| r.prime).collect::<Vec<_>>(), vec![2, 3]);
        assert!(rows.iter().all(Occupancy::is_full));

        let rows = occupancy_probe(&FiniteSet::from_u64s(&[3]).unwrap(), 100, 2).unwrap();
        assert_eq!(rows[0].unoccupied, vec![1, 2]);
        assert_eq!(rows[1].unoccupied, vec![1, 2, 4, 5, 6, 7, 8]);

        let rows = occupancy_probe(&FiniteSet::empty(), 100, 2).unwrap();
        assert_eq!(rows[1].unoccupied, (1..9).collect::<Vec<_>>());
    }
}
