use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::properties::{
    admissibility_certificate, AvoidanceCertificate, Cutoff, FiniteSet, TranslateSieve,
    WitnessOutcome,
};
use crate::sieve::{crt_combine, ResidueClass};

/// Where candidate translates are drawn from, relative to `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntervalMode {
    /// `[x/2, x]`
    Half,
    /// `(x, x + x^(10/11))`
    Forward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateOrder {
    Increasing,
    /// `draws` uniform picks from the candidate progression.
    Random { seed: u64, draws: u64 },
}

#[derive(Clone, Debug)]
pub struct SuffConfig {
    /// Primes up to `theta * ln x` go into the modulus; must lie in `(0, 1/4)`.
    pub theta: f64,
    pub mode: IntervalMode,
    pub order: CandidateOrder,
    pub cutoff: Cutoff,
    pub k: u32,
}

impl SuffConfig {
    pub fn new(k: u32) -> Self {
        SuffConfig {
            theta: 0.1,
            mode: IntervalMode::Half,
            order: CandidateOrder::Increasing,
            cutoff: Cutoff::Full,
            k,
        }
    }
}

/// The candidate interval `[lo, hi]` for `x` (possibly empty: `lo > hi`).
pub fn candidate_interval(x: u64, mode: IntervalMode) -> (u64, u64) {
    match mode {
        IntervalMode::Half => (x.div_ceil(2).max(1), x),
        IntervalMode::Forward => {
            let width = (x as f64).powf(10.0 / 11.0).ceil() as u64;
            (x + 1, x + width - 1)
        }
    }
}

fn prime_limit(x: u64, theta: f64) -> u64 {
    (theta * (x as f64).ln()).floor().max(0.0) as u64
}

/// Search `n ≡ -b (mod W)` with `n + a` `k`-free for all `a` in `set`, where
/// `W = ∏_{p <= theta ln x} p^k` and `b` collects the set's avoided classes.
pub fn suff_witness_search(set: &FiniteSet, x: u64, cfg: &SuffConfig) -> Result<WitnessOutcome> {
    let cert = admissibility_certificate(set, cfg.k, prime_limit(x, cfg.theta).max(1))?;
    suff_witness_search_with(set, x, &cert, cfg)
}

/// As [`suff_witness_search`], with the avoided classes taken from `cert`.
pub fn suff_witness_search_with(
    set: &FiniteSet,
    x: u64,
    cert: &AvoidanceCertificate,
    cfg: &SuffConfig,
) -> Result<WitnessOutcome> {
    if !(cfg.theta > 0.0 && cfg.theta < 0.25) {
        return Err(Error::Argument(format!("theta must lie in (0, 1/4), got {}", cfg.theta)));
    }
    if x == 0 || set.max().is_some_and(|m| *m > x.into()) {
        return Err(Error::Argument(format!("x = {x} must be at least max A")));
    }
    if cert.power() != cfg.k {
        return Err(Error::Argument("certificate was made for a different power".into()));
    }
    let limit = prime_limit(x, cfg.theta);
    let mut classes = Vec::new();
    for p in crate::sieve::PrimeTable::new(limit)?.primes() {
        let class = cert
            .class_for(*p)
            .ok_or_else(|| Error::Argument(format!("certificate has no class for p = {p}")))?;
        classes.push(class);
    }
    let b = if classes.is_empty() { ResidueClass::new(0, 1)? } else { crt_combine(&classes)? };
    let w = b.modulus();
    let shift = ResidueClass::of(-(b.residue() as i128), w)?;

    let (lo, hi) = candidate_interval(x, cfg.mode);
    let Some(start) = shift.first_at_least(lo).filter(|&s| s <= hi) else {
        return Ok(WitnessOutcome::NoneFound { examined: 0 });
    };
    let count = (hi - start) / w + 1;
    let sieve = TranslateSieve::new(set.clone(), cfg.k, cfg.cutoff, hi)?;
    let prog = sieve.progression(start, w);
    let found = match cfg.order {
        CandidateOrder::Increasing => sieve.first_good(&prog, count),
        CandidateOrder::Random { seed, draws } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut hit = None;
            let mut examined = 0;
            for _ in 0..draws {
                examined += 1;
                let t = rng.random_range(0..count);
                if sieve.is_good(&prog, t) {
                    hit = Some(t);
                    break;
                }
            }
            (hit, examined)
        }
    };
    Ok(match found {
        (Some(t), _) => WitnessOutcome::Found(sieve.report(start + t * w)),
        (None, examined) => WitnessOutcome::NoneFound { examined },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::properties::{reverify_full, Certification, NamedSequence};

    fn found(o: WitnessOutcome) -> crate::properties::WitnessReport {
        match o {
            WitnessOutcome::Found(r) => r,
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn small_examples() {
        let s = FiniteSet::from_u64s(&[3, 5, 9]).unwrap();
        let r = found(suff_witness_search(&s, 9, &SuffConfig::new(2)).unwrap());
        assert_eq!(r.witness, 8);
        let r = found(suff_witness_search(&FiniteSet::empty(), 10, &SuffConfig::new(2)).unwrap());
        assert_eq!(r.witness, 5);
        assert!(suff_witness_search(&s, 8, &SuffConfig::new(2)).is_err());
        let bad = SuffConfig { theta: 0.3, ..SuffConfig::new(2) };
        assert!(suff_witness_search(&s, 9, &bad).is_err());
    }

    #[test]
    fn a1_prefix_at_fifteen_terms() {
        let s = NamedSequence::A1.prefix(15);
        let x = 32769;
        let r = found(suff_witness_search(&s, x, &SuffConfig::new(2)).unwrap());
        assert!((16385..=x).contains(&r.witness));
        assert_eq!(r.certification, Certification::Full);
        assert!(r.is_clean() && reverify_full(&r));
    }

    #[test]
    fn modulus_restricts_candidates() {
        // theta ln x >= 3 needs x >= e^12.5; W = 4 * 9 and b ≡ 0 mod 4, 1 mod 9
        let s = NamedSequence::A1.prefix(5);
        let x = 300_000;
        let cfg = SuffConfig { theta: 0.24, ..SuffConfig::new(2) };
        let r = found(suff_witness_search(&s, x, &cfg).unwrap());
        assert_eq!(r.witness % 4, 0);
        assert_eq!(r.witness % 9, 8);
        for mode in [IntervalMode::Half, IntervalMode::Forward] {
            let cfg = SuffConfig {
                theta: 0.24,
                mode,
                order: CandidateOrder::Random { seed: 7, draws: 1000 },
                ..SuffConfig::new(2)
            };
            let r = found(suff_witness_search(&s, x, &cfg).unwrap());
            let (lo, hi) = candidate_interval(x, mode);
            assert!((lo..=hi).contains(&r.witness));
            assert!(reverify_full(&r) && r.is_clean());
            assert_eq!(r.witness % 36, 8);
        }
    }

    #[test]
    fn certificate_gaps_are_argument_errors() {
        let s = NamedSequence::A1.prefix(5);
        let cert = admissibility_certificate(&s, 2, 2).unwrap();
        let cfg = SuffConfig { theta: 0.24, ..SuffConfig::new(2) };
        assert!(matches!(
            suff_witness_search_with(&s, 300_000, &cert, &cfg),
            Err(Error::Argument(_))
        ));
    }
}
