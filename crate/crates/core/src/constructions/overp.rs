use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::properties::{Certification, Cutoff, FiniteSet, TranslateSieve};
use crate::sieve::arith::checked_pow;
use crate::sieve::{check_power, kfree_window, PrimeTable};

pub const DEFAULT_W_BITS_BUDGET: u64 = 32_768;
/// Thresholds above this are refused outright.
pub const MAX_THRESHOLD: u64 = 100_000_000;

/// Largest offset `a` constrained at prime `p`: `floor(p / (ln ln p)^2)`.
pub fn max_offset(p: u64) -> u64 {
    let ll = (p as f64).ln().ln();
    (p as f64 / (ll * ll)).floor() as u64
}

#[derive(Clone, Debug)]
pub struct OverPConfig {
    /// Every prime up to this threshold has `p^k | n`.
    pub threshold: u64,
    pub candidate_budget: u64,
    /// Offsets are checked against primes up to this cap.
    pub verify_cap: u64,
    pub k: u32,
    /// Only candidates strictly above this value are considered.
    pub start_after: Option<BigUint>,
}

impl OverPConfig {
    pub fn new(threshold: u64, k: u32) -> Self {
        OverPConfig {
            threshold,
            candidate_budget: 1_000_000,
            verify_cap: 1_000_000,
            k,
            start_after: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverPCertification {
    /// Every prime that could divide some `n + a` was checked.
    Full,
    CheckedUpTo(u64),
}

impl fmt::Display for OverPCertification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OverPCertification::Full => f.write_str("FULL"),
            OverPCertification::CheckedUpTo(c) => write!(f, "CHECKED_UP_TO({c})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverPPoint {
    pub n: BigUint,
    pub modulus: BigUint,
    pub multiplier: u64,
    pub candidates_examined: u64,
    pub certification: OverPCertification,
}

struct PrimeCheck {
    q: u64,
    w_mod_q: u64,
    max_offset: u64,
    /// `p^k - p`, when it fits
    clearance: Option<u64>,
    large: bool,
}

/// Smallest multiple `n` of `W = ∏_{p <= P} p^k` such that `p^k ∤ n + a` for every
/// prime `p > P` and `1 <= a <= p / (ln ln p)^2`.
///
/// With `r = n mod p^k`, the offsets hit `p^k` exactly when `r != 0` and
/// `p^k - r <= max_offset(p)`. Primes with `p^k - p >= n` (and `p >= 16`, so the
/// offset range stays below `p`) cannot divide any `n + a` and end the scan.
pub fn overp_base_point(cfg: &OverPConfig) -> Result<OverPPoint> {
    check_power(cfg.k)?;
    if cfg.threshold < 3 {
        return Err(Error::Argument(format!("threshold must be at least 3, got {}", cfg.threshold)));
    }
    if cfg.threshold > MAX_THRESHOLD {
        return Err(Error::Budget(format!("threshold {} exceeds {MAX_THRESHOLD}", cfg.threshold)));
    }
    let table = PrimeTable::new(cfg.threshold.max(cfg.verify_cap))?;
    let w = table
        .up_to(cfg.threshold)
        .iter()
        .fold(BigUint::one(), |acc, &p| acc * BigUint::from(p).pow(cfg.k));
    let checks: Vec<PrimeCheck> = table
        .primes()
        .iter()
        .filter(|&&p| p > cfg.threshold && p <= cfg.verify_cap)
        .map(|&p| {
            let q = checked_pow(p, cfg.k).ok_or(Error::Argument("p^k overflows 64 bits".into()))?;
            Ok(PrimeCheck {
                q,
                w_mod_q: (&w % q).to_u64().expect("below q"),
                max_offset: max_offset(p),
                clearance: Some(q - p),
                large: p >= 16,
            })
        })
        .collect::<Result<_>>()?;

    let first = match &cfg.start_after {
        Some(s) => (s / &w).to_u64().ok_or(Error::Argument("start is too large".into()))? + 1,
        None => 1,
    };
    for i in 0..cfg.candidate_budget {
        let t = first + i;
        let n = &w * t;
        let n_small = n.to_u64();
        let mut ok = true;
        let mut exhausted = false;
        for c in &checks {
            if c.large {
                if let (Some(ns), Some(cl)) = (n_small, c.clearance) {
                    if cl >= ns {
                        exhausted = true;
                        break;
                    }
                }
            }
            let r = ((t % c.q) as u128 * c.w_mod_q as u128 % c.q as u128) as u64;
            if r != 0 && c.q - r <= c.max_offset {
                ok = false;
                break;
            }
        }
        if ok {
            let cap = cfg.verify_cap;
            let full = exhausted || {
                let next = BigUint::from(cap) + 1u32;
                cap >= 15 && next.pow(cfg.k) - &next >= n
            };
            let certification =
                if full { OverPCertification::Full } else { OverPCertification::CheckedUpTo(cap) };
            return Ok(OverPPoint {
                n,
                modulus: w,
                multiplier: t,
                candidates_examined: i + 1,
                certification,
            });
        }
    }
    Err(Error::Budget(format!(
        "no valid multiple of W among {} candidates",
        cfg.candidate_budget
    )))
}

/// Thresholds `P_1, P_2, …` for the anchors.
#[derive(Clone, Debug, PartialEq)]
pub enum ThresholdSchedule {
    /// `P_j = floor(K e^(e^j))`.
    DoubleExponential { scale: f64 },
    /// Caller-chosen thresholds; an experimental departure from the double-exponential schedule.
    Custom(Vec<u64>),
}

impl ThresholdSchedule {
    pub fn is_departure(&self) -> bool {
        matches!(self, ThresholdSchedule::Custom(_))
    }

    pub fn threshold(&self, j: usize) -> Result<u64> {
        match self {
            ThresholdSchedule::DoubleExponential { scale } => {
                let v = scale * (j as f64).exp().exp();
                if !v.is_finite() || v > MAX_THRESHOLD as f64 {
                    return Err(Error::Budget(format!(
                        "threshold {v:.3e} at depth {j} exceeds {MAX_THRESHOLD}"
                    )));
                }
                Ok(v.floor() as u64)
            }
            ThresholdSchedule::Custom(list) => list
                .get(j - 1)
                .copied()
                .ok_or_else(|| Error::Argument(format!("no custom threshold for depth {j}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct OverPSequenceConfig {
    pub schedule: ThresholdSchedule,
    pub depth: usize,
    /// Largest allowed bit length of a modulus `W`.
    pub w_bits_budget: u64,
    pub candidate_budget: u64,
    pub verify_cap: u64,
    /// The induced set is listed up to this value.
    pub set_cap: u64,
    pub cutoff: Cutoff,
    pub k: u32,
}

impl OverPSequenceConfig {
    pub fn new(scale: f64, depth: usize, k: u32) -> Self {
        OverPSequenceConfig {
            schedule: ThresholdSchedule::DoubleExponential { scale },
            depth,
            w_bits_budget: DEFAULT_W_BITS_BUDGET,
            candidate_budget: 100_000,
            verify_cap: 100_000,
            set_cap: 10_000,
            cutoff: Cutoff::Full,
            k,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OverPSequence {
    pub thresholds: Vec<u64>,
    pub anchors: Vec<OverPPoint>,
    /// `k`-free `a <= set_cap` with every `n_j + a` `k`-free (up to the certification).
    pub induced: Vec<u64>,
    pub induced_certification: Certification,
    pub departure: bool,
}

/// Anchors for successive thresholds and the set of offsets compatible with all of them.
pub fn overp_sequence(cfg: &OverPSequenceConfig) -> Result<OverPSequence> {
    check_power(cfg.k)?;
    let mut thresholds = Vec::with_capacity(cfg.depth);
    for j in 1..=cfg.depth {
        let p = cfg.schedule.threshold(j)?;
        let primes = PrimeTable::new(p)?;
        let bits: f64 = primes.primes().iter().map(|&q| cfg.k as f64 * (q as f64).log2()).sum();
        if bits > cfg.w_bits_budget as f64 {
            return Err(Error::Budget(format!(
                "modulus for threshold {p} needs {bits:.0} bits, budget is {}",
                cfg.w_bits_budget
            )));
        }
        thresholds.push(p);
    }
    let mut anchors: Vec<OverPPoint> = Vec::new();
    for &p in &thresholds {
        let point = overp_base_point(&OverPConfig {
            threshold: p,
            candidate_budget: cfg.candidate_budget,
            verify_cap: cfg.verify_cap,
            k: cfg.k,
            start_after: anchors.last().map(|a| a.n.clone()),
        })?;
        anchors.push(point);
    }

    if cfg.set_cap == 0 {
        return Ok(OverPSequence {
            thresholds,
            anchors,
            induced: Vec::new(),
            induced_certification: Certification::Full,
            departure: cfg.schedule.is_departure(),
        });
    }
    let table = PrimeTable::covering(cfg.set_cap, cfg.k)?;
    let kfree = kfree_window(1, cfg.set_cap, cfg.k, &table)?;
    let anchor_set = FiniteSet::new(anchors.iter().map(|a| a.n.clone()).collect())?;
    let sieve = TranslateSieve::new(anchor_set, cfg.k, cfg.cutoff, cfg.set_cap)?;
    let prog = sieve.progression(1, 1);
    let good = sieve.good_mask(&prog, cfg.set_cap);
    let induced: Vec<u64> = kfree
        .members()
        .filter(|&a| good.get(a as usize - 1))
        .collect();
    let induced_certification = if anchors.is_empty() {
        Certification::Full
    } else {
        sieve.certification_for(cfg.set_cap)
    };
    Ok(OverPSequence {
        thresholds,
        anchors,
        induced,
        induced_certification,
        departure: cfg.schedule.is_departure(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    /// Direct check of both conditions, independent of the residue shortcut.
    fn conditions_hold(n: u64, threshold: u64, k: u32) -> bool {
        let is_prime = |p: u64| p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0);
        let small = (2..=threshold).filter(|&p| is_prime(p)).all(|p| n % p.pow(k) == 0);
        let large = (threshold + 1..)
            .filter(|&p| is_prime(p))
            .take_while(|&p| p.pow(k) <= n + p.max(max_offset(p)))
            .all(|p| (1..=max_offset(p)).all(|a| (n + a) % p.pow(k) != 0));
        small && large
    }

    #[test]
    fn offsets() {
        let got: Vec<u64> = [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]
            .iter()
            .map(|&p| max_offset(p))
            .collect();
        assert_eq!(got, vec![22, 15, 14, 14, 15, 16, 17, 19, 20, 22, 23, 24, 25]);
    }

    #[test]
    fn base_points() {
        let p3 = overp_base_point(&OverPConfig::new(3, 2)).unwrap();
        assert_eq!(p3.n, BigUint::from(252u32));
        assert_eq!(p3.certification, OverPCertification::Full);
        assert!(conditions_hold(252, 3, 2));
        assert!((36..252).step_by(36).all(|n| !conditions_hold(n, 3, 2)));

        let once = OverPConfig { candidate_budget: 1, ..OverPConfig::new(3, 2) };
        assert!(matches!(overp_base_point(&once), Err(Error::Budget(_))));

        let p5 = overp_base_point(&OverPConfig::new(5, 2)).unwrap();
        assert_eq!(p5.n, BigUint::from(900u32));
        assert!(conditions_hold(900, 5, 2));

        let p7 = overp_base_point(&OverPConfig::new(7, 2)).unwrap();
        assert_eq!(p7.n, BigUint::from(132_300u32));
        assert!(conditions_hold(132_300, 7, 2));
        assert!(overp_base_point(&OverPConfig::new(2, 2)).is_err());
    }

    #[test]
    fn base_points_match_direct_scan_for_cubes() {
        for threshold in [3u64, 5] {
            let point = overp_base_point(&OverPConfig::new(threshold, 3)).unwrap();
            let n = point.n.to_u64().unwrap();
            let w = point.modulus.to_u64().unwrap();
            assert!(conditions_hold(n, threshold, 3));
            assert!((1..n / w).all(|t| !conditions_hold(t * w, threshold, 3)));
        }
    }

    #[test]
    fn sequence_depths() {
        let zero = overp_sequence(&OverPSequenceConfig { set_cap: 100, ..OverPSequenceConfig::new(3.0, 0, 2) })
            .unwrap();
        assert!(zero.anchors.is_empty());
        let sf: Vec<u64> = (1..=100u64).filter(|n| (2u64..=10).all(|d| n % (d * d) != 0)).collect();
        assert_eq!(zero.induced, sf);

        let one = overp_sequence(&OverPSequenceConfig { set_cap: 2000, ..OverPSequenceConfig::new(3.0, 1, 2) })
            .unwrap();
        assert_eq!(one.thresholds, vec![45]);
        let n1 = &one.anchors[0].n;
        let table = PrimeTable::new(45).unwrap();
        assert!(table.primes().iter().all(|&p| (n1 % (p * p)).is_zero()));
        assert!(matches!(one.induced_certification, Certification::PiCertified(_)));
        for &a in &one.induced {
            assert_eq!(table.power_divisor_up_to(&(n1 + a), 2, 45), None);
        }

        let three = overp_sequence(&OverPSequenceConfig::new(3.0, 3, 2));
        assert!(matches!(three, Err(Error::Budget(_))));
    }

    #[test]
    fn custom_schedule_is_flagged() {
        let cfg = OverPSequenceConfig {
            schedule: ThresholdSchedule::Custom(vec![3, 5]),
            set_cap: 50,
            ..OverPSequenceConfig::new(3.0, 2, 2)
        };
        let seq = overp_sequence(&cfg).unwrap();
        assert!(seq.departure);
        assert_eq!(seq.anchors[0].n, BigUint::from(252u32));
        assert!(seq.anchors[1].n > BigUint::from(252u32));
    }
}
