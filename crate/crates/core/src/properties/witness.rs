use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::admissible::admissibility_certificate;
use super::named::NamedSequence;
use super::set::{residue, FiniteSet};
use crate::bitset::Bits;
use crate::constructions::{suff_witness_search, CandidateOrder, IntervalMode, SuffConfig};
use crate::error::{Error, Result};
use crate::sieve::arith::{checked_pow, iroot, solve_linear_congruence};
use crate::sieve::{check_power, PrimeTable};

/// Largest prime cutoff chosen automatically by [`Cutoff::Full`].
pub const AUTO_CUTOFF_CAP: u64 = 1 << 20;

const CHUNK: u64 = 1 << 16;

/// Which primes a witness search checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cutoff {
    /// Every prime that could matter, up to [`AUTO_CUTOFF_CAP`].
    Full,
    /// Primes up to the given bound.
    Primes(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certification {
    /// Every translate was checked against all primes up to its `k`-th root.
    Full,
    /// Only primes up to the bound were checked.
    PiCertified(u64),
}

impl std::fmt::Display for Certification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Certification::Full => f.write_str("FULL"),
            Certification::PiCertified(pi) => write!(f, "PI_CERTIFIED({pi})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub element: BigUint,
    pub translate: BigUint,
    /// Smallest checked prime whose `k`-th power divides the translate.
    pub power_divisor: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessReport {
    pub witness: u64,
    pub power: u32,
    pub certification: Certification,
    pub trace: Vec<TraceEntry>,
}

impl WitnessReport {
    pub fn is_clean(&self) -> bool {
        self.trace.iter().all(|t| t.power_divisor.is_none())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessOutcome {
    Found(WitnessReport),
    NoneFound { examined: u64 },
}

impl WitnessOutcome {
    pub fn report(&self) -> Option<&WitnessReport> {
        match self {
            WitnessOutcome::Found(r) => Some(r),
            WitnessOutcome::NoneFound { .. } => None,
        }
    }
}

/// Candidates `n = start + step * t` whose translates `n + a` avoid every `p^k`, `p <= cutoff`.
///
/// Bad `t` are sieved per `(p, a)` pair: `p^k | start + step*t + a` is a single
/// class of `t` (or none, or all).
pub(crate) struct TranslateSieve {
    power: u32,
    cutoff: u64,
    table: PrimeTable,
    elements: FiniteSet,
}

pub(crate) struct Progression {
    // (period, bad residue of t) sorted by period
    bad: Vec<(u64, u64)>,
    blocked: bool,
}

impl TranslateSieve {
    /// `max_n` is the largest candidate that will be asked about.
    pub(crate) fn new(elements: FiniteSet, k: u32, cutoff: Cutoff, max_n: u64) -> Result<Self> {
        check_power(k)?;
        let max_a = elements.max().cloned().unwrap_or_default();
        let needed = (max_a + max_n).nth_root(k).to_u64().unwrap_or(u64::MAX);
        let pi = match cutoff {
            Cutoff::Full => needed.min(AUTO_CUTOFF_CAP),
            Cutoff::Primes(p) if p < 2 => {
                return Err(Error::Argument(format!("prime cutoff must be at least 2, got {p}")))
            }
            Cutoff::Primes(p) => p.min(needed),
        };
        let pi = pi.min(iroot(u64::MAX, k));
        let table = PrimeTable::new(pi)?;
        Ok(TranslateSieve { power: k, cutoff: pi, table, elements })
    }

    pub(crate) fn progression(&self, start: u64, step: u64) -> Progression {
        let mut bad = Vec::new();
        let mut blocked = false;
        let mut ts = Vec::new();
        for &p in self.table.primes() {
            let q = checked_pow(p, self.power).expect("cutoff keeps p^k in range");
            ts.clear();
            let mut period = 1;
            for a in self.elements.iter() {
                let target = (2 * q as u128 - residue(a, q) as u128 - (start % q) as u128) % q as u128;
                if let Some((t0, per)) = solve_linear_congruence(step % q, target as u64, q) {
                    ts.push(t0);
                    period = per;
                }
            }
            ts.sort_unstable();
            ts.dedup();
            if !ts.is_empty() && ts.len() as u64 == period {
                blocked = true;
            }
            bad.extend(ts.iter().map(|&t| (period, t)));
        }
        bad.sort_unstable();
        Progression { bad, blocked }
    }

    /// Smallest good `t < count`, and how many candidates were looked at.
    pub(crate) fn first_good(&self, prog: &Progression, count: u64) -> (Option<u64>, u64) {
        if prog.blocked {
            return (None, count);
        }
        let mut lo = 0;
        while lo < count {
            let len = CHUNK.min(count - lo);
            let mut good = Bits::ones(len as usize);
            for &(period, t0) in &prog.bad {
                let mut off = (t0 + period - lo % period) % period;
                while off < len {
                    good.clear(off as usize);
                    off += period;
                }
            }
            if let Some(i) = good.next_one(0) {
                return (Some(lo + i as u64), lo + i as u64 + 1);
            }
            lo += len;
        }
        (None, count)
    }

    pub(crate) fn is_good(&self, prog: &Progression, t: u64) -> bool {
        !prog.blocked && prog.bad.iter().all(|&(period, t0)| t % period != t0)
    }

    /// Good-candidate flags for `t < count`.
    pub(crate) fn good_mask(&self, prog: &Progression, count: u64) -> Bits {
        let mut good = if prog.blocked { Bits::zeros(count as usize) } else { Bits::ones(count as usize) };
        if !prog.blocked {
            for &(period, t0) in &prog.bad {
                let mut t = t0;
                while t < count {
                    good.clear(t as usize);
                    t += period;
                }
            }
        }
        good
    }

    /// Certification level of a candidate `n`.
    pub(crate) fn certification_for(&self, n: u64) -> Certification {
        let max_a = self.elements.max().cloned().unwrap_or_default();
        let needed = (max_a + n).nth_root(self.power);
        if self.elements.is_empty() || needed <= BigUint::from(self.cutoff) {
            Certification::Full
        } else {
            Certification::PiCertified(self.cutoff)
        }
    }

    pub(crate) fn report(&self, n: u64) -> WitnessReport {
        let trace: Vec<TraceEntry> = self
            .elements
            .iter()
            .map(|a| {
                let translate = a + n;
                let power_divisor = self.table.power_divisor_up_to(&translate, self.power, self.cutoff);
                TraceEntry { element: a.clone(), translate, power_divisor }
            })
            .collect();
        WitnessReport { witness: n, power: self.power, certification: self.certification_for(n), trace }
    }
}

/// Smallest `n` in `[lo, hi]` with every `n + a` free of `p^k` for the checked primes.
pub fn find_translate_witness(
    set: &FiniteSet,
    lo: u64,
    hi: u64,
    k: u32,
    cutoff: Cutoff,
) -> Result<WitnessOutcome> {
    if lo == 0 || lo > hi {
        return Err(Error::Argument(format!("search interval [{lo}, {hi}] is invalid")));
    }
    let sieve = TranslateSieve::new(set.clone(), k, cutoff, hi)?;
    let prog = sieve.progression(lo, 1);
    match sieve.first_good(&prog, hi - lo + 1) {
        (Some(t), _) => Ok(WitnessOutcome::Found(sieve.report(lo + t))),
        (None, examined) => Ok(WitnessOutcome::NoneFound { examined }),
    }
}

#[derive(Clone, Debug)]
pub enum QSource {
    Named(NamedSequence),
    Set(FiniteSet),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QStrategy {
    /// Scan `(a_{j-1}, a_j)` against `a_1, …, a_{j-1}`.
    PlainScan,
    /// Scan `[a_j / 2, a_j]` against `a_1, …, a_j`.
    HalfInterval,
    /// CRT-restricted search in `[a_j / 2, a_j]` with modulus built from primes up to `theta * ln a_j`.
    Crt { theta: f64 },
}

/// Look for `n` making `n + a_i` `k`-free for the prefix of `source` ending near `a_j`.
pub fn check_q_prefix(
    source: &QSource,
    j: usize,
    strategy: QStrategy,
    k: u32,
    cutoff: Cutoff,
) -> Result<WitnessOutcome> {
    if j < 2 {
        return Err(Error::Argument(format!("prefix index must be at least 2, got {j}")));
    }
    let prefix = match source {
        QSource::Named(tag) => tag.prefix(j),
        QSource::Set(s) if s.len() >= j => s.prefix(j),
        QSource::Set(s) => {
            return Err(Error::Argument(format!("set has {} elements, need {j}", s.len())))
        }
    };
    let as_u64 = |a: &BigUint| {
        a.to_u64().ok_or_else(|| Error::Argument(format!("term {a} does not fit in 64 bits")))
    };
    let prev = as_u64(&prefix.elements()[j - 2])?;
    let last = as_u64(&prefix.elements()[j - 1])?;
    let constraints = match strategy {
        QStrategy::PlainScan => prefix.prefix(j - 1),
        _ => prefix,
    };
    admissibility_certificate(&constraints, k, 1)?;
    match strategy {
        QStrategy::PlainScan => {
            if last - prev < 2 {
                return Ok(WitnessOutcome::NoneFound { examined: 0 });
            }
            find_translate_witness(&constraints, prev + 1, last - 1, k, cutoff)
        }
        QStrategy::HalfInterval => find_translate_witness(&constraints, last.div_ceil(2), last, k, cutoff),
        QStrategy::Crt { theta } => {
            let cfg = SuffConfig {
                theta,
                mode: IntervalMode::Half,
                order: CandidateOrder::Increasing,
                cutoff,
                k,
            };
            suff_witness_search(&constraints, last, &cfg)
        }
    }
}

/// Independent re-check of a report with trial division by every prime up to the `k`-th root.
pub fn reverify_full(report: &WitnessReport) -> bool {
    report.trace.iter().all(|t| {
        let n = &t.translate;
        let root = n.nth_root(report.power).to_u64().unwrap_or(u64::MAX);
        let mut d = 2u64;
        while d <= root {
            if (n % BigUint::from(d).pow(report.power)).is_zero() {
                return t.power_divisor.is_some();
            }
            d += 1;
        }
        t.power_divisor.is_none()
    })
}
