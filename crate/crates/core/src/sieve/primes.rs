use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::arith::{checked_pow, iroot};
use super::SieveError;

/// Largest prime-table limit accepted by [`PrimeTable::new`]. The odd-only bit
/// sieve needs `limit / 16` bytes, so this caps the scratch space at 256 MiB.
pub const DEFAULT_PRIME_LIMIT_BUDGET: u64 = 1 << 32;

/// All primes up to `limit`, in increasing order.
///
/// Indexing follows the usual convention `p_1 = 2 < p_2 = 3 < …`; see [`PrimeTable::nth`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn new(limit: u64) -> Result<Self, SieveError> {
        Self::with_budget(limit, DEFAULT_PRIME_LIMIT_BUDGET)
    }

    pub fn with_budget(limit: u64, budget: u64) -> Result<Self, SieveError> {
        if limit > budget {
            return Err(SieveError::Resource { requested: limit, budget });
        }
        Ok(PrimeTable { limit, primes: odd_sieve(limit) })
    }

    /// Table large enough to decide `k`-freeness of every integer up to `n`.
    pub fn covering(n: u64, k: u32) -> Result<Self, SieveError> {
        Self::new(iroot(n, k).max(1))
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// `p_i` with 1-based `i`.
    pub fn nth(&self, i: usize) -> Option<u64> {
        i.checked_sub(1).and_then(|j| self.primes.get(j).copied())
    }

    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }

    /// Primes `p <= bound` (clamped to the table).
    pub fn up_to(&self, bound: u64) -> &[u64] {
        &self.primes[..self.primes.partition_point(|&p| p <= bound)]
    }

    /// Does the table contain every prime `p` with `p^k <= n`?
    pub fn covers(&self, n: u64, k: u32) -> bool {
        iroot(n, k) <= self.limit
    }

    pub(crate) fn require(&self, n: u64, k: u32) -> Result<(), SieveError> {
        let needed = iroot(n, k);
        if needed > self.limit {
            Err(SieveError::Coverage { limit: self.limit, needed })
        } else {
            Ok(())
        }
    }

    /// Smallest prime `p` with `p^k | n`, or `None` when `n` is `k`-free.
    pub fn smallest_power_divisor(&self, n: u64, k: u32) -> Result<Option<u64>, SieveError> {
        check_power(k)?;
        if n == 0 {
            return Err(SieveError::Argument("0 is not a natural number here".into()));
        }
        self.require(n, k)?;
        for &p in &self.primes {
            let Some(q) = checked_pow(p, k) else { break };
            if q > n {
                break;
            }
            if n % q == 0 {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }

    /// Arbitrary-precision variant of [`smallest_power_divisor`](Self::smallest_power_divisor).
    pub fn smallest_power_divisor_big(
        &self,
        n: &BigUint,
        k: u32,
    ) -> Result<Option<u64>, SieveError> {
        if let Some(small) = n.to_u64() {
            return self.smallest_power_divisor(small, k);
        }
        check_power(k)?;
        let root = n.nth_root(k);
        match root.to_u64() {
            Some(r) if r <= self.limit => {}
            _ => {
                return Err(SieveError::Coverage {
                    limit: self.limit,
                    needed: root.to_u64().unwrap_or(u64::MAX),
                })
            }
        }
        Ok(self.scan_big(n, k, self.limit))
    }

    /// Smallest `p <= cutoff` with `p^k | n`, without any coverage requirement.
    pub fn power_divisor_up_to(&self, n: &BigUint, k: u32, cutoff: u64) -> Option<u64> {
        self.scan_big(n, k, cutoff)
    }

    fn scan_big(&self, n: &BigUint, k: u32, cutoff: u64) -> Option<u64> {
        let small = n.to_u64();
        for &p in self.up_to(cutoff) {
            let Some(q) = checked_pow(p, k) else {
                let q = BigUint::from(p).pow(k);
                if &q > n {
                    break;
                }
                if (n % &q).is_zero() {
                    return Some(p);
                }
                continue;
            };
            match small {
                Some(s) => {
                    if q > s {
                        break;
                    }
                    if s % q == 0 {
                        return Some(p);
                    }
                }
                None => {
                    if (n % q).is_zero() {
                        return Some(p);
                    }
                }
            }
        }
        None
    }
}

pub(crate) fn check_power(k: u32) -> Result<(), SieveError> {
    if k < 2 {
        Err(SieveError::Argument(format!("power k must be at least 2, got {k}")))
    } else {
        Ok(())
    }
}

/// Eratosthenes over odd numbers only.
fn odd_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    // bit i represents 2i + 1
    let n = (limit as usize - 1) / 2 + 1;
    let mut composite = vec![0u64; n.div_ceil(64)];
    let mut i = 1usize;
    loop {
        let p = 2 * i + 1;
        if p * p > limit as usize {
            break;
        }
        if composite[i >> 6] >> (i & 63) & 1 == 0 {
            let mut j = (p * p) / 2;
            while j < n {
                composite[j >> 6] |= 1 << (j & 63);
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = vec![2];
    primes.extend(
        (1..n)
            .filter(|&i| composite[i >> 6] >> (i & 63) & 1 == 0)
            .map(|i| (2 * i + 1) as u64),
    );
    primes
}
