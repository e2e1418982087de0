use rayon::prelude::*;

use super::arith::checked_pow;
use super::primes::{check_power, PrimeTable};
use super::SieveError;
use crate::bitset::Bits;

/// Numbers per segment in [`count_power_free_upto`].
pub const SEGMENT_LEN: u64 = 1 << 16;

/// `k`-free membership flags for the integers `start, start + 1, …, start + len - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KFreeWindow {
    start: u64,
    power: u32,
    flags: Bits,
}

impl KFreeWindow {
    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn len(&self) -> u64 {
        self.flags.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    /// Flag at offset `i`.
    pub fn flag(&self, i: u64) -> bool {
        self.flags.get(i as usize)
    }

    /// Is `n` (which must lie in the window) `k`-free?
    pub fn contains(&self, n: u64) -> bool {
        n >= self.start && n - self.start < self.len() && self.flag(n - self.start)
    }

    pub fn count(&self) -> u64 {
        self.flags.count_ones()
    }

    /// `k`-free numbers in `[start, start + i)`.
    pub fn count_prefix(&self, i: u64) -> u64 {
        self.flags.count_ones_prefix(i as usize)
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        self.flags.ones_iter().map(move |i| self.start + i as u64)
    }

    pub(crate) fn flags(&self) -> &Bits {
        &self.flags
    }
}

/// Sieve the window `[y, y + len)` for `k`-free integers.
pub fn kfree_window(y: u64, len: u64, k: u32, table: &PrimeTable) -> Result<KFreeWindow, SieveError> {
    check_power(k)?;
    if y == 0 {
        return Err(SieveError::Argument("window must start at 1 or later".into()));
    }
    if len == 0 {
        return Ok(KFreeWindow { start: y, power: k, flags: Bits::zeros(0) });
    }
    let last = y
        .checked_add(len - 1)
        .ok_or(SieveError::Overflow("window end exceeds u64"))?;
    table.require(last, k)?;
    Ok(KFreeWindow { start: y, power: k, flags: sieve_segment(y, len, k, table.primes()) })
}

/// Clear every multiple of `p^k` in `[y, y + len)`; `primes` must cover the window.
pub(crate) fn sieve_segment(y: u64, len: u64, k: u32, primes: &[u64]) -> Bits {
    let mut flags = Bits::ones(len as usize);
    let last = y + len - 1;
    for &p in primes {
        let Some(q) = checked_pow(p, k) else { break };
        if q > last {
            break;
        }
        if q < 64 {
            clear_small_modulus(&mut flags, y, q);
            continue;
        }
        let mut m = y.div_ceil(q) * q;
        while m <= last {
            flags.clear((m - y) as usize);
            m += q;
        }
    }
    flags
}

/// Clear the multiples of `q < 64` word by word: the mask for word `w` depends only
/// on `(y + 64 w) mod q`, which repeats every `q / gcd(q, 64)` words.
fn clear_small_modulus(flags: &mut Bits, y: u64, q: u64) {
    let period = (q / num_integer::gcd(q, 64)) as usize;
    let masks: Vec<u64> = (0..period as u64)
        .map(|j| {
            let base = y + 64 * j;
            let mut mask = 0u64;
            let mut i = (q - base % q) % q;
            while i < 64 {
                mask |= 1 << i;
                i += q;
            }
            mask
        })
        .collect();
    for (w, word) in flags.words_mut().iter_mut().enumerate() {
        *word &= !masks[w % period];
    }
}

/// Is `n` divisible by no `k`-th power of a prime?
pub fn is_power_free(n: u64, k: u32, table: &PrimeTable) -> Result<bool, SieveError> {
    table.smallest_power_divisor(n, k).map(|d| d.is_none())
}

/// `|{1 <= n <= x : n is k-free}|`, counted over segments of [`SEGMENT_LEN`] numbers.
pub fn count_power_free_upto(x: u64, k: u32, table: &PrimeTable) -> Result<u64, SieveError> {
    check_power(k)?;
    if x == 0 {
        return Ok(0);
    }
    table.require(x, k)?;
    let segments = x.div_ceil(SEGMENT_LEN);
    let primes = table.primes();
    if segments == 1 {
        return Ok(sieve_segment(1, x, k, primes).count_ones());
    }
    let count = (0..segments)
        .into_par_iter()
        .map(|s| {
            let lo = 1 + s * SEGMENT_LEN;
            let len = SEGMENT_LEN.min(x - lo + 1);
            sieve_segment(lo, len, k, primes).count_ones()
        })
        .sum();
    Ok(count)
}

/// `ζ(k)` in double precision: the closed form for `k = 2`, otherwise the direct
/// series truncated once the tail is below `1e-12`.
pub fn zeta(k: u32) -> f64 {
    assert!(k >= 2, "zeta(k) needs k >= 2");
    if k == 2 {
        return std::f64::consts::PI * std::f64::consts::PI / 6.0;
    }
    // tail after N terms is below N^(1-k) / (k-1)
    let exponent = 1.0 / (k as f64 - 1.0);
    let terms = (1.0 / (1e-12 * (k as f64 - 1.0))).powf(exponent).ceil() as u64;
    (1..=terms.max(1)).rev().map(|n| (n as f64).powi(-(k as i32))).sum()
}

/// Expected number of `k`-free integers in `[x]`: `x / ζ(k)`.
pub fn density_main_term(x: u64, k: u32) -> f64 {
    x as f64 / zeta(k)
}
