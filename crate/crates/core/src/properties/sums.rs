use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::set::FiniteSet;
use crate::error::{Error, Result};
use crate::sieve::{check_power, PrimeTable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SumsVerdict {
    Pass,
    /// `p^k | a + b` with `a <= b`; the lexicographically first such pair.
    Violation { a: BigUint, b: BigUint, prime: u64 },
}

fn table_covering(value: &BigUint, k: u32) -> Result<PrimeTable> {
    let root = value
        .nth_root(k)
        .to_u64()
        .ok_or_else(|| Error::Argument(format!("{value} is too large to sieve")))?;
    Ok(PrimeTable::new(root.max(1))?)
}

/// Are all pairwise sums `a + b` (`a = b` allowed when `include_diagonal`) `k`-free?
pub fn check_squarefree_sums(set: &FiniteSet, include_diagonal: bool, k: u32) -> Result<SumsVerdict> {
    check_power(k)?;
    let Some(max) = set.max() else { return Ok(SumsVerdict::Pass) };
    let table = table_covering(&(max * 2u32), k)?;
    let elems = set.elements();
    for (i, a) in elems.iter().enumerate() {
        let from = if include_diagonal { i } else { i + 1 };
        for b in &elems[from..] {
            if let Some(prime) = table.smallest_power_divisor_big(&(a + b), k)? {
                return Ok(SumsVerdict::Violation { a: a.clone(), b: b.clone(), prime });
            }
        }
    }
    Ok(SumsVerdict::Pass)
}

/// For each `1 <= n <= n_max`, how many `a` in the set have `n + a` `k`-free.
pub fn property_p_evidence(set: &FiniteSet, n_max: u64, k: u32) -> Result<BTreeMap<u64, u64>> {
    check_power(k)?;
    let max = set.max().cloned().unwrap_or_default();
    let table = table_covering(&(max + n_max), k)?;
    let mut counts = BTreeMap::new();
    for n in 1..=n_max {
        let mut count = 0;
        for a in set.iter() {
            if table.smallest_power_divisor_big(&(a + n), k)?.is_none() {
                count += 1;
            }
        }
        counts.insert(n, count);
    }
    Ok(counts)
}
