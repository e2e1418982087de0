use crate::sieve::arith::{checked_pow, iroot};
use crate::sieve::PrimeTable;

/// A candidate skipped by the greedy construction and the pair that ruled it out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub candidate: u64,
    pub partner: u64,
    /// `prime^k` divides `candidate + partner`.
    pub prime: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedySums {
    pub terms: Vec<u64>,
    pub rejections: Vec<Rejection>,
}

/// Prime table that grows as larger integers are tested.
pub(crate) struct GrowingTable {
    table: PrimeTable,
    k: u32,
}

impl GrowingTable {
    pub(crate) fn new(k: u32) -> Self {
        GrowingTable { table: PrimeTable::new(1 << 10).expect("small table"), k }
    }

    pub(crate) fn power_divisor(&mut self, n: u64) -> Option<u64> {
        if !self.table.covers(n, self.k) {
            let limit = iroot(n, self.k).saturating_mul(2);
            self.table = PrimeTable::new(limit).expect("limit within budget");
        }
        self.table
            .primes()
            .iter()
            .copied()
            .take_while(|&p| checked_pow(p, self.k).is_some_and(|q| q <= n))
            .find(|&p| n % checked_pow(p, self.k).unwrap() == 0)
    }
}

/// Greedy sequence whose pairwise sums are all `k`-free.
///
/// Each term is the smallest integer above the previous one compatible with every
/// earlier term (and with itself when `include_diagonal`); every skipped candidate is
/// logged with the partner and prime that excluded it.
pub fn greedy_squarefree_sums(count: usize, include_diagonal: bool, k: u32) -> GreedySums {
    let mut table = GrowingTable::new(k);
    let mut terms: Vec<u64> = Vec::with_capacity(count);
    let mut rejections = Vec::new();
    let mut candidate = 0u64;
    while terms.len() < count {
        candidate += 1;
        let partners = terms.iter().copied().chain(include_diagonal.then_some(candidate));
        let mut blocked = None;
        for partner in partners {
            if let Some(prime) = table.power_divisor(candidate + partner) {
                blocked = Some(Rejection { candidate, partner, prime });
                break;
            }
        }
        match blocked {
            Some(r) => rejections.push(r),
            None => terms.push(candidate),
        }
    }
    GreedySums { terms, rejections }
}
