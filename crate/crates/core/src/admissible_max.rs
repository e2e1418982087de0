//! `A(x)`: the largest number of elements of `[1, x]` left after removing one class
//! modulo `p^k` for every prime `p`.
//!
//! Only primes with `p^k <= x` matter (a class modulo a larger `p^k` meets `[1, x]` in
//! at most one point, and some class misses it entirely), so the problem is a finite
//! choice of one class per such prime.

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::Bits;
use crate::error::{Error, Result};
use crate::large_sieve::{optimize_q, Flavor, OmegaProfile};
use crate::sieve::arith::{checked_pow, iroot, iroot_ceil, mod_inverse};
use crate::sieve::{check_power, PrimeTable, ResidueClass};

/// Largest `x` accepted; survivors are kept as a bitmap of `[1, x]`.
pub const MAX_X: u64 = 1 << 24;

/// Shifts tried to seed the incumbent of the exact search.
const SEED_SHIFTS: u64 = 10_000;

const CLOCK_INTERVAL: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// The search tree was exhausted.
    Exact,
    /// The time budget ran out; `value` is the best assignment found.
    LowerBound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleMaxResult {
    pub x: u64,
    pub power: u32,
    pub value: u64,
    /// Removed class for every prime with `p^k <= x`.
    pub witness: BTreeMap<u64, ResidueClass>,
    pub status: Status,
    pub nodes: u64,
    /// Best count over the seeding shifts.
    pub shift_lower: u64,
    /// [`admissible_max_upper_sieve`] at the same `x`.
    pub sieve_upper: u64,
}

/// Numbers in `[1, x]` outside every class of `witness`.
pub fn survivors(x: u64, witness: &BTreeMap<u64, ResidueClass>) -> u64 {
    (1..=x).filter(|&n| witness.values().all(|c| !c.contains(n))).count() as u64
}

struct Moduli {
    primes: Vec<u64>,
    moduli: Vec<u64>,
}

fn moduli(x: u64, k: u32) -> Result<Moduli> {
    check_power(k)?;
    if x == 0 || x > MAX_X {
        return Err(Error::Argument(format!("x must lie in [1, {MAX_X}], got {x}")));
    }
    let table = PrimeTable::new(iroot(x, k).max(1))?;
    let primes = table.primes().to_vec();
    let moduli = primes.iter().map(|&p| checked_pow(p, k).expect("p^k <= x")).collect();
    Ok(Moduli { primes, moduli })
}

fn remove_class(bits: &mut Bits, x: u64, residue: u64, modulus: u64) {
    let first = if residue == 0 { modulus } else { residue };
    for n in (first..=x).step_by(modulus as usize) {
        bits.clear(n as usize - 1);
    }
}

fn all_hits(bits: &Bits, modulus: u64) -> Vec<u64> {
    let mut hits = vec![0u64; modulus as usize];
    for i in bits.ones_iter() {
        hits[((i as u64 + 1) % modulus) as usize] += 1;
    }
    hits
}

fn count_for_residues(x: u64, m: &Moduli, removed: &[u64]) -> u64 {
    let mut bits = Bits::ones(x as usize);
    for (&r, &q) in removed.iter().zip(&m.moduli) {
        remove_class(&mut bits, x, r, q);
    }
    bits.count_ones()
}

fn witness_map(m: &Moduli, removed: &[u64]) -> BTreeMap<u64, ResidueClass> {
    m.primes
        .iter()
        .zip(&m.moduli)
        .zip(removed)
        .map(|((&p, &q), &r)| (p, ResidueClass::new(r, q).expect("reduced")))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Goal {
    /// Beat the incumbent; primes largest first, classes by ascending hits.
    Maximize,
    /// First assignment reaching the target in (prime, residue) lexicographic order.
    Reach(u64),
}

struct Search<'a> {
    x: u64,
    m: &'a Moduli,
    /// positions into `m`, in branching order
    order: Vec<usize>,
    /// `pair_caps[d]`: Σ over pairs of positions in `order[d..]` of `⌈x / (q_a q_b)⌉`
    pair_caps: Vec<u64>,
    goal: Goal,
    best: u64,
    best_assignment: Option<Vec<u64>>,
    current: Vec<u64>,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl<'a> Search<'a> {
    fn new(x: u64, m: &'a Moduli, goal: Goal, deadline: Option<Instant>) -> Self {
        let n = m.primes.len();
        let order: Vec<usize> = match goal {
            Goal::Maximize => (0..n).rev().collect(),
            Goal::Reach(_) => (0..n).collect(),
        };
        let mut pair_caps = vec![0u64; n + 1];
        for d in (0..n).rev() {
            let qa = m.moduli[order[d]];
            let with_rest: u64 = order[d + 1..]
                .iter()
                .map(|&j| x.div_ceil(qa.saturating_mul(m.moduli[j])))
                .sum();
            pair_caps[d] = pair_caps[d + 1] + with_rest;
        }
        Search {
            x,
            m,
            order,
            pair_caps,
            goal,
            best: 0,
            best_assignment: None,
            current: vec![0; n],
            nodes: 0,
            deadline,
            timed_out: false,
        }
    }

    /// Lower bound on further removals by the primes `order[depth..]`, plus the
    /// per-class hit counts of `order[depth]`.
    ///
    /// Each remaining prime removes at least its smallest class count, and two classes
    /// with coprime moduli `q, q'` share at most `⌈x / (q q')⌉` points of `[1, x]`.
    fn bound(&self, bits: &Bits, depth: usize) -> (u64, Vec<u64>) {
        let mut max_min = 0;
        let mut sum_min = 0;
        let mut first = Vec::new();
        for (i, &j) in self.order[depth..].iter().enumerate() {
            let hits = all_hits(bits, self.m.moduli[j]);
            let min = *hits.iter().min().expect("nonempty");
            max_min = max_min.max(min);
            sum_min += min;
            if i == 0 {
                first = hits;
            }
        }
        let bonferroni = sum_min.saturating_sub(self.pair_caps[depth]);
        (max_min.max(bonferroni), first)
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes % CLOCK_INTERVAL == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.timed_out = true;
                }
            }
        }
        self.timed_out
    }

    fn pruned(&self, optimistic: u64) -> bool {
        match self.goal {
            Goal::Maximize => optimistic <= self.best,
            Goal::Reach(target) => optimistic < target || self.best_assignment.is_some(),
        }
    }

    fn record(&mut self, value: u64) {
        let better = match self.goal {
            Goal::Maximize => value > self.best,
            Goal::Reach(target) => value >= target && self.best_assignment.is_none(),
        };
        if better {
            self.best = value;
            self.best_assignment = Some(self.current.clone());
        }
    }

    fn run(&mut self, bits: &Bits, depth: usize) {
        if self.tick() {
            return;
        }
        let alive = bits.count_ones();
        if depth == self.order.len() {
            self.record(alive);
            return;
        }
        let (removal, hits) = self.bound(bits, depth);
        if self.pruned(alive - removal) {
            return;
        }
        let j = self.order[depth];
        let q = self.m.moduli[j];
        let mut classes: Vec<u64> = (0..q).collect();
        if self.goal == Goal::Maximize {
            classes.sort_by_key(|&r| hits[r as usize]);
        }
        if depth + 1 == self.order.len() && self.goal == Goal::Maximize {
            let r = classes[0];
            self.current[j] = r;
            self.record(alive - hits[r as usize]);
            return;
        }
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        for r in classes {
            // classes removing the same survivors lead to identical subtrees
            let first = if r == 0 { q } else { r };
            let removed: Vec<u64> = (first..=self.x)
                .step_by(q as usize)
                .filter(|&n| bits.get(n as usize - 1))
                .collect();
            if !seen.insert(removed.clone()) {
                continue;
            }
            if self.pruned(alive - hits[r as usize]) {
                if self.goal == Goal::Maximize {
                    break;
                }
                continue;
            }
            let mut next = bits.clone();
            for n in removed {
                next.clear(n as usize - 1);
            }
            self.current[j] = r;
            self.run(&next, depth + 1);
            if self.timed_out || (matches!(self.goal, Goal::Reach(_)) && self.best_assignment.is_some()) {
                return;
            }
        }
    }
}

/// Exact `A(x)` by branch-and-bound, degrading to [`Status::LowerBound`] when
/// `time_budget` runs out.
///
/// The reported witness is the lexicographically first optimal assignment (primes
/// ascending, residues ascending) when that second pass also fits in the budget.
pub fn admissible_max_exact(x: u64, k: u32, time_budget: Duration) -> Result<AdmissibleMaxResult> {
    let started = Instant::now();
    let m = moduli(x, k)?;
    let sieve_upper = admissible_max_upper_sieve(x, k)?;
    let seeds = total_modulus(&m).map_or(SEED_SHIFTS, |w| w.min(SEED_SHIFTS));
    let seed = admissible_max_lower_shift(x, k, ShiftSource::Range { start: 0, end: seeds })?;
    let seed_residues: Vec<u64> = m.primes.iter().map(|p| seed.witness[p].residue()).collect();

    let deadline = started.checked_add(time_budget);
    let mut search = Search::new(x, &m, Goal::Maximize, deadline);
    search.best = seed.count;
    search.best_assignment = Some(seed_residues);
    search.run(&Bits::ones(x as usize), 0);
    let status = if search.timed_out { Status::LowerBound } else { Status::Exact };
    let value = search.best;
    let mut assignment = search.best_assignment.expect("seeded");
    let mut nodes = search.nodes;

    if status == Status::Exact {
        let mut lex = Search::new(x, &m, Goal::Reach(value), deadline);
        lex.run(&Bits::ones(x as usize), 0);
        nodes += lex.nodes;
        if let Some(a) = lex.best_assignment {
            assignment = a;
        }
    }
    debug_assert_eq!(count_for_residues(x, &m, &assignment), value);
    Ok(AdmissibleMaxResult {
        x,
        power: k,
        value,
        witness: witness_map(&m, &assignment),
        status,
        nodes,
        shift_lower: seed.count,
        sieve_upper,
    })
}

fn total_modulus(m: &Moduli) -> Option<u64> {
    m.moduli.iter().try_fold(1u64, |acc, &q| acc.checked_mul(q))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftSource {
    /// Every shift `y` in `start..end`.
    Range { start: u64, end: u64 },
    /// `draws` shifts uniform modulo `W = ∏ p^k`, drawn one residue per prime.
    Random { seed: u64, draws: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftLower {
    pub count: u64,
    /// Best shift `y`; the first one found for ties.
    pub shift: BigUint,
    /// The classes `-y mod p^k` it removes.
    pub witness: BTreeMap<u64, ResidueClass>,
}

/// Best count of `a` in `[1, x]` with `y + a` free of every `p^k <= x`, over the given shifts.
pub fn admissible_max_lower_shift(x: u64, k: u32, source: ShiftSource) -> Result<ShiftLower> {
    let m = moduli(x, k)?;
    let mut best: Option<(u64, BigUint, Vec<u64>)> = None;
    let mut consider = |shift: BigUint, residues: Vec<u64>| {
        let removed: Vec<u64> = residues.iter().zip(&m.moduli).map(|(&r, &q)| (q - r) % q).collect();
        let count = count_for_residues(x, &m, &removed);
        if best.as_ref().is_none_or(|(c, _, _)| count > *c) {
            best = Some((count, shift, removed));
        }
    };
    match source {
        ShiftSource::Range { start, end } => {
            for y in start..end.max(start + 1) {
                consider(y.into(), m.moduli.iter().map(|&q| y % q).collect());
            }
        }
        ShiftSource::Random { seed, draws } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..draws.max(1) {
                let residues: Vec<u64> = m.moduli.iter().map(|&q| rng.random_range(0..q)).collect();
                consider(crt_big(&residues, &m.moduli), residues);
            }
        }
    }
    let (count, shift, removed) = best.expect("at least one shift");
    Ok(ShiftLower { count, shift, witness: witness_map(&m, &removed) })
}

fn crt_big(residues: &[u64], moduli: &[u64]) -> BigUint {
    let mut value = BigUint::zero();
    let mut modulus = BigUint::from(1u32);
    for (&r, &q) in residues.iter().zip(moduli) {
        let current = (&value % q).to_u64().expect("below q");
        let step = (&modulus % q).to_u64().expect("below q");
        let inv = mod_inverse(step, q).expect("coprime moduli");
        let t = ((r + q - current) % q) as u128 * inv as u128 % q as u128;
        value += &modulus * t as u64;
        modulus *= q;
    }
    value
}

/// `⌊min_Q (x + Q^(2k)) / Σ_{q <= Q} μ²(q) ∏_{p | q} 1/(p^k - 1)⌋` over
/// `1 <= Q <= ⌈x^(1/(2k+1))⌉ + 2`; an upper bound for `A(x)`.
pub fn admissible_max_upper_sieve(x: u64, k: u32) -> Result<u64> {
    check_power(k)?;
    if x == 0 {
        return Err(Error::Argument("x must be at least 1".into()));
    }
    let top = iroot_ceil(x, 2 * k + 1) + 2;
    let (_, bound) = optimize_q(x, &OmegaProfile::constant_one(k), Flavor::Power, 1..=top)?;
    Ok(bound.floor().to_integer().to_u64().expect("bound below 2x"))
}
