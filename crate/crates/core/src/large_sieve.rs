//! Exact evaluation of large sieve bounds for prime and prime-power moduli, and a
//! numeric check of the per-prime inequality behind the prime-power version.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::sieve::arith::checked_pow;
use crate::sieve::check_power;

/// How many classes modulo `p^k` are removed, per prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OmegaRule {
    /// One class per prime.
    ConstantOne,
    /// Classes forced out of a set whose pairwise sums (diagonal included) avoid `0 mod p^k`.
    EsSumfree,
    /// Explicit values; primes not listed remove nothing.
    Table(BTreeMap<u64, u64>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaProfile {
    pub power: u32,
    pub rule: OmegaRule,
}

impl OmegaProfile {
    pub fn constant_one(power: u32) -> Self {
        OmegaProfile { power, rule: OmegaRule::ConstantOne }
    }

    pub fn es_sumfree(power: u32) -> Self {
        OmegaProfile { power, rule: OmegaRule::EsSumfree }
    }

    /// `ω(p^e)` for the modulus `p^e`.
    fn omega_at(&self, p: u64, e: u32) -> Result<u64> {
        let q = checked_pow(p, e).ok_or(Error::Domain(format!("{p}^{e} overflows")))?;
        let w = match &self.rule {
            OmegaRule::ConstantOne => 1,
            OmegaRule::EsSumfree => es_omega(p, e),
            OmegaRule::Table(t) => t.get(&p).copied().unwrap_or(0),
        };
        if w >= q {
            return Err(Error::Domain(format!("omega({p}^{e}) = {w} is not below {q}")));
        }
        Ok(w)
    }

    /// `ω(p^k)`.
    pub fn omega(&self, p: u64) -> Result<u64> {
        self.omega_at(p, self.power)
    }
}

/// Classes modulo `p^k` avoided by any set whose sums `s + s'` (including `s = s'`)
/// are never `0 mod p^k`.
///
/// Such a residue set `S` meets each pair `{s, -s}` at most once and contains no
/// self-inverse class. The self-inverse classes are `0` for odd `p` and `0, 2^(k-1)`
/// for `p = 2`, so at least `(p^k + 1) / 2`, resp. `2^(k-1) + 1`, classes are avoided.
pub fn es_omega(p: u64, k: u32) -> u64 {
    let q = p.pow(k);
    if p == 2 {
        q / 2 + 1
    } else {
        (q + 1) / 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// Prime moduli: `(N + Q^2) / Σ h(q)` with `ω(p)`.
    Linear,
    /// Prime-power moduli: `(N + Q^(2k)) / Σ h(q)` with `ω(p^k)`.
    Power,
}

impl Flavor {
    fn exponent(self, profile: &OmegaProfile) -> u32 {
        match self {
            Flavor::Linear => 1,
            Flavor::Power => profile.power,
        }
    }
}

fn factor_squarefree(mut q: u64) -> Option<Vec<u64>> {
    let mut primes = Vec::new();
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            q /= d;
            if q % d == 0 {
                return None;
            }
            primes.push(d);
        }
        d += 1;
    }
    if q > 1 {
        primes.push(q);
    }
    Some(primes)
}

/// `μ²(q) ∏_{p | q} ω / (p^e - ω)` as a numerator/denominator pair.
fn weight_parts(q: u64, profile: &OmegaProfile, e: u32) -> Result<Option<(BigUint, BigUint)>> {
    let Some(primes) = factor_squarefree(q) else { return Ok(None) };
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for p in primes {
        let w = profile.omega_at(p, e)?;
        num *= w;
        den *= checked_pow(p, e).expect("checked in omega") - w;
    }
    Ok(Some((num, den)))
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn weight(q: u64, profile: &OmegaProfile, flavor: Flavor) -> Result<BigRational> {
    if q == 0 {
        return Err(Error::Argument("q must be at least 1".into()));
    }
    Ok(match weight_parts(q, profile, flavor.exponent(profile))? {
        Some((n, d)) => ratio(n, d),
        None => BigRational::zero(),
    })
}

/// `h(q) = μ²(q) ∏_{p | q} ω(p^k) / (p^k - ω(p^k))`, exactly.
pub fn h_weight(q: u64, profile: &OmegaProfile) -> Result<BigRational> {
    weight(q, profile, Flavor::Power)
}

/// Running sums `Σ_{q <= Q} h(q)` for `Q = 1, 2, …`.
///
/// The sum is kept over the common denominator `∏ (p^e - ω)` of the primes seen so
/// far, so each step is one exact division instead of a rational normalization.
pub struct HSums<'a> {
    profile: &'a OmegaProfile,
    exponent: u32,
    next_q: u64,
    numerator: BigUint,
    denominator: BigUint,
    /// primes dividing the current denominator, with their factor
    seen: BTreeMap<u64, u64>,
}

impl<'a> HSums<'a> {
    pub fn new(profile: &'a OmegaProfile, flavor: Flavor) -> Self {
        HSums {
            profile,
            exponent: flavor.exponent(profile),
            next_q: 1,
            numerator: BigUint::zero(),
            denominator: BigUint::one(),
            seen: BTreeMap::new(),
        }
    }

    fn step(&mut self) -> Result<HSum> {
        let q = self.next_q;
        self.next_q += 1;
        if let Some(primes) = factor_squarefree(q) {
            let mut num = BigUint::one();
            let mut den = BigUint::one();
            for &p in &primes {
                let w = self.profile.omega_at(p, self.exponent)?;
                let f = checked_pow(p, self.exponent).expect("checked in omega") - w;
                if let std::collections::btree_map::Entry::Vacant(v) = self.seen.entry(p) {
                    v.insert(f);
                    self.numerator *= f;
                    self.denominator *= f;
                }
                num *= w;
                den *= f;
            }
            self.numerator += &self.denominator / den * num;
        }
        Ok(HSum { q, numerator: self.numerator.clone(), denominator: self.denominator.clone() })
    }
}

impl Iterator for HSums<'_> {
    type Item = Result<HSum>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.step())
    }
}

/// `Σ_{q' <= q} h(q')` as an unreduced fraction.
#[derive(Clone, Debug)]
pub struct HSum {
    pub q: u64,
    numerator: BigUint,
    denominator: BigUint,
}

impl HSum {
    pub fn to_rational(&self) -> BigRational {
        ratio(self.numerator.clone(), self.denominator.clone())
    }

    pub fn to_f64(&self) -> f64 {
        // no gcd reduction: the denominator grows to thousands of bits
        BigRational::new_raw(BigInt::from(self.numerator.clone()), BigInt::from(self.denominator.clone()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    /// Exact comparison with another partial sum, without reducing either fraction.
    pub fn cmp_value(&self, other: &HSum) -> std::cmp::Ordering {
        (&self.numerator * &other.denominator).cmp(&(&other.numerator * &self.denominator))
    }
}

fn h_sum_flavored(q_max: u64, profile: &OmegaProfile, flavor: Flavor) -> Result<BigRational> {
    if q_max == 0 {
        return Err(Error::Argument("Q must be at least 1".into()));
    }
    let mut sums = HSums::new(profile, flavor);
    let mut last = None;
    for _ in 0..q_max {
        last = Some(sums.step()?);
    }
    Ok(last.expect("q_max >= 1").to_rational())
}

/// `Σ_{q <= Q} h(q)`, exactly.
pub fn h_sum(q_max: u64, profile: &OmegaProfile) -> Result<BigRational> {
    h_sum_flavored(q_max, profile, Flavor::Power)
}

#[derive(Clone, Debug)]
pub struct SieveBoundQuery {
    pub n: u64,
    pub q: u64,
    pub profile: OmegaProfile,
    pub flavor: Flavor,
    /// Start offset `M` of the interval `[M + 1, M + N]`; the bound does not depend on it.
    pub offset: Option<i64>,
}

fn numerator(n: u64, q: u64, flavor: Flavor, profile: &OmegaProfile) -> BigRational {
    let e = match flavor {
        Flavor::Linear => 2,
        Flavor::Power => 2 * profile.power,
    };
    BigRational::from_integer(BigInt::from(n) + BigInt::from(q).pow(e))
}

/// `(N + Q^2) / Σ h` or `(N + Q^(2k)) / Σ h`.
pub fn sieve_bound(query: &SieveBoundQuery) -> Result<BigRational> {
    check_power(query.profile.power)?;
    if query.n == 0 || query.q == 0 {
        return Err(Error::Argument("N and Q must be at least 1".into()));
    }
    let sum = h_sum_flavored(query.q, &query.profile, query.flavor)?;
    Ok(numerator(query.n, query.q, query.flavor, &query.profile) / sum)
}

/// The `Q` in `range` giving the smallest bound (smallest such `Q` on ties).
pub fn optimize_q(
    n: u64,
    profile: &OmegaProfile,
    flavor: Flavor,
    range: RangeInclusive<u64>,
) -> Result<(u64, BigRational)> {
    check_power(profile.power)?;
    let (lo, hi) = (*range.start(), *range.end());
    if lo == 0 || lo > hi || n == 0 {
        return Err(Error::Argument(format!("invalid Q range {lo}..={hi} or N = {n}")));
    }
    let mut best: Option<(u64, BigRational)> = None;
    for sum in HSums::new(profile, flavor).take(hi as usize) {
        let sum = sum?;
        if sum.q < lo {
            continue;
        }
        let bound = numerator(n, sum.q, flavor, profile) / sum.to_rational();
        if best.as_ref().is_none_or(|(_, b)| bound < *b) {
            best = Some((sum.q, bound));
        }
    }
    Ok(best.expect("nonempty range"))
}

/// Both sides of `Σ_{1 <= a < p^k} |S(a/p^k)|^2 >= ω/(p^k - ω) |S(0)|^2`, and the
/// Plancherel identity for the Fourier coefficients of `ν = ω - p^k 1_S`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqSieveCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// `Σ_{1 <= a < p^k} |c_a|^2`
    pub plancherel_sum: f64,
    /// `(p^k - ω) ω`
    pub plancherel_expected: f64,
    pub plancherel_holds: bool,
}

pub const SQSIEVE_TOLERANCE: f64 = 1e-9;

fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * x)
}

/// Evaluate the per-prime inequality for coefficients `a_n` on `n = start, start + 1, …`
/// with the classes `removed` (residues modulo `p^k`) taken out.
pub fn verify_sqsieve_inequality(
    p: u64,
    k: u32,
    removed: &[u64],
    start: i64,
    coefficients: &[Complex64],
) -> Result<SqSieveCheck> {
    let q = checked_pow(p, k).ok_or(Error::Argument("modulus overflow".into()))?;
    let mut in_s = vec![false; q as usize];
    for &r in removed {
        if r >= q {
            return Err(Error::Argument(format!("class {r} is not reduced modulo {q}")));
        }
        in_s[r as usize] = true;
    }
    let omega = in_s.iter().filter(|&&b| b).count() as u64;
    if omega >= q {
        return Err(Error::Argument("every class is removed".into()));
    }
    let class_of = |i: usize| (start + i as i64).rem_euclid(q as i64) as usize;
    for (i, c) in coefficients.iter().enumerate() {
        if *c != Complex64::zero() && in_s[class_of(i)] {
            return Err(Error::Argument(format!(
                "coefficient at n = {} lies in a removed class",
                start + i as i64
            )));
        }
    }
    // S(a/q) only depends on the coefficient mass per class
    let mut mass = vec![Complex64::zero(); q as usize];
    for (i, c) in coefficients.iter().enumerate() {
        mass[class_of(i)] += c;
    }
    let sum_at = |a: u64| -> Complex64 {
        mass.iter()
            .enumerate()
            .map(|(r, m)| m * e((a as f64) * (r as f64) / q as f64))
            .sum()
    };
    let lhs: f64 = (1..q).map(|a| sum_at(a).norm_sqr()).sum();
    let s0 = sum_at(0).norm_sqr();
    let rhs = omega as f64 / (q - omega) as f64 * s0;
    let holds = lhs >= rhs - SQSIEVE_TOLERANCE * rhs.abs().max(1.0);

    let nu: Vec<f64> = in_s.iter().map(|&s| omega as f64 - if s { q as f64 } else { 0.0 }).collect();
    let plancherel_sum: f64 = (1..q)
        .map(|a| {
            let c: Complex64 = nu
                .iter()
                .enumerate()
                .map(|(r, v)| v * e(-(((a * r as u64) % q) as f64) / q as f64))
                .sum::<Complex64>()
                / q as f64;
            c.norm_sqr()
        })
        .sum();
    let plancherel_expected = ((q - omega) * omega) as f64;
    let plancherel_holds = (plancherel_sum - plancherel_expected).abs()
        <= SQSIEVE_TOLERANCE * plancherel_expected.abs().max(1.0);
    Ok(SqSieveCheck { lhs, rhs, holds, plancherel_sum, plancherel_expected, plancherel_holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn weights() {
        let one = OmegaProfile::constant_one(2);
        assert_eq!(h_weight(1, &one).unwrap(), frac(1, 1));
        assert_eq!(h_weight(2, &one).unwrap(), frac(1, 3));
        assert_eq!(h_weight(4, &one).unwrap(), frac(0, 1));
        assert_eq!(h_weight(6, &one).unwrap(), frac(1, 24));
        assert_eq!(h_sum(1, &one).unwrap(), frac(1, 1));
        assert_eq!(h_sum(3, &one).unwrap(), frac(35, 24));
        assert_eq!(h_sum(2, &OmegaProfile::es_sumfree(2)).unwrap(), frac(4, 1));
        let bad = OmegaProfile { power: 2, rule: OmegaRule::Table([(2, 4)].into()) };
        assert!(matches!(h_weight(2, &bad), Err(Error::Domain(_))));
    }

    #[test]
    fn es_omega_values() {
        assert_eq!(es_omega(2, 2), 3);
        assert_eq!(es_omega(3, 2), 5);
        assert_eq!(es_omega(5, 2), 13);
        assert_eq!(es_omega(2, 3), 5);
    }

    #[test]
    fn es_omega_matches_brute_force() {
        // largest residue set mod q with all s + s' ≠ 0
        for (p, k) in [(2u64, 2u32), (3, 2), (2, 3), (5, 2)] {
            let q = p.pow(k);
            let free = (0..q).filter(|&s| (2 * s) % q != 0).count() as u64;
            assert_eq!(q - free / 2, es_omega(p, k));
        }
    }

    #[test]
    fn bounds() {
        let q = |n, qq, profile: OmegaProfile| SieveBoundQuery {
            n,
            q: qq,
            profile,
            flavor: Flavor::Power,
            offset: None,
        };
        assert_eq!(sieve_bound(&q(100, 2, OmegaProfile::constant_one(2))).unwrap(), frac(87, 1));
        assert_eq!(sieve_bound(&q(16, 2, OmegaProfile::es_sumfree(2))).unwrap(), frac(8, 1));
        assert_eq!(sieve_bound(&q(1, 1, OmegaProfile::constant_one(2))).unwrap(), frac(2, 1));
        let mut shifted = q(100, 2, OmegaProfile::constant_one(2));
        shifted.offset = Some(-17);
        assert_eq!(sieve_bound(&shifted).unwrap(), frac(87, 1));
        let linear = SieveBoundQuery { flavor: Flavor::Linear, ..q(100, 2, OmegaProfile::constant_one(2)) };
        assert_eq!(sieve_bound(&linear).unwrap(), frac(52, 1));
    }

    #[test]
    fn optimizer() {
        let one = OmegaProfile::constant_one(2);
        assert_eq!(optimize_q(100, &one, Flavor::Power, 1..=4).unwrap(), (2, frac(87, 1)));
        assert_eq!(optimize_q(1, &one, Flavor::Power, 1..=2).unwrap(), (1, frac(2, 1)));
        let q3 = sieve_bound(&SieveBoundQuery {
            n: 100,
            q: 3,
            profile: one.clone(),
            flavor: Flavor::Power,
            offset: None,
        })
        .unwrap();
        assert_eq!(q3, frac(181 * 24, 35));
        let (qstar, bound) = optimize_q(10_000, &OmegaProfile::es_sumfree(2), Flavor::Power, 1..=12).unwrap();
        assert!((1..=12).contains(&qstar));
        assert!(bound.to_f64().unwrap() < 10_000.0);
    }

    #[test]
    fn multiplicative() {
        let one = OmegaProfile::constant_one(2);
        let es = OmegaProfile::es_sumfree(2);
        for profile in [&one, &es] {
            for q1 in 1u64..=100 {
                for q2 in 1..=10_000 / q1 {
                    if num_integer::gcd(q1, q2) != 1 {
                        continue;
                    }
                    let a = h_weight(q1, profile).unwrap();
                    let b = h_weight(q2, profile).unwrap();
                    assert_eq!(h_weight(q1 * q2, profile).unwrap(), a * b, "{q1} {q2}");
                }
            }
        }
    }

    #[test]
    fn running_sums_match_direct_sums() {
        let one = OmegaProfile::constant_one(2);
        let mut direct = BigRational::zero();
        for (q, s) in (1..=300).zip(HSums::new(&one, Flavor::Power)) {
            direct += h_weight(q, &one).unwrap();
            assert_eq!(s.unwrap().to_rational(), direct);
        }
    }

    #[test]
    fn h_sum_approaches_zeta_two() {
        let one = OmegaProfile::constant_one(2);
        let target = std::f64::consts::PI.powi(2) / 6.0;
        let mut prev: Option<HSum> = None;
        for s in HSums::new(&one, Flavor::Power).take(10_000) {
            let s = s.unwrap();
            let v = s.to_f64();
            if let Some(p) = &prev {
                assert_ne!(s.cmp_value(p), std::cmp::Ordering::Less);
            }
            assert!(v <= target);
            assert!(target - v <= 4.0 / s.q as f64);
            prev = Some(s);
        }
    }

    #[test]
    fn hand_case_is_equality() {
        let ones = [Complex64::new(1.0, 0.0); 3];
        let c = verify_sqsieve_inequality(2, 2, &[0], 1, &ones).unwrap();
        assert!((c.lhs - 3.0).abs() < 1e-12 && (c.rhs - 3.0).abs() < 1e-12);
        assert!(c.holds && c.plancherel_holds);
        let zeros = [Complex64::zero(); 3];
        let c = verify_sqsieve_inequality(2, 2, &[0], 1, &zeros).unwrap();
        assert_eq!((c.lhs.abs() < 1e-12, c.rhs), (true, 0.0));
        assert!(c.holds);
        assert!(verify_sqsieve_inequality(2, 2, &[0], 0, &ones).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::seq::index::sample;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]
            #[test]
            fn inequality_and_plancherel(seed in any::<u64>(), pick in 0usize..4, k in 2u32..=2) {
                let p = [2u64, 3, 5, 7][pick];
                let q = p.pow(k);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let omega = rng.random_range(1..q);
                let removed: Vec<u64> = sample(&mut rng, q as usize, omega as usize)
                    .into_iter().map(|i| i as u64).collect();
                let start = rng.random_range(-50i64..50);
                let len = rng.random_range(1..(3 * q as usize));
                let coeffs: Vec<Complex64> = (0..len)
                    .map(|i| {
                        let r = (start + i as i64).rem_euclid(q as i64) as u64;
                        if removed.contains(&r) {
                            Complex64::zero()
                        } else {
                            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                        }
                    })
                    .collect();
                let c = verify_sqsieve_inequality(p, k, &removed, start, &coeffs).unwrap();
                prop_assert!(c.holds, "{c:?}");
                prop_assert!(c.plancherel_holds, "{c:?}");
            }
        }
    }
}
