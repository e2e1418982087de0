use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sieve::arith::checked_pow;
use crate::sieve::{check_power, crt_combine, PrimeTable, ResidueClass};

pub const DEFAULT_SCAN_BUDGET: u64 = 1_000_000;

/// Built-in growth functions `f: N -> N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthFn {
    Identity,
    /// `c * j`
    Linear(u64),
    /// `j * max(1, ceil(ln j))`
    JLogJ,
    Constant(u64),
    /// `j^e`
    Power(u32),
}

impl GrowthFn {
    pub fn eval(self, j: u64) -> u64 {
        match self {
            GrowthFn::Identity => j,
            GrowthFn::Linear(c) => c.saturating_mul(j),
            GrowthFn::JLogJ => j.saturating_mul(((j as f64).ln().ceil() as u64).max(1)),
            GrowthFn::Constant(c) => c,
            GrowthFn::Power(e) => j.checked_pow(e).unwrap_or(u64::MAX),
        }
    }
}

impl fmt::Display for GrowthFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthFn::Identity => f.write_str("identity"),
            GrowthFn::Linear(c) => write!(f, "linear:{c}"),
            GrowthFn::JLogJ => f.write_str("jlogj"),
            GrowthFn::Constant(c) => write!(f, "const:{c}"),
            GrowthFn::Power(e) => write!(f, "power:{e}"),
        }
    }
}

impl FromStr for GrowthFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let num = |a: Option<&str>| -> Result<u64> {
            a.ok_or_else(|| Error::Argument(format!("growth function {name} needs a parameter")))?
                .parse()
                .map_err(|_| Error::Argument(format!("bad growth parameter in {s:?}")))
        };
        match name {
            "identity" | "j" => Ok(GrowthFn::Identity),
            "linear" => Ok(GrowthFn::Linear(num(arg)?)),
            "jlogj" => Ok(GrowthFn::JLogJ),
            "const" | "constant" => Ok(GrowthFn::Constant(num(arg)?)),
            "power" => Ok(GrowthFn::Power(num(arg)? as u32)),
            _ => Err(Error::Argument(format!("unknown growth function {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PropertyPConfig {
    pub growth: GrowthFn,
    pub count: usize,
    pub k: u32,
    /// Indices scanned when locating each threshold index.
    pub scan_budget: u64,
}

impl PropertyPConfig {
    pub fn new(growth: GrowthFn, count: usize, k: u32) -> Self {
        PropertyPConfig { growth, count, k, scan_budget: DEFAULT_SCAN_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyPSequence {
    pub terms: Vec<u64>,
    /// `thresholds[r - 1]` is the first index from which `a_j ≡ -r (mod p_r^k)` is imposed.
    pub thresholds: Vec<u64>,
    /// `moduli[r - 1] = (p_1 ⋯ p_r)^k`.
    pub moduli: Vec<u64>,
}

impl PropertyPSequence {
    /// Number of congruence layers active at index `j`.
    pub fn layers_at(&self, j: u64) -> usize {
        self.thresholds.partition_point(|&l| l <= j)
    }
}

/// A sequence with property P growing no faster than `j * f(j)`.
///
/// Layer `r` (modulus `(p_1 ⋯ p_r)^k`) switches on at the smallest index `l_r` from
/// which `f` stays above that modulus up to the scan horizon, kept strictly increasing.
/// Before `l_1` the terms are `1, 2, 3, …`; afterwards each term is the smallest
/// integer above its predecessor with `a_j ≡ -r (mod p_r^k)` for every active layer.
pub fn property_p_sequence(cfg: &PropertyPConfig) -> Result<PropertyPSequence> {
    check_power(cfg.k)?;
    let count = cfg.count as u64;
    let horizon = count.max(cfg.scan_budget).max(1);
    let table = PrimeTable::new(1 << 12)?;
    let mut thresholds = Vec::new();
    let mut moduli = Vec::new();
    let mut modulus = 1u64;
    for (r, &p) in table.primes().iter().enumerate() {
        let Some(next) = checked_pow(p, cfg.k).and_then(|q| q.checked_mul(modulus)) else { break };
        modulus = next;
        if cfg.growth.eval(horizon) < modulus {
            if r == 0 {
                return Err(Error::Budget(format!(
                    "f never reaches {modulus} within {horizon} indices"
                )));
            }
            break;
        }
        let mut start = horizon;
        while start > 1 && cfg.growth.eval(start - 1) >= modulus {
            start -= 1;
        }
        if let Some(&prev) = thresholds.last() {
            start = start.max(prev + 1);
        }
        thresholds.push(start);
        moduli.push(modulus);
        if start > count {
            break;
        }
    }

    let mut terms = Vec::with_capacity(cfg.count);
    let mut classes: Vec<ResidueClass> = Vec::new();
    let mut combined = ResidueClass::new(0, 1)?;
    for j in 1..=count {
        if j <= thresholds[0] {
            terms.push(j);
            continue;
        }
        let layers = thresholds.partition_point(|&l| l <= j);
        while classes.len() < layers {
            let r = classes.len() as u64 + 1;
            let q = checked_pow(table.primes()[classes.len()], cfg.k).expect("fits");
            classes.push(ResidueClass::of(-(r as i128), q)?);
            combined = crt_combine(&classes)?;
        }
        let prev = *terms.last().expect("j > 1");
        let next = combined
            .first_at_least(prev + 1)
            .ok_or(Error::Budget("term exceeds 64 bits".into()))?;
        terms.push(next);
    }
    Ok(PropertyPSequence { terms, thresholds, moduli })
}
