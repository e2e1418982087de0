use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

use super::set::FiniteSet;
use crate::error::{Error, Result};
use crate::sieve::arith::checked_pow;
use crate::sieve::ResidueClass;

/// Largest modulus `p^k` for which [`NamedSequence::certificate`] enumerates residues.
const MAX_CERT_MODULUS: u64 = 1 << 26;

/// The four test sequences `2^j + 1`, `2^j - 1`, `j! + 1` (all `j >= 1`) and `j! - 1` (`j >= 2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedSequence {
    A1,
    A2,
    A3,
    A4,
}

impl NamedSequence {
    pub const ALL: [NamedSequence; 4] =
        [NamedSequence::A1, NamedSequence::A2, NamedSequence::A3, NamedSequence::A4];

    /// Smallest admissible value of the parameter `j`.
    pub fn first_parameter(self) -> u64 {
        match self {
            NamedSequence::A4 => 2,
            _ => 1,
        }
    }

    pub fn oeis_id(self) -> &'static str {
        match self {
            NamedSequence::A1 => "A000051",
            NamedSequence::A2 => "A000225",
            NamedSequence::A3 => "A038507",
            NamedSequence::A4 => "A033312",
        }
    }

    /// The term with parameter `j` (e.g. `2^j + 1`).
    pub fn term(self, j: u64) -> Result<BigUint> {
        if j < self.first_parameter() {
            return Err(Error::Argument(format!(
                "{self} is indexed from j = {}, got {j}",
                self.first_parameter()
            )));
        }
        let two_pow = || BigUint::one() << j;
        let fact = || (2..=j).fold(BigUint::one(), |acc, i| acc * i);
        Ok(match self {
            NamedSequence::A1 => two_pow() + 1u32,
            NamedSequence::A2 => two_pow() - 1u32,
            NamedSequence::A3 => fact() + 1u32,
            NamedSequence::A4 => fact() - 1u32,
        })
    }

    /// The `i`-th term counting from 1.
    pub fn nth(self, i: u64) -> Result<BigUint> {
        if i == 0 {
            return Err(Error::Argument("sequence positions start at 1".into()));
        }
        self.term(i - 1 + self.first_parameter())
    }

    /// The first `count` terms.
    pub fn prefix(self, count: usize) -> FiniteSet {
        let terms = (1..=count as u64).map(|i| self.nth(i).expect("positive index")).collect();
        FiniteSet::new(terms).expect("named sequences strictly increase")
    }

    /// A class modulo `p^k` that no term of the whole infinite sequence occupies.
    ///
    /// The occupied residues are enumerated exactly: `2^j mod p^k` is eventually
    /// periodic, and `j! ≡ 0 (mod p^k)` from some `j` on, after which every term is
    /// `±1`. For `A1`/`A2` the closed-form classes (`0 mod 2^k` and `1 mod p^k`,
    /// resp. `2 mod 2^k` and `-1 mod p^k`) are returned; for `A3`/`A4` the smallest
    /// avoided residue.
    pub fn certificate(self, p: u64, k: u32) -> Result<ResidueClass> {
        let m = checked_pow(p, k)
            .filter(|&m| m <= MAX_CERT_MODULUS)
            .ok_or_else(|| Error::Argument(format!("modulus {p}^{k} is too large")))?;
        if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return Err(Error::Argument(format!("{p} is not prime")));
        }
        let occupied = self.occupied_residues(m);
        let preferred = match self {
            NamedSequence::A1 if p == 2 => Some(0),
            NamedSequence::A1 => Some(1),
            NamedSequence::A2 if p == 2 => Some(2 % m),
            NamedSequence::A2 => Some(m - 1),
            _ => None,
        };
        let choice = preferred
            .filter(|&b| !occupied[b as usize])
            .or_else(|| occupied.iter().position(|&o| !o).map(|b| b as u64))
            .ok_or_else(|| Error::NotAdmissible { prime: p, modulus: m })?;
        Ok(ResidueClass::new(choice, m)?)
    }

    fn occupied_residues(self, m: u64) -> Vec<bool> {
        let mut occupied = vec![false; m as usize];
        let mut mark = |v: u64, plus: bool| {
            let r = if plus { (v + 1) % m } else { (v + m - 1) % m };
            occupied[r as usize] = true;
        };
        match self {
            NamedSequence::A1 | NamedSequence::A2 => {
                let plus = self == NamedSequence::A1;
                let mut seen = vec![false; m as usize];
                let mut v = 2 % m;
                while !seen[v as usize] {
                    seen[v as usize] = true;
                    mark(v, plus);
                    v = v * 2 % m;
                }
            }
            NamedSequence::A3 | NamedSequence::A4 => {
                let plus = self == NamedSequence::A3;
                let start = self.first_parameter();
                let mut f = 1 % m;
                let mut j = 0u64;
                loop {
                    j += 1;
                    f = (f as u128 * j as u128 % m as u128) as u64;
                    if j >= start {
                        mark(f, plus);
                        if f == 0 {
                            break;
                        }
                    }
                }
            }
        }
        occupied
    }
}

impl fmt::Display for NamedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NamedSequence::A1 => "A1",
            NamedSequence::A2 => "A2",
            NamedSequence::A3 => "A3",
            NamedSequence::A4 => "A4",
        };
        f.write_str(s)
    }
}

impl FromStr for NamedSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A1" | "A000051" => Ok(NamedSequence::A1),
            "A2" | "A000225" => Ok(NamedSequence::A2),
            "A3" | "A038507" => Ok(NamedSequence::A3),
            "A4" | "A033312" => Ok(NamedSequence::A4),
            _ => Err(Error::Argument(format!("unknown sequence tag {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::properties::set::residue;

    fn terms(tag: NamedSequence, n: usize) -> Vec<u64> {
        tag.prefix(n).to_u64s().unwrap()
    }

    #[test]
    fn prefixes() {
        assert_eq!(terms(NamedSequence::A1, 5), vec![3, 5, 9, 17, 33]);
        assert_eq!(terms(NamedSequence::A2, 5), vec![1, 3, 7, 15, 31]);
        assert_eq!(terms(NamedSequence::A3, 5), vec![2, 3, 7, 25, 121]);
        assert_eq!(terms(NamedSequence::A4, 5), vec![1, 5, 23, 119, 719]);
    }

    #[test]
    fn parameter_terms() {
        assert_eq!(NamedSequence::A1.term(5).unwrap(), BigUint::from(33u32));
        assert_eq!(NamedSequence::A3.term(4).unwrap(), BigUint::from(25u32));
        assert_eq!(NamedSequence::A4.term(2).unwrap(), BigUint::from(1u32));
        assert!(matches!(NamedSequence::A4.term(1), Err(Error::Argument(_))));
        assert!(matches!(NamedSequence::A1.term(0), Err(Error::Argument(_))));
        assert_eq!(NamedSequence::A4.nth(1).unwrap(), BigUint::from(1u32));
    }

    #[test]
    fn certificate_examples() {
        let c = |t: NamedSequence, p| t.certificate(p, 2).unwrap();
        assert_eq!(c(NamedSequence::A2, 2), ResidueClass::new(2, 4).unwrap());
        assert_eq!(c(NamedSequence::A2, 3), ResidueClass::new(8, 9).unwrap());
        assert_eq!(c(NamedSequence::A3, 3), ResidueClass::new(0, 9).unwrap());
        assert_eq!(c(NamedSequence::A1, 2), ResidueClass::new(0, 4).unwrap());
        assert_eq!(c(NamedSequence::A1, 5), ResidueClass::new(1, 25).unwrap());
        assert_eq!(c(NamedSequence::A3, 2), ResidueClass::new(0, 4).unwrap());
        assert_eq!(c(NamedSequence::A4, 2), ResidueClass::new(0, 4).unwrap());
        assert!(NamedSequence::A1.certificate(9, 2).is_err());
    }

    #[test]
    fn certificates_hold_on_long_prefixes() {
        // direct check against 120 terms, well past every tail start used here
        for tag in NamedSequence::ALL {
            let prefix = tag.prefix(120);
            for p in [2u64, 3, 5, 7, 11, 13] {
                for k in [2u32, 3] {
                    let class = tag.certificate(p, k).unwrap();
                    for a in prefix.iter() {
                        assert_ne!(residue(a, class.modulus()), class.residue(), "{tag} p={p} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn parse_tags() {
        assert_eq!("a3".parse::<NamedSequence>().unwrap(), NamedSequence::A3);
        assert_eq!("A000225".parse::<NamedSequence>().unwrap(), NamedSequence::A2);
        assert!("A5".parse::<NamedSequence>().is_err());
    }
}
