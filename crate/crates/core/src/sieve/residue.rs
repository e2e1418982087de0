use std::fmt;

use num_integer::Integer;

use super::arith::mod_inverse;
use super::SieveError;

/// The residue class `residue (mod modulus)` with `0 <= residue < modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueClass {
    residue: u64,
    modulus: u64,
}

impl ResidueClass {
    pub fn new(residue: u64, modulus: u64) -> Result<Self, SieveError> {
        if modulus == 0 {
            return Err(SieveError::Argument("modulus must be at least 1".into()));
        }
        if residue >= modulus {
            return Err(SieveError::Argument(format!(
                "residue {residue} is not below modulus {modulus}"
            )));
        }
        Ok(ResidueClass { residue, modulus })
    }

    /// Class of an arbitrary signed integer.
    pub fn of(value: i128, modulus: u64) -> Result<Self, SieveError> {
        if modulus == 0 {
            return Err(SieveError::Argument("modulus must be at least 1".into()));
        }
        Ok(ResidueClass { residue: value.rem_euclid(modulus as i128) as u64, modulus })
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn contains(&self, n: u64) -> bool {
        n % self.modulus == self.residue
    }

    /// Members of the class inside `[lo, hi]`.
    pub fn count_in(&self, lo: u64, hi: u64) -> u64 {
        if lo > hi {
            return 0;
        }
        let m = self.modulus as i128;
        let r = self.residue as i128;
        let upto = |v: i128| Integer::div_floor(&(v - r), &m);
        (upto(hi as i128) - upto(lo as i128 - 1)) as u64
    }

    /// Smallest member `>= from`.
    pub fn first_at_least(&self, from: u64) -> Option<u64> {
        let offset = (self.residue + self.modulus - from % self.modulus) % self.modulus;
        from.checked_add(offset)
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.residue, self.modulus)
    }
}

/// Intersect classes with pairwise coprime moduli into a single class modulo their product.
pub fn crt_combine(classes: &[ResidueClass]) -> Result<ResidueClass, SieveError> {
    let (first, rest) = classes
        .split_first()
        .ok_or_else(|| SieveError::Argument("no residue classes to combine".into()))?;
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i + 1..] {
            if a.modulus.gcd(&b.modulus) != 1 {
                return Err(SieveError::Argument(format!(
                    "moduli {} and {} are not coprime",
                    a.modulus, b.modulus
                )));
            }
        }
    }
    let mut acc = *first;
    for c in rest {
        let m = acc
            .modulus
            .checked_mul(c.modulus)
            .ok_or(SieveError::Overflow("combined modulus exceeds u64"))?;
        // acc.residue + acc.modulus * t ≡ c.residue (mod c.modulus)
        let inv = mod_inverse(acc.modulus % c.modulus, c.modulus).expect("coprime moduli");
        let diff = (c.residue as i128 - acc.residue as i128).rem_euclid(c.modulus as i128) as u128;
        let t = diff * inv as u128 % c.modulus as u128;
        let r = (acc.residue as u128 + acc.modulus as u128 * t) % m as u128;
        acc = ResidueClass { residue: r as u64, modulus: m };
    }
    Ok(acc)
}

/// Integers in `[lo, hi]` lying in every class (empty interval when `lo = hi + 1`).
pub fn count_class_in_interval(lo: u64, hi: u64, classes: &[ResidueClass]) -> Result<u64, SieveError> {
    if lo > hi.saturating_add(1) {
        return Err(SieveError::Argument(format!("interval [{lo}, {hi}] is malformed")));
    }
    let class = crt_combine(classes)?;
    Ok(class.count_in(lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rc(r: u64, m: u64) -> ResidueClass {
        ResidueClass::new(r, m).unwrap()
    }

    #[test]
    fn combine_examples() {
        assert_eq!(crt_combine(&[rc(0, 4), rc(0, 9)]), Ok(rc(0, 36)));
        assert_eq!(crt_combine(&[rc(3, 4), rc(7, 9)]), Ok(rc(7, 36)));
        assert_eq!(crt_combine(&[rc(1, 2), rc(0, 3), rc(0, 5)]), Ok(rc(15, 30)));
        assert!(matches!(crt_combine(&[rc(1, 4), rc(1, 6)]), Err(SieveError::Argument(_))));
        assert!(crt_combine(&[]).is_err());
        assert!(ResidueClass::new(4, 4).is_err());
        assert_eq!(ResidueClass::of(-3, 9), Ok(rc(6, 9)));
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_class_in_interval(1, 10, &[rc(3, 4)]), Ok(2));
        assert_eq!(count_class_in_interval(1, 10, &[rc(0, 1)]), Ok(10));
        assert_eq!(count_class_in_interval(1, 10, &[rc(3, 4), rc(3, 9)]), Ok(1));
        assert_eq!(count_class_in_interval(11, 10, &[rc(0, 1)]), Ok(0));
        assert!(count_class_in_interval(12, 10, &[rc(0, 1)]).is_err());
        assert_eq!(count_class_in_interval(0, 0, &[rc(0, 7)]), Ok(1));
    }

    #[test]
    fn first_member() {
        assert_eq!(rc(7, 36).first_at_least(128), Some(151));
        assert_eq!(rc(7, 36).first_at_least(151), Some(151));
        assert_eq!(rc(0, 5).first_at_least(0), Some(0));
    }

    #[test]
    fn combine_exhaustive_small_products() {
        // every pair of coprime moduli with product <= 10^4 (sampled residues)
        for m1 in 1u64..=100 {
            for m2 in 1u64..=(10_000 / m1).min(100) {
                if m1.gcd(&m2) != 1 {
                    continue;
                }
                for (r1, r2) in [(0, 0), (m1 - 1, m2 - 1), (m1 / 2, m2 / 3)] {
                    let c = crt_combine(&[rc(r1, m1), rc(r2, m2)]).unwrap();
                    assert_eq!(c.modulus(), m1 * m2);
                    assert_eq!(c.residue() % m1, r1);
                    assert_eq!(c.residue() % m2, r2);
                }
            }
        }
    }

    #[test]
    fn combine_recovers_every_residue() {
        for m1 in 2u64..=60 {
            for m2 in m1 + 1..=(2_000 / m1) {
                if m1.gcd(&m2) != 1 {
                    continue;
                }
                for r in 0..m1 * m2 {
                    let c = crt_combine(&[rc(r % m1, m1), rc(r % m2, m2)]).unwrap();
                    assert_eq!(c, rc(r, m1 * m2));
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn count_respects_lemma_bound(
                lo in 0u64..10_000, len in 0u64..5_000,
                r1 in 0u64..1000, r2 in 0u64..1000,
                pick in 0usize..6,
            ) {
                let pairs = [(4u64, 9u64), (4, 25), (9, 49), (8, 27), (25, 121), (1, 169)];
                let (m1, m2) = pairs[pick];
                let classes = [rc(r1 % m1, m1), rc(r2 % m2, m2)];
                let hi = lo + len;
                let count = count_class_in_interval(lo, hi, &classes).unwrap();
                let brute = (lo..=hi).filter(|n| classes.iter().all(|c| c.contains(*n))).count() as u64;
                prop_assert_eq!(count, brute);
                prop_assert!(count <= (hi - lo + 1) / (m1 * m2) + 1);
            }
        }
    }
}
