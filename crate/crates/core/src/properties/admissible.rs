use std::collections::BTreeMap;

use super::set::FiniteSet;
use crate::error::{Error, Result};
use crate::sieve::arith::{checked_pow, iroot};
use crate::sieve::{check_power, PrimeTable, ResidueClass};

/// Explicit avoided classes for the small primes, plus the pigeonhole argument for the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AvoidanceCertificate {
    power: u32,
    explicit: BTreeMap<u64, ResidueClass>,
    prime_bound: u64,
    set_size: usize,
}

impl AvoidanceCertificate {
    pub fn power(&self) -> u32 {
        self.power
    }

    /// Prime `p` → avoided class modulo `p^k`, for every prime up to [`prime_bound`](Self::prime_bound).
    pub fn explicit(&self) -> &BTreeMap<u64, ResidueClass> {
        &self.explicit
    }

    pub fn class_for(&self, p: u64) -> Option<ResidueClass> {
        self.explicit.get(&p).copied()
    }

    pub fn prime_bound(&self) -> u64 {
        self.prime_bound
    }

    /// Why primes beyond the explicit range need no entry.
    pub fn automatic_note(&self) -> String {
        format!(
            "every prime p > {} has p^{} > {} = |A|, so some class modulo p^{} is avoided by pigeonhole",
            self.prime_bound, self.power, self.set_size, self.power
        )
    }

    /// Re-check every explicit entry against `set` by enumeration.
    pub fn verify(&self, set: &FiniteSet) -> bool {
        self.explicit
            .values()
            .all(|class| set.residues(class.modulus()).iter().all(|&r| r != class.residue()))
    }
}

/// Smallest avoided class modulo `p^k` for each prime `p <= max(prime_bound, |A|^(1/k))`.
///
/// Occupying all `p^k` classes takes at least `p^k` elements, so only primes with
/// `p^k <= |A|` can block admissibility; the smallest such blocking prime is reported
/// as [`Error::NotAdmissible`].
pub fn admissibility_certificate(
    set: &FiniteSet,
    k: u32,
    prime_bound: u64,
) -> Result<AvoidanceCertificate> {
    check_power(k)?;
    let bound = prime_bound.max(iroot(set.len() as u64, k));
    if checked_pow(bound, k).is_none() {
        return Err(Error::Argument(format!("prime bound {bound} makes p^{k} overflow 64 bits")));
    }
    let table = PrimeTable::new(bound)?;
    let mut explicit = BTreeMap::new();
    for &p in table.primes() {
        let modulus = checked_pow(p, k).expect("bounded above");
        let residue = smallest_avoided(set, modulus)
            .ok_or(Error::NotAdmissible { prime: p, modulus })?;
        explicit.insert(p, ResidueClass::new(residue, modulus)?);
    }
    Ok(AvoidanceCertificate { power: k, explicit, prime_bound: bound, set_size: set.len() })
}

pub(crate) fn smallest_avoided(set: &FiniteSet, modulus: u64) -> Option<u64> {
    let mut residues = set.residues(modulus);
    residues.sort_unstable();
    residues.dedup();
    let gap = residues.iter().enumerate().find(|(i, &r)| r != *i as u64).map(|(i, _)| i as u64);
    match gap {
        Some(r) => Some(r),
        None if (residues.len() as u64) < modulus => Some(residues.len() as u64),
        None => None,
    }
}

/// Is `set` admissible for the power `k`?
pub fn is_admissible(set: &FiniteSet, k: u32) -> Result<bool> {
    match admissibility_certificate(set, k, 1) {
        Ok(_) => Ok(true),
        Err(Error::NotAdmissible { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::properties::NamedSequence;

    fn set(v: &[u64]) -> FiniteSet {
        FiniteSet::from_u64s(v).unwrap()
    }

    #[test]
    fn examples() {
        let cert = admissibility_certificate(&NamedSequence::A1.prefix(5), 2, 3).unwrap();
        assert_eq!(cert.class_for(2), Some(ResidueClass::new(0, 4).unwrap()));
        assert_eq!(cert.class_for(3), Some(ResidueClass::new(1, 9).unwrap()));
        assert!(cert.verify(&NamedSequence::A1.prefix(5)));

        assert_eq!(
            admissibility_certificate(&set(&[1, 2, 3, 4]), 2, 2),
            Err(Error::NotAdmissible { prime: 2, modulus: 4 })
        );

        let single = admissibility_certificate(&set(&[7]), 2, 2).unwrap();
        assert_eq!(single.class_for(2), Some(ResidueClass::new(0, 4).unwrap()));
        assert!(single.automatic_note().contains("pigeonhole"));
    }

    #[test]
    fn explicit_range_covers_set_size() {
        let s = set(&(0..20).map(|i| 1 + 6 * i).collect::<Vec<_>>());
        let cert = admissibility_certificate(&s, 2, 1).unwrap();
        assert_eq!(cert.explicit().keys().copied().collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(cert.class_for(3), Some(ResidueClass::new(0, 9).unwrap()));
        assert!(!is_admissible(&set(&(1..=9).collect::<Vec<_>>()), 2).unwrap());
    }

    #[test]
    fn smallest_gap() {
        assert_eq!(smallest_avoided(&set(&[1, 2, 3]), 4), Some(0));
        assert_eq!(smallest_avoided(&set(&[1, 4, 6]), 4), Some(3));
        assert_eq!(smallest_avoided(&set(&[4, 5, 6, 7]), 4), None);
        assert_eq!(smallest_avoided(&FiniteSet::empty(), 9), Some(0));
    }

    fn occupancy_oracle(elements: &[u64], k: u32) -> Option<u64> {
        // smallest p with p^k <= |A| whose classes are all hit
        (2u64..)
            .filter(|p| (2..*p).all(|d| p % d != 0))
            .take_while(|p| p.pow(k) <= elements.len() as u64)
            .find(|p| {
                let q = p.pow(k);
                (0..q).all(|r| elements.iter().any(|a| a % q == r))
            })
    }

    mod props {
        use super::*;
        use proptest::collection::btree_set;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn blocking_prime_matches_occupancy(elems in btree_set(1u64..200, 0..=30), k in 2u32..=3) {
                let v: Vec<u64> = elems.into_iter().collect();
                let s = set(&v);
                match admissibility_certificate(&s, k, 7) {
                    Ok(cert) => {
                        prop_assert_eq!(occupancy_oracle(&v, k), None);
                        prop_assert!(cert.verify(&s));
                        for (p, class) in cert.explicit() {
                            prop_assert!(*p <= 7 || p.pow(k) <= v.len() as u64);
                            // smallest avoided residue
                            for r in 0..class.residue() {
                                prop_assert!(v.iter().any(|a| a % class.modulus() == r));
                            }
                        }
                    }
                    Err(Error::NotAdmissible { prime, .. }) => {
                        prop_assert_eq!(occupancy_oracle(&v, k), Some(prime));
                    }
                    Err(e) => prop_assert!(false, "unexpected error {e}"),
                }
            }

            #[test]
            fn admissibility_is_downward_closed(
                elems in btree_set(1u64..2000, 0..=40),
                mask in proptest::collection::vec(any::<bool>(), 40),
            ) {
                // thinning out 0 mod 4, 9, 25 makes most draws admissible
                let v: Vec<u64> = elems
                    .into_iter()
                    .filter(|n| n % 4 != 0 && n % 9 != 0 && n % 25 != 0)
                    .collect();
                let s = set(&v);
                prop_assert!(is_admissible(&s, 2).unwrap());
                let sub = s.filter(|i, _| mask[i]);
                prop_assert!(is_admissible(&sub, 2).unwrap());
            }
        }
    }
}
