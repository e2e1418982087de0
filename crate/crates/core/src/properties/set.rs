use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A finite, strictly increasing set of positive integers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiniteSet {
    elements: Vec<BigUint>,
}

impl FiniteSet {
    pub fn new(elements: Vec<BigUint>) -> Result<Self> {
        if elements.first().is_some_and(|a| a.is_zero()) {
            return Err(Error::InvalidSet("elements must be at least 1".into()));
        }
        if let Some(w) = elements.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSet(format!(
                "elements must strictly increase, found {} then {}",
                w[0], w[1]
            )));
        }
        Ok(FiniteSet { elements })
    }

    pub fn from_u64s(elements: &[u64]) -> Result<Self> {
        Self::new(elements.iter().map(|&a| BigUint::from(a)).collect())
    }

    pub fn empty() -> Self {
        FiniteSet::default()
    }

    pub fn elements(&self) -> &[BigUint] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn max(&self) -> Option<&BigUint> {
        self.elements.last()
    }

    /// Elements as machine integers, if they all fit.
    pub fn to_u64s(&self) -> Option<Vec<u64>> {
        self.elements.iter().map(|a| a.to_u64()).collect()
    }

    pub fn contains(&self, a: &BigUint) -> bool {
        self.elements.binary_search(a).is_ok()
    }

    /// Residues of all elements modulo `m`, in element order.
    pub fn residues(&self, m: u64) -> Vec<u64> {
        self.elements.iter().map(|a| residue(a, m)).collect()
    }

    /// `A ∩ [x]`.
    pub fn up_to(&self, x: &BigUint) -> FiniteSet {
        let end = self.elements.partition_point(|a| a <= x);
        FiniteSet { elements: self.elements[..end].to_vec() }
    }

    pub fn prefix(&self, count: usize) -> FiniteSet {
        FiniteSet { elements: self.elements[..count.min(self.len())].to_vec() }
    }

    /// Sub-collection picked by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(usize, &BigUint) -> bool) -> FiniteSet {
        FiniteSet {
            elements: self
                .elements
                .iter()
                .enumerate()
                .filter(|(i, a)| keep(*i, a))
                .map(|(_, a)| a.clone())
                .collect(),
        }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigUint> {
        self.elements.iter()
    }
}

pub(crate) fn residue(a: &BigUint, m: u64) -> u64 {
    match a.to_u64() {
        Some(v) => v % m,
        None => (a % m).to_u64().expect("remainder below modulus"),
    }
}
