use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::suff::CandidateOrder;
use crate::error::{Error, Result};
use crate::sieve::arith::checked_pow;
use crate::sieve::{check_power, kfree_window, zeta, PrimeTable};

pub const DEFAULT_GRID_CAP: u64 = 1 << 20;
pub const DEFAULT_SLICE_CAP: u64 = 1 << 22;

/// Anchors `n_1 < n_2 < …` of the dense property-Q iteration and the set built from them.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DenseQState {
    pub anchors: Vec<u64>,
    pub epsilons: Vec<f64>,
    /// `slices[i]`: the `k`-free `a` in `(n_{i+1}, n_{i+2}]` with `n_{i+2} + a` `k`-free,
    /// or `None` when that range was too long to materialize.
    pub slices: Vec<Option<Vec<u64>>>,
}

impl DenseQState {
    /// Elements of the accumulated set, as far as they were materialized.
    pub fn elements(&self) -> Vec<u64> {
        self.slices.iter().flatten().flatten().copied().collect()
    }
}

#[derive(Clone, Debug)]
pub struct DenseQConfig {
    pub initial_anchor: u64,
    pub epsilon: f64,
    /// Candidates are multiples of `W` in `[x/2, x]`.
    pub x: u64,
    pub order: CandidateOrder,
    /// Largest `R` at which the density ratio is evaluated.
    pub grid_cap: u64,
    /// Largest anchor for which the new slice is listed explicitly.
    pub slice_cap: u64,
    pub k: u32,
}

impl DenseQConfig {
    pub fn new(initial_anchor: u64, x: u64, k: u32) -> Self {
        DenseQConfig {
            initial_anchor,
            epsilon: 0.5,
            x,
            order: CandidateOrder::Increasing,
            grid_cap: DEFAULT_GRID_CAP,
            slice_cap: DEFAULT_SLICE_CAP,
            k,
        }
    }
}

/// Density ratio `|{a k-free <= R : n' + a k-free}| / R` at one grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub r: u64,
    pub ratio: f64,
    /// `1/ζ(k) - ratio`
    pub deficit: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DenseQStep {
    Initialized { anchor: u64 },
    Extended {
        anchor: u64,
        modulus: u64,
        candidates_tried: u64,
        grid: Vec<GridPoint>,
        slice_len: Option<usize>,
    },
}

/// `∏_{p <= n^2} p^k`, or `None` once it exceeds `limit`.
fn primorial_power(n: u64, k: u32, limit: u64) -> Result<Option<u64>> {
    let bound = n.checked_mul(n).ok_or(Error::Argument("anchor too large".into()))?;
    let mut w = 1u64;
    let mut p = 2u64;
    while p <= bound {
        if (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            match checked_pow(p, k).and_then(|q| w.checked_mul(q)) {
                Some(next) if next <= limit => w = next,
                _ => return Ok(None),
            }
        }
        p += 1;
    }
    Ok(Some(w))
}

/// Extend the iteration by one anchor (or seed it from the config when empty).
///
/// The new anchor is a multiple of `W = ∏_{p <= n^2} p^k` in `[x/2, x]`, at least
/// `(len + 1) * n`, for which `n' + a` is `k`-free for every `k`-free `a <= n`; this
/// is checked exactly. The density ratio is only reported, on the grid
/// `R = n, n(1+ε), …` up to `min(n', grid_cap)`.
pub fn dense_q_step(state: &mut DenseQState, cfg: &DenseQConfig) -> Result<DenseQStep> {
    check_power(cfg.k)?;
    let Some(&n) = state.anchors.last() else {
        if cfg.initial_anchor < 1 {
            return Err(Error::Argument("initial anchor must be at least 1".into()));
        }
        state.anchors.push(cfg.initial_anchor);
        return Ok(DenseQStep::Initialized { anchor: cfg.initial_anchor });
    };
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        return Err(Error::Argument(format!("epsilon must lie in (0, 1), got {}", cfg.epsilon)));
    }
    let w = primorial_power(n, cfg.k, cfg.x)?.ok_or_else(|| {
        Error::Argument(format!("the modulus for anchor {n} exceeds x = {}", cfg.x))
    })?;
    let min_anchor = (state.anchors.len() as u64 + 1).saturating_mul(n);
    let lo = cfg.x.div_ceil(2).max(min_anchor).div_ceil(w);
    let hi = cfg.x / w;
    if lo > hi {
        return Err(Error::Argument(format!(
            "no multiple of {w} at least {min_anchor} lies in [x/2, x]"
        )));
    }
    let ordered: Box<dyn Iterator<Item = u64>> = match cfg.order {
        CandidateOrder::Increasing => Box::new(lo..=hi),
        CandidateOrder::Random { seed, draws } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Box::new((0..draws).map(move |_| rng.random_range(lo..=hi)))
        }
    };

    let table = PrimeTable::covering(cfg.x + n, cfg.k)?;
    let base = kfree_window(1, n, cfg.k, &table)?;
    let mut tried = 0u64;
    let mut accepted = None;
    for t in ordered {
        tried += 1;
        let cand = t * w;
        let shifted = kfree_window(cand + 1, n, cfg.k, &table)?;
        if base.flags().and_count(shifted.flags()) == base.count() {
            accepted = Some(cand);
            break;
        }
    }
    let anchor = accepted.ok_or_else(|| {
        Error::Budget(format!("none of {tried} multiples of {w} satisfied the anchor condition"))
    })?;

    let density = 1.0 / zeta(cfg.k);
    let top = anchor.min(cfg.grid_cap);
    let mut grid = Vec::new();
    if top >= n {
        let table = PrimeTable::covering(anchor + top, cfg.k)?;
        let plain = kfree_window(1, top, cfg.k, &table)?;
        let shifted = kfree_window(anchor + 1, top, cfg.k, &table)?;
        let both = plain.flags().and(shifted.flags());
        let mut r = n as f64;
        let mut last = 0;
        while r <= top as f64 {
            let ri = r.floor() as u64;
            if ri != last {
                let ratio = both.count_ones_prefix(ri as usize) as f64 / ri as f64;
                grid.push(GridPoint { r: ri, ratio, deficit: density - ratio });
                last = ri;
            }
            r *= 1.0 + cfg.epsilon;
        }
    }

    let slice = if anchor <= cfg.slice_cap {
        let table = PrimeTable::covering(2 * anchor, cfg.k)?;
        let len = anchor - n;
        let plain = kfree_window(n + 1, len, cfg.k, &table)?;
        let shifted = kfree_window(anchor + n + 1, len, cfg.k, &table)?;
        Some(plain.flags().and(shifted.flags()).ones_iter().map(|i| n + 1 + i as u64).collect::<Vec<_>>())
    } else {
        None
    };
    let slice_len = slice.as_ref().map(Vec::len);
    state.anchors.push(anchor);
    state.epsilons.push(cfg.epsilon);
    state.slices.push(slice);
    Ok(DenseQStep::Extended { anchor, modulus: w, candidates_tried: tried, grid, slice_len })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kfree(n: u64, k: u32) -> bool {
        (2u64..).take_while(|d| d.pow(k) <= n).all(|d| n % d.pow(k) != 0)
    }

    #[test]
    fn empty_state_takes_initial_anchor() {
        let mut st = DenseQState::default();
        let step = dense_q_step(&mut st, &DenseQConfig::new(2, 10_000, 2)).unwrap();
        assert_eq!(step, DenseQStep::Initialized { anchor: 2 });
        assert_eq!(st.anchors, vec![2]);
    }

    #[test]
    fn anchor_two_at_ten_thousand() {
        let mut st = DenseQState::default();
        let cfg = DenseQConfig::new(2, 10_000, 2);
        dense_q_step(&mut st, &cfg).unwrap();
        let step = dense_q_step(&mut st, &cfg).unwrap();
        let DenseQStep::Extended { anchor, modulus, grid, .. } = step else { panic!() };
        assert_eq!(modulus, 36);
        assert_eq!(anchor, 5004);
        assert!(!grid.is_empty());
        let slice = st.slices[0].as_ref().unwrap();
        let expected: Vec<u64> =
            (3..=5004).filter(|&a| kfree(a, 2) && kfree(5004 + a, 2)).collect();
        assert_eq!(slice, &expected);
    }

    #[test]
    fn modulus_explosion_is_reported() {
        let mut st = DenseQState { anchors: vec![4], ..Default::default() };
        let err = dense_q_step(&mut st, &DenseQConfig::new(4, 1_000_000, 2));
        assert!(matches!(err, Err(Error::Argument(_))));
        let step = dense_q_step(&mut st, &DenseQConfig::new(4, 10_000_000_000, 2)).unwrap();
        let DenseQStep::Extended { anchor, modulus, .. } = step else { panic!() };
        assert_eq!(modulus, 30030 * 30030);
        assert_eq!(anchor % modulus, 0);
        assert!((1..=3).all(|a| kfree(anchor + a, 2)));
        assert_eq!(st.slices[0], None);
    }

    #[test]
    fn iterated_anchors_keep_spacing_and_condition() {
        let mut st = DenseQState::default();
        let mut cfg = DenseQConfig::new(2, 2_000_000, 2);
        dense_q_step(&mut st, &cfg).unwrap();
        dense_q_step(&mut st, &cfg).unwrap();
        cfg.order = CandidateOrder::Random { seed: 3, draws: 50 };
        let err = dense_q_step(&mut st, &cfg);
        // anchor 5004 needs primes up to 5004^2: far beyond x
        assert!(matches!(err, Err(Error::Argument(_))));
        let a = &st.anchors;
        for w in a.windows(2).enumerate() {
            let (i, pair) = w;
            assert!(pair[1] >= (i as u64 + 2) * pair[0]);
            assert!((1..=pair[0]).filter(|&x| kfree(x, 2)).all(|x| kfree(pair[1] + x, 2)));
        }
    }
}
