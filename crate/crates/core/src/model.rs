//! Items, instances, the normalized accuracy parameter and the profit-interval
//! geometry shared by every stage of the solver.

use num::bigint::BigInt;
use num::traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A knapsack item with capacity-normalized size.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Item {
    /// Position of the item in the input list, before any filtering.
    pub index: usize,
    pub profit: Rational,
    pub size: Rational,
}

impl Item {
    pub fn new(index: usize, profit: Rational, size: Rational) -> Result<Self> {
        if profit.is_zero() {
            return Err(Error::InvalidParameter(format!(
                "item {index}: nonpositive profit"
            )));
        }
        if size.is_zero() {
            return Err(Error::InvalidParameter(format!("item {index}: nonpositive size")));
        }
        if profit > Rational::one() {
            return Err(Error::InvalidParameter(format!(
                "item {index}: profit {profit} exceeds 1"
            )));
        }
        if size > Rational::one() {
            return Err(Error::InvalidParameter(format!(
                "item {index}: size {size} exceeds the capacity"
            )));
        }
        if size.recip().floor().to_u64().is_none() {
            return Err(Error::InvalidParameter(format!(
                "item {index}: size {size} too small to count copies in 64 bits"
            )));
        }
        Ok(Item { index, profit, size })
    }

    /// Profit per unit of size.
    pub fn efficiency(&self) -> Rational {
        &self.profit / &self.size
    }

    /// How many copies fit into a knapsack of the given volume.
    pub fn copies_within(&self, volume: &Rational) -> u64 {
        volume
            .div_floor(&self.size)
            .to_u64()
            .expect("copy count bounded at construction")
    }
}

/// Knapsack instance with capacity normalized to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    items: Vec<Item>,
    dropped: usize,
}

impl Instance {
    /// Instance with capacity 1; `items` are `(profit, size)` pairs.
    pub fn new(items: Vec<(Rational, Rational)>) -> Result<Self> {
        Self::with_capacity(&Rational::one(), items)
    }

    /// Divides every size by `capacity`; items that no longer fit are dropped
    /// and counted in [`Instance::dropped`].
    pub fn with_capacity(capacity: &Rational, items: Vec<(Rational, Rational)>) -> Result<Self> {
        if capacity.is_zero() {
            return Err(Error::InvalidParameter("nonpositive capacity".into()));
        }
        let mut kept = Vec::with_capacity(items.len());
        let mut dropped = 0;
        for (index, (profit, size)) in items.into_iter().enumerate() {
            if profit.is_zero() || size.is_zero() {
                // reuse the item validation for the error message
                Item::new(index, profit, size)?;
                unreachable!();
            }
            let size = &size / capacity;
            if size > Rational::one() {
                dropped += 1;
                continue;
            }
            kept.push(Item::new(index, profit, size)?);
        }
        if kept.is_empty() {
            return Err(Error::EmptyInstance);
        }
        Ok(Instance { items: kept, dropped })
    }

    /// Instance from already-built items; indices must be strictly increasing.
    pub fn from_items(items: Vec<Item>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::EmptyInstance);
        }
        if items.windows(2).any(|w| w[0].index >= w[1].index) {
            return Err(Error::InvalidParameter("item indices must increase".into()));
        }
        Ok(Instance { items, dropped: 0 })
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Number of input items discarded because they exceed the capacity.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    /// Looks an item up by its original input index.
    pub fn item(&self, index: usize) -> Option<&Item> {
        self.items
            .binary_search_by_key(&index, |item| item.index)
            .ok()
            .map(|pos| &self.items[pos])
    }
}

/// Position of a profit inside the dyadic interval `k` and its sub-interval
/// `gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalIndex {
    pub k: usize,
    pub gamma: usize,
}

/// Accuracy parameter rounded down to a power of two, together with every
/// constant derived from it and from the greedy bound `p0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsParams {
    pub eps_input: Rational,
    /// `2^(1 - kappa)`.
    pub eps: Rational,
    /// `log2(2 / eps)`, at least 3.
    pub kappa: u32,
    pub p0: Rational,
    /// Large/small profit threshold `eps * p0 / 2`.
    pub t: Rational,
    /// Base sub-interval width `eps * t / (4 (kappa + 1))`.
    pub k_const: Rational,
    /// Number of sub-intervals per dyadic interval, `2^(kappa+1) (kappa+1)`.
    pub gamma_max: usize,
    /// Last regular tuple bucket, `7 (kappa+1) 2^(kappa+1) - 1`.
    pub xi0: usize,
}

impl EpsParams {
    /// Rounds `eps_input` down to the largest `2^(1-kappa) <= min(eps_input, 1/4)`.
    pub fn normalize(eps_input: &Rational, p0: &Rational) -> Result<Self> {
        if eps_input.is_zero() || *eps_input >= Rational::one() {
            return Err(Error::InvalidParameter(format!(
                "epsilon {eps_input} must lie in (0, 1)"
            )));
        }
        if p0.is_zero() {
            return Err(Error::InvalidParameter("p0 must be positive".into()));
        }
        let mut kappa = 3u32;
        while Rational::pow2(1 - kappa as i32) > *eps_input {
            kappa += 1;
        }
        let eps = Rational::pow2(1 - kappa as i32);
        let t = &eps * p0 * Rational::frac(1, 2);
        let k_const = &eps * &t / Rational::from_integer(4 * (kappa + 1));
        let two_k1 = 1usize << (kappa + 1);
        let gamma_max = two_k1 * (kappa as usize + 1);
        Ok(EpsParams {
            eps_input: eps_input.clone(),
            eps,
            kappa,
            p0: p0.clone(),
            t,
            k_const,
            gamma_max,
            xi0: 7 * gamma_max - 1,
        })
    }

    pub fn kappa(&self) -> usize {
        self.kappa as usize
    }

    /// Per-step rounding loss `eps / (4 (kappa + 1))`.
    pub fn step_loss(&self) -> Rational {
        &self.eps / Rational::from_integer(4 * (self.kappa + 1))
    }

    /// `1 - step_loss()`, the factor lost by each rounding stage.
    pub fn step_factor(&self) -> Rational {
        Rational::one() - self.step_loss()
    }

    /// Maximum number of slots in the reduced large-item set.
    pub fn max_reduced_slots(&self) -> usize {
        (self.kappa() + 1) * self.gamma_max
    }

    /// Half-open profit range `[lo, hi)` of a sub-interval.
    pub fn interval_bounds(&self, idx: IntervalIndex) -> (Rational, Rational) {
        let scale = BigInt::one() << idx.k;
        let base = self.t.mul_int(scale.clone());
        let width = self.k_const.mul_int(scale);
        let lo = &base + &width.mul_int(idx.gamma);
        let hi = &lo + &width;
        (lo, hi)
    }

    /// Locates `p` in `[T, 2 p0)`.
    pub fn interval_index(&self, p: &Rational) -> Result<IntervalIndex> {
        let upper = self.p0.mul_int(2);
        if *p < self.t || *p >= upper {
            return Err(Error::OutOfRange {
                value: p.to_string(),
                lower: self.t.to_string(),
                upper: upper.to_string(),
                close: ')',
            });
        }
        let mut k = 0usize;
        let mut lo = self.t.clone();
        while k < self.kappa() {
            let next = lo.mul_int(2);
            if *p < next {
                break;
            }
            lo = next;
            k += 1;
        }
        let width = self.k_const.mul_int(BigInt::one() << k);
        let gamma = (p - &lo).div_floor(&width);
        let gamma = gamma.to_usize().expect("gamma bounded by gamma_max");
        debug_assert!(gamma < self.gamma_max);
        Ok(IntervalIndex { k, gamma })
    }

    /// Lower end `p0 / 4` of the tuple profit range.
    pub fn xi_base(&self) -> Rational {
        self.t.mul_int(BigInt::one() << (self.kappa - 2))
    }

    /// Width `2^(kappa-2) K` of a tuple bucket.
    pub fn xi_width(&self) -> Rational {
        self.k_const.mul_int(BigInt::one() << (self.kappa - 2))
    }

    /// Tuple bucket of `p` in `[p0/4, 2 p0]`; `2 p0` alone maps to `xi0 + 1`.
    pub fn xi_index(&self, p: &Rational) -> Result<usize> {
        let base = self.xi_base();
        let upper = self.p0.mul_int(2);
        if *p < base || *p > upper {
            return Err(Error::OutOfRange {
                value: p.to_string(),
                lower: base.to_string(),
                upper: upper.to_string(),
                close: ']',
            });
        }
        let xi = (p - &base).div_floor(&self.xi_width());
        Ok(xi.to_usize().expect("xi bounded by xi0 + 1"))
    }
}
