use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::rational::Rational;

/// Multiset of original items, keyed by input index, with cached totals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolutionMultiset {
    counts: BTreeMap<usize, u64>,
    total_profit: Rational,
    total_size: Rational,
}

impl SolutionMultiset {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a multiset whose totals are recomputed from `instance`.
    pub fn from_counts(counts: BTreeMap<usize, u64>, instance: &Instance) -> Result<Self> {
        let mut total_profit = Rational::zero();
        let mut total_size = Rational::zero();
        for (&index, &mult) in &counts {
            let item = instance
                .item(index)
                .ok_or_else(|| Error::Internal(format!("unknown item index {index}")))?;
            total_profit = total_profit + item.profit.mul_int(mult);
            total_size = total_size + item.size.mul_int(mult);
        }
        let counts = counts.into_iter().filter(|&(_, m)| m > 0).collect();
        Ok(SolutionMultiset {
            counts,
            total_profit,
            total_size,
        })
    }

    /// Multiset with totals supplied by the caller, e.g. from a glued item.
    pub(crate) fn with_totals(
        counts: BTreeMap<usize, u64>,
        total_profit: Rational,
        total_size: Rational,
    ) -> Self {
        let counts = counts.into_iter().filter(|&(_, m)| m > 0).collect();
        SolutionMultiset {
            counts,
            total_profit,
            total_size,
        }
    }

    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn multiplicity(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    pub fn total_profit(&self) -> &Rational {
        &self.total_profit
    }

    pub fn total_size(&self) -> &Rational {
        &self.total_size
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Adds `copies` of the item `index`, whose profit and size are given.
    pub fn add(&mut self, index: usize, copies: u64, profit: &Rational, size: &Rational) {
        if copies == 0 {
            return;
        }
        *self.counts.entry(index).or_insert(0) += copies;
        self.total_profit = &self.total_profit + &profit.mul_int(copies);
        self.total_size = &self.total_size + &size.mul_int(copies);
    }

    /// Merges another multiset, `times` times over.
    pub fn absorb(&mut self, other: &SolutionMultiset, times: u64) {
        for (&index, &mult) in &other.counts {
            *self.counts.entry(index).or_insert(0) += mult * times;
        }
        self.total_profit = &self.total_profit + &other.total_profit.mul_int(times);
        self.total_size = &self.total_size + &other.total_size.mul_int(times);
    }

    /// Checks the cached totals against `instance` and the capacity.
    pub fn verify(&self, instance: &Instance) -> Result<()> {
        let fresh = SolutionMultiset::from_counts(self.counts.clone(), instance)?;
        if fresh.total_profit != self.total_profit || fresh.total_size != self.total_size {
            return Err(Error::Internal(format!(
                "certificate totals {}/{} differ from recomputed {}/{}",
                self.total_profit, self.total_size, fresh.total_profit, fresh.total_size
            )));
        }
        if self.total_size > Rational::one() {
            return Err(Error::Internal(format!(
                "certificate size {} exceeds the capacity",
                self.total_size
            )));
        }
        Ok(())
    }
}
