//! Greedy lower bound, the large/small split and the reduction of the large
//! items to one smallest item per profit sub-interval.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{EpsParams, Instance, IntervalIndex, Item};
use crate::rational::{cmp_ratio, Rational};

/// Most efficient item of a list; ties go to the lowest index.
pub fn most_efficient<'a>(items: impl IntoIterator<Item = &'a Item>) -> Option<&'a Item> {
    items.into_iter().fold(None, |best: Option<&Item>, item| match best {
        None => Some(item),
        Some(b) => match cmp_ratio(&item.profit, &item.size, &b.profit, &b.size) {
            Ordering::Greater => Some(item),
            Ordering::Equal if item.index < b.index => Some(item),
            _ => Some(b),
        },
    })
}

/// Knapsack filled with copies of the most efficient item.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Greedy {
    pub item: Item,
    pub copies: u64,
    /// `profit * copies`, at least half of the optimum.
    pub p0: Rational,
}

pub fn greedy_p0(instance: &Instance) -> Result<Greedy> {
    let item = most_efficient(instance.items()).ok_or(Error::EmptyInstance)?;
    let copies = item.copies_within(&Rational::one());
    debug_assert!(copies >= 1);
    Ok(Greedy {
        item: item.clone(),
        copies,
        p0: item.profit.mul_int(copies),
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Partition {
    /// Items with profit at least `T`, in input order.
    pub large: Vec<Item>,
    /// Most efficient item with profit below `T`.
    pub small_best: Option<Item>,
    /// First item whose profit equals `2 p0`; alone it is optimal.
    pub two_p0_item: Option<Item>,
}

pub fn partition_items(instance: &Instance, params: &EpsParams) -> Partition {
    let two_p0 = params.p0.mul_int(2);
    let mut partition = Partition::default();
    let mut small = Vec::new();
    for item in instance.items() {
        if item.profit >= params.t {
            if partition.two_p0_item.is_none() && item.profit == two_p0 {
                partition.two_p0_item = Some(item.clone());
            }
            partition.large.push(item.clone());
        } else {
            small.push(item);
        }
    }
    partition.small_best = most_efficient(small).cloned();
    partition
}

/// One representative per profit sub-interval.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReducedLargeSet {
    pub slots: BTreeMap<IntervalIndex, Item>,
}

impl ReducedLargeSet {
    pub fn count(&self) -> usize {
        self.slots.len()
    }

    pub fn items(&self) -> impl Iterator<Item = &Item> {
        self.slots.values()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}

/// Keeps the smallest item of every sub-interval in one pass.
///
/// Items outside `[T, 2 p0)` are skipped; the solver handles a `2 p0` item
/// before reduction. Equal sizes keep the item seen first.
pub fn reduce_large(large: &[Item], params: &EpsParams) -> ReducedLargeSet {
    let mut slots: BTreeMap<IntervalIndex, Item> = BTreeMap::new();
    for item in large {
        let Ok(idx) = params.interval_index(&item.profit) else {
            continue;
        };
        match slots.get(&idx) {
            Some(incumbent) if incumbent.size <= item.size => {}
            _ => {
                slots.insert(idx, item.clone());
            }
        }
    }
    debug_assert!(slots.len() <= params.max_reduced_slots());
    ReducedLargeSet { slots }
}
