//! Level-by-level approximate dynamic program over `(profit, size)` tuples.
//!
//! Level `k` runs from `kappa + 1` (the small-item bundle) down to `0`. Each
//! level first inherits every tuple of the level above, then extends the
//! non-origin tuples above with each item of level `k`; for the top levels
//! `k >= kappa - 2` a single item also forms a tuple on its own. Tuples are
//! kept per profit bucket of width `2^(kappa-2) K` over `[p0/4, 2 p0]`, one
//! smallest tuple per bucket, and dominated tuples are swept out once the
//! level is complete.

use crate::error::{Error, Result};
use crate::gluing::{GluedId, GluedLevels};
use crate::rational::Rational;
use crate::units::Units;

pub type NodeId = usize;

/// The shared `(0, 0)` tuple present at every level.
pub const ORIGIN: NodeId = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Back {
    Origin,
    /// `parent` (a tuple of a higher level) plus one glued item.
    Extend { parent: NodeId, item: GluedId },
    /// A single glued item on its own.
    Single { item: GluedId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleEntry<N> {
    pub profit: N,
    pub size: N,
    /// Level at which the tuple was created; inherited tuples keep it.
    pub level: usize,
    pub back: Back,
}

/// Buckets of one level, indexed by the profit bucket `xi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleLevel {
    pub level: usize,
    buckets: Vec<Option<NodeId>>,
}

impl TupleLevel {
    fn new(level: usize, width: usize) -> Self {
        TupleLevel {
            level,
            buckets: vec![None; width],
        }
    }

    /// Occupied buckets as `(xi, node)` in ascending `xi`, origin excluded.
    pub fn entries(&self) -> impl Iterator<Item = (usize, NodeId)> + '_ {
        self.buckets
            .iter()
            .enumerate()
            .filter_map(|(xi, id)| id.map(|id| (xi, id)))
    }

    /// Number of tuples, the origin included.
    pub fn len(&self) -> usize {
        1 + self.buckets.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bucket(&self, xi: usize) -> Option<NodeId> {
        self.buckets.get(xi).copied().flatten()
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DpStats {
    /// Candidate tuples formed (capacity test passed), singletons included.
    pub tuples_created: u64,
    pub dominance_removals: u64,
}

#[derive(Clone, Debug)]
pub struct DpTable<N> {
    arena: Vec<TupleEntry<N>>,
    /// `levels[k]` for `k = 0..=kappa + 1`.
    levels: Vec<TupleLevel>,
    pub stats: DpStats,
}

impl<N: Units> DpTable<N> {
    pub fn entry(&self, id: NodeId) -> &TupleEntry<N> {
        &self.arena[id]
    }

    pub fn level(&self, k: usize) -> &TupleLevel {
        &self.levels[k]
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// The final tuple set `D(0)`.
    pub fn last(&self) -> &TupleLevel {
        &self.levels[0]
    }

    /// Nodes ever allocated, the origin included.
    pub fn arena_len(&self) -> usize {
        self.arena.len()
    }

    /// All tuples of level `k` as `(profit, size)` units, origin first.
    pub fn tuples(&self, k: usize) -> Vec<(N, N)> {
        std::iter::once(ORIGIN)
            .chain(self.levels[k].entries().map(|(_, id)| id))
            .map(|id| (self.arena[id].profit.clone(), self.arena[id].size.clone()))
            .collect()
    }

    /// Glued items along the backtracking chain of `node`, top level last.
    pub fn backtrack_items(&self, node: NodeId) -> Result<Vec<GluedId>> {
        let mut items = Vec::new();
        let mut current = node;
        loop {
            let entry = &self.arena[current];
            match entry.back {
                Back::Origin => return Ok(items),
                Back::Single { item } => {
                    items.push(item);
                    return Ok(items);
                }
                Back::Extend { parent, item } => {
                    items.push(item);
                    if self.arena[parent].level <= entry.level {
                        return Err(Error::Internal(format!(
                            "backtracking chain not increasing at node {current}"
                        )));
                    }
                    current = parent;
                }
            }
        }
    }
}

pub fn run_dp<N: Units>(glued: &GluedLevels<N>) -> Result<DpTable<N>> {
    let units = &glued.units;
    let kappa = units.kappa;
    let width = units.xi0 + 2;
    let mut arena = vec![TupleEntry {
        profit: N::zero(),
        size: N::zero(),
        level: kappa + 2,
        back: Back::Origin,
    }];
    let mut stats = DpStats::default();
    let mut levels: Vec<TupleLevel> = Vec::with_capacity(kappa + 2);
    let mut above = TupleLevel::new(kappa + 2, width);

    for k in (0..=kappa + 1).rev() {
        let mut current = above.clone();
        current.level = k;
        let mut fresh = vec![false; width];
        let parents: Vec<NodeId> = above.entries().map(|(_, id)| id).collect();

        for item_id in glued.level(k) {
            let item = glued.item(item_id);
            for &parent in &parents {
                let size = arena[parent].size.clone() + item.size.clone();
                // parents are dominance-free, so sizes grow with xi
                if size > units.capacity {
                    break;
                }
                stats.tuples_created += 1;
                let profit = arena[parent].profit.clone() + item.profit.clone();
                let xi = bucket_of(units, &profit)?;
                offer(
                    &mut arena,
                    &mut current,
                    &mut fresh,
                    xi,
                    TupleEntry {
                        profit,
                        size,
                        level: k,
                        back: Back::Extend {
                            parent,
                            item: item_id,
                        },
                    },
                );
            }
            if k + 2 >= kappa {
                stats.tuples_created += 1;
                let xi = bucket_of(units, &item.profit)?;
                offer(
                    &mut arena,
                    &mut current,
                    &mut fresh,
                    xi,
                    TupleEntry {
                        profit: item.profit.clone(),
                        size: item.size.clone(),
                        level: k,
                        back: Back::Single { item: item_id },
                    },
                );
            }
        }

        stats.dominance_removals += remove_dominated(&mut current, &arena) as u64;
        above = current.clone();
        levels.push(current);
    }
    levels.reverse();
    Ok(DpTable {
        arena,
        levels,
        stats,
    })
}

fn bucket_of<N: Units>(units: &crate::units::UnitSystem<N>, profit: &N) -> Result<usize> {
    units.xi_index(profit).ok_or_else(|| {
        Error::Internal(format!(
            "tuple profit {} outside [p0/4, 2 p0]",
            units.profit_value(profit)
        ))
    })
}

/// Stores `entry` in bucket `xi` if the bucket is empty or `entry` is strictly
/// smaller.
fn offer<N: Units>(
    arena: &mut Vec<TupleEntry<N>>,
    level: &mut TupleLevel,
    fresh: &mut [bool],
    xi: usize,
    entry: TupleEntry<N>,
) {
    match level.buckets[xi] {
        Some(id) if entry.size >= arena[id].size => {}
        // Nodes created on this level have no children yet.
        Some(id) if fresh[xi] => arena[id] = entry,
        _ => {
            arena.push(entry);
            level.buckets[xi] = Some(arena.len() - 1);
            fresh[xi] = true;
        }
    }
}

/// Removes dominated tuples in one right-to-left sweep and returns how many
/// were removed. Afterwards sizes strictly increase with `xi`.
pub fn remove_dominated<N: Units>(level: &mut TupleLevel, arena: &[TupleEntry<N>]) -> usize {
    let mut removed = 0;
    let mut min_size: Option<&N> = None;
    for slot in level.buckets.iter_mut().rev() {
        let Some(id) = *slot else { continue };
        let size = &arena[id].size;
        match min_size {
            Some(min) if size >= min => {
                *slot = None;
                removed += 1;
            }
            _ => min_size = Some(size),
        }
    }
    removed
}

/// The same sweep on plain `(profit, size)` pairs sorted by increasing profit.
pub fn remove_dominated_pairs(pairs: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
    let mut kept: Vec<(Rational, Rational)> = Vec::new();
    for pair in pairs.iter().rev() {
        if kept.last().is_none_or(|last| pair.1 < last.1) {
            kept.push(pair.clone());
        }
    }
    kept.reverse();
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EpsParams, Instance, IntervalIndex, Item};
    use crate::gluing::{build_glued_sets, unit_system_for};
    use crate::preprocess::{greedy_p0, partition_items, reduce_large, ReducedLargeSet};

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    fn values(levels: &GluedLevels<i128>, table: &DpTable<i128>, k: usize) -> Vec<(Rational, Rational)> {
        table
            .tuples(k)
            .iter()
            .map(|(p, s)| (levels.units.profit_value(p), levels.units.size_value(s)))
            .collect()
    }

    #[test]
    fn star_trace() {
        let inst = Instance::new(vec![
            (r(1, 2), r(2, 5)),
            (r(3, 10), r(7, 20)),
            (r(3, 50), r(1, 20)),
        ])
        .unwrap();
        let params = EpsParams::normalize(&r(1, 4), &greedy_p0(&inst).unwrap().p0).unwrap();
        let part = partition_items(&inst, &params);
        let red = reduce_large(&part.large, &params);
        let units = unit_system_for(&params, &red, part.small_best.as_ref()).unwrap();
        let levels = build_glued_sets(&red, part.small_best.as_ref(), units);
        let table = run_dp(&levels).unwrap();
        assert_eq!(
            values(&levels, &table, 0),
            vec![
                (r(0, 1), r(0, 1)),
                (r(3, 10), r(1, 4)),
                (r(1, 2), r(2, 5)),
                (r(3, 5), r(3, 5)),
                (r(4, 5), r(13, 20)),
                (r(1, 1), r(4, 5)),
                (r(11, 10), r(1, 1)),
            ]
        );
        assert_eq!(
            values(&levels, &table, 2),
            vec![
                (r(0, 1), r(0, 1)),
                (r(3, 10), r(1, 4)),
                (r(1, 2), r(2, 5)),
                (r(4, 5), r(13, 20)),
                (r(1, 1), r(4, 5)),
            ]
        );
        // (a_eff^c + a1) + a2 backtracks through three items
        let top = table.last().entries().last().unwrap().1;
        assert_eq!(table.backtrack_items(top).unwrap().len(), 3);
    }

    #[test]
    fn empty_levels_leave_origin() {
        let params = EpsParams::normalize(&r(1, 4), &r(1, 1)).unwrap();
        let empty = ReducedLargeSet::default();
        let units = unit_system_for::<i128>(&params, &empty, None).unwrap();
        let levels = build_glued_sets(&empty, None, units);
        let table = run_dp(&levels).unwrap();
        assert_eq!(values(&levels, &table, 0), vec![(r(0, 1), r(0, 1))]);
    }

    #[test]
    fn single_top_item() {
        let params = EpsParams::normalize(&r(1, 4), &r(1, 1)).unwrap();
        let mut single = ReducedLargeSet::default();
        single
            .slots
            .insert(IntervalIndex { k: 3, gamma: 0 }, Item::new(0, r(1, 1), r(3, 5)).unwrap());
        let units = unit_system_for::<i128>(&params, &single, None).unwrap();
        let levels = build_glued_sets(&single, None, units);
        let table = run_dp(&levels).unwrap();
        assert_eq!(
            values(&levels, &table, 0),
            vec![(r(0, 1), r(0, 1)), (r(1, 1), r(3, 5))]
        );
    }

    #[test]
    fn dominance_examples() {
        assert_eq!(
            remove_dominated_pairs(&[(r(1, 2), r(2, 5)), (r(3, 5), r(2, 5))]),
            vec![(r(3, 5), r(2, 5))]
        );
        assert_eq!(
            remove_dominated_pairs(&[(r(1, 2), r(3, 10)), (r(3, 5), r(2, 5))]),
            vec![(r(1, 2), r(3, 10)), (r(3, 5), r(2, 5))]
        );
        assert_eq!(
            remove_dominated_pairs(&[(r(1, 4), r(1, 2)), (r(1, 2), r(1, 2)), (r(3, 4), r(1, 4))]),
            vec![(r(3, 4), r(1, 4))]
        );
    }
}
