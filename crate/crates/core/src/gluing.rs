//! Pairwise gluing of the reduced large items into the level sets, the
//! bundled small item, and ungluing back to original items.
//!
//! Level `k + 1` starts out with the reduced items of that level as
//! incumbents. Every pair `(gamma <= gamma')` of level `k` that fits into the
//! knapsack is glued and competes for the slot of its profit; a candidate wins
//! only with a strictly smaller size. Level `kappa + 1` is never built by
//! gluing; the bundle of small items takes its place.

use std::collections::BTreeMap;

use num::traits::ToPrimitive;

use crate::model::{EpsParams, Item};
use crate::preprocess::ReducedLargeSet;
use crate::rational::Rational;
use crate::solution::SolutionMultiset;
use crate::units::{profit_scale, size_scale, UnitSystem, Units};

/// Index into the item arena of a [`GluedLevels`].
pub type GluedId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// An original item, by input index.
    Leaf(usize),
    /// Two glued items of the level below; both may be the same item.
    Pair(GluedId, GluedId),
    /// `copies` copies of the small item `item`.
    SmallBundle { item: usize, copies: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluedItem<N> {
    pub profit: N,
    pub size: N,
    pub level: usize,
    pub provenance: Provenance,
}

/// Glues two placed items; `None` when they do not fit together.
pub fn glue<N: Units>(
    a: (GluedId, &GluedItem<N>),
    b: (GluedId, &GluedItem<N>),
    capacity: &N,
) -> Option<GluedItem<N>> {
    let size = a.1.size.clone() + b.1.size.clone();
    if size > *capacity {
        return None;
    }
    Some(GluedItem {
        profit: a.1.profit.clone() + b.1.profit.clone(),
        size,
        level: a.1.level.max(b.1.level) + 1,
        provenance: Provenance::Pair(a.0, b.0),
    })
}

/// `ceil((p0/4) / p(a_eff))` copies of `a_eff` glued into one item, if they fit.
pub fn build_aeffc<N: Units>(a_eff: &Item, units: &UnitSystem<N>) -> Option<GluedItem<N>> {
    let profit = units.profit_units(&a_eff.profit);
    let size = units.size_units(&a_eff.size);
    let quarter = units.p0.clone() / (N::one() + N::one() + N::one() + N::one());
    let copies = quarter.div_ceil(&profit);
    let total_size = copies.clone() * size;
    if total_size > units.capacity {
        return None;
    }
    let count = copies.to_big().to_u64()?;
    Some(GluedItem {
        profit: copies * profit,
        size: total_size,
        level: units.kappa + 1,
        provenance: Provenance::SmallBundle {
            item: a_eff.index,
            copies: count,
        },
    })
}

/// A candidate considered for a slot while building, for audits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlueCandidate<N> {
    pub level: usize,
    pub gamma: usize,
    pub size: N,
}

#[derive(Clone, Debug)]
pub struct GluedLevels<N> {
    pub units: UnitSystem<N>,
    arena: Vec<GluedItem<N>>,
    /// `levels[k][gamma]` for `k = 0..=kappa`.
    levels: Vec<Vec<Option<GluedId>>>,
    aeffc: Option<GluedId>,
    /// Number of pairs that fit and were glued.
    pub glue_ops: u64,
}

/// Unit system covering the profits and sizes of the reduced set and `a_eff`.
pub fn unit_system_for<N: Units>(
    params: &EpsParams,
    reduced: &ReducedLargeSet,
    a_eff: Option<&Item>,
) -> Option<UnitSystem<N>> {
    let items: Vec<&Item> = reduced.items().chain(a_eff).collect();
    let m = profit_scale(params, items.iter().map(|i| &i.profit));
    let l = size_scale(items.iter().map(|i| &i.size));
    UnitSystem::new(params, m, l)
}

pub fn build_glued_sets<N: Units>(
    reduced: &ReducedLargeSet,
    a_eff: Option<&Item>,
    units: UnitSystem<N>,
) -> GluedLevels<N> {
    build(reduced, a_eff, units, None)
}

/// Same as [`build_glued_sets`], also returning every slot candidate.
pub fn build_glued_sets_logged<N: Units>(
    reduced: &ReducedLargeSet,
    a_eff: Option<&Item>,
    units: UnitSystem<N>,
) -> (GluedLevels<N>, Vec<GlueCandidate<N>>) {
    let mut log = Vec::new();
    let levels = build(reduced, a_eff, units, Some(&mut log));
    (levels, log)
}

fn build<N: Units>(
    reduced: &ReducedLargeSet,
    a_eff: Option<&Item>,
    units: UnitSystem<N>,
    mut log: Option<&mut Vec<GlueCandidate<N>>>,
) -> GluedLevels<N> {
    let kappa = units.kappa;
    let mut out = GluedLevels {
        arena: Vec::with_capacity(reduced.count()),
        levels: vec![vec![None; units.gamma_max]; kappa + 1],
        aeffc: None,
        glue_ops: 0,
        units,
    };

    for (idx, item) in &reduced.slots {
        debug_assert!(idx.k <= kappa);
        let glued = GluedItem {
            profit: out.units.profit_units(&item.profit),
            size: out.units.size_units(&item.size),
            level: idx.k,
            provenance: Provenance::Leaf(item.index),
        };
        if let Some(log) = log.as_deref_mut() {
            log.push(GlueCandidate {
                level: idx.k,
                gamma: idx.gamma,
                size: glued.size.clone(),
            });
        }
        out.arena.push(glued);
        out.levels[idx.k][idx.gamma] = Some(out.arena.len() - 1);
    }

    for k in 0..kappa {
        let present: Vec<GluedId> = out.levels[k].iter().flatten().copied().collect();
        for (i, &a) in present.iter().enumerate() {
            for &b in &present[i..] {
                let Some(candidate) =
                    glue((a, &out.arena[a]), (b, &out.arena[b]), &out.units.capacity)
                else {
                    continue;
                };
                out.glue_ops += 1;
                let idx = out
                    .units
                    .interval_index(&candidate.profit)
                    .expect("glued profit stays below 2 p0");
                debug_assert_eq!(idx.k, k + 1);
                if let Some(log) = log.as_deref_mut() {
                    log.push(GlueCandidate {
                        level: idx.k,
                        gamma: idx.gamma,
                        size: candidate.size.clone(),
                    });
                }
                match out.levels[idx.k][idx.gamma] {
                    None => {
                        out.arena.push(candidate);
                        out.levels[idx.k][idx.gamma] = Some(out.arena.len() - 1);
                    }
                    // Nothing refers to a level k+1 item while level k is glued,
                    // so the loser's arena slot can be reused.
                    Some(id) if candidate.size < out.arena[id].size => out.arena[id] = candidate,
                    Some(_) => {}
                }
            }
        }
    }

    if let Some(a_eff) = a_eff {
        if let Some(bundle) = build_aeffc(a_eff, &out.units) {
            out.arena.push(bundle);
            out.aeffc = Some(out.arena.len() - 1);
        }
    }
    out
}

impl<N: Units> GluedLevels<N> {
    pub fn kappa(&self) -> usize {
        self.units.kappa
    }

    pub fn item(&self, id: GluedId) -> &GluedItem<N> {
        &self.arena[id]
    }

    pub fn slot(&self, k: usize, gamma: usize) -> Option<GluedId> {
        self.levels.get(k)?.get(gamma).copied().flatten()
    }

    /// Items of level `k` (`0..=kappa + 1`) in ascending `gamma`.
    pub fn level(&self, k: usize) -> Vec<GluedId> {
        if k == self.kappa() + 1 {
            return self.aeffc.into_iter().collect();
        }
        self.levels
            .get(k)
            .map(|slots| slots.iter().flatten().copied().collect())
            .unwrap_or_default()
    }

    /// `(gamma, id)` pairs of level `k <= kappa`.
    pub fn level_slots(&self, k: usize) -> impl Iterator<Item = (usize, GluedId)> + '_ {
        self.levels[k]
            .iter()
            .enumerate()
            .filter_map(|(gamma, id)| id.map(|id| (gamma, id)))
    }

    pub fn aeffc(&self) -> Option<GluedId> {
        self.aeffc
    }

    /// Number of items over all levels, the bundle included.
    pub fn len(&self) -> usize {
        self.levels.iter().flatten().flatten().count() + usize::from(self.aeffc.is_some())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn profit(&self, id: GluedId) -> Rational {
        self.units.profit_value(&self.arena[id].profit)
    }

    pub fn size(&self, id: GluedId) -> Rational {
        self.units.size_value(&self.arena[id].size)
    }

    /// Places an arbitrary item at `(k, gamma)`, replacing what was there.
    /// Meant for tests that need states the construction cannot produce.
    pub fn inject(&mut self, k: usize, gamma: usize, item: GluedItem<N>) -> GluedId {
        self.arena.push(item);
        let id = self.arena.len() - 1;
        self.levels[k][gamma] = Some(id);
        id
    }

    /// Expands an item into original item counts.
    ///
    /// Returns the counts together with the number of tree nodes visited.
    pub fn unglue_counts(&self, id: GluedId) -> (BTreeMap<usize, u64>, usize) {
        let mut counts = BTreeMap::new();
        let mut visited = 0;
        let mut stack = vec![(id, 1u64)];
        while let Some((id, mult)) = stack.pop() {
            visited += 1;
            match self.arena[id].provenance {
                Provenance::Leaf(index) => *counts.entry(index).or_insert(0) += mult,
                Provenance::SmallBundle { item, copies } => {
                    *counts.entry(item).or_insert(0) += copies * mult
                }
                Provenance::Pair(a, b) if a == b => stack.push((a, 2 * mult)),
                Provenance::Pair(a, b) => {
                    stack.push((a, mult));
                    stack.push((b, mult));
                }
            }
        }
        (counts, visited)
    }

    /// Expands an item into a multiset of original items with exact totals.
    pub fn unglue(&self, id: GluedId) -> SolutionMultiset {
        let (counts, _) = self.unglue_counts(id);
        SolutionMultiset::with_totals(counts, self.profit(id), self.size(id))
    }
}
