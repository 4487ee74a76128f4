//! The complete pipeline: greedy bound, special cases, gluing, the tuple DP,
//! completion with the most efficient small item, and certificate assembly.

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::traits::ToPrimitive;

use crate::dp::{run_dp, DpStats, DpTable, NodeId, ORIGIN};
use crate::error::{Error, Result};
use crate::gluing::{build_glued_sets, unit_system_for, GluedLevels};
use crate::model::{EpsParams, Instance, Item};
use crate::preprocess::{greedy_p0, partition_items, reduce_large, Greedy, Partition, ReducedLargeSet};
use crate::rational::Rational;
use crate::solution::SolutionMultiset;
use crate::units::Units;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    /// A single item of profit `2 p0`.
    TwoP0Item,
    /// Two copies of the glued item in the first slot of the top level.
    TwoGluedCopies,
    /// Best final tuple plus small-item copies.
    DpCombined,
    /// The greedy fill beat the tuple solution.
    GreedyFallback,
}

impl Branch {
    pub const ALL: [Branch; 4] = [
        Branch::TwoP0Item,
        Branch::TwoGluedCopies,
        Branch::DpCombined,
        Branch::GreedyFallback,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Branch::TwoP0Item => "two-p0-item",
            Branch::TwoGluedCopies => "two-glued-copies",
            Branch::DpCombined => "dp-combined",
            Branch::GreedyFallback => "greedy-fallback",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Branch::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown branch `{s}`")))
    }
}

/// Operation counters of one solve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub tuples_created: u64,
    pub glue_ops: u64,
    /// Occupied slots of the reduced large set.
    pub slots: u64,
    pub dominance_removals: u64,
    /// Tuples in the final set, origin included.
    pub final_tuples: u64,
    /// Largest tuple set over all levels, origin included.
    pub max_level_tuples: u64,
}

impl Stats {
    /// `(name, value)` pairs in a fixed order.
    pub fn entries(&self) -> [(&'static str, u64); 6] {
        [
            ("tuples_created", self.tuples_created),
            ("glue_ops", self.glue_ops),
            ("slots", self.slots),
            ("dominance_removals", self.dominance_removals),
            ("final_tuples", self.final_tuples),
            ("max_level_tuples", self.max_level_tuples),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub profit: Rational,
    pub solution: SolutionMultiset,
    pub stats: Stats,
    pub branch: Branch,
    pub params: EpsParams,
}

/// `floor((1 - size) / s(a_eff))` copies of `a_eff` on top of a tuple.
///
/// Returns the combined profit and the number of copies.
pub fn combine_with_small(profit: &Rational, size: &Rational, a_eff: Option<&Item>) -> (Rational, u64) {
    let Some(a_eff) = a_eff else {
        return (profit.clone(), 0);
    };
    let room = Rational::one()
        .checked_sub(size)
        .expect("tuple size within the capacity");
    let copies = room
        .div_floor(&a_eff.size)
        .to_u64()
        .expect("copy count bounded by item validation");
    (profit + &a_eff.profit.mul_int(copies), copies)
}

/// Everything built before the tuple DP, kept open for inspection and for
/// tests that need to alter intermediate state.
#[derive(Clone, Debug)]
pub struct Pipeline<N> {
    pub params: EpsParams,
    pub greedy: Greedy,
    pub partition: Partition,
    pub reduced: ReducedLargeSet,
    pub glued: GluedLevels<N>,
}

impl<N: Units> Pipeline<N> {
    /// Returns `Ok(None)` when the scaled values do not fit `N`.
    pub fn prepare(instance: &Instance, params: EpsParams) -> Result<Option<Self>> {
        let greedy = greedy_p0(instance)?;
        let partition = partition_items(instance, &params);
        let reduced = reduce_large(&partition.large, &params);
        let Some(units) = unit_system_for::<N>(&params, &reduced, partition.small_best.as_ref())
        else {
            return Ok(None);
        };
        let glued = build_glued_sets(&reduced, partition.small_best.as_ref(), units);
        Ok(Some(Pipeline {
            params,
            greedy,
            partition,
            reduced,
            glued,
        }))
    }

    pub fn run_dp(&self) -> Result<DpTable<N>> {
        run_dp(&self.glued)
    }

    pub fn run(&self, instance: &Instance) -> Result<SolveResult> {
        if let Some(item) = &self.partition.two_p0_item {
            let mut solution = SolutionMultiset::empty();
            solution.add(item.index, 1, &item.profit, &item.size);
            return self.finish(instance, solution, Stats::default(), Branch::TwoP0Item);
        }

        let units = &self.glued.units;
        let mut stats = Stats {
            glue_ops: self.glued.glue_ops,
            slots: self.reduced.count() as u64,
            ..Stats::default()
        };

        if let Some(id) = self.glued.slot(units.kappa, 0) {
            let top = self.glued.item(id);
            if top.profit == units.p0 && top.size.clone() + top.size.clone() <= units.capacity {
                let mut solution = SolutionMultiset::empty();
                solution.absorb(&self.glued.unglue(id), 2);
                return self.finish(instance, solution, stats, Branch::TwoGluedCopies);
            }
        }

        let table = self.run_dp()?;
        record_dp(&mut stats, &table);
        let (node, copies) = self.best_final_tuple(&table);
        let mut solution = self.backtrack_solution(&table, node)?;
        if let Some(a_eff) = &self.partition.small_best {
            solution.add(a_eff.index, copies, &a_eff.profit, &a_eff.size);
        }

        if self.greedy.p0 > *solution.total_profit() {
            let g = &self.greedy.item;
            let mut greedy = SolutionMultiset::empty();
            greedy.add(g.index, self.greedy.copies, &g.profit, &g.size);
            return self.finish(instance, greedy, stats, Branch::GreedyFallback);
        }
        self.finish(instance, solution, stats, Branch::DpCombined)
    }

    /// Final tuple maximizing profit plus small-item completion; ties keep the
    /// smaller size, then the smaller bucket.
    fn best_final_tuple(&self, table: &DpTable<N>) -> (NodeId, u64) {
        let units = &self.glued.units;
        let small = self.partition.small_best.as_ref().map(|item| {
            (units.profit_units(&item.profit), units.size_units(&item.size))
        });
        let combined = |node: NodeId| -> (N, N) {
            let entry = table.entry(node);
            match &small {
                None => (entry.profit.clone(), N::zero()),
                Some((p, s)) => {
                    let copies = units.copies_within(&(units.capacity.clone() - entry.size.clone()), s);
                    (entry.profit.clone() + copies.clone() * p.clone(), copies)
                }
            }
        };
        let mut best = (ORIGIN, combined(ORIGIN));
        // Buckets ascend in size after the dominance sweep, so a strict
        // improvement test already prefers the smaller size and bucket.
        for (_, node) in table.last().entries() {
            let value = combined(node);
            if value.0 > best.1 .0 {
                best = (node, value);
            }
        }
        let copies = best.1 .1.to_big().to_u64().expect("copy count fits u64");
        (best.0, copies)
    }

    /// Expands a final tuple into original items.
    pub fn backtrack_solution(&self, table: &DpTable<N>, node: NodeId) -> Result<SolutionMultiset> {
        let mut solution = SolutionMultiset::empty();
        for id in table.backtrack_items(node)? {
            solution.absorb(&self.glued.unglue(id), 1);
        }
        let entry = table.entry(node);
        let units = &self.glued.units;
        if *solution.total_profit() != units.profit_value(&entry.profit)
            || *solution.total_size() != units.size_value(&entry.size)
        {
            return Err(Error::Internal(format!(
                "backtracked totals differ from tuple at node {node}"
            )));
        }
        Ok(solution)
    }

    fn finish(
        &self,
        instance: &Instance,
        solution: SolutionMultiset,
        stats: Stats,
        branch: Branch,
    ) -> Result<SolveResult> {
        solution.verify(instance)?;
        Ok(SolveResult {
            profit: solution.total_profit().clone(),
            solution,
            stats,
            branch,
            params: self.params.clone(),
        })
    }
}

fn record_dp<N: Units>(stats: &mut Stats, table: &DpTable<N>) {
    let DpStats {
        tuples_created,
        dominance_removals,
    } = table.stats;
    stats.tuples_created = tuples_created;
    stats.dominance_removals = dominance_removals;
    stats.final_tuples = table.last().len() as u64;
    stats.max_level_tuples = (0..table.level_count())
        .map(|k| table.level(k).len() as u64)
        .max()
        .unwrap_or(1);
}

/// Solves with `eps_input` normalized against the greedy bound.
pub fn solve(instance: &Instance, eps_input: &Rational) -> Result<SolveResult> {
    let greedy = greedy_p0(instance)?;
    let params = EpsParams::normalize(eps_input, &greedy.p0)?;
    solve_with_params(instance, params)
}

/// Solves with caller-supplied parameters, picking the integer width that fits.
pub fn solve_with_params(instance: &Instance, params: EpsParams) -> Result<SolveResult> {
    if let Some(pipeline) = Pipeline::<i128>::prepare(instance, params.clone())? {
        return pipeline.run(instance);
    }
    match Pipeline::<BigInt>::prepare(instance, params)? {
        Some(pipeline) => pipeline.run(instance),
        None => Err(Error::Internal("unbounded integer width refused the scale".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    fn star() -> Instance {
        Instance::new(vec![
            (r(1, 2), r(2, 5)),
            (r(3, 10), r(7, 20)),
            (r(3, 50), r(1, 20)),
        ])
        .unwrap()
    }

    #[test]
    fn star_is_solved_optimally() {
        let res = solve(&star(), &r(1, 4)).unwrap();
        assert_eq!(res.profit, r(31, 25));
        assert_eq!(res.branch, Branch::DpCombined);
        assert_eq!(res.solution.counts(), &BTreeMap::from([(0, 2), (2, 4)]));
        assert_eq!(res.stats.slots, 2);
    }

    #[test]
    fn bigint_path_agrees() {
        let inst = star();
        let params = EpsParams::normalize(&r(1, 4), &r(1, 1)).unwrap();
        let res = Pipeline::<BigInt>::prepare(&inst, params)
            .unwrap()
            .unwrap()
            .run(&inst)
            .unwrap();
        assert_eq!(res.profit, r(31, 25));
        assert_eq!(res.solution.counts(), &BTreeMap::from([(0, 2), (2, 4)]));
    }

    #[test]
    fn trivial_instances() {
        let one = Instance::new(vec![(r(1, 1), r(1, 1))]).unwrap();
        let res = solve(&one, &r(1, 10)).unwrap();
        assert_eq!(res.profit, r(1, 1));

        let small = Instance::new(vec![(r(3, 50), r(1, 20))]).unwrap();
        let res = solve(&small, &r(1, 4)).unwrap();
        assert_eq!(res.profit, r(6, 5));
        assert_eq!(res.solution.counts(), &BTreeMap::from([(0, 20)]));
        assert_eq!(res.branch, Branch::DpCombined);
    }

    #[test]
    fn combine_examples() {
        let a3 = Item::new(2, r(3, 50), r(1, 20)).unwrap();
        assert_eq!(combine_with_small(&r(1, 1), &r(4, 5), Some(&a3)), (r(31, 25), 4));
        assert_eq!(combine_with_small(&r(0, 1), &r(0, 1), Some(&a3)), (r(6, 5), 20));
        assert_eq!(combine_with_small(&r(1, 2), &r(2, 5), None), (r(1, 2), 0));
    }

    #[test]
    fn backtrack_examples() {
        let inst = star();
        let params = EpsParams::normalize(&r(1, 4), &r(1, 1)).unwrap();
        let pipeline = Pipeline::<i128>::prepare(&inst, params).unwrap().unwrap();
        let table = pipeline.run_dp().unwrap();
        assert!(pipeline.backtrack_solution(&table, ORIGIN).unwrap().is_empty());

        let find = |p: Rational| {
            let units = &pipeline.glued.units;
            table
                .last()
                .entries()
                .find(|&(_, id)| units.profit_value(&table.entry(id).profit) == p)
                .unwrap()
                .1
        };
        let pair = pipeline.backtrack_solution(&table, find(r(1, 1))).unwrap();
        assert_eq!(pair.counts(), &BTreeMap::from([(0, 2)]));
        let three = pipeline.backtrack_solution(&table, find(r(11, 10))).unwrap();
        assert_eq!(three.counts(), &BTreeMap::from([(0, 1), (1, 1), (2, 5)]));
        assert_eq!(three.total_size(), &r(1, 1));
    }

    #[test]
    fn two_glued_copies_with_shifted_bound() {
        // With the bound forced to 1/2 the item sits alone in the first slot
        // of the top level with profit p0 and half the capacity.
        let inst = Instance::new(vec![(r(1, 2), r(1, 2))]).unwrap();
        let params = EpsParams::normalize(&r(1, 4), &r(1, 2)).unwrap();
        let res = solve_with_params(&inst, params).unwrap();
        assert_eq!(res.branch, Branch::TwoGluedCopies);
        assert_eq!(res.profit, r(1, 1));
        assert_eq!(res.solution.counts(), &BTreeMap::from([(0, 2)]));
    }

    #[test]
    fn two_p0_item_with_shifted_bound() {
        let inst = Instance::new(vec![(r(1, 2), r(1, 2))]).unwrap();
        let params = EpsParams::normalize(&r(1, 4), &r(1, 4)).unwrap();
        let res = solve_with_params(&inst, params).unwrap();
        assert_eq!(res.branch, Branch::TwoP0Item);
        assert_eq!(res.profit, r(1, 2));
        assert_eq!(res.solution.counts(), &BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn branch_names_roundtrip() {
        for b in Branch::ALL {
            assert_eq!(b.name().parse::<Branch>().unwrap(), b);
        }
        assert!("other".parse::<Branch>().is_err());
    }
}
