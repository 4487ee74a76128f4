//! Exact reference solvers for tests and verification.
//!
//! None of these share code with the approximation pipeline beyond the item
//! types: a pseudo-polynomial dynamic program over a common size grid, plain
//! exhaustive search, and enumerators for the restricted solution classes
//! the glued levels are meant to approximate.

use std::collections::{BTreeMap, BTreeSet};

use num::bigint::BigInt;
use num::integer::Integer;
use num::traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::gluing::{GluedId, GluedLevels};
use crate::model::{Instance, Item};
use crate::rational::Rational;
use crate::solution::SolutionMultiset;
use crate::units::Units;

/// Default cell budget of [`exact_dp`].
pub const DP_BUDGET: u128 = 1_000_000;
/// Default node budget of [`brute_force`].
pub const BRUTE_BUDGET: u128 = 10_000_000;
/// Default selection budget of the structured enumerators.
pub const ENUM_BUDGET: u128 = 1_000_000;

/// Items whose sizes are whole multiples of `1 / denominator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridInstance {
    pub denominator: BigInt,
    pub units: Vec<u64>,
    pub profits: Vec<Rational>,
    pub indices: Vec<usize>,
    pub capacity_units: u64,
}

impl GridInstance {
    /// Grid for `items` and knapsack volume `capacity`, using the lcm of all
    /// denominators. Errors when a unit count does not fit `u64`.
    pub fn new(items: &[Item], capacity: &Rational) -> Result<Self> {
        let denominator = items
            .iter()
            .fold(capacity.denom().clone(), |acc, item| acc.lcm(item.size.denom()));
        let to_units = |r: &Rational| -> Result<u64> {
            r.mul_int(denominator.clone()).floor().to_u64().ok_or(Error::OracleTooLarge {
                needed: u128::MAX,
                budget: u64::MAX as u128,
            })
        };
        Ok(GridInstance {
            units: items.iter().map(|i| to_units(&i.size)).collect::<Result<_>>()?,
            profits: items.iter().map(|i| i.profit.clone()).collect(),
            indices: items.iter().map(|i| i.index).collect(),
            capacity_units: to_units(capacity)?,
            denominator,
        })
    }

    pub fn from_instance(instance: &Instance) -> Result<Self> {
        Self::new(instance.items(), &Rational::one())
    }

    /// Table cells the dynamic program touches.
    pub fn cells(&self) -> u128 {
        (self.capacity_units as u128 + 1) * (self.units.len() as u128).max(1)
    }
}

/// Optimum and one optimal multiset by the classical recurrence
/// `best[w] = max(best[w-1], max_j best[w - u_j] + p_j)`.
pub fn exact_dp(grid: &GridInstance, budget: u128) -> Result<(Rational, SolutionMultiset)> {
    if grid.cells() > budget {
        return Err(Error::OracleTooLarge {
            needed: grid.cells(),
            budget,
        });
    }
    let cap = grid.capacity_units as usize;
    let mut best = vec![Rational::zero(); cap + 1];
    // None: carried over from w - 1.
    let mut pred: Vec<Option<usize>> = vec![None; cap + 1];
    for w in 1..=cap {
        best[w] = best[w - 1].clone();
        for (j, &u) in grid.units.iter().enumerate() {
            let u = u as usize;
            if u <= w {
                let candidate = &best[w - u] + &grid.profits[j];
                if candidate > best[w] {
                    best[w] = candidate;
                    pred[w] = Some(j);
                }
            }
        }
    }

    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    let mut used = 0u64;
    let mut w = cap;
    while w > 0 {
        match pred[w] {
            None => w -= 1,
            Some(j) => {
                *counts.entry(grid.indices[j]).or_insert(0) += 1;
                used += grid.units[j];
                w -= grid.units[j] as usize;
            }
        }
    }
    let size = Rational::new(BigInt::from(used), grid.denominator.clone())?;
    let opt = best[cap].clone();
    Ok((opt.clone(), SolutionMultiset::with_totals(counts, opt, size)))
}

/// Exhaustive optimum over copy vectors with at most `max_copies` per item.
pub fn brute_force(instance: &Instance, max_copies: u64) -> Result<Rational> {
    brute_force_within(instance.items(), &Rational::one(), max_copies, BRUTE_BUDGET)
}

/// Exhaustive optimum for knapsack volume `volume`.
pub fn brute_force_within(
    items: &[Item],
    volume: &Rational,
    max_copies: u64,
    budget: u128,
) -> Result<Rational> {
    let caps: Vec<u64> = items
        .iter()
        .map(|item| item.copies_within(volume).min(max_copies))
        .collect();
    let space = caps
        .iter()
        .fold(1u128, |acc, &c| acc.saturating_mul(c as u128 + 1));
    if space > budget {
        return Err(Error::OracleTooLarge {
            needed: space,
            budget,
        });
    }

    fn search(items: &[Item], caps: &[u64], room: &Rational, profit: &Rational, best: &mut Rational) {
        let Some((item, rest)) = items.split_first() else {
            if profit > best {
                *best = profit.clone();
            }
            return;
        };
        let mut room = room.clone();
        let mut profit = profit.clone();
        for copies in 0..=caps[0] {
            if copies > 0 {
                match room.checked_sub(&item.size) {
                    Some(left) => room = left,
                    None => break,
                }
                profit = &profit + &item.profit;
            }
            search(rest, &caps[1..], &room, &profit, best);
        }
    }

    let mut best = Rational::zero();
    search(items, &caps, volume, &Rational::zero(), &mut best);
    Ok(best)
}

/// A glued item as plain rationals.
#[derive(Clone, Debug)]
struct Choice {
    profit: Rational,
    size: Rational,
}

fn choices<N: Units>(glued: &GluedLevels<N>, ids: &[GluedId]) -> Vec<Choice> {
    ids.iter()
        .map(|&id| Choice {
            profit: glued.profit(id),
            size: glued.size(id),
        })
        .collect()
}

fn selection_space(groups: &[Vec<Choice>]) -> u128 {
    groups
        .iter()
        .fold(1u128, |acc, g| acc.saturating_mul(g.len() as u128 + 1))
}

/// Best selection with at most one item per level `0..=kappa`, the small
/// bundle at most once and at least one item from levels `kappa-2..=kappa+1`,
/// within volume `v`; zero when no such selection fits.
pub fn structured_enum<N: Units>(glued: &GluedLevels<N>, v: &Rational) -> Result<Rational> {
    let kappa = glued.kappa();
    let groups: Vec<Vec<Choice>> = (0..=kappa + 1)
        .map(|k| choices(glued, &glued.level(k)))
        .collect();
    let space = selection_space(&groups);
    if space > ENUM_BUDGET {
        return Err(Error::OracleTooLarge {
            needed: space,
            budget: ENUM_BUDGET,
        });
    }
    let anchor_from = kappa.saturating_sub(2);

    fn walk(
        groups: &[Vec<Choice>],
        k: usize,
        anchor_from: usize,
        room: &Rational,
        profit: &Rational,
        anchored: bool,
        best: &mut Rational,
    ) {
        if k == groups.len() {
            if anchored && profit > best {
                *best = profit.clone();
            }
            return;
        }
        walk(groups, k + 1, anchor_from, room, profit, anchored, best);
        for c in &groups[k] {
            if let Some(left) = room.checked_sub(&c.size) {
                let p = profit + &c.profit;
                walk(groups, k + 1, anchor_from, &left, &p, anchored || k >= anchor_from, best);
            }
        }
    }

    let mut best = Rational::zero();
    walk(&groups, 0, anchor_from, v, &Rational::zero(), false, &mut best);
    Ok(best)
}

/// Best solution within `v` using at most one item from each level
/// `0..=k0` and any number of copies from levels `k0+1..=kappa`.
/// The small bundle is not used.
pub fn structured_opt<N: Units>(glued: &GluedLevels<N>, k0: usize, v: &Rational) -> Result<Rational> {
    let kappa = glued.kappa();
    let groups: Vec<Vec<Choice>> = (0..=k0.min(kappa))
        .map(|k| choices(glued, &glued.level(k)))
        .collect();
    let free: Vec<Choice> = (k0 + 1..=kappa)
        .flat_map(|k| choices(glued, &glued.level(k)))
        .collect();
    let space = selection_space(&groups);
    if space > ENUM_BUDGET {
        return Err(Error::OracleTooLarge {
            needed: space,
            budget: ENUM_BUDGET,
        });
    }

    fn fill(free: &[Choice], room: &Rational, profit: &Rational, best: &mut Rational) {
        let Some((c, rest)) = free.split_first() else {
            if profit > best {
                *best = profit.clone();
            }
            return;
        };
        let mut room = room.clone();
        let mut profit = profit.clone();
        loop {
            fill(rest, &room, &profit, best);
            match room.checked_sub(&c.size) {
                Some(left) => room = left,
                None => break,
            }
            profit = &profit + &c.profit;
        }
    }

    fn pick(groups: &[Vec<Choice>], free: &[Choice], room: &Rational, profit: &Rational, best: &mut Rational) {
        let Some((group, rest)) = groups.split_first() else {
            fill(free, room, profit, best);
            return;
        };
        pick(rest, free, room, profit, best);
        for c in group {
            if let Some(left) = room.checked_sub(&c.size) {
                pick(rest, free, &left, &(profit + &c.profit), best);
            }
        }
    }

    let mut best = Rational::zero();
    pick(&groups, &free, v, &Rational::zero(), &mut best);
    Ok(best)
}

/// Exact tuple sets without bucketing or dominance removal.
///
/// Entry `k` (for `k = 0..=kappa+1`) holds every `(profit, size)` reachable
/// with at most one item from each level `k..=kappa+1`, where levels below
/// `kappa - 2` may only extend a nonempty selection. The origin is included.
pub fn exact_tuple_sets<N: Units>(glued: &GluedLevels<N>) -> Result<Vec<Vec<(Rational, Rational)>>> {
    let kappa = glued.kappa();
    let origin = (Rational::zero(), Rational::zero());
    let mut sets: Vec<Vec<(Rational, Rational)>> = vec![Vec::new(); kappa + 2];
    let mut above: BTreeSet<(Rational, Rational)> = BTreeSet::from([origin.clone()]);
    let mut total = 0u128;
    for k in (0..=kappa + 1).rev() {
        let mut current = above.clone();
        for c in choices(glued, &glued.level(k)) {
            for (p, s) in &above {
                let is_origin = p.is_zero() && s.is_zero();
                if is_origin && k + 2 < kappa {
                    continue;
                }
                let size = s + &c.size;
                if size <= Rational::one() {
                    current.insert((p + &c.profit, size));
                }
            }
        }
        total += current.len() as u128;
        if total > ENUM_BUDGET {
            return Err(Error::OracleTooLarge {
                needed: total,
                budget: ENUM_BUDGET,
            });
        }
        sets[k] = current.iter().cloned().collect();
        above = current;
    }
    Ok(sets)
}

/// Pairs not dominated by another pair (profit at least as high and size at
/// most as large, one of them strictly). Quadratic; meant for small sets.
pub fn pareto_front(pairs: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
    let mut unique: Vec<(Rational, Rational)> = pairs.to_vec();
    unique.sort();
    unique.dedup();
    unique
        .iter()
        .filter(|(p, s)| {
            !unique
                .iter()
                .any(|(q, t)| q >= p && t <= s && (q > p || t < s))
        })
        .cloned()
        .collect()
}

/// `(1 - loss)^exp` as an exact rational.
pub fn shrink(loss: &Rational, exp: u32) -> Rational {
    (Rational::one() - loss).pow(exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gluing::{build_glued_sets, unit_system_for};
    use crate::model::EpsParams;
    use crate::preprocess::{greedy_p0, partition_items, reduce_large, ReducedLargeSet};

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

    fn star_levels() -> GluedLevels<i128> {
        let inst = star();
        let params = EpsParams::normalize(&r(1, 4), &greedy_p0(&inst).unwrap().p0).unwrap();
        let part = partition_items(&inst, &params);
        let red = reduce_large(&part.large, &params);
        let units = unit_system_for(&params, &red, part.small_best.as_ref()).unwrap();
        build_glued_sets(&red, part.small_best.as_ref(), units)
    }

    #[test]
    fn exact_dp_examples() {
        let inst = star();
        let grid = GridInstance::from_instance(&inst).unwrap();
        assert_eq!(grid.denominator, BigInt::from(20));
        let (opt, witness) = exact_dp(&grid, DP_BUDGET).unwrap();
        assert_eq!(opt, r(31, 25));
        assert_eq!(witness.counts(), &BTreeMap::from([(0, 2), (2, 4)]));
        witness.verify(&inst).unwrap();

        let one = Instance::new(vec![(r(1, 1), r(1, 1))]).unwrap();
        let (opt, _) = exact_dp(&GridInstance::from_instance(&one).unwrap(), DP_BUDGET).unwrap();
        assert_eq!(opt, r(1, 1));

        let items = vec![Item::new(0, r(1, 2), r(1, 2)).unwrap()];
        let grid = GridInstance::new(&items, &r(1, 4)).unwrap();
        let (opt, witness) = exact_dp(&grid, DP_BUDGET).unwrap();
        assert!(opt.is_zero() && witness.is_empty());
    }

    #[test]
    fn exact_dp_respects_budget() {
        let grid = GridInstance::from_instance(&star()).unwrap();
        assert!(matches!(
            exact_dp(&grid, 10),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force(&star(), 20).unwrap(), r(31, 25));
        assert_eq!(
            brute_force_within(&[], &Rational::one(), 5, BRUTE_BUDGET).unwrap(),
            Rational::zero()
        );
        let one = Instance::new(vec![(r(1, 2), r(3, 5))]).unwrap();
        assert_eq!(brute_force(&one, 5).unwrap(), r(1, 2));
    }

    #[test]
    fn structured_enum_examples() {
        let levels = star_levels();
        assert_eq!(structured_enum(&levels, &Rational::one()).unwrap(), r(11, 10));
        assert_eq!(structured_enum(&levels, &Rational::zero()).unwrap(), Rational::zero());

        let params = EpsParams::normalize(&r(1, 4), &r(1, 1)).unwrap();
        let empty = ReducedLargeSet::default();
        let units = unit_system_for::<i128>(&params, &empty, None).unwrap();
        let nothing = build_glued_sets(&empty, None, units);
        assert_eq!(structured_enum(&nothing, &Rational::one()).unwrap(), Rational::zero());
    }

    #[test]
    fn structured_opt_on_star() {
        let levels = star_levels();
        // a2 twice glued is (3/5, 7/10); a1 twice is (1, 4/5) on level 3.
        assert_eq!(structured_opt(&levels, 2, &Rational::one()).unwrap(), r(1, 1));
        assert_eq!(structured_opt(&levels, 3, &r(3, 4)).unwrap(), r(4, 5));
    }

    #[test]
    fn exact_tuples_contain_dp_levels() {
        let levels = star_levels();
        let sets = exact_tuple_sets(&levels).unwrap();
        assert_eq!(sets.len(), 5);
        assert!(sets[0].contains(&(r(11, 10), r(1, 1))));
        assert!(sets[0].contains(&(r(0, 1), r(0, 1))));
    }

    #[test]
    fn pareto_examples() {
        assert_eq!(
            pareto_front(&[(r(1, 2), r(2, 5)), (r(3, 5), r(2, 5))]),
            vec![(r(3, 5), r(2, 5))]
        );
        assert_eq!(
            pareto_front(&[(r(1, 4), r(1, 2)), (r(1, 2), r(1, 2)), (r(3, 4), r(1, 4))]),
            vec![(r(3, 4), r(1, 4))]
        );
    }
}
