use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use ukp_core::dp::{DpTable, ORIGIN};
use ukp_core::gluing::{build_glued_sets_logged, unit_system_for, GluedLevels};
use ukp_core::oracle::{exact_dp, shrink, structured_enum, GridInstance, DP_BUDGET};
use ukp_core::preprocess::{greedy_p0, partition_items, reduce_large};
use ukp_core::solver::Pipeline;
use ukp_core::{solve, EpsParams, Instance, Rational};

fn r(n: i64, d: i64) -> Rational {
    Rational::frac(n, d)
}

/// Instances with profits and sizes on a `1/d` grid.
fn instance(max_n: usize, max_d: i64) -> impl Strategy<Value = Instance> {
    (2..=max_d).prop_flat_map(move |d| {
        prop::collection::vec((1..=d, 1..=d), 1..=max_n).prop_map(move |pairs| {
            Instance::new(pairs.into_iter().map(|(p, s)| (r(p, d), r(s, d))).collect()).unwrap()
        })
    })
}

fn eps() -> impl Strategy<Value = Rational> {
    prop_oneof![Just(r(1, 4)), Just(r(1, 8)), Just(r(3, 10)), Just(r(1, 10))]
}

fn pipeline(inst: &Instance, eps: &Rational) -> Pipeline<i128> {
    let params = EpsParams::normalize(eps, &greedy_p0(inst).unwrap().p0).unwrap();
    Pipeline::prepare(inst, params).unwrap().expect("small instances fit i128")
}

fn values(glued: &GluedLevels<i128>, table: &DpTable<i128>, k: usize) -> Vec<(Rational, Rational)> {
    table
        .tuples(k)
        .iter()
        .map(|(p, s)| (glued.units.profit_value(p), glued.units.size_value(s)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn intervals_cover_and_separate(pn in 1u64..4000, eps in eps()) {
        let params = EpsParams::normalize(&eps, &r(1, 1)).unwrap();
        let p = Rational::new(pn, 2000u64).unwrap();
        match params.interval_index(&p) {
            Ok(idx) => {
                let (lo, hi) = params.interval_bounds(idx);
                prop_assert!(lo <= p && p < hi);
                prop_assert!(idx.k <= params.kappa() && idx.gamma < params.gamma_max);
                // neighbours do not contain p
                if idx.gamma + 1 < params.gamma_max {
                    let next = ukp_core::IntervalIndex { gamma: idx.gamma + 1, ..idx };
                    prop_assert!(params.interval_bounds(next).0 > p);
                }
            }
            Err(_) => prop_assert!(p < params.t || p >= r(2, 1)),
        }
    }

    #[test]
    fn normalize_is_idempotent(num in 1u64..1000, den in 1001u64..4000, p0n in 1u64..50) {
        let eps_input = Rational::new(num, den).unwrap();
        let p0 = Rational::new(p0n, 10u64).unwrap();
        let once = EpsParams::normalize(&eps_input, &p0).unwrap();
        let twice = EpsParams::normalize(&once.eps, &p0).unwrap();
        prop_assert_eq!(&once.eps, &twice.eps);
        prop_assert_eq!(once.kappa, twice.kappa);
        prop_assert!(once.eps <= eps_input.clone().min(r(1, 4)));
        prop_assert!(once.eps.mul_int(2u32) > eps_input.min(r(1, 4)));
    }

    #[test]
    fn xi_cells_contain_profit(pn in 0u64..=4000, eps in eps()) {
        let params = EpsParams::normalize(&eps, &r(1, 1)).unwrap();
        let p = Rational::new(pn, 2000u64).unwrap();
        match params.xi_index(&p) {
            Ok(xi) => {
                prop_assert!(xi <= params.xi0 + 1);
                let lo = params.xi_base() + params.xi_width().mul_int(xi);
                prop_assert!(lo <= p && p < &lo + &params.xi_width());
                prop_assert_eq!(xi == params.xi0 + 1, p == r(2, 1));
            }
            Err(_) => prop_assert!(p < r(1, 4)),
        }
    }

    #[test]
    fn ungluing_reproduces_totals(inst in instance(8, 30), eps in eps()) {
        let pipe = pipeline(&inst, &eps);
        let glued = &pipe.glued;
        for k in 0..=glued.kappa() + 1 {
            for id in glued.level(k) {
                let m = glued.unglue(id);
                m.verify(&inst).unwrap();
                prop_assert_eq!(m.total_profit(), &glued.profit(id));
                prop_assert_eq!(m.total_size(), &glued.size(id));
            }
        }
    }

    #[test]
    fn slots_hold_smallest_candidate(inst in instance(10, 40), eps in eps()) {
        let params = EpsParams::normalize(&eps, &greedy_p0(&inst).unwrap().p0).unwrap();
        let part = partition_items(&inst, &params);
        let red = reduce_large(&part.large, &params);
        for (idx, item) in &red.slots {
            prop_assert_eq!(params.interval_index(&item.profit).unwrap(), *idx);
            let smallest = part
                .large
                .iter()
                .filter(|a| params.interval_index(&a.profit).ok() == Some(*idx))
                .map(|a| a.size.clone())
                .min()
                .unwrap();
            prop_assert_eq!(&item.size, &smallest);
        }
        let units = unit_system_for::<i128>(&params, &red, part.small_best.as_ref()).unwrap();
        let (glued, log) = build_glued_sets_logged(&red, part.small_best.as_ref(), units);
        let mut best: BTreeMap<(usize, usize), i128> = BTreeMap::new();
        for c in &log {
            let e = best.entry((c.level, c.gamma)).or_insert(c.size);
            *e = (*e).min(c.size);
        }
        for k in 0..=glued.kappa() {
            for (gamma, id) in glued.level_slots(k) {
                prop_assert_eq!(Some(&glued.item(id).size), best.get(&(k, gamma)));
            }
        }
        prop_assert_eq!(
            best.len(),
            (0..=glued.kappa()).map(|k| glued.level_slots(k).count()).sum::<usize>()
        );
    }

    #[test]
    fn tuple_levels_are_structured(inst in instance(10, 40), eps in eps()) {
        let pipe = pipeline(&inst, &eps);
        let glued = &pipe.glued;
        let kappa = glued.kappa();
        let table = pipe.run_dp().unwrap();
        let xi0 = pipe.params.xi0;
        let mut worst_width = 0;
        for k in 0..=kappa + 1 {
            worst_width = worst_width.max(glued.level(k).len());
            let level = table.level(k);
            prop_assert!(level.len() <= xi0 + 2);
            let tuples = values(glued, &table, k);
            prop_assert_eq!(&tuples[0], &(Rational::zero(), Rational::zero()));
            for w in tuples[1..].windows(2) {
                prop_assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1);
            }
            for (_, node) in level.entries() {
                let chain = table.backtrack_items(node).unwrap();
                let levels: Vec<usize> = chain.iter().map(|&id| glued.item(id).level).collect();
                let distinct: BTreeSet<usize> = levels.iter().copied().collect();
                prop_assert_eq!(distinct.len(), levels.len());
                prop_assert!(levels.iter().all(|&l| l >= k));
                prop_assert!(levels.iter().any(|&l| l + 2 >= kappa));
                let m = pipe.backtrack_solution(&table, node).unwrap();
                m.verify(&inst).unwrap();
            }
        }
        let cap = ((kappa + 2) * (xi0 + 2) * (worst_width + 1)) as u64;
        prop_assert!(table.stats.tuples_created <= cap);
        prop_assert!(pipe.backtrack_solution(&table, ORIGIN).unwrap().is_empty());
    }

    #[test]
    fn final_tuples_approximate_structured_optimum(inst in instance(6, 24), eps in eps()) {
        let pipe = pipeline(&inst, &eps);
        let glued = &pipe.glued;
        let table = pipe.run_dp().unwrap();
        let last = values(glued, &table, 0);
        let factor = shrink(&pipe.params.step_loss(), pipe.params.kappa + 1);
        let mut previous = Rational::zero();
        for v in (0..=8).map(|i| r(i, 8)) {
            let exact = structured_enum(glued, &v).unwrap();
            prop_assert!(exact >= previous);
            previous = exact.clone();
            let best = last
                .iter()
                .filter(|(_, s)| *s <= v)
                .map(|(p, _)| p.clone())
                .max()
                .unwrap();
            prop_assert!(best >= &factor * &exact, "v {}: {} vs {}", v, best, exact);
        }
    }

    #[test]
    fn certificates_are_sound(inst in instance(12, 50), eps in eps()) {
        let res = solve(&inst, &eps).unwrap();
        res.solution.verify(&inst).unwrap();
        prop_assert_eq!(&res.profit, res.solution.total_profit());
        prop_assert!(*res.solution.total_size() <= Rational::one());
        let (opt, witness) = exact_dp(&GridInstance::from_instance(&inst).unwrap(), DP_BUDGET).unwrap();
        witness.verify(&inst).unwrap();
        prop_assert_eq!(witness.total_profit(), &opt);
        prop_assert!(res.profit <= opt.clone());
        prop_assert!(res.profit >= (Rational::one() - &res.params.eps) * opt);
    }
}
