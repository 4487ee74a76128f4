//! Batch runs over generated instances with counter and timing records.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::Result;
use crate::generate::{generate_instance, Profile};
use crate::oracle::{exact_dp, GridInstance, DP_BUDGET};
use crate::rational::Rational;
use crate::solver::solve;

pub const CSV_HEADER: &str =
    "id,n,D,eps,profit,opt,ratio,wall_ns,tuples,glue_ops,slots,dominance_removals";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRecord {
    pub id: String,
    pub n: usize,
    pub denominator: u64,
    pub eps: Rational,
    pub profit: Rational,
    /// Exact optimum when the oracle fits its budget.
    pub opt: Option<Rational>,
    pub wall_ns: u128,
    pub tuples: u64,
    pub glue_ops: u64,
    pub slots: u64,
    pub dominance_removals: u64,
}

impl BenchRecord {
    pub fn ratio(&self) -> Option<Rational> {
        self.opt
            .as_ref()
            .filter(|opt| !opt.is_zero())
            .map(|opt| &self.profit / opt)
    }

    pub fn csv_row(&self) -> String {
        let show = |r: Option<Rational>| r.map(|r| r.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.id,
            self.n,
            self.denominator,
            self.eps,
            self.profit,
            show(self.opt.clone()),
            show(self.ratio()),
            self.wall_ns,
            self.tuples,
            self.glue_ops,
            self.slots,
            self.dominance_removals
        )
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub eps_list: Vec<Rational>,
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub denominator: u64,
    pub profile: Profile,
    /// Compute the exact optimum when within this cell budget; 0 disables it.
    pub oracle_budget: u128,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            eps_list: vec![Rational::frac(1, 4), Rational::frac(1, 8)],
            sizes: vec![20],
            seeds: vec![0, 1],
            denominator: 64,
            profile: Profile::Uniform,
            oracle_budget: DP_BUDGET,
        }
    }
}

/// One record per `(instance, eps)`, ordered by size, seed, then `eps` in
/// the configured order, independent of scheduling.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    let mut instances = Vec::new();
    for &n in &config.sizes {
        for &seed in &config.seeds {
            let id = format!("{}-n{}-d{}-s{}", config.profile, n, config.denominator, seed);
            let instance = generate_instance(n, config.denominator, seed, config.profile)?;
            instances.push((id, n, instance));
        }
    }

    let opts: Vec<Option<Rational>> = instances
        .par_iter()
        .map(|(_, _, instance)| {
            let grid = GridInstance::from_instance(instance).ok()?;
            if config.oracle_budget == 0 {
                return None;
            }
            exact_dp(&grid, config.oracle_budget).ok().map(|(opt, _)| opt)
        })
        .collect();

    let jobs: Vec<(usize, &Rational)> = (0..instances.len())
        .flat_map(|i| config.eps_list.iter().map(move |eps| (i, eps)))
        .collect();
    jobs.par_iter()
        .map(|&(i, eps)| {
            let (id, n, instance) = &instances[i];
            let start = Instant::now();
            let result = solve(instance, eps)?;
            let wall_ns = start.elapsed().as_nanos();
            Ok(BenchRecord {
                id: id.clone(),
                n: *n,
                denominator: config.denominator,
                eps: eps.clone(),
                profit: result.profit,
                opt: opts[i].clone(),
                wall_ns,
                tuples: result.stats.tuples_created,
                glue_ops: result.stats.glue_ops,
                slots: result.stats.slots,
                dominance_removals: result.stats.dominance_removals,
            })
        })
        .collect()
}

pub fn render_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for record in records {
        writeln!(out, "{}", record.csv_row()).unwrap();
    }
    out
}
