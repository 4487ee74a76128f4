//! Text formats: instance files and the line-oriented solver output.
//!
//! Instance files hold one directive per line:
//!
//! ```text
//! # comment
//! c 1
//! item 1/2 2/5
//! item 0.3 0.35
//! ```
//!
//! `c` sets the capacity (default 1, at most once). Rationals are `a/b`,
//! integers or exact decimals.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Instance, Item};
use crate::rational::Rational;
use crate::solution::SolutionMultiset;
use crate::solver::{Branch, SolveResult};

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_rational(line: usize, token: &str) -> Result<Rational> {
    token
        .parse()
        .map_err(|_| parse_error(line, format!("malformed rational `{token}`")))
}

/// Strips a trailing `#` comment and surrounding blanks.
fn content(raw: &str) -> &str {
    raw.split_once('#').map_or(raw, |(head, _)| head).trim()
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut capacity: Option<(usize, Rational)> = None;
    let mut items: Vec<(usize, Rational, Rational)> = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = number + 1;
        let tokens: Vec<&str> = content(raw).split_whitespace().collect();
        match tokens.as_slice() {
            [] => {}
            ["c", value] => {
                if capacity.is_some() {
                    return Err(parse_error(line, "capacity given twice"));
                }
                let value = parse_rational(line, value)?;
                if value.is_zero() {
                    return Err(parse_error(line, "nonpositive capacity"));
                }
                capacity = Some((line, value));
            }
            ["item", profit, size] => {
                let profit = parse_rational(line, profit)?;
                let size = parse_rational(line, size)?;
                if profit.is_zero() {
                    return Err(parse_error(line, "nonpositive profit"));
                }
                if size.is_zero() {
                    return Err(parse_error(line, "nonpositive size"));
                }
                items.push((line, profit, size));
            }
            ["c", ..] | ["item", ..] => {
                return Err(parse_error(line, format!("wrong number of fields in `{}`", content(raw))))
            }
            [other, ..] => return Err(parse_error(line, format!("unknown directive `{other}`"))),
        }
    }

    let capacity = capacity.map_or_else(Rational::one, |(_, c)| c);
    // Per-line checks so that errors carry the offending line.
    for (index, (line, profit, size)) in items.iter().enumerate() {
        let size = size / &capacity;
        if size <= Rational::one() {
            Item::new(index, profit.clone(), size).map_err(|e| parse_error(*line, e.to_string()))?;
        }
    }
    Instance::with_capacity(
        &capacity,
        items.into_iter().map(|(_, p, s)| (p, s)).collect(),
    )
}

/// Renders with capacity 1; parsing the text gives the same instance when
/// the item indices are `0..n`.
pub fn render_instance(instance: &Instance) -> String {
    let mut out = String::from("c 1/1\n");
    for item in instance.items() {
        writeln!(out, "item {} {}", item.profit, item.size).unwrap();
    }
    out
}

/// Line-oriented result: `profit`, `size`, `branch`, then `take` and
/// `counter` lines.
pub fn render_machine(result: &SolveResult) -> String {
    let mut out = String::new();
    writeln!(out, "profit {}", result.profit).unwrap();
    writeln!(out, "size {}", result.solution.total_size()).unwrap();
    writeln!(out, "branch {}", result.branch).unwrap();
    for (index, mult) in result.solution.counts() {
        writeln!(out, "take {index} {mult}").unwrap();
    }
    for (name, value) in result.stats.entries() {
        writeln!(out, "counter {name} {value}").unwrap();
    }
    out
}

/// Human-readable summary.
pub fn render_text(result: &SolveResult, instance: &Instance) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "profit {} ({:.6}), size {}, branch {}",
        result.profit,
        result.profit.to_f64(),
        result.solution.total_size(),
        result.branch
    )
    .unwrap();
    writeln!(
        out,
        "eps {} (kappa {}), greedy bound {}",
        result.params.eps, result.params.kappa, result.params.p0
    )
    .unwrap();
    if instance.dropped() > 0 {
        writeln!(out, "{} oversized item(s) dropped", instance.dropped()).unwrap();
    }
    for (index, mult) in result.solution.counts() {
        let item = instance.item(*index).expect("solution refers to instance items");
        writeln!(out, "  {mult} x item {index} (profit {}, size {})", item.profit, item.size).unwrap();
    }
    let counters: Vec<String> = result
        .stats
        .entries()
        .iter()
        .map(|(name, value)| format!("{name}={value}"))
        .collect();
    writeln!(out, "counters: {}", counters.join(" ")).unwrap();
    out
}

/// Parsed form of [`render_machine`] output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineOutput {
    pub profit: Rational,
    pub size: Rational,
    pub branch: Branch,
    pub takes: BTreeMap<usize, u64>,
    pub counters: Vec<(String, u64)>,
}

impl MachineOutput {
    /// Recomputes the totals of the `take` lines against `instance`.
    pub fn retotal(&self, instance: &Instance) -> Result<SolutionMultiset> {
        SolutionMultiset::from_counts(self.takes.clone(), instance)
    }
}

pub fn parse_machine(text: &str) -> Result<MachineOutput> {
    let mut profit = None;
    let mut size = None;
    let mut branch = None;
    let mut takes = BTreeMap::new();
    let mut counters = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = number + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        let int = |token: &str| -> Result<u64> {
            token
                .parse()
                .map_err(|_| parse_error(line, format!("malformed integer `{token}`")))
        };
        match tokens.as_slice() {
            [] => {}
            ["profit", value] => profit = Some(parse_rational(line, value)?),
            ["size", value] => size = Some(parse_rational(line, value)?),
            ["branch", name] => {
                branch = Some(name.parse().map_err(|e: Error| parse_error(line, e.to_string()))?)
            }
            ["take", index, mult] => {
                let index = int(index)? as usize;
                if takes.insert(index, int(mult)?).is_some() {
                    return Err(parse_error(line, format!("item {index} taken twice")));
                }
            }
            ["counter", name, value] => counters.push((name.to_string(), int(value)?)),
            _ => return Err(parse_error(line, format!("unrecognized line `{raw}`"))),
        }
    }
    let missing = |what: &str| parse_error(0, format!("missing `{what}` line"));
    Ok(MachineOutput {
        profit: profit.ok_or_else(|| missing("profit"))?,
        size: size.ok_or_else(|| missing("size"))?,
        branch: branch.ok_or_else(|| missing("branch"))?,
        takes,
        counters,
    })
}
