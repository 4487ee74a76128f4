//! Seeded random instances on a `1/D` size grid.
//!
//! Generation uses `ChaCha8Rng::seed_from_u64(seed)`, so an instance depends
//! only on `(n, D, seed, profile)`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Profile {
    /// Profits uniform on `{1, .., D} / D`.
    Uniform,
    /// Profit within ten percent of the size.
    Correlated,
    /// Mostly tiny, low-profit items.
    SmallHeavy,
}

impl Profile {
    pub const ALL: [Profile; 3] = [Profile::Uniform, Profile::Correlated, Profile::SmallHeavy];

    pub fn name(self) -> &'static str {
        match self {
            Profile::Uniform => "uniform",
            Profile::Correlated => "correlated",
            Profile::SmallHeavy => "small-heavy",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Profile::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown profile `{s}`")))
    }
}

fn frac(numer: u64, denom: u64) -> Rational {
    Rational::new(numer, denom).expect("positive denominator")
}

pub fn generate_instance(n: usize, denominator: u64, seed: u64, profile: Profile) -> Result<Instance> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if denominator < 2 {
        return Err(Error::InvalidParameter("D must be at least 2".into()));
    }
    let d = denominator;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = Vec::with_capacity(n);
    for _ in 0..n {
        let item = match profile {
            Profile::Uniform => (frac(rng.gen_range(1..=d), d), frac(rng.gen_range(1..=d), d)),
            Profile::Correlated => {
                let u = rng.gen_range(1..=d);
                let percent = (100 + rng.gen_range(-10i64..=10)) as u64;
                let profit = frac(u * percent, 100 * d).min(Rational::one());
                (profit, frac(u, d))
            }
            Profile::SmallHeavy => {
                if rng.gen_range(0..5) < 4 {
                    let u = rng.gen_range(1..=(d / 16).max(1));
                    let m = rng.gen_range(1..=24);
                    (frac(u * m, 16 * d), frac(u, d))
                } else {
                    (frac(rng.gen_range(1..=d), d), frac(rng.gen_range(1..=d), d))
                }
            }
        };
        items.push(item);
    }
    Instance::new(items)
}
