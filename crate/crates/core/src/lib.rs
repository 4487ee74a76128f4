//! Fully polynomial approximation scheme for the unbounded knapsack problem
//! with exact rational arithmetic, plus exact oracles and instance tooling.
//!
//! ```
//! use ukp_core::{solve, Instance, Rational};
//!
//! let instance = Instance::new(vec![
//!     ("1/2".parse().unwrap(), "2/5".parse().unwrap()),
//!     ("3/10".parse().unwrap(), "7/20".parse().unwrap()),
//!     ("3/50".parse().unwrap(), "1/20".parse().unwrap()),
//! ])
//! .unwrap();
//! let result = solve(&instance, &Rational::frac(1, 4)).unwrap();
//! assert_eq!(result.profit, Rational::frac(31, 25));
//! ```

pub mod bench;
pub mod dp;
pub mod error;
pub mod generate;
pub mod gluing;
pub mod io;
pub mod model;
pub mod oracle;
pub mod preprocess;
pub mod rational;
pub mod solution;
pub mod solver;
pub mod units;

pub use error::{Error, Result};
pub use model::{EpsParams, Instance, IntervalIndex, Item};
pub use rational::Rational;
pub use solution::SolutionMultiset;
pub use solver::{solve, solve_with_params, Branch, SolveResult, Stats};
