//! Exact solvers for the bilevel continuous knapsack problem in which a
//! leader sets the knapsack capacity and the follower's profit vector is
//! uncertain.
//!
//! All arithmetic is over exact rationals. The crate covers
//!
//! * the certain problem ([`certain`]),
//! * robust variants with finite ([`robust_finite`]), interval
//!   ([`interval`]) and hard uncertainty classes ([`hard`]),
//! * the stochastic variant ([`stochastic`]),
//!
//! all built on the piecewise-linear function algebra in [`pwl`].

pub mod certain;
mod envelope;
pub mod error;
mod expand;
pub mod hard;
pub mod interval;
pub mod prefix;
pub mod pwl;
pub mod rational;
pub mod result;
pub mod robust_finite;
pub mod stochastic;

pub use certain::{CapacityRange, Items, TiePolicy};
pub use error::{Error, Result};
pub use prefix::FractionalPrefix;
pub use pwl::Pwl;
pub use rational::Rational;
pub use result::{SolveResult, Witness};
