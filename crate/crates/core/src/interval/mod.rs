//! Robust problem with componentwise interval uncertainty on the follower's
//! profits. Follower orders are exactly the linear extensions of an
//! interval order, so the adversary and the leader's objective can be
//! computed head by head instead of over all extensions.

mod adversary;
mod leader;
mod order;

pub use adversary::{adversary_solve, recover_scenario, AdversarySolution};
pub use leader::{interval_objective, oracle_solve_interval, solve_robust_interval};
pub use order::{
    build_interval_order, enumerate_linear_extensions, optimistic_preprocess, order_for_policy, IntervalOrder,
    IntervalUncertainty, DEFAULT_EXTENSION_BOUND,
};
