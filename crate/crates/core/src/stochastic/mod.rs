//! The stochastic variant: the follower's profits are random and the leader
//! maximizes the expected value.

pub mod counting;
pub mod finite;
pub mod uniform;

pub use counting::{
    count_knapsack_bisection, count_knapsack_exhaustive, exact_gadget_solver, gen_gadget_stochastic, gen_gadget_stochastic_continuous,
    BisectionState, CountingInstance, StochasticGadget,
};
pub use finite::{eval_stochastic_finite, solve_stochastic_finite, FiniteSupportDistribution};
pub use uniform::{
    eval_stochastic_mc, expected_pwl_product_discrete, solve_stochastic_product_discrete, MonteCarloEstimate, ProductUniformContinuous,
    ProductUniformDiscrete,
};
