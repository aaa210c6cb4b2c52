use crate::prefix::FractionalPrefix;
use crate::pwl::Pwl;
use crate::rational::Rational;

/// Optimal capacity, its objective value, and how the worst case arises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub b_star: Rational,
    pub value: Rational,
    /// The leader's objective restricted to the capacity range.
    pub objective: Pwl,
    pub witness: Witness,
}

/// Evidence for the value at `b_star`. Which fields are set depends on the
/// solver.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Witness {
    /// Index of the attaining scenario in the caller's list.
    pub scenario_index: Option<usize>,
    /// The follower profit vector realising the worst case.
    pub scenario: Option<Vec<Rational>>,
    pub follower_x: Option<Vec<Rational>>,
    /// Head item of the attaining interval-order iteration.
    pub head: Option<usize>,
    pub prefix: Option<FractionalPrefix>,
    /// Largest achievable subset sum in the gadget-family solvers.
    pub subset_sum: Option<Rational>,
}
