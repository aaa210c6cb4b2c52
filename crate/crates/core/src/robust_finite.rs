//! Robust solver for an explicitly listed finite set of follower profit
//! vectors: the leader maximizes the lower envelope of the per-scenario
//! profiles.

use crate::certain::{follower_order, follower_solve, prefix_reaching, restricted_profile, CapacityRange, Items, TiePolicy};
use crate::error::{ensure, Result};
use crate::pwl::{lower_envelope, Pwl};
use crate::rational::Rational;
use crate::result::{SolveResult, Witness};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteUncertainty {
    scenarios: Vec<Vec<Rational>>,
}

impl FiniteUncertainty {
    pub fn new(scenarios: Vec<Vec<Rational>>, items: &Items) -> Result<Self> {
        ensure!(!scenarios.is_empty(), "the uncertainty set needs at least one scenario");
        for c in &scenarios {
            items.check_profits(c)?;
        }
        Ok(FiniteUncertainty { scenarios })
    }

    pub fn scenarios(&self) -> &[Vec<Rational>] {
        &self.scenarios
    }

    /// First index of each distinct scenario.
    fn distinct(&self) -> Vec<usize> {
        let mut seen = std::collections::HashSet::new();
        (0..self.scenarios.len())
            .filter(|&i| seen.insert(&self.scenarios[i]))
            .collect()
    }
}

/// `min_c f_c(b)` and the smallest scenario index attaining it.
pub fn eval_robust_finite(items: &Items, u: &FiniteUncertainty, b: &Rational, tie: TiePolicy) -> Result<(Rational, usize)> {
    items.check_capacity(b)?;
    let mut best: Option<(Rational, usize)> = None;
    for (i, c) in u.scenarios().iter().enumerate() {
        let v = follower_solve(items, c, b, tie)?.value(items);
        if best.as_ref().map_or(true, |(bv, _)| &v < bv) {
            best = Some((v, i));
        }
    }
    Ok(best.expect("nonempty uncertainty set"))
}

/// Lower envelope of the profiles of the given follower orders on the
/// range. Orders that agree up to capacity `hi` share a profile, which is
/// built once.
pub(crate) fn envelope_of_orders(items: &Items, orders: impl IntoIterator<Item = Vec<usize>>, range: &CapacityRange) -> Result<Pwl> {
    let mut profiles: Vec<Pwl> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for order in orders {
        let key = prefix_reaching(items, &order, &range.hi);
        if !seen.contains(key) {
            profiles.push(restricted_profile(items, key, &range.lo, &range.hi));
            seen.insert(key.to_vec());
        }
    }
    lower_envelope(&profiles)
}

/// Lower envelope of the scenario profiles on the range.
pub(crate) fn envelope_of_scenarios<'a>(
    items: &Items,
    scenarios: impl IntoIterator<Item = &'a Vec<Rational>>,
    range: &CapacityRange,
    tie: TiePolicy,
) -> Result<Pwl> {
    let orders = scenarios
        .into_iter()
        .map(|c| follower_order(items, c, tie))
        .collect::<Result<Vec<_>>>()?;
    envelope_of_orders(items, orders, range)
}

pub fn solve_robust_finite(items: &Items, u: &FiniteUncertainty, range: &CapacityRange, tie: TiePolicy) -> Result<SolveResult> {
    let distinct = u.distinct();
    let objective = envelope_of_scenarios(
        items,
        distinct.iter().map(|&i| &u.scenarios()[i]),
        range,
        tie,
    )?;
    let (b_star, value) = objective.maximize(&range.lo, &range.hi)?;
    let (worst, index) = eval_robust_finite(items, u, &b_star, tie)?;
    debug_assert_eq!(worst, value);
    let c = u.scenarios()[index].clone();
    let x = follower_solve(items, &c, &b_star, tie)?;
    Ok(SolveResult {
        b_star,
        value,
        objective,
        witness: Witness {
            scenario_index: Some(index),
            scenario: Some(c),
            follower_x: Some(x.x),
            ..Witness::default()
        },
    })
}
