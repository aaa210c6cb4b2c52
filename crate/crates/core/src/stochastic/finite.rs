//! Distributions with finite support: the leader maximizes the
//! probability-weighted sum of the scenario profiles.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::certain::{follower_order, prefix_reaching, restricted_profile, value_in_order, CapacityRange, Items, TiePolicy};
use crate::error::{ensure, Result};
use crate::pwl::{weighted_sum, Pwl};
use crate::rational::{format_rational, Rational};
use crate::result::{SolveResult, Witness};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSupportDistribution {
    scenarios: Vec<Vec<Rational>>,
    probs: Vec<Rational>,
}

impl FiniteSupportDistribution {
    pub fn new(scenarios: Vec<Vec<Rational>>, probs: Vec<Rational>, items: &Items) -> Result<Self> {
        ensure!(!scenarios.is_empty(), "the support needs at least one scenario");
        ensure!(
            scenarios.len() == probs.len(),
            "{} scenarios but {} probabilities",
            scenarios.len(),
            probs.len()
        );
        for c in &scenarios {
            items.check_profits(c)?;
        }
        for (i, p) in probs.iter().enumerate() {
            ensure!(
                p.is_positive() && p <= &Rational::one(),
                "probability {} of scenario {i} must lie in (0, 1]",
                format_rational(p)
            );
        }
        let total: Rational = probs.iter().sum();
        ensure!(
            total.is_one(),
            "probabilities sum to {}, not 1",
            format_rational(&total)
        );
        Ok(FiniteSupportDistribution { scenarios, probs })
    }

    pub fn scenarios(&self) -> &[Vec<Rational>] {
        &self.scenarios
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }
}

/// `Σ w · f_order` on `[lo, hi]`. Orders that agree up to capacity `hi`
/// share a profile and their weights are pooled first.
pub(crate) fn expected_of_orders(
    items: &Items,
    weighted: impl IntoIterator<Item = (Vec<usize>, Rational)>,
    lo: &Rational,
    hi: &Rational,
) -> Result<Pwl> {
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut keys: Vec<Vec<usize>> = Vec::new();
    let mut weights: Vec<Rational> = Vec::new();
    for (order, w) in weighted {
        let key = prefix_reaching(items, &order, hi);
        match index.get(key) {
            Some(&k) => weights[k] += w,
            None => {
                index.insert(key.to_vec(), keys.len());
                keys.push(key.to_vec());
                weights.push(w);
            }
        }
    }
    let profiles: Vec<Pwl> = keys.iter().map(|k| restricted_profile(items, k, lo, hi)).collect();
    weighted_sum(&profiles, &weights)
}

fn weighted_orders(items: &Items, dist: &FiniteSupportDistribution, tie: TiePolicy) -> Result<Vec<(Vec<usize>, Rational)>> {
    dist.scenarios()
        .iter()
        .zip(dist.probs())
        .map(|(c, p)| Ok((follower_order(items, c, tie)?, p.clone())))
        .collect()
}

/// The expected leader value `E[d·x_c]` at `b`.
pub fn eval_stochastic_finite(items: &Items, dist: &FiniteSupportDistribution, b: &Rational, tie: TiePolicy) -> Result<Rational> {
    items.check_capacity(b)?;
    let mut total = Rational::zero();
    for (order, p) in weighted_orders(items, dist, tie)? {
        total += p * value_in_order(items, &order, b);
    }
    Ok(total)
}

pub fn solve_stochastic_finite(
    items: &Items,
    dist: &FiniteSupportDistribution,
    range: &CapacityRange,
    tie: TiePolicy,
) -> Result<SolveResult> {
    let objective = expected_of_orders(items, weighted_orders(items, dist, tie)?, &range.lo, &range.hi)?;
    let (b_star, value) = objective.maximize(&range.lo, &range.hi)?;
    Ok(SolveResult {
        b_star,
        value,
        objective,
        witness: Witness::default(),
    })
}
