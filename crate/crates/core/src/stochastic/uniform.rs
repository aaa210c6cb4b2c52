//! Profits drawn independently and uniformly per item, either from finite
//! sets or from intervals.

use std::collections::HashMap;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::finite::{expected_of_orders, FiniteSupportDistribution};
use crate::certain::{follower_order, value_in_order, CapacityRange, Items, TiePolicy};
use crate::error::{ensure, Result};
use crate::expand::{choices, ranked_orders, scenario};
use crate::hard::product::scenario_count;
use crate::pwl::Pwl;
use crate::rational::{format_rational, int, to_f64, Rational};
use crate::result::{SolveResult, Witness};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductUniformDiscrete {
    supports: Vec<Vec<Rational>>,
}

impl ProductUniformDiscrete {
    /// Repeated values in a support are collapsed: each support is a set.
    pub fn new(supports: Vec<Vec<Rational>>, items: &Items) -> Result<Self> {
        ensure!(
            supports.len() == items.len(),
            "{} supports for {} items",
            supports.len(),
            items.len()
        );
        let mut out = Vec::with_capacity(supports.len());
        for (i, s) in supports.into_iter().enumerate() {
            ensure!(!s.is_empty(), "support {i} is empty");
            let mut set: Vec<Rational> = Vec::with_capacity(s.len());
            for c in s {
                ensure!(c.is_positive(), "support value {} for item {i} must be positive", format_rational(&c));
                if !set.contains(&c) {
                    set.push(c);
                }
            }
            out.push(set);
        }
        Ok(ProductUniformDiscrete { supports: out })
    }

    pub fn supports(&self) -> &[Vec<Rational>] {
        &self.supports
    }

    /// The same law as an explicit list of equally likely scenarios.
    pub fn to_finite_support(&self, items: &Items, budget: u64) -> Result<FiniteSupportDistribution> {
        let count = scenario_count(&self.supports, budget)?;
        let p = Rational::new(1.into(), count.into());
        let scenarios: Vec<Vec<Rational>> = choices(&self.supports).map(|ch| scenario(&self.supports, &ch)).collect();
        let probs = vec![p; scenarios.len()];
        FiniteSupportDistribution::new(scenarios, probs, items)
    }
}

/// Exact expected leader profile on `[0, Σ a]`, expanding every scenario.
pub fn expected_pwl_product_discrete(items: &Items, dist: &ProductUniformDiscrete, tie: TiePolicy, budget: u64) -> Result<Pwl> {
    expected_on(items, dist, tie, budget, &Rational::zero(), items.total_size())
}

fn expected_on(items: &Items, dist: &ProductUniformDiscrete, tie: TiePolicy, budget: u64, lo: &Rational, hi: &Rational) -> Result<Pwl> {
    let count = scenario_count(dist.supports(), budget)?;
    let p = Rational::new(1.into(), count.into());
    let weighted = ranked_orders(items, dist.supports(), tie).map(|o| (o, p.clone()));
    expected_of_orders(items, weighted, lo, hi)
}

pub fn solve_stochastic_product_discrete(
    items: &Items,
    dist: &ProductUniformDiscrete,
    range: &CapacityRange,
    tie: TiePolicy,
    budget: u64,
) -> Result<SolveResult> {
    let objective = expected_on(items, dist, tie, budget, &range.lo, &range.hi)?;
    let (b_star, value) = objective.maximize(&range.lo, &range.hi)?;
    Ok(SolveResult {
        b_star,
        value,
        objective,
        witness: Witness::default(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductUniformContinuous {
    boxes: Vec<(Rational, Rational)>,
}

impl ProductUniformContinuous {
    pub fn new(boxes: Vec<(Rational, Rational)>, items: &Items) -> Result<Self> {
        ensure!(
            boxes.len() == items.len(),
            "{} boxes for {} items",
            boxes.len(),
            items.len()
        );
        for (i, (lo, hi)) in boxes.iter().enumerate() {
            ensure!(
                lo.is_positive() && lo <= hi,
                "box {i} = [{}, {}] needs 0 < lo <= hi",
                format_rational(lo),
                format_rational(hi)
            );
        }
        Ok(ProductUniformContinuous { boxes })
    }

    pub fn boxes(&self) -> &[(Rational, Rational)] {
        &self.boxes
    }
}

/// Sample mean of the leader value with its standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    /// Exact mean of the sampled values.
    pub estimate: Rational,
    pub stderr: f64,
    pub samples: u64,
}

/// Uniform draw on `[0, 1)` with 53 random bits, as an exact rational.
fn unit(rng: &mut ChaCha8Rng) -> Rational {
    let k = rng.next_u64() >> 11;
    Rational::new(k.into(), (1u64 << 53).into())
}

/// Monte Carlo estimate of `E[d·x_c](b)` for `c` uniform on the boxes.
/// The same seed reproduces the same estimate bit for bit.
pub fn eval_stochastic_mc(
    items: &Items,
    dist: &ProductUniformContinuous,
    b: &Rational,
    tie: TiePolicy,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    ensure!(samples >= 1, "at least one sample is needed");
    items.check_capacity(b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // The value only depends on the follower's order.
    let mut cache: HashMap<Vec<usize>, Rational> = HashMap::new();
    let mut sum = Rational::zero();
    let mut sum_sq = Rational::zero();
    for _ in 0..samples {
        let c: Vec<Rational> = dist
            .boxes()
            .iter()
            .map(|(lo, hi)| if lo == hi { lo.clone() } else { lo + (hi - lo) * unit(&mut rng) })
            .collect();
        let order = follower_order(items, &c, tie)?;
        let v = cache
            .entry(order)
            .or_insert_with_key(|o| value_in_order(items, o, b))
            .clone();
        sum_sq += &v * &v;
        sum += v;
    }
    let n = int(samples as i64);
    let mean = &sum / &n;
    let stderr = if samples == 1 {
        0.0
    } else {
        let var = (sum_sq - &mean * &sum) / (&n - Rational::one());
        (to_f64(&var).max(0.0) / samples.to_f64().unwrap_or(f64::MAX)).sqrt()
    };
    Ok(MonteCarloEstimate {
        estimate: mean,
        stderr,
        samples,
    })
}
