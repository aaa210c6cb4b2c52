//! Uncertainty sets that are products of finite per-item option sets, and
//! the subset-sum gadget that makes them hard.

use num_traits::Zero;

use super::subset_sum::{largest_subset_sum_at_most, smallest_subset_sum_above, SubsetSumInstance, DEFAULT_SUBSET_BUDGET};
use crate::certain::{follower_solve, value_in_order, CapacityRange, Items, TiePolicy};
use crate::error::{ensure, Error, Result};
use crate::rational::{format_rational, int, rat, Rational};
use crate::result::{SolveResult, Witness};
use crate::expand::{choices, ranked_orders, scenario};
use crate::robust_finite::envelope_of_orders;

pub const DEFAULT_PRODUCT_BUDGET: u64 = 1 << 20;

/// `U = U_1 × … × U_n` with each `U_i` a finite set of positive profits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductFiniteUncertainty {
    options: Vec<Vec<Rational>>,
}

impl ProductFiniteUncertainty {
    pub fn new(options: Vec<Vec<Rational>>, items: &Items) -> Result<Self> {
        ensure!(
            options.len() == items.len(),
            "{} option sets for {} items",
            options.len(),
            items.len()
        );
        for (i, o) in options.iter().enumerate() {
            ensure!(!o.is_empty(), "option set {i} is empty");
            for c in o {
                ensure!(
                    c > &Rational::zero(),
                    "option {} for item {i} must be positive",
                    format_rational(c)
                );
            }
        }
        Ok(ProductFiniteUncertainty { options })
    }

    pub fn options(&self) -> &[Vec<Rational>] {
        &self.options
    }

    /// Option sets with duplicates removed, first occurrence kept.
    fn distinct(&self) -> Vec<Vec<Rational>> {
        self.options
            .iter()
            .map(|o| {
                let mut out: Vec<Rational> = Vec::with_capacity(o.len());
                for c in o {
                    if !out.contains(c) {
                        out.push(c.clone());
                    }
                }
                out
            })
            .collect()
    }
}

/// Number of scenarios after deduplication, or the budget error.
pub(crate) fn scenario_count(options: &[Vec<Rational>], budget: u64) -> Result<u64> {
    let mut count: u64 = 1;
    for o in options {
        count = count.saturating_mul(o.len() as u64);
    }
    if count > budget {
        return Err(Error::BudgetExceeded {
            what: "product scenario expansion",
            needed: format!("{count} scenarios"),
            budget: format!("{budget} scenarios"),
        });
    }
    Ok(count)
}

/// `min_{c∈U} f_c(b)` with the first attaining scenario.
pub fn eval_product_finite(
    items: &Items,
    u: &ProductFiniteUncertainty,
    b: &Rational,
    tie: TiePolicy,
    budget: u64,
) -> Result<(Rational, Vec<Rational>)> {
    items.check_capacity(b)?;
    let options = u.distinct();
    scenario_count(&options, budget)?;
    let mut best: Option<(Rational, usize)> = None;
    for (k, order) in ranked_orders(items, &options, tie).enumerate() {
        let v = value_in_order(items, &order, b);
        if best.as_ref().map_or(true, |(bv, _)| &v < bv) {
            best = Some((v, k));
        }
    }
    let (v, k) = best.expect("product of nonempty sets");
    let choice = choices(&options).nth(k).expect("index from the same enumeration");
    Ok((v, scenario(&options, &choice)))
}

/// Exact solve by expanding the product into explicit scenarios.
pub fn solve_product_finite(
    items: &Items,
    u: &ProductFiniteUncertainty,
    range: &CapacityRange,
    tie: TiePolicy,
    budget: u64,
) -> Result<SolveResult> {
    let options = u.distinct();
    scenario_count(&options, budget)?;
    let objective = envelope_of_orders(items, ranked_orders(items, &options, tie), range)?;
    let (b_star, value) = objective.maximize(&range.lo, &range.hi)?;
    let (worst, c) = eval_product_finite(items, u, &b_star, tie, budget)?;
    if worst != value {
        return Err(Error::invariant("product envelope disagrees with direct evaluation"));
    }
    let x = follower_solve(items, &c, &b_star, tie)?;
    Ok(SolveResult {
        b_star,
        value,
        objective,
        witness: Witness {
            scenario: Some(c),
            follower_x: Some(x.x),
            ..Witness::default()
        },
    })
}

/// A generated product-gadget instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductGadget {
    pub items: Items,
    pub uncertainty: ProductFiniteUncertainty,
    pub range: CapacityRange,
}

fn epsilon() -> Rational {
    rat(1, 4)
}

fn big_m(ss: &SubsetSumInstance) -> Rational {
    int(ss.total() as i64) + epsilon()
}

/// Items `a = (ε, w, M)`, `d = (-M, -w, ε)`, range `[W, W + 2ε]` and
/// `U_i = {i·a_i, (n+i)·a_i}`, which puts every lower ratio below every
/// upper ratio.
pub fn gen_gadget_product(ss: &SubsetSumInstance) -> Result<ProductGadget> {
    let eps = epsilon();
    let m_big = big_m(ss);
    let n = ss.m() + 2;
    let w: Vec<Rational> = ss.w().iter().map(|&x| int(x as i64)).collect();
    let mut a = vec![eps.clone()];
    a.extend(w.iter().cloned());
    a.push(m_big.clone());
    let mut d = vec![-m_big.clone()];
    d.extend(w.iter().map(|x| -x));
    d.push(eps.clone());
    let options = a
        .iter()
        .enumerate()
        .map(|(i, ai)| vec![ai * int(i as i64 + 1), ai * int((n + i + 1) as i64)])
        .collect();
    let items = Items::new(a, d)?;
    let uncertainty = ProductFiniteUncertainty::new(options, &items)?;
    let lo = int(ss.target() as i64);
    let hi = &lo + &eps * int(2);
    let range = CapacityRange::new(lo, hi, &items)?;
    Ok(ProductGadget { items, uncertainty, range })
}

/// Solves the gadget and answers the subset-sum question: YES iff the
/// leader's optimum is not the right end of the range.
pub fn decide_subset_sum_product(ss: &SubsetSumInstance, budget: u64) -> Result<bool> {
    let g = gen_gadget_product(ss)?;
    let r = solve_product_finite(&g.items, &g.uncertainty, &g.range, TiePolicy::Pessimistic, budget)?;
    Ok(r.b_star != g.range.hi)
}

/// Closed form of the gadget objective on `[ε, M)` in terms of the two
/// consecutive subset sums around `b - ε`.
pub fn shape_f_product(ss: &SubsetSumInstance, b: &Rational) -> Result<Rational> {
    let eps = epsilon();
    let m_big = big_m(ss);
    if b < &eps || b >= &m_big {
        return Err(Error::OutOfDomain {
            value: format_rational(b),
            lo: format_rational(&eps),
            hi: format_rational(&m_big),
        });
    }
    // b - ε >= 0, and subset sums are integers, so flooring is exact.
    let cap = (b - &eps).floor().to_integer();
    let cap: u64 = cap.try_into().map_err(|_| Error::invalid("capacity out of range"))?;
    let v1 = largest_subset_sum_at_most(ss.w(), cap, DEFAULT_SUBSET_BUDGET)?;
    let v2 = smallest_subset_sum_above(ss.w(), v1, DEFAULT_SUBSET_BUDGET)?;
    let v1 = int(v1 as i64);
    let keep = -&m_big - &v1 + &eps / &m_big * (b - &v1 - &eps);
    match v2.map(|v| int(v as i64)) {
        Some(v2) if b >= &v2 => {
            let switch = -(&m_big / &eps) * (b - &v2) - &v2;
            Ok(keep.min(switch))
        }
        _ => Ok(keep),
    }
}
