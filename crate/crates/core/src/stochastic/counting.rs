//! Counting knapsack solutions with a stochastic solver: a family of
//! instances parameterized by `τ` whose expected profile has slope
//! `1 + τ - #{x : a*ᵀx <= b} / 2^{m-1}` right of each integer `b`.

use num_traits::{One, Zero};

use super::finite::solve_stochastic_finite;
use super::uniform::{ProductUniformContinuous, ProductUniformDiscrete};
use crate::certain::{CapacityRange, Items, TiePolicy};
use crate::error::{ensure, Error, Result};
use crate::rational::{format_rational, int, round_half_up, Rational};

/// `#{x ∈ {0,1}^m : a*ᵀx <= b*}` as a counting problem.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CountingInstance {
    a_star: Vec<u64>,
    b_star: u64,
}

impl CountingInstance {
    pub fn new(a_star: Vec<u64>, b_star: u64) -> Result<Self> {
        ensure!(!a_star.is_empty(), "counting needs at least one weight");
        ensure!(a_star.len() <= 62, "at most 62 weights are supported");
        ensure!(a_star.iter().all(|&x| x >= 1), "weights must be positive integers");
        let total = a_star
            .iter()
            .try_fold(0u64, |acc, &x| acc.checked_add(x))
            .ok_or_else(|| Error::invalid("weights overflow"))?;
        ensure!(b_star <= total, "b* = {b_star} exceeds Σa* = {total}");
        Ok(CountingInstance { a_star, b_star })
    }

    pub fn a_star(&self) -> &[u64] {
        &self.a_star
    }

    pub fn b_star(&self) -> u64 {
        self.b_star
    }

    pub fn m(&self) -> usize {
        self.a_star.len()
    }

    pub fn total(&self) -> u64 {
        self.a_star.iter().sum()
    }
}

/// Number of 0/1 vectors with `a*ᵀx <= b`, by dynamic programming over
/// capacities.
pub fn count_knapsack_exhaustive(a_star: &[u64], b: u64) -> u64 {
    let b = b as usize;
    let mut ways = vec![0u64; b + 1];
    ways[0] = 1;
    for &w in a_star {
        let w = w as usize;
        for s in (w..=b).rev() {
            ways[s] += ways[s - w];
        }
    }
    ways.iter().sum()
}

/// The instance of parameter `τ`: the first `m` items mirror `a*`, the last
/// one has size `Σa*` and a fixed profit of 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StochasticGadget {
    pub items: Items,
    pub dist: ProductUniformDiscrete,
    pub range: CapacityRange,
    pub tau: Rational,
    pub epsilon: Rational,
}

fn gadget_items(ci: &CountingInstance, tau: &Rational) -> Result<(Items, Rational)> {
    ensure!(
        tau >= &int(-1) && tau <= &int(1),
        "τ = {} must lie in [-1, 1]",
        format_rational(tau)
    );
    let total = int(ci.total() as i64);
    let mut a: Vec<Rational> = ci.a_star().iter().map(|&x| int(x as i64)).collect();
    let mut d: Vec<Rational> = a.iter().map(|x| x * (Rational::one() + tau)).collect();
    a.push(total.clone());
    d.push(&total * (tau - Rational::one()));
    Ok((Items::new(a, d)?, total))
}

pub fn gen_gadget_stochastic(ci: &CountingInstance, tau: &Rational) -> Result<StochasticGadget> {
    let (items, total) = gadget_items(ci, tau)?;
    let min_a = int(*ci.a_star().iter().min().expect("nonempty") as i64);
    let epsilon = min_a / (int(2) * &total);
    let mut supports: Vec<Vec<Rational>> = vec![vec![epsilon.clone(), Rational::one()]; ci.m()];
    supports.push(vec![Rational::one()]);
    let dist = ProductUniformDiscrete::new(supports, &items)?;
    let range = CapacityRange::new(Rational::zero(), total, &items)?;
    Ok(StochasticGadget {
        items,
        dist,
        range,
        tau: tau.clone(),
        epsilon,
    })
}

/// The continuous variant: item `i` draws its profit from
/// `[a_i/(2A), 3a_i/(2A)]` with `A = Σa*`, so its ratio beats the last
/// item's with probability exactly 1/2.
pub fn gen_gadget_stochastic_continuous(
    ci: &CountingInstance,
    tau: &Rational,
) -> Result<(Items, ProductUniformContinuous, CapacityRange)> {
    let (items, total) = gadget_items(ci, tau)?;
    let mut boxes: Vec<(Rational, Rational)> = ci
        .a_star()
        .iter()
        .map(|&x| {
            let x = int(x as i64);
            (&x / (int(2) * &total), int(3) * &x / (int(2) * &total))
        })
        .collect();
    boxes.push((Rational::one(), Rational::one()));
    let dist = ProductUniformContinuous::new(boxes, &items)?;
    let range = CapacityRange::new(Rational::zero(), total, &items)?;
    Ok((items, dist, range))
}

/// Bracket `s_lo < f₀'(b*) <= s_hi` on the gadget's slope right of `b*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisectionState {
    pub s_lo: Rational,
    pub s_hi: Rational,
    pub iteration: usize,
}

impl Default for BisectionState {
    fn default() -> Self {
        BisectionState {
            s_lo: int(-1),
            s_hi: int(1),
            iteration: 0,
        }
    }
}

impl BisectionState {
    /// The parameter probing the bracket midpoint.
    pub fn tau(&self) -> Rational {
        -(&self.s_lo + &self.s_hi) / int(2)
    }

    /// The profile for `τ` is concave with right slope `f₀' + τ` at `b*`,
    /// so its leftmost maximizer lies right of `b*` exactly when
    /// `f₀'(b*) > -τ`.
    pub fn update(&mut self, b_star: &Rational, maximizer: &Rational) {
        let mid = -self.tau();
        if b_star < maximizer {
            self.s_lo = mid;
        } else {
            self.s_hi = mid;
        }
        self.iteration += 1;
    }

    pub fn midpoint(&self) -> Rational {
        (&self.s_lo + &self.s_hi) / int(2)
    }
}

/// Counts knapsack solutions using only maximizers of gadget instances.
/// `solver` must return the leftmost maximizer of the expected profile.
pub fn count_knapsack_bisection(
    ci: &CountingInstance,
    mut solver: impl FnMut(&StochasticGadget) -> Result<Rational>,
) -> Result<u64> {
    let m = ci.m();
    if ci.b_star() == ci.total() {
        return Ok(1u64 << m);
    }
    let b_star = int(ci.b_star() as i64);
    let mut state = BisectionState::default();
    for _ in 0..=m {
        let gadget = gen_gadget_stochastic(ci, &state.tau())?;
        let maximizer = solver(&gadget)?;
        state.update(&b_star, &maximizer);
    }
    let scale = Rational::from_integer(num_bigint::BigInt::one() << (m - 1));
    let count = round_half_up(&(scale * (Rational::one() - state.midpoint())));
    count
        .try_into()
        .map_err(|_| Error::invariant("bisection count out of range"))
}

/// The exact callback: expands the gadget distribution into its `2^m`
/// scenarios and solves the finite-support problem.
pub fn exact_gadget_solver(budget: u64) -> impl FnMut(&StochasticGadget) -> Result<Rational> {
    // With m = 1 the first item ties the last one in ratio when drawn at 1;
    // the construction needs it packed first, which the optimistic policy
    // does. For m >= 2 there are no relevant ties.
    move |g| {
        let dist = g.dist.to_finite_support(&g.items, budget)?;
        Ok(solve_stochastic_finite(&g.items, &dist, &g.range, TiePolicy::Optimistic)?.b_star)
    }
}
