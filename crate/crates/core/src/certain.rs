//! The deterministic bilevel continuous knapsack problem.
//!
//! The leader picks a capacity `b`, the follower fills a continuous
//! knapsack greedily by profit ratio `c_i / a_i`, and the leader collects
//! `d·x`. For a fixed `c` the leader's objective is piecewise linear in `b`
//! with breakpoints at the prefix sums of the follower's item order.

use num_traits::{One, Signed, Zero};

use crate::error::{ensure, Error, Result};
use crate::prefix::FractionalPrefix;
use crate::pwl::Pwl;
use crate::rational::{format_rational, sum, Rational};
use crate::result::{SolveResult, Witness};

/// Item sizes `a > 0` and leader values `d` (objective form `d·x`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Items {
    a: Vec<Rational>,
    d: Vec<Rational>,
    total: Rational,
}

impl Items {
    pub fn new(a: Vec<Rational>, d: Vec<Rational>) -> Result<Self> {
        ensure!(!a.is_empty(), "at least one item is required");
        ensure!(
            a.len() == d.len(),
            "{} item sizes but {} leader values",
            a.len(),
            d.len()
        );
        for (i, ai) in a.iter().enumerate() {
            ensure!(
                ai.is_positive(),
                "item size a[{i}] = {} must be positive",
                format_rational(ai)
            );
        }
        let total = sum(&a);
        Ok(Items { a, d, total })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn a(&self) -> &[Rational] {
        &self.a
    }

    pub fn d(&self) -> &[Rational] {
        &self.d
    }

    /// `Σ a_i`, the largest meaningful capacity.
    pub fn total_size(&self) -> &Rational {
        &self.total
    }

    /// Leader's value density `d_i / a_i`.
    pub fn density(&self, i: usize) -> Rational {
        &self.d[i] / &self.a[i]
    }

    pub(crate) fn check_capacity(&self, b: &Rational) -> Result<()> {
        if b.is_negative() || b > &self.total {
            return Err(Error::OutOfDomain {
                value: format_rational(b),
                lo: "0".into(),
                hi: format_rational(&self.total),
            });
        }
        Ok(())
    }

    /// Validates a follower profit vector: length `n`, strictly positive.
    pub fn check_profits(&self, c: &[Rational]) -> Result<()> {
        ensure!(
            c.len() == self.len(),
            "profit vector has {} entries, expected {}",
            c.len(),
            self.len()
        );
        for (i, ci) in c.iter().enumerate() {
            ensure!(
                ci.is_positive(),
                "follower profit c[{i}] = {} must be positive",
                format_rational(ci)
            );
        }
        Ok(())
    }
}

/// The leader's admissible capacities `[lo, hi] ⊆ [0, Σ a_i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityRange {
    pub lo: Rational,
    pub hi: Rational,
}

impl CapacityRange {
    pub fn new(lo: Rational, hi: Rational, items: &Items) -> Result<Self> {
        ensure!(
            !lo.is_negative() && lo <= hi && &hi <= items.total_size(),
            "capacity range [{}, {}] must satisfy 0 <= lo <= hi <= {}",
            format_rational(&lo),
            format_rational(&hi),
            format_rational(items.total_size())
        );
        Ok(CapacityRange { lo, hi })
    }

    /// The whole range `[0, Σ a_i]`.
    pub fn full(items: &Items) -> Self {
        CapacityRange {
            lo: Rational::zero(),
            hi: items.total_size().clone(),
        }
    }
}

/// How the follower chooses among equally profitable orders.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TiePolicy {
    /// In the leader's favour: equal ratios sorted by `d_i / a_i` descending.
    Optimistic,
    /// Against the leader: equal ratios sorted by `d_i / a_i` ascending.
    #[default]
    Pessimistic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FollowerSolution {
    pub x: Vec<Rational>,
}

impl FollowerSolution {
    pub fn value(&self, items: &Items) -> Rational {
        self.x.iter().zip(items.d()).map(|(x, d)| x * d).sum()
    }
}

/// The three equivalent leader objectives `d·x − δb`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedObjective {
    /// `δ = 0` form: `d − δa`.
    pub d_c: Vec<Rational>,
    /// Nonnegative form: `d − εa`, paired with `delta_b`.
    pub d_b: Vec<Rational>,
    pub delta_b: Rational,
    /// `ε = min(δ, min_i d_i / a_i)`.
    pub epsilon: Rational,
}

/// Rewrites `d·x − δb` using `a·x = b` into the `δ = 0` form and the
/// nonnegative-coefficient form.
pub fn normalize_objective(d_raw: &[Rational], delta: &Rational, a: &[Rational]) -> Result<NormalizedObjective> {
    ensure!(
        d_raw.len() == a.len() && !a.is_empty(),
        "{} leader values but {} item sizes",
        d_raw.len(),
        a.len()
    );
    ensure!(a.iter().all(|x| x.is_positive()), "item sizes must be positive");
    let min_density = d_raw
        .iter()
        .zip(a)
        .map(|(d, a)| d / a)
        .min()
        .expect("nonempty");
    let epsilon = delta.clone().min(min_density);
    let d_c = d_raw.iter().zip(a).map(|(d, a)| d - delta * a).collect();
    let d_b = d_raw.iter().zip(a).map(|(d, a)| d - &epsilon * a).collect();
    Ok(NormalizedObjective {
        d_c,
        d_b,
        delta_b: delta - &epsilon,
        epsilon,
    })
}

/// The follower's packing order for profits `c`: ratio `c_i / a_i`
/// descending, ties by the policy's `d_i / a_i` order, then by index.
pub fn follower_order(items: &Items, c: &[Rational], tie: TiePolicy) -> Result<Vec<usize>> {
    items.check_profits(c)?;
    let ratio: Vec<Rational> = c.iter().zip(items.a()).map(|(c, a)| c / a).collect();
    let density: Vec<Rational> = (0..items.len()).map(|i| items.density(i)).collect();
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&i, &j| {
        ratio[j]
            .cmp(&ratio[i])
            .then_with(|| match tie {
                TiePolicy::Optimistic => density[j].cmp(&density[i]),
                TiePolicy::Pessimistic => density[i].cmp(&density[j]),
            })
            .then(i.cmp(&j))
    });
    Ok(order)
}

/// Greedy fill of capacity `b` along `order`.
pub fn fill_in_order(items: &Items, order: &[usize], b: &Rational) -> Vec<Rational> {
    let mut x = vec![Rational::zero(); items.len()];
    let mut left = b.clone();
    for &i in order {
        if !left.is_positive() {
            break;
        }
        let a = &items.a()[i];
        if a <= &left {
            x[i] = Rational::one();
            left -= a;
        } else {
            x[i] = &left / a;
            left = Rational::zero();
        }
    }
    x
}

/// `d·x` for the greedy fill of `b` along `order`.
pub(crate) fn value_in_order(items: &Items, order: &[usize], b: &Rational) -> Rational {
    let mut left = b.clone();
    let mut v = Rational::zero();
    for &i in order {
        if left.is_zero() {
            break;
        }
        let a = &items.a()[i];
        if a <= &left {
            v += &items.d()[i];
            left -= a;
        } else {
            v += &left / a * &items.d()[i];
            left = Rational::zero();
        }
    }
    v
}

/// Optimal follower response to profits `c` at capacity `b`.
pub fn follower_solve(items: &Items, c: &[Rational], b: &Rational, tie: TiePolicy) -> Result<FollowerSolution> {
    items.check_capacity(b)?;
    let order = follower_order(items, c, tie)?;
    Ok(FollowerSolution {
        x: fill_in_order(items, &order, b),
    })
}

/// Orders `subset` by `d_i / a_i` ascending, index breaking ties. This is
/// the order in which a minimizing packer takes items.
pub(crate) fn ascending_density(items: &Items, subset: &[usize]) -> Vec<usize> {
    let mut keyed: Vec<(Rational, usize)> = subset.iter().map(|&i| (items.density(i), i)).collect();
    keyed.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)));
    keyed.into_iter().map(|(_, i)| i).collect()
}

fn check_subset(items: &Items, subset: &[usize]) -> Result<()> {
    let mut seen = vec![false; items.len()];
    for &i in subset {
        ensure!(i < items.len(), "item index {i} out of range");
        ensure!(!seen[i], "item {i} listed twice");
        seen[i] = true;
    }
    Ok(())
}

/// Minimizes `d·x` subject to `a·x = b`, `0 <= x <= 1`, using only items of
/// `subset`. The result always designates a last item, even when `b` is
/// exactly a prefix sum (then its fraction is 1).
pub fn dantzig_min(subset: &[usize], items: &Items, b: &Rational) -> Result<FractionalPrefix> {
    check_subset(items, subset)?;
    let cap: Rational = subset.iter().map(|&i| &items.a()[i]).sum();
    if !b.is_positive() || b > &cap {
        return Err(Error::OutOfDomain {
            value: format_rational(b),
            lo: "0 (exclusive)".into(),
            hi: format_rational(&cap),
        });
    }
    Ok(dantzig_min_sorted(&ascending_density(items, subset), items, b))
}

/// [`dantzig_min`] on a subset already in ascending-density order, with
/// `0 < b <= Σ a` guaranteed by the caller.
pub(crate) fn dantzig_min_sorted(order: &[usize], items: &Items, b: &Rational) -> FractionalPrefix {
    let mut taken = Vec::new();
    let mut left = b.clone();
    for &i in order {
        let a = &items.a()[i];
        taken.push(i);
        if a >= &left {
            return FractionalPrefix::new(taken, i, &left / a);
        }
        left -= a;
    }
    unreachable!("capacity checked by caller")
}

/// The leader's value as a function of capacity when items are packed in
/// `order`: vertices at the prefix sums, slope `d_j / a_j` on item `j`.
pub fn profile_for_order(items: &Items, order: &[usize]) -> Pwl {
    let mut pts = Vec::with_capacity(order.len() + 1);
    let mut b = Rational::zero();
    let mut v = Rational::zero();
    pts.push((b.clone(), v.clone()));
    for &i in order {
        b += &items.a()[i];
        v += &items.d()[i];
        pts.push((b.clone(), v.clone()));
    }
    Pwl::from_sorted(pts)
}

/// The shortest prefix of `order` whose total size reaches `hi`. Only these
/// items shape the profile on capacities up to `hi`.
pub(crate) fn prefix_reaching<'a>(items: &Items, order: &'a [usize], hi: &Rational) -> &'a [usize] {
    let mut b = Rational::zero();
    for (k, &i) in order.iter().enumerate() {
        if &b >= hi {
            return &order[..k];
        }
        b += &items.a()[i];
    }
    order
}

/// `profile_for_order(items, order).restrict(lo, hi)` without building the
/// parts outside the range. Needs `0 <= lo <= hi <= Σ_{order} a`.
pub(crate) fn restricted_profile(items: &Items, order: &[usize], lo: &Rational, hi: &Rational) -> Pwl {
    let mut pts = Vec::new();
    let (mut b0, mut v0) = (Rational::zero(), Rational::zero());
    if lo.is_zero() {
        pts.push((b0.clone(), v0.clone()));
        if hi.is_zero() {
            return Pwl::from_sorted(pts);
        }
    }
    for &i in order {
        let (a, d) = (&items.a()[i], &items.d()[i]);
        let b1 = &b0 + a;
        let v1 = &v0 + d;
        if &b1 >= lo {
            let at = |x: &Rational| &v0 + (x - &b0) * d / a;
            if pts.is_empty() {
                pts.push((lo.clone(), at(lo)));
            }
            if &b1 >= hi {
                pts.push((hi.clone(), at(hi)));
                break;
            }
            pts.push((b1.clone(), v1.clone()));
        }
        b0 = b1;
        v0 = v1;
    }
    Pwl::from_sorted(pts)
}

/// Minimizing packer's profile over `subset` restricted to `[lo, hi]`.
pub fn bilevel_dantzig(items: &Items, subset: &[usize], lo: &Rational, hi: &Rational) -> Result<Pwl> {
    check_subset(items, subset)?;
    let cap: Rational = subset.iter().map(|&i| &items.a()[i]).sum();
    ensure!(
        !lo.is_negative() && lo <= hi && hi <= &cap,
        "range [{}, {}] outside [0, {}]",
        format_rational(lo),
        format_rational(hi),
        format_rational(&cap)
    );
    profile_for_order(items, &ascending_density(items, subset)).restrict(lo, hi)
}

/// The leader's objective for fixed profits `c` on `[lo, hi]`.
pub fn leader_pwl(items: &Items, c: &[Rational], tie: TiePolicy, lo: &Rational, hi: &Rational) -> Result<Pwl> {
    ensure!(
        !lo.is_negative() && lo <= hi && hi <= items.total_size(),
        "range [{}, {}] outside [0, {}]",
        format_rational(lo),
        format_rational(hi),
        format_rational(items.total_size())
    );
    let order = follower_order(items, c, tie)?;
    Ok(restricted_profile(items, &order, lo, hi))
}

/// Solves the certain problem by maximizing the leader's profile.
pub fn solve_certain(items: &Items, c: &[Rational], range: &CapacityRange, tie: TiePolicy) -> Result<SolveResult> {
    let objective = leader_pwl(items, c, tie, &range.lo, &range.hi)?;
    let (b_star, value) = objective.maximize(&range.lo, &range.hi)?;
    let x = follower_solve(items, c, &b_star, tie)?;
    debug_assert_eq!(x.value(items), value);
    Ok(SolveResult {
        b_star,
        value,
        objective,
        witness: Witness {
            scenario_index: Some(0),
            scenario: Some(c.to_vec()),
            follower_x: Some(x.x),
            ..Witness::default()
        },
    })
}
