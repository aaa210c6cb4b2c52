use std::collections::HashSet;

use num_traits::{Signed, Zero};

use crate::certain::{ascending_density, profile_for_order, CapacityRange, Items, TiePolicy};
use crate::error::{Error, Result};
use crate::interval::adversary::{adversary_solve, recover_scenario, reproduces};
use crate::interval::order::{enumerate_linear_extensions, order_for_policy, IntervalOrder, IntervalUncertainty};
use crate::envelope::{common_scale, envelope_of_leaves, scaled_int, Leaf, Q};
use crate::pwl::{lower_envelope, lower_envelope_partial_big, Pwl};
use crate::rational::Rational;
use crate::result::{SolveResult, Witness};

/// The leader's objective `min_c f_c` on the range, one partial function
/// per distinct head plus the point `(0, 0)` when the range starts at zero.
pub fn interval_objective(items: &Items, order: &IntervalOrder, range: &CapacityRange) -> Result<Pwl> {
    if let Some(r) = interval_objective_fixed(items, order, range) {
        return r;
    }
    interval_objective_big(items, order, range)
}

/// Heads with distinct pivots, and for each the items of `I_k^0` in
/// ascending-density order with the sums over `I_k^-`.
fn head_pieces<'a>(items: &'a Items, order: &'a IntervalOrder) -> impl Iterator<Item = (Vec<usize>, Vec<usize>)> + 'a {
    let sorted = ascending_density(items, &(0..items.len()).collect::<Vec<_>>());
    let mut seen = HashSet::new();
    let mut in_zero = vec![false; items.len()];
    (0..items.len()).filter_map(move |k| {
        if !seen.insert(order.lo_rank(k)) {
            return None;
        }
        let (minus, zero) = order.head_sets(k);
        for &i in &zero {
            in_zero[i] = true;
        }
        let zero_sorted: Vec<usize> = sorted.iter().copied().filter(|&i| in_zero[i]).collect();
        for &i in &zero {
            in_zero[i] = false;
        }
        Some((minus, zero_sorted))
    })
}

/// Algorithm 2 with every vertex scaled to an integer, when the data allow.
fn interval_objective_fixed(items: &Items, order: &IntervalOrder, range: &CapacityRange) -> Option<Result<Pwl>> {
    let sa = common_scale(items.a())?;
    let sd = common_scale(items.d())?;
    let a: Vec<i128> = items.a().iter().map(|x| scaled_int(x, &sa)).collect::<Option<_>>()?;
    let d: Vec<i128> = items.d().iter().map(|x| scaled_int(x, &sd)).collect::<Option<_>>()?;
    let bound = 1i128 << 60;
    if a.iter().chain(&d).map(|x| x.abs()).sum::<i128>() > bound {
        return None;
    }
    let lo = Q::scaled(&range.lo, &sa).ok()?;
    let hi = Q::scaled(&range.hi, &sa).ok()?;
    let mut leaves = Vec::new();
    for (minus, zero_sorted) in head_pieces(items, order) {
        let a_minus: i128 = minus.iter().map(|&i| a[i]).sum();
        let d_minus: i128 = minus.iter().map(|&i| d[i]).sum();
        let a_zero: i128 = zero_sorted.iter().map(|&i| a[i]).sum();
        let start = Q::int(a_minus);
        let end = Q::int(a_minus + a_zero);
        if q_lt(&hi, &start)? || q_lt(&end, &lo)? {
            continue;
        }
        let wlo = if q_lt(&start, &lo)? { lo } else { start };
        let whi = if q_lt(&hi, &end)? { hi } else { end };
        let mut vertices = vec![(a_minus, d_minus)];
        let (mut b, mut v) = (a_minus, d_minus);
        for &i in &zero_sorted {
            if !q_lt(&Q::int(b), &whi)? {
                break;
            }
            b += a[i];
            v += d[i];
            vertices.push((b, v));
        }
        leaves.push(Leaf {
            vertices,
            lo: wlo,
            hi: whi,
        });
    }
    if range.lo.is_zero() {
        leaves.push(Leaf {
            vertices: vec![(0, 0)],
            lo: Q::int(0),
            hi: Q::int(0),
        });
    }
    envelope_of_leaves(leaves, &range.lo, &range.hi, &sa, &sd)
}

fn q_lt(x: &Q, y: &Q) -> Option<bool> {
    x.lt(y).ok()
}

/// Algorithm 2 in big-rational arithmetic.
pub(crate) fn interval_objective_big(items: &Items, order: &IntervalOrder, range: &CapacityRange) -> Result<Pwl> {
    let mut pieces: Vec<Pwl> = Vec::new();
    for (minus, zero_sorted) in head_pieces(items, order) {
        let a_minus: Rational = minus.iter().map(|&i| &items.a()[i]).sum();
        let d_minus: Rational = minus.iter().map(|&i| &items.d()[i]).sum();
        let a_zero: Rational = zero_sorted.iter().map(|&i| &items.a()[i]).sum();
        let lo = &range.lo - &a_minus;
        let hi = &range.hi - &a_minus;
        if hi.is_negative() || lo > a_zero {
            continue;
        }
        let lo = if lo.is_negative() { Rational::zero() } else { lo };
        let hi = if hi > a_zero { a_zero } else { hi };
        let f = windowed_profile(items, &zero_sorted, &lo, &hi)?;
        pieces.push(f.shift(&a_minus, &d_minus));
    }
    if range.lo.is_zero() {
        pieces.push(Pwl::point(Rational::zero(), Rational::zero()));
    }
    lower_envelope_partial_big(&pieces, &range.lo, &range.hi)
}

/// Packing profile of `order` restricted to `[lo, hi]`, without building
/// the vertices beyond `hi`.
fn windowed_profile(items: &Items, order: &[usize], lo: &Rational, hi: &Rational) -> Result<Pwl> {
    let mut pts = vec![(Rational::zero(), Rational::zero())];
    let mut b = Rational::zero();
    let mut v = Rational::zero();
    for &i in order {
        if &b >= hi {
            break;
        }
        b += &items.a()[i];
        v += &items.d()[i];
        pts.push((b.clone(), v.clone()));
    }
    Pwl::from_sorted(pts).restrict(lo, hi)
}

/// Solves the robust problem with interval uncertainty.
///
/// The witness holds the adversary's prefix and head at `b*` and a profit
/// vector in `U` realising it. The scenario is omitted when the
/// optimistic follower would resolve a ratio tie in it differently.
pub fn solve_robust_interval(items: &Items, u: &IntervalUncertainty, range: &CapacityRange, tie: TiePolicy) -> Result<SolveResult> {
    let order = order_for_policy(items, u, tie);
    let objective = interval_objective(items, &order, range)?;
    let (b_star, value) = objective.maximize(&range.lo, &range.hi)?;
    let adv = adversary_solve(items, &order, &b_star)?;
    if adv.value != value {
        return Err(Error::invariant(format!(
            "adversary value {} differs from the objective {} at b*",
            adv.value, value
        )));
    }
    let scenario = match adv.head {
        None => Some(u.c_lo().to_vec()),
        Some(k) => {
            let c = recover_scenario(items, u, &order, &adv.prefix, k)?;
            if reproduces(items, &c, &b_star, &adv.prefix, tie)? {
                Some(c)
            } else if tie == TiePolicy::Pessimistic {
                return Err(Error::invariant("recovered scenario does not reproduce the prefix"));
            } else {
                None
            }
        }
    };
    Ok(SolveResult {
        b_star,
        value,
        objective,
        witness: Witness {
            scenario,
            follower_x: Some(adv.prefix.x(items.len())),
            head: adv.head,
            prefix: Some(adv.prefix),
            ..Witness::default()
        },
    })
}

/// Reference solver: the envelope of the packing profiles of every linear
/// extension. Refuses more than `bound` items.
pub fn oracle_solve_interval(
    items: &Items,
    u: &IntervalUncertainty,
    range: &CapacityRange,
    tie: TiePolicy,
    bound: usize,
) -> Result<SolveResult> {
    let order = order_for_policy(items, u, tie);
    let mut profiles = Vec::new();
    let mut seen = HashSet::new();
    for ext in enumerate_linear_extensions(&order, bound)? {
        let f = profile_for_order(items, &ext).restrict(&range.lo, &range.hi)?;
        if seen.insert(f.clone()) {
            profiles.push(f);
        }
    }
    let objective = lower_envelope(&profiles)?;
    let (b_star, value) = objective.maximize(&range.lo, &range.hi)?;
    Ok(SolveResult {
        b_star,
        value,
        objective,
        witness: Witness::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::order::DEFAULT_EXTENSION_BOUND;
    use crate::rational::{int, rat};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn hull_example() -> (Items, IntervalUncertainty) {
        let items = Items::new(ints(&[1, 1, 1, 1, 1]), ints(&[2, -1, 1, -2, 0])).unwrap();
        let u = IntervalUncertainty::new(ints(&[5, 4, 3, 2, 1]), ints(&[5, 4, 3, 2, 6]), &items).unwrap();
        (items, u)
    }

    #[test]
    fn hull_example_matches_oracle() {
        let (items, u) = hull_example();
        let range = CapacityRange::full(&items);
        for tie in [TiePolicy::Pessimistic, TiePolicy::Optimistic] {
            let fast = solve_robust_interval(&items, &u, &range, tie).unwrap();
            let slow = oracle_solve_interval(&items, &u, &range, tie, DEFAULT_EXTENSION_BOUND).unwrap();
            assert_eq!(fast.objective, slow.objective);
            assert_eq!((fast.b_star.clone(), fast.value.clone()), (slow.b_star, slow.value));
        }
    }

    #[test]
    fn hull_example_optimum() {
        let (items, u) = hull_example();
        let r = solve_robust_interval(&items, &u, &CapacityRange::full(&items), TiePolicy::Pessimistic).unwrap();
        // Packing 0, 1 and packing 4, 0, 1 cross at 5/3.
        assert_eq!((r.b_star, r.value), (rat(5, 3), rat(4, 3)));
        assert!(r.witness.head.is_some());
        assert!(u.contains(r.witness.scenario.as_ref().unwrap()));
    }

    #[test]
    fn sub_range() {
        let (items, u) = hull_example();
        let range = CapacityRange::new(rat(7, 2), int(5), &items).unwrap();
        let fast = solve_robust_interval(&items, &u, &range, TiePolicy::Pessimistic).unwrap();
        let slow = oracle_solve_interval(&items, &u, &range, TiePolicy::Pessimistic, 9).unwrap();
        assert_eq!(fast.objective, slow.objective);
        assert_eq!(fast.objective.lo(), &rat(7, 2));
    }

    #[test]
    fn degenerate_intervals_reduce_to_certain() {
        let items = Items::new(ints(&[2, 1, 3]), ints(&[1, -1, 2])).unwrap();
        let c = ints(&[3, 1, 2]);
        let u = IntervalUncertainty::new(c.clone(), c.clone(), &items).unwrap();
        let range = CapacityRange::full(&items);
        let r = solve_robust_interval(&items, &u, &range, TiePolicy::Pessimistic).unwrap();
        let certain = crate::certain::solve_certain(&items, &c, &range, TiePolicy::Pessimistic).unwrap();
        assert_eq!(r.objective, certain.objective);
    }
}
