use num_traits::{Signed, Zero};

use crate::certain::{ascending_density, dantzig_min_sorted, follower_solve, Items, TiePolicy};
use crate::error::{Error, Result};
use crate::interval::order::{IntervalOrder, IntervalUncertainty};
use crate::prefix::FractionalPrefix;
use crate::rational::Rational;

/// Worst follower response at a fixed capacity under interval uncertainty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdversarySolution {
    pub prefix: FractionalPrefix,
    pub value: Rational,
    /// The head item whose iteration attained the minimum; `None` at `b = 0`.
    pub head: Option<usize>,
}

/// Minimizes the leader's value over all linear extensions of `order` at
/// capacity `b`. Each head `k` fixes the predecessors `I_k^-` in full and
/// lets a minimizing packer fill the rest from `I_k^0`.
pub fn adversary_solve(items: &Items, order: &IntervalOrder, b: &Rational) -> Result<AdversarySolution> {
    if order.len() != items.len() {
        return Err(Error::invalid("order and items differ in length"));
    }
    items.check_capacity(b)?;
    if b.is_zero() {
        return Ok(AdversarySolution {
            prefix: FractionalPrefix::Empty,
            value: Rational::zero(),
            head: None,
        });
    }
    let sorted = ascending_density(items, &(0..items.len()).collect::<Vec<_>>());
    let mut best: Option<AdversarySolution> = None;
    let mut seen_pivots = std::collections::HashSet::new();
    for k in 0..items.len() {
        if !seen_pivots.insert(order.lo_rank(k)) {
            continue;
        }
        if let Some((prefix, value)) = head_iteration(items, order, &sorted, k, b) {
            if best.as_ref().map_or(true, |s| value < s.value) {
                best = Some(AdversarySolution {
                    prefix,
                    value,
                    head: Some(k),
                });
            }
        }
    }
    best.ok_or_else(|| Error::invariant("no head admits the capacity"))
}

fn head_iteration(
    items: &Items,
    order: &IntervalOrder,
    sorted: &[usize],
    k: usize,
    b: &Rational,
) -> Option<(FractionalPrefix, Rational)> {
    let (minus, zero) = order.head_sets(k);
    let a_minus: Rational = minus.iter().map(|&i| &items.a()[i]).sum();
    let rest = b - &a_minus;
    if !rest.is_positive() {
        return None;
    }
    let mut in_zero = vec![false; items.len()];
    let mut a_zero = Rational::zero();
    for &i in &zero {
        in_zero[i] = true;
        a_zero += &items.a()[i];
    }
    if rest > a_zero {
        return None;
    }
    let zero_sorted: Vec<usize> = sorted.iter().copied().filter(|&i| in_zero[i]).collect();
    let FractionalPrefix::Prefix { items: j, last, fraction } = dantzig_min_sorted(&zero_sorted, items, &rest) else {
        unreachable!("positive capacity yields a nonempty prefix")
    };
    let mut members = minus;
    members.extend(j);
    let prefix = FractionalPrefix::new(members, last, fraction);
    let value = prefix.value(items);
    Some((prefix, value))
}

/// Builds a profit vector in `U` under which the follower packs `prefix`.
///
/// Every prefix item other than the last gets its upper bound, every other
/// item its lower bound, and the last item `j` the ratio
/// `c_hi_k / a_k` of the head. Under the pessimistic tie policy the
/// follower then packs exactly the prefix.
pub fn recover_scenario(
    items: &Items,
    u: &IntervalUncertainty,
    order: &IntervalOrder,
    prefix: &FractionalPrefix,
    head: usize,
) -> Result<Vec<Rational>> {
    let FractionalPrefix::Prefix { items: members, last, .. } = prefix else {
        return Err(Error::invalid("the empty prefix has no head"));
    };
    let n = items.len();
    if head >= n || *last >= n || members.iter().any(|&i| i >= n) {
        return Err(Error::invalid("prefix or head index out of range"));
    }
    let (minus, zero) = order.head_sets(head);
    let mut in_prefix = vec![false; n];
    for &i in members {
        in_prefix[i] = true;
    }
    let mut in_zero = vec![false; n];
    for &i in &zero {
        in_zero[i] = true;
    }
    if !in_zero[*last]
        || minus.iter().any(|&i| !in_prefix[i])
        || members.iter().any(|&i| !in_zero[i] && !minus.contains(&i))
    {
        return Err(Error::invalid(format!("prefix is not produced by head {head}")));
    }
    let mut c: Vec<Rational> = (0..n)
        .map(|i| if in_prefix[i] { u.c_hi()[i].clone() } else { u.c_lo()[i].clone() })
        .collect();
    c[*last] = &u.c_hi()[head] / &items.a()[head] * &items.a()[*last];
    if !u.contains(&c) {
        return Err(Error::invariant("recovered scenario leaves the uncertainty set"));
    }
    Ok(c)
}

/// Checks that the follower's response to `c` at `b` equals `prefix`.
pub(crate) fn reproduces(items: &Items, c: &[Rational], b: &Rational, prefix: &FractionalPrefix, tie: TiePolicy) -> Result<bool> {
    Ok(follower_solve(items, c, b, tie)?.x == prefix.x(items.len()))
}
