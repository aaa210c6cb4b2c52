use num_traits::{Signed, Zero};

use crate::certain::{Items, TiePolicy};
use crate::error::{ensure, Error, Result};
use crate::rational::{format_rational, Rational};

/// Componentwise intervals `0 < c_lo <= c_hi` for the follower's profits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalUncertainty {
    c_lo: Vec<Rational>,
    c_hi: Vec<Rational>,
}

impl IntervalUncertainty {
    pub fn new(c_lo: Vec<Rational>, c_hi: Vec<Rational>, items: &Items) -> Result<Self> {
        ensure!(
            c_lo.len() == items.len() && c_hi.len() == items.len(),
            "interval bounds must have {} entries",
            items.len()
        );
        for (i, (lo, hi)) in c_lo.iter().zip(&c_hi).enumerate() {
            ensure!(
                lo.is_positive() && lo <= hi,
                "interval {i} = [{}, {}] must satisfy 0 < lo <= hi",
                format_rational(lo),
                format_rational(hi)
            );
        }
        Ok(IntervalUncertainty { c_lo, c_hi })
    }

    pub fn c_lo(&self) -> &[Rational] {
        &self.c_lo
    }

    pub fn c_hi(&self) -> &[Rational] {
        &self.c_hi
    }

    pub fn contains(&self, c: &[Rational]) -> bool {
        c.len() == self.c_lo.len()
            && c.iter()
                .zip(self.c_lo.iter().zip(&self.c_hi))
                .all(|(c, (lo, hi))| lo <= c && c <= hi)
    }
}

/// The interval order of the flipped ratio intervals
/// `[p_lo_i, p_hi_i] = [-c_hi_i / a_i, -c_lo_i / a_i]`, with `i < j` iff
/// `i`'s interval lies entirely left of `j`'s.
///
/// Endpoints compare lexicographically by `(p, tie_rank_i)`. Without tie
/// ranks this is the plain order, which is correct for the pessimistic
/// follower. The optimistic preprocessing sets `tie_rank_i = -d_i / a_i`,
/// the follower's own secondary key, so that intervals touching in one
/// point become ordered exactly when the follower's tie-break forces it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalOrder {
    p_lo: Vec<Rational>,
    p_hi: Vec<Rational>,
    tie_rank: Option<Vec<Rational>>,
    lo_rank: Vec<u32>,
    hi_rank: Vec<u32>,
}

impl IntervalOrder {
    fn with_ranks(p_lo: Vec<Rational>, p_hi: Vec<Rational>, tie_rank: Option<Vec<Rational>>) -> Self {
        let n = p_lo.len();
        let zero = Rational::zero();
        let key = |p: &Rational, i: usize| -> (Rational, Rational) {
            let t = tie_rank.as_ref().map_or(&zero, |t| &t[i]);
            (p.clone(), t.clone())
        };
        let mut keys: Vec<((Rational, Rational), usize, bool)> = Vec::with_capacity(2 * n);
        for i in 0..n {
            keys.push((key(&p_lo[i], i), i, false));
            keys.push((key(&p_hi[i], i), i, true));
        }
        keys.sort_by(|x, y| x.0.cmp(&y.0));
        let mut lo_rank = vec![0; n];
        let mut hi_rank = vec![0; n];
        let mut rank = 0u32;
        for t in 0..keys.len() {
            if t > 0 && keys[t].0 != keys[t - 1].0 {
                rank += 1;
            }
            let (_, i, is_hi) = &keys[t];
            if *is_hi {
                hi_rank[*i] = rank;
            } else {
                lo_rank[*i] = rank;
            }
        }
        IntervalOrder {
            p_lo,
            p_hi,
            tie_rank,
            lo_rank,
            hi_rank,
        }
    }

    pub fn len(&self) -> usize {
        self.p_lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_lo.is_empty()
    }

    pub fn p_lo(&self) -> &[Rational] {
        &self.p_lo
    }

    pub fn p_hi(&self) -> &[Rational] {
        &self.p_hi
    }

    pub fn is_tightened(&self) -> bool {
        self.tie_rank.is_some()
    }

    /// `i` precedes `j` in every follower order.
    pub fn precedes(&self, i: usize, j: usize) -> bool {
        self.hi_rank[i] < self.lo_rank[j]
    }

    /// All pairs `(i, j)` with `i < j` in the order.
    pub fn relations(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.precedes(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub(crate) fn lo_rank(&self, i: usize) -> u32 {
        self.lo_rank[i]
    }

    /// For head `k`: its predecessors `I_k^-` and the items whose interval
    /// contains `k`'s left endpoint, `I_k^0` (which includes `k`).
    pub fn head_sets(&self, k: usize) -> (Vec<usize>, Vec<usize>) {
        let pivot = self.lo_rank[k];
        let mut minus = Vec::new();
        let mut zero = Vec::new();
        for i in 0..self.len() {
            if self.hi_rank[i] < pivot {
                minus.push(i);
            } else if self.lo_rank[i] <= pivot {
                zero.push(i);
            }
        }
        (minus, zero)
    }
}

pub fn build_interval_order(items: &Items, u: &IntervalUncertainty) -> IntervalOrder {
    let p_lo = u.c_hi().iter().zip(items.a()).map(|(c, a)| -(c / a)).collect();
    let p_hi = u.c_lo().iter().zip(items.a()).map(|(c, a)| -(c / a)).collect();
    IntervalOrder::with_ranks(p_lo, p_hi, None)
}

/// Tightens the order for the optimistic follower.
///
/// When `p_hi_i = p_lo_j` the two items can only swap through an exact
/// ratio tie, which the optimistic follower resolves by `d / a`
/// descending. So `j` can never precede `i` if `d_i / a_i > d_j / a_j`,
/// and the pair gains the relation `i < j`; otherwise both orders stay
/// available. No endpoint is moved numerically.
pub fn optimistic_preprocess(items: &Items, u: &IntervalUncertainty, order: &IntervalOrder) -> IntervalOrder {
    debug_assert_eq!(order, &build_interval_order(items, u));
    let rank = (0..items.len()).map(|i| -items.density(i)).collect();
    IntervalOrder::with_ranks(order.p_lo.clone(), order.p_hi.clone(), Some(rank))
}

/// The order the follower of the given tie policy actually faces.
pub fn order_for_policy(items: &Items, u: &IntervalUncertainty, tie: TiePolicy) -> IntervalOrder {
    let order = build_interval_order(items, u);
    match tie {
        TiePolicy::Pessimistic => order,
        TiePolicy::Optimistic => optimistic_preprocess(items, u, &order),
    }
}

pub const DEFAULT_EXTENSION_BOUND: usize = 9;

/// All linear extensions in lexicographic order.
pub fn enumerate_linear_extensions(order: &IntervalOrder, bound: usize) -> Result<Vec<Vec<usize>>> {
    let n = order.len();
    if n > bound {
        return Err(Error::BudgetExceeded {
            what: "linear-extension enumeration",
            needed: format!("{n} items"),
            budget: format!("{bound} items"),
        });
    }
    let preds: Vec<Vec<usize>> = (0..n)
        .map(|j| (0..n).filter(|&i| order.precedes(i, j)).collect())
        .collect();
    let mut out = Vec::new();
    let mut placed = vec![false; n];
    let mut current = Vec::with_capacity(n);
    extend(&preds, &mut placed, &mut current, &mut out);
    Ok(out)
}

fn extend(preds: &[Vec<usize>], placed: &mut [bool], current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if current.len() == preds.len() {
        out.push(current.clone());
        return;
    }
    for j in 0..preds.len() {
        if !placed[j] && preds[j].iter().all(|&i| placed[i]) {
            placed[j] = true;
            current.push(j);
            extend(preds, placed, current, out);
            current.pop();
            placed[j] = false;
        }
    }
}
