//! Simplicial uncertainty `{c >= ĉ, Σ (c_i - ĉ_i) <= Γ}` and its subset-sum
//! gadget.
//!
//! In the gadget every item but the last has leader density -1 and the last
//! has density +1, so a scenario only matters through `V_c`, the total size
//! of items the follower packs before the last one. The leader's objective
//! is `f_{V*}` for the largest achievable `V*`: slope -1 up to `V*`, +1 up
//! to `V* + M`, then -1.

use num_traits::{Signed, Zero};

use super::subset_sum::{best_subset_at_most, SubsetSumInstance};
use crate::certain::{fill_in_order, CapacityRange, Items, TiePolicy};
use crate::error::{ensure, Error, Result};
use crate::pwl::Pwl;
use crate::rational::{format_rational, int, Rational};
use crate::result::{SolveResult, Witness};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexUncertainty {
    c_hat: Vec<Rational>,
    gamma: Rational,
}

impl SimplexUncertainty {
    pub fn new(c_hat: Vec<Rational>, gamma: Rational, items: &Items) -> Result<Self> {
        items.check_profits(&c_hat)?;
        ensure!(gamma.is_positive(), "gamma = {} must be positive", format_rational(&gamma));
        Ok(SimplexUncertainty { c_hat, gamma })
    }

    pub fn c_hat(&self) -> &[Rational] {
        &self.c_hat
    }

    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    pub fn contains(&self, c: &[Rational]) -> bool {
        c.len() == self.c_hat.len()
            && c.iter().zip(&self.c_hat).all(|(c, h)| c >= h)
            && c.iter().zip(&self.c_hat).map(|(c, h)| c - h).sum::<Rational>() <= self.gamma
    }
}

/// Where a gadget instance came from. Solvers only accept instances that
/// regenerate identically from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetProvenance {
    pub source: SubsetSumInstance,
    /// The last item's base profit is read as lowered by an infinitesimal,
    /// so that under the optimistic policy a tied item still counts as
    /// packed first.
    pub optimistic_adjusted: bool,
}

impl GadgetProvenance {
    pub fn new(source: SubsetSumInstance) -> Self {
        GadgetProvenance {
            source,
            optimistic_adjusted: false,
        }
    }

    /// Largest admissible `V_c`: `W` when ties count as packed, `W - 1`
    /// when strict inequality is needed.
    pub(crate) fn subset_cap(&self, tie: TiePolicy) -> u64 {
        let w = self.source.target();
        if tie == TiePolicy::Optimistic && !self.optimistic_adjusted {
            w - 1
        } else {
            w
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexGadget {
    pub items: Items,
    pub uncertainty: SimplexUncertainty,
    pub range: CapacityRange,
    pub provenance: GadgetProvenance,
}

/// `M = Σw + 1` and the shared item data `a = (w, M)`, `d = (-w, M)`.
pub(crate) fn skeleton(ss: &SubsetSumInstance) -> Result<(Items, Rational)> {
    let m_big = int(ss.total() as i64 + 1);
    let w: Vec<Rational> = ss.w().iter().map(|&x| int(x as i64)).collect();
    let mut a = w.clone();
    a.push(m_big.clone());
    let mut d: Vec<Rational> = w.iter().map(|x| -x).collect();
    d.push(m_big.clone());
    Ok((Items::new(a, d)?, m_big))
}

pub fn gen_gadget_simplex(ss: &SubsetSumInstance) -> Result<SimplexGadget> {
    let (items, m_big) = skeleton(ss)?;
    let mut c_hat: Vec<Rational> = ss.w().iter().map(|&x| (&m_big * int(2) - int(1)) * int(x as i64)).collect();
    c_hat.push(&m_big * &m_big * int(2));
    let uncertainty = SimplexUncertainty::new(c_hat, int(ss.target() as i64), &items)?;
    let range = CapacityRange::full(&items);
    Ok(SimplexGadget {
        items,
        uncertainty,
        range,
        provenance: GadgetProvenance::new(ss.clone()),
    })
}

/// `f_V` on the capacity range.
pub(crate) fn family_objective(ss: &SubsetSumInstance, v: u64, range: &CapacityRange) -> Result<Pwl> {
    let m_big = int(ss.total() as i64 + 1);
    let total = int(ss.total() as i64);
    let v = int(v as i64);
    let mut pts = vec![(Rational::zero(), Rational::zero())];
    if v.is_positive() {
        pts.push((v.clone(), -v.clone()));
    }
    pts.push((&v + &m_big, &m_big - &v));
    if v < total {
        pts.push((&total + &m_big, &m_big - &total));
    }
    Pwl::new(pts)?.restrict(&range.lo, &range.hi)
}

/// The worst scenario for a subset `s` packed ahead of the last item, and
/// the follower's response at `b`.
fn family_witness(
    c_hat: &[Rational],
    w: &[u64],
    s: &[usize],
    shift: &dyn Fn(usize) -> Rational,
    items: &Items,
    b: &Rational,
) -> (Vec<Rational>, Vec<Rational>) {
    let m = w.len();
    let mut c = c_hat.to_vec();
    for &i in s {
        c[i] += shift(i);
    }
    let mut order: Vec<usize> = s.to_vec();
    order.push(m);
    order.extend((0..m).filter(|i| !s.contains(i)));
    (c, fill_in_order(items, &order, b))
}

pub(crate) fn check_recognised(items: &Items, expected: &Items, what: &str) -> Result<()> {
    if items != expected {
        return Err(Error::Unsupported(format!(
            "instance does not match the {what} gadget of its provenance"
        )));
    }
    Ok(())
}

/// Largest achievable `V_c` and a subset attaining it.
fn best_subset(prov: &GadgetProvenance, tie: TiePolicy, budget: usize) -> Result<(u64, Vec<usize>)> {
    best_subset_at_most(prov.source.w(), prov.subset_cap(tie), budget)
}

/// Shared solve for the gadget families once the instance is recognised.
/// `shift(i)` is the profit increase that moves item `i` level with the
/// last item.
pub(crate) fn solve_family(
    items: &Items,
    c_hat: &[Rational],
    range: &CapacityRange,
    tie: TiePolicy,
    prov: &GadgetProvenance,
    budget: usize,
    shift: &dyn Fn(usize) -> Rational,
) -> Result<SolveResult> {
    let (v_star, subset) = best_subset(prov, tie, budget)?;
    let objective = family_objective(&prov.source, v_star, range)?;
    let (b_star, value) = objective.maximize(&range.lo, &range.hi)?;
    let (c, x) = family_witness(c_hat, prov.source.w(), &subset, shift, items, &b_star);
    let direct: Rational = x.iter().zip(items.d()).map(|(x, d)| x * d).sum();
    if direct != value {
        return Err(Error::invariant("gadget witness does not attain the objective value"));
    }
    Ok(SolveResult {
        b_star,
        value,
        objective,
        witness: Witness {
            scenario: Some(c),
            follower_x: Some(x),
            subset_sum: Some(int(v_star as i64)),
            ..Witness::default()
        },
    })
}

pub(crate) fn eval_family(
    items: &Items,
    c_hat: &[Rational],
    b: &Rational,
    tie: TiePolicy,
    prov: &GadgetProvenance,
    budget: usize,
    shift: &dyn Fn(usize) -> Rational,
) -> Result<(Rational, Vec<Rational>)> {
    items.check_capacity(b)?;
    let (v_star, subset) = best_subset(prov, tie, budget)?;
    let f = family_objective(&prov.source, v_star, &CapacityRange::full(items))?;
    let (c, _) = family_witness(c_hat, prov.source.w(), &subset, shift, items, b);
    Ok((f.eval(b)?, c))
}

fn simplex_shift(prov: &GadgetProvenance, tie: TiePolicy) -> impl Fn(usize) -> Rational + '_ {
    // With strict comparisons the packed items share the leftover budget
    // (at least 1 because V* <= W - 1).
    let strict = tie == TiePolicy::Optimistic && !prov.optimistic_adjusted;
    move |i| {
        let w = int(prov.source.w()[i] as i64);
        if strict {
            w + Rational::new(1.into(), (prov.source.m() as i64 + 1).into())
        } else {
            w
        }
    }
}

fn recognise_simplex(items: &Items, u: &SimplexUncertainty, prov: &GadgetProvenance) -> Result<()> {
    let g = gen_gadget_simplex(&prov.source)?;
    check_recognised(items, &g.items, "simplex")?;
    if u != &g.uncertainty {
        return Err(Error::Unsupported(
            "uncertainty set does not match the simplex gadget of its provenance".into(),
        ));
    }
    Ok(())
}

/// Exact solve for gadget-family instances: `b* = V* + M`, value `M - V*`
/// on the full range.
pub fn solve_simplex_family(
    items: &Items,
    u: &SimplexUncertainty,
    range: &CapacityRange,
    tie: TiePolicy,
    prov: &GadgetProvenance,
    budget: usize,
) -> Result<SolveResult> {
    recognise_simplex(items, u, prov)?;
    let shift = simplex_shift(prov, tie);
    solve_family(items, u.c_hat(), range, tie, prov, budget, &shift)
}

/// `f(b)` for a gadget-family instance and a worst-case scenario.
pub fn eval_simplex_family(
    items: &Items,
    u: &SimplexUncertainty,
    b: &Rational,
    tie: TiePolicy,
    prov: &GadgetProvenance,
    budget: usize,
) -> Result<(Rational, Vec<Rational>)> {
    recognise_simplex(items, u, prov)?;
    let shift = simplex_shift(prov, tie);
    eval_family(items, u.c_hat(), b, tie, prov, budget, &shift)
}

/// YES iff `f(W) = -W` on the pessimistic gadget.
pub fn decide_subset_sum_simplex(ss: &SubsetSumInstance, budget: usize) -> Result<bool> {
    let g = gen_gadget_simplex(ss)?;
    let w = int(ss.target() as i64);
    let (v, _) = eval_simplex_family(&g.items, &g.uncertainty, &w, TiePolicy::Pessimistic, &g.provenance, budget)?;
    Ok(v == -w)
}
