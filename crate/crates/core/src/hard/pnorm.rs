//! p-norm balls `{c : ||c - ĉ||_p <= Γ}` and the subset-sum gadget built on
//! the simplex skeleton with `ĉ_i = 2M w_i - w_i^{1/p}`, `Γ = W^{1/p}`.
//!
//! Roots are replaced by dyadic approximants: item roots rounded down, `Γ`
//! rounded up. With enough bits the approximants accept exactly the subsets
//! of total weight at most `W`, the same as the exact roots.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use super::simplex::{check_recognised, eval_family, skeleton, solve_family, GadgetProvenance};
use super::subset_sum::SubsetSumInstance;
use crate::certain::{CapacityRange, Items, TiePolicy};
use crate::error::{ensure, Error, Result};
use crate::rational::{format_rational, int, Rational};
use crate::result::SolveResult;

pub const DEFAULT_PRECISION_BITS: u32 = 64;
pub const MAX_PRECISION_BITS: u32 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PNormUncertainty {
    c_hat: Vec<Rational>,
    gamma: Rational,
    p: Rational,
}

impl PNormUncertainty {
    pub fn new(c_hat: Vec<Rational>, gamma: Rational, p: Rational, items: &Items) -> Result<Self> {
        items.check_profits(&c_hat)?;
        ensure!(gamma.is_positive(), "gamma = {} must be positive", format_rational(&gamma));
        ensure!(p >= Rational::one(), "p = {} must be at least 1", format_rational(&p));
        Ok(PNormUncertainty { c_hat, gamma, p })
    }

    pub fn c_hat(&self) -> &[Rational] {
        &self.c_hat
    }

    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    /// Whether every point of the ball is strictly positive.
    pub fn in_positive_orthant(&self) -> bool {
        self.c_hat.iter().all(|h| h > &self.gamma)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PNormGadget {
    pub items: Items,
    pub uncertainty: PNormUncertainty,
    pub range: CapacityRange,
    pub provenance: GadgetProvenance,
    pub precision_bits: u32,
    /// True when every root involved is rational, so no rounding happened.
    pub exact_roots: bool,
}

fn exponent_parts(p: &Rational) -> Result<(u32, u32)> {
    let s = p.numer().to_u32();
    let t = p.denom().to_u32();
    match (s, t) {
        (Some(s), Some(t)) if s <= 64 => Ok((s, t)),
        _ => Err(Error::BudgetExceeded {
            what: "p-th root",
            needed: format!("exponent {}", format_rational(p)),
            budget: "numerator at most 64".into(),
        }),
    }
}

/// `x^{1/p}` for integer `x >= 1` and rational `p = s/t >= 1`, rounded down
/// (or up) to a multiple of `2^-bits`, plus whether the root is exact.
pub fn pth_root(x: u64, p: &Rational, bits: u32, round_up: bool) -> Result<(Rational, bool)> {
    let (s, t) = exponent_parts(p)?;
    // x^{t/s} · 2^bits = (x^t · 2^{bits·s})^{1/s}
    let radicand = BigInt::from(x).pow(t) << (bits as usize * s as usize);
    let mut root = radicand.nth_root(s);
    let exact = root.pow(s) == radicand;
    if !exact && round_up {
        root += 1;
    }
    Ok((Rational::new(root, BigInt::one() << bits as usize), exact))
}

/// Bits after which rounding cannot change which subsets fit the budget:
/// with `P = ceil(p)`, `2^bits >= 4·P·(Σw + 1)^P`.
pub fn required_precision_bits(ss: &SubsetSumInstance, p: &Rational) -> u32 {
    let big_p = p.ceil().to_integer();
    let big_p = big_p.to_u32().unwrap_or(u32::MAX);
    let bound = BigInt::from(4u32 * big_p.min(1 << 20)) * BigInt::from(ss.total() + 1).pow(big_p.min(1 << 20));
    (bound - 1u32).bits() as u32
}

pub fn gen_gadget_pnorm(ss: &SubsetSumInstance, p: &Rational, precision_bits: u32) -> Result<PNormGadget> {
    ensure!(p >= &Rational::one(), "p = {} must be at least 1", format_rational(p));
    exponent_parts(p)?;
    let needed = required_precision_bits(ss, p);
    if precision_bits < needed || precision_bits > MAX_PRECISION_BITS {
        return Err(Error::BudgetExceeded {
            what: "p-th root precision",
            needed: format!("between {needed} and {MAX_PRECISION_BITS} bits"),
            budget: format!("{precision_bits} bits"),
        });
    }
    let (items, m_big) = skeleton(ss)?;
    let mut exact_roots = true;
    let mut c_hat = Vec::with_capacity(ss.m() + 1);
    for &w in ss.w() {
        let (r, exact) = pth_root(w, p, precision_bits, false)?;
        exact_roots &= exact;
        c_hat.push(&m_big * int(2) * int(w as i64) - r);
    }
    c_hat.push(&m_big * &m_big * int(2));
    let (gamma, exact) = pth_root(ss.target(), p, precision_bits, true)?;
    exact_roots &= exact;
    let uncertainty = PNormUncertainty::new(c_hat, gamma, p.clone(), &items)?;
    if !uncertainty.in_positive_orthant() {
        return Err(Error::invariant("p-norm gadget ball leaves the positive orthant"));
    }
    let range = CapacityRange::full(&items);
    Ok(PNormGadget {
        items,
        uncertainty,
        range,
        provenance: GadgetProvenance::new(ss.clone()),
        precision_bits,
        exact_roots,
    })
}

fn recognise_pnorm(items: &Items, u: &PNormUncertainty, prov: &GadgetProvenance, precision_bits: u32) -> Result<()> {
    if !u.p().is_one() {
        return Err(Error::Unsupported(format!(
            "p-norm gadget with p = {}: lowering the last item's profit can pay off, so subset sums do not \
             determine the adversary",
            format_rational(u.p())
        )));
    }
    let g = gen_gadget_pnorm(&prov.source, u.p(), precision_bits)?;
    check_recognised(items, &g.items, "p-norm")?;
    if u != &g.uncertainty {
        return Err(Error::Unsupported(
            "uncertainty set does not match the p-norm gadget of its provenance".into(),
        ));
    }
    Ok(())
}

fn unit_shift(prov: &GadgetProvenance, tie: TiePolicy) -> impl Fn(usize) -> Rational + '_ {
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

/// Exact solve for `p = 1` gadget instances. There moving the last item's
/// profit down by `δ` costs `δM`, more than the `δ Σ_S w_i` it saves, so
/// the adversary is the simplex one.
pub fn solve_pnorm_family(
    items: &Items,
    u: &PNormUncertainty,
    range: &CapacityRange,
    tie: TiePolicy,
    prov: &GadgetProvenance,
    precision_bits: u32,
    budget: usize,
) -> Result<SolveResult> {
    recognise_pnorm(items, u, prov, precision_bits)?;
    let shift = unit_shift(prov, tie);
    solve_family(items, u.c_hat(), range, tie, prov, budget, &shift)
}

pub fn eval_pnorm_family(
    items: &Items,
    u: &PNormUncertainty,
    b: &Rational,
    tie: TiePolicy,
    prov: &GadgetProvenance,
    precision_bits: u32,
    budget: usize,
) -> Result<(Rational, Vec<Rational>)> {
    recognise_pnorm(items, u, prov, precision_bits)?;
    let shift = unit_shift(prov, tie);
    eval_family(items, u.c_hat(), b, tie, prov, budget, &shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certain::follower_solve;
    use crate::hard::simplex::gen_gadget_simplex;
    use crate::rational::rat;
    use num_traits::Zero;

    fn ss(w: &[u64], target: u64) -> SubsetSumInstance {
        SubsetSumInstance::new(w.to_vec(), target).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn p_one_is_the_simplex_data() {
        let s = ss(&[1, 2], 2);
        let g = gen_gadget_pnorm(&s, &int(1), DEFAULT_PRECISION_BITS).unwrap();
        assert!(g.exact_roots);
        assert_eq!(g.uncertainty.c_hat(), &ints(&[7, 14, 32])[..]);
        assert_eq!(g.uncertainty.gamma(), &int(2));
        let simplex = gen_gadget_simplex(&s).unwrap();
        assert_eq!(g.items, simplex.items);
        let r = solve_pnorm_family(&g.items, &g.uncertainty, &g.range, TiePolicy::Pessimistic, &g.provenance, 64, 22).unwrap();
        assert_eq!((r.b_star, r.value), (int(6), int(2)));
        let (v, _) = eval_pnorm_family(&g.items, &g.uncertainty, &int(2), TiePolicy::Pessimistic, &g.provenance, 64, 22).unwrap();
        assert_eq!(v, int(-2));
    }

    #[test]
    fn perfect_powers_are_exact() {
        assert_eq!(pth_root(4, &int(2), 64, false).unwrap(), (int(2), true));
        assert_eq!(pth_root(4, &int(2), 64, true).unwrap(), (int(2), true));
        assert_eq!(pth_root(27, &int(3), 64, false).unwrap(), (int(3), true));
        // 8^{2/3} = 4
        assert_eq!(pth_root(8, &rat(3, 2), 64, false).unwrap(), (int(4), true));
        let g = gen_gadget_pnorm(&ss(&[4, 9], 4), &int(2), 64).unwrap();
        assert!(g.exact_roots);
        assert_eq!(g.uncertainty.gamma(), &int(2));
    }

    #[test]
    fn irrational_roots_are_bracketed() {
        let bits = 64;
        let ulp = Rational::new(BigInt::one(), BigInt::one() << bits);
        let (lo, exact) = pth_root(2, &int(2), bits, false).unwrap();
        let (hi, _) = pth_root(2, &int(2), bits, true).unwrap();
        assert!(!exact);
        assert_eq!(&hi - &lo, ulp);
        assert!(&lo * &lo < int(2) && &hi * &hi > int(2));
        let g = gen_gadget_pnorm(&ss(&[2, 3], 2), &int(2), bits).unwrap();
        assert!(!g.exact_roots);
        assert_eq!(g.precision_bits, bits);
        let gamma = g.uncertainty.gamma();
        assert!(gamma * gamma > int(2) && (gamma - &ulp) * (gamma - &ulp) < int(2));
        assert!(g.uncertainty.in_positive_orthant());
    }

    #[test]
    fn precision_limits() {
        let s = ss(&[1, 2], 2);
        assert!(matches!(gen_gadget_pnorm(&s, &int(2), 2), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(
            gen_gadget_pnorm(&s, &int(2), MAX_PRECISION_BITS + 1),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(gen_gadget_pnorm(&s, &rat(1, 2), 64).is_err());
        // 4·2·4² = 2^7.
        assert_eq!(required_precision_bits(&s, &int(2)), 7);
    }

    #[test]
    fn rounding_keeps_the_feasible_subsets() {
        // Σ_S r_i^p <= Γ^p must agree with Σ_S w_i <= W for every subset.
        for (w, t) in [(vec![2u64, 3, 5], 7u64), (vec![2, 2, 3], 4), (vec![6, 7, 10], 13)] {
            let s = ss(&w, t);
            let bits = required_precision_bits(&s, &int(2));
            let g = gen_gadget_pnorm(&s, &int(2), bits).unwrap();
            let m_big = int(s.total() as i64 + 1);
            let r: Vec<Rational> = (0..w.len())
                .map(|i| &m_big * int(2) * int(w[i] as i64) - &g.uncertainty.c_hat()[i])
                .collect();
            let gamma2 = g.uncertainty.gamma() * g.uncertainty.gamma();
            for mask in 0..1u32 << w.len() {
                let members: Vec<usize> = (0..w.len()).filter(|&i| mask >> i & 1 == 1).collect();
                let cost: Rational = members.iter().map(|&i| &r[i] * &r[i]).sum();
                let weight: u64 = members.iter().map(|&i| w[i]).sum();
                assert_eq!(cost <= gamma2, weight <= t, "w={w:?} mask={mask}");
            }
        }
    }

    #[test]
    fn p_two_gadget_is_refused() {
        let g = gen_gadget_pnorm(&ss(&[9, 1], 8), &int(2), 64).unwrap();
        let err = solve_pnorm_family(&g.items, &g.uncertainty, &g.range, TiePolicy::Pessimistic, &g.provenance, 64, 22)
            .unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn p_two_adversary_beats_subset_sums() {
        // w = (9, 1), W = 8 has no subset summing to 8, yet a point of the
        // Euclidean ball packs both light items ahead of the last one, so
        // f(W) = -W. Lowering the last profit by 11/8 and raising the others
        // to the same ratio costs (15/8)² + (7/8)² + (11/8)² = 395/64 < 8.
        let g = gen_gadget_pnorm(&ss(&[9, 1], 8), &int(2), 64).unwrap();
        assert_eq!(g.uncertainty.c_hat(), &ints(&[195, 21, 242])[..]);
        assert!(g.uncertainty.gamma() * g.uncertainty.gamma() >= int(8));
        let delta = rat(1, 8);
        let c: Vec<Rational> = vec![int(198) - int(9) * &delta, int(22) - &delta, int(242) - int(11) * &delta];
        let dist2: Rational = c
            .iter()
            .zip(g.uncertainty.c_hat())
            .map(|(c, h)| (c - h) * (c - h))
            .sum();
        assert_eq!(dist2, rat(395, 64));
        assert!(dist2 <= g.uncertainty.gamma() * g.uncertainty.gamma());
        let x = follower_solve(&g.items, &c, &int(8), TiePolicy::Pessimistic).unwrap();
        assert_eq!(x.value(&g.items), int(-8));
        assert!(!c.iter().any(|ci| ci.is_zero()));
    }
}
