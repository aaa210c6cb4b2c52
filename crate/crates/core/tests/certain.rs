use bilevel_knapsack::certain::{dantzig_min, follower_solve, leader_pwl, normalize_objective};
use bilevel_knapsack::rational::{int, rat};
use bilevel_knapsack::{Items, Rational, TiePolicy};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = (Items, Vec<Rational>)> {
    (1usize..=7).prop_flat_map(|n| {
        (
            proptest::collection::vec(1i64..=6, n),
            proptest::collection::vec(-6i64..=6, n),
            proptest::collection::vec(1i64..=4, n),
        )
            .prop_map(|(a, d, c)| {
                let items = Items::new(a.iter().map(|&x| rat(x, 2)).collect(), d.iter().map(|&x| int(x)).collect()).unwrap();
                (items, c.iter().map(|&x| int(x)).collect())
            })
    })
}

fn policy() -> impl Strategy<Value = TiePolicy> {
    prop_oneof![Just(TiePolicy::Pessimistic), Just(TiePolicy::Optimistic)]
}

fn grid(items: &Items) -> Vec<Rational> {
    (0..=40).map(|k| items.total_size() * rat(k, 40)).collect()
}

/// Every fractional prefix of `subset` with size `b`: a set taken fully
/// plus one extra item filling the rest.
fn all_prefix_values(items: &Items, subset: &[usize], b: &Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    for mask in 0u32..1 << subset.len() {
        let full: Vec<usize> = (0..subset.len()).filter(|&k| mask >> k & 1 == 1).map(|k| subset[k]).collect();
        let size: Rational = full.iter().map(|&i| &items.a()[i]).sum();
        let value: Rational = full.iter().map(|&i| &items.d()[i]).sum();
        if &size == b {
            out.push(value.clone());
        }
        for &j in subset {
            if full.contains(&j) {
                continue;
            }
            let rest = b - &size;
            if rest > Rational::zero() && rest < items.a()[j] {
                out.push(&value + &rest / &items.a()[j] * &items.d()[j]);
            }
        }
    }
    out
}

proptest! {
    #[test]
    fn follower_value_is_the_profile_value((items, c) in instance(), tie in policy()) {
        let f = leader_pwl(&items, &c, tie, &Rational::zero(), items.total_size()).unwrap();
        for b in grid(&items) {
            let x = follower_solve(&items, &c, &b, tie).unwrap();
            prop_assert_eq!(x.value(&items), f.eval(&b).unwrap());
            let used: Rational = x.x.iter().zip(items.a()).map(|(x, a)| x * a).sum();
            prop_assert_eq!(&used, &b);
            let fractional = x.x.iter().filter(|v| !v.is_zero() && !v.is_one()).count();
            prop_assert!(fractional <= 1);
            prop_assert!(x.x.iter().all(|v| v >= &Rational::zero() && v <= &Rational::one()));
        }
    }

    #[test]
    fn optimistic_profile_dominates_pessimistic((items, c) in instance()) {
        let opt = leader_pwl(&items, &c, TiePolicy::Optimistic, &Rational::zero(), items.total_size()).unwrap();
        let pes = leader_pwl(&items, &c, TiePolicy::Pessimistic, &Rational::zero(), items.total_size()).unwrap();
        for b in grid(&items) {
            prop_assert!(opt.eval(&b).unwrap() >= pes.eval(&b).unwrap());
        }
    }

    #[test]
    fn dantzig_min_is_the_least_prefix((items, _) in instance(), mask in 1u32..128, k in 1i64..=40) {
        let subset: Vec<usize> = (0..items.len().min(6)).filter(|&i| mask >> i & 1 == 1).collect();
        prop_assume!(!subset.is_empty());
        let cap: Rational = subset.iter().map(|&i| &items.a()[i]).sum();
        let b = &cap * rat(k, 40);
        let p = dantzig_min(&subset, &items, &b).unwrap();
        prop_assert_eq!(p.size(&items), b.clone());
        let best = all_prefix_values(&items, &subset, &b).into_iter().min().unwrap();
        prop_assert_eq!(p.value(&items), best);
    }

    #[test]
    fn normalized_objectives_agree(
        a in proptest::collection::vec(1i64..=5, 1..6),
        d in proptest::collection::vec(-5i64..=5, 6),
        x in proptest::collection::vec(0i64..=4, 6),
        delta in -6i64..=6,
    ) {
        let n = a.len();
        let a: Vec<Rational> = a.iter().map(|&v| int(v)).collect();
        let d: Vec<Rational> = d[..n].iter().map(|&v| rat(v, 2)).collect();
        let x: Vec<Rational> = x[..n].iter().map(|&v| rat(v, 4)).collect();
        let delta = rat(delta, 3);
        let norm = normalize_objective(&d, &delta, &a).unwrap();
        let dot = |u: &[Rational]| -> Rational { u.iter().zip(&x).map(|(p, q)| p * q).sum() };
        let b = dot(&a);
        let raw = dot(&d) - &delta * &b;
        prop_assert_eq!(dot(&norm.d_c), raw.clone());
        prop_assert_eq!(dot(&norm.d_b) - &norm.delta_b * &b, raw);
        prop_assert!(norm.d_b.iter().all(|v| v >= &Rational::zero()));
        prop_assert!(norm.delta_b >= Rational::zero());
    }
}
