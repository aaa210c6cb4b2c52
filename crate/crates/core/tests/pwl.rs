use bilevel_knapsack::pwl::{lower_envelope, weighted_sum, Pwl};
use bilevel_knapsack::rational::{int, rat};
use bilevel_knapsack::Rational;
use proptest::prelude::*;

/// A function on `[0, 6]` with breakpoints on the half-integer grid.
fn pwl_on_common_domain() -> impl Strategy<Value = Pwl> {
    (proptest::collection::btree_set(1i64..12, 0..6), proptest::collection::vec(-20i64..=20, 13)).prop_map(|(inner, vals)| {
        let mut xs = vec![0i64];
        xs.extend(inner);
        xs.push(12);
        Pwl::new(xs.iter().map(|&x| (rat(x, 2), rat(vals[x as usize], 3))).collect()).unwrap()
    })
}

fn probes() -> Vec<Rational> {
    (0..=48).map(|k| rat(k, 8)).collect()
}

proptest! {
    #[test]
    fn envelope_of_two_is_the_pointwise_min(f in pwl_on_common_domain(), g in pwl_on_common_domain()) {
        let env = lower_envelope(&[f.clone(), g.clone()]).unwrap();
        for b in probes() {
            let expect = f.eval(&b).unwrap().min(g.eval(&b).unwrap());
            prop_assert_eq!(env.eval(&b).unwrap(), expect);
        }
    }

    #[test]
    fn envelope_ignores_order_and_repetition(fs in proptest::collection::vec(pwl_on_common_domain(), 1..7), rot in 0usize..7) {
        let env = lower_envelope(&fs).unwrap();
        let mut perm = fs.clone();
        perm.rotate_left(rot % fs.len());
        perm.reverse();
        prop_assert_eq!(&lower_envelope(&perm).unwrap(), &env);
        let mut twice = fs.clone();
        twice.extend(fs.iter().cloned());
        prop_assert_eq!(&lower_envelope(&twice).unwrap(), &env);
        prop_assert_eq!(&lower_envelope(&[env.clone(), env.clone()]).unwrap(), &env);
        for b in probes() {
            let expect = fs.iter().map(|f| f.eval(&b).unwrap()).min().unwrap();
            prop_assert_eq!(env.eval(&b).unwrap(), expect);
        }
    }

    #[test]
    fn weighted_sum_is_linear(
        fs in proptest::collection::vec(pwl_on_common_domain(), 1..5),
        ws in proptest::collection::vec(0i64..=7, 5),
    ) {
        let weights: Vec<Rational> = ws[..fs.len()].iter().map(|&w| rat(w, 4)).collect();
        let sum = weighted_sum(&fs, &weights).unwrap();
        let mut points: Vec<Rational> = fs.iter().flat_map(|f| f.breakpoints().iter().map(|p| p.0.clone())).collect();
        points.extend(probes());
        for b in points {
            let expect: Rational = fs.iter().zip(&weights).map(|(f, w)| w * f.eval(&b).unwrap()).sum();
            prop_assert_eq!(sum.eval(&b).unwrap(), expect);
        }
    }

    #[test]
    fn maximize_dominates_samples(f in pwl_on_common_domain(), lo in 0i64..=12, len in 0i64..=12, xs in proptest::collection::vec(0u32..=1000, 1000)) {
        let lo_r = rat(lo, 2);
        let hi_r = rat((lo + len).min(12), 2);
        let (b, v) = f.maximize(&lo_r, &hi_r).unwrap();
        prop_assert!(b >= lo_r && b <= hi_r);
        prop_assert_eq!(f.eval(&b).unwrap(), v.clone());
        for x in xs {
            let p = &lo_r + (&hi_r - &lo_r) * rat(x as i64, 1000);
            prop_assert!(f.eval(&p).unwrap() <= v);
        }
        // Leftmost maximizer: nothing to its left reaches the value.
        for (x, y) in f.breakpoints() {
            if x >= &lo_r && x < &b {
                prop_assert!(y < &v);
            }
        }
    }
}

#[test]
fn envelope_of_a_single_function_is_itself() {
    let f = Pwl::new(vec![(int(0), int(1)), (int(1), int(3)), (int(2), int(0))]).unwrap();
    assert_eq!(lower_envelope(&[f.clone()]).unwrap(), f);
}
