use bilevel_knapsack::certain::leader_pwl;
use bilevel_knapsack::rational::{int, rat};
use bilevel_knapsack::stochastic::{
    count_knapsack_bisection, count_knapsack_exhaustive, eval_stochastic_finite, exact_gadget_solver, expected_pwl_product_discrete,
    gen_gadget_stochastic, solve_stochastic_finite, CountingInstance, FiniteSupportDistribution,
};
use bilevel_knapsack::{CapacityRange, Items, Rational, TiePolicy};
use num_traits::One;
use proptest::prelude::*;

fn brute_count(a: &[u64], b: u64) -> u64 {
    (0u32..1 << a.len())
        .filter(|mask| (0..a.len()).filter(|&i| mask >> i & 1 == 1).map(|i| a[i]).sum::<u64>() <= b)
        .count() as u64
}

fn counting(max_m: usize) -> impl Strategy<Value = CountingInstance> {
    proptest::collection::vec(1u64..=20, 1..=max_m)
        .prop_flat_map(|a| {
            let total: u64 = a.iter().sum();
            (Just(a), 0..=total)
        })
        .prop_map(|(a, b)| CountingInstance::new(a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn slope_right_of_each_integer_counts_solutions(ci in counting(10), t in -4i64..=4) {
        let tau = rat(t, 4);
        let g = gen_gadget_stochastic(&ci, &tau).unwrap();
        let f = expected_pwl_product_discrete(&g.items, &g.dist, TiePolicy::Optimistic, 1 << 20).unwrap();
        let scale = int(1i64 << (ci.m() - 1));
        for b in 0..ci.total() {
            let expect = Rational::one() + &tau - int(brute_count(ci.a_star(), b) as i64) / &scale;
            prop_assert_eq!(f.slope_right(&int(b as i64)).unwrap(), expect);
        }
    }

    #[test]
    fn bisection_recovers_the_count(ci in counting(8)) {
        let got = count_knapsack_bisection(&ci, exact_gadget_solver(1 << 20)).unwrap();
        prop_assert_eq!(got, brute_count(ci.a_star(), ci.b_star()));
        prop_assert_eq!(got, count_knapsack_exhaustive(ci.a_star(), ci.b_star()));
    }

    #[test]
    fn finite_objective_is_the_weighted_profile_sum(
        a in proptest::collection::vec(1i64..=4, 1..5),
        d in proptest::collection::vec(-4i64..=4, 4),
        cs in proptest::collection::vec(proptest::collection::vec(1i64..=5, 4), 1..5),
        ws in proptest::collection::vec(1i64..=5, 5),
    ) {
        let n = a.len();
        let items = Items::new(a.iter().map(|&x| int(x)).collect(), d[..n].iter().map(|&x| int(x)).collect()).unwrap();
        let scen: Vec<Vec<Rational>> = cs.iter().map(|c| c[..n].iter().map(|&x| int(x)).collect()).collect();
        let total: i64 = ws[..scen.len()].iter().sum();
        let probs: Vec<Rational> = ws[..scen.len()].iter().map(|&w| rat(w, total)).collect();
        let dist = FiniteSupportDistribution::new(scen.clone(), probs.clone(), &items).unwrap();
        let r = solve_stochastic_finite(&items, &dist, &CapacityRange::full(&items), TiePolicy::Pessimistic).unwrap();
        for k in 0..=24 {
            let b = items.total_size() * rat(k, 24);
            let expect: Rational = scen
                .iter()
                .zip(&probs)
                .map(|(c, p)| p * leader_pwl(&items, c, TiePolicy::Pessimistic, &int(0), items.total_size()).unwrap().eval(&b).unwrap())
                .sum();
            prop_assert_eq!(r.objective.eval(&b).unwrap(), expect.clone());
            prop_assert_eq!(eval_stochastic_finite(&items, &dist, &b, TiePolicy::Pessimistic).unwrap(), expect.clone());
            prop_assert!(r.value >= expect);
        }
    }
}
