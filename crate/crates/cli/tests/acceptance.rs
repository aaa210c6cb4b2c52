//! Acceptance checks, one PASS/FAIL line each. Runs as a plain binary so the
//! lines are always printed; exits non-zero if any check fails.

use std::time::{Duration, Instant};

use bilevel_knapsack::certain::{follower_solve, normalize_objective};
use bilevel_knapsack::hard::{
    decide_subset_sum_product, eval_product_finite, gen_gadget_product, gen_gadget_simplex, shape_f_product, solve_simplex_family,
    SubsetSumInstance, DEFAULT_PRODUCT_BUDGET, DEFAULT_SUBSET_BUDGET,
};
use bilevel_knapsack::interval::{
    adversary_solve, build_interval_order, oracle_solve_interval, recover_scenario, solve_robust_interval, IntervalUncertainty,
};
use bilevel_knapsack::prefix::FractionalPrefix;
use bilevel_knapsack::pwl::{lower_envelope, Pwl};
use bilevel_knapsack::rational::{int, parse_rational, rat};
use bilevel_knapsack::stochastic::{
    count_knapsack_bisection, exact_gadget_solver, expected_pwl_product_discrete, gen_gadget_stochastic, CountingInstance,
};
use bilevel_knapsack::{CapacityRange, Items, Rational, TiePolicy};
use bkp_cli::{export_pwl, load_path, solve, Options};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn data(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

fn pts(v: &[(Rational, Rational)]) -> String {
    let s: Vec<String> = v.iter().map(|(b, y)| format!("({b},{y})")).collect();
    format!("[{}]", s.join(","))
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    if t > limit {
        return Err(format!("took {:.2?}, limit {limit:?}", t));
    }
    Ok(())
}

/// Rows of an exported CSV as exact pairs.
fn csv_points(csv: &str) -> Vec<(Rational, Rational)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (parse_rational(c[0]).unwrap(), parse_rational(c[2]).unwrap())
        })
        .collect()
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn paper_points(v: &[(i64, i64, i64, i64)]) -> Vec<(Rational, Rational)> {
    v.iter().map(|&(bn, bd, vn, vd)| (rat(bn, bd), rat(vn, vd))).collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let inst = load_path(&data("hull_interval.json")).map_err(|e| e.to_string())?;
    let r = solve(&inst, &Options::default()).map_err(|e| e.to_string())?;
    let maxi: Vec<(Rational, Rational)> = r.maximizers.iter().map(|(a, b)| (a.0.clone(), b.0.clone())).collect();
    check(r.value.0 == rat(4, 3), || format!("value {}", r.value.0))?;
    check(maxi == vec![(rat(5, 3), rat(5, 3)), (rat(10, 3), rat(10, 3))], || format!("maximizers {maxi:?}"))?;
    let got = csv_points(&export_pwl(&inst, &Options::default()).map_err(|e| e.to_string())?);
    let want = paper_points(&[(0, 1, 0, 1), (1, 1, 0, 1), (5, 3, 4, 3), (2, 1, 1, 1), (3, 1, 1, 1), (10, 3, 4, 3), (4, 1, 0, 1), (5, 1, 0, 1)]);
    check(got == want, || format!("envelope {}", pts(&got)))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("value 4/3 at {{5/3, 10/3}}, envelope {} in {:.0?}", pts(&got), start.elapsed()))
}

fn criterion_2() -> Outcome {
    // The figure's dashed path peaks at (5/2, 3/2). The prose quotes
    // b = 3/2 with value 5/2, but the envelope has f(3/2) = 1, so the
    // figure is taken as authoritative.
    let inst = load_path(&data("two_scenarios.json")).map_err(|e| e.to_string())?;
    let r = solve(&inst, &Options::default()).map_err(|e| e.to_string())?;
    let got = csv_points(&export_pwl(&inst, &Options::default()).map_err(|e| e.to_string())?);
    let want = paper_points(&[
        (0, 1, 0, 1),
        (1, 1, 0, 1),
        (5, 3, 4, 3),
        (2, 1, 1, 1),
        (5, 2, 3, 2),
        (3, 1, 1, 1),
        (10, 3, 4, 3),
        (4, 1, 0, 1),
        (5, 1, 0, 1),
    ]);
    check(got == want, || format!("envelope {}", pts(&got)))?;
    check((r.b_star.0.clone(), r.value.0.clone()) == (rat(5, 2), rat(3, 2)), || {
        format!("optimum ({}, {})", r.b_star.0, r.value.0)
    })?;
    Ok("envelope matches the figure, optimum (5/2, 3/2)".into())
}

/// All fractional prefixes of size `b`: a full set plus one partial item.
fn min_fractional_prefix(items: &Items, b: &Rational, allowed: &dyn Fn(&[usize], usize) -> bool) -> Rational {
    let n = items.len();
    let mut best: Option<Rational> = None;
    for mask in 0u32..1 << n {
        let full: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let size: Rational = full.iter().map(|&i| &items.a()[i]).sum();
        let value: Rational = full.iter().map(|&i| &items.d()[i]).sum();
        for j in 0..n {
            if full.contains(&j) || !allowed(&full, j) {
                continue;
            }
            let rest = b - &size;
            if rest > Rational::zero() && rest <= items.a()[j] {
                let v = &value + &rest / &items.a()[j] * &items.d()[j];
                best = Some(best.map_or(v.clone(), |x: Rational| x.min(v)));
            }
        }
    }
    best.expect("some prefix fits")
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let items = Items::new(ints(&[1, 1, 1]), ints(&[-1, 1, 0])).unwrap();
    let u = IntervalUncertainty::new(ints(&[3, 2, 1]), ints(&[3, 2, 4]), &items).unwrap();
    let order = build_interval_order(&items, &u);
    let b = rat(3, 2);
    let s = adversary_solve(&items, &order, &b).map_err(|e| e.to_string())?;
    // Items are numbered from zero here: {1, 3} with last item 3 is {0, 2}, 2.
    let want = FractionalPrefix::Prefix {
        items: vec![0, 2],
        last: 2,
        fraction: rat(1, 2),
    };
    check(s.prefix == want, || format!("prefix {:?}", s.prefix))?;
    let c = recover_scenario(&items, &u, &order, &s.prefix, s.head.unwrap()).map_err(|e| e.to_string())?;
    check(c[2] >= int(2) && c[2] <= int(3), || format!("recovered c3 = {}", c[2]))?;
    check(follower_solve(&items, &c, &b, TiePolicy::Pessimistic).unwrap().x == s.prefix.x(3), || {
        "recovered scenario does not reproduce the prefix".into()
    })?;
    // Item 0 has the degenerate interval [3, 3] and item 1 [2, 2], so item 0
    // always precedes item 1: prefixes containing item 1 must contain item 0.
    let brute = min_fractional_prefix(&items, &b, &|full, j| !(full.contains(&1) || j == 1) || full.contains(&0));
    check(brute == s.value, || format!("brute force {brute}, adversary {}", s.value))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("prefix ({{1,3}}, 3, 1/2), c3 = {}, value {} confirmed by enumeration", c[2], s.value))
}

fn random_interval(rng: &mut ChaCha8Rng, n: usize) -> (Items, IntervalUncertainty) {
    let a: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(1..=6), 2)).collect();
    let d: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(-8..=8), 2)).collect();
    let items = Items::new(a, d).unwrap();
    let lo: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=8)).collect();
    let c_lo: Vec<Rational> = lo.iter().map(|&l| rat(l, 2)).collect();
    let c_hi: Vec<Rational> = lo.iter().map(|&l| rat(l + rng.gen_range(0..=6), 2)).collect();
    let u = IntervalUncertainty::new(c_lo, c_hi, &items).unwrap();
    (items, u)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..200 {
        let n = rng.gen_range(1..=7);
        let (items, u) = random_interval(&mut rng, n);
        let tie = if k % 2 == 0 { TiePolicy::Pessimistic } else { TiePolicy::Optimistic };
        let range = CapacityRange::full(&items);
        let fast = solve_robust_interval(&items, &u, &range, tie).map_err(|e| e.to_string())?;
        let slow = oracle_solve_interval(&items, &u, &range, tie, 7).map_err(|e| e.to_string())?;
        check(fast.value == slow.value, || format!("instance {k}: {} vs oracle {}", fast.value, slow.value))?;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("200 instances agree with the linear-extension oracle in {:.1?}", start.elapsed()))
}

fn reachable(w: &[u64], target: u64) -> bool {
    let mut can = vec![false; target as usize + 1];
    can[0] = true;
    for &x in w {
        for s in (x as usize..=target as usize).rev() {
            can[s] |= can[s - x as usize];
        }
    }
    can[target as usize]
}

/// Weight multisets with `m` entries and total at most `cap`, by total.
fn multisets(m: usize, cap: u64, out: &mut Vec<Vec<u64>>) {
    fn rec(m: usize, min: u64, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        let slots = (m - cur.len()) as u64;
        for x in min..=left / slots {
            cur.push(x);
            rec(m, x, left - x, cur, out);
            cur.pop();
        }
    }
    rec(m, 1, cap, &mut Vec::new(), out);
    out.sort_by_key(|w| w.iter().sum::<u64>());
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let limit = Duration::from_secs(120);
    let mut total_instances = 0u64;
    let mut families = Vec::new();
    for m in 1..=10 {
        let mut ws = Vec::new();
        multisets(m, 40, &mut ws);
        total_instances += ws.iter().map(|w| w.iter().sum::<u64>() - 1).sum::<u64>();
        families.push(ws);
    }
    let mut done = 0u64;
    let mut complete_m = 0;
    'sweep: for (k, ws) in families.iter().enumerate() {
        for w in ws {
            for target in 1..w.iter().sum::<u64>() {
                if start.elapsed() > limit {
                    break 'sweep;
                }
                let ss = SubsetSumInstance::new(w.clone(), target).unwrap();
                let got = decide_subset_sum_product(&ss, DEFAULT_PRODUCT_BUDGET).map_err(|e| e.to_string())?;
                check(got == reachable(w, target), || format!("w={w:?} W={target}: gadget says {got}"))?;
                let g = gen_gadget_product(&ss).unwrap();
                let (f_hi, _) = eval_product_finite(&g.items, &g.uncertainty, &g.range.hi, TiePolicy::Pessimistic, DEFAULT_PRODUCT_BUDGET)
                    .map_err(|e| e.to_string())?;
                let closed = shape_f_product(&ss, &g.range.hi).map_err(|e| e.to_string())?;
                check(f_hi == closed, || format!("w={w:?} W={target}: f(b+) = {f_hi}, closed form {closed}"))?;
                done += 1;
            }
        }
        complete_m = k + 1;
    }
    let coverage = format!(
        "{done} of {total_instances} instances checked in {:.0?} (complete for m <= {complete_m}), no mismatch",
        start.elapsed()
    );
    if done == total_instances {
        within(start, limit)?;
        Ok(coverage)
    } else {
        Err(format!("time budget exhausted: {coverage}"))
    }
}

fn best_at_most(w: &[u64], cap: u64) -> u64 {
    (0u32..1 << w.len())
        .map(|mask| (0..w.len()).filter(|&i| mask >> i & 1 == 1).map(|i| w[i]).sum::<u64>())
        .filter(|&s| s <= cap)
        .max()
        .unwrap()
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut yes, mut no) = (0, 0);
    for k in 0..64 {
        let m = 1 + k % 16;
        let w: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=30)).collect();
        let total: u64 = w.iter().sum();
        if total < 2 {
            continue;
        }
        let target = rng.gen_range(1..total);
        let ss = SubsetSumInstance::new(w.clone(), target).unwrap();
        let g = gen_gadget_simplex(&ss).unwrap();
        let r = solve_simplex_family(&g.items, &g.uncertainty, &g.range, TiePolicy::Pessimistic, &g.provenance, DEFAULT_SUBSET_BUDGET)
            .map_err(|e| e.to_string())?;
        let v = best_at_most(&w, target);
        check(r.witness.subset_sum == Some(int(v as i64)), || format!("w={w:?} W={target}: V* {:?}, exhaustive {v}", r.witness.subset_sum))?;
        let wr = int(target as i64);
        let hit = r.objective.eval(&wr).unwrap() == -wr.clone();
        let truth = reachable(&w, target);
        check(hit == truth, || format!("w={w:?} W={target}: f(W) = -W is {hit}, subset sum says {truth}"))?;
        if truth {
            yes += 1
        } else {
            no += 1
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{} instances (m <= 16, {yes} yes / {no} no) in {:.1?}", yes + no, start.elapsed()))
}

fn count(a: &[u64], b: u64) -> u64 {
    (0u32..1 << a.len())
        .filter(|mask| (0..a.len()).filter(|&i| mask >> i & 1 == 1).map(|i| a[i]).sum::<u64>() <= b)
        .count() as u64
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for m in 1..=10usize {
        for _ in 0..3 {
            let a: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=20)).collect();
            let tau = rat(rng.gen_range(-8..=8), 8);
            let ci = CountingInstance::new(a.clone(), 0).unwrap();
            let g = gen_gadget_stochastic(&ci, &tau).unwrap();
            let f = expected_pwl_product_discrete(&g.items, &g.dist, TiePolicy::Optimistic, DEFAULT_PRODUCT_BUDGET).map_err(|e| e.to_string())?;
            let scale = int(1 << (m - 1));
            for b in 0..ci.total() {
                let want = Rational::one() + &tau - int(count(&a, b) as i64) / &scale;
                let got = f.slope_right(&int(b as i64)).unwrap();
                check(got == want, || format!("a*={a:?} tau={tau} b={b}: slope {got}, formula {want}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} integer capacities in [0, Σa*) over 30 gadgets with m <= 10"))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 0..100 {
        let m = rng.gen_range(1..=10);
        let a: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=20)).collect();
        let b_star = rng.gen_range(0..=a.iter().sum::<u64>());
        let ci = CountingInstance::new(a.clone(), b_star).unwrap();
        let got = count_knapsack_bisection(&ci, exact_gadget_solver(DEFAULT_PRODUCT_BUDGET)).map_err(|e| e.to_string())?;
        let want = count(&a, b_star);
        check(got == want, || format!("instance {k}: a*={a:?} b*={b_star}: bisection {got}, exhaustive {want}"))?;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("100 instances match exhaustive counting in {:.1?}", start.elapsed()))
}

fn random_pwl(rng: &mut ChaCha8Rng) -> Pwl {
    let mut xs: Vec<i64> = (0..rng.gen_range(0..8)).map(|_| rng.gen_range(1..40)).collect();
    xs.push(0);
    xs.push(40);
    xs.sort();
    xs.dedup();
    Pwl::new(xs.iter().map(|&x| (rat(x, 4), rat(rng.gen_range(-60..=60), 7))).collect()).unwrap()
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for set in 0..50 {
        let fs: Vec<Pwl> = (0..rng.gen_range(1..=12)).map(|_| random_pwl(&mut rng)).collect();
        let env = lower_envelope(&fs).map_err(|e| e.to_string())?;
        for _ in 0..1000 {
            let b = rat(rng.gen_range(0..=10_000), 1000);
            let naive = fs.iter().map(|f| f.eval(&b).unwrap()).min().unwrap();
            check(env.eval(&b).unwrap() == naive, || format!("set {set}: envelope differs from the minimum at {b}"))?;
        }
    }
    for k in 0..500 {
        let n = rng.gen_range(1..=8);
        let a: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(1..=9), rng.gen_range(1..=3))).collect();
        let d: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect();
        let x: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(0..=6), 6)).collect();
        let delta = rat(rng.gen_range(-9..=9), 5);
        let b: Rational = a.iter().zip(&x).map(|(a, x)| a * x).sum();
        let norm = normalize_objective(&d, &delta, &a).map_err(|e| e.to_string())?;
        let dot = |u: &[Rational]| -> Rational { u.iter().zip(&x).map(|(p, q)| p * q).sum() };
        let raw = dot(&d) - &delta * &b;
        check(dot(&norm.d_c) == raw && dot(&norm.d_b) - &norm.delta_b * &b == raw, || format!("normalization {k} differs"))?;
    }
    for k in 0..50 {
        let n = rng.gen_range(1..=7);
        let (items, wide) = random_interval(&mut rng, n);
        let (lo, hi): (Vec<Rational>, Vec<Rational>) = (0..n)
            .map(|i| {
                let (l, h) = (&wide.c_lo()[i], &wide.c_hi()[i]);
                let w = h - l;
                (l + &w * rat(rng.gen_range(0..=3), 8), h - &w * rat(rng.gen_range(0..=3), 8))
            })
            .unzip();
        let narrow = IntervalUncertainty::new(lo, hi, &items).unwrap();
        let range = CapacityRange::full(&items);
        for tie in [TiePolicy::Pessimistic, TiePolicy::Optimistic] {
            let a = solve_robust_interval(&items, &wide, &range, tie).map_err(|e| e.to_string())?;
            let b = solve_robust_interval(&items, &narrow, &range, tie).map_err(|e| e.to_string())?;
            check(b.value >= a.value, || format!("pair {k}: shrinking lowered the value from {} to {}", a.value, b.value))?;
        }
    }
    Ok("50 envelope sets x 1000 points, 500 normalizations, 50 shrink pairs".into())
}

fn smoke_benchmark() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2000);
    let n = 2000;
    let a: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(1..=100))).collect();
    let d: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-100..=100))).collect();
    let items = Items::new(a, d).unwrap();
    let c_lo: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(1..=1000))).collect();
    let c_hi: Vec<Rational> = c_lo.iter().map(|l| l + int(rng.gen_range(0..=200))).collect();
    let u = IntervalUncertainty::new(c_lo, c_hi, &items).unwrap();
    let start = Instant::now();
    let r = solve_robust_interval(&items, &u, &CapacityRange::full(&items), TiePolicy::Pessimistic).map_err(|e| e.to_string())?;
    within(start, Duration::from_secs(10))?;
    Ok(format!("n = 2000 solved in {:.2?} ({} breakpoints)", start.elapsed(), r.objective.breakpoints().len()))
}

fn main() {
    let checks: [(&str, fn() -> Outcome); 10] = [
        ("criterion 1 (interval example)", criterion_1),
        ("criterion 2 (finite example)", criterion_2),
        ("criterion 3 (adversary example)", criterion_3),
        ("criterion 4 (interval oracle equivalence)", criterion_4),
        ("criterion 5 (product gadget round trip)", criterion_5),
        ("criterion 6 (simplex gadget)", criterion_6),
        ("criterion 7 (slope formula)", criterion_7),
        ("criterion 8 (counting by bisection)", criterion_8),
        ("criterion 9 (property suites)", criterion_9),
        ("smoke benchmark (interval, n = 2000)", smoke_benchmark),
    ];
    let mut failed = 0;
    for (name, run) in checks {
        match run() {
            Ok(msg) => println!("PASS {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
