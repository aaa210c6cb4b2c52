//! The four commands, independent of argument parsing and I/O.

use std::time::Instant;

use bilevel_knapsack::certain::{follower_solve, solve_certain};
use bilevel_knapsack::hard::{
    eval_pnorm_family, eval_product_finite, eval_simplex_family, gen_gadget_pnorm, gen_gadget_product, gen_gadget_simplex,
    required_precision_bits, solve_pnorm_family, solve_product_finite, solve_simplex_family, GadgetProvenance, SubsetSumInstance,
};
use bilevel_knapsack::interval::{
    adversary_solve, oracle_solve_interval, order_for_policy, recover_scenario, solve_robust_interval, DEFAULT_EXTENSION_BOUND,
};
use bilevel_knapsack::rational::{format_rational, int};
use bilevel_knapsack::robust_finite::{eval_robust_finite, solve_robust_finite, FiniteUncertainty};
use bilevel_knapsack::stochastic::{
    eval_stochastic_finite, eval_stochastic_mc, expected_pwl_product_discrete, gen_gadget_stochastic, gen_gadget_stochastic_continuous,
    solve_stochastic_finite, solve_stochastic_product_discrete, CountingInstance,
};
use bilevel_knapsack::{CapacityRange, Items, Pwl, Rational, SolveResult, TiePolicy};
use num_traits::{One, ToPrimitive};

use crate::error::{CliError, CliResult};
use crate::load::{tie_policy, tie_spec, Instance, Loaded};
use crate::record::{decimal, prefix_record, Derived, EvalRecord, OracleRecord, SolveRecord, WitnessRecord};
use crate::schema::{q, qs, Generator, InstanceFile, ItemsSpec, Model, Provenance, RangeSpec, TieSpec, SCHEMA_VERSION};

#[derive(Clone, Debug)]
pub struct Options {
    /// Largest number of scenarios any expansion may enumerate. Subset
    /// enumerations accept `log2(budget) + 2` weights.
    pub model_budget: u64,
    /// Rerun with a brute-force reference solver and compare.
    pub oracle: bool,
    /// Overrides the file's tie policy.
    pub tie: Option<TieSpec>,
    pub seed: u64,
    pub samples: u64,
    pub precision_bits: Option<u32>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            model_budget: 1 << 20,
            oracle: false,
            tie: None,
            seed: 0,
            samples: 10_000,
            precision_bits: None,
        }
    }
}

impl Options {
    fn subset_budget(&self) -> usize {
        self.model_budget.max(1).ilog2() as usize + 2
    }

    fn tie(&self, inst: &Instance) -> TiePolicy {
        self.tie.map(tie_policy).unwrap_or(inst.tie)
    }
}

fn gadget(inst: &Instance) -> CliResult<GadgetProvenance> {
    inst.gadget_provenance()?.ok_or_else(|| {
        CliError::Capability(format!(
            "the {} model is only solved for generated gadget instances; subset_sum provenance is missing",
            inst.file.model.name()
        ))
    })
}

/// Exact solve of the instance with the solver matching its model.
pub fn solve_exact(inst: &Instance, opts: &Options) -> CliResult<(SolveResult, &'static str)> {
    let (items, range, tie) = (&inst.items, &inst.range, opts.tie(inst));
    Ok(match &inst.model {
        Loaded::Certain(c) => (solve_certain(items, c, range, tie)?, "certain"),
        Loaded::Finite(u) => (solve_robust_finite(items, u, range, tie)?, "robust_finite"),
        Loaded::Interval(u) => (solve_robust_interval(items, u, range, tie)?, "robust_interval"),
        Loaded::ProductFinite(u) => (solve_product_finite(items, u, range, tie, opts.model_budget)?, "product_expansion"),
        Loaded::Simplex(u) => (
            solve_simplex_family(items, u, range, tie, &gadget(inst)?, opts.subset_budget())?,
            "simplex_gadget",
        ),
        Loaded::Pnorm(u, bits) => (
            solve_pnorm_family(items, u, range, tie, &gadget(inst)?, *bits, opts.subset_budget())?,
            "pnorm_gadget",
        ),
        Loaded::StochFinite(dist) => (solve_stochastic_finite(items, dist, range, tie)?, "stochastic_finite"),
        Loaded::StochDiscrete(dist) => (
            solve_stochastic_product_discrete(items, dist, range, tie, opts.model_budget)?,
            "stochastic_product_expansion",
        ),
        Loaded::StochContinuous(_) => {
            return Err(CliError::Capability(
                "stoch_product_continuous has no exact solver; use eval for a Monte Carlo estimate".into(),
            ))
        }
    })
}

/// Independent value of the objective at `b` by solving the follower
/// problem for every scenario.
fn follower_value(inst: &Instance, tie: TiePolicy, b: &Rational) -> CliResult<Rational> {
    let items = &inst.items;
    let value = |c: &[Rational]| -> CliResult<Rational> { Ok(follower_solve(items, c, b, tie)?.value(items)) };
    match &inst.model {
        Loaded::Certain(c) => value(c),
        Loaded::Finite(u) => {
            let mut best: Option<Rational> = None;
            for c in u.scenarios() {
                let v = value(c)?;
                best = Some(best.map_or(v.clone(), |x| x.min(v)));
            }
            Ok(best.expect("nonempty"))
        }
        Loaded::StochFinite(dist) => {
            let mut total = Rational::from_integer(0.into());
            for (c, p) in dist.scenarios().iter().zip(dist.probs()) {
                total += p * value(c)?;
            }
            Ok(total)
        }
        _ => unreachable!("only called for explicit scenario models"),
    }
}

/// Every scenario of a product of option sets, within the budget.
fn explicit_product(options: &[Vec<Rational>], budget: u64) -> CliResult<Vec<Vec<Rational>>> {
    let count = options.iter().fold(1u64, |acc, o| acc.saturating_mul(o.len() as u64));
    if count > budget {
        return Err(CliError::Capability(format!(
            "oracle expansion needs {count} scenarios, budget is {budget} scenarios"
        )));
    }
    let mut out: Vec<Vec<Rational>> = vec![vec![]];
    for o in options {
        out = out
            .into_iter()
            .flat_map(|s| {
                o.iter().map(move |c| {
                    let mut t = s.clone();
                    t.push(c.clone());
                    t
                })
            })
            .collect();
    }
    Ok(out)
}

fn same(a: &SolveResult, b: &SolveResult) -> bool {
    a.b_star == b.b_star && a.value == b.value && a.objective == b.objective
}

fn run_oracle(inst: &Instance, opts: &Options, r: &SolveResult) -> CliResult<OracleRecord> {
    let (items, range, tie) = (&inst.items, &inst.range, opts.tie(inst));
    let (method, agrees) = match &inst.model {
        Loaded::Certain(_) | Loaded::Finite(_) | Loaded::StochFinite(_) => {
            let pts = r.objective.breakpoints();
            let mut probes: Vec<Rational> = pts.iter().map(|p| p.0.clone()).collect();
            probes.extend(pts.windows(2).map(|w| (&w[0].0 + &w[1].0) / int(2)));
            let mut ok = true;
            let mut best: Option<Rational> = None;
            for b in &probes {
                let v = follower_value(inst, tie, b)?;
                ok &= r.objective.eval(b)? == v;
                best = Some(best.map_or(v.clone(), |x| x.max(v)));
            }
            ("follower_per_scenario", ok && best.as_ref() == Some(&r.value))
        }
        Loaded::Interval(u) => {
            let slow = oracle_solve_interval(items, u, range, tie, DEFAULT_EXTENSION_BOUND)?;
            ("linear_extensions", same(r, &slow))
        }
        Loaded::ProductFinite(u) => {
            let scen = explicit_product(u.options(), opts.model_budget)?;
            let slow = solve_robust_finite(items, &FiniteUncertainty::new(scen, items)?, range, tie)?;
            ("explicit_scenarios", same(r, &slow))
        }
        Loaded::StochDiscrete(dist) => {
            let finite = dist.to_finite_support(items, opts.model_budget)?;
            let slow = solve_stochastic_finite(items, &finite, range, tie)?;
            ("explicit_scenarios", same(r, &slow))
        }
        Loaded::Simplex(_) | Loaded::Pnorm(..) | Loaded::StochContinuous(_) => {
            return Err(CliError::Capability(format!(
                "no brute-force oracle for the {} model",
                inst.file.model.name()
            )))
        }
    };
    if !agrees {
        return Err(CliError::Internal(format!(
            "solver and {method} oracle disagree on the {} model",
            inst.file.model.name()
        )));
    }
    Ok(OracleRecord { method, agrees })
}

/// The source problem's answer read off a generated instance's solution.
fn derive(inst: &Instance, r: &SolveResult) -> CliResult<Option<Derived>> {
    let Some(prov) = &inst.file.provenance else {
        return Ok(None);
    };
    Ok(match (prov, &inst.model) {
        (Provenance::SubsetSum { generator: Generator::Product, .. }, Loaded::ProductFinite(_)) => {
            Some(Derived::SubsetSumFeasible(r.b_star != inst.range.hi))
        }
        (
            Provenance::SubsetSum {
                generator: Generator::Simplex | Generator::Pnorm,
                target,
                ..
            },
            Loaded::Simplex(_) | Loaded::Pnorm(..),
        ) => {
            let w = int(*target as i64);
            if !r.objective.contains(&w) {
                return Ok(None);
            }
            Some(Derived::SubsetSumFeasible(r.objective.eval(&w)? == -w))
        }
        (
            Provenance::Counting {
                generator: Generator::Stochastic,
                a_star,
                b_star,
                tau,
            },
            Loaded::StochDiscrete(_),
        ) => {
            let total: u64 = a_star.iter().sum();
            let m = a_star.len() as u32;
            if *b_star == total {
                return Ok(Some(Derived::KnapsackCount(1u64 << m)));
            }
            let b = int(*b_star as i64);
            if !r.objective.contains(&b) || r.objective.hi() == &b {
                return Ok(None);
            }
            let slope = r.objective.slope_right(&b)?;
            let scale = int(1i64 << (m - 1));
            let count = scale * (Rational::one() + &tau.0 - slope);
            if !count.is_integer() {
                return Err(CliError::Internal(format!(
                    "slope at b* gives a non-integral count {}",
                    format_rational(&count)
                )));
            }
            count.to_integer().to_u64().map(Derived::KnapsackCount)
        }
        _ => None,
    })
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn solve(inst: &Instance, opts: &Options) -> CliResult<SolveRecord> {
    let start = Instant::now();
    let (r, solver) = solve_exact(inst, opts)?;
    let maximizers = r.objective.argmax_set(&inst.range.lo, &inst.range.hi)?;
    let derived = derive(inst, &r)?;
    let oracle = if opts.oracle { Some(run_oracle(inst, opts, &r)?) } else { None };
    Ok(SolveRecord {
        command: "solve",
        model: inst.file.model.name(),
        solver,
        tie: tie_spec(opts.tie(inst)),
        range: (q(&inst.range.lo), q(&inst.range.hi)),
        b_star: q(&r.b_star),
        b_star_decimal: decimal(&r.b_star),
        value: q(&r.value),
        value_decimal: decimal(&r.value),
        maximizers: maximizers.iter().map(|(l, h)| (q(l), q(h))).collect(),
        breakpoints: r.objective.breakpoints().len(),
        witness: WitnessRecord::from(&r.witness),
        derived,
        oracle,
        timing_ms: ms(start),
    })
}

fn scenario_witness(items: &Items, c: Vec<Rational>, b: &Rational, tie: TiePolicy) -> CliResult<WitnessRecord> {
    let x = follower_solve(items, &c, b, tie)?.x;
    Ok(WitnessRecord {
        scenario: Some(qs(&c)),
        follower_x: Some(qs(&x)),
        ..WitnessRecord::default()
    })
}

pub fn eval(inst: &Instance, b: &Rational, opts: &Options) -> CliResult<EvalRecord> {
    let start = Instant::now();
    let (items, tie) = (&inst.items, opts.tie(inst));
    let mut record = EvalRecord {
        command: "eval",
        model: inst.file.model.name(),
        tie: tie_spec(tie),
        b: q(b),
        value: q(b),
        value_decimal: String::new(),
        stderr: None,
        samples: None,
        seed: None,
        witness: WitnessRecord::default(),
        timing_ms: 0.0,
    };
    let value = match &inst.model {
        Loaded::Certain(c) => {
            let x = follower_solve(items, c, b, tie)?;
            record.witness = scenario_witness(items, c.clone(), b, tie)?;
            x.value(items)
        }
        Loaded::Finite(u) => {
            let (v, k) = eval_robust_finite(items, u, b, tie)?;
            record.witness = scenario_witness(items, u.scenarios()[k].clone(), b, tie)?;
            record.witness.scenario_index = Some(k);
            v
        }
        Loaded::Interval(u) => {
            let order = order_for_policy(items, u, tie);
            let adv = adversary_solve(items, &order, b)?;
            record.witness = WitnessRecord {
                follower_x: Some(qs(&adv.prefix.x(items.len()))),
                head: adv.head,
                prefix: prefix_record(&adv.prefix),
                ..WitnessRecord::default()
            };
            if let Some(k) = adv.head {
                record.witness.scenario = Some(qs(&recover_scenario(items, u, &order, &adv.prefix, k)?));
            }
            adv.value
        }
        Loaded::ProductFinite(u) => {
            let (v, c) = eval_product_finite(items, u, b, tie, opts.model_budget)?;
            record.witness = scenario_witness(items, c, b, tie)?;
            v
        }
        Loaded::Simplex(u) => {
            let (v, c) = eval_simplex_family(items, u, b, tie, &gadget(inst)?, opts.subset_budget())?;
            record.witness.scenario = Some(qs(&c));
            v
        }
        Loaded::Pnorm(u, bits) => {
            let (v, c) = eval_pnorm_family(items, u, b, tie, &gadget(inst)?, *bits, opts.subset_budget())?;
            record.witness.scenario = Some(qs(&c));
            v
        }
        Loaded::StochFinite(dist) => eval_stochastic_finite(items, dist, b, tie)?,
        Loaded::StochDiscrete(dist) => expected_pwl_product_discrete(items, dist, tie, opts.model_budget)?.eval(b)?,
        Loaded::StochContinuous(dist) => {
            let est = eval_stochastic_mc(items, dist, b, tie, opts.samples, opts.seed)?;
            record.stderr = Some(est.stderr);
            record.samples = Some(est.samples);
            record.seed = Some(opts.seed);
            est.estimate
        }
    };
    record.value_decimal = decimal(&value);
    record.value = q(&value);
    record.timing_ms = ms(start);
    Ok(record)
}

/// Breakpoints of the leader's objective as CSV.
pub fn export_pwl(inst: &Instance, opts: &Options) -> CliResult<String> {
    let (r, _) = solve_exact(inst, opts)?;
    Ok(pwl_csv(&r.objective))
}

pub fn pwl_csv(f: &Pwl) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    w.write_record(["b_exact", "b_decimal", "v_exact", "v_decimal"]).expect("in-memory write");
    for (b, v) in f.breakpoints() {
        w.write_record([format_rational(b), decimal(b), format_rational(v), decimal(v)])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// Parameters of `gen`.
#[derive(Clone, Debug)]
pub enum GenRequest {
    SubsetSum {
        generator: Generator,
        w: Vec<u64>,
        target: u64,
        p: Rational,
        optimistic_adjusted: bool,
    },
    Counting {
        continuous: bool,
        a_star: Vec<u64>,
        b_star: u64,
        tau: Rational,
    },
}

fn file(items: &Items, range: &CapacityRange, tie: TiePolicy, model: Model, provenance: Provenance) -> InstanceFile {
    InstanceFile {
        version: SCHEMA_VERSION,
        items: ItemsSpec {
            a: qs(items.a()),
            d: qs(items.d()),
        },
        range: Some(RangeSpec {
            b_lo: q(&range.lo),
            b_hi: q(&range.hi),
        }),
        tie: tie_spec(tie),
        model,
        provenance: Some(provenance),
    }
}

pub fn gen(req: &GenRequest, opts: &Options) -> CliResult<InstanceFile> {
    match req {
        GenRequest::SubsetSum {
            generator,
            w,
            target,
            p,
            optimistic_adjusted,
        } => {
            let ss = SubsetSumInstance::new(w.clone(), *target)?;
            let tie = opts.tie.map(tie_policy).unwrap_or(TiePolicy::Pessimistic);
            let mut prov_p = None;
            let mut prov_bits = None;
            let (items, range, model) = match generator {
                Generator::Product => {
                    let g = gen_gadget_product(&ss)?;
                    let options = g.uncertainty.options().iter().map(|o| qs(o)).collect();
                    (g.items, g.range, Model::ProductFinite { options })
                }
                Generator::Simplex => {
                    let g = gen_gadget_simplex(&ss)?;
                    let model = Model::Simplex {
                        c_hat: qs(g.uncertainty.c_hat()),
                        gamma: q(g.uncertainty.gamma()),
                    };
                    (g.items, g.range, model)
                }
                Generator::Pnorm => {
                    let bits = opts.precision_bits.unwrap_or_else(|| required_precision_bits(&ss, p));
                    let g = gen_gadget_pnorm(&ss, p, bits)?;
                    prov_p = Some(q(p));
                    prov_bits = Some(bits);
                    let model = Model::Pnorm {
                        c_hat: qs(g.uncertainty.c_hat()),
                        gamma: q(g.uncertainty.gamma()),
                        p: q(p),
                        precision_bits: bits,
                    };
                    (g.items, g.range, model)
                }
                Generator::Stochastic | Generator::StochasticContinuous => {
                    return Err(CliError::input("stochastic generators take counting parameters"))
                }
            };
            let prov = Provenance::SubsetSum {
                generator: *generator,
                w: w.clone(),
                target: *target,
                optimistic_adjusted: *optimistic_adjusted,
                p: prov_p,
                precision_bits: prov_bits,
            };
            Ok(file(&items, &range, tie, model, prov))
        }
        GenRequest::Counting {
            continuous,
            a_star,
            b_star,
            tau,
        } => {
            let ci = CountingInstance::new(a_star.clone(), *b_star)?;
            // The construction packs a tied first item before the last one.
            let tie = opts.tie.map(tie_policy).unwrap_or(TiePolicy::Optimistic);
            let (items, range, model, generator) = if *continuous {
                let (items, dist, range) = gen_gadget_stochastic_continuous(&ci, tau)?;
                let boxes = dist.boxes().iter().map(|(l, h)| (q(l), q(h))).collect();
                (items, range, Model::StochProductContinuous { boxes }, Generator::StochasticContinuous)
            } else {
                let g = gen_gadget_stochastic(&ci, tau)?;
                let supports = g.dist.supports().iter().map(|s| qs(s)).collect();
                (g.items, g.range, Model::StochProductDiscrete { supports }, Generator::Stochastic)
            };
            let prov = Provenance::Counting {
                generator,
                a_star: a_star.clone(),
                b_star: *b_star,
                tau: q(tau),
            };
            Ok(file(&items, &range, tie, model, prov))
        }
    }
}
