//! Structured output of `solve` and `eval`. Rationals appear exactly as
//! strings next to a decimal rendering for reading.

use bilevel_knapsack::prefix::FractionalPrefix;
use bilevel_knapsack::rational::to_f64;
use bilevel_knapsack::{Rational, Witness};
use serde::Serialize;

use crate::schema::{q, qs, TieSpec, Q};

pub fn decimal(r: &Rational) -> String {
    format!("{}", to_f64(r))
}

#[derive(Clone, Debug, Serialize)]
pub struct PrefixRecord {
    /// Zero-based item indices, the last item included.
    pub members: Vec<usize>,
    pub last: usize,
    pub fraction: Q,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct WitnessRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Vec<Q>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub follower_x: Option<Vec<Q>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub head: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix: Option<PrefixRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subset_sum: Option<Q>,
}

pub fn prefix_record(p: &FractionalPrefix) -> Option<PrefixRecord> {
    match p {
        FractionalPrefix::Empty => None,
        FractionalPrefix::Prefix { items, last, fraction } => Some(PrefixRecord {
            members: items.clone(),
            last: *last,
            fraction: q(fraction),
        }),
    }
}

impl From<&Witness> for WitnessRecord {
    fn from(w: &Witness) -> Self {
        WitnessRecord {
            scenario_index: w.scenario_index,
            scenario: w.scenario.as_deref().map(qs),
            follower_x: w.follower_x.as_deref().map(qs),
            head: w.head,
            prefix: w.prefix.as_ref().and_then(prefix_record),
            subset_sum: w.subset_sum.as_ref().map(q),
        }
    }
}

/// What a generated instance's solution says about its source problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Derived {
    SubsetSumFeasible(bool),
    KnapsackCount(u64),
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleRecord {
    pub method: &'static str,
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveRecord {
    pub command: &'static str,
    pub model: &'static str,
    pub solver: &'static str,
    pub tie: TieSpec,
    pub range: (Q, Q),
    pub b_star: Q,
    pub b_star_decimal: String,
    pub value: Q,
    pub value_decimal: String,
    /// Closed intervals of optimal capacities.
    pub maximizers: Vec<(Q, Q)>,
    pub breakpoints: usize,
    pub witness: WitnessRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived: Option<Derived>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleRecord>,
    pub timing_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvalRecord {
    pub command: &'static str,
    pub model: &'static str,
    pub tie: TieSpec,
    pub b: Q,
    /// Exact value, or the exact mean of the samples for Monte Carlo.
    pub value: Q,
    pub value_decimal: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub witness: WitnessRecord,
    pub timing_ms: f64,
}

pub fn to_json<T: Serialize>(r: &T) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("records always serialize");
    s.push('\n');
    s
}
