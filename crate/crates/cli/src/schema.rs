//! The versioned instance file format. Every number is an exact rational
//! written as a string, `"3"` or `"-5/2"`.

use std::fmt;

use bilevel_knapsack::rational::{format_rational, parse_rational};
use bilevel_knapsack::Rational;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const SCHEMA_VERSION: u32 = 1;

/// A rational in its string form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

struct QVisitor;

impl Visitor<'_> for QVisitor {
    type Value = Q;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational string such as \"3\" or \"-5/2\"")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
        parse_rational(v).map(Q).map_err(|_| E::custom(format!("malformed rational {v:?}")))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        d.deserialize_str(QVisitor)
    }
}

pub fn q(r: &Rational) -> Q {
    Q(r.clone())
}

pub fn qs(v: &[Rational]) -> Vec<Q> {
    v.iter().map(q).collect()
}

pub fn unq(v: &[Q]) -> Vec<Rational> {
    v.iter().map(|x| x.0.clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub items: ItemsSpec,
    /// Defaults to `[0, Σa]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<RangeSpec>,
    #[serde(default)]
    pub tie: TieSpec,
    pub model: Model,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemsSpec {
    pub a: Vec<Q>,
    pub d: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub b_lo: Q,
    pub b_hi: Q,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TieSpec {
    Optimistic,
    #[default]
    Pessimistic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Model {
    Certain {
        c: Vec<Q>,
    },
    Finite {
        scenarios: Vec<Vec<Q>>,
    },
    Interval {
        c_lo: Vec<Q>,
        c_hi: Vec<Q>,
    },
    ProductFinite {
        options: Vec<Vec<Q>>,
    },
    Simplex {
        c_hat: Vec<Q>,
        gamma: Q,
    },
    Pnorm {
        c_hat: Vec<Q>,
        gamma: Q,
        p: Q,
        precision_bits: u32,
    },
    StochFinite {
        scenarios: Vec<Vec<Q>>,
        probs: Vec<Q>,
    },
    StochProductDiscrete {
        supports: Vec<Vec<Q>>,
    },
    StochProductContinuous {
        boxes: Vec<(Q, Q)>,
    },
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Certain { .. } => "certain",
            Model::Finite { .. } => "finite",
            Model::Interval { .. } => "interval",
            Model::ProductFinite { .. } => "product_finite",
            Model::Simplex { .. } => "simplex",
            Model::Pnorm { .. } => "pnorm",
            Model::StochFinite { .. } => "stoch_finite",
            Model::StochProductDiscrete { .. } => "stoch_product_discrete",
            Model::StochProductContinuous { .. } => "stoch_product_continuous",
        }
    }
}

/// Where a generated instance came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum Provenance {
    SubsetSum {
        generator: Generator,
        w: Vec<u64>,
        target: u64,
        #[serde(default)]
        optimistic_adjusted: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<Q>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        precision_bits: Option<u32>,
    },
    Counting {
        generator: Generator,
        a_star: Vec<u64>,
        b_star: u64,
        tau: Q,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Product,
    Simplex,
    Pnorm,
    Stochastic,
    StochasticContinuous,
}

pub fn parse_instance(text: &str) -> Result<InstanceFile, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn to_json(file: &InstanceFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("instance files always serialize");
    s.push('\n');
    s
}
