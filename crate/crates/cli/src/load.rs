//! Turns a parsed instance file into validated solver inputs.

use bilevel_knapsack::hard::{
    GadgetProvenance, PNormUncertainty, ProductFiniteUncertainty, SimplexUncertainty, SubsetSumInstance,
};
use bilevel_knapsack::interval::IntervalUncertainty;
use bilevel_knapsack::robust_finite::FiniteUncertainty;
use bilevel_knapsack::stochastic::{FiniteSupportDistribution, ProductUniformContinuous, ProductUniformDiscrete};
use bilevel_knapsack::{CapacityRange, Items, Rational, TiePolicy};

use crate::error::{CliError, CliResult};
use crate::schema::{parse_instance, unq, InstanceFile, Model, Provenance, TieSpec, SCHEMA_VERSION};

#[derive(Clone, Debug)]
pub enum Loaded {
    Certain(Vec<Rational>),
    Finite(FiniteUncertainty),
    Interval(IntervalUncertainty),
    ProductFinite(ProductFiniteUncertainty),
    Simplex(SimplexUncertainty),
    Pnorm(PNormUncertainty, u32),
    StochFinite(FiniteSupportDistribution),
    StochDiscrete(ProductUniformDiscrete),
    StochContinuous(ProductUniformContinuous),
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub file: InstanceFile,
    pub items: Items,
    pub range: CapacityRange,
    pub tie: TiePolicy,
    pub model: Loaded,
}

impl Instance {
    /// Subset-sum provenance in the form the gadget solvers take.
    pub fn gadget_provenance(&self) -> CliResult<Option<GadgetProvenance>> {
        match &self.file.provenance {
            Some(Provenance::SubsetSum {
                w,
                target,
                optimistic_adjusted,
                ..
            }) => {
                let ss = SubsetSumInstance::new(w.clone(), *target).map_err(|e| CliError::input(format!("provenance: {e}")))?;
                Ok(Some(GadgetProvenance {
                    source: ss,
                    optimistic_adjusted: *optimistic_adjusted,
                }))
            }
            _ => Ok(None),
        }
    }
}

pub fn tie_policy(t: TieSpec) -> TiePolicy {
    match t {
        TieSpec::Optimistic => TiePolicy::Optimistic,
        TieSpec::Pessimistic => TiePolicy::Pessimistic,
    }
}

pub fn tie_spec(t: TiePolicy) -> TieSpec {
    match t {
        TiePolicy::Optimistic => TieSpec::Optimistic,
        TiePolicy::Pessimistic => TieSpec::Pessimistic,
    }
}

fn rows(v: &[Vec<crate::schema::Q>]) -> Vec<Vec<Rational>> {
    v.iter().map(|r| unq(r)).collect()
}

pub fn parse(text: &str) -> CliResult<InstanceFile> {
    parse_instance(text).map_err(|e| CliError::input(format!("schema error: {e}")))
}

pub fn load_path(path: &std::path::Path) -> CliResult<Instance> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    load(parse(&text)?)
}

pub fn load(file: InstanceFile) -> CliResult<Instance> {
    if file.version != SCHEMA_VERSION {
        return Err(CliError::input(format!(
            "schema error: unsupported version {}, expected {SCHEMA_VERSION}",
            file.version
        )));
    }
    let items = Items::new(unq(&file.items.a), unq(&file.items.d))?;
    let range = match &file.range {
        Some(r) => CapacityRange::new(r.b_lo.0.clone(), r.b_hi.0.clone(), &items)?,
        None => CapacityRange::full(&items),
    };
    let model = match &file.model {
        Model::Certain { c } => {
            let c = unq(c);
            items.check_profits(&c)?;
            Loaded::Certain(c)
        }
        Model::Finite { scenarios } => Loaded::Finite(FiniteUncertainty::new(rows(scenarios), &items)?),
        Model::Interval { c_lo, c_hi } => Loaded::Interval(IntervalUncertainty::new(unq(c_lo), unq(c_hi), &items)?),
        Model::ProductFinite { options } => Loaded::ProductFinite(ProductFiniteUncertainty::new(rows(options), &items)?),
        Model::Simplex { c_hat, gamma } => Loaded::Simplex(SimplexUncertainty::new(unq(c_hat), gamma.0.clone(), &items)?),
        Model::Pnorm {
            c_hat,
            gamma,
            p,
            precision_bits,
        } => Loaded::Pnorm(
            PNormUncertainty::new(unq(c_hat), gamma.0.clone(), p.0.clone(), &items)?,
            *precision_bits,
        ),
        Model::StochFinite { scenarios, probs } => {
            Loaded::StochFinite(FiniteSupportDistribution::new(rows(scenarios), unq(probs), &items)?)
        }
        Model::StochProductDiscrete { supports } => Loaded::StochDiscrete(ProductUniformDiscrete::new(rows(supports), &items)?),
        Model::StochProductContinuous { boxes } => Loaded::StochContinuous(ProductUniformContinuous::new(
            boxes.iter().map(|(lo, hi)| (lo.0.clone(), hi.0.clone())).collect(),
            &items,
        )?),
    };
    let tie = tie_policy(file.tie);
    Ok(Instance {
        file,
        items,
        range,
        tie,
        model,
    })
}
