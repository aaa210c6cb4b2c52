//! Batch front end for the bilevel knapsack solvers: reads versioned JSON
//! instance files, dispatches to the solver matching the model, generates
//! hardness gadgets and exports objectives as CSV.

pub mod commands;
pub mod error;
pub mod load;
pub mod record;
pub mod schema;

pub use commands::{eval, export_pwl, gen, solve, GenRequest, Options};
pub use error::{CliError, CliResult};
pub use load::{load, load_path, Instance};
