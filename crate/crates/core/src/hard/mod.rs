//! Uncertainty classes for which the robust problem is NP-hard: products of
//! finite sets, simplices and p-norm balls. Each comes with the subset-sum
//! gadget that shows the hardness. Products are solved by exhaustive
//! expansion under a budget. Simplices and p-norm balls are solved only on
//! their own gadget instances.

pub mod pnorm;
pub mod product;
pub mod simplex;
pub mod subset_sum;

pub use pnorm::{
    eval_pnorm_family, gen_gadget_pnorm, pth_root, required_precision_bits, solve_pnorm_family, PNormGadget,
    PNormUncertainty, DEFAULT_PRECISION_BITS,
};
pub use product::{
    decide_subset_sum_product, eval_product_finite, gen_gadget_product, shape_f_product, solve_product_finite,
    ProductFiniteUncertainty, ProductGadget, DEFAULT_PRODUCT_BUDGET,
};
pub use simplex::{
    decide_subset_sum_simplex, eval_simplex_family, gen_gadget_simplex, solve_simplex_family, GadgetProvenance,
    SimplexGadget, SimplexUncertainty,
};
pub use subset_sum::{SubsetSumInstance, DEFAULT_SUBSET_BUDGET};
