//! Negative-hyper-resolution: the inference rule, width-bounded refutation
//! search, expansion into binary resolution, and closed-form bound formulas.

mod bounds;
mod rule;
mod saturate;

pub use bounds::{binomial, theoretical_bounds, BoundsReport};
pub use rule::{expand_to_resolution, negative_hyper_resolve, NhrStep, ResolutionStep, RuleViolation};
pub use saturate::{
    refute_width_k, refute_width_k_with, saturate, DerivationTrace, NhrError, NhrOptions, NhrOutcome, Saturation,
    TracedStep,
};
