//! Entire functions of exponential type with almost periodic modulus, built
//! and checked from their zero sets.
//!
//! A divisor is supplied as a [`DivisorSource`], a rule that lists every zero
//! inside any requested disc. Everything else is a finite-radius truncation of
//! a limit: counting integrals, log-modulus evaluators, growth indicators, the
//! zero-set conditions and a sampling test for almost periodicity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod almostperiod;
pub mod azarin;
pub mod counting;
pub mod criteria;
pub mod divisor;
pub mod error;
pub mod evaluate;
pub mod numeric;
pub mod periodic;

pub use almostperiod::{
    ap_divisor_test, convolve, find_epsilon_periods, APConfig, APReport, SampledFunction, TestFunction,
};
pub use azarin::{
    check_limit_density, check_vinf_shape, estimate_sigma, weak_pairing, GrowthIndicators, ScaledMeasure,
};
pub use counting::{ball_mass_line, profile, tilde_v, RadialProfile};
pub use criteria::{
    check_annulus_regularity, check_conditions, check_j_bounded, check_linear_growth, check_residue_sum,
    check_sn_bounded, compute_sn, fit_krein_levin, ConditionEstimate, ConditionSet, CriteriaConfig, CriteriaReport,
    KreinLevinFit,
};
pub use divisor::{
    build_source, total_multiplicity, Atom, ComplexPoint, DivisorSource, GeneratorSpec, LineDensity, PhaseRule,
};
pub use error::{Error, Result};
pub use evaluate::{
    consistency_fit, eval_genus1, eval_product_log, eval_v, EvalReport, LogModulus, RepresentationParams,
};
pub use periodic::{
    check_periodic_divisor, factor_log, periodic_function_log, periodic_source, PeriodicCheck, PeriodicDivisorSpec,
};
