//! Matrix model of measurement linkage and its symmetries.
//!
//! Two measures of one construct are linked by uniform scaling of true
//! scores and error SDs plus a translation of true scores. That linkage
//! is a two-parameter matrix group acting on homogeneous measurement
//! vectors; its generator and exponential map give transformation flows
//! between measures. This crate implements the group and algebra
//! ([`lie`]), the classical-test-theory layer with the approximate-
//! symmetry indices ([`measurement`]), standardized-mean-difference
//! invariance and attenuation ([`effect_size`]), flow integration and
//! invariance conditions ([`flow`]), the symmetry-breaking sweep
//! ([`simulate`]), and a cross-module verification suite ([`verify`]).
//!
//! All types are immutable values after construction and the operations
//! are pure; anything randomized is deterministic per seed.

pub mod effect_size;
pub mod error;
pub mod flow;
pub mod lie;
pub mod mat3;
pub mod measurement;
pub mod seed;
pub mod simulate;
pub mod verify;

pub use effect_size::{
    attenuate, delta, pooled_sd, smd, smd_invariance, smd_with_reliabilities,
    smd_with_reliability, DeltaTerm, SmdReport,
};
pub use error::{Error, Result};
pub use flow::{
    closed_form_state, integrate, smd_derivative_check, verify_invariance_conditions, FlowKind,
    FlowSpec, FlowTrace, InitialState, RateFn, RateOverrides,
};
pub use lie::{bracket, Generator, GroupElement, MeasurementVector};
pub use measurement::{
    correlation, ias, sed, z_standardize, MeasureModel, Population, ZScores,
};
pub use simulate::{
    generate_populations, nonlinear_link, run_sweep, SweepConfig, SweepMetadata, SweepResult,
    SweepRow,
};
pub use verify::{run_verification, Check, VerifyReport};
