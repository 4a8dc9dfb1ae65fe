//! Assembles both sides of each inequality, emits `VerifyReport`s, and owns
//! the weight-sweep scaling experiments and their CSV schema.

pub mod ceilings;
pub mod checks;
pub mod classical;
pub mod report;
pub mod sweep;

pub use ceilings::{tol_disc, Ceilings};
pub use checks::{
    check_maxfrac_l21, check_pointwise_l12, check_poincare11, check_poincare11_a1,
    check_slice_kernel_a1, check_strong_pp, check_weak_pp, probe_conjecture, probe_points,
    StrongVariant,
};
pub use classical::{check_classical_1d, ClassicalFn};
pub use report::{fmt_f64, GridMeta, InequalityId, VerifyReport, ALL_INEQUALITIES};
pub use sweep::{
    fit_slope, power_sweep_points, sweep_weights, SweepPoint, SweepResult, SweepRow, SweepSpec,
    SweepTarget,
};
