//! Zero sequences in the upper half-plane, their phase functions and
//! Blaschke products, and the pointwise bounds built on them.

mod blaschke;
mod report;
mod sequence;
mod theorem;

pub use blaschke::{blaschke_condition, blaschke_eval, BlaschkeCondition, BlaschkeValue};
pub use report::{log_samples, verify_p1, verify_p2, PhaseReport};
pub use sequence::{
    condition_sum, phase_derivative, phase_derivative_fixed, phase_fixed, poisson_derivative, Evaluation,
    PhaseSequence,
};
pub use theorem::{
    kernel_check, theorem_a_hypotheses, theorem_b_bound, DerivativeBound, DoublingDiag, KernelCheck,
    TheoremAConfig, TheoremAReport,
};
