//! Explicit non-uniqueness witnesses: Schwartz functions vanishing with
//! `T f` on a lattice, and a half-line test function.

mod bump;
mod construction;
mod halfline;
mod verify;

pub use bump::{choose_bump, hyperplane_hv, BumpSpec, Hyperplane};
pub use construction::{build_nup, build_nup_with, periodize, BuildConfig, Certified, NupFunction, Weight};
pub use halfline::{halfline_closed_form, halfline_test_function, halfline_test_function_on};
pub use verify::{
    verify_lattice_vanishing, verify_lattice_vanishing_with, VanishingMode, VanishingReport, VanishingRow,
    VerifyConfig,
};
