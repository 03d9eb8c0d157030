//! Windowed density estimators, separation checks, mesh bounds and decay
//! envelope audits for discrete sets under a change of variables.

mod decay;
mod estimate;
mod mesh;
mod separation;

pub use decay::{decay_audit, DecayEnvelope, DecayModel, DecayModelKind};
pub use estimate::{estimate_density, DensityEstimate, Trend};
pub use mesh::{mesh_bound_audit, LogLatticeSet, MeshAudit, MeshRow, NearestPoint};
pub use separation::{check_separated, gap_criterion, GapReport, SeparationReport};
