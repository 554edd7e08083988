//! Space-time dual-mesh integrator for 1+1D sine-Gordon-type equations
//!
//! ```text
//! phi_tt - phi_xx + alpha phi_t + m2(x) phi + mu(x) sin(phi) = s(x)
//! ```
//!
//! The unknowns are edge fields: `phi_x` on spatial edges and `phi_t` on
//! temporal edges of a uniform space-time grid. Every step integrates the
//! equation over the dual cells of one slice and then telescopes the new
//! temporal edges into the vertex field, so the oriented edge sum around
//! every space-time face vanishes identically.

pub mod analytic;
pub mod boundary;
pub mod diagnostics;
pub mod error;
pub mod mesh;
pub mod model;
pub mod reference;
pub mod stepper;

pub use analytic::InitialCondition;
pub use boundary::{BoundaryCondition, BoundarySpec, PulseSpec};
pub use diagnostics::{EnergyBreakdown, EnergyFormula};
pub use error::{Result, SimError};
pub use mesh::SpacetimeGrid;
pub use model::PhysicsModel;
pub use stepper::{run, FieldState, RunOptions, RunSummary, Simulation};
