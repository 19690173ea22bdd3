//! Immersed linear finite elements on a uniform mesh of `[−L, L]` with
//! homogeneous Dirichlet walls, and θ-scheme time stepping.
//!
//! The mesh ignores the interface. When `x = 0` falls inside an element the two
//! basis functions of that element are replaced by piecewise-linear functions
//! with a kink at 0 that satisfy `[φ] = 0` and `[κφ′] = 0` exactly; when `0` is a
//! node the ordinary hat functions already do.

mod assembly;
mod basis;
mod mesh;
mod stepping;

pub use assembly::{assemble, l2_project_initial, IfeSystem};
pub use basis::{interface_basis, IfeBasisLocal, KinkedLinear};
pub use mesh::{build_mesh, InterfaceLocation, Mesh1D};
pub use stepping::{
    evaluate_uh, step_schedule, theta_scheme_solve, theta_scheme_solve_with, DiscreteSolution,
    Record,
};
