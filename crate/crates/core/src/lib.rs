//! Diffusion across a single interface with a flux-jump condition.
//!
//! The equation `u_t = (D/2 u_x)_x` on `(-L, L)` with `D = D⁺` right of `0` and
//! `D = D⁻` left of it, continuity of `u` and `λ u_x(0+) = (1-λ) u_x(0-)` at the
//! interface, is solved three ways:
//!
//! * [`ifem`]: immersed finite elements on a uniform mesh with θ-scheme stepping,
//! * [`sde`]: Euler–Maruyama Monte Carlo for the associated skew diffusion,
//! * [`oracle`]: quadrature against the closed-form transition density.
//!
//! [`harness`] runs convergence studies over all three.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Quadrature nodes and weights are copied verbatim from the published tables.
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod exec;
pub mod harness;
pub mod ifem;
pub mod linalg;
pub mod oracle;
pub mod problem;
pub mod quadrature;
pub mod sde;

pub use error::{Error, Result};
pub use exec::Execution;
pub use problem::{InitialProfile, InterfaceProblem, SkewParameters, SymmetrizedCoefficients};
