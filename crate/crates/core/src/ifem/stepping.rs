use std::sync::Arc;

use log::warn;

use super::assembly::{l2_project_initial, IfeSystem};
use super::mesh::Mesh1D;
use crate::error::{Error, Result};
use crate::problem::InterfaceProblem;

/// Which time levels a solve keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Record {
    /// Every level `k = 0..M`.
    #[default]
    All,
    /// Only the final level `k = M`.
    Final,
}

/// Nodal coefficient trajectory of the fully discrete θ-scheme.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    pub system: Arc<IfeSystem>,
    pub theta: f64,
    pub dt: f64,
    pub steps: usize,
    /// times of the stored levels
    pub times: Vec<f64>,
    /// full nodal vectors (boundary entries included, always zero)
    pub levels: Vec<Vec<f64>>,
}

impl DiscreteSolution {
    pub fn mesh(&self) -> &Mesh1D {
        &self.system.mesh
    }

    pub fn final_level(&self) -> &[f64] {
        self.levels.last().expect("a solution stores at least one level")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("a solution stores at least one level")
    }
}

/// `(M, Δt)` with `M` the smallest step count whose step does not exceed `dt`
/// and `M·Δt = T`.
pub fn step_schedule(final_time: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::NonPositive { field: "dt", value: dt });
    }
    let ratio = final_time / dt;
    // tolerate representation error when dt already divides T
    let mut steps = ratio.round();
    if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
        steps = ratio.ceil();
    }
    let steps = (steps as usize).max(1);
    Ok((steps, final_time / steps as f64))
}

/// Solves `(M + θΔt K) u^k = (M − (1−θ)Δt K) u^{k−1}` from the L² projection of `u0`.
///
/// `θ = 1` is backward Euler, `θ = 1/2` Crank–Nicolson and `θ = 0` forward Euler.
/// The requested `dt` is shrunk so that it divides `T` exactly.
pub fn theta_scheme_solve(
    problem: &InterfaceProblem,
    mesh: &Mesh1D,
    theta: f64,
    dt: f64,
) -> Result<DiscreteSolution> {
    let system = Arc::new(IfeSystem::new(*mesh, problem.symmetrize())?);
    theta_scheme_solve_with(problem, system, theta, dt, Record::All)
}

pub fn theta_scheme_solve_with(
    problem: &InterfaceProblem,
    system: Arc<IfeSystem>,
    theta: f64,
    dt: f64,
    record: Record,
) -> Result<DiscreteSolution> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::invalid(format!("theta must lie in [0, 1], got {theta}")));
    }
    let (steps, dt) = step_schedule(problem.final_time, dt)?;
    let mut u = l2_project_initial(&system, &problem.u0)?;

    if theta < 0.5 {
        if let Some(lam_max) = system.stiffness.generalized_gershgorin_bound(&system.mass) {
            let limit = 2.0 / ((1.0 - 2.0 * theta) * lam_max);
            if dt > limit {
                warn!(
                    "theta = {theta} with dt = {dt:.3e} exceeds the explicit stability estimate {limit:.3e}"
                );
            }
        }
    }

    let lhs = system.mass.combine(1.0, &system.stiffness, theta * dt);
    let rhs_op = system.mass.combine(1.0, &system.stiffness, -(1.0 - theta) * dt);
    let factor = lhs.factorize()?;

    let mut times = Vec::new();
    let mut levels = Vec::new();
    if record == Record::All {
        times.push(0.0);
        levels.push(u.clone());
    }

    let n = system.mesh.n_nodes();
    let mut rhs = vec![0.0; n - 2];
    for k in 1..=steps {
        rhs_op.matvec_into(&u[1..n - 1], &mut rhs);
        factor.solve_in_place(&mut rhs);
        u[1..n - 1].copy_from_slice(&rhs);
        if record == Record::All || k == steps {
            times.push(if k == steps { problem.final_time } else { k as f64 * dt });
            levels.push(u.clone());
        }
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!(
            "theta-scheme diverged (theta = {theta}, dt = {dt:.3e})"
        )));
    }

    Ok(DiscreteSolution { system, theta, dt, steps, times, levels })
}

/// Value of the discrete solution at stored level `t_index` and point `x`.
pub fn evaluate_uh(sol: &DiscreteSolution, t_index: usize, x: f64) -> Result<f64> {
    let level = sol.levels.get(t_index).ok_or_else(|| {
        Error::invalid(format!(
            "time index {t_index} out of range ({} stored levels)",
            sol.levels.len()
        ))
    })?;
    sol.system.evaluate(level, x)
}
