use std::sync::Arc;
use std::time::Instant;

use log::warn;
use serde::{Deserialize, Serialize};

use super::metrics::{error_l2_linf, fit_rate, RateFit};
use super::scenario::{Evaluation, Method, Scenario};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ifem::{step_schedule, theta_scheme_solve_with, IfeSystem, Mesh1D, Record};
use crate::oracle::ExactSolution;
use crate::problem::{ErrorConstants, InterfaceProblem};
use crate::sde::{monte_carlo_estimate, SimConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    /// `h` for the finite element methods, `Δt` for Monte Carlo.
    pub resolution: f64,
    /// Time step actually taken.
    pub dt: f64,
    pub steps: usize,
    pub error: f64,
    /// Fitted slope over this row and all coarser ones.
    pub slope_so_far: Option<f64>,
    pub wall_ms: f64,
    pub estimate: Option<f64>,
    pub std_error: Option<f64>,
    pub reference: Option<f64>,
}

/// Constants of the a-priori bounds, for the record.
///
/// `alpha4` is `α₃^(M−1)` for the finest run and is `None` once it overflows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub rho: f64,
    pub alpha1: f64,
    pub alpha3: f64,
    pub alpha4: Option<f64>,
    pub alpha5: f64,
    pub alpha4_steps: usize,
}

impl Diagnostics {
    pub fn new(problem: &InterfaceProblem, steps: usize) -> Self {
        let k = ErrorConstants::new(&problem.symmetrize());
        let a4 = k.alpha4(steps);
        Diagnostics {
            rho: k.rho,
            alpha1: k.alpha1,
            alpha3: k.alpha3,
            alpha4: a4.is_finite().then_some(a4),
            alpha5: k.alpha5,
            alpha4_steps: steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub scenario: Scenario,
    pub rows: Vec<ReportRow>,
    pub fit: Option<RateFit>,
    pub diagnostics: Diagnostics,
    pub wall_ms: f64,
}

impl ConvergenceReport {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    /// Copy with every timing set to zero.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        r.wall_ms = 0.0;
        r.rows.iter_mut().for_each(|row| row.wall_ms = 0.0);
        r
    }
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

struct Point {
    dt: f64,
    steps: usize,
    error: f64,
    estimate: Option<f64>,
    std_error: Option<f64>,
    reference: Option<f64>,
    wall_ms: f64,
}

fn pde_point(
    problem: &InterfaceProblem,
    oracle: &ExactSolution,
    s: &Scenario,
    theta: f64,
    h: f64,
) -> Result<Point> {
    let (lo, hi, all_levels) = match s.evaluation {
        Evaluation::Window { lo, hi, all_levels } => (lo, hi, all_levels),
        Evaluation::Point { .. } => return Err(Error::invalid("finite element studies need a window")),
    };
    let started = Instant::now();
    let mesh = Mesh1D::with_spacing(problem.half_width, h)?;
    let system = Arc::new(IfeSystem::new(mesh, problem.symmetrize())?);
    let record = if all_levels { Record::All } else { Record::Final };
    let sol = theta_scheme_solve_with(problem, system, theta, s.step_rule.dt(h), record)?;
    let error = error_l2_linf(&sol, oracle, (lo, hi))?;
    Ok(Point {
        dt: sol.dt,
        steps: sol.steps,
        error,
        estimate: None,
        std_error: None,
        reference: None,
        wall_ms: elapsed_ms(started),
    })
}

fn sde_point(
    problem: &InterfaceProblem,
    reference: f64,
    s: &Scenario,
    x: f64,
    dt: f64,
    exec: Execution,
) -> Result<Point> {
    let started = Instant::now();
    let mc = s.monte_carlo;
    let cfg = SimConfig::with_dt(s.final_time, dt, mc.n_paths, mc.seed, x)?.with_sampler(mc.sampler);
    let est = monte_carlo_estimate(problem, &cfg, exec)?;
    Ok(Point {
        dt: cfg.delta_t(),
        steps: cfg.steps,
        error: (est.mean - reference).abs(),
        estimate: Some(est.mean),
        std_error: Some(est.std_error),
        reference: Some(reference),
        wall_ms: elapsed_ms(started),
    })
}

/// Runs every resolution of the ladder, measures the error against the oracle
/// and fits the convergence rate.
///
/// Finite element ladder points run concurrently under `exec`; Monte Carlo
/// points run one after another with the paths spread over `exec`.
pub fn run_study(s: &Scenario, exec: Execution) -> Result<ConvergenceReport> {
    let ctx = |e: Error| e.context(format!("scenario '{}'", s.id));
    s.validate().map_err(ctx)?;
    let started = Instant::now();
    let problem = s.problem().map_err(ctx)?;
    let oracle = ExactSolution::new(&problem);

    let points: Vec<Result<Point>> = match (s.method, s.evaluation) {
        (Method::SdeEm, Evaluation::Point { x }) => {
            let reference = oracle.value(s.final_time, x).map_err(ctx)?;
            s.ladder.iter().map(|&dt| sde_point(&problem, reference, s, x, dt, exec)).collect()
        }
        (method, _) => {
            let theta = method.theta().expect("finite element method");
            exec.map_indexed(s.ladder.len(), |i| pde_point(&problem, &oracle, s, theta, s.ladder[i]))
        }
    };

    let mut rows: Vec<ReportRow> = Vec::with_capacity(points.len());
    for (i, point) in points.into_iter().enumerate() {
        let p = point.map_err(|e| e.context(format!("resolution {}", s.ladder[i]))).map_err(ctx)?;
        rows.push(ReportRow {
            resolution: s.ladder[i],
            dt: p.dt,
            steps: p.steps,
            error: p.error,
            slope_so_far: None,
            wall_ms: p.wall_ms,
            estimate: p.estimate,
            std_error: p.std_error,
            reference: p.reference,
        });
    }
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.resolution, r.error)).collect();
    for i in 1..rows.len() {
        rows[i].slope_so_far = fit_rate(&pairs[..=i]).ok().map(|f| f.slope);
    }
    let fit = match fit_rate(&pairs) {
        Ok(f) => Some(f),
        Err(e) => {
            warn!("scenario '{}': no rate fitted ({e})", s.id);
            None
        }
    };

    let finest_steps = match s.method {
        Method::SdeEm => rows.last().map_or(0, |r| r.steps),
        _ => step_schedule(s.final_time, s.step_rule.dt(*s.ladder.last().unwrap())).map_err(ctx)?.0,
    };
    Ok(ConvergenceReport {
        scenario: s.clone(),
        rows,
        fit,
        diagnostics: Diagnostics::new(&problem, finest_steps),
        wall_ms: elapsed_ms(started),
    })
}

/// [`run_study`] over several scenarios, concurrently, results in input order.
pub fn run_studies(scenarios: &[Scenario], exec: Execution) -> Vec<Result<ConvergenceReport>> {
    exec.map_indexed(scenarios.len(), |i| run_study(&scenarios[i], exec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::scenario::MonteCarloSettings;

    #[test]
    fn backward_euler_refinement_reduces_error() {
        let s = Scenario::pde("t", 10.0, 1.0, 0.5, Method::IfemBe).with_ladder(vec![0.2, 0.1, 0.05]);
        let r = run_study(&s, Execution::Sequential).unwrap();
        let e = r.errors();
        assert!(e[1] < e[0] && e[2] < e[1], "{e:?}");
        assert!(r.rows[0].slope_so_far.is_none());
        assert!(r.rows[2].slope_so_far.is_some());
        assert!((r.slope().unwrap() - 2.0).abs() < 0.3);
        assert_eq!(r.diagnostics.alpha4_steps, 80);
    }

    #[test]
    fn deterministic_up_to_timings() {
        let s = Scenario::sde("t", 10.0, 1.0, 0.5, 0.0)
            .with_ladder(vec![0.05, 0.025, 0.0125])
            .with_monte_carlo(MonteCarloSettings { n_paths: 5000, ..Default::default() });
        let a = run_study(&s, Execution::Sequential).unwrap().without_timings();
        let b = run_study(&s, Execution::with_threads(3)).unwrap().without_timings();
        assert_eq!(a, b);
        assert_eq!(a.rows[0].steps, 4);
        assert!(a.rows.iter().all(|r| r.std_error.unwrap() > 0.0));
    }

    #[test]
    fn errors_carry_scenario_context() {
        let mut s = Scenario::pde("broken", 10.0, 1.0, 0.5, Method::IfemBe);
        s.ladder = vec![0.35, 0.2, 0.1];
        let err = run_study(&s, Execution::Sequential).unwrap_err();
        assert!(err.to_string().contains("scenario 'broken'"), "{err}");
    }

    #[test]
    fn alpha4_overflow_becomes_none() {
        let p = InterfaceProblem::new(100.0, 1.0, 0.5, 0.2).unwrap();
        let d = Diagnostics::new(&p, 100_000);
        assert!(d.alpha4.is_none());
        let d = Diagnostics::new(&p, 3);
        assert_eq!(d.alpha4, Some(d.alpha3 * d.alpha3));
    }
}
