use serde::{Deserialize, Serialize};

use super::rng::{GaussianSampler, NormalStream, StreamFamily};
use crate::error::{Error, Result};
use crate::ifem::step_schedule;
use crate::problem::{beta_forward, beta_inverse, theta_coefficient, SkewParameters};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub final_time: f64,
    pub steps: usize,
    pub n_paths: u64,
    pub seed: u64,
    pub x0: f64,
    pub sampler: GaussianSampler,
}

impl SimConfig {
    pub fn new(final_time: f64, steps: usize, n_paths: u64, seed: u64, x0: f64) -> Result<Self> {
        if !(final_time > 0.0) {
            return Err(Error::NonPositive { field: "final_time", value: final_time });
        }
        if steps == 0 {
            return Err(Error::invalid("number of time steps must be positive"));
        }
        if n_paths == 0 {
            return Err(Error::invalid("n_paths must be at least 1"));
        }
        if !x0.is_finite() {
            return Err(Error::invalid(format!("starting point {x0} is not finite")));
        }
        Ok(SimConfig { final_time, steps, n_paths, seed, x0, sampler: GaussianSampler::default() })
    }

    /// Step count chosen so that `T/M ≤ dt` and `M·(T/M) = T`.
    pub fn with_dt(final_time: f64, dt: f64, n_paths: u64, seed: u64, x0: f64) -> Result<Self> {
        let (steps, _) = step_schedule(final_time, dt)?;
        SimConfig::new(final_time, steps, n_paths, seed, x0)
    }

    pub fn with_sampler(mut self, sampler: GaussianSampler) -> Self {
        self.sampler = sampler;
        self
    }

    pub fn delta_t(&self) -> f64 {
        self.final_time / self.steps as f64
    }
}

/// One Euler–Maruyama step of the driftless transformed process: `x + θ(x)·dW`.
#[inline]
pub fn euler_step(x: f64, dw: f64, sp: &SkewParameters) -> f64 {
    x + theta_coefficient(x, sp) * dw
}

/// Runs the scheme from `y0` through the given Brownian increments and maps back:
/// `X̄(0) = β(y0)`, `X̄ ← X̄ + θ(X̄) dW`, result `β⁻¹(X̄(T))`.
pub fn simulate_path<I>(y0: f64, sp: &SkewParameters, increments: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let mut x = beta_forward(y0, sp.lambda);
    for dw in increments {
        x = euler_step(x, dw, sp);
    }
    beta_inverse(x, sp.lambda)
}

/// Pre-scaled stepping kernel: `θ±·√Δt` folded in so each step is one branch,
/// one normal draw and one multiply-add.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stepper {
    start: f64,
    steps: usize,
    scaled_plus: f64,
    scaled_minus: f64,
    lambda: f64,
}

impl Stepper {
    pub(crate) fn new(cfg: &SimConfig, sp: &SkewParameters) -> Self {
        let root_dt = cfg.delta_t().sqrt();
        Stepper {
            start: beta_forward(cfg.x0, sp.lambda),
            steps: cfg.steps,
            scaled_plus: sp.theta_plus * root_dt,
            scaled_minus: sp.theta_minus * root_dt,
            lambda: sp.lambda,
        }
    }

    #[inline]
    pub(crate) fn run(&self, stream: &mut NormalStream) -> f64 {
        let mut x = self.start;
        for _ in 0..self.steps {
            let z = stream.next_normal();
            let vol = if x > 0.0 { self.scaled_plus } else { self.scaled_minus };
            x += vol * z;
        }
        beta_inverse(x, self.lambda)
    }
}

/// Terminal value `Ȳ(T)` of path `path` under the configuration's seed.
pub fn simulate_terminal(cfg: &SimConfig, sp: &SkewParameters, path: u64) -> f64 {
    let family = StreamFamily::new(cfg.seed, cfg.sampler);
    Stepper::new(cfg, sp).run(&mut family.path(path))
}
