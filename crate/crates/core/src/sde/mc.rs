use serde::{Deserialize, Serialize};

use super::rng::StreamFamily;
use super::sim::{SimConfig, Stepper};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::problem::InterfaceProblem;

/// Paths per work item. Fixed so the reduction tree does not depend on the worker count.
pub const BLOCK_PATHS: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub x0: f64,
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: u64,
    pub seed: u64,
    pub delta_t: f64,
}

/// Count, mean and centred sum of squares of a sample.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, v: f64) {
        self.n += 1;
        let delta = v - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (v - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Moments {
            n,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.n as f64 * w,
        }
    }
}

/// Monte Carlo estimate of `E^{x0} u0(Ȳ(T))` over `cfg.n_paths` independent paths.
///
/// Given `(seed, n_paths)` the result is bitwise identical for any [`Execution`].
pub fn monte_carlo_estimate(
    problem: &InterfaceProblem,
    cfg: &SimConfig,
    exec: Execution,
) -> Result<McEstimate> {
    if cfg.n_paths == 0 {
        return Err(Error::invalid("n_paths must be at least 1"));
    }
    let sp = problem.skew_parameters();
    let stepper = Stepper::new(cfg, &sp);
    let family = StreamFamily::new(cfg.seed, cfg.sampler);
    let u0 = &problem.u0;

    let blocks = cfg.n_paths.div_ceil(BLOCK_PATHS);
    let partial = exec.map_indexed(blocks as usize, |b| {
        let start = b as u64 * BLOCK_PATHS;
        let end = (start + BLOCK_PATHS).min(cfg.n_paths);
        let mut m = Moments::default();
        for path in start..end {
            let y = stepper.run(&mut family.path(path));
            m.push(u0.eval(y));
        }
        m
    });

    let total = partial.into_iter().fold(Moments::default(), Moments::merge);
    if !total.mean.is_finite() {
        return Err(Error::Numerical("Monte Carlo mean is not finite".into()));
    }
    let std_error = if total.n > 1 {
        (total.m2.max(0.0) / (total.n - 1) as f64 / total.n as f64).sqrt()
    } else {
        0.0
    };
    Ok(McEstimate {
        x0: cfg.x0,
        mean: total.mean,
        std_error,
        n_paths: total.n,
        seed: cfg.seed,
        delta_t: cfg.delta_t(),
    })
}
