use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifem::DiscreteSolution;
use crate::oracle::ExactSolution;

/// `max_k √(h Σ_i (u_h(t_k, x_i) − u(t_k, x_i))²)` over the stored levels of `sol`
/// and the mesh nodes `x_i ∈ [lo, hi]`.
pub fn error_l2_linf(sol: &DiscreteSolution, oracle: &ExactSolution, window: (f64, f64)) -> Result<f64> {
    let mesh = sol.mesh();
    let (lo, hi) = window;
    let nodes: Vec<(usize, f64)> =
        (0..mesh.n_nodes()).map(|i| (i, mesh.node(i))).filter(|&(_, x)| x >= lo && x <= hi).collect();
    if nodes.is_empty() {
        return Err(Error::invalid(format!("error window [{lo}, {hi}] contains no mesh nodes")));
    }
    let mut worst = 0.0_f64;
    for (level, &t) in sol.levels.iter().zip(&sol.times) {
        let mut sum = 0.0;
        for &(i, x) in &nodes {
            let e = level[i] - oracle.value(t, x)?;
            sum += e * e;
        }
        worst = worst.max((mesh.h * sum).sqrt());
    }
    Ok(worst)
}

/// Least-squares line through `(log resolution, log error)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Pairs that entered the fit.
    pub used: usize,
}

/// Fits `log e = intercept + slope · log r`. Pairs with a nonpositive or
/// non-finite entry are skipped with a warning.
pub fn fit_rate(pairs: &[(f64, f64)]) -> Result<RateFit> {
    let mut xs = Vec::with_capacity(pairs.len());
    let mut ys = Vec::with_capacity(pairs.len());
    for &(r, e) in pairs {
        if r > 0.0 && e > 0.0 && r.is_finite() && e.is_finite() {
            xs.push(r.ln());
            ys.push(e.ln());
        } else {
            warn!("skipping pair (resolution {r}, error {e}) in rate fit");
        }
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::invalid(format!("rate fit needs at least 2 usable pairs, got {n}")));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("rate fit needs at least two distinct resolutions"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(RateFit { slope, intercept: my - slope * mx, used: n })
}
