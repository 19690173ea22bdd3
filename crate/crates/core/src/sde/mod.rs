//! Euler–Maruyama Monte Carlo for the skew diffusion.
//!
//! The skew diffusion `Y` carries a local-time drift at the interface. Its image
//! `X = β(Y)` under the piecewise-linear map `β` is driftless with volatility
//! `θ(x)`, so `X` is stepped with plain Euler–Maruyama and mapped back with `β⁻¹`.

mod mc;
mod rng;
mod sim;

pub use mc::{monte_carlo_estimate, McEstimate, BLOCK_PATHS};
pub use rng::{inverse_normal_cdf, GaussianSampler, NormalStream, StreamFamily};
pub use sim::{euler_step, simulate_path, simulate_terminal, SimConfig};
