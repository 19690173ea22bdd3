//! Closed-form reference solution.
//!
//! `p` is the transition density of skew Brownian motion with skewness `α`;
//! `q(t, x, y) = p(t, x/√D(x), y/√D(y)) / √D(y)` is the density of the skew
//! diffusion `Y = σ(B^(α))`, and the PDE solution is `u(t, x) = ∫ u0(y) q(t, x, y) dy`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::problem::{InterfaceProblem, SkewParameters};
use crate::quadrature::{integrate_with_breakpoints, QuadratureSettings};

#[inline]
fn heat_kernel(t: f64, z: f64) -> f64 {
    (-z * z / (2.0 * t)).exp() / (2.0 * PI * t).sqrt()
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::NonPositive { field: "t", value: t });
    }
    Ok(())
}

/// Skew Brownian motion transition density. Points at `0` belong to the minus side;
/// the four branches agree there.
pub fn skew_density_p(t: f64, x: f64, y: f64, alpha: f64) -> Result<f64> {
    check_time(t)?;
    Ok(skew_density_unchecked(t, x, y, alpha))
}

#[inline]
fn skew_density_unchecked(t: f64, x: f64, y: f64, alpha: f64) -> f64 {
    let direct = heat_kernel(t, y - x);
    match (x > 0.0, y > 0.0) {
        (true, true) => direct + (2.0 * alpha - 1.0) * heat_kernel(t, x + y),
        (false, false) => direct - (2.0 * alpha - 1.0) * heat_kernel(t, x + y),
        (false, true) => 2.0 * alpha * direct,
        (true, false) => 2.0 * (1.0 - alpha) * direct,
    }
}

/// Transition density of the skew diffusion with side coefficients `D±`.
pub fn skew_diffusion_density_q(t: f64, x: f64, y: f64, sp: &SkewParameters) -> Result<f64> {
    check_time(t)?;
    Ok(q_unchecked(t, x, y, sp))
}

#[inline]
fn q_unchecked(t: f64, x: f64, y: f64, sp: &SkewParameters) -> f64 {
    let sy = sp.sigma(y);
    skew_density_unchecked(t, x / sp.sigma(x), y / sy, sp.alpha) / sy
}

/// Density evaluator with quadrature settings, for repeated reference evaluations.
#[derive(Debug, Clone, Copy)]
pub struct SkewDensity {
    pub params: SkewParameters,
    pub quadrature: QuadratureSettings,
}

impl SkewDensity {
    pub fn new(params: SkewParameters) -> Self {
        SkewDensity { params, quadrature: QuadratureSettings::default() }
    }

    pub fn with_tolerance(mut self, abs_tol: f64) -> Self {
        self.quadrature.abs_tol = abs_tol;
        self
    }

    pub fn q(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        skew_diffusion_density_q(t, x, y, &self.params)
    }

    /// Breakpoints inside `[a, b]` where the integrand against `q(t, x, ·)` changes
    /// character: the interface, the Gaussian peak at `x`, and a few widths around both.
    fn breakpoints(&self, t: f64, x: f64, a: f64, b: f64) -> Vec<f64> {
        let root_t = t.sqrt();
        let width_x = self.params.sigma(x) * root_t;
        let mut pts = vec![a, b, 0.0, x];
        for k in [4.0, 8.0] {
            pts.push(x - k * width_x);
            pts.push(x + k * width_x);
            pts.push(-k * self.params.sigma_minus * root_t);
            pts.push(k * self.params.sigma_plus * root_t);
        }
        pts.retain(|p| *p >= a && *p <= b);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `∫_a^b g(y) q(t, x, y) dy`.
    pub fn integrate_against<G: Fn(f64) -> f64>(
        &self,
        g: G,
        t: f64,
        x: f64,
        (a, b): (f64, f64),
    ) -> Result<f64> {
        check_time(t)?;
        let pts = self.breakpoints(t, x, a, b);
        let sp = self.params;
        let r = integrate_with_breakpoints(|y| g(y) * q_unchecked(t, x, y, &sp), &pts, self.quadrature)
            .map_err(|e| e.context(format!("integrating against q(t={t}, x={x}, ·)")))?;
        Ok(r.value)
    }

    /// `∫_ℝ q(t, x, y) dy`, truncated where the tails fall below double precision.
    pub fn total_mass(&self, t: f64, x: f64) -> Result<f64> {
        check_time(t)?;
        let reach = 40.0 * self.params.sigma_plus.max(self.params.sigma_minus) * t.sqrt();
        self.integrate_against(|_| 1.0, t, x, (x.min(0.0) - reach, x.max(0.0) + reach))
    }
}

/// Reference solution `u(t, x)` for a problem, with configurable tolerance.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    problem: InterfaceProblem,
    density: SkewDensity,
}

impl ExactSolution {
    pub fn new(problem: &InterfaceProblem) -> Self {
        ExactSolution {
            problem: problem.clone(),
            density: SkewDensity::new(problem.skew_parameters()),
        }
    }

    pub fn with_tolerance(mut self, abs_tol: f64) -> Self {
        self.density = self.density.with_tolerance(abs_tol);
        self
    }

    pub fn problem(&self) -> &InterfaceProblem {
        &self.problem
    }

    pub fn value(&self, t: f64, x: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(self.problem.u0.eval(x));
        }
        check_time(t)?;
        let support = self.problem.u0.require_support()?;
        let u0 = &self.problem.u0;
        self.density.integrate_against(|y| u0.eval(y), t, x, support)
    }
}

/// `u(t, x) = E^x u0(Y(t))` by quadrature against the skew-diffusion density.
pub fn exact_solution_u(problem: &InterfaceProblem, t: f64, x: f64) -> Result<f64> {
    ExactSolution::new(problem).value(t, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(d_plus: f64, d_minus: f64, lambda: f64) -> SkewParameters {
        InterfaceProblem::new(d_plus, d_minus, lambda, 1.0).unwrap().skew_parameters()
    }

    #[test]
    fn symmetric_alpha_is_heat_kernel() {
        for &(x, y) in &[(0.3, 0.9), (-0.3, 0.9), (0.3, -0.9), (-1.2, -0.1), (0.0, 0.0), (0.0, 2.0)] {
            let p = skew_density_p(0.7, x, y, 0.5).unwrap();
            assert_abs_diff_eq!(p, heat_kernel(0.7, y - x), epsilon = 1e-15);
        }
    }

    #[test]
    fn from_origin_into_plus_side() {
        let (t, y, a) = (0.4, 0.8, 0.3);
        let expected = 2.0 * a / (2.0 * PI * t).sqrt() * (-y * y / (2.0 * t)).exp();
        assert_abs_diff_eq!(skew_density_p(t, 0.0, y, a).unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn branches_agree_at_origin() {
        let (t, a) = (0.3, 0.8);
        for y in [-1.0, -0.2, 0.4, 1.5] {
            let at_zero = skew_density_p(t, 0.0, y, a).unwrap();
            let just_right = skew_density_p(t, 1e-12, y, a).unwrap();
            assert_abs_diff_eq!(at_zero, just_right, epsilon = 1e-10);
        }
    }

    #[test]
    fn nonpositive_time_rejected() {
        assert!(skew_density_p(0.0, 0.0, 1.0, 0.5).is_err());
        assert!(skew_diffusion_density_q(-1.0, 0.0, 1.0, &params(1.0, 1.0, 0.5)).is_err());
        let p = InterfaceProblem::new(10.0, 1.0, 0.5, 0.2).unwrap();
        assert!(exact_solution_u(&p, -0.1, 0.0).is_err());
        assert_eq!(exact_solution_u(&p, 0.0, 0.5).unwrap(), p.u0.eval(0.5));
    }

    #[test]
    fn unit_coefficients_q_equals_p() {
        let sp = params(1.0, 1.0, 0.3);
        for &(x, y) in &[(0.3, 0.9), (-0.3, 0.9), (0.3, -0.9), (-1.2, -0.1)] {
            assert_eq!(
                skew_diffusion_density_q(0.5, x, y, &sp).unwrap(),
                skew_density_p(0.5, x, y, sp.alpha).unwrap()
            );
        }
    }

    #[test]
    fn scaling_substitution() {
        let sp = params(4.0, 1.0, 0.37);
        let q = skew_diffusion_density_q(0.3, -1.0, 2.0, &sp).unwrap();
        let p = skew_density_p(0.3, -1.0, 1.0, sp.alpha).unwrap();
        assert_abs_diff_eq!(q, 0.5 * p, epsilon = 1e-16);
    }

    #[test]
    fn p_normalized() {
        for alpha in [0.24, 0.5, 0.76] {
            let sp = SkewParameters {
                lambda: 0.5,
                alpha,
                sigma_plus: 1.0,
                sigma_minus: 1.0,
                theta_plus: 0.5,
                theta_minus: 0.5,
            };
            let mass = SkewDensity::new(sp).with_tolerance(1e-12).total_mass(1.0, 0.7).unwrap();
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn q_normalized() {
        let sp = params(10.0, 1.0, 0.5);
        let mass = SkewDensity::new(sp).total_mass(0.2, -1.5).unwrap();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn short_time_returns_initial_profile() {
        let p = InterfaceProblem::new(10.0, 1.0, 0.5, 0.2).unwrap();
        for x in [-0.5, 0.5] {
            let u = exact_solution_u(&p, 1e-8, x).unwrap();
            assert_abs_diff_eq!(u, p.u0.eval(x), epsilon = 1e-6);
        }
    }

    #[test]
    fn continuous_across_interface() {
        let p = InterfaceProblem::new(100.0, 1.0, 0.5, 0.2).unwrap();
        let left = exact_solution_u(&p, 0.2, -1e-10).unwrap();
        let right = exact_solution_u(&p, 0.2, 1e-10).unwrap();
        assert_abs_diff_eq!(left, right, epsilon = 1e-8);
    }

    #[test]
    fn even_data_symmetric_solution() {
        let p = InterfaceProblem::new(3.0, 3.0, 0.5, 0.2).unwrap();
        let exact = ExactSolution::new(&p);
        for x in [0.2, 0.9, 1.7] {
            assert_abs_diff_eq!(exact.value(0.2, x).unwrap(), exact.value(0.2, -x).unwrap(), epsilon = 1e-12);
        }
    }
}
