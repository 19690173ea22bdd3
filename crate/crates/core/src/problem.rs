//! The interface problem and the coefficient algebra shared by every solver.
//!
//! The diffusion coefficient is `D⁺` on `x > 0` and `D⁻` on `x < 0`; at the
//! interface the solution is continuous and its one-sided slopes satisfy
//! `λ u_x(0⁺) = (1 − λ) u_x(0⁻)`. Everything downstream (the immersed finite
//! element space, the skew-diffusion simulation, the exact density) is a
//! function of `(D⁺, D⁻, λ)` through the types defined here.
//!
//! Wherever a coefficient is needed at exactly `x = 0` the minus side is
//! used, matching the left derivative of the piecewise-linear map `β`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interface value `λ* = D⁺ / (D⁺ + D⁻)`, for which the physical flux `D u_x` is continuous.
pub fn lambda_star(d_plus: f64, d_minus: f64) -> f64 {
    d_plus / (d_plus + d_minus)
}

/// Interface value `λ# = 1/2`, for which `u_x` itself is continuous.
pub const LAMBDA_SHARP: f64 = 0.5;

type ProfileFn = dyn Fn(f64) -> f64 + Send + Sync;

/// An initial profile `u0` with a declared support interval.
///
/// Quadrature-based consumers (the exact solution, the L² projection) need a
/// finite support; Monte Carlo only evaluates the function pointwise.
#[derive(Clone)]
pub struct InitialProfile {
    name: String,
    support: Option<(f64, f64)>,
    f: Arc<ProfileFn>,
}

impl InitialProfile {
    pub fn new<F>(name: impl Into<String>, support: (f64, f64), f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        InitialProfile {
            name: name.into(),
            support: Some(support),
            f: Arc::new(f),
        }
    }

    /// `(1 − x²)⁵` on `|x| < 1`, zero elsewhere.
    pub fn bump() -> Self {
        InitialProfile::new("bump", (-1.0, 1.0), |x: f64| {
            if x.abs() < 1.0 {
                (1.0 - x * x).powi(5)
            } else {
                0.0
            }
        })
    }

    /// Constant profile without compact support. Only usable by the Monte Carlo route.
    pub fn constant(value: f64) -> Self {
        InitialProfile {
            name: format!("constant({value})"),
            support: None,
            f: Arc::new(move |_| value),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        self.support
    }

    pub(crate) fn require_support(&self) -> Result<(f64, f64)> {
        self.support.ok_or_else(|| {
            Error::invalid(format!(
                "initial profile '{}' has no declared compact support",
                self.name
            ))
        })
    }
}

impl fmt::Debug for InitialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialProfile")
            .field("name", &self.name)
            .field("support", &self.support)
            .finish()
    }
}

/// Half-width used when none is given: large enough that the homogeneous
/// Dirichlet walls sit roughly eight diffusion lengths away from the origin,
/// rounded up to a multiple of 5 and never below 10.
pub fn default_half_width(d_plus: f64, d_minus: f64, final_time: f64) -> f64 {
    let spread = (d_plus.max(d_minus) * final_time).sqrt();
    let raw = 8.0 * spread + 1.0;
    (5.0 * (raw / 5.0).ceil()).max(10.0)
}

#[derive(Debug, Clone)]
pub struct InterfaceProblem {
    pub d_plus: f64,
    pub d_minus: f64,
    pub lambda: f64,
    pub u0: InitialProfile,
    pub half_width: f64,
    pub final_time: f64,
}

impl InterfaceProblem {
    /// Problem with the bump profile and the default half-width, validated.
    pub fn new(d_plus: f64, d_minus: f64, lambda: f64, final_time: f64) -> Result<Self> {
        InterfaceProblem {
            d_plus,
            d_minus,
            lambda,
            u0: InitialProfile::bump(),
            half_width: default_half_width(d_plus.abs(), d_minus.abs(), final_time.abs()),
            final_time,
        }
        .validate()
    }

    pub fn with_profile(mut self, u0: InitialProfile) -> Self {
        self.u0 = u0;
        self
    }

    pub fn with_half_width(mut self, half_width: f64) -> Result<Self> {
        self.half_width = half_width;
        self.validate()
    }

    /// Checks every invariant and hands the problem back unchanged.
    pub fn validate(self) -> Result<Self> {
        validate_problem(self)
    }

    #[inline]
    pub fn diffusion(&self, x: f64) -> f64 {
        if x > 0.0 {
            self.d_plus
        } else {
            self.d_minus
        }
    }

    pub fn symmetrize(&self) -> SymmetrizedCoefficients {
        symmetrize(self)
    }

    pub fn skew_parameters(&self) -> SkewParameters {
        alpha_of_lambda(self)
    }

    /// The problem with the two half-lines exchanged (`x ↦ −x`).
    pub fn mirrored(&self) -> Self {
        let u0 = self.u0.clone();
        let support = u0.support().map(|(a, b)| (-b, -a));
        let mirrored_u0 = InitialProfile {
            name: format!("mirror({})", u0.name()),
            support,
            f: Arc::new(move |x| u0.eval(-x)),
        };
        InterfaceProblem {
            d_plus: self.d_minus,
            d_minus: self.d_plus,
            lambda: 1.0 - self.lambda,
            u0: mirrored_u0,
            half_width: self.half_width,
            final_time: self.final_time,
        }
    }
}

pub fn validate_problem(p: InterfaceProblem) -> Result<InterfaceProblem> {
    let positive = [
        ("d_plus", p.d_plus),
        ("d_minus", p.d_minus),
        ("final_time", p.final_time),
        ("half_width", p.half_width),
    ];
    for (field, value) in positive {
        // written so that NaN is rejected too
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NonPositive { field, value });
        }
    }
    if !(p.lambda > 0.0 && p.lambda < 1.0) {
        return Err(Error::LambdaOutOfRange(p.lambda));
    }
    if let Some((a, b)) = p.u0.support() {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid(format!(
                "initial profile support [{a}, {b}] is not a finite interval"
            )));
        }
    }
    Ok(p)
}

/// Coefficients of the self-adjoint form `c u_t = (κ u_x)_x`, in which the
/// transmission condition becomes the natural flux condition `[κ u_x] = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizedCoefficients {
    pub c_plus: f64,
    pub c_minus: f64,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub rho: f64,
}

impl SymmetrizedCoefficients {
    #[inline]
    pub fn c(&self, x: f64) -> f64 {
        if x > 0.0 {
            self.c_plus
        } else {
            self.c_minus
        }
    }

    #[inline]
    pub fn kappa(&self, x: f64) -> f64 {
        if x > 0.0 {
            self.kappa_plus
        } else {
            self.kappa_minus
        }
    }

    /// `κ⁺ s⁺ − κ⁻ s⁻` for a pair of one-sided slopes.
    #[inline]
    pub fn flux_jump(&self, slope_minus: f64, slope_plus: f64) -> f64 {
        self.kappa_plus * slope_plus - self.kappa_minus * slope_minus
    }
}

pub fn symmetrize(p: &InterfaceProblem) -> SymmetrizedCoefficients {
    let kappa_plus = p.lambda / 2.0;
    let kappa_minus = (1.0 - p.lambda) / 2.0;
    SymmetrizedCoefficients {
        c_plus: p.lambda / p.d_plus,
        c_minus: (1.0 - p.lambda) / p.d_minus,
        kappa_plus,
        kappa_minus,
        rho: (kappa_minus / kappa_plus).max(kappa_plus / kappa_minus),
    }
}

/// Parameters of the skew diffusion and of its driftless image under `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkewParameters {
    pub lambda: f64,
    pub alpha: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    /// Volatility of `X = β(Y)` on `x > 0`: `(1 − λ)√D⁺`.
    pub theta_plus: f64,
    /// Volatility of `X = β(Y)` on `x ≤ 0`: `λ√D⁻`.
    pub theta_minus: f64,
}

impl SkewParameters {
    /// `√D(x)`, minus side at `x = 0`.
    #[inline]
    pub fn sigma(&self, x: f64) -> f64 {
        if x > 0.0 {
            self.sigma_plus
        } else {
            self.sigma_minus
        }
    }
}

/// Skewness `α = λ√D⁻ / (λ√D⁻ + (1 − λ)√D⁺)` together with the side volatilities.
pub fn alpha_of_lambda(p: &InterfaceProblem) -> SkewParameters {
    let sigma_plus = p.d_plus.sqrt();
    let sigma_minus = p.d_minus.sqrt();
    let theta_plus = (1.0 - p.lambda) * sigma_plus;
    let theta_minus = p.lambda * sigma_minus;
    SkewParameters {
        lambda: p.lambda,
        alpha: theta_minus / (theta_minus + theta_plus),
        sigma_plus,
        sigma_minus,
        theta_plus,
        theta_minus,
    }
}

/// `β(x) = λx` for `x ≤ 0`, `(1 − λ)x` for `x > 0`.
#[inline]
pub fn beta_forward(x: f64, lambda: f64) -> f64 {
    if x > 0.0 {
        (1.0 - lambda) * x
    } else {
        lambda * x
    }
}

#[inline]
pub fn beta_inverse(y: f64, lambda: f64) -> f64 {
    if y > 0.0 {
        y / (1.0 - lambda)
    } else {
        y / lambda
    }
}

/// Left derivative of `β`.
#[inline]
pub fn beta_left_derivative(x: f64, lambda: f64) -> f64 {
    if x > 0.0 {
        1.0 - lambda
    } else {
        lambda
    }
}

/// `θ(x) = β′₋(x)√D(x)`, the volatility of the transformed process.
#[inline]
pub fn theta_coefficient(x: f64, sp: &SkewParameters) -> f64 {
    if x > 0.0 {
        sp.theta_plus
    } else {
        sp.theta_minus
    }
}

/// Constants that appear only in the a-priori error bounds of the IFE scheme.
/// They are reported alongside convergence studies and never used in computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorConstants {
    pub rho: f64,
    pub alpha1: f64,
    pub alpha3: f64,
    pub alpha5: f64,
}

impl ErrorConstants {
    pub fn new(coeffs: &SymmetrizedCoefficients) -> Self {
        let (cp, cm) = (coeffs.c_plus, coeffs.c_minus);
        let (kp, km) = (coeffs.kappa_plus, coeffs.kappa_minus);
        ErrorConstants {
            rho: coeffs.rho,
            alpha1: cp.max(cm) / cp.min(cm),
            alpha3: cp.sqrt().max(cm.sqrt()) / cp.sqrt().min(cm.sqrt()),
            alpha5: kp.sqrt().max(km.sqrt()) / cp.sqrt().min(cm.sqrt()),
        }
    }

    /// `max_{0 ≤ ℓ ≤ k−1} α₃^ℓ` for a run of `k` steps. Overflows to infinity for
    /// strongly contrasting coefficients and long runs, which is reported as is.
    pub fn alpha4(&self, steps: usize) -> f64 {
        if steps == 0 {
            return 1.0;
        }
        // α₃ ≥ 1, so the maximum is attained at ℓ = k − 1
        self.alpha3.powi((steps - 1).min(i32::MAX as usize) as i32)
    }
}
