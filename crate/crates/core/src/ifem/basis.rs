use serde::{Deserialize, Serialize};

use super::mesh::Mesh1D;
use crate::error::{Error, Result};

/// One modified basis function restricted to the interface element: linear with
/// slope `slope_minus` on `[x_left, 0]` and `slope_plus` on `[0, x_right]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinkedLinear {
    pub interface_value: f64,
    pub slope_minus: f64,
    pub slope_plus: f64,
}

impl KinkedLinear {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let slope = if x > 0.0 { self.slope_plus } else { self.slope_minus };
        self.interface_value + slope * x
    }

    #[inline]
    pub fn slope(&self, x: f64) -> f64 {
        if x > 0.0 {
            self.slope_plus
        } else {
            self.slope_minus
        }
    }
}

/// The two IFE basis functions on the element `[x_left, x_right]` containing the interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IfeBasisLocal {
    pub element: usize,
    pub x_left: f64,
    pub x_right: f64,
    pub kappa_minus: f64,
    pub kappa_plus: f64,
    /// Nodal basis function of the left node.
    pub left: KinkedLinear,
    /// Nodal basis function of the right node.
    pub right: KinkedLinear,
}

impl IfeBasisLocal {
    /// Solves the continuity and flux conditions in closed form for an element with
    /// `x_left < 0 < x_right`.
    ///
    /// For the left function, with `a = −x_left`, `b = x_right`, `r = κ⁺/κ⁻`:
    /// `v = 1 + a s⁻ = −b s⁺` and `s⁻ = r s⁺`, giving `s⁺ = −1/(b + a r)`.
    /// The right function is `1 − left` on the element.
    pub fn on_element(
        element: usize,
        x_left: f64,
        x_right: f64,
        kappa_minus: f64,
        kappa_plus: f64,
    ) -> Result<Self> {
        if !(x_right > x_left) {
            return Err(Error::invalid(format!(
                "degenerate interface element [{x_left}, {x_right}]"
            )));
        }
        if !(x_left < 0.0 && x_right > 0.0) {
            return Err(Error::invalid(format!(
                "interface x = 0 is not strictly inside [{x_left}, {x_right}]"
            )));
        }
        if !(kappa_minus > 0.0 && kappa_plus > 0.0) {
            return Err(Error::invalid("flux coefficients must be positive"));
        }
        let a = -x_left;
        let b = x_right;
        let ratio = kappa_plus / kappa_minus;
        let slope_plus = -1.0 / (b + a * ratio);
        let slope_minus = ratio * slope_plus;
        let left = KinkedLinear {
            interface_value: -b * slope_plus,
            slope_minus,
            slope_plus,
        };
        let right = KinkedLinear {
            interface_value: 1.0 - left.interface_value,
            slope_minus: -slope_minus,
            slope_plus: -slope_plus,
        };
        Ok(IfeBasisLocal { element, x_left, x_right, kappa_minus, kappa_plus, left, right })
    }

    /// `(left, right)` basis values at `x`.
    #[inline]
    pub fn eval(&self, x: f64) -> (f64, f64) {
        if x == self.x_left {
            return (1.0, 0.0);
        }
        if x == self.x_right {
            return (0.0, 1.0);
        }
        (self.left.eval(x), self.right.eval(x))
    }

    pub fn functions(&self) -> [&KinkedLinear; 2] {
        [&self.left, &self.right]
    }

    /// `([φ], [κφ′])` for the left and right functions, with `[φ]` measured by
    /// extrapolating each linear piece from its node to the interface.
    pub fn jump_residuals(&self) -> [(f64, f64); 2] {
        let nodal = [(1.0, 0.0), (0.0, 1.0)];
        let mut out = [(0.0, 0.0); 2];
        for (k, f) in self.functions().into_iter().enumerate() {
            let (at_left, at_right) = nodal[k];
            let from_left = at_left + f.slope_minus * (0.0 - self.x_left);
            let from_right = at_right - f.slope_plus * self.x_right;
            out[k] = (
                from_right - from_left,
                self.kappa_plus * f.slope_plus - self.kappa_minus * f.slope_minus,
            );
        }
        out
    }
}

/// Modified basis on the mesh's interface element.
///
/// Fails when the interface coincides with a node; the standard hat functions with
/// element-wise coefficients are used there instead.
pub fn interface_basis(mesh: &Mesh1D, kappa_minus: f64, kappa_plus: f64) -> Result<IfeBasisLocal> {
    if !(mesh.h > 0.0) {
        return Err(Error::invalid(format!("degenerate mesh spacing h = {}", mesh.h)));
    }
    let j = mesh.interface_element().ok_or_else(|| {
        Error::invalid("interface coincides with a mesh node; no modified basis is needed")
    })?;
    IfeBasisLocal::on_element(j, mesh.node(j), mesh.node(j + 1), kappa_minus, kappa_plus)
}
