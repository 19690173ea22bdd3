use serde::{Deserialize, Serialize};

use super::basis::{interface_basis, IfeBasisLocal};
use super::mesh::{InterfaceLocation, Mesh1D};
use crate::error::{Error, Result};
use crate::linalg::Tridiagonal;
use crate::problem::{InitialProfile, SymmetrizedCoefficients};
use crate::quadrature::gauss_legendre_7;

/// A sub-interval of an element on which both local basis functions are linear
/// and the coefficients are constant.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Piece {
    pub p: f64,
    pub q: f64,
    /// `q − p`, taken as the mesh spacing on whole elements
    pub len: f64,
    pub c: f64,
    pub kappa: f64,
    /// values of the (left, right) local functions at `p` and at `q`
    pub at_p: [f64; 2],
    pub at_q: [f64; 2],
}

impl Piece {
    fn slope(&self, k: usize) -> f64 {
        (self.at_q[k] - self.at_p[k]) / self.len
    }

    fn value(&self, k: usize, x: f64) -> f64 {
        let t = (x - self.p) / self.len;
        self.at_p[k] + t * (self.at_q[k] - self.at_p[k])
    }
}

/// Mesh, basis and the assembled interior-node matrices of the IFE discretization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IfeSystem {
    pub mesh: Mesh1D,
    pub basis: Option<IfeBasisLocal>,
    pub coeffs: SymmetrizedCoefficients,
    /// `∫ c φ_i φ_j`
    pub mass: Tridiagonal,
    /// `∫ κ φ_i′ φ_j′`
    pub stiffness: Tridiagonal,
    /// `∫ φ_i φ_j`, used by the initial projection
    pub plain_mass: Tridiagonal,
}

impl IfeSystem {
    pub fn new(mesh: Mesh1D, coeffs: SymmetrizedCoefficients) -> Result<Self> {
        let basis = match mesh.interface {
            InterfaceLocation::Node(_) => None,
            InterfaceLocation::Element(_) => {
                Some(interface_basis(&mesh, coeffs.kappa_minus, coeffs.kappa_plus)?)
            }
        };
        let (mass, stiffness, plain_mass) = assemble_matrices(&mesh, basis.as_ref(), &coeffs);
        Ok(IfeSystem { mesh, basis, coeffs, mass, stiffness, plain_mass })
    }

    pub(crate) fn element_pieces(&self, e: usize) -> ([Piece; 2], usize) {
        element_pieces(&self.mesh, self.basis.as_ref(), &self.coeffs, e)
    }

    /// Evaluates the finite element function with full nodal vector `u` (length `N + 1`) at `x`.
    pub fn evaluate(&self, u: &[f64], x: f64) -> Result<f64> {
        if u.len() != self.mesh.n_nodes() {
            return Err(Error::invalid(format!(
                "coefficient vector has length {}, mesh has {} nodes",
                u.len(),
                self.mesh.n_nodes()
            )));
        }
        let e = self.mesh.locate(x)?;
        let (left, right) = self.local_values(e, x);
        Ok(u[e] * left + u[e + 1] * right)
    }

    /// Values of the two local basis functions of element `e` at `x`.
    pub fn local_values(&self, e: usize, x: f64) -> (f64, f64) {
        match &self.basis {
            Some(b) if b.element == e => b.eval(x),
            _ => {
                let (xl, xr) = (self.mesh.node(e), self.mesh.node(e + 1));
                if x == xr {
                    return (0.0, 1.0);
                }
                let t = (x - xl) / self.mesh.h;
                (1.0 - t, t)
            }
        }
    }
}

fn element_pieces(
    mesh: &Mesh1D,
    basis: Option<&IfeBasisLocal>,
    coeffs: &SymmetrizedCoefficients,
    e: usize,
) -> ([Piece; 2], usize) {
    let xl = mesh.node(e);
    let xr = mesh.node(e + 1);
    match basis {
        Some(b) if b.element == e => {
            let v = [b.left.interface_value, b.right.interface_value];
            let minus = Piece {
                p: xl,
                q: 0.0,
                len: -xl,
                c: coeffs.c_minus,
                kappa: coeffs.kappa_minus,
                at_p: [1.0, 0.0],
                at_q: v,
            };
            let plus = Piece {
                p: 0.0,
                q: xr,
                len: xr,
                c: coeffs.c_plus,
                kappa: coeffs.kappa_plus,
                at_p: v,
                at_q: [0.0, 1.0],
            };
            ([minus, plus], 2)
        }
        _ => {
            let mid = 0.5 * (xl + xr);
            let piece = Piece {
                p: xl,
                q: xr,
                len: mesh.h,
                c: coeffs.c(mid),
                kappa: coeffs.kappa(mid),
                at_p: [1.0, 0.0],
                at_q: [0.0, 1.0],
            };
            ([piece, piece], 1)
        }
    }
}

/// Assembles the weighted mass, stiffness and unweighted mass matrices over the
/// interior nodes `1..N−1`. Every element integral is exact: the integrands are
/// products of linear functions on each constant-coefficient piece.
pub fn assemble(
    mesh: &Mesh1D,
    basis: Option<&IfeBasisLocal>,
    coeffs: &SymmetrizedCoefficients,
) -> (Tridiagonal, Tridiagonal) {
    let (m, k, _) = assemble_matrices(mesh, basis, coeffs);
    (m, k)
}

fn assemble_matrices(
    mesh: &Mesh1D,
    basis: Option<&IfeBasisLocal>,
    coeffs: &SymmetrizedCoefficients,
) -> (Tridiagonal, Tridiagonal, Tridiagonal) {
    let n_interior = mesh.n_elements - 1;
    let mut mass = Tridiagonal::zeros(n_interior);
    let mut stiffness = Tridiagonal::zeros(n_interior);
    let mut plain = Tridiagonal::zeros(n_interior);

    for e in 0..mesh.n_elements {
        let (pieces, count) = element_pieces(mesh, basis, coeffs, e);
        let mut m_loc = [[0.0; 2]; 2];
        let mut k_loc = [[0.0; 2]; 2];
        let mut p_loc = [[0.0; 2]; 2];
        for piece in &pieces[..count] {
            let len = piece.len;
            for a in 0..2 {
                for b in 0..2 {
                    let (fa, ga) = (piece.at_p[a], piece.at_q[a]);
                    let (fb, gb) = (piece.at_p[b], piece.at_q[b]);
                    // exact ∫ of a product of two linear functions
                    let prod = len / 6.0 * (2.0 * fa * fb + fa * gb + ga * fb + 2.0 * ga * gb);
                    m_loc[a][b] += piece.c * prod;
                    p_loc[a][b] += prod;
                    k_loc[a][b] += piece.kappa * len * piece.slope(a) * piece.slope(b);
                }
            }
        }
        scatter(&mut mass, &m_loc, e, mesh.n_elements);
        scatter(&mut stiffness, &k_loc, e, mesh.n_elements);
        scatter(&mut plain, &p_loc, e, mesh.n_elements);
    }
    (mass, stiffness, plain)
}

fn scatter(global: &mut Tridiagonal, local: &[[f64; 2]; 2], e: usize, n_elements: usize) {
    let interior = |g: usize| (g >= 1 && g < n_elements).then(|| g - 1);
    let rows = [interior(e), interior(e + 1)];
    for a in 0..2 {
        let Some(i) = rows[a] else { continue };
        global.diag[i] += local[a][a];
    }
    if let (Some(i), Some(j)) = (rows[0], rows[1]) {
        global.upper[i] += local[0][1];
        global.lower[i] += local[1][0];
        debug_assert_eq!(j, i + 1);
    }
}

/// Coefficients of the unweighted L² projection of `u0`, as a full nodal vector
/// with zero boundary entries.
///
/// Load integrals are split at the interface and at the support endpoints of `u0`
/// and evaluated with 7-point Gauss–Legendre on each piece.
pub fn l2_project_initial(system: &IfeSystem, u0: &InitialProfile) -> Result<Vec<f64>> {
    let (sa, sb) = u0.require_support()?;
    let mesh = &system.mesh;
    let mut load = vec![0.0; mesh.n_elements - 1];
    for e in 0..mesh.n_elements {
        let (xl, xr) = (mesh.node(e), mesh.node(e + 1));
        if xr <= sa || xl >= sb {
            continue;
        }
        let (pieces, count) = system.element_pieces(e);
        let mut local = [0.0; 2];
        for piece in &pieces[..count] {
            let mut cuts = vec![piece.p];
            for s in [sa, sb] {
                if s > piece.p && s < piece.q {
                    cuts.push(s);
                }
            }
            cuts.push(piece.q);
            for w in cuts.windows(2) {
                for (k, slot) in local.iter_mut().enumerate() {
                    *slot += gauss_legendre_7(|x| u0.eval(x) * piece.value(k, x), w[0], w[1]);
                }
            }
        }
        for (k, value) in local.iter().enumerate() {
            let g = e + k;
            if g >= 1 && g < mesh.n_elements {
                load[g - 1] += value;
            }
        }
    }
    if let Some(i) = load.iter().position(|v| !v.is_finite()) {
        return Err(Error::Quadrature(format!(
            "load integral for node {} is not finite (initial profile '{}')",
            i + 1,
            u0.name()
        )));
    }
    let interior = system.plain_mass.solve(&load)?;
    let mut full = Vec::with_capacity(mesh.n_nodes());
    full.push(0.0);
    full.extend(interior);
    full.push(0.0);
    Ok(full)
}
