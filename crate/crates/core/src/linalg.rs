//! Symmetric tridiagonal matrices and the Thomas algorithm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n × n` tridiagonal matrix. `lower[i]` is entry `(i + 1, i)`, `upper[i]` is `(i, i + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Tridiagonal {
            lower: vec![0.0; n.saturating_sub(1)],
            diag: vec![0.0; n],
            upper: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if i == j + 1 {
            self.lower[j]
        } else if j == i + 1 {
            self.upper[i]
        } else {
            0.0
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.lower
            .iter()
            .zip(&self.upper)
            .all(|(l, u)| (l - u).abs() <= tol * l.abs().max(u.abs()).max(f64::MIN_POSITIVE))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        assert_eq!(x.len(), n);
        assert_eq!(y.len(), n);
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.upper[i] * x[i + 1];
            }
            y[i] = v;
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Tridiagonal, b: f64) -> Tridiagonal {
        assert_eq!(self.dim(), other.dim());
        let lin = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| a * x + b * y).collect();
        Tridiagonal {
            lower: lin(&self.lower, &other.lower),
            diag: lin(&self.diag, &other.diag),
            upper: lin(&self.upper, &other.upper),
        }
    }

    /// Pivots of the `LDLᵀ` factorization of a symmetric matrix; all positive iff it is
    /// positive definite. Returns `None` at the first nonpositive pivot.
    pub fn cholesky_pivots(&self) -> Option<Vec<f64>> {
        let mut d = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let pivot = if i == 0 {
                self.diag[0]
            } else {
                self.diag[i] - self.lower[i - 1] * self.upper[i - 1] / d[i - 1]
            };
            if !(pivot > 0.0) {
                return None;
            }
            d.push(pivot);
        }
        Some(d)
    }

    /// Upper bound on the largest eigenvalue of the pencil `(self, mass)`, `self x = μ mass x`,
    /// valid when `mass` is strictly diagonally dominant:
    /// `μ ≤ max_i Σ_j |self_ij| / (mass_ii − Σ_{j≠i} |mass_ij|)`.
    pub fn generalized_gershgorin_bound(&self, mass: &Tridiagonal) -> Option<f64> {
        let n = self.dim();
        let mut bound: f64 = 0.0;
        for i in 0..n {
            let off = |m: &Tridiagonal| {
                let mut s = 0.0;
                if i > 0 {
                    s += m.lower[i - 1].abs();
                }
                if i + 1 < n {
                    s += m.upper[i].abs();
                }
                s
            };
            let margin = mass.diag[i] - off(mass);
            if !(margin > 0.0) {
                return None;
            }
            bound = bound.max((self.diag[i].abs() + off(self)) / margin);
        }
        Some(bound)
    }

    /// Factorizes once for repeated solves.
    pub fn factorize(&self) -> Result<ThomasFactor> {
        ThomasFactor::new(self)
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let f = self.factorize()?;
        let mut x = rhs.to_vec();
        f.solve_in_place(&mut x);
        Ok(x)
    }
}

/// Forward-elimination coefficients of the Thomas algorithm (no pivoting).
#[derive(Debug, Clone)]
pub struct ThomasFactor {
    lower: Vec<f64>,
    // modified super-diagonal c'_i
    upper_mod: Vec<f64>,
    // reciprocal of the modified diagonal
    inv_pivot: Vec<f64>,
}

impl ThomasFactor {
    fn new(m: &Tridiagonal) -> Result<Self> {
        let n = m.dim();
        if n == 0 {
            return Err(Error::invalid("cannot factorize an empty matrix"));
        }
        let mut upper_mod = vec![0.0; n.saturating_sub(1)];
        let mut inv_pivot = vec![0.0; n];
        let mut prev_upper = 0.0;
        for i in 0..n {
            let pivot = if i == 0 {
                m.diag[0]
            } else {
                m.diag[i] - m.lower[i - 1] * prev_upper
            };
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::Numerical(format!("zero pivot at row {i} in tridiagonal solve")));
            }
            inv_pivot[i] = 1.0 / pivot;
            if i + 1 < n {
                prev_upper = m.upper[i] * inv_pivot[i];
                upper_mod[i] = prev_upper;
            }
        }
        Ok(ThomasFactor { lower: m.lower.clone(), upper_mod, inv_pivot })
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.inv_pivot.len();
        assert_eq!(x.len(), n);
        x[0] *= self.inv_pivot[0];
        for i in 1..n {
            x[i] = (x[i] - self.lower[i - 1] * x[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.upper_mod[i] * x[i + 1];
        }
    }
}
