use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where the interface `x = 0` falls on the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InterfaceLocation {
    /// `0` coincides with node `i`.
    Node(usize),
    /// `x_j < 0 < x_{j+1}`.
    Element(usize),
}

/// Uniform mesh of `[−L, L]` with `N` elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mesh1D {
    pub half_width: f64,
    pub n_elements: usize,
    pub h: f64,
    pub interface: InterfaceLocation,
}

// interface closer than this fraction of h to a node is snapped onto it
const NODE_SNAP: f64 = 1e-10;

pub fn build_mesh(half_width: f64, n_elements: usize) -> Result<Mesh1D> {
    if n_elements < 2 {
        return Err(Error::invalid(format!("mesh needs at least 2 elements, got {n_elements}")));
    }
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::NonPositive { field: "half_width", value: half_width });
    }
    let h = 2.0 * half_width / n_elements as f64;
    // 0 sits at fractional index L/h
    let position = half_width / h;
    let nearest = position.round();
    let interface = if (position - nearest).abs() <= NODE_SNAP {
        InterfaceLocation::Node(nearest as usize)
    } else {
        InterfaceLocation::Element(position.floor() as usize)
    };
    Ok(Mesh1D { half_width, n_elements, h, interface })
}

impl Mesh1D {
    /// Mesh with spacing `h`, which must divide `2L` into an integral number of elements.
    pub fn with_spacing(half_width: f64, h: f64) -> Result<Mesh1D> {
        if !(h > 0.0) {
            return Err(Error::NonPositive { field: "h", value: h });
        }
        let n = 2.0 * half_width / h;
        let rounded = n.round();
        if (n - rounded).abs() > 1e-9 * n.max(1.0) {
            return Err(Error::invalid(format!(
                "spacing h = {h} does not divide the domain [-{half_width}, {half_width}]"
            )));
        }
        build_mesh(half_width, rounded as usize)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_elements + 1
    }

    /// `x_i = −L + i·h`, with the interface node pinned to exactly 0.
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        if self.interface == InterfaceLocation::Node(i) {
            return 0.0;
        }
        if i == 0 {
            return -self.half_width;
        }
        if i == self.n_elements {
            return self.half_width;
        }
        // measured from the centre so nodes near the interface keep full relative precision
        (i as f64 - 0.5 * self.n_elements as f64) * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| self.node(i)).collect()
    }

    pub fn interface_element(&self) -> Option<usize> {
        match self.interface {
            InterfaceLocation::Element(j) => Some(j),
            InterfaceLocation::Node(_) => None,
        }
    }

    /// Element index containing `x`; a node shared by two elements maps to the
    /// element on its right, except `x = L`.
    pub fn locate(&self, x: f64) -> Result<usize> {
        let l = self.half_width;
        if !(x >= -l && x <= l) {
            return Err(Error::invalid(format!("x = {x} lies outside the domain [-{l}, {l}]")));
        }
        let mut e = ((x + l) / self.h).floor() as usize;
        e = e.min(self.n_elements - 1);
        // correct rounding at element boundaries
        while e > 0 && x < self.node(e) {
            e -= 1;
        }
        while e + 1 < self.n_elements && x > self.node(e + 1) {
            e += 1;
        }
        Ok(e)
    }
}
