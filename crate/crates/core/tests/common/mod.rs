//! Reference computations written independently of the library.
#![allow(dead_code)]

use std::f64::consts::PI;

pub fn bump(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (1.0 - x * x).powi(5)
    } else {
        0.0
    }
}

/// `∫ u0(y) N(y; x, D t) dy` for the bump by composite Simpson on `[-1, 1]`.
pub fn gaussian_convolution(d: f64, t: f64, x: f64) -> f64 {
    let var = d * t;
    let n = 8000;
    let h = 2.0 / n as f64;
    let f = |y: f64| bump(y) * (-(x - y) * (x - y) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
    let mut s = f(-1.0) + f(1.0);
    for i in 1..n {
        let y = -1.0 + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(y);
    }
    s * h / 3.0
}

pub fn heat_kernel(t: f64, x: f64, y: f64) -> f64 {
    (-(y - x) * (y - x) / (2.0 * t)).exp() / (2.0 * PI * t).sqrt()
}

/// Dense interior mass and stiffness of linear elements with constant `c` and
/// `κ` on a uniform mesh of `n` elements of width `h`.
pub fn p1_reference(n: usize, h: f64, c: f64, kappa: f64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let m = n - 1;
    let mut mass = vec![vec![0.0; m]; m];
    let mut stiff = vec![vec![0.0; m]; m];
    for i in 0..m {
        mass[i][i] = 2.0 * c * h / 3.0;
        stiff[i][i] = 2.0 * kappa / h;
        if i + 1 < m {
            mass[i][i + 1] = c * h / 6.0;
            mass[i + 1][i] = c * h / 6.0;
            stiff[i][i + 1] = -kappa / h;
            stiff[i + 1][i] = -kappa / h;
        }
    }
    (mass, stiff)
}

/// Two-sided sample standard error check: `|a − b| ≤ k·se`.
pub fn within(a: f64, b: f64, k: f64, se: f64) -> bool {
    (a - b).abs() <= k * se
}
