//! Gauss–Legendre and adaptive Gauss–Kronrod quadrature.
//!
//! The integrands handled here (initial profile times a transition density,
//! or times a finite element basis function) are smooth except at a handful
//! of known points, so callers pass those points as breakpoints and the
//! adaptive scheme only has to resolve smooth pieces.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae (positive half) and weights; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 7-point Gauss–Legendre rule on `[a, b]`; exact for polynomials of degree ≤ 13.
pub fn gauss_legendre_7<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = WG[3] * f(center);
    for j in 0..3 {
        let dx = half * XGK[2 * j + 1];
        sum += WG[j] * (f(center - dx) + f(center + dx));
    }
    sum * half
}

/// One 15-point Kronrod evaluation: (integral, error estimate).
fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    (value, error)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            abs_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod integration over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    settings: QuadratureSettings,
) -> Result<QuadratureResult> {
    integrate_with_breakpoints(f, &[a, b], settings)
}

/// Globally adaptive Gauss–Kronrod integration over the consecutive intervals
/// delimited by `points` (sorted ascending; duplicates are ignored).
///
/// The piece with the largest error estimate is bisected until the summed
/// estimate drops below `abs_tol`.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    settings: QuadratureSettings,
) -> Result<QuadratureResult> {
    if points.len() < 2 {
        return Err(Error::invalid("quadrature needs at least two breakpoints"));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::Quadrature("non-finite breakpoint".into()));
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("quadrature breakpoints must be sorted"));
    }

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gauss_kronrod_15(&f, w[0], w[1]);
            total += value;
            total_err += error;
            heap.push(Piece { a: w[0], b: w[1], value, error });
        }
    }
    if !total.is_finite() {
        return Err(Error::Quadrature("integrand produced a non-finite value".into()));
    }

    while total_err > settings.abs_tol {
        if heap.len() >= settings.max_subdivisions {
            return Err(Error::Quadrature(format!(
                "subdivision limit {} reached with error estimate {:.3e} > {:.3e}",
                settings.max_subdivisions, total_err, settings.abs_tol
            )));
        }
        let worst = heap.pop().expect("heap is nonempty while error is positive");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval exhausted at machine resolution; keep its contribution
            heap.push(Piece { error: 0.0, ..worst });
            total_err -= worst.error;
            continue;
        }
        let (lv, le) = gauss_kronrod_15(&f, worst.a, mid);
        let (rv, re) = gauss_kronrod_15(&f, mid, worst.b);
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Piece { a: mid, b: worst.b, value: rv, error: re });
        if !total.is_finite() {
            return Err(Error::Quadrature("integrand produced a non-finite value".into()));
        }
    }

    // re-sum from the pieces to avoid drift from the running updates
    let intervals = heap.len();
    let mut pieces = heap.into_vec();
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = pieces.iter().map(|p| p.value).sum();
    let abs_error = pieces.iter().map(|p| p.error).sum();
    Ok(QuadratureResult { value, abs_error, intervals })
}
