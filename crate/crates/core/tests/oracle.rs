mod common;

use common::{gaussian_convolution, heat_kernel};
use proptest::prelude::*;
use skewdiff::oracle::{exact_solution_u, skew_density_p, ExactSolution, SkewDensity};
use skewdiff::problem::{lambda_star, InterfaceProblem};

fn scenarios() -> Vec<InterfaceProblem> {
    [(10.0, 0.5), (10.0, lambda_star(10.0, 1.0)), (100.0, 0.5), (100.0, lambda_star(100.0, 1.0))]
        .iter()
        .map(|&(dp, lam)| InterfaceProblem::new(dp, 1.0, lam, 0.2).unwrap())
        .collect()
}

#[test]
fn homogeneous_case_matches_direct_convolution() {
    let p = InterfaceProblem::new(1.0, 1.0, 0.5, 0.2).unwrap();
    for x in [-2.0, -0.7, 0.0, 0.3, 1.0, 1.9] {
        let u = exact_solution_u(&p, 0.2, x).unwrap();
        let g = gaussian_convolution(1.0, 0.2, x);
        assert!((u - g).abs() < 1e-8, "x = {x}: {u} vs {g}");
    }
}

#[test]
fn short_time_limit() {
    let p = InterfaceProblem::new(10.0, 1.0, 0.5, 0.2).unwrap();
    let t = 1e-8;
    for x in [-0.5, 0.5] {
        let u = exact_solution_u(&p, t, x).unwrap();
        // u0 + (t/2) D u0'' away from the interface
        let w: f64 = 1.0 - x * x;
        let u0xx = -10.0 * w.powi(4) + 80.0 * x * x * w.powi(3);
        let first_order = common::bump(x) + 0.5 * t * p.diffusion(x) * u0xx;
        assert!((u - common::bump(x)).abs() < 1e-6, "x = {x}: {u}");
        assert!((u - first_order).abs() < 1e-10, "x = {x}: {u} vs {first_order}");
    }
}

#[test]
fn normalization_over_grid() {
    for p in scenarios() {
        let d = SkewDensity::new(p.skew_parameters());
        for t in [0.05, 0.2, 1.0] {
            for x in [-1.5, 0.0, 2.5] {
                let m = d.total_mass(t, x).unwrap();
                assert!((m - 1.0).abs() < 1e-8, "D+ = {}, t = {t}, x = {x}: {m}", p.d_plus);
            }
        }
    }
}

#[test]
fn density_times_root_t_bounded() {
    for p in scenarios() {
        let d = SkewDensity::new(p.skew_parameters());
        let mut worst: f64 = 0.0;
        for &t in &[1e-4, 1e-3, 0.01, 0.1, 1.0] {
            for i in -20..=20 {
                for j in -20..=20 {
                    let q = d.q(t, 0.1 * f64::from(i), 0.1 * f64::from(j)).unwrap();
                    assert!(q >= 0.0);
                    worst = worst.max(q * t.sqrt());
                }
            }
        }
        // 2 max(α, 1−α) / √(2π D⁻) covers every branch
        assert!(worst <= 2.0 / (2.0 * std::f64::consts::PI).sqrt() + 1e-12, "{worst}");
    }
}

#[test]
fn continuity_across_interface() {
    for p in scenarios() {
        let ex = ExactSolution::new(&p);
        let a = ex.value(0.2, 1e-10).unwrap();
        let b = ex.value(0.2, -1e-10).unwrap();
        assert!((a - b).abs() < 1e-8, "D+ = {}: {a} vs {b}", p.d_plus);
    }
}

#[test]
fn pde_residual_away_from_interface() {
    for p in scenarios() {
        let ex = ExactSolution::new(&p).with_tolerance(1e-13);
        let (t, dt, dx) = (0.2, 1e-3, 1e-3);
        for x in [-1.5, -0.8, 0.5, 1.2, 2.5] {
            let u = |t: f64, x: f64| ex.value(t, x).unwrap();
            let ut = (u(t + dt, x) - u(t - dt, x)) / (2.0 * dt);
            let uxx = (u(t, x + dx) - 2.0 * u(t, x) + u(t, x - dx)) / (dx * dx);
            let rhs = 0.5 * p.diffusion(x) * uxx;
            let scale = ut.abs().max(rhs.abs()).max(1e-3);
            assert!((ut - rhs).abs() <= 1e-3 * scale, "D+ = {}, x = {x}: {ut} vs {rhs}", p.d_plus);
        }
    }
}

proptest! {
    #[test]
    fn symmetric_case_is_heat_kernel(t in 0.01f64..2.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let p = skew_density_p(t, x, y, 0.5).unwrap();
        prop_assert!((p - heat_kernel(t, x, y)).abs() <= 1e-12);
    }

    #[test]
    fn mirrored_even_data_is_even(x in 0.0f64..3.0) {
        let p = InterfaceProblem::new(2.0, 2.0, 0.5, 0.2).unwrap();
        let a = exact_solution_u(&p, 0.2, x).unwrap();
        let b = exact_solution_u(&p, 0.2, -x).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }
}
