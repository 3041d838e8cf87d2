use deltasink_core::closedform::{boundary_density_diffusion, survival_diffusion_exact};
use deltasink_core::oracle::{evolve_schrodinger, RunOptions, SpatialGrid};
use deltasink_core::survival::{diffusion_tail_mass, survival_diffusion, survival_quantum};
use deltasink_core::volterra::{solve_diffusion_boundary, solve_quantum_boundary};
use deltasink_core::{AmplitudeSeries, Complex64, DiffusionParams, QuantumParams, SeriesKind, TimeGrid};
use proptest::prelude::*;

fn sampled(d: &DiffusionParams, grid: TimeGrid) -> AmplitudeSeries {
    AmplitudeSeries::sample(grid, SeriesKind::DiffusionDensity, |t| {
        Ok(Complex64::new(boundary_density_diffusion(t, d)?, 0.0))
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn diffusive_scaling(alpha in 0.1f64..10.0, k in 0.1f64..3.0, x0 in 0.0f64..2.0, tau in 0.05f64..50.0) {
        // τ → ατ, κ → κ/√α, x0 → √α x0 with D fixed leaves S unchanged.
        let d = DiffusionParams::new(1.0, k, x0).unwrap();
        let scaled = DiffusionParams::new(1.0, k / alpha.sqrt(), x0 * alpha.sqrt()).unwrap();
        let a = survival_diffusion_exact(tau, &d).unwrap();
        let b = survival_diffusion_exact(alpha * tau, &scaled).unwrap();
        prop_assert!((a / b - 1.0).abs() < 1e-8);
    }

    #[test]
    fn monotone_curves(k in 0.05f64..5.0, x0 in 0.0f64..3.0) {
        let d = DiffusionParams::new(1.0, k, x0).unwrap();
        let curve = survival_diffusion(&sampled(&d, TimeGrid::spanning(0.01, 20.0, 2000).unwrap()), &d).unwrap();
        for w in curve.values().windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }
}

#[test]
fn integrated_survival_matches_the_closed_form() {
    let d = DiffusionParams::new(1.0, 1.0, 1.0).unwrap();
    let series = solve_diffusion_boundary(&d, TimeGrid::spanning(0.0, 10.0, 4000).unwrap()).unwrap();
    let curve = survival_diffusion(&series, &d).unwrap();
    for (t, s) in curve.iter().skip(1).step_by(97) {
        assert!((s - survival_diffusion_exact(t, &d).unwrap()).abs() < 1e-6, "t = {t}");
    }
}

#[test]
fn absorbed_plus_remaining_is_one() {
    let d = DiffusionParams::new(1.0, 1.0, 1.0).unwrap();
    let grid = TimeGrid::spanning(1e-3, 1e3, 100_000).unwrap();
    let curve = survival_diffusion(&sampled(&d, grid), &d).unwrap();
    let absorbed = 1.0 - curve.last();
    assert!((absorbed + diffusion_tail_mass(1e3, &d).unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn free_packet_keeps_its_norm() {
    let q = QuantumParams::new(1.0, 1.0, 0.0, 1.0, 0.5).unwrap();
    let grid = TimeGrid::spanning(0.0, 2.0, 2000).unwrap();
    let series = solve_quantum_boundary(&q, grid).unwrap();
    let curve = survival_quantum(&series, &q, true).unwrap();
    assert!(curve.values().iter().all(|&s| s == 1.0));
    let raw = survival_quantum(&series, &q, false).unwrap();
    let s0 = 1.0 / (2.0 * 0.5 * std::f64::consts::PI.sqrt());
    assert!(raw.values().iter().all(|&s| (s - s0).abs() < 1e-15));

    let sg = SpatialGrid::new(40.0, 4001).unwrap();
    let evo = evolve_schrodinger(&q, sg, grid, &RunOptions::default()).unwrap();
    assert!(evo.survival.values().iter().all(|&s| (s - 1.0).abs() < 1e-10));
}

#[test]
fn point_sources_are_rejected_in_both_modes() {
    let q = QuantumParams::new(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
    let series = solve_quantum_boundary(&q, TimeGrid::spanning(0.1, 1.0, 90).unwrap()).unwrap();
    assert!(survival_quantum(&series, &q, true).is_err());
    assert!(survival_quantum(&series, &q, false).is_err());
}
