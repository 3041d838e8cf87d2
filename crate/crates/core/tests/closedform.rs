use std::f64::consts::PI;

use deltasink_core::closedform::{
    boundary_amplitude_quantum, boundary_density_diffusion, density_at, diffusion_asymptotics,
    laplace_boundary_density, scattering_from_strength, stationary_scattering,
};
use deltasink_core::quad::GaussLegendre;
use deltasink_core::specfun::erfc_complex;
use deltasink_core::{map_quantum_to_diffusion, Complex64, DiffusionParams, QuantumParams};
use proptest::prelude::*;

/// The closed form with the growing exponential written out, and the
/// rounding error it carries itself.
fn unstabilized(tau: f64, d: f64, k: f64, x0: f64) -> (f64, f64) {
    let beta = k / (2.0 * d);
    let arg = beta * tau.sqrt() + x0 / (2.0 * tau.sqrt());
    let erfc = erfc_complex(Complex64::new(arg, 0.0)).re;
    let free = (-(x0 * x0) / (4.0 * tau)).exp() / (PI * tau).sqrt();
    let exponent = beta * x0 + beta * beta * tau;
    let growth = exponent.exp();
    let sink = if erfc == 0.0 { 0.0 } else { beta * growth * erfc };
    if !growth.is_finite() {
        return (f64::NAN, f64::NAN);
    }
    (
        0.5 * (free - sink),
        2.0 * f64::EPSILON * (free + sink * (2.0 + exponent)),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn stabilized_form_matches(tau in 1e-3f64..20.0, d in 0.2f64..5.0, k in 0.0f64..3.0, x0 in 0.0f64..3.0) {
        let p = DiffusionParams::new(d, k, x0).unwrap();
        let (want, noise) = unstabilized(tau, d, k, x0);
        prop_assume!(want.is_finite() && noise.is_finite());
        let got = boundary_density_diffusion(tau, &p).unwrap();
        prop_assert!((got - want).abs() <= 1e-12 * want.abs() + noise, "{} vs {}", got, want);
    }

    #[test]
    fn density_is_positive(tau in 1e-2f64..1e6, k in 0.01f64..10.0, x0 in -5.0f64..5.0) {
        let p = DiffusionParams::new(1.0, k, x0).unwrap();
        prop_assert!(boundary_density_diffusion(tau, &p).unwrap() > 0.0);
    }

    #[test]
    fn absorber_symmetry(t in 0.01f64..100.0, x0 in 0.0f64..5.0) {
        let q = QuantumParams::new(1.0, 1.0, 1.0, x0, 0.0).unwrap();
        let r = QuantumParams::new(1.0, 1.0, 1.0, -x0, 0.0).unwrap();
        prop_assert_eq!(boundary_amplitude_quantum(t, &q).unwrap(), boundary_amplitude_quantum(t, &r).unwrap());
    }

    #[test]
    fn flux_balance(u in 1e-4f64..1e4) {
        let s = scattering_from_strength(u);
        prop_assert!((s.reflection.norm_sqr() + s.transmission.norm_sqr() + s.absorbed_fraction - 1.0).abs() < 1e-14);
        prop_assert!(s.absorbed_fraction <= 0.5);
    }
}

#[test]
fn unit_density_reference() {
    let p = DiffusionParams::new(1.0, 1.0, 1.0).unwrap();
    // mpmath, 30 digits: 0.136445038749207656...
    assert!((boundary_density_diffusion(1.0, &p).unwrap() - 0.13644503874920766).abs() < 1e-15);
}

#[test]
fn tau_three_halves_decay_approaches_the_coefficient() {
    let p = DiffusionParams::new(1.0, 1.0, 1.0).unwrap();
    let coef = diffusion_asymptotics(&p).unwrap();
    let mut prev = f64::NEG_INFINITY;
    for i in 0..40 {
        let tau = 10f64.powf(1.0 + 0.15 * i as f64);
        let scaled = tau.powf(1.5) * boundary_density_diffusion(tau, &p).unwrap();
        assert!(scaled > prev, "tau = {tau}");
        prev = scaled;
    }
    assert!((prev / coef.leading_amplitude.re - 1.0).abs() < 1e-3);
}

#[test]
fn laplace_transform_of_the_density() {
    // Integrate to 1e3 on a graded mesh, then add the τ^{-3/2} tail.
    let p = DiffusionParams::new(1.0, 1.0, 1.0).unwrap();
    let gl = GaussLegendre::new(32);
    let coef = diffusion_asymptotics(&p).unwrap().leading_amplitude.re;
    for s in [0.5, 1.0, 2.0] {
        let mut acc = 0.0;
        let mut lo = 0.0;
        for hi in [1e-2, 0.1, 1.0, 10.0, 100.0, 1e3] {
            acc += gl
                .composite(lo, hi, 64, |t| {
                    Complex64::new((-s * t).exp() * boundary_density_diffusion(t, &p).unwrap(), 0.0)
                })
                .re;
            lo = hi;
        }
        let tail = gl
            .composite(1e3, 1e3 + 60.0 / s, 64, |t| {
                Complex64::new((-s * t).exp() * coef * t.powf(-1.5), 0.0)
            })
            .re;
        let want = laplace_boundary_density(Complex64::new(s, 0.0), &p).unwrap().re;
        assert!(((acc + tail) / want - 1.0).abs() < 1e-4, "s = {s}");
        assert!(((acc + tail) / want - 1.0).abs() < 1e-10, "s = {s}");
    }
}

#[test]
fn quantum_amplitude_is_the_complex_transplant() {
    let q = QuantumParams::new(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
    let e = map_quantum_to_diffusion(&q);
    for t in [0.1, 1.0, 10.0] {
        let via = density_at(e.diffusion * t, e.diffusion, e.killing, 1.0).unwrap();
        assert_eq!(boundary_amplitude_quantum(t, &q).unwrap(), via);
    }
}

#[test]
fn absorption_peaks_at_half() {
    let q = QuantumParams::new(1.0, 1.0, 2.0, 0.0, 0.0).unwrap();
    // u = k m / (2 ħ² q) = 1 at q = 1.
    let s = stationary_scattering(1.0, &q).unwrap();
    assert_eq!(s.absorbed_fraction, 0.5);
}
