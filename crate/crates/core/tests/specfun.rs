use deltasink_core::specfun::{erfc_complex, erfcx, faddeeva_w, sqrt_principal};
use deltasink_core::Complex64;
use proptest::prelude::*;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(a.norm()).max(f64::MIN_POSITIVE)
}

#[test]
fn w_on_imaginary_axis_is_erfcx() {
    for i in 0..=120 {
        let y = 10f64.powf(-6.0 + 0.075 * i as f64);
        let w = faddeeva_w(Complex64::new(0.0, y));
        assert!((w.re / erfcx(y) - 1.0).abs() < 1e-10, "y = {y}");
        assert!(w.im.abs() < 1e-10 * w.re);
    }
}

#[test]
fn erfcx_decreases_to_its_asymptote() {
    let mut prev = erfcx(0.0);
    assert_eq!(prev, 1.0);
    for i in 1..=2000 {
        let x = 0.05 * i as f64;
        let v = erfcx(x);
        assert!(v > 0.0 && v < prev, "x = {x}");
        prev = v;
    }
    let x = 50.0;
    assert!((x * std::f64::consts::PI.sqrt() * erfcx(x) - 1.0).abs() < 1e-3);
}

proptest! {
    #[test]
    fn reflection(r in 0.0f64..5.0, theta in -std::f64::consts::PI..std::f64::consts::PI) {
        let z = Complex64::from_polar(r, theta);
        let lhs = faddeeva_w(-z);
        let rhs = 2.0 * (-z * z).exp() - faddeeva_w(z);
        let scale = lhs.norm().max(2.0 * (-z * z).exp().norm());
        prop_assert!((lhs - rhs).norm() <= 1e-9 * scale);
    }

    #[test]
    fn conjugation(x in -20.0f64..20.0, y in -5.0f64..20.0) {
        let z = Complex64::new(x, y);
        prop_assert!(rel(faddeeva_w(-z.conj()), faddeeva_w(z).conj()) < 1e-12);
    }

    #[test]
    fn erfc_sums_to_two(x in -4.0f64..4.0, y in -4.0f64..4.0) {
        let z = Complex64::new(x, y);
        let (a, b) = (erfc_complex(z), erfc_complex(-z));
        let scale = a.norm().max(b.norm()).max(1.0);
        prop_assert!((a + b - 2.0).norm() <= 1e-10 * scale);
    }

    #[test]
    fn principal_root_squares_back(x in -1e6f64..1e6, y in -1e6f64..1e6) {
        let z = Complex64::new(x, y);
        let r = sqrt_principal(z);
        prop_assert!(r.re >= 0.0);
        prop_assert!((r * r - z).norm() <= 1e-14 * z.norm().max(f64::MIN_POSITIVE));
    }
}
