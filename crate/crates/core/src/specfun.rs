//! Scaled complementary error function, the Faddeeva function and a square
//! root with a fixed branch cut.
//!
//! Every closed form in [`crate::closedform`] is written in terms of these, in
//! their overflow-free scaled versions. Functions return `±inf` on overflow;
//! the `try_` variants turn that into [`Error::Overflow`].

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const TWO_OVER_SQRT_PI: f64 = core::f64::consts::FRAC_2_SQRT_PI;
const INV_SQRT_PI: f64 = 0.5 * core::f64::consts::FRAC_2_SQRT_PI;

/// Below this `erfcx` uses the exponentially weighted erf series, above it the
/// Laplace continued fraction.
const ERFCX_SERIES_LIMIT: f64 = 2.0;

/// `e^{x²} erfc(x)` for real `x`.
///
/// Returns `+inf` when `x` is so negative that `e^{x²}` overflows.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        // erfc(-x) = 2 - erfc(x)
        let e = (x * x).exp();
        if e.is_infinite() {
            return f64::INFINITY;
        }
        return 2.0 * e - erfcx_nonnegative(-x);
    }
    erfcx_nonnegative(x)
}

pub fn try_erfcx(x: f64) -> Result<f64> {
    let v = erfcx(x);
    if v.is_infinite() {
        Err(Error::Overflow("erfcx"))
    } else {
        Ok(v)
    }
}

fn erfcx_nonnegative(x: f64) -> f64 {
    if x < ERFCX_SERIES_LIMIT {
        // erf(x) = (2/√π) e^{-x²} Σ 2ⁿ x^{2n+1} / (2n+1)!!, all terms positive.
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= 2.0 * x2 / (2.0 * n + 1.0);
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
        }
        x2.exp() - TWO_OVER_SQRT_PI * sum
    } else if x > 1e8 {
        // continued fraction has converged to its first term long before here
        INV_SQRT_PI / x * (1.0 - 0.5 / (x * x))
    } else {
        // √π e^{x²} erfc(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        // evaluated by the modified Lentz algorithm.
        let tiny = 1e-300;
        let mut f = x;
        let mut c = f;
        let mut d = 0.0;
        for n in 1..5000 {
            let a = 0.5 * n as f64;
            d = x + a * d;
            if d.abs() < tiny {
                d = tiny;
            }
            c = x + a / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        INV_SQRT_PI / f
    }
}

/// Faddeeva function `w(z) = e^{-z²} erfc(-iz)`.
///
/// Upper half plane by a Taylor series near the origin and a continued
/// fraction (with Gautschi's truncated Taylor correction in the intermediate
/// region) elsewhere; the lower half plane through `w(-z) = 2e^{-z²} - w(z)`.
/// Accurate to about 14 significant digits.
pub fn faddeeva_w(z: Complex64) -> Complex64 {
    let (xi, yi) = (z.re, z.im);
    let xabs = xi.abs();
    let yabs = yi.abs();
    let x = xabs / 6.3;
    let y = yabs / 4.4;

    let mut qrho = x * x + y * y;
    let xabsq = xabs * xabs;
    let mut xquad = xabsq - yabs * yabs;
    let yquad = 2.0 * xabs * yabs;

    let near_origin = qrho < 0.085264;
    let (mut u, mut v);
    let (mut u2, mut v2) = (0.0, 0.0);

    if near_origin {
        // Taylor series of erfc(-iz) around the origin, then multiply by e^{-z²}.
        qrho = (1.0 - 0.85 * y) * qrho.sqrt();
        let n = (6.0 + 72.0 * qrho).round() as i32;
        let mut j = 2 * n + 1;
        let mut xsum = 1.0 / j as f64;
        let mut ysum = 0.0;
        for i in (1..=n).rev() {
            j -= 2;
            let fi = i as f64;
            let xaux = (xsum * xquad - ysum * yquad) / fi;
            ysum = (xsum * yquad + ysum * xquad) / fi;
            xsum = xaux + 1.0 / j as f64;
        }
        let u1 = -TWO_OVER_SQRT_PI * (xsum * yabs + ysum * xabs) + 1.0;
        let v1 = TWO_OVER_SQRT_PI * (xsum * xabs - ysum * yabs);
        let daux = (-xquad).exp();
        u2 = daux * yquad.cos();
        v2 = -daux * yquad.sin();
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        let (h, kapn, nu);
        if qrho > 1.0 {
            h = 0.0;
            kapn = 0;
            qrho = qrho.sqrt();
            nu = (3.0 + 1442.0 / (26.0 * qrho + 77.0)) as i32;
        } else {
            qrho = (1.0 - y) * (1.0 - qrho).sqrt();
            h = 1.88 * qrho;
            kapn = (7.0 + 34.0 * qrho).round() as i32;
            nu = (16.0 + 26.0 * qrho).round() as i32;
        }
        let h2 = 2.0 * h;
        let use_taylor = h > 0.0;
        let mut qlambda = if use_taylor { h2.powi(kapn) } else { 0.0 };

        let (mut rx, mut ry, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0);
        for n in (0..=nu).rev() {
            let np1 = (n + 1) as f64;
            let tx = yabs + h + np1 * rx;
            let ty = xabs - np1 * ry;
            let c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if use_taylor && n <= kapn {
                let tx = qlambda + sx;
                let sx_new = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                sx = sx_new;
                qlambda /= h2;
            }
        }
        if h == 0.0 {
            u = TWO_OVER_SQRT_PI * rx;
            v = TWO_OVER_SQRT_PI * ry;
        } else {
            u = TWO_OVER_SQRT_PI * sx;
            v = TWO_OVER_SQRT_PI * sy;
        }
        if yabs == 0.0 {
            u = (-xabsq).exp();
        }
    }

    if yi < 0.0 {
        if near_origin {
            u2 *= 2.0;
            v2 *= 2.0;
        } else {
            xquad = -xquad;
            let w1 = 2.0 * xquad.exp();
            u2 = w1 * yquad.cos();
            v2 = -w1 * yquad.sin();
        }
        u = u2 - u;
        v = v2 - v;
        if xi > 0.0 {
            v = -v;
        }
    } else if xi < 0.0 {
        v = -v;
    }
    Complex64::new(u, v)
}

pub fn try_faddeeva_w(z: Complex64) -> Result<Complex64> {
    check_finite(faddeeva_w(z), "faddeeva_w")
}

/// `erfc(z) = e^{-z²} w(iz)` for complex `z`, choosing the half plane so that
/// `w` is always evaluated with a nonnegative imaginary part.
pub fn erfc_complex(z: Complex64) -> Complex64 {
    let iz = Complex64::new(-z.im, z.re);
    let e = (-z * z).exp();
    if z.re >= 0.0 {
        e * faddeeva_w(iz)
    } else {
        Complex64::new(2.0, 0.0) - e * faddeeva_w(-iz)
    }
}

pub fn try_erfc_complex(z: Complex64) -> Result<Complex64> {
    check_finite(erfc_complex(z), "erfc_complex")
}

/// `e^{z²} erfc(z) = w(iz)`.
pub fn erfcx_complex(z: Complex64) -> Complex64 {
    faddeeva_w(Complex64::new(-z.im, z.re))
}

/// Principal square root: nonnegative real part, cut along the negative real
/// axis with `arg` taken in `(-π, π]` (so `√-1 = i` regardless of the sign of
/// a zero imaginary part).
pub fn sqrt_principal(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    if y == 0.0 {
        return if x >= 0.0 {
            Complex64::new(x.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-x).sqrt())
        };
    }
    let t = (0.5 * (x.hypot(y) + x.abs())).sqrt();
    if x >= 0.0 {
        Complex64::new(t, 0.5 * y / t)
    } else {
        Complex64::new(0.5 * y.abs() / t, t.copysign(y))
    }
}

/// `√(π z)` on the principal branch.
pub(crate) fn sqrt_pi_times(z: Complex64) -> Complex64 {
    sqrt_principal(z * PI)
}

fn check_finite(v: Complex64, what: &'static str) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(what))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn erfcx_at_zero_is_one() {
        assert!((erfcx(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn erfcx_reference_points() {
        assert!((erfcx(1.0) / 0.427_583_576_155_807 - 1.0).abs() < 1e-13);
        assert!((erfcx(10.0) / 0.056_140_992_743_822_6 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn erfcx_branches_join_smoothly() {
        let below = erfcx(ERFCX_SERIES_LIMIT - 1e-12);
        let above = erfcx(ERFCX_SERIES_LIMIT + 1e-12);
        assert!((below / above - 1.0).abs() < 1e-12);
    }

    #[test]
    fn erfcx_overflows_for_very_negative_arguments() {
        assert_eq!(erfcx(-30.0), f64::INFINITY);
        assert_eq!(try_erfcx(-30.0), Err(Error::Overflow("erfcx")));
        assert!(try_erfcx(-5.0).unwrap() > 1e10);
    }

    #[test]
    fn erfcx_large_argument_asymptote() {
        let x = 50.0;
        assert!((x * PI.sqrt() * erfcx(x) - 1.0).abs() < 1e-3);
        // exact continuation of the asymptotic series
        let x2 = x * x;
        let series = INV_SQRT_PI / x * (1.0 - 0.5 / x2 + 0.75 / (x2 * x2) - 1.875 / (x2 * x2 * x2));
        assert!((erfcx(x) / series - 1.0).abs() < 1e-12);
        assert!(erfcx(1e10) > 0.0);
    }

    #[test]
    fn faddeeva_at_origin() {
        assert!(rel(faddeeva_w(c(0.0, 0.0)), c(1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn faddeeva_on_imaginary_axis() {
        let w = faddeeva_w(c(0.0, 1.0));
        assert!((w.re - 0.427_583_576_2).abs() < 1e-10);
        assert!(w.im.abs() < 1e-15);
    }

    #[test]
    fn faddeeva_on_real_axis() {
        let w = faddeeva_w(c(1.0, 0.0));
        assert!((w.re - 0.367_879_441_2).abs() < 1e-10);
        assert!((w.im - 0.607_157_705_8).abs() < 1e-10);
    }

    #[test]
    fn faddeeva_flags_overflow_deep_in_lower_half_plane() {
        assert!(try_faddeeva_w(c(0.0, -40.0)).is_err());
        assert!(try_faddeeva_w(c(0.0, -3.0)).is_ok());
    }

    #[test]
    fn erfc_complex_reference_points() {
        assert!(rel(erfc_complex(c(0.0, 0.0)), c(1.0, 0.0)) < 1e-15);
        assert!((erfc_complex(c(1.0, 0.0)).re - 0.157_299_207_1).abs() < 1e-10);
        assert!(erfc_complex(c(1.0, 0.0)).im.abs() < 1e-16);
    }

    #[test]
    fn sqrt_examples() {
        let s = sqrt_principal(c(0.0, 1.0));
        let r = core::f64::consts::FRAC_1_SQRT_2;
        assert!(rel(s, c(r, r)) < 1e-15);
        assert_eq!(sqrt_principal(c(4.0, 0.0)), c(2.0, 0.0));
        assert_eq!(sqrt_principal(c(-1.0, 0.0)), c(0.0, 1.0));
        assert_eq!(sqrt_principal(c(-1.0, -0.0)), c(0.0, 1.0));
        let s = sqrt_principal(c(-1.0, -1e-300));
        assert!(s.im < 0.0 && s.re >= 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn sqrt_squares_back(re in -1e6f64..1e6, im in -1e6f64..1e6) {
                let z = c(re, im);
                let s = sqrt_principal(z);
                prop_assert!(s.re >= 0.0);
                if z.norm() > 0.0 {
                    prop_assert!(rel(s * s, z) < 1e-14);
                }
            }

            #[test]
            fn erfc_schwarz_reflection(re in -5.0f64..5.0, im in -5.0f64..5.0) {
                let z = c(re, im);
                let a = erfc_complex(z.conj());
                let b = erfc_complex(z).conj();
                prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
            }

            #[test]
            fn erfc_sums_to_two(re in -4.0f64..4.0, im in -4.0f64..4.0) {
                let z = c(re, im);
                let a = erfc_complex(z);
                let b = erfc_complex(-z);
                let scale = a.norm().max(b.norm()).max(1.0);
                prop_assert!((a + b - c(2.0, 0.0)).norm() <= 1e-10 * scale);
            }

            #[test]
            fn erfcx_decreasing(x in 0.0f64..40.0, dx in 1e-3f64..1.0) {
                prop_assert!(erfcx(x) > 0.0);
                prop_assert!(erfcx(x + dx) < erfcx(x));
            }
        }
    }
}
