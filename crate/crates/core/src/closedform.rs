//! Closed forms for the boundary density and amplitude.
//!
//! The diffusion density at the absorber is
//!
//! ```text
//! p(0, τ) = ½ e^{-x0²/4τ} [1/√(πτ) - β erfcx(β√τ + |x0|/2√τ)],   β = κ/2D,
//! ```
//!
//! which is the inverse Laplace transform of `e^{-|x0|√s} / (2√s + κ/D)` written
//! without growing exponentials. The quantum amplitude is the same expression
//! continued to `τ = D t` with `D = iħ/2m`, `κ = k/2ħ`, where `erfcx` becomes
//! `w(i·)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{DiffusionParams, QuantumParams};
use crate::propagators::{forcing_gaussian, gaussian_free_term};
use crate::quad::GaussLegendre;
use crate::specfun::{erfcx, faddeeva_w, sqrt_pi_times, sqrt_principal};

/// Leading power law `c · t^p` of a boundary function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticCoefficients {
    pub leading_amplitude: Complex64,
    pub leading_power: f64,
}

impl AsymptoticCoefficients {
    pub fn eval(&self, t: f64) -> Complex64 {
        self.leading_amplitude * t.powf(self.leading_power)
    }
}

/// Boundary density for complex `τ`, `D`, `κ`.
///
/// `τ` must lie in the closed right half plane without the origin. Both the
/// diffusion density (all real) and the quantum amplitude (`τ = D t`) are
/// special cases.
pub fn density_at(tau: Complex64, diffusion: Complex64, killing: Complex64, x0: f64) -> Result<Complex64> {
    if !(tau.re >= 0.0) || tau.norm() == 0.0 || !tau.im.is_finite() || !tau.re.is_finite() {
        return Err(Error::Domain {
            what: "time argument",
            value: tau.re,
        });
    }
    let x0 = x0.abs();
    let root = sqrt_principal(tau);
    let gauss = (-(x0 * x0) / (4.0 * tau)).exp();
    let free = 1.0 / sqrt_pi_times(tau);
    if killing == Complex64::new(0.0, 0.0) {
        return Ok(0.5 * gauss * free);
    }
    let beta = killing / (2.0 * diffusion);
    let z = beta * root + x0 / (2.0 * root);
    let scaled = if z.im == 0.0 && tau.im == 0.0 && beta.im == 0.0 {
        Complex64::new(erfcx(z.re), 0.0)
    } else {
        faddeeva_w(Complex64::i() * z)
    };
    let v = 0.5 * gauss * (free - beta * scaled);
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Overflow("boundary density"));
    }
    Ok(v)
}

/// `p(0, τ)` for a unit point source at `x0`, in the time variable `τ = D t`.
pub fn boundary_density_diffusion(tau: f64, d: &DiffusionParams) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain {
            what: "diffusion time",
            value: tau,
        });
    }
    let v = density_at(
        Complex64::new(tau, 0.0),
        Complex64::new(d.diffusion(), 0.0),
        Complex64::new(d.killing(), 0.0),
        d.source(),
    )?;
    Ok(v.re)
}

/// Survival probability `1 - (κ/D) ∫_0^τ p(0, u) du` in closed form:
/// `erf(|x0|/2√τ) + e^{-x0²/4τ} erfcx(κ√τ/2D + |x0|/2√τ)`.
pub fn survival_diffusion_exact(tau: f64, d: &DiffusionParams) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain {
            what: "diffusion time",
            value: tau,
        });
    }
    let x0 = d.source().abs();
    let root = tau.sqrt();
    let y = x0 / (2.0 * root);
    let gauss = (-y * y).exp();
    let erf = 1.0 - gauss * erfcx(y);
    let z = d.killing() / (2.0 * d.diffusion()) * root + y;
    Ok(erf + gauss * erfcx(z))
}

/// `e^{-|x0|√s} / (2√s + κ/D)`, the Laplace transform of `p(0, τ)` in `τ`.
pub fn laplace_boundary_density(s: Complex64, d: &DiffusionParams) -> Result<Complex64> {
    if !(s.re > 0.0 && s.im.is_finite() && s.re.is_finite()) {
        return Err(Error::Domain {
            what: "Laplace variable",
            value: s.re,
        });
    }
    let r = sqrt_principal(s);
    Ok((-d.source().abs() * r).exp() / (2.0 * r + d.killing() / d.diffusion()))
}

/// Point-source amplitude `φ(t) = ψ(0, t)` at real `t > 0`. The packet width of
/// `q` is ignored.
pub fn boundary_amplitude_quantum(t: f64, q: &QuantumParams) -> Result<Complex64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            what: "propagation time",
            value: t,
        });
    }
    boundary_amplitude_quantum_complex(Complex64::new(t, 0.0), q)
}

/// Point-source amplitude continued to complex `t` with `Im t <= 0`.
pub fn boundary_amplitude_quantum_complex(t: Complex64, q: &QuantumParams) -> Result<Complex64> {
    let e = q.effective();
    density_at(e.diffusion * t, e.diffusion, e.killing, q.source())
}

/// Amplitude at the origin for the Gaussian profile
/// `exp(-(y - x0)² / 2a²) / (√(2π) a)` (unit mass, not unit norm).
///
/// The free part is evaluated in closed form. The absorber's contribution is
/// the superposition of point-source corrections over the profile, split at
/// `y = 0` and integrated along the steepest-descent ray of the combined
/// Gaussian with composite Gauss–Legendre, starting from `quadrature_nodes`
/// nodes per half line and doubling until the result changes by less than
/// `1e-8` relative.
pub fn boundary_amplitude_quantum_gaussian(t: f64, q: &QuantumParams, quadrature_nodes: usize) -> Result<Complex64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            what: "propagation time",
            value: t,
        });
    }
    if q.width() <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "a",
            reason: "Gaussian amplitude needs a positive packet width",
        });
    }
    if quadrature_nodes < 16 {
        return Err(Error::InvalidParameter {
            name: "quadrature_nodes",
            reason: "need at least 16 nodes",
        });
    }
    let free = gaussian_free_term(t, q);
    if q.coupling() == 0.0 {
        return Ok(free);
    }
    let (m, hbar, a) = (q.mass(), q.hbar(), q.width());
    let x0 = q.source();
    let e = q.effective();
    let tau = e.diffusion * t;
    let root = sqrt_principal(tau);
    let beta = e.killing / (2.0 * e.diffusion);
    let shift = beta * root;

    // Exponent of the integrand is -A r² + x0 r / a² - x0² / 2a² for y = +r.
    let big_a = Complex64::new(hbar * t, -m * a * a) / (2.0 * a * a * hbar * t);
    let theta = -0.5 * big_a.arg();
    let dir = Complex64::from_polar(1.0, theta);
    let width = 1.0 / big_a.norm().sqrt();
    let peak = (x0.abs() * theta.cos() / (2.0 * a * a * big_a.norm())).max(0.0);
    let reach = peak + 9.0 * width;

    let norm = 1.0 / ((2.0 * PI).sqrt() * a);
    let integrand = |rho: f64| {
        let r = dir * rho;
        let left = ((r - x0) * (r - x0) / (-2.0 * a * a) - r * r / (4.0 * tau)).exp();
        let right = ((r + x0) * (r + x0) / (-2.0 * a * a) - r * r / (4.0 * tau)).exp();
        let w = faddeeva_w(Complex64::i() * (shift + r / (2.0 * root)));
        -0.5 * beta * norm * (left + right) * w * dir
    };

    let rule = GaussLegendre::new(16);
    let mut panels = (quadrature_nodes / 16).max(1);
    let mut prev = free + rule.composite(0.0, reach, panels, integrand);
    let mut change = f64::INFINITY;
    while panels < 1 << 14 {
        panels *= 2;
        let next = free + rule.composite(0.0, reach, panels, integrand);
        change = (next - prev).norm() / next.norm().max(f64::MIN_POSITIVE);
        if change <= 1e-8 {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergence {
        what: "Gaussian superposition quadrature",
        change,
    })
}

/// Gaussian amplitude rescaled to a unit-norm initial wave function.
pub fn normalized_gaussian_amplitude(t: f64, q: &QuantumParams, quadrature_nodes: usize) -> Result<Complex64> {
    Ok(boundary_amplitude_quantum_gaussian(t, q, quadrature_nodes)? * gaussian_norm_factor(q)?)
}

/// Factor that turns the unit-mass Gaussian into a unit-norm wave function.
pub fn gaussian_norm_factor(q: &QuantumParams) -> Result<f64> {
    if q.width() <= 0.0 {
        return Err(Error::Normalization("a point source has no finite norm"));
    }
    Ok((2.0 * q.width() * PI.sqrt()).sqrt())
}

/// Power law `p(0, τ) ~ D (κ x0 + 2D) / (2 κ² √π) τ^{-3/2}`.
pub fn diffusion_asymptotics(d: &DiffusionParams) -> Result<AsymptoticCoefficients> {
    let (dd, k) = (d.diffusion(), d.killing());
    if k == 0.0 {
        return Err(Error::Domain {
            what: "killing strength for the τ^(-3/2) law",
            value: 0.0,
        });
    }
    let c = dd * (k * d.source().abs() + 2.0 * dd) / (2.0 * k * k * PI.sqrt());
    Ok(AsymptoticCoefficients {
        leading_amplitude: Complex64::new(c, 0.0),
        leading_power: -1.5,
    })
}

/// Leading large-τ term of [`boundary_density_diffusion`].
pub fn asymptotic_boundary_density(tau: f64, d: &DiffusionParams) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Domain {
            what: "diffusion time",
            value: tau,
        });
    }
    Ok(diffusion_asymptotics(d)?.eval(tau).re)
}

/// Two-term large-`t` expansion of the Gaussian amplitude:
///
/// ```text
/// (1 - i) √m / (2 √(ħt - ima²) √π) exp(i x0² m / 2(ħt - ima²))
///   - (1/16) (e^{iπ/4}/ħ) √2 k √m / (√(ħt - ima²) √π)
///     · exp((im/8) (4x0²ħ³ + i k² t m a² - k² t² ħ) / ((ħt - ima²) ħ³))
/// ```
///
/// Only defined for `ħt > 10 m a²`.
pub fn asymptotic_phi_gaussian(t: f64, q: &QuantumParams) -> Result<Complex64> {
    let (terms, _) = asymptotic_phi_gaussian_terms(t, q)?;
    Ok(terms)
}

/// The two terms of [`asymptotic_phi_gaussian`] returned as `(sum, second)`.
pub fn asymptotic_phi_gaussian_terms(t: f64, q: &QuantumParams) -> Result<(Complex64, Complex64)> {
    let (m, hbar, a, k, x0) = (q.mass(), q.hbar(), q.width(), q.coupling(), q.source());
    if a <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "a",
            reason: "the expansion is for a Gaussian packet",
        });
    }
    if !(hbar * t > 10.0 * m * a * a) {
        return Err(Error::OutOfRegime("needs ħt > 10 m a²"));
    }
    let first = forcing_gaussian(t, q)?;
    let den = Complex64::new(hbar * t, -m * a * a);
    let h3 = hbar * hbar * hbar;
    let num = Complex64::new(4.0 * x0 * x0 * h3 - k * k * t * t * hbar, k * k * t * m * a * a);
    let expo = Complex64::new(0.0, m / 8.0) * num / (den * h3);
    let quarter = Complex64::from_polar(1.0, PI / 4.0);
    let pref = quarter / hbar * 2f64.sqrt() / sqrt_principal(den) * k * m.sqrt() / PI.sqrt() / 16.0;
    let second = -pref * expo.exp();
    Ok((first + second, second))
}

/// Plane wave `e^{i q_w x}` on the potential `-(ik/2) δ(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scattering {
    pub reflection: Complex64,
    pub transmission: Complex64,
    pub absorbed_fraction: f64,
}

/// Reflection and transmission amplitudes from continuity of `ψ` and the jump
/// `[ψ'] = -(ikm/ħ²) ψ(0)`; with `u = mk / 2ħ²q_w`, `t = 1/(1+u)`, `r = -u/(1+u)`.
pub fn stationary_scattering(wavenumber: f64, q: &QuantumParams) -> Result<Scattering> {
    if !(wavenumber > 0.0 && wavenumber.is_finite()) {
        return Err(Error::Domain {
            what: "wavenumber",
            value: wavenumber,
        });
    }
    let u = q.mass() * q.coupling() / (2.0 * q.hbar() * q.hbar() * wavenumber);
    Ok(scattering_from_strength(u))
}

/// Same as [`stationary_scattering`] in terms of the dimensionless strength `u`.
pub fn scattering_from_strength(u: f64) -> Scattering {
    let t = 1.0 / (1.0 + u);
    Scattering {
        reflection: Complex64::new(-u * t, 0.0),
        transmission: Complex64::new(t, 0.0),
        absorbed_fraction: 2.0 * u * t * t,
    }
}

/// `n` log-spaced strengths on `[lo, hi]`.
pub fn log_sweep(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1).max(1) as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagators::schrodinger_propagator;

    fn unit_d() -> DiffusionParams {
        DiffusionParams::new(1.0, 1.0, 1.0).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn free_density_is_the_heat_kernel() {
        let d = DiffusionParams::new(1.0, 0.0, 1.3).unwrap();
        for &tau in &[0.1f64, 1.0, 7.0] {
            let want = (-1.69 / (4.0 * tau)).exp() / (2.0 * (PI * tau).sqrt());
            assert!((boundary_density_diffusion(tau, &d).unwrap() / want - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn unit_density_value() {
        let v = boundary_density_diffusion(1.0, &unit_d()).unwrap();
        assert!((v - 0.136_445_038_749_207_66).abs() < 1e-15);
    }

    #[test]
    fn density_rejects_nonpositive_time() {
        assert!(boundary_density_diffusion(0.0, &unit_d()).is_err());
        assert!(boundary_density_diffusion(-1.0, &unit_d()).is_err());
    }

    #[test]
    fn far_tail_follows_the_power_law() {
        let d = unit_d();
        let tau = 1e6;
        let ratio = boundary_density_diffusion(tau, &d).unwrap() / asymptotic_boundary_density(tau, &d).unwrap();
        assert!((ratio - 1.0).abs() < 0.01);
        let c = diffusion_asymptotics(&d).unwrap().leading_amplitude.re;
        assert!((c - 1.5 / PI.sqrt()).abs() < 1e-15);
        assert!((c - 0.846_284).abs() < 1e-6);
    }

    #[test]
    fn asymptote_needs_killing() {
        let d = DiffusionParams::new(1.0, 0.0, 1.0).unwrap();
        assert!(asymptotic_boundary_density(1.0, &d).is_err());
        let a = DiffusionParams::new(1.0, 1.0, 0.0).unwrap();
        let b = DiffusionParams::new(1.0, 2.0, 0.0).unwrap();
        let ca = diffusion_asymptotics(&a).unwrap().leading_amplitude.re;
        let cb = diffusion_asymptotics(&b).unwrap().leading_amplitude.re;
        assert!((ca / cb - 4.0).abs() < 1e-14);
    }

    #[test]
    fn laplace_values() {
        let d = unit_d();
        let v = laplace_boundary_density(Complex64::new(1.0, 0.0), &d).unwrap();
        assert!((v.re - (-1f64).exp() / 3.0).abs() < 1e-15);
        assert!(laplace_boundary_density(Complex64::new(0.0, 1.0), &d).is_err());
        let s = Complex64::new(1e-12, 0.0);
        let v = laplace_boundary_density(s, &d).unwrap();
        assert!((s * v).norm() < 1e-11);
        assert!((v.re * d.killing() / d.diffusion() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn exact_survival_limits() {
        let d = DiffusionParams::new(1.0, 0.0, 1.0).unwrap();
        assert!((survival_diffusion_exact(3.0, &d).unwrap() - 1.0).abs() < 1e-15);
        let d = unit_d();
        assert!((survival_diffusion_exact(1e-4, &d).unwrap() - 1.0).abs() < 1e-12);
        let tau: f64 = 1e8;
        let s = survival_diffusion_exact(tau, &d).unwrap();
        assert!((s / (3.0 / (PI * tau).sqrt()) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn free_quantum_amplitude_is_the_propagator() {
        let q = QuantumParams::new(1.0, 1.0, 0.0, 1.0, 0.0).unwrap();
        let v = boundary_amplitude_quantum(1.0, &q).unwrap();
        let g = schrodinger_propagator(0.0, 1.0, 1.0, &q).unwrap();
        assert!(rel(v, g) < 1e-14);
    }

    #[test]
    fn quantum_form_with_real_coefficients_is_the_diffusion_form() {
        let d = DiffusionParams::new(0.7, 1.3, 0.4).unwrap();
        for &tau in &[0.05, 1.0, 30.0] {
            let a = density_at(
                Complex64::new(tau, 0.0),
                Complex64::new(0.7, 0.0),
                Complex64::new(1.3, 1e-300),
                0.4,
            )
            .unwrap();
            let b = boundary_density_diffusion(tau, &d).unwrap();
            assert!((a.re / b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_reduces_to_free_term_without_coupling() {
        let q = QuantumParams::new(1.0, 1.0, 0.0, 1.0, 0.5).unwrap();
        for &t in &[0.3, 1.0, 20.0] {
            assert_eq!(
                boundary_amplitude_quantum_gaussian(t, &q, 64).unwrap(),
                forcing_gaussian(t, &q).unwrap()
            );
        }
    }

    #[test]
    fn narrow_gaussian_approaches_point_source() {
        let q = QuantumParams::new(1.0, 1.0, 1.0, 1.0, 1e-4).unwrap();
        for &t in &[0.5, 1.0, 5.0] {
            let g = boundary_amplitude_quantum_gaussian(t, &q, 64).unwrap();
            let p = boundary_amplitude_quantum(t, &q).unwrap();
            assert!(rel(g, p) < 1e-6, "t = {t}: {}", rel(g, p));
        }
    }

    #[test]
    fn gaussian_argument_checks() {
        let q = QuantumParams::new(1.0, 1.0, 1.0, 1.0, 0.5).unwrap();
        assert!(boundary_amplitude_quantum_gaussian(1.0, &q, 8).is_err());
        assert!(boundary_amplitude_quantum_gaussian(0.0, &q, 64).is_err());
        assert!(boundary_amplitude_quantum_gaussian(1.0, &q.with_width(0.0).unwrap(), 64).is_err());
    }

    #[test]
    fn asymptotic_form_regime_and_free_limit() {
        let q = QuantumParams::new(1.0, 1.0, 1.0, 1.0, 0.5).unwrap();
        assert!(matches!(asymptotic_phi_gaussian(2.0, &q), Err(Error::OutOfRegime(_))));
        let free = q.with_coupling(0.0).unwrap();
        let t = 100.0;
        assert_eq!(
            asymptotic_phi_gaussian(t, &free).unwrap(),
            forcing_gaussian(t, &free).unwrap()
        );
        let (_, s1) = asymptotic_phi_gaussian_terms(1e3, &q).unwrap();
        let (_, s2) = asymptotic_phi_gaussian_terms(4e3, &q).unwrap();
        assert!((s1.norm() / s2.norm() - 2.0).abs() < 1e-3);
    }

    #[test]
    fn scattering_examples() {
        let q = QuantumParams::new(1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let s = stationary_scattering(1.0, &q).unwrap();
        assert_eq!(s.reflection, Complex64::new(0.0, 0.0));
        assert_eq!(s.transmission, Complex64::new(1.0, 0.0));
        assert_eq!(s.absorbed_fraction, 0.0);
        let q = QuantumParams::new(1.0, 1.0, 2.0, 0.0, 0.0).unwrap();
        let s = stationary_scattering(1.0, &q).unwrap();
        assert_eq!(s.absorbed_fraction, 0.5);
        assert!(stationary_scattering(0.0, &q).is_err());
    }

    #[test]
    fn scattering_satisfies_the_matching_conditions() {
        // ψ = e^{iqx} + r e^{-iqx} (x < 0), t e^{iqx} (x > 0)
        let (m, hbar, k, qw) = (1.3, 0.8, 0.9, 1.7);
        let q = QuantumParams::new(hbar, m, k, 0.0, 0.0).unwrap();
        let s = stationary_scattering(qw, &q).unwrap();
        let (r, t) = (s.reflection, s.transmission);
        assert!((1.0 + r - t).norm() < 1e-15);
        let jump = Complex64::i() * qw * t - Complex64::i() * qw * (1.0 - r);
        let want = -Complex64::i() * k * m / (hbar * hbar) * t;
        assert!((jump - want).norm() < 1e-14);
    }

    #[test]
    fn sweep_is_log_spaced() {
        let u = log_sweep(0.01, 100.0, 5);
        assert_eq!(u[0], 0.01);
        assert_eq!(u[4], 100.0);
        assert!((u[2] - 1.0).abs() < 1e-14);
    }
}
