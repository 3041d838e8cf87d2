//! Free Green's functions, the forcing terms they induce at the origin, and
//! the Abel kernels `λ / √(t - s)` of the boundary integral equations.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{DiffusionParams, QuantumParams};
use crate::specfun::{sqrt_pi_times, sqrt_principal};

/// `e^{-iπ/4}`
const ROT_MINUS_QUARTER: Complex64 =
    Complex64::new(core::f64::consts::FRAC_1_SQRT_2, -core::f64::consts::FRAC_1_SQRT_2);

/// Abel kernel `K(t - s) = λ / √(t - s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub lambda: Complex64,
}

impl KernelSpec {
    pub fn new(lambda: Complex64) -> Result<Self> {
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: "must be finite",
            });
        }
        Ok(Self { lambda })
    }

    pub fn eval(&self, lag: f64) -> Complex64 {
        self.lambda / lag.sqrt()
    }
}

/// `(1 / 2√(πτ)) exp(-(x - y)² / 4τ)` for complex `τ` in the closed right
/// half plane (excluding the origin).
pub fn heat_kernel(x: f64, y: f64, tau: Complex64) -> Result<Complex64> {
    if tau.re < 0.0 || (tau.re == 0.0 && tau.im == 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
        return Err(Error::Domain {
            what: "heat kernel time",
            value: tau.re,
        });
    }
    let d = x - y;
    Ok((-(d * d) / (4.0 * tau)).exp() / (2.0 * sqrt_pi_times(tau)))
}

/// Free Schrödinger propagator `√(m / 2πħit) exp(i m (x - y)² / 2ħt)`.
pub fn schrodinger_propagator(x: f64, y: f64, t: f64, q: &QuantumParams) -> Result<Complex64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            what: "propagation time",
            value: t,
        });
    }
    let (m, hbar) = (q.mass(), q.hbar());
    let d = x - y;
    let modulus = (m / (2.0 * PI * hbar * t)).sqrt();
    let phase = m * d * d / (2.0 * hbar * t);
    Ok(ROT_MINUS_QUARTER * modulus * Complex64::new(phase.cos(), phase.sin()))
}

/// `f(t) = G(0, x0, t)`: the free amplitude at the origin from a point source.
/// The packet width of `q` is ignored.
pub fn forcing_delta(t: f64, q: &QuantumParams) -> Result<Complex64> {
    schrodinger_propagator(0.0, q.source(), t, q)
}

/// Free amplitude at the origin for the Gaussian initial profile
/// `exp(-(y - x0)² / 2a²) / (√(2π) a)`:
///
/// `(1 - i) √m / (2 √(ħt - i m a²) √π) · exp(i x0² m / 2(ħt - i m a²))`.
///
/// Regular at `t = 0`, where it reduces to the initial profile at the origin.
pub fn forcing_gaussian(t: f64, q: &QuantumParams) -> Result<Complex64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            what: "propagation time",
            value: t,
        });
    }
    if q.width() <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "a",
            reason: "Gaussian forcing needs a positive packet width",
        });
    }
    if t == 0.0 && q.source() == 0.0 {
        return Ok(Complex64::new(1.0 / ((2.0 * PI).sqrt() * q.width()), 0.0));
    }
    Ok(gaussian_free_term(t, q))
}

pub(crate) fn gaussian_free_term(t: f64, q: &QuantumParams) -> Complex64 {
    let (m, hbar, a, x0) = (q.mass(), q.hbar(), q.width(), q.source());
    let denom = Complex64::new(hbar * t, -m * a * a);
    let pref = Complex64::new(1.0, -1.0) * m.sqrt() / (2.0 * sqrt_principal(denom) * PI.sqrt());
    pref * (Complex64::new(0.0, 0.5 * x0 * x0 * m) / denom).exp()
}

/// Point-source or Gaussian forcing depending on the packet width.
pub fn forcing(t: f64, q: &QuantumParams) -> Result<Complex64> {
    if q.is_point_source() {
        forcing_delta(t, q)
    } else {
        forcing_gaussian(t, q)
    }
}

/// Kernel of the boundary equation `φ = f - ∫ K(t - s) φ(s) ds` in physical
/// time: `K(t) = (k/2ħ) G(0, 0, t)`, i.e. `λ = (k/2ħ) √(m / 2πiħ)`.
///
/// This is the diffusion kernel `κ/(2√(πD))` under `D = iħ/2m`, `κ = k/2ħ`
/// once the time variable is changed from `τ = D t` back to `t`.
pub fn kernel_quantum(q: &QuantumParams) -> KernelSpec {
    let (m, hbar) = (q.mass(), q.hbar());
    let lambda = ROT_MINUS_QUARTER * (q.coupling() / (2.0 * hbar)) * (m / (2.0 * PI * hbar)).sqrt();
    KernelSpec { lambda }
}

/// Kernel `κ / (2D√π)` of the killed-diffusion equation in `τ = D t`.
pub fn kernel_diffusion(d: &DiffusionParams) -> KernelSpec {
    KernelSpec {
        lambda: Complex64::new(d.killing() / (2.0 * d.diffusion() * PI.sqrt()), 0.0),
    }
}

/// Kernel for arbitrary complex `(D, κ)` in the time variable `τ = D t`:
/// `κ / (2D√π)`.
pub fn kernel_complex(diffusion: Complex64, killing: Complex64) -> KernelSpec {
    KernelSpec {
        lambda: killing / (2.0 * diffusion * PI.sqrt()),
    }
}

/// Free point-source forcing `1/(2√(πτ)) e^{-x0²/4τ}` in `τ`.
pub fn forcing_diffusion(tau: f64, d: &DiffusionParams) -> Result<Complex64> {
    if !(tau > 0.0) {
        return Err(Error::Domain {
            what: "diffusion time",
            value: tau,
        });
    }
    heat_kernel(0.0, d.source(), Complex64::new(tau, 0.0))
}
