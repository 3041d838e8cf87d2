//! Survival probabilities from boundary values, power-law tail fits and the
//! extrapolated vanishing time.
//!
//! Both models lose mass only through the absorber:
//! `dS/dτ = -(κ/D) p(0, τ)` for diffusion and `dS/dt = -(k/ħ) |φ(t)|²` for the
//! Schrödinger equation.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::closedform::{boundary_amplitude_quantum_gaussian, boundary_density_diffusion, gaussian_norm_factor};
use crate::error::{Error, Result};
use crate::model::{AmplitudeSeries, DiffusionParams, QuantumParams, SeriesKind, SurvivalCurve};
use crate::quad::{cumulative_trapezoid, log_spaced_integral};

/// Points of the log-spaced closed-form quadrature over `[0, t_start]`.
pub const BOUNDARY_LAYER_POINTS: usize = 10_000;

/// Nodes per half line in the Gaussian closed form used for the boundary layer.
const LAYER_NODES: usize = 64;

/// Allowed rise of `S` between neighbouring samples.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailModel {
    PowerLaw,
}

/// `|value|² ≈ c t^p` (quantum) or `value ≈ c t^p` (diffusion) on a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub model: TailModel,
    pub coefficient: f64,
    pub exponent: f64,
    pub window: (f64, f64),
    /// RMS deviation of the fit in log space.
    pub residual: f64,
}

impl TailFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.coefficient * t.powf(self.exponent)
    }
}

/// Time at which `S` reaches zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanishingTime {
    pub time: f64,
    /// `true` when obtained from the logarithmic tail beyond the grid.
    pub extrapolated: bool,
}

/// Straight-line fit `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least squares with the coefficient of determination.
pub fn fit_line(points: &[(f64, f64)]) -> Result<LineFit> {
    if points.len() < 2 {
        return Err(Error::InsufficientPoints {
            found: points.len(),
            needed: 2,
        });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points
        .iter()
        .map(|p| {
            let r = p.1 - intercept - slope * p.0;
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Survival in the diffusion time `τ`: `S(τ) = 1 - (κ/D) ∫_0^τ p(0, u) du`.
///
/// The series may start after `τ = 0`; the mass absorbed before its first
/// sample is taken from the closed form.
pub fn survival_diffusion(series: &AmplitudeSeries, d: &DiffusionParams) -> Result<SurvivalCurve> {
    let rate = d.killing() / d.diffusion();
    let grid = *series.grid();
    let start = grid.start();
    let layer = if start > 0.0 && rate > 0.0 {
        log_spaced_integral(start * 1e-10, start, BOUNDARY_LAYER_POINTS, |u| {
            boundary_density_diffusion(u, d)
        })?
    } else {
        0.0
    };
    let density: Vec<f64> = series.values().iter().map(|v| v.re).collect();
    let acc = cumulative_trapezoid(&density, grid.step());
    let values: Vec<f64> = acc.iter().map(|a| 1.0 - rate * (layer + a)).collect();
    check_monotone(&values)?;
    let mut curve = SurvivalCurve::from_parts(grid, values, rate);
    if rate > 0.0 {
        curve.tail_coefficient = Some((d.source().abs() + 2.0 / rate) / PI.sqrt());
    }
    Ok(curve)
}

/// `(κ/D) ∫_τ^∞ p(0, u) du` from the `τ^{-3/2}` law: `(|x0| + 2D/κ) / √(πτ)`.
pub fn diffusion_tail_mass(tau: f64, d: &DiffusionParams) -> Result<f64> {
    if d.killing() == 0.0 {
        return Err(Error::Domain {
            what: "killing strength for the tail law",
            value: 0.0,
        });
    }
    if !(tau > 0.0) {
        return Err(Error::Domain {
            what: "diffusion time",
            value: tau,
        });
    }
    Ok((d.source().abs() + 2.0 * d.diffusion() / d.killing()) / (PI * tau).sqrt())
}

/// Survival `S(t) = S(0) - (k/ħ) ∫_0^t |φ|² dt'` for a Gaussian packet.
///
/// `series` holds the amplitude of the unit-mass profile. With `normalize` the
/// wave function is rescaled to unit norm, so `S(0) = 1`; otherwise
/// `S(0) = 1 / (2a√π)`. A point source has no finite norm and is rejected.
pub fn survival_quantum(series: &AmplitudeSeries, q: &QuantumParams, normalize: bool) -> Result<SurvivalCurve> {
    if q.is_point_source() {
        return Err(Error::Normalization(
            "a point source has no finite norm and its absorption integral diverges at t = 0",
        ));
    }
    let factor = gaussian_norm_factor(q)?;
    let scale = if normalize { factor * factor } else { 1.0 };
    let initial = if normalize { 1.0 } else { 1.0 / (factor * factor) };
    let rate = q.absorption_rate();
    let grid = *series.grid();
    let start = grid.start();
    let layer = if start > 0.0 && rate > 0.0 {
        log_spaced_integral(start * 1e-10, start, BOUNDARY_LAYER_POINTS, |t| {
            Ok(boundary_amplitude_quantum_gaussian(t, q, LAYER_NODES)?.norm_sqr())
        })?
    } else {
        0.0
    };
    let density: Vec<f64> = series.values().iter().map(|v| v.norm_sqr()).collect();
    let acc = cumulative_trapezoid(&density, grid.step());
    let values: Vec<f64> = acc.iter().map(|a| initial - rate * scale * (layer + a)).collect();
    check_monotone(&values)?;
    let mut curve = SurvivalCurve::from_parts(grid, values, rate);
    curve.amplitude_scale = scale;
    Ok(curve)
}

fn check_monotone(values: &[f64]) -> Result<()> {
    for (i, w) in values.windows(2).enumerate() {
        if w[1] > w[0] + MONOTONE_SLACK {
            return Err(Error::GridTooCoarse {
                index: i + 1,
                increase: w[1] - w[0],
            });
        }
    }
    Ok(())
}

/// Power-law fit of `ln |value|²` (quantum amplitudes) or `ln |value|`
/// (diffusion densities) against `ln t` over the samples inside `window`.
pub fn fit_tail(series: &AmplitudeSeries, window: (f64, f64)) -> Result<TailFit> {
    let (lo, hi) = window;
    let squared = series.kind() == SeriesKind::QuantumAmplitude;
    let points: Vec<(f64, f64)> = series
        .iter()
        .filter(|&(t, _)| t >= lo && t <= hi && t > 0.0)
        .filter_map(|(t, v)| {
            let m = if squared { v.norm_sqr() } else { v.norm() };
            (m > 0.0).then(|| (t.ln(), m.ln()))
        })
        .collect();
    if points.len() < 10 {
        return Err(Error::InsufficientPoints {
            found: points.len(),
            needed: 10,
        });
    }
    let line = fit_line(&points)?;
    let ss: f64 = points
        .iter()
        .map(|p| {
            let r = p.1 - line.intercept - line.slope * p.0;
            r * r
        })
        .sum();
    Ok(TailFit {
        model: TailModel::PowerLaw,
        coefficient: line.intercept.exp(),
        exponent: line.slope,
        window,
        residual: (ss / points.len() as f64).sqrt(),
    })
}

/// Where `S` reaches zero for a quantum curve with a `c/t` tail in `|φ|²`.
///
/// A zero crossing inside the grid is located by linear interpolation.
/// Otherwise `S(T) - r c ln(T*/T) = 0` is solved for `T*`, with `r` the
/// absorption rate times the curve's amplitude scale. The fit must have been
/// made on the same amplitudes the curve was integrated from.
pub fn vanishing_time_estimate(curve: &SurvivalCurve, tail: &TailFit) -> Result<VanishingTime> {
    if curve.rate == 0.0 {
        return Err(Error::NoVanishing("no absorption"));
    }
    if (tail.exponent + 1.0).abs() > 0.1 {
        return Err(Error::NoVanishing("tail exponent is not within 0.1 of -1"));
    }
    if !(tail.coefficient > 0.0 && tail.coefficient.is_finite()) {
        return Err(Error::NoVanishing("tail coefficient is not positive"));
    }
    let values = curve.values();
    let grid = curve.grid();
    if values[0] <= 0.0 {
        return Ok(VanishingTime {
            time: grid.start(),
            extrapolated: false,
        });
    }
    for i in 1..values.len() {
        if values[i] <= 0.0 {
            let (t0, t1) = (grid.time(i - 1), grid.time(i));
            let (s0, s1) = (values[i - 1], values[i]);
            return Ok(VanishingTime {
                time: t0 + (t1 - t0) * s0 / (s0 - s1),
                extrapolated: false,
            });
        }
    }
    let end = grid.end();
    let slope = curve.rate * curve.amplitude_scale * tail.coefficient;
    let time = end * (curve.last() / slope).exp();
    if !time.is_finite() {
        return Err(Error::NoVanishing("extrapolated time overflows"));
    }
    Ok(VanishingTime {
        time,
        extrapolated: true,
    })
}

/// Records the vanishing time on the curve and drops samples after it.
pub fn stop_at_vanishing(curve: &mut SurvivalCurve, v: &VanishingTime) {
    curve.vanishing_time = Some(v.time);
    if !v.extrapolated {
        let h = curve.grid().step();
        let last = ((v.time - curve.grid().start()) / h).ceil() as usize;
        curve.truncate(last);
    }
}
