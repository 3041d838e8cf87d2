//! Parameter bundles, time grids and the containers the solvers hand around.
//!
//! The library is unit-agnostic. Callers must pass a consistent unit system;
//! the tests use natural units with `hbar = mass = 1`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Brownian motion on the line with killing rate `κ δ(x)` per unit time,
/// started from a point source at `x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams {
    diffusion: f64,
    killing: f64,
    source: f64,
}

impl DiffusionParams {
    pub fn new(diffusion: f64, killing: f64, source: f64) -> Result<Self> {
        if !(diffusion.is_finite() && diffusion > 0.0) {
            return Err(Error::InvalidParameter {
                name: "diffusion",
                reason: "must be finite and > 0",
            });
        }
        if !(killing.is_finite() && killing >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "kappa",
                reason: "must be finite and >= 0",
            });
        }
        if !source.is_finite() {
            return Err(Error::InvalidParameter {
                name: "x0",
                reason: "must be finite",
            });
        }
        Ok(Self {
            diffusion,
            killing,
            source,
        })
    }

    /// Diffusion coefficient `D`.
    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }

    /// Killing strength `κ`.
    pub fn killing(&self) -> f64 {
        self.killing
    }

    /// Source position `x0`.
    pub fn source(&self) -> f64 {
        self.source
    }
}

/// Schrödinger particle of mass `m` in the potential `-(i k / 2) δ(x)`.
///
/// `width = 0` stands for the point source `ψ(y, 0) = δ(y - x0)`; a positive
/// width selects the Gaussian `exp(-(y - x0)² / 2a²) / (√(2π) a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumParams {
    hbar: f64,
    mass: f64,
    coupling: f64,
    source: f64,
    width: f64,
}

impl QuantumParams {
    pub fn new(hbar: f64, mass: f64, coupling: f64, source: f64, width: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter {
                name: "hbar",
                reason: "must be finite and > 0",
            });
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter {
                name: "mass",
                reason: "must be finite and > 0",
            });
        }
        if !(coupling.is_finite() && coupling >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: "must be finite and >= 0",
            });
        }
        if !source.is_finite() {
            return Err(Error::InvalidParameter {
                name: "x0",
                reason: "must be finite",
            });
        }
        if !(width.is_finite() && width >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "a",
                reason: "must be finite and >= 0",
            });
        }
        Ok(Self {
            hbar,
            mass,
            coupling,
            source,
            width,
        })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Coupling `k` of the potential `-(i k / 2) δ(x)`.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn source(&self) -> f64 {
        self.source
    }

    /// Gaussian packet width `a`; zero for a point source.
    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn is_point_source(&self) -> bool {
        self.width == 0.0
    }

    /// Same parameters with a different coupling.
    pub fn with_coupling(&self, coupling: f64) -> Result<Self> {
        Self::new(self.hbar, self.mass, coupling, self.source, self.width)
    }

    /// Same parameters with a different packet width.
    pub fn with_width(&self, width: f64) -> Result<Self> {
        Self::new(self.hbar, self.mass, self.coupling, self.source, width)
    }

    /// Rate prefactor in `dS/dt = -(k/ħ) |ψ(0, t)|²`.
    pub fn absorption_rate(&self) -> f64 {
        self.coupling / self.hbar
    }

    pub fn effective(&self) -> EffectiveComplexParams {
        map_quantum_to_diffusion(self)
    }
}

/// Complex diffusion coefficient and killing strength that turn the
/// Schrödinger problem into a diffusion problem in `τ = D t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveComplexParams {
    pub diffusion: Complex64,
    pub killing: Complex64,
}

/// `D = iħ/2m`, `κ = k/2ħ`.
pub fn map_quantum_to_diffusion(q: &QuantumParams) -> EffectiveComplexParams {
    EffectiveComplexParams {
        diffusion: Complex64::new(0.0, q.hbar / (2.0 * q.mass)),
        killing: Complex64::new(q.coupling / (2.0 * q.hbar), 0.0),
    }
}

/// Uniform grid `t_i = t_start + i h`, `i = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    start: f64,
    step: f64,
    count: usize,
}

impl TimeGrid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !(start.is_finite() && start >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "t_start",
                reason: "must be finite and >= 0",
            });
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidParameter {
                name: "h",
                reason: "must be finite and > 0",
            });
        }
        if count < 2 {
            return Err(Error::InvalidParameter {
                name: "N",
                reason: "grid needs at least two points",
            });
        }
        Ok(Self { start, step, count })
    }

    /// Grid covering `[start, end]` with `intervals` equal steps.
    pub fn spanning(start: f64, end: f64, intervals: usize) -> Result<Self> {
        if !(end > start) {
            return Err(Error::InvalidParameter {
                name: "t_max",
                reason: "must exceed t_start",
            });
        }
        if intervals == 0 {
            return Err(Error::InvalidParameter {
                name: "steps",
                reason: "must be positive",
            });
        }
        Self::new(start, (end - start) / intervals as f64, intervals + 1)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `t_i`, computed by multiplication so no rounding accumulates.
    pub fn time(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.time(self.count - 1)
    }

    pub fn times(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.time(i))
    }

    /// Same span with the step halved.
    pub fn refined(&self) -> Self {
        Self {
            start: self.start,
            step: 0.5 * self.step,
            count: 2 * (self.count - 1) + 1,
        }
    }

    /// First `count` points of this grid.
    pub fn truncated(&self, count: usize) -> Result<Self> {
        Self::new(self.start, self.step, count.min(self.count))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// `p(0, τ)` of the killed diffusion.
    DiffusionDensity,
    /// `φ(t) = ψ(0, t)` of the Schrödinger problem.
    QuantumAmplitude,
}

/// Boundary values sampled on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSeries {
    grid: TimeGrid,
    values: Vec<Complex64>,
    kind: SeriesKind,
}

impl AmplitudeSeries {
    pub fn new(grid: TimeGrid, values: Vec<Complex64>, kind: SeriesKind) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: "length differs from the grid",
            });
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: "must be finite",
            });
        }
        Ok(Self { grid, values, kind })
    }

    /// Samples `f` at every grid point.
    pub fn sample<F>(grid: TimeGrid, kind: SeriesKind, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<Complex64>,
    {
        let values = grid.times().map(&mut f).collect::<Result<Vec<_>>>()?;
        Self::new(grid, values, kind)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last(&self) -> Complex64 {
        self.values[self.values.len() - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.grid.times().zip(self.values.iter().copied())
    }
}

/// `S(t_i)` on a grid, with the optional tail and vanishing-time metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalCurve {
    grid: TimeGrid,
    values: Vec<f64>,
    /// Prefactor `r` in `dS/dt = -r |value|²` (quantum) or `-r value` (diffusion).
    pub rate: f64,
    /// Factor applied to `|value|²` before integrating (wave-function normalization).
    pub amplitude_scale: f64,
    pub tail_coefficient: Option<f64>,
    pub vanishing_time: Option<f64>,
}

impl SurvivalCurve {
    pub(crate) fn from_parts(grid: TimeGrid, values: Vec<f64>, rate: f64) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self {
            grid,
            values,
            rate,
            amplitude_scale: 1.0,
            tail_coefficient: None,
            vanishing_time: None,
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.times().zip(self.values.iter().copied())
    }

    /// Linear interpolation inside the grid; `None` outside.
    pub fn at(&self, t: f64) -> Option<f64> {
        let h = self.grid.step();
        let x = (t - self.grid.start()) / h;
        if !(x >= -1e-9 && x <= (self.len() - 1) as f64 + 1e-9) {
            return None;
        }
        let i = (x.max(0.0) as usize).min(self.len() - 2);
        let w = (x - i as f64).clamp(0.0, 1.0);
        Some((1.0 - w) * self.values[i] + w * self.values[i + 1])
    }

    /// Drops every sample after index `last`.
    pub(crate) fn truncate(&mut self, last: usize) {
        let keep = (last + 1).max(2).min(self.values.len());
        self.values.truncate(keep);
        self.grid = self.grid.truncated(keep).expect("keep >= 2");
    }
}
