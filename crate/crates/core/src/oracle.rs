//! Crank–Nicolson grid solvers for
//!
//! ```text
//! p_t = D p_xx - κ δ(x) p                  (killed diffusion)
//! iħ ψ_t = -(ħ²/2m) ψ_xx - (ik/2) δ(x) ψ   (Schrödinger, imaginary delta)
//! ```
//!
//! on `[-L, L]` with Dirichlet walls. The delta is a single-node potential of
//! weight `1/Δx` at `x = 0`. These solvers share nothing with the integral
//! equation pipeline and serve as an independent check of it.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{AmplitudeSeries, DiffusionParams, QuantumParams, SeriesKind, SurvivalCurve, TimeGrid};
use crate::tridiag::Tridiagonal;

/// Default for [`RunOptions::leakage_tolerance`].
pub const LEAKAGE_TOLERANCE: f64 = 1e-8;

/// Most negative density accepted in diffusion runs.
pub const NEGATIVITY_TOLERANCE: f64 = -1e-10;

/// Relative change of `|ψ(0, t)|` under step halving that fails the resolution check.
pub const STEP_RESOLUTION_TOLERANCE: f64 = 0.1;

/// Backward-Euler half steps that replace the first Crank–Nicolson steps of a
/// diffusion run to damp the grid-scale modes of the narrow initial data.
const SMOOTHING_STEPS: usize = 4;

/// How often (in steps) the wall and positivity guards inspect the field.
const GUARD_INTERVAL: usize = 8;

/// Output and guard settings of a grid run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Keep every `snapshot_every`-th state; `0` keeps only the initial and final states.
    pub snapshot_every: usize,
    /// Largest allowed `|field|` next to a wall relative to the field maximum.
    pub leakage_tolerance: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            snapshot_every: 0,
            leakage_tolerance: LEAKAGE_TOLERANCE,
        }
    }
}

/// Uniform mesh on `[-L, L]` with an odd node count, so `x = 0` is a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    half_width: f64,
    nodes: usize,
}

impl SpatialGrid {
    pub fn new(half_width: f64, nodes: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "half_width",
                reason: "must be positive and finite",
            });
        }
        if nodes < 5 || nodes.is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                name: "nodes",
                reason: "must be odd and at least 5",
            });
        }
        Ok(Self { half_width, nodes })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.nodes - 1) as f64
    }

    pub fn center(&self) -> usize {
        (self.nodes - 1) / 2
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.center() as f64) * self.spacing()
    }

    /// Same box with twice the resolution.
    pub fn refined(&self) -> Self {
        Self {
            half_width: self.half_width,
            nodes: 2 * self.nodes - 1,
        }
    }
}

/// Field on the mesh at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub grid: SpatialGrid,
    pub field: Vec<Complex64>,
    pub time: f64,
}

impl GridState {
    /// `Δx Σ field` for densities, `Δx Σ |field|²` for wave functions.
    pub fn mass(&self, kind: SeriesKind) -> f64 {
        let dx = self.grid.spacing();
        match kind {
            SeriesKind::DiffusionDensity => dx * self.field.iter().map(|v| v.re).sum::<f64>(),
            SeriesKind::QuantumAmplitude => dx * self.field.iter().map(|v| v.norm_sqr()).sum::<f64>(),
        }
    }
}

/// Result of a grid run.
#[derive(Debug, Clone)]
pub struct Evolution {
    /// Initial state, every `snapshot_every`-th state, and the final state.
    pub states: Vec<GridState>,
    pub survival: SurvivalCurve,
    /// Field at `x = 0` at every time of the run.
    pub center: AmplitudeSeries,
    /// Largest wall-to-maximum ratio seen by the leakage guard.
    pub wall_ratio: f64,
}

/// `u_t = a u_xx - (γ/Δx) δ_{i,c} u` on the interior nodes.
struct Stepper {
    grid: SpatialGrid,
    implicit: Tridiagonal,
    /// Off-diagonal and diagonal of the explicit half of Crank–Nicolson.
    r: Complex64,
    explicit_diag: Complex64,
    explicit_center: Complex64,
}

impl Stepper {
    fn new(grid: SpatialGrid, a: Complex64, gamma: Complex64, step: f64) -> Result<Self> {
        let dx = grid.spacing();
        let interior = grid.nodes() - 2;
        let c = grid.center() - 1;
        let r = a * step / (2.0 * dx * dx);
        let sink = gamma * step / (2.0 * dx);
        let one = Complex64::new(1.0, 0.0);
        let mut diag = vec![one + 2.0 * r; interior];
        diag[c] += sink;
        let implicit =
            Tridiagonal::factor(-r, &diag, -r).ok_or(Error::InvalidProblem("singular Crank–Nicolson matrix"))?;
        Ok(Self {
            grid,
            implicit,
            r,
            explicit_diag: one - 2.0 * r,
            explicit_center: one - 2.0 * r - sink,
        })
    }

    /// One step on the interior values `u` (walls are zero), using `scratch`.
    fn step(&self, u: &mut [Complex64], scratch: &mut [Complex64]) {
        let n = u.len();
        let c = self.grid.center() - 1;
        for i in 0..n {
            let left = if i > 0 { u[i - 1] } else { Complex64::new(0.0, 0.0) };
            let right = if i + 1 < n { u[i + 1] } else { Complex64::new(0.0, 0.0) };
            let d = if i == c {
                self.explicit_center
            } else {
                self.explicit_diag
            };
            scratch[i] = d * u[i] + self.r * (left + right);
        }
        self.implicit.solve_in_place(scratch);
        u.copy_from_slice(scratch);
    }

    /// Backward Euler over half a step, `(I - (h/2) A) u⁺ = u`, which shares
    /// the implicit matrix of Crank–Nicolson.
    fn smoothing_step(&self, u: &mut [Complex64]) {
        self.implicit.solve_in_place(u);
    }
}

fn full_field(interior: &[Complex64]) -> Vec<Complex64> {
    let mut f = Vec::with_capacity(interior.len() + 2);
    f.push(Complex64::new(0.0, 0.0));
    f.extend_from_slice(interior);
    f.push(Complex64::new(0.0, 0.0));
    f
}

struct Guards {
    check_negativity: bool,
    leakage_tolerance: f64,
    worst: f64,
}

impl Guards {
    fn inspect(&mut self, u: &[Complex64], time: f64) -> Result<()> {
        let mut max = 0.0f64;
        let mut min = 0.0f64;
        for v in u {
            max = max.max(v.norm());
            min = min.min(v.re);
        }
        let wall = u[0].norm().max(u[u.len() - 1].norm());
        if max > 0.0 {
            self.worst = self.worst.max(wall / max);
        }
        if max > 0.0 && wall > self.leakage_tolerance * max {
            return Err(Error::BoundaryLeakage {
                ratio: wall / max,
                time,
            });
        }
        if self.check_negativity && min < NEGATIVITY_TOLERANCE {
            return Err(Error::Negativity { min, time });
        }
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn run(
    sg: SpatialGrid,
    tg: TimeGrid,
    a: Complex64,
    gamma: Complex64,
    rate: f64,
    kind: SeriesKind,
    mut initial: Vec<Complex64>,
    opts: &RunOptions,
) -> Result<Evolution> {
    let snapshot_every = opts.snapshot_every;
    let h = tg.step();
    let diffusion = kind == SeriesKind::DiffusionDensity;
    let stepper = Stepper::new(sg, a, gamma, h)?;
    let mut guards = Guards {
        check_negativity: diffusion,
        leakage_tolerance: opts.leakage_tolerance,
        worst: 0.0,
    };
    let c = sg.center() - 1;
    let dx = sg.spacing();
    let mass = |u: &[Complex64]| -> f64 {
        if diffusion {
            dx * u.iter().map(|v| v.re).sum::<f64>()
        } else {
            dx * u.iter().map(|v| v.norm_sqr()).sum::<f64>()
        }
    };

    let n = tg.len();
    let mut scratch = vec![Complex64::new(0.0, 0.0); initial.len()];
    let mut survival = Vec::with_capacity(n);
    let mut center = Vec::with_capacity(n);
    let mut states = vec![GridState {
        grid: sg,
        field: full_field(&initial),
        time: tg.start(),
    }];
    survival.push(mass(&initial));
    center.push(initial[c]);
    let u = &mut initial;
    for i in 1..n {
        if diffusion && i <= SMOOTHING_STEPS / 2 {
            stepper.smoothing_step(u);
            stepper.smoothing_step(u);
        } else {
            stepper.step(u, &mut scratch);
        }
        let t = tg.time(i);
        if i % GUARD_INTERVAL == 0 || i + 1 == n {
            guards.inspect(u, t)?;
        }
        survival.push(mass(u));
        center.push(u[c]);
        if (snapshot_every > 0 && i % snapshot_every == 0) || i + 1 == n {
            states.push(GridState {
                grid: sg,
                field: full_field(u),
                time: t,
            });
        }
    }
    Ok(Evolution {
        states,
        survival: SurvivalCurve::from_parts(tg, survival, rate),
        center: AmplitudeSeries::new(tg, center, kind)?,
        wall_ratio: guards.worst,
    })
}

/// Killed diffusion from a Gaussian of standard deviation `initial_width` at
/// `x0`, normalized to unit mass on the mesh. Time is physical time `t`; the
/// density at the origin compares with the closed form at `τ = D t`.
///
pub fn evolve_diffusion(
    d: &DiffusionParams,
    sg: SpatialGrid,
    tg: TimeGrid,
    initial_width: f64,
    opts: &RunOptions,
) -> Result<Evolution> {
    if !(initial_width > 0.0) {
        return Err(Error::InvalidParameter {
            name: "initial_width",
            reason: "must be positive",
        });
    }
    let x0 = d.source();
    let mut init: Vec<Complex64> = (1..sg.nodes() - 1)
        .map(|i| {
            let y = (sg.x(i) - x0) / initial_width;
            Complex64::new((-0.5 * y * y).exp(), 0.0)
        })
        .collect();
    let total = sg.spacing() * init.iter().map(|v| v.re).sum::<f64>();
    if !(total > 0.0) {
        return Err(Error::InvalidProblem("initial profile does not fit on the mesh"));
    }
    for v in &mut init {
        *v /= total;
    }
    run(
        sg,
        tg,
        Complex64::new(d.diffusion(), 0.0),
        Complex64::new(d.killing(), 0.0),
        d.killing(),
        SeriesKind::DiffusionDensity,
        init,
        opts,
    )
}

/// Unit-norm Gaussian `√(2a√π) · exp(-(y - x0)² / 2a²) / (√(2π) a)` evolved
/// under the Schrödinger equation with the imaginary delta.
pub fn evolve_schrodinger(q: &QuantumParams, sg: SpatialGrid, tg: TimeGrid, opts: &RunOptions) -> Result<Evolution> {
    let a = q.width();
    if a <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "a",
            reason: "the grid solver needs a Gaussian packet",
        });
    }
    let (x0, hbar, m) = (q.source(), q.hbar(), q.mass());
    let amp = (2.0 * a * PI.sqrt()).sqrt() / ((2.0 * PI).sqrt() * a);
    let init: Vec<Complex64> = (1..sg.nodes() - 1)
        .map(|i| {
            let y = (sg.x(i) - x0) / a;
            Complex64::new(amp * (-0.5 * y * y).exp(), 0.0)
        })
        .collect();
    run(
        sg,
        tg,
        Complex64::new(0.0, hbar / (2.0 * m)),
        Complex64::new(q.coupling() / (2.0 * hbar), 0.0),
        q.absorption_rate(),
        SeriesKind::QuantumAmplitude,
        init,
        opts,
    )
}

/// Runs the Schrödinger solver at `h` and `h/2` and returns the largest
/// relative change of `|ψ(0, t)|` over the common times. Fails with a
/// step-resolution error when it exceeds 10%.
pub fn check_step_resolution(q: &QuantumParams, sg: SpatialGrid, tg: TimeGrid, opts: &RunOptions) -> Result<f64> {
    let coarse = evolve_schrodinger(q, sg, tg, opts)?;
    let fine = evolve_schrodinger(q, sg, tg.refined(), opts)?;
    let change = step_change(&coarse.center, &fine.center);
    if change > STEP_RESOLUTION_TOLERANCE {
        return Err(Error::StepResolution { change });
    }
    Ok(change)
}

fn step_change(coarse: &AmplitudeSeries, fine: &AmplitudeSeries) -> f64 {
    let mut worst = 0.0f64;
    for (i, v) in coarse.values().iter().enumerate() {
        let w = fine.values()[2 * i];
        let scale = w.norm().max(1e-300);
        worst = worst.max((v.norm() - w.norm()).abs() / scale);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_geometry() {
        let g = SpatialGrid::new(1.0, 5).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.center(), 2);
        assert_eq!(g.x(2), 0.0);
        assert_eq!(g.x(4), 1.0);
        assert!(SpatialGrid::new(1.0, 6).is_err());
        assert!(SpatialGrid::new(0.0, 7).is_err());
        assert_eq!(g.refined().spacing(), 0.25);
    }

    #[test]
    fn diffusion_without_killing_conserves_mass() {
        let d = DiffusionParams::new(1.0, 0.0, 1.0).unwrap();
        let sg = SpatialGrid::new(20.0, 2001).unwrap();
        let tg = TimeGrid::new(0.0, 1e-3, 1001).unwrap();
        let e = evolve_diffusion(&d, sg, tg, 0.05, &RunOptions::default()).unwrap();
        for &s in e.survival.values() {
            assert!((s - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn killing_lowers_survival() {
        let sg = SpatialGrid::new(20.0, 2001).unwrap();
        let tg = TimeGrid::new(0.0, 2e-3, 501).unwrap();
        let weak = evolve_diffusion(
            &DiffusionParams::new(1.0, 0.5, 1.0).unwrap(),
            sg,
            tg,
            0.05,
            &RunOptions::default(),
        )
        .unwrap();
        let strong = evolve_diffusion(
            &DiffusionParams::new(1.0, 2.0, 1.0).unwrap(),
            sg,
            tg,
            0.05,
            &RunOptions::default(),
        )
        .unwrap();
        for (a, b) in weak.survival.values().iter().zip(strong.survival.values()).skip(1) {
            assert!(b <= a);
        }
        assert!(strong.survival.last() < weak.survival.last());
    }

    #[test]
    fn leakage_is_detected() {
        let d = DiffusionParams::new(1.0, 0.0, 0.0).unwrap();
        let sg = SpatialGrid::new(2.0, 201).unwrap();
        let tg = TimeGrid::new(0.0, 1e-2, 200).unwrap();
        assert!(matches!(
            evolve_diffusion(&d, sg, tg, 0.1, &RunOptions::default()),
            Err(Error::BoundaryLeakage { .. })
        ));
    }

    #[test]
    fn free_schrodinger_is_unitary() {
        let q = QuantumParams::new(1.0, 1.0, 0.0, 1.0, 0.5).unwrap();
        let sg = SpatialGrid::new(60.0, 6001).unwrap();
        let tg = TimeGrid::new(0.0, 1e-2, 101).unwrap();
        let e = evolve_schrodinger(&q, sg, tg, &RunOptions::default()).unwrap();
        let s0 = e.survival.values()[0];
        assert!((s0 - 1.0).abs() < 1e-12);
        for &s in e.survival.values() {
            assert!((s - s0).abs() < 1e-10);
        }
    }

    #[test]
    fn absorption_bookkeeping() {
        // Crank–Nicolson loses exactly (k/ħ) h |ψ_c^{n+½}|² per step, with the
        // midpoint value being the mean of the end values.
        let q = QuantumParams::new(1.0, 1.0, 1.0, 1.0, 0.5).unwrap();
        let sg = SpatialGrid::new(30.0, 3001).unwrap();
        let tg = TimeGrid::new(0.0, 1e-3, 501).unwrap();
        let e = evolve_schrodinger(&q, sg, tg, &RunOptions::default()).unwrap();
        let s = e.survival.values();
        let c = e.center.values();
        for i in (100..500).step_by(50) {
            let lost = s[i] - s[i + 1];
            let mid = 0.25 * (c[i] + c[i + 1]).norm_sqr();
            let want = q.absorption_rate() * tg.step() * mid;
            assert!((lost / want - 1.0).abs() < 1e-9, "i = {i}: {lost} vs {want}");
        }
    }

    #[test]
    fn schrodinger_requires_a_packet() {
        let q = QuantumParams::new(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let sg = SpatialGrid::new(10.0, 101).unwrap();
        let tg = TimeGrid::new(0.0, 1e-2, 10).unwrap();
        assert!(evolve_schrodinger(&q, sg, tg, &RunOptions::default()).is_err());
    }
}
