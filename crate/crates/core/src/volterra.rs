//! Second-kind Volterra equations with an Abel kernel,
//!
//! ```text
//! φ(t) = g(t) - ∫_{t0}^{t} λ (t - s)^{-1/2} φ(s) ds,   t ∈ [t0, T],
//! ```
//!
//! solved by product trapezoidal integration: `φ` is interpolated linearly on
//! each step and the moments of `(t - s)^{-1/2}` are integrated exactly. The
//! resulting lower-triangular system is solved by forward substitution.
//!
//! Forcings that change by orders of magnitude over one step (for instance
//! `e^{-x0²/4τ}` at small `τ`) can be peeled: since the Abel kernel composed
//! with itself is the constant `πλ²`,
//!
//! ```text
//! φ = g - K*g + v,   v + K*v = πλ² ∫_{t0}^{t} g,
//! ```
//!
//! and only `v`, which is smaller by two powers of the memory, is discretized.
//! `K*g` and `∫g` are computed by Gauss–Legendre quadrature of `g` itself.
//!
//! When `t0 > 0` the memory of `[0, t0]` has to be folded into `g`. For
//! forcings that are singular at the origin [`SpliceHistory`] computes it from a
//! known solution on `[0, t0]`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::closedform::{boundary_amplitude_quantum_complex, boundary_amplitude_quantum_gaussian, density_at};
use crate::error::{Error, Result};
use crate::model::{AmplitudeSeries, DiffusionParams, QuantumParams, SeriesKind, TimeGrid};
use crate::propagators::{
    forcing_delta, forcing_diffusion, forcing_gaussian, kernel_diffusion, kernel_quantum, KernelSpec,
};
use crate::quad::{integrate_doubling, GaussLegendre};

/// A forcing as a function of time.
pub type Forcing<'a> = Box<dyn Fn(f64) -> Complex64 + 'a>;

/// Equation data: forcing, kernel and time grid.
pub struct VolterraProblem<'a> {
    forcing: Forcing<'a>,
    kernel: KernelSpec,
    grid: TimeGrid,
    singular_forcing: bool,
    kind: SeriesKind,
    peel: bool,
}

impl<'a> VolterraProblem<'a> {
    /// `singular_forcing` marks a forcing that blows up at `t = 0`, which then
    /// requires `grid.start() > 0`.
    pub fn new<F>(forcing: F, kernel: KernelSpec, grid: TimeGrid, singular_forcing: bool) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + 'a,
    {
        if singular_forcing && grid.start() == 0.0 {
            return Err(Error::InvalidProblem(
                "singular forcing needs a grid starting after t = 0",
            ));
        }
        Ok(Self {
            forcing: Box::new(forcing),
            kernel,
            grid,
            singular_forcing,
            kind: SeriesKind::QuantumAmplitude,
            peel: false,
        })
    }

    /// Solve for the remainder after the first two Neumann terms; see the
    /// module documentation. Costs a few hundred forcing evaluations per step.
    pub fn peeled(mut self) -> Self {
        self.peel = true;
        self
    }

    pub fn is_peeled(&self) -> bool {
        self.peel
    }

    /// Tag attached to the solution series.
    pub fn with_kind(mut self, kind: SeriesKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn is_singular(&self) -> bool {
        self.singular_forcing
    }

    pub fn forcing_at(&self, t: f64) -> Complex64 {
        (self.forcing)(t)
    }

    /// Same forcing and kernel on another grid.
    pub fn on_grid(&self, grid: TimeGrid) -> VolterraProblem<'_> {
        VolterraProblem {
            forcing: Box::new(move |t| (self.forcing)(t)),
            kernel: self.kernel,
            grid,
            singular_forcing: self.singular_forcing,
            kind: self.kind,
            peel: self.peel,
        }
    }
}

/// Product-trapezoid weights `A(m)`, `B(m)` of the left and right end of the
/// step whose far end lies `m` steps behind the current time, in units of `√h`.
fn end_weights(m: usize) -> (f64, f64) {
    let p = (m as f64).sqrt();
    let q = ((m - 1) as f64).sqrt();
    let d = 1.0 / (p + q);
    let d2 = d * d;
    (2.0 / 3.0 * d2 * (p + 2.0 * q), 2.0 / 3.0 * d2 * (2.0 * p + q))
}

/// Quadrature weights `w[n][j]` folded into two arrays: `first[n]` multiplies
/// `φ_0`, `interior[m]` multiplies `φ_{n-m}` for `1 <= m < n`.
struct Weights {
    first: Vec<f64>,
    interior: Vec<f64>,
    diagonal: f64,
}

impl Weights {
    fn new(n: usize) -> Self {
        let mut a = Vec::with_capacity(n + 1);
        let mut b = Vec::with_capacity(n + 2);
        a.push(0.0);
        b.push(0.0);
        for m in 1..=n + 1 {
            let (am, bm) = end_weights(m);
            a.push(am);
            b.push(bm);
        }
        let interior = (0..n.max(1))
            .map(|m| if m == 0 { 0.0 } else { a[m] + b[m + 1] })
            .collect();
        Self {
            first: a[..=n].to_vec(),
            interior,
            diagonal: b[1],
        }
    }

    /// `Σ_j w_{n,j} φ_j` over `j < n`, summed in a fixed order.
    fn history(&self, n: usize, phi: &[Complex64]) -> Complex64 {
        let mut acc = self.first[n] * phi[0];
        for (j, v) in phi.iter().enumerate().take(n).skip(1) {
            acc += self.interior[n - j] * v;
        }
        acc
    }
}

/// Solves the equation on the problem grid.
pub fn solve_abel_volterra(p: &VolterraProblem<'_>) -> Result<AmplitudeSeries> {
    let grid = p.grid;
    let n = grid.len();
    let mut g = Vec::with_capacity(n);
    for i in 0..n {
        let v = (p.forcing)(grid.time(i));
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::InvalidProblem("forcing is not finite on the grid"));
        }
        g.push(v);
    }
    if !p.peel {
        let phi = march(p, &g)?;
        return AmplitudeSeries::new(grid, phi, p.kind);
    }
    let (memory, reduced) = peel_forcing(p, &g)?;
    let v = march(p, &reduced)?;
    let phi = (0..n).map(|i| g[i] - memory[i] + v[i]).collect();
    AmplitudeSeries::new(grid, phi, p.kind)
}

/// `(K*g)(t_i)` and `πλ² ∫_{t0}^{t_i} g` on the grid.
fn peel_forcing(p: &VolterraProblem<'_>, g: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let grid = p.grid;
    let t0 = grid.start();
    let lambda = p.kernel.lambda;
    let rule = GaussLegendre::new(16);
    let mut memory = Vec::with_capacity(g.len());
    let mut reduced = Vec::with_capacity(g.len());
    let mut integral = Complex64::new(0.0, 0.0);
    memory.push(Complex64::new(0.0, 0.0));
    reduced.push(Complex64::new(0.0, 0.0));
    for i in 1..g.len() {
        let t = grid.time(i);
        integral += rule.integrate(grid.time(i - 1), t, |s| (p.forcing)(s));
        // Near s = t substitute s = t - v², which removes the kernel singularity.
        let mid = 0.5 * (t0 + t);
        let far = integrate_doubling(
            &rule,
            t0,
            mid,
            1,
            1 << 12,
            1e-11,
            0.0,
            |s| (p.forcing)(s) / (t - s).sqrt(),
            "forcing memory",
        )?;
        let near = integrate_doubling(
            &rule,
            0.0,
            (t - mid).sqrt(),
            1,
            1 << 12,
            1e-11,
            0.0,
            |v| 2.0 * (p.forcing)(t - v * v),
            "forcing memory",
        )?;
        let m = far + near;
        memory.push(lambda * m);
        reduced.push(core::f64::consts::PI * lambda * lambda * integral);
    }
    Ok((memory, reduced))
}

/// Product-trapezoid forward substitution for sampled forcing values.
fn march(p: &VolterraProblem<'_>, g: &[Complex64]) -> Result<Vec<Complex64>> {
    let grid = p.grid;
    let n = g.len();
    let scale = p.kernel.lambda * grid.step().sqrt();
    let weights = Weights::new(n);
    let diag = Complex64::new(1.0, 0.0) + scale * weights.diagonal;
    if diag.norm() < 1e-12 {
        return Err(Error::SingularStep {
            step: grid.step(),
            lambda: p.kernel.lambda,
        });
    }
    let mut phi = Vec::with_capacity(n);
    for i in 0..n {
        let v = if i == 0 {
            g[0]
        } else {
            (g[i] - scale * weights.history(i, &phi)) / diag
        };
        phi.push(v);
    }
    Ok(phi)
}

/// Largest `|φ_n + (K φ)_n - g_n|` over the grid when the memory term is
/// re-evaluated with the solver's own quadrature, relative to `max |φ|`.
/// Meaningful for problems solved without peeling.
pub fn self_consistency_residual(p: &VolterraProblem<'_>, solution: &AmplitudeSeries) -> f64 {
    let grid = p.grid;
    let phi = solution.values();
    let n = phi.len().min(grid.len());
    let scale = p.kernel.lambda * grid.step().sqrt();
    let weights = Weights::new(n);
    let mut worst = 0.0f64;
    let mut size = 0.0f64;
    for i in 0..n {
        let g = (p.forcing)(grid.time(i));
        let memory = if i == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            scale * (weights.history(i, phi) + weights.diagonal * phi[i])
        };
        worst = worst.max((phi[i] + memory - g).norm());
        size = size.max(phi[i].norm());
    }
    worst / size.max(f64::MIN_POSITIVE)
}

/// Observed order of accuracy at the final time: the least-squares slope of
/// `ln |φ_h(T) - φ_ref(T)|` against `ln h` over `refinements` halvings of the
/// problem step. `reference` must end at the same final time.
pub fn estimate_convergence_order(
    p: &VolterraProblem<'_>,
    reference: &AmplitudeSeries,
    refinements: usize,
) -> Result<f64> {
    if refinements < 2 {
        return Err(Error::InvalidParameter {
            name: "refinements",
            reason: "need at least two halvings",
        });
    }
    let end = p.grid.end();
    if (reference.grid().end() - end).abs() > 1e-9 * end.abs().max(1.0) {
        return Err(Error::InvalidProblem("reference ends at a different time"));
    }
    let target = reference.last();
    let mut grid = p.grid;
    let mut logs = Vec::with_capacity(refinements + 1);
    for level in 0..=refinements {
        if level > 0 {
            grid = grid.refined();
        }
        let sol = solve_abel_volterra(&p.on_grid(grid))?;
        let err = (sol.last() - target).norm();
        if err <= 64.0 * f64::EPSILON * target.norm().max(f64::MIN_POSITIVE) {
            return Err(Error::DegenerateFit("errors are at the rounding floor"));
        }
        logs.push((grid.step().ln(), err.ln()));
    }
    Ok(slope(&logs))
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Memory of a known solution on `[0, t0]` seen from times `t >= t0`:
///
/// ```text
/// H(t) = λ ∫_0^{t0} (t - s)^{-1/2} φ(s) ds.
/// ```
///
/// `φ` is evaluated once on a fixed set of nodes of a contour from `0` to `t0`
/// that bulges into the lower half plane by `tilt · t0 / 4`, which tames the
/// oscillation of Schrödinger amplitudes near `s = 0`. Use `tilt = 0` for
/// real-valued problems. A cosine substitution clusters nodes at both ends,
/// removing the `s^{-1/2}` singularity of point-source data.
pub struct SpliceHistory {
    lambda: Complex64,
    nodes: Vec<(Complex64, Complex64)>,
}

impl SpliceHistory {
    /// `phi` is evaluated at complex times on the contour.
    pub fn new<F>(lambda: Complex64, t0: f64, tilt: f64, panels: usize, mut phi: F) -> Result<Self>
    where
        F: FnMut(Complex64) -> Result<Complex64>,
    {
        if !(t0 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "t0",
                reason: "splice time must be positive",
            });
        }
        let rule = GaussLegendre::new(16);
        let half_pi = core::f64::consts::FRAC_PI_2;
        let mut nodes = Vec::with_capacity(16 * panels);
        for (w, wt) in rule.composite_nodes(0.0, 1.0, panels) {
            let (sn, cs) = (half_pi * w).sin_cos();
            let u = sn * sn;
            let du = 2.0 * half_pi * sn * cs;
            let s = Complex64::new(t0 * u, -tilt * t0 * u * (1.0 - u));
            let ds = Complex64::new(t0, -tilt * t0 * (1.0 - 2.0 * u)) * du;
            let v = phi(s)?;
            nodes.push((s, v * ds * wt));
        }
        Ok(Self { lambda, nodes })
    }

    /// `H(t)` for `t` beyond the splice time.
    pub fn at(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(s, w) in &self.nodes {
            acc += w / crate::specfun::sqrt_principal(t - s);
        }
        self.lambda * acc
    }
}

/// Panels of the splice contour quadrature.
const SPLICE_PANELS: usize = 16;

/// Bulge of the splice contour for Schrödinger amplitudes.
const SPLICE_TILT: f64 = 1.0;

/// Boundary density `p(0, τ)` of killed diffusion on `grid` (in `τ = D t`).
///
/// For `x0 ≠ 0` the forcing vanishes to all orders at `τ = 0`; the grid may
/// start there and the solve is peeled. A grid starting at `τ0 > 0` instead
/// takes the memory of `[0, τ0]` from the closed form, which is required for a
/// source on the absorber.
pub fn solve_diffusion_boundary(d: &DiffusionParams, grid: TimeGrid) -> Result<AmplitudeSeries> {
    let kernel = kernel_diffusion(d);
    let f = move |t: f64| {
        if t == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            forcing_diffusion(t, d).unwrap_or(Complex64::new(f64::NAN, 0.0))
        }
    };
    if grid.start() == 0.0 {
        if d.source() == 0.0 {
            return Err(Error::InvalidProblem(
                "a source on the absorber needs a grid starting after 0",
            ));
        }
        let p = VolterraProblem::new(f, kernel, grid, false)?
            .with_kind(SeriesKind::DiffusionDensity)
            .peeled();
        return solve_abel_volterra(&p);
    }
    let dd = Complex64::new(d.diffusion(), 0.0);
    let kk = Complex64::new(d.killing(), 0.0);
    let hist = SpliceHistory::new(kernel.lambda, grid.start(), 0.0, SPLICE_PANELS, |s| {
        density_at(s, dd, kk, d.source())
    })?;
    let p =
        VolterraProblem::new(move |t| f(t) - hist.at(t), kernel, grid, true)?.with_kind(SeriesKind::DiffusionDensity);
    solve_abel_volterra(&p)
}

/// Boundary amplitude `φ(t)` of the Schrödinger equation on `grid`.
///
/// A Gaussian packet (`a > 0`, unit-mass profile) has a regular forcing and
/// the grid may start at `t = 0`. For a point source, or any grid starting at
/// `t0 > 0`, the memory of `[0, t0]` comes from the closed form evaluated on a
/// contour dipping into the lower half plane.
pub fn solve_quantum_boundary(q: &QuantumParams, grid: TimeGrid) -> Result<AmplitudeSeries> {
    let kernel = kernel_quantum(q);
    let point = q.is_point_source();
    if grid.start() == 0.0 && !point {
        let p = VolterraProblem::new(
            move |t| forcing_gaussian(t, q).unwrap_or(Complex64::new(f64::NAN, 0.0)),
            kernel,
            grid,
            false,
        )?;
        return solve_abel_volterra(&p);
    }
    if grid.start() == 0.0 {
        return Err(Error::InvalidProblem(
            "a point source needs a grid starting after t = 0",
        ));
    }
    let hist = if point {
        SpliceHistory::new(kernel.lambda, grid.start(), SPLICE_TILT, SPLICE_PANELS, |s| {
            boundary_amplitude_quantum_complex(s, q)
        })?
    } else {
        SpliceHistory::new(kernel.lambda, grid.start(), 0.0, SPLICE_PANELS, |s| {
            boundary_amplitude_quantum_gaussian(s.re, q, 64)
        })?
    };
    let f = move |t: f64| {
        let v = if point {
            forcing_delta(t, q)
        } else {
            forcing_gaussian(t, q)
        };
        v.unwrap_or(Complex64::new(f64::NAN, 0.0)) - hist.at(t)
    };
    let p = VolterraProblem::new(f, kernel, grid, point)?;
    solve_abel_volterra(&p)
}
