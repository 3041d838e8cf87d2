//! Gauss–Legendre rules and the handful of trapezoid helpers the pipelines use.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F>(&self, a: f64, b: f64, mut f: F) -> Complex64
    where
        F: FnMut(f64) -> Complex64,
    {
        self.mapped(a, b).map(|(x, w)| f(x) * w).sum()
    }

    /// Composite rule over `panels` equal sub-intervals.
    pub fn composite<F>(&self, a: f64, b: f64, panels: usize, mut f: F) -> Complex64
    where
        F: FnMut(f64) -> Complex64,
    {
        let width = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + p as f64 * width;
                let hi = if p + 1 == panels { b } else { lo + width };
                self.integrate(lo, hi, &mut f)
            })
            .sum()
    }

    /// Nodes and weights of the composite rule, in ascending order.
    pub fn composite_nodes(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let width = (b - a) / panels as f64;
        let mut out = Vec::with_capacity(panels * self.len());
        for p in 0..panels {
            let lo = a + p as f64 * width;
            let hi = if p + 1 == panels { b } else { lo + width };
            out.extend(self.mapped(lo, hi));
        }
        out
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre with the panel count doubled until two successive
/// results agree to `rel_tol` (relative to `scale` when that is larger than the
/// result itself).
#[allow(clippy::too_many_arguments)]
pub fn integrate_doubling<F>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    start_panels: usize,
    max_panels: usize,
    rel_tol: f64,
    scale: f64,
    mut f: F,
    what: &'static str,
) -> Result<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    let mut panels = start_panels.max(1);
    let mut prev = rule.composite(a, b, panels, &mut f);
    loop {
        panels *= 2;
        let next = rule.composite(a, b, panels, &mut f);
        let change = (next - prev).norm() / next.norm().max(scale).max(f64::MIN_POSITIVE);
        if change <= rel_tol {
            return Ok(next);
        }
        if panels >= max_panels {
            return Err(Error::NonConvergence { what, change });
        }
        prev = next;
    }
}

/// Adaptive bisection with a 16-point rule on each piece, comparing the piece
/// against its two halves.
pub fn integrate_adaptive<F>(a: f64, b: f64, abs_tol: f64, mut f: F) -> Result<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    let rule = GaussLegendre::new(16);
    let whole = rule.integrate(a, b, &mut f);
    let mut worst = 0.0;
    let v = adapt(&rule, a, b, whole, abs_tol, 0, &mut f, &mut worst);
    if worst > abs_tol {
        return Err(Error::NonConvergence {
            what: "adaptive quadrature",
            change: worst,
        });
    }
    Ok(v)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: Complex64,
    tol: f64,
    depth: u32,
    f: &mut F,
    worst: &mut f64,
) -> Complex64
where
    F: FnMut(f64) -> Complex64,
{
    let mid = 0.5 * (a + b);
    let left = rule.integrate(a, mid, &mut *f);
    let right = rule.integrate(mid, b, &mut *f);
    let split = left + right;
    let err = (split - whole).norm();
    if err <= tol || depth >= 40 {
        if err > tol && err > *worst {
            *worst = err;
        }
        return split;
    }
    adapt(rule, a, mid, left, 0.5 * tol, depth + 1, f, worst)
        + adapt(rule, mid, b, right, 0.5 * tol, depth + 1, f, worst)
}

/// Running trapezoid integral of uniformly spaced samples; starts at zero.
pub fn cumulative_trapezoid(values: &[f64], step: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * step * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// `∫ f` over `[lo, hi]` with `n` log-spaced trapezoid points, `0 < lo < hi`.
/// The sliver `[0, lo]` is approximated by `lo f(lo)`.
pub fn log_spaced_integral<F>(lo: f64, hi: f64, n: usize, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (a, b) = (lo.ln(), hi.ln());
    let du = (b - a) / (n - 1) as f64;
    let mut acc = 0.0;
    let mut prev = {
        let t = lo;
        t * f(t)?
    };
    let sliver = prev;
    for i in 1..n {
        let t = if i + 1 == n { hi } else { (a + i as f64 * du).exp() };
        let g = t * f(t)?;
        acc += 0.5 * du * (prev + g);
        prev = g;
    }
    Ok(acc + sliver)
}
