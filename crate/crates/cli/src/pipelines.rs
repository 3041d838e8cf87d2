//! One pipeline per [`Mode`]. Each turns a configuration into a [`Table`].

use deltasink_core::closedform::{
    asymptotic_phi_gaussian_terms, boundary_amplitude_quantum, boundary_amplitude_quantum_gaussian,
    boundary_density_diffusion, gaussian_norm_factor, log_sweep, scattering_from_strength, survival_diffusion_exact,
};
use deltasink_core::oracle::{evolve_diffusion, evolve_schrodinger, RunOptions};
use deltasink_core::survival::{
    diffusion_tail_mass, fit_tail, stop_at_vanishing, survival_diffusion, survival_quantum, vanishing_time_estimate,
};
use deltasink_core::volterra::{solve_diffusion_boundary, solve_quantum_boundary};
use deltasink_core::{AmplitudeSeries, Complex64, DiffusionParams, Error, QuantumParams, SeriesKind, TimeGrid};

use crate::config::{ExperimentConfig, Mode};
use crate::output::Table;
use crate::CliError;

/// Longest table written; longer series are thinned to every k-th sample.
pub const MAX_ROWS: usize = 10_000;

/// Wall guard of Schrödinger grid runs. The Crank–Nicolson delta radiates
/// slowly decaying tails, so the default `1e-8` cannot be met in a box of
/// desk size.
pub const SCHRODINGER_LEAKAGE_TOLERANCE: f64 = 1e-2;

/// Gauss–Legendre nodes per panel for the Gaussian-packet closed form.
const QUADRATURE_NODES: usize = 64;

pub fn run(config: &ExperimentConfig) -> Result<Table, CliError> {
    match config.mode()? {
        Mode::DiffusionBoundary => diffusion_boundary(config),
        Mode::QuantumBoundary => quantum_boundary(config),
        Mode::SurvivalDiffusion => survival_diffusion_mode(config),
        Mode::SurvivalQuantum => survival_quantum_mode(config),
        Mode::OracleDiffusion => oracle_diffusion(config),
        Mode::OracleQuantum => oracle_quantum(config),
        Mode::Scattering => scattering(config),
        Mode::Asymptotics => asymptotics(config),
    }
}

fn stride(n: usize) -> usize {
    n.div_ceil(MAX_ROWS).max(1)
}

/// Indices kept in a table of `n` samples; the last one is always kept.
fn kept(n: usize) -> impl Iterator<Item = usize> {
    let k = stride(n);
    (0..n).filter(move |&i| i % k == 0 || i + 1 == n)
}

/// Grid from `0` with the step of the configured window, covering `t_max`.
fn grid_from_zero(config: &ExperimentConfig) -> Result<TimeGrid, CliError> {
    let h = config.step()?;
    let n = (config.t_max / h).round() as usize;
    Ok(TimeGrid::new(0.0, h, n + 1)?)
}

fn in_window(t: f64, config: &ExperimentConfig) -> bool {
    t >= config.t_start * (1.0 - 1e-12)
}

/// `p(0, τ)` by the integral equation. A source away from the origin is solved
/// from `τ = 0`; a source on the absorber is spliced at `t_start`.
pub fn diffusion_boundary_series(d: &DiffusionParams, config: &ExperimentConfig) -> Result<AmplitudeSeries, CliError> {
    let grid = if d.source() != 0.0 {
        grid_from_zero(config)?
    } else {
        config.window()?
    };
    Ok(solve_diffusion_boundary(d, grid)?)
}

/// `φ(t)` by the integral equation on the configured window. A window
/// starting after `t = 0` takes the memory of `[0, t_start]` from the closed
/// form; point sources require this.
pub fn quantum_boundary_series(q: &QuantumParams, config: &ExperimentConfig) -> Result<AmplitudeSeries, CliError> {
    Ok(solve_quantum_boundary(q, config.window()?)?)
}

fn quantum_closed_form(t: f64, q: &QuantumParams) -> Result<Complex64, Error> {
    if q.is_point_source() {
        boundary_amplitude_quantum(t, q)
    } else {
        boundary_amplitude_quantum_gaussian(t, q, QUADRATURE_NODES)
    }
}

fn diffusion_boundary(config: &ExperimentConfig) -> Result<Table, CliError> {
    let d = config.diffusion_params()?;
    let series = diffusion_boundary_series(&d, config)?;
    let mut table = Table::new(&["tau", "p_closed", "p_volterra", "rel_err"]);
    let mut worst = 0.0f64;
    let times: Vec<usize> = (0..series.len())
        .filter(|&i| in_window(series.grid().time(i), config))
        .collect();
    let k = stride(times.len());
    for (j, &i) in times.iter().enumerate() {
        let tau = series.grid().time(i);
        let exact = boundary_density_diffusion(tau, &d)?;
        let p = series.values()[i].re;
        let err = if exact != 0.0 {
            ((p - exact) / exact).abs()
        } else {
            p.abs()
        };
        worst = worst.max(err);
        if j % k == 0 || j + 1 == times.len() {
            table.push(vec![tau, exact, p, err]);
        }
    }
    table.trail("max_rel_err", worst);
    Ok(table)
}

fn quantum_boundary(config: &ExperimentConfig) -> Result<Table, CliError> {
    let q = config.quantum_params()?;
    let series = quantum_boundary_series(&q, config)?;
    let mut table = Table::new(&["t", "re_phi", "im_phi", "re_closed", "im_closed", "rel_err"]);
    let times: Vec<usize> = (0..series.len())
        .filter(|&i| in_window(series.grid().time(i), config))
        .collect();
    let k = stride(times.len());
    let mut worst = 0.0f64;
    for (j, &i) in times.iter().enumerate() {
        if j % k != 0 && j + 1 != times.len() {
            continue;
        }
        let t = series.grid().time(i);
        let phi = series.values()[i];
        let exact = if t == 0.0 { phi } else { quantum_closed_form(t, &q)? };
        let err = (phi - exact).norm() / exact.norm().max(f64::MIN_POSITIVE);
        worst = worst.max(err);
        table.push(vec![t, phi.re, phi.im, exact.re, exact.im, err]);
    }
    table.trail("max_rel_err", worst);
    Ok(table)
}

/// Survival of killed diffusion from the closed-form boundary density on the
/// configured window. Long windows make the integral equation impractical, so
/// this mode samples the closed form.
fn survival_diffusion_mode(config: &ExperimentConfig) -> Result<Table, CliError> {
    let d = config.diffusion_params()?;
    let grid = config.window()?;
    let series = AmplitudeSeries::sample(grid, SeriesKind::DiffusionDensity, |tau| {
        Ok(Complex64::new(boundary_density_diffusion(tau, &d)?, 0.0))
    })?;
    let curve = survival_diffusion(&series, &d)?;
    let mut table = Table::new(&["tau", "p", "S", "S_exact"]);
    for i in kept(series.len()) {
        let tau = grid.time(i);
        table.push(vec![
            tau,
            series.values()[i].re,
            curve.values()[i],
            survival_diffusion_exact(tau, &d)?,
        ]);
    }
    let absorbed = 1.0 - curve.last();
    let tail = if d.killing() > 0.0 {
        diffusion_tail_mass(grid.end(), &d)?
    } else {
        0.0
    };
    table.trail("absorbed", absorbed);
    table.trail("tail_mass", tail);
    table.trail("absorbed_plus_tail", absorbed + tail);
    if let Some(c) = curve.tail_coefficient {
        table.trail("tail_c", c);
    }
    Ok(table)
}

fn survival_quantum_mode(config: &ExperimentConfig) -> Result<Table, CliError> {
    let q = config.quantum_params()?;
    let series = quantum_boundary_series(&q, config)?;
    let mut curve = survival_quantum(&series, &q, config.normalize)?;
    let scale = curve.amplitude_scale.sqrt();
    let mut table = Table::new(&["t", "re_phi", "im_phi", "abs2_phi", "S"]);
    let window = (config.t_max / 100.0, config.t_max);
    let tail = fit_tail(&series, window)?;
    let vanishing = vanishing_time_estimate(&curve, &tail);
    match &vanishing {
        Ok(v) => stop_at_vanishing(&mut curve, v),
        Err(Error::NoVanishing(why)) => table.notes.push(format!(
            "no finite vanishing time: {why} (fitted exponent {:.4})",
            tail.exponent
        )),
        Err(e) => return Err(e.clone().into()),
    }
    for i in kept(curve.len()) {
        let phi = series.values()[i] * scale;
        table.push(vec![
            series.grid().time(i),
            phi.re,
            phi.im,
            phi.norm_sqr(),
            curve.values()[i],
        ]);
    }
    table.trail("tail_c", tail.coefficient * curve.amplitude_scale);
    table.trail("tail_exponent", tail.exponent);
    match vanishing {
        Ok(v) => {
            table.trail("T_star", v.time);
            table.trail_text("T_star_extrapolated_flag", if v.extrapolated { "1" } else { "0" });
        }
        Err(_) => {
            table.trail_text("T_star", "none");
            table.trail_text("T_star_extrapolated_flag", "none");
        }
    }
    Ok(table)
}

/// Oracle runs start from the initial data at `t = 0` and cover `[0, t_max]`
/// with `steps` steps; `t_start` is not used.
fn oracle_grid(config: &ExperimentConfig) -> Result<TimeGrid, CliError> {
    TimeGrid::spanning(0.0, config.t_max, config.steps).map_err(CliError::from_config)
}

fn oracle_diffusion(config: &ExperimentConfig) -> Result<Table, CliError> {
    let d = config.diffusion_params()?;
    let grid = oracle_grid(config)?;
    let evo = evolve_diffusion(
        &d,
        config.spatial_grid()?,
        grid,
        config.initial_width,
        &RunOptions::default(),
    )?;
    let mut table = Table::new(&["t", "p_grid", "p_closed", "S_grid", "S_exact"]);
    for i in kept(grid.len()) {
        let t = grid.time(i);
        let tau = d.diffusion() * t;
        let (p, s) = if tau > 0.0 {
            (boundary_density_diffusion(tau, &d)?, survival_diffusion_exact(tau, &d)?)
        } else {
            (0.0, 1.0)
        };
        table.push(vec![t, evo.center.values()[i].re, p, evo.survival.values()[i], s]);
    }
    table.trail("wall_ratio", evo.wall_ratio);
    Ok(table)
}

fn oracle_quantum(config: &ExperimentConfig) -> Result<Table, CliError> {
    let q = config.quantum_params()?;
    let grid = oracle_grid(config)?;
    let opts = RunOptions {
        leakage_tolerance: SCHRODINGER_LEAKAGE_TOLERANCE,
        ..RunOptions::default()
    };
    let evo = evolve_schrodinger(&q, config.spatial_grid()?, grid, &opts)?;
    let series = solve_quantum_boundary(&q, grid)?;
    let curve = survival_quantum(&series, &q, true)?;
    let c = gaussian_norm_factor(&q)?;
    let mut table = Table::new(&["t", "abs_psi0_grid", "abs_phi", "S_grid", "S"]);
    let mut worst = 0.0f64;
    for i in 0..grid.len() {
        worst = worst.max((evo.survival.values()[i] - curve.values()[i]).abs());
    }
    for i in kept(grid.len()) {
        table.push(vec![
            grid.time(i),
            evo.center.values()[i].norm(),
            c * series.values()[i].norm(),
            evo.survival.values()[i],
            curve.values()[i],
        ]);
    }
    table.trail("max_abs_S_diff", worst);
    table.trail("wall_ratio", evo.wall_ratio);
    Ok(table)
}

/// Plane-wave scattering over `steps + 1` log-spaced strengths in `[u_min, u_max]`.
fn scattering(config: &ExperimentConfig) -> Result<Table, CliError> {
    if !(config.u_min > 0.0 && config.u_max > config.u_min && config.u_max.is_finite()) {
        return Err(CliError::Config("need 0 < u-min < u-max".into()));
    }
    let mut table = Table::new(&["u", "abs_r2", "abs_t2", "absorbed"]);
    let (mut best, mut best_u) = (f64::NEG_INFINITY, 0.0);
    for u in log_sweep(config.u_min, config.u_max, config.steps + 1) {
        let s = scattering_from_strength(u);
        if s.absorbed_fraction > best {
            best = s.absorbed_fraction;
            best_u = u;
        }
        table.push(vec![
            u,
            s.reflection.norm_sqr(),
            s.transmission.norm_sqr(),
            s.absorbed_fraction,
        ]);
    }
    table.trail("max_absorbed", best);
    table.trail("u_at_max", best_u);
    Ok(table)
}

/// Two-term large-`t` expansion of `φ` against the closed form.
fn asymptotics(config: &ExperimentConfig) -> Result<Table, CliError> {
    let q = config.quantum_params()?;
    let grid = config.window()?;
    let mut table = Table::new(&[
        "t",
        "re_exact",
        "im_exact",
        "re_asym",
        "im_asym",
        "re_second",
        "im_second",
        "modulus_ratio",
    ]);
    for i in kept(grid.len()) {
        let t = grid.time(i);
        let exact = quantum_closed_form(t, &q)?;
        let (asym, second) = asymptotic_phi_gaussian_terms(t, &q)?;
        table.push(vec![
            t,
            exact.re,
            exact.im,
            asym.re,
            asym.im,
            second.re,
            second.im,
            asym.norm() / exact.norm(),
        ]);
    }
    Ok(table)
}
