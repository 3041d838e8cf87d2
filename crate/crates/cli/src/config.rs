//! Experiment configuration: presets, `key=value` files and flag overrides.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use deltasink_core::oracle::SpatialGrid;
use deltasink_core::{DiffusionParams, QuantumParams, TimeGrid};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    DiffusionBoundary,
    QuantumBoundary,
    SurvivalDiffusion,
    SurvivalQuantum,
    OracleDiffusion,
    OracleQuantum,
    Scattering,
    Asymptotics,
}

impl Mode {
    pub const ALL: [Mode; 8] = [
        Mode::DiffusionBoundary,
        Mode::QuantumBoundary,
        Mode::SurvivalDiffusion,
        Mode::SurvivalQuantum,
        Mode::OracleDiffusion,
        Mode::OracleQuantum,
        Mode::Scattering,
        Mode::Asymptotics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::DiffusionBoundary => "diffusion-boundary",
            Mode::QuantumBoundary => "quantum-boundary",
            Mode::SurvivalDiffusion => "survival-diffusion",
            Mode::SurvivalQuantum => "survival-quantum",
            Mode::OracleDiffusion => "oracle-diffusion",
            Mode::OracleQuantum => "oracle-quantum",
            Mode::Scattering => "scattering",
            Mode::Asymptotics => "asymptotics",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown mode `{s}`")))
    }
}

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 4] = [
    "paper-diffusion",
    "paper-quantum",
    "paper-asymptotics",
    "oracle-cross-check",
];

/// Every knob of an experiment. Time windows are `[t_start, t_max]` split into
/// `steps` intervals; diffusion times are in `τ = D t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub preset: Option<String>,
    pub dee: f64,
    pub kappa: f64,
    pub x0: f64,
    pub hbar: f64,
    pub mass: f64,
    pub k: f64,
    pub a: f64,
    pub t_start: f64,
    pub t_max: f64,
    pub steps: usize,
    pub normalize: bool,
    pub grid_half_width: f64,
    pub grid_nodes: usize,
    pub initial_width: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: None,
            preset: None,
            dee: 1.0,
            kappa: 1.0,
            x0: 1.0,
            hbar: 1.0,
            mass: 1.0,
            k: 1.0,
            a: 0.0,
            t_start: 1e-3,
            t_max: 10.0,
            steps: 10_000,
            normalize: true,
            grid_half_width: 40.0,
            grid_nodes: 8001,
            initial_width: 0.02,
            u_min: 0.01,
            u_max: 100.0,
            out: None,
        }
    }
}

/// The configurations behind the acceptance suite.
pub fn preset(name: &str) -> Result<ExperimentConfig, CliError> {
    let base = ExperimentConfig {
        preset: Some(name.to_string()),
        ..ExperimentConfig::default()
    };
    let quantum = ExperimentConfig {
        hbar: 1.0,
        mass: 1.0,
        k: 1.0,
        x0: 1.0,
        a: 0.5,
        normalize: true,
        ..base.clone()
    };
    match name {
        "paper-diffusion" => Ok(ExperimentConfig {
            mode: Some(Mode::SurvivalDiffusion),
            dee: 1.0,
            kappa: 1.0,
            x0: 1.0,
            t_start: 1e-3,
            t_max: 1e4,
            steps: 1_000_000,
            ..base
        }),
        "paper-quantum" => Ok(ExperimentConfig {
            mode: Some(Mode::SurvivalQuantum),
            t_start: 10.0,
            t_max: 1e4,
            steps: 19_980,
            ..quantum
        }),
        "paper-asymptotics" => Ok(ExperimentConfig {
            mode: Some(Mode::Asymptotics),
            t_start: 10.0,
            t_max: 1e4,
            steps: 999,
            ..quantum
        }),
        "oracle-cross-check" => Ok(ExperimentConfig {
            mode: Some(Mode::OracleQuantum),
            t_start: 0.0,
            t_max: 10.0,
            steps: 10_000,
            grid_half_width: 130.0,
            grid_nodes: 13_001,
            ..quantum
        }),
        _ => Err(CliError::Config(format!(
            "unknown preset `{name}` (expected one of {})",
            PRESETS.join(", ")
        ))),
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("cannot parse `{value}` for `{key}`")))
}

pub fn parse_flag(key: &str, value: &str) -> Result<bool, CliError> {
    match value.trim() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::Config(format!("`{key}` expects on/off, got `{value}`"))),
    }
}

impl ExperimentConfig {
    /// Sets one knob; keys may use `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim().replace('_', "-");
        match key.as_str() {
            "mode" => self.mode = Some(value.trim().parse()?),
            "preset" => {
                let keep_out = self.out.take();
                *self = preset(value.trim())?;
                self.out = keep_out;
            }
            "dee" => self.dee = parse(&key, value)?,
            "kappa" => self.kappa = parse(&key, value)?,
            "x0" => self.x0 = parse(&key, value)?,
            "hbar" => self.hbar = parse(&key, value)?,
            "mass" => self.mass = parse(&key, value)?,
            "k" => self.k = parse(&key, value)?,
            "a" => self.a = parse(&key, value)?,
            "t-start" => self.t_start = parse(&key, value)?,
            "t-max" => self.t_max = parse(&key, value)?,
            "steps" => self.steps = parse(&key, value)?,
            "normalize" => self.normalize = parse_flag(&key, value)?,
            "grid-half-width" => self.grid_half_width = parse(&key, value)?,
            "grid-nodes" => self.grid_nodes = parse(&key, value)?,
            "initial-width" => self.initial_width = parse(&key, value)?,
            "u-min" => self.u_min = parse(&key, value)?,
            "u-max" => self.u_max = parse(&key, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a `key=value` file. Blank lines and `#` comments are skipped;
    /// a `preset` line resets everything set before it.
    pub fn apply_file(&mut self, text: &str) -> Result<(), CliError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", n + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn mode(&self) -> Result<Mode, CliError> {
        self.mode.ok_or_else(|| CliError::Config("no mode given".into()))
    }

    pub fn diffusion_params(&self) -> Result<DiffusionParams, CliError> {
        DiffusionParams::new(self.dee, self.kappa, self.x0).map_err(CliError::from_config)
    }

    pub fn quantum_params(&self) -> Result<QuantumParams, CliError> {
        QuantumParams::new(self.hbar, self.mass, self.k, self.x0, self.a).map_err(CliError::from_config)
    }

    /// `[t_start, t_max]` in `steps` intervals.
    pub fn window(&self) -> Result<TimeGrid, CliError> {
        if self.t_max.partial_cmp(&self.t_start) != Some(std::cmp::Ordering::Greater) {
            return Err(CliError::Config("t-max must exceed t-start".into()));
        }
        TimeGrid::spanning(self.t_start, self.t_max, self.steps).map_err(CliError::from_config)
    }

    /// Step of [`window`](Self::window).
    pub fn step(&self) -> Result<f64, CliError> {
        Ok(self.window()?.step())
    }

    pub fn spatial_grid(&self) -> Result<SpatialGrid, CliError> {
        SpatialGrid::new(self.grid_half_width, self.grid_nodes).map_err(CliError::from_config)
    }

    /// `key=value` pairs that reproduce this configuration.
    pub fn describe(&self) -> String {
        let mut s = format!(
            "mode={} dee={} kappa={} x0={} hbar={} mass={} k={} a={} t-start={} t-max={} steps={} normalize={} \
             grid-half-width={} grid-nodes={} initial-width={} u-min={} u-max={}",
            self.mode.map_or("none", Mode::name),
            self.dee,
            self.kappa,
            self.x0,
            self.hbar,
            self.mass,
            self.k,
            self.a,
            self.t_start,
            self.t_max,
            self.steps,
            if self.normalize { "on" } else { "off" },
            self.grid_half_width,
            self.grid_nodes,
            self.initial_width,
            self.u_min,
            self.u_max,
        );
        if let Some(p) = &self.preset {
            s.push_str(&format!(" preset={p}"));
        }
        s
    }

    /// Parses the output of [`describe`](Self::describe).
    pub fn from_description(text: &str) -> Result<Self, CliError> {
        let mut cfg = ExperimentConfig::default();
        let mut preset = None;
        for token in text.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("malformed token `{token}`")))?;
            match key {
                "preset" => preset = Some(value.to_string()),
                "mode" if value == "none" => cfg.mode = None,
                _ => cfg.set(key, value)?,
            }
        }
        cfg.preset = preset;
        Ok(cfg)
    }
}
