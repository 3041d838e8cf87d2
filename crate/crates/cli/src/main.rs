use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use deltasink_cli::{preset, run, write_csv, CliError, ExperimentConfig, Mode};

/// Boundary amplitudes and survival with an imaginary delta potential.
///
/// Settings are applied in the order preset, config file, flags; later ones win.
#[derive(Debug, Parser)]
#[command(name = "deltasink", version)]
struct Args {
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    preset: Option<String>,
    /// Flat `key=value` file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dee: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    hbar: Option<f64>,
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    t_start: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// on or off.
    #[arg(long)]
    normalize: Option<String>,
    #[arg(long)]
    grid_half_width: Option<f64>,
    #[arg(long)]
    grid_nodes: Option<usize>,
    #[arg(long)]
    initial_width: Option<f64>,
    #[arg(long)]
    u_min: Option<f64>,
    #[arg(long)]
    u_max: Option<f64>,
}

fn build(args: Args) -> Result<ExperimentConfig, CliError> {
    let mut c = match &args.preset {
        Some(name) => preset(name)?,
        None => ExperimentConfig::default(),
    };
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        c.apply_file(&text)?;
    }
    macro_rules! over {
        ($($f:ident),*) => { $(if let Some(v) = args.$f { c.$f = v; })* };
    }
    over!(
        dee,
        kappa,
        x0,
        hbar,
        mass,
        k,
        a,
        t_start,
        t_max,
        steps,
        grid_half_width,
        grid_nodes,
        initial_width,
        u_min,
        u_max
    );
    if let Some(m) = args.mode {
        c.mode = Some(m);
    }
    if let Some(v) = &args.normalize {
        c.normalize = deltasink_cli::config::parse_flag("normalize", v)?;
    }
    if let Some(p) = args.out {
        c.out = Some(p);
    }
    Ok(c)
}

fn execute(args: Args) -> Result<Vec<String>, CliError> {
    let config = build(args)?;
    let table = run(&config)?;
    match &config.out {
        Some(path) => write_csv(BufWriter::new(File::create(path)?), &config, &table)?,
        None => write_csv(io::stdout().lock(), &config, &table)?,
    }
    Ok(table.notes)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(args) {
        Ok(notes) => {
            for n in notes {
                eprintln!("deltasink: note: {n}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("deltasink: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
