//! `aahwalk`: runs quantum-walk experiments on the modulated hopping chain.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aah_walk::circuit::export_qasm;
use aah_walk::exact::{spectrum, SectorPropagator};
use aah_walk::experiment::{emit, preset, run_all, sweep_configs, write_atomic, ExperimentConfig, Format, SweepAxis};
use aah_walk::pauli::{hamiltonian, to_matrix};
use aah_walk::{ConfigIssue, Error, Flavor, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "aahwalk",
    version,
    about = "Quantum walks on the interacting off-diagonal AAH chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// paper-literal or exact-jw; overrides the config flavor.
    #[arg(long)]
    flavor: Option<Flavor>,
    /// Worker threads for concurrent runs (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    flavor: Option<Flavor>,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a config once per value of one model parameter.
    Sweep {
        config: PathBuf,
        /// lambda_J, phi_J or V.
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated values; `pi`, `pi/2`, `3pi/4` style terms allowed.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_value)]
        values: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a named scenario preset (fig3 ... fig13).
    Preset {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Print the lowered circuit of a config as OpenQASM 2.0.
    ExportQasm {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the Hamiltonian spectrum as `index,eigenvalue` CSV.
    Spectrum {
        config: PathBuf,
        /// Restrict to this particle number instead of the full space.
        #[arg(long)]
        particles: Option<usize>,
        /// Also print the Pauli decomposition of the Hamiltonian.
        #[arg(long)]
        pauli: bool,
        #[command(flatten)]
        overrides: Overrides,
    },
}

fn parse_value(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    let bad = || format!("'{text}' is not a number or a multiple of pi");
    let Some(at) = t.find("pi") else {
        return t.parse().map_err(|_| bad());
    };
    let (coef, rest) = (&t[..at], &t[at + 2..]);
    let coef = match coef.trim_end_matches('*') {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let den = match rest.strip_prefix('/') {
        Some(d) => d.parse::<f64>().map_err(|_| bad())?,
        None if rest.is_empty() => 1.0,
        None => return Err(bad()),
    };
    Ok(coef * std::f64::consts::PI / den)
}

fn load(path: &Path, seed: Option<u64>, flavor: Option<Flavor>) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(path)?;
    apply(&mut config, seed, flavor);
    config.validate()?;
    Ok(config)
}

fn apply(config: &mut ExperimentConfig, seed: Option<u64>, flavor: Option<Flavor>) {
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(f) = flavor {
        config.model.flavor = f;
    }
}

fn execute(configs: &[ExperimentConfig], common: &Common) -> Result<()> {
    let mut records = run_all(configs, common.workers)?;
    for r in &mut records {
        r.stamp();
    }
    for path in emit(&records, common.format, &common.out)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn deliver(text: &str, out: Option<&Path>, name: &str) -> Result<()> {
    match out {
        None => print!("{text}"),
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io {
                path: dir.to_path_buf(),
                source: e,
            })?;
            let path = dir.join(name);
            write_atomic(&path, text.as_bytes())?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, common } => {
            let c = load(&config, common.seed, common.flavor)?;
            execute(&[c], &common)
        }
        Command::Sweep {
            config,
            axis,
            values,
            common,
        } => {
            let base = load(&config, common.seed, common.flavor)?;
            let configs = sweep_configs(&base, axis, &values)?;
            for c in &configs {
                c.validate()?;
            }
            execute(&configs, &common)
        }
        Command::Preset { name, common } => {
            let mut configs = preset(&name)?;
            for c in &mut configs {
                apply(c, common.seed, common.flavor);
            }
            execute(&configs, &common)
        }
        Command::ExportQasm { config, overrides } => {
            let c = load(&config, overrides.seed, overrides.flavor)?;
            deliver(&export_qasm(&c.circuit()?)?, overrides.out.as_deref(), "circuit.qasm")
        }
        Command::Spectrum {
            config,
            particles,
            pauli,
            overrides,
        } => {
            let c = load(&config, overrides.seed, overrides.flavor)?;
            let h = hamiltonian(&c.model);
            if let Some(n) = particles {
                if n > c.model.sites {
                    return Err(Error::Config(vec![ConfigIssue::new(
                        "particles",
                        format!("{n} particles do not fit on {} sites", c.model.sites),
                    )]));
                }
            }
            let spec = match particles {
                Some(n) => SectorPropagator::new(&h, n)?.spectral().clone(),
                None => spectrum(&to_matrix(&h)?)?,
            };
            deliver(&spec.to_csv(), overrides.out.as_deref(), "spectrum.csv")?;
            if pauli {
                deliver(&h.to_string(), overrides.out.as_deref(), "hamiltonian.txt")?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
