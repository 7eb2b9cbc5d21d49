use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use deltaprop::commands::{self, OraclePreset};
use deltaprop::config::{RunConfig, Scale};
use deltaprop::figures::Figure;
use deltaprop::units::UnitSystem;
use deltaprop::verify::Suite;
use deltaprop::{Error, Result};

#[derive(Parser)]
#[command(name = "deltaprop", version, about = "Multilevel atoms crossing delta lasers")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Read and write natural units (ħ = m = 1) instead of SI.
    #[arg(long, global = true)]
    natural_units: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagator matrix entries over the configured (x, x', t) grid.
    Kernel,
    /// Released beam densities.
    Shutter,
    /// Box-state densities.
    Wavepacket,
    /// Stationary reflection and transmission probabilities of the beam.
    Scatter,
    /// Density data of fig3, fig4, fig5 or fig6.
    Figure { which: String },
    /// Invariant suite: specfun, kernels, dynamics, oracle or all.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Grid certification of a preset (fig3, fig6) or of the [oracle] section.
    Oracle {
        #[arg(long)]
        preset: Option<String>,
    },
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Io(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn config(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("this command needs --config PATH".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if cli.natural_units {
        cfg.natural_units = true;
    }
    Ok(cfg)
}

/// `Ok(false)` for a completed run whose checks failed.
fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Kernel => commands::cmd_kernel(&config(cli)?, output(&cli.out)?)?,
        Command::Shutter => commands::cmd_shutter(&config(cli)?, output(&cli.out)?)?,
        Command::Wavepacket => commands::cmd_wavepacket(&config(cli)?, output(&cli.out)?)?,
        Command::Scatter => commands::cmd_scatter(&config(cli)?, output(&cli.out)?)?,
        Command::Figure { which } => commands::cmd_figure(which.parse::<Figure>()?, output(&cli.out)?)?,
        Command::Verify { suite } => return commands::cmd_verify(suite.parse::<Suite>()?, output(&cli.out)?),
        Command::Oracle { preset } => {
            let (scenario, opts, scale) = match preset {
                Some(p) => {
                    let (s, o) = commands::oracle_preset(p.parse::<OraclePreset>()?)?;
                    let units = (!cli.natural_units).then(UnitSystem::rb87_micrometre);
                    (s, o, Scale { units })
                }
                None => {
                    let cfg = config(cli)?;
                    let (s, o) = commands::oracle_from_config(&cfg)?;
                    (s, o, cfg.scale()?)
                }
            };
            let cert = commands::cmd_oracle(&scenario, &opts, &scale, output(&cli.out)?)?;
            eprintln!(
                "extrapolated L2 errors: rho_1 {:.3e}, rho_2 {:.3e}; monotone: {}",
                cert.extrapolated[0],
                cert.extrapolated[1],
                cert.monotone()
            );
            return Ok(cert.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("deltaprop: checks failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("deltaprop: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
