use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use cbilliards::bundle::OutputBundle;
use cbilliards::commands::{run_command, Command, CommandError};
use cbilliards::config::{apply_tolerance_overrides, parse_config, Config};
use cbilliards::svg::render_svg;

#[derive(Parser, Debug)]
#[command(
    name = "cbilliards",
    version,
    about = "Periodic orbits, reflectivity probes and invisible bodies for complex billiards"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON configuration file
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Orbit period k
    #[arg(long, value_name = "K")]
    period: Option<usize>,
    /// Number of random starts (or rays for trace-invisible)
    #[arg(long, value_name = "N")]
    seeds: Option<usize>,
    /// Seed of the random generator [default: 0]
    #[arg(long, value_name = "S")]
    rng_seed: Option<u64>,
    /// Write the JSON bundle here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Also render the bundle as SVG
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// JSON object replacing individual tolerances
    #[arg(long, value_name = "JSON")]
    tolerance_overrides: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Multi-start search for k-periodic orbits with a local dimension estimate
    Probe(Common),
    /// Solve for k-periodic orbits from random starts
    Solve(Common),
    /// Search for periodic orbits with isotropic edges
    Chain(Common),
    /// Report which mirrors pass through the isotropic points at infinity
    CheckIsotropicInfinity(Common),
    /// Trace rays through a real body and test invisibility
    TraceInvisible(Common),
    /// Render a previously written bundle
    Render {
        /// Bundle produced by another command
        #[arg(long, value_name = "PATH")]
        bundle: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<CommandError> for Failure {
    fn from(e: CommandError) -> Self {
        match e {
            CommandError::Usage(m) => Failure::Usage(m),
            CommandError::Domain(e) => Failure::Domain(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_config(c: &Common) -> Result<Config, Failure> {
    let mut cfg =
        parse_config(&read(&c.config)?).map_err(|e| Failure::Domain(format!("config: {e}")))?;
    if let Some(t) = &c.tolerance_overrides {
        apply_tolerance_overrides(&mut cfg, t).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let p = &mut cfg.file.params;
    p.period = c.period.or(p.period);
    p.seeds = c.seeds.or(p.seeds);
    p.rng_seed = Some(c.rng_seed.or(p.rng_seed).unwrap_or(0));
    Ok(cfg)
}

fn emit(bundle: &OutputBundle, out: Option<&Path>, svg: Option<&Path>) -> Result<(), Failure> {
    if let Some(path) = svg {
        let doc = match bundle.svg.first() {
            Some(doc) => doc.clone(),
            None => render_svg(bundle).map_err(|e| Failure::Domain(e.to_string()))?,
        };
        write(path, &doc)?;
    }
    let json = bundle.to_json();
    match out {
        Some(path) => write(path, &json),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (cmd, common) = match cli.command {
        Cmd::Probe(c) => (Command::Probe, c),
        Cmd::Solve(c) => (Command::Solve, c),
        Cmd::Chain(c) => (Command::Chain, c),
        Cmd::CheckIsotropicInfinity(c) => (Command::CheckIsotropicInfinity, c),
        Cmd::TraceInvisible(c) => (Command::TraceInvisible, c),
        Cmd::Render { bundle, out, svg } => {
            let text = String::from_utf8(read(&bundle)?)
                .map_err(|_| Failure::Domain(format!("{} is not UTF-8", bundle.display())))?;
            let input = OutputBundle::from_json(&text)
                .map_err(|e| Failure::Domain(format!("bundle: {e}")))?;
            let result = run_command(&Command::Render(Box::new(input)), None)?;
            return emit(&result, out.as_deref(), svg.as_deref());
        }
    };
    let cfg = load_config(&common)?;
    let bundle = run_command(&cmd, Some(&cfg))?;
    emit(&bundle, common.out.as_deref(), common.svg.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
