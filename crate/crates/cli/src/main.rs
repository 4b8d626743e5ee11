use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use logcons_cli::{
    cmd_analyze, cmd_simulate, cmd_synthesize, CliError, Mode, RuleFile, ScenarioConfig, EXIT_USAGE,
};

/// Analyze, synthesize and simulate logical consensus networks.
///
/// Log verbosity is read from `LOGCONS_LOG` (e.g. `LOGCONS_LOG=debug`).
#[derive(Parser)]
#[command(name = "logcons", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report reachability of every input.
    Analyze { config: PathBuf },
    /// Write consensus update rules for every input.
    Synthesize {
        #[arg(long, value_enum)]
        mode: ModeArg,
        config: PathBuf,
        /// Output rule file (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the network and write the trace as CSV.
    Simulate {
        config: PathBuf,
        rules: PathBuf,
        /// Output CSV file (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Linear,
    Robust,
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io {
            path: p.display().to_string(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Analyze { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            let out = cmd_analyze(&cfg)?;
            print!("{}", out.text);
            Ok(out.code)
        }
        Command::Synthesize {
            mode,
            config,
            output,
        } => {
            let cfg = ScenarioConfig::load(&config)?;
            let mode = match mode {
                ModeArg::Linear => Mode::Linear,
                ModeArg::Robust => Mode::Robust,
            };
            let text = cmd_synthesize(&cfg, mode)?;
            write_out(output.as_deref(), &text)?;
            Ok(0)
        }
        Command::Simulate {
            config,
            rules,
            output,
        } => {
            let cfg = ScenarioConfig::load(&config)?;
            let rf = RuleFile::parse(&read(&rules)?)?;
            let out = cmd_simulate(&cfg, &rf)?;
            write_out(output.as_deref(), &out.csv)?;
            if output.is_some() {
                println!("{}", out.summary);
            } else {
                eprintln!("{}", out.summary);
            }
            Ok(out.code)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LOGCONS_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
