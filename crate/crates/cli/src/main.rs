use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fnell_cli::problem::EXIT_CONFIG;
use fnell_cli::{parse_config_file, run, ConfigErrors, RunError};

/// Fully nonlinear eigenvalue equations on flat tori.
#[derive(Parser)]
#[command(name = "fnell", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for reports and fields.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Certify `u = 0`, run the continuity path and write the report.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Certification and operator property suite only.
        #[arg(long)]
        check_only: bool,
    },
    /// Certify `u = 0` as a C-subsolution at the path's final level.
    Certify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Operator property suite over every operator kind.
    Selftest {
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
    /// ABP contact-set bound on the quadratic case and random wells.
    Abp {
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[arg(long, default_value_t = 50)]
        cases: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version are not errors; everything else is a usage error.
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("fnell: cannot configure {n} threads: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    }
    match dispatch(cli) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("fnell: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<run::Outcome, RunError> {
    let default_out = || cli.output.clone().unwrap_or_else(|| PathBuf::from("fnell_out"));
    match &cli.command {
        Command::Solve { config, check_only } => {
            let mut cfg = parse_config_file(config)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let out = cli.output.clone().or_else(|| cfg.output.as_ref().map(|p| cfg.resolve(p))).unwrap_or_else(default_out);
            run::solve(&cfg, &out, *check_only)
        }
        Command::Certify { config } => {
            let mut cfg = parse_config_file(config)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let out = cli.output.clone().or_else(|| cfg.output.as_ref().map(|p| cfg.resolve(p))).unwrap_or_else(default_out);
            run::certify_only(&cfg, &out)
        }
        Command::Selftest { cases } => run::selftest(cli.seed.unwrap_or(0), *cases, &default_out()),
        Command::Abp { points, cases } => {
            if *points < 8 {
                return Err(RunError::Config(ConfigErrors(vec!["--points must be at least 8".into()])));
            }
            run::abp(cli.seed.unwrap_or(0), *points, *cases, &default_out())
        }
    }
}
