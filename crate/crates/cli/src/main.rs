use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rfsurrogate_cli::{cmd_afs, cmd_baseline, cmd_fit, cmd_loop, cmd_report, CliError, Common, RunConfig};

#[derive(Parser)]
#[command(name = "rfsurrogate", version, about = "Parametric S-parameter surrogates with uncertainty-aware sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Vector-fit a Touchstone file or oracle response.
    Fit(Flags),
    /// Uniform versus uncertainty-aware frequency sampling for vector fitting.
    Afs(Flags),
    /// Run the online learning loop.
    Loop(Flags),
    /// Run the comparison settings at the loop's budget.
    Baseline(Flags),
    /// Join run outputs into comparison tables.
    Report(Flags),
}

#[derive(Args)]
struct Flags {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn common(f: &Flags) -> Result<Common, CliError> {
    let config = match &f.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    Ok(Common::new(config, f.seed, f.out.clone()))
}

fn threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("RF_SURROGATE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("RF_SURROGATE_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    threads()?;
    match cli.command {
        Command::Fit(f) => {
            let m = cmd_fit(&common(&f)?)?;
            println!("rmse_db {}", m.rmse);
        }
        Command::Afs(f) => {
            let c = common(&f)?;
            let rows = cmd_afs(&c)?;
            for r in rows.chunks(2) {
                println!("{} seed {} uniform {:.6e} uaw {:.6e}", r[0].structure, r[0].seed, r[0].rmse(), r[1].rmse());
            }
        }
        Command::Loop(f) => {
            let r = cmd_loop(&common(&f)?)?;
            println!("train_size {} rmse_db {} sim_minutes {}", r.train_geometries, r.metrics.rmse, r.sim_seconds / 60.0);
        }
        Command::Baseline(f) => {
            for r in cmd_baseline(&common(&f)?)? {
                println!("{} rmse_db {}", r.setting, r.metrics.rmse);
            }
        }
        Command::Report(f) => print!("{}", cmd_report(&common(&f)?)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
