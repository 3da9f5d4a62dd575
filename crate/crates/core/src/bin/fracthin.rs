use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fracthin::experiment::{
    cmd_density, cmd_run, cmd_sweep, cmd_verify, ExperimentConfig, Fault, VerifyLevel,
};
use fracthin::Result;

#[derive(Parser)]
#[command(name = "fracthin", version, about = "Fractional thin-film experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; defaults to the config's output_dir, then `out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = Level::Fast)]
    level: Level,

    /// Worker threads.
    #[arg(long, global = true, env = "FRACTHIN_THREADS")]
    threads: Option<usize>,

    #[arg(long, global = true, hide = true, value_enum)]
    inject_fault: Option<FaultArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write run.csv, snapshots and report.json.
    Run,
    /// Run every point of the [sweep] section and write sweep.csv / sweep.json.
    Sweep,
    /// Run the verification suite and print a JSON verdict.
    Verify,
    /// Evaluate the flatness density of the initial datum.
    Density,
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Fast,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    Eigenvalue,
}

fn load(cli: &Cli) -> Result<(ExperimentConfig, PathBuf)> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| fracthin::Error::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, out))
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

fn write_verdict(out: &Path, text: &str) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| fracthin::Error::Io {
        path: out.to_path_buf(),
        source: e,
    })?;
    let path = out.join("verify.json");
    std::fs::write(&path, format!("{text}\n")).map_err(|e| fracthin::Error::Io { path, source: e })
}

fn main_inner(cli: &Cli) -> Result<bool> {
    let threads = cli.threads.unwrap_or(1).max(1);
    // the global pool may already exist when embedded; the sweep uses its own
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    match cli.command {
        Command::Run => {
            let (cfg, out) = load(cli)?;
            let o = cmd_run(&cfg, &out)?;
            print_json(&o.report);
            Ok(true)
        }
        Command::Sweep => {
            let (cfg, out) = load(cli)?;
            let r = cmd_sweep(&cfg, &out, threads)?;
            let failed = r.rows.iter().filter(|r| r.status != "ok").count();
            eprintln!("{} rows, {failed} failed; see {}", r.rows.len(), out.join("sweep.csv").display());
            Ok(true)
        }
        Command::Verify => {
            let level = match cli.level {
                Level::Fast => VerifyLevel::Fast,
                Level::Full => VerifyLevel::Full,
            };
            let fault = cli.inject_fault.map(|FaultArg::Eigenvalue| Fault::Eigenvalue);
            let report = cmd_verify(level, cli.seed.unwrap_or(0), fault)?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            if let Some(out) = &cli.out {
                write_verdict(out, &text)?;
            }
            println!("{text}");
            Ok(report.passed)
        }
        Command::Density => {
            let (cfg, out) = load(cli)?;
            print_json(&cmd_density(&cfg, &out)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.kind());
            ExitCode::from(2)
        }
    }
}
