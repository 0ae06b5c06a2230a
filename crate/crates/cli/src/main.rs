use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod manifest;

#[derive(Parser)]
#[command(name = "permlab", version, about = "Exact permanents of random sign matrices")]
struct Cli {
    /// Worker threads for parallel trials (defaults to all cores).
    #[arg(long, global = true, env = "PERMLAB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Permanent (or determinant, or a residue) of one matrix.
    Compute(ComputeArgs),
    /// CSV dump of every leading minor.
    Lattice(LatticeArgs),
    /// Seeded runs of the growth process, one JSON-lines trace per trial.
    Growth(GrowthArgs),
    /// Seeded endgame runs, one JSON line per trial.
    Endgame(EndgameArgs),
    /// Named verification checks.
    Verify(VerifyArgs),
    /// log |Per| and log |Det| over seeded samples, as CSV.
    Ensemble(EnsembleArgs),
    /// Regenerates the pilot calibration fixture.
    Pilot(PilotArgs),
}

#[derive(Args)]
struct MatrixSource {
    /// Matrix file: `n`, then `n` rows of space-separated 1 / -1.
    #[arg(conflicts_with = "random")]
    file: Option<PathBuf>,
    /// Sample an n x n matrix instead of reading one.
    #[arg(long, value_name = "N")]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Naive,
    Ryser,
    Lattice,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    source: MatrixSource,
    #[arg(long, value_enum, default_value = "ryser")]
    engine: Engine,
    /// Print the permanent modulo this number.
    #[arg(long = "mod", value_name = "M")]
    modulus: Option<u64>,
    /// Also print the determinant.
    #[arg(long)]
    det: bool,
    /// Raise the lattice size cap (memory grows as 2^n).
    #[arg(long, value_name = "N")]
    unsafe_max_n: Option<usize>,
}

#[derive(Args)]
struct LatticeArgs {
    #[command(flatten)]
    source: MatrixSource,
    /// Number of rows to expose (defaults to all).
    #[arg(long)]
    rows: Option<usize>,
}

#[derive(Args)]
struct GrowthArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    eps_prime: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    k0: Option<usize>,
    #[arg(long)]
    k1: Option<usize>,
    /// Override the Type I count factor.
    #[arg(long)]
    count_growth: Option<f64>,
    /// Override the Type III threshold factor.
    #[arg(long)]
    lambda_growth: Option<f64>,
    #[arg(long)]
    unsafe_max_n: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EndgameArgs {
    #[arg(long, default_value_t = 18)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    l: usize,
    #[arg(long, default_value_t = 1)]
    lambda: u128,
    /// Disjoint blocks (defaults to as many as fit).
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = 2)]
    t_good: usize,
    #[arg(long, default_value_t = 10)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Mc,
}

#[derive(Args)]
struct VerifyArgs {
    /// `all` or one check name.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Vector length for the anti-concentration check.
    #[arg(long)]
    m: Option<usize>,
    /// Column-set size for the many-children check.
    #[arg(long)]
    i_size: Option<usize>,
    /// Pilot fixture to calibrate against (defaults to the built-in one).
    #[arg(long)]
    pilot: Option<PathBuf>,
    /// JSON-lines report file (defaults to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnsembleArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PilotArgs {
    #[arg(long, default_value_t = permlab::verify::pilot::PILOT_SEED)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Compute(a) => {
            let m = commands::load_matrix(a.source.file.as_deref(), a.source.random, a.source.seed)?;
            let engine = match a.engine {
                Engine::Naive => commands::EngineChoice::Naive,
                Engine::Ryser => commands::EngineChoice::Ryser,
                Engine::Lattice => commands::EngineChoice::Lattice,
            };
            for line in commands::compute(&m, engine, a.modulus, a.det, a.unsafe_max_n)? {
                println!("{line}");
            }
        }
        Command::Lattice(a) => {
            let m = commands::load_matrix(a.source.file.as_deref(), a.source.random, a.source.seed)?;
            print!("{}", commands::lattice_csv(&m, a.rows)?);
        }
        Command::Growth(a) => {
            let mut cfg = permlab::ProcessConfig::new(a.n);
            if a.eps.is_some() || a.eps_prime.is_some() || a.c.is_some() {
                let eps = a.eps.unwrap_or(cfg.eps);
                cfg = permlab::ProcessConfig::with_eps(a.n, eps, a.eps_prime.unwrap_or(eps / 6.0), a.c.unwrap_or(eps));
            }
            cfg.k0 = a.k0.unwrap_or(cfg.k0);
            cfg.k1 = a.k1.unwrap_or(cfg.k1);
            cfg.count_growth = a.count_growth;
            cfg.lambda_growth = a.lambda_growth;
            if let Some(cap) = a.unsafe_max_n {
                cfg.lattice_cap = cap;
            }
            let s = commands::growth(&cfg, a.trials, a.seed, &a.out)?;
            eprintln!("{} of {} runs successful; traces in {}", s.successes, a.trials, a.out.display());
        }
        Command::Endgame(a) => {
            let count = a.count.unwrap_or((a.n.saturating_sub(a.k)) / (2 * a.l.max(1)));
            let setup = permlab::verify::process::EndgameSetup {
                n: a.n,
                k: a.k,
                l: a.l,
                lambda: a.lambda,
                count,
                t_good: a.t_good,
            };
            let ok = commands::endgame(&setup, a.trials, a.seed, &a.out)?;
            eprintln!("first-block path succeeded in {ok} of {} runs", a.trials);
        }
        Command::Verify(a) => {
            let pilot = match &a.pilot {
                Some(p) => serde_json::from_str(&std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)
                    .with_context(|| format!("parsing pilot fixture {}", p.display()))?,
                None => permlab::verify::pilot::committed_pilot(),
            };
            let opts = permlab::verify::suite::SuiteOptions {
                n: a.n,
                trials: a.trials,
                mode: a.mode.map(|m| match m {
                    ModeArg::Exact => permlab::verify::Mode::Exact,
                    ModeArg::Mc => permlab::verify::Mode::MonteCarlo { trials: a.trials.unwrap_or(1000) },
                }),
                m: a.m,
                i_size: a.i_size,
                seed: a.seed,
                pilot: Some(pilot),
            };
            let all_pass = commands::verify(&a.suite, &opts, a.out.as_deref())?;
            return Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Ensemble(a) => {
            commands::ensemble(&a.n_list, a.trials, a.seed, &a.out)?;
        }
        Command::Pilot(a) => {
            let p = permlab::verify::pilot::run_pilot(a.seed)?;
            if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&a.out, serde_json::to_string_pretty(&p)? + "\n")?;
            eprintln!("pilot written to {}", a.out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}
