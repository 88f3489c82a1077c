//! `ghf`: minimize the UHF energy of an integral file.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use rayon::prelude::*;

use grassmann_hf::formats::load_integrals;
use grassmann_hf::guess::GuessMode;
use grassmann_hf::run::{run, RunConfig};
use grassmann_hf::solvers::SolverRegistry;

/// Exit code for unreadable input or bad arguments.
const EXIT_USAGE: u8 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "ghf",
    version,
    about = "Riemannian UHF optimization on products of Grassmannians"
)]
struct Cli {
    /// Integral file (GFI 1). Omit when using --batch.
    input: Option<PathBuf>,

    /// rgd, rcg-fr, rcg-pr, rnr, hybrid, nrlm or scf
    #[arg(long, default_value = "hybrid")]
    algorithm: String,

    /// Constant step for rgd, rcg-* and the CG phase of hybrid [default: per algorithm]
    #[arg(long)]
    step_size: Option<f64>,

    /// [default: 1000 rgd, 300 rcg-* and hybrid, 50 otherwise]
    #[arg(long)]
    max_iter: Option<usize>,

    #[arg(long, default_value_t = 1e-8)]
    tol_grad: f64,

    #[arg(long, default_value_t = 1e-10)]
    tol_val: f64,

    /// Gradient norm at which hybrid switches from CG to Newton
    #[arg(long, default_value_t = 1e-3)]
    switch_grad_tol: f64,

    /// DIIS history length for scf; 0 disables DIIS
    #[arg(long, default_value_t = 2)]
    diis_window: usize,

    /// core, random or file:<path>
    #[arg(long, default_value = "core")]
    guess: GuessMode,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Trace CSV path (single run) or output directory (batch)
    #[arg(long)]
    trace: Option<PathBuf>,

    /// Report path (single run) or output directory (batch). The report is
    /// always printed to stdout in single-run mode.
    #[arg(long)]
    report: Option<PathBuf>,

    /// Write the final orbitals (GFO 1) to this path
    #[arg(long, conflicts_with = "batch")]
    save_orbitals: Option<PathBuf>,

    /// Run every *.gfi file in this directory, one file per worker
    #[arg(long, conflicts_with = "input")]
    batch: Option<PathBuf>,

    /// Print the registered algorithm names and exit
    #[arg(long)]
    list_algorithms: bool,
}

impl Cli {
    fn config(&self) -> RunConfig {
        RunConfig {
            algorithm: self.algorithm.clone(),
            step_size: self.step_size,
            max_iter: self.max_iter,
            tol_grad: self.tol_grad,
            tol_val: self.tol_val,
            switch_grad_tol: self.switch_grad_tol,
            diis_window: self.diis_window,
            guess: self.guess.clone(),
            seed: self.seed,
            trace_path: None,
            report_path: None,
            orbitals_path: None,
        }
    }
}

fn run_single(cli: &Cli, input: &Path, registry: &SolverRegistry) -> Result<u8> {
    let ints = load_integrals(input).with_context(|| format!("reading {}", input.display()))?;
    let config = RunConfig {
        trace_path: cli.trace.clone(),
        report_path: cli.report.clone(),
        orbitals_path: cli.save_orbitals.clone(),
        ..cli.config()
    };
    let outcome = run(&config, &ints, registry)?;
    print!("{}", outcome.report.to_text());
    Ok(outcome.report.exit_code() as u8)
}

fn batch_inputs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "gfi"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no .gfi files in {}", dir.display());
    }
    Ok(files)
}

/// Runs each file independently and writes `<stem>.report.txt` and
/// `<stem>.trace.csv`. Returns the worst exit code.
fn run_batch(cli: &Cli, dir: &Path, registry: &SolverRegistry) -> Result<u8> {
    let files = batch_inputs(dir)?;
    let report_dir = cli.report.clone().unwrap_or_else(|| dir.to_path_buf());
    let trace_dir = cli.trace.clone().unwrap_or_else(|| dir.to_path_buf());
    for d in [&report_dir, &trace_dir] {
        std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    let results: Vec<(PathBuf, Result<(String, u8)>)> = files
        .par_iter()
        .map(|path| {
            let stem = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let res = (|| {
                let ints = load_integrals(path).with_context(|| format!("reading {}", path.display()))?;
                let config = RunConfig {
                    trace_path: Some(trace_dir.join(format!("{stem}.trace.csv"))),
                    report_path: Some(report_dir.join(format!("{stem}.report.txt"))),
                    ..cli.config()
                };
                let out = run(&config, &ints, registry)?;
                let r = &out.report;
                let line = format!(
                    "{stem}: status={} energy={:.12} iterations={} grad_norm={:.3e}",
                    r.status, r.final_energy, r.iterations, r.final_grad_norm
                );
                Ok((line, r.exit_code() as u8))
            })();
            (path.clone(), res)
        })
        .collect();

    let mut worst = 0;
    for (path, res) in results {
        match res {
            Ok((line, code)) => {
                println!("{line}");
                worst = worst.max(code);
            }
            Err(e) => {
                eprintln!("{}: error: {e:#}", path.display());
                worst = worst.max(EXIT_USAGE);
            }
        }
    }
    Ok(worst)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let registry = SolverRegistry::with_defaults();
    if cli.list_algorithms {
        for name in registry.names() {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    let result = match (&cli.batch, &cli.input) {
        (Some(dir), _) => run_batch(&cli, dir, &registry),
        (None, Some(input)) => run_single(&cli, input, &registry),
        (None, None) => Err(anyhow::anyhow!("need an integral file or --batch <dir>")),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
