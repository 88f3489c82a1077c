//! One configured optimization of one integral set, with its trace and
//! report files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use crate::formats;
use crate::guess::{make_guess, GuessError, GuessMode};
use crate::hf::{electronic_energy, energy, IntegralSet, SpinPair};
use crate::optim::{CostModel, OptTrace, Status, StopCriteria};
use crate::solvers::{SolverParams, SolverRegistry};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algorithm: String,
    /// `None` uses the algorithm's default.
    pub step_size: Option<f64>,
    /// `None` uses the algorithm's default.
    pub max_iter: Option<usize>,
    pub tol_grad: f64,
    pub tol_val: f64,
    pub switch_grad_tol: f64,
    pub diis_window: usize,
    pub guess: GuessMode,
    pub seed: u64,
    pub trace_path: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
    pub orbitals_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            algorithm: "hybrid".into(),
            step_size: None,
            max_iter: None,
            tol_grad: 1e-8,
            tol_val: 1e-10,
            switch_grad_tol: 1e-3,
            diis_window: 2,
            guess: GuessMode::Core,
            seed: 0,
            trace_path: None,
            report_path: None,
            orbitals_path: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("unknown algorithm `{name}`; available: {available}")]
    UnknownAlgorithm { name: String, available: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Guess(#[from] GuessError),
    #[error("{path}: {source}")]
    Write { path: String, source: std::io::Error },
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub final_energy: f64,
    pub electronic_energy: f64,
    pub iterations: usize,
    /// Riemannian gradient norm at the returned point, computed after the run.
    pub final_grad_norm: f64,
    pub status: Status,
    pub switch_iteration: Option<usize>,
    pub message: Option<String>,
    pub algorithm: String,
    pub step_size: Option<f64>,
    pub max_iter: usize,
    pub config: RunConfig,
    pub wall_time: f64,
}

impl RunReport {
    /// 0 when converged, 2 when out of iterations, 3 on numerical failure.
    pub fn exit_code(&self) -> i32 {
        status_exit_code(self.status)
    }

    /// `key = value` lines in a fixed order.
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let opt = |v: Option<String>| v.unwrap_or_else(|| "none".into());
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
        kv("final_energy", format!("{:.17e}", self.final_energy));
        kv("electronic_energy", format!("{:.17e}", self.electronic_energy));
        kv("iterations", self.iterations.to_string());
        kv("final_grad_norm", format!("{:.17e}", self.final_grad_norm));
        kv("status", self.status.to_string());
        kv("switch_iteration", opt(self.switch_iteration.map(|k| k.to_string())));
        kv("message", opt(self.message.clone()));
        kv("algorithm", self.algorithm.clone());
        kv("step_size", opt(self.step_size.map(|t| t.to_string())));
        kv("max_iter", self.max_iter.to_string());
        kv("tol_grad", format!("{:e}", c.tol_grad));
        kv("tol_val", format!("{:e}", c.tol_val));
        kv("switch_grad_tol", format!("{:e}", c.switch_grad_tol));
        kv("diis_window", c.diis_window.to_string());
        kv("guess", c.guess.to_string());
        kv("seed", c.seed.to_string());
        kv("wall_time_s", format!("{:.6}", self.wall_time));
        out
    }
}

pub fn status_exit_code(status: Status) -> i32 {
    match status {
        Status::ConvergedGrad | Status::ConvergedVal => 0,
        Status::MaxIter => 2,
        Status::NumericalFailure => 3,
    }
}

/// CSV with header `iter,energy,grad_norm,step_norm,phase`. Contains no
/// timing, so identical runs give identical bytes.
pub fn trace_csv(trace: &OptTrace) -> String {
    let mut out = String::from("iter,energy,grad_norm,step_norm,phase\n");
    for r in &trace.records {
        writeln!(
            out,
            "{},{:.17e},{:.17e},{:.17e},{}",
            r.iter,
            r.energy,
            r.grad_norm,
            r.step_norm,
            r.phase.as_str()
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub trace: OptTrace,
    pub orbitals: SpinPair,
}

fn write_file(path: &Path, contents: &str) -> Result<(), RunError> {
    std::fs::write(path, contents).map_err(|source| RunError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Builds the starting point, runs the configured algorithm and writes the
/// requested output files.
pub fn run(config: &RunConfig, ints: &IntegralSet, registry: &SolverRegistry) -> Result<RunOutcome, RunError> {
    let solver = registry
        .get(&config.algorithm)
        .ok_or_else(|| RunError::UnknownAlgorithm {
            name: config.algorithm.clone(),
            available: registry.names().collect::<Vec<_>>().join(", "),
        })?;
    let step_size = config.step_size.or(solver.default_step_size());
    if let Some(t) = step_size {
        if !(t > 0.0 && t.is_finite()) {
            return Err(RunError::Config(format!("step size must be positive, got {t}")));
        }
    }
    let max_iter = config.max_iter.unwrap_or(solver.default_max_iter());
    let params = SolverParams {
        step_size: step_size.unwrap_or(0.0),
        crit: StopCriteria {
            max_iter,
            tol_grad: config.tol_grad,
            tol_val: config.tol_val,
        },
        switch_grad_tol: config.switch_grad_tol,
        diis_window: config.diis_window,
    };

    let started = Instant::now();
    let guess = make_guess(ints, &config.guess, config.seed)?;
    let x0 = guess.into_product(ints).map_err(GuessError::from)?;
    let out = solver.solve(ints, x0, &params);
    let wall_time = started.elapsed().as_secs_f64();

    let (ca, cb) = (out.point.first.c(), out.point.second.c());
    let euc = ints.euclidean_gradient(ca, cb);
    let riem = (
        out.point.first.riemannian_gradient(&euc.0),
        out.point.second.riemannian_gradient(&euc.1),
    );
    let report = RunReport {
        final_energy: energy(ints, ca, cb),
        electronic_energy: electronic_energy(ints, ca, cb),
        iterations: out.trace.iterations(),
        final_grad_norm: out.point.norm(&riem),
        status: out.trace.status(),
        switch_iteration: out.trace.switch_iteration,
        message: out.trace.message.clone(),
        algorithm: config.algorithm.clone(),
        step_size,
        max_iter,
        config: config.clone(),
        wall_time,
    };
    let orbitals = SpinPair::from_product(out.point);

    if let Some(p) = &config.trace_path {
        write_file(p, &trace_csv(&out.trace))?;
    }
    if let Some(p) = &config.report_path {
        write_file(p, &report.to_text())?;
    }
    if let Some(p) = &config.orbitals_path {
        write_file(p, &formats::write_orbitals(&orbitals))?;
    }
    Ok(RunOutcome {
        report,
        trace: out.trace,
        orbitals,
    })
}
