//! Scenario-driven front end of the `fluctoforce` solver.

pub mod figures;
pub mod scenario;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use fluctoforce::{find_equilibria, sweep, CasimirSolver, PressureError, ScanOptions};
use thiserror::Error;

use scenario::{Command, LoadedScenario};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "FLUCTOFORCE_THREADS";

#[derive(Debug, Error, PartialEq)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("quadrature did not converge: {0}")]
    Convergence(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<PressureError> for CliError {
    fn from(e: PressureError) -> Self {
        if e.is_convergence_failure() {
            CliError::Convergence(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub command: Command,
    pub scenario: PathBuf,
    pub out: PathBuf,
    pub rel_tol: Option<f64>,
}

/// Creates `path` and hands a buffered writer to `body`.
pub fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), CliError> {
    let io_err = |e: io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    body(&mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Thread count requested through [`THREADS_ENV`], if any.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
        Err(_) => Ok(None),
    }
}

pub fn run(opts: &RunOptions) -> Result<(), CliError> {
    let loaded = LoadedScenario::load(&opts.scenario)?;
    let sc = &loaded.scenario;
    sc.check_command(opts.command)?;
    let settings = sc.quadrature.settings(opts.rel_tol)?;
    let solver = CasimirSolver::new(settings.clone());
    let name = sc.name.as_str();

    match opts.command {
        Command::Pressure => {
            let cfg = loaded.system()?;
            require_blackened(&cfg)?;
            let row = solver.total_inside_pressure(&cfg)?;
            let axis = fluctoforce::SweepAxis::Separation.name();
            write_file(&opts.out, |w| {
                table::write_breakdown(
                    w,
                    &[("command", "pressure"), ("scenario", name), ("axis", axis)],
                    axis,
                    &[cfg.gap],
                    &[Ok(row)],
                )
            })
        }
        Command::Sweep => {
            let cfg = loaded.system()?;
            require_blackened(&cfg)?;
            let spec = sc
                .sweep
                .as_ref()
                .ok_or_else(|| CliError::Config("sweep scenario has no [sweep] table".into()))?;
            let values = spec.values()?;
            let result = sweep(&solver, &cfg, spec.axis, &values)?;
            let axis = spec.axis.name();
            write_file(&opts.out, |w| {
                table::write_breakdown(
                    w,
                    &figures::sweep_meta(name, axis),
                    axis,
                    &result.axis_values,
                    &result.rows,
                )
            })?;
            match figures::first_failure(&result) {
                Some(e) => Err(e),
                None => Ok(()),
            }
        }
        Command::Equilibria => {
            let cfg = loaded.system()?;
            require_blackened(&cfg)?;
            let scan = sc.equilibria.clone().unwrap_or_else(ScanOptions::default);
            let points = find_equilibria(&solver, &cfg, &scan)?;
            write_file(&opts.out, |w| {
                table::write_equilibria(w, &figures::equilibria_meta(name), &points)
            })
        }
        Command::ReproduceFig => {
            let fig = sc
                .figure
                .ok_or_else(|| CliError::Config("reproduce-fig scenario has no [figure] table".into()))?;
            let substrate = loaded
                .substrate()?
                .ok_or_else(|| CliError::Config("figure presets need a substrate_file".into()))?;
            if substrate.approximate {
                log::warn!("substrate model is approximate: {}", substrate.description);
            }
            let plan = figures::plan(fig.number, &substrate.model, fig.points, fig.scan_points)?;
            figures::reproduce(&plan, &substrate, &settings, &opts.out)
        }
    }
}

fn require_blackened(cfg: &fluctoforce::SystemConfig) -> Result<(), CliError> {
    if cfg.slab1.outer_face_blackened && cfg.slab2.outer_face_blackened {
        Ok(())
    } else {
        Err(CliError::Config(
            "only slabs with a blackened outer face are supported".into(),
        ))
    }
}
