//! End-to-end experiment orchestration: grid, constants, initial datum,
//! classification, evolution, residuals, theorem checks, and artifacts.
//! Deterministic given the config and seed.

use std::path::Path;
use std::sync::Arc;

use crate::checkers::check_trajectory;
use crate::config::ExperimentConfig;
use crate::constants::{compute, WellConstants};
use crate::domain::{make_grid, RadialField, RadialGrid};
use crate::error::Result;
use crate::evolution::{dl_dt_residual, energy_identity_residual, run, Trajectory};
use crate::nehari::{classify, default_tol, estimate_d};
use crate::profiles::build_profile;
use crate::report::{
    emit_constants_json, emit_constants_text, emit_plot_data, emit_report_json, emit_series,
    summarize_trajectory, ResidualSummary, RunReport,
};

/// In-memory outcome of one experiment, before any files are written.
pub struct ExperimentOutcome {
    pub report: RunReport,
    pub trajectory: Trajectory,
    pub grid: Arc<RadialGrid>,
    pub initial: RadialField,
}

/// Runs the full pipeline described by `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let params = cfg.params()?;
    let grid = Arc::new(make_grid(&params, cfg.grid_cells)?);

    let wc = compute(&grid, &params, &cfg.constants)?;
    let u0 = build_profile(&cfg.initial, &grid)?;

    // Mountain-pass level estimate referencing the same seed; a zero datum
    // needs no estimate to classify.
    let d_ref = if u0.is_zero() {
        wc.m_depth
    } else {
        estimate_d(&grid, &params, cfg.constants.family_size, cfg.seed)?
            .max(wc.m_depth)
    };
    let report0 = crate::functionals::evaluate(&u0, &params);
    let classification = classify(&u0, &params, d_ref, default_tol(report0.grad_p));

    let trajectory = run(&u0, &params, &cfg.solver)?;
    let residual_summary = residuals(&trajectory);
    let bound_reports = check_trajectory(&trajectory, &params, &wc);

    Ok(ExperimentOutcome {
        report: RunReport {
            constants_table: wc,
            classification,
            trajectory_summary: summarize_trajectory(&trajectory),
            bound_reports,
            residual_summary,
        },
        trajectory,
        grid,
        initial: u0,
    })
}

fn residuals(traj: &Trajectory) -> ResidualSummary {
    let n = traj.times.len();
    let mut max_e = 0.0f64;
    for k in 0..n {
        max_e = max_e.max(energy_identity_residual(traj, k));
    }
    let mut max_d = 0.0f64;
    for k in 1..n.saturating_sub(1) {
        max_d = max_d.max(dl_dt_residual(traj, k));
    }
    ResidualSummary {
        max_energy_identity: max_e,
        max_dl_dt: max_d,
    }
}

/// Runs the experiment and writes every artifact into `out_dir`.
pub fn run_and_emit(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentOutcome> {
    std::fs::create_dir_all(out_dir)?;
    let outcome = run_experiment(cfg)?;
    let params = cfg.params()?;
    emit_series(&outcome.trajectory, &out_dir.join(&cfg.outputs.series_csv))?;
    emit_report_json(&outcome.report, &out_dir.join(&cfg.outputs.report_json))?;
    emit_constants_json(
        &outcome.report.constants_table,
        &out_dir.join(&cfg.outputs.constants_json),
    )?;
    emit_constants_text(
        &outcome.report.constants_table,
        &out_dir.join(&cfg.outputs.constants_txt),
    )?;
    emit_plot_data(
        &outcome.report,
        &outcome.trajectory,
        &params,
        &out_dir.join(&cfg.outputs.plot_data),
    )?;
    Ok(outcome)
}

/// Constants-only entry point for the `constants` subcommand.
pub fn compute_constants(cfg: &ExperimentConfig) -> Result<WellConstants> {
    let params = cfg.params()?;
    let grid = Arc::new(make_grid(&params, cfg.grid_cells)?);
    compute(&grid, &params, &cfg.constants)
}
