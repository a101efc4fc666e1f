//! Run reports and artifact emission: CSV series, plot data, and the
//! constants table in JSON and aligned text.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::checkers::BoundReport;
use crate::constants::WellConstants;
use crate::domain::Params;
use crate::error::Result;
use crate::evolution::{extrapolate_blowup_time, Trajectory, Verdict};
use crate::nehari::WellVerdict;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub verdict: Verdict,
    pub t_num: Option<f64>,
    pub samples: usize,
    pub t_final: f64,
    pub l_final: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub max_energy_identity: f64,
    pub max_dl_dt: f64,
}

/// Everything a single experiment produces besides the raw series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub constants_table: WellConstants,
    pub classification: WellVerdict,
    pub trajectory_summary: TrajectorySummary,
    pub bound_reports: Vec<BoundReport>,
    pub residual_summary: ResidualSummary,
}

pub fn summarize_trajectory(traj: &Trajectory) -> TrajectorySummary {
    TrajectorySummary {
        verdict: traj.verdict,
        t_num: traj.t_num(),
        samples: traj.times.len(),
        t_final: *traj.times.last().unwrap_or(&0.0),
        l_final: traj.reports.last().map_or(0.0, |r| r.l),
    }
}

/// Writes the trajectory series CSV (byte-stable for a fixed config + seed).
pub fn emit_series(traj: &Trajectory, path: &Path) -> Result<()> {
    std::fs::write(path, traj.to_csv())?;
    Ok(())
}

/// Writes plot-ready columns: always t,L; plus the decay envelope when the
/// decay theorem applied, and the concavity extrapolation line near blow-up.
pub fn emit_plot_data(
    report: &RunReport,
    traj: &Trajectory,
    params: &Params,
    path: &Path,
) -> Result<()> {
    let decay_applies = report
        .bound_reports
        .iter()
        .any(|b| b.theorem_id.contains("decay") && b.hypotheses_met);
    let blowup = matches!(traj.verdict, Verdict::Blowup { .. });

    let mut header = String::from("t,L");
    if decay_applies {
        header.push_str(",envelope");
    }
    if blowup {
        header.push_str(",l_pow,extrapolation");
    }
    let mut out = header;
    out.push('\n');

    // Line fit backing the extrapolation column.
    let fit = if blowup {
        fit_tail_line(traj, params.q)
    } else {
        None
    };

    let (l0, j0) = (traj.l0(), traj.j0());
    for (k, rep) in traj.reports.iter().enumerate() {
        let t = traj.times[k];
        out.push_str(&format!("{},{}", t, rep.l));
        if decay_applies {
            let env = crate::checkers::decay_envelope(params, &report.constants_table, l0, j0, t)
                .unwrap_or(f64::NAN);
            out.push_str(&format!(",{}", env));
        }
        if blowup {
            let exp = (2.0 - params.q) / 2.0;
            let lpow = if rep.l > 0.0 { rep.l.powf(exp) } else { f64::NAN };
            let line = fit.map_or(f64::NAN, |(a, b)| a + b * t);
            out.push_str(&format!(",{},{}", lpow, line));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Least-squares (intercept, slope) of L^{(2-q)/2} over the tail used by the
/// blow-up extrapolation; the line crosses zero at T_num.
fn fit_tail_line(traj: &Trajectory, q: f64) -> Option<(f64, f64)> {
    let t_num = extrapolate_blowup_time(&traj.times, &traj.reports, q)?;
    let exp = (2.0 - q) / 2.0;
    let pts: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(&traj.reports)
        .filter(|(_, r)| r.l > 0.0)
        .map(|(&t, r)| (t, r.l.powf(exp)))
        .collect();
    let tail = &pts[pts.len().saturating_sub(6)..];
    let n = tail.len() as f64;
    let (st, sy, stt, sty) = tail
        .iter()
        .fold((0.0, 0.0, 0.0, 0.0), |(a, b, c, d), &(t, y)| {
            (a + t, b + y, c + t * t, d + t * y)
        });
    let denom = n * stt - st * st;
    if denom.abs() < 1e-300 {
        return None;
    }
    let slope = (n * sty - st * sy) / denom;
    let intercept = (sy - slope * st) / n;
    let _ = t_num;
    Some((intercept, slope))
}

pub fn emit_report_json(report: &RunReport, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| crate::error::Error::Parse(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn emit_constants_json(wc: &WellConstants, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(wc)
        .map_err(|e| crate::error::Error::Parse(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Aligned text rendering of the constants table.
pub fn constants_text(wc: &WellConstants) -> String {
    let rows = wc.table();
    let name_w = rows.iter().map(|r| r.0.len()).max().unwrap_or(4).max(4);
    let mut out = format!(
        "{:<name_w$}  {:>18}  {:>7}  method\n",
        "name", "value", "safety"
    );
    for (name, value, method, safety) in rows {
        out.push_str(&format!(
            "{:<name_w$}  {:>18.12e}  {:>7.3}  {}\n",
            name, value, safety, method
        ));
    }
    out
}

pub fn emit_constants_text(wc: &WellConstants, path: &Path) -> Result<()> {
    std::fs::write(path, constants_text(wc))?;
    Ok(())
}
