//! Semi-implicit time integration of the singular-weight flow with adaptive
//! stepping, blow-up detection, and per-step identity monitors.
//!
//! The diffusion coefficients |grad u|^{p-2} are frozen at the faces from the
//! current state and applied implicitly through a tridiagonal SPD solve; the
//! logarithmic source is explicit with a Lipschitz-scaled step.

use serde::{Deserialize, Serialize};

use crate::domain::{face_gradients, weighted_l2_sq, Params, RadialField};
use crate::error::{Error, Result};
use crate::functionals::{evaluate, EnergyReport};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Base time step before Lipschitz scaling.
    pub dt0: f64,
    pub t_max: f64,
    /// Blow-up declared when L reaches this multiple of L(0).
    pub blowup_threshold: f64,
    pub dt_floor: f64,
    /// Implicitness weight of the linearized diffusion (1 = backward Euler).
    pub theta_impl: f64,
    /// Steps between full energy-report samples.
    pub monitor_stride: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt0: 1e-3,
            t_max: 1.0,
            blowup_threshold: 1e8,
            dt_floor: 1e-12,
            theta_impl: 1.0,
            monitor_stride: 10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt0 > self.dt_floor && self.dt_floor > 0.0) {
            return Err(Error::Config(format!(
                "need dt0 > dt_floor > 0 (got dt0 = {}, dt_floor = {})",
                self.dt0, self.dt_floor
            )));
        }
        if !(self.blowup_threshold > 1.0) {
            return Err(Error::Config("blowup_threshold must exceed 1".into()));
        }
        if !(0.0..=1.0).contains(&self.theta_impl) {
            return Err(Error::Config("theta_impl must lie in [0, 1]".into()));
        }
        if self.monitor_stride == 0 {
            return Err(Error::Config("monitor_stride must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    GlobalToHorizon,
    Blowup { t_num: f64 },
    StepFloorHit,
}

/// Sampled time series of a run plus its verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub reports: Vec<EnergyReport>,
    /// Running integral of the weighted dissipation at each sample.
    pub dissipation: Vec<f64>,
    /// Step size in force at each sample.
    pub dts: Vec<f64>,
    pub verdict: Verdict,
    /// Final state of the run.
    #[serde(skip)]
    pub final_state: Option<RadialField>,
}

impl Trajectory {
    pub fn l0(&self) -> f64 {
        self.reports.first().map_or(0.0, |r| r.l)
    }

    pub fn j0(&self) -> f64 {
        self.reports.first().map_or(0.0, |r| r.j)
    }

    pub fn t_num(&self) -> Option<f64> {
        match self.verdict {
            Verdict::Blowup { t_num } => Some(t_num),
            _ => None,
        }
    }

    /// CSV with header t,L,J,I,grad_p,lq_q,log_term,dt. Shortest
    /// round-trip float formatting keeps re-runs byte-identical.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,L,J,I,grad_p,lq_q,log_term,dt\n");
        for (k, rep) in self.reports.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                self.times[k],
                rep.l,
                rep.j,
                rep.i,
                rep.grad_p,
                rep.lq_q,
                rep.log_term,
                self.dts[k]
            ));
        }
        out
    }
}

/// Logarithmic source f(u) = |u|^{q-2} u ln|u| with f(0) = 0.
fn source(u: f64, q: f64) -> f64 {
    let a = u.abs();
    if a == 0.0 {
        0.0
    } else {
        a.powf(q - 2.0) * u * a.ln()
    }
}

fn advance(
    u: &RadialField,
    dt: f64,
    params: &Params,
    theta: f64,
    with_source: bool,
) -> Result<RadialField> {
    if !(dt > 0.0) {
        return Err(Error::Config(format!("step size must be positive (got {})", dt)));
    }
    let grid = u.grid();
    let m = grid.cells;
    let grads = face_gradients(u);

    // Face conductances with the frozen |grad u|^{p-2} coefficient.
    let cond: Vec<f64> = grads
        .iter()
        .map(|&(g, area, len)| {
            let a = if params.p == 2.0 { 1.0 } else { g.abs().powf(params.p - 2.0) };
            area * a / len
        })
        .collect();

    let mass = grid.singular_weights(params.s);
    let mut diag = vec![0.0; m];
    let mut lower = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let c_in = cond[i];
        let c_out = cond[i + 1];
        diag[i] = mass[i] / dt + theta * (c_in + c_out);
        if i > 0 {
            lower[i] = -theta * c_in;
        }
        if i + 1 < m {
            upper[i] = -theta * c_out;
        }
        // Explicit part of the flux divergence.
        let mut explicit_flux = 0.0;
        if i + 1 < m {
            explicit_flux += c_out * (u.values[i + 1] - u.values[i]);
        } else {
            explicit_flux += c_out * (0.0 - u.values[i]);
        }
        if i > 0 {
            explicit_flux -= c_in * (u.values[i] - u.values[i - 1]);
        }
        rhs[i] = mass[i] / dt * u.values[i] + (1.0 - theta) * explicit_flux;
        if with_source {
            rhs[i] += grid.weights[i] * source(u.values[i], params.q);
        }
    }

    let next = thomas_solve(&lower, &diag, &upper, &rhs)?;
    let field = RadialField::new(u.grid_arc(), next);
    if !field.is_finite() {
        return Err(Error::Numerical("non-finite state after implicit solve".into()));
    }
    Ok(field)
}

fn thomas_solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut pivot = diag[0];
    if !(pivot.is_finite() && pivot != 0.0) {
        return Err(Error::Numerical("tridiagonal solve breakdown at row 0".into()));
    }
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..m {
        pivot = diag[i] - lower[i] * c[i - 1];
        if !(pivot.is_finite() && pivot != 0.0) {
            return Err(Error::Numerical(format!("tridiagonal solve breakdown at row {}", i)));
        }
        if i + 1 < m {
            c[i] = upper[i] / pivot;
        }
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    let mut x = d;
    for i in (0..m - 1).rev() {
        let xi = x[i] - c[i] * x[i + 1];
        x[i] = xi;
    }
    Ok(x)
}

/// One semi-implicit step of the full flow.
pub fn step(u: &RadialField, dt: f64, params: &Params) -> Result<RadialField> {
    advance(u, dt, params, 1.0, true)
}

/// One step of the frozen-coefficient diffusion alone (source off).
pub fn diffusion_step(u: &RadialField, dt: f64, params: &Params, theta: f64) -> Result<RadialField> {
    advance(u, dt, params, theta, false)
}

/// Source-Lipschitz-scaled step size.
fn adaptive_dt(dt0: f64, sup: f64, q: f64) -> f64 {
    dt0 / (1.0 + sup.powf(q - 2.0) * (std::f64::consts::E + sup).ln())
}

/// Integrates from u0, sampling energy reports every `monitor_stride` steps
/// plus at both endpoints, and renders a verdict.
pub fn run(u0: &RadialField, params: &Params, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if !u0.is_finite() {
        return Err(Error::Numerical("initial data must be finite".into()));
    }
    let mass = u0.grid().singular_weights(params.s);
    let l0 = weighted_l2_sq(u0, params.s) / 2.0;

    let mut times = Vec::new();
    let mut reports = Vec::new();
    let mut dissipation = Vec::new();
    let mut dts = Vec::new();

    let mut u = u0.clone();
    let mut t = 0.0;
    let mut diss = 0.0;
    let mut steps = 0usize;

    let record = |times: &mut Vec<f64>,
                  reports: &mut Vec<EnergyReport>,
                  dissipation: &mut Vec<f64>,
                  dts: &mut Vec<f64>,
                  u: &RadialField,
                  t: f64,
                  diss: f64,
                  dt: f64| {
        if times.last().map_or(true, |&last| t > last) {
            times.push(t);
            reports.push(evaluate(u, params));
            dissipation.push(diss);
            dts.push(dt);
        }
    };

    record(&mut times, &mut reports, &mut dissipation, &mut dts, &u, t, diss, cfg.dt0);

    let verdict = loop {
        if t >= cfg.t_max - 1e-15 {
            break Verdict::GlobalToHorizon;
        }
        let dt_n = adaptive_dt(cfg.dt0, u.max_abs(), params.q);
        if dt_n < cfg.dt_floor {
            record(&mut times, &mut reports, &mut dissipation, &mut dts, &u, t, diss, dt_n);
            break Verdict::StepFloorHit;
        }
        let dt = dt_n.min(cfg.t_max - t);
        let next = step(&u, dt, params)?;

        // Midpoint-in-time quadrature of the weighted dissipation.
        let mut rate = 0.0;
        for i in 0..u.values.len() {
            let du = next.values[i] - u.values[i];
            rate += mass[i] * du * du;
        }
        diss += rate / dt;

        t += dt;
        steps += 1;
        u = next;

        let l = weighted_l2_sq(&u, params.s) / 2.0;
        if l0 > 0.0 && l >= cfg.blowup_threshold * l0 {
            record(&mut times, &mut reports, &mut dissipation, &mut dts, &u, t, diss, dt);
            let t_num = extrapolate_blowup_time(&times, &reports, params.q).unwrap_or(t);
            break Verdict::Blowup { t_num };
        }
        if steps % cfg.monitor_stride == 0 {
            record(&mut times, &mut reports, &mut dissipation, &mut dts, &u, t, diss, dt);
        }
    };
    let last_dt = *dts.last().unwrap_or(&cfg.dt0);
    record(&mut times, &mut reports, &mut dissipation, &mut dts, &u, t, diss, last_dt);

    Ok(Trajectory {
        times,
        reports,
        dissipation,
        dts,
        verdict,
        final_state: Some(u),
    })
}

/// Fits the last samples of L^{(2-q)/2} to a line and extrapolates its zero,
/// the mechanism behind the concavity upper bound.
pub fn extrapolate_blowup_time(times: &[f64], reports: &[EnergyReport], q: f64) -> Option<f64> {
    let exp = (2.0 - q) / 2.0;
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(reports)
        .filter(|(_, r)| r.l > 0.0)
        .map(|(&t, r)| (t, r.l.powf(exp)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let tail = &pts[pts.len().saturating_sub(6)..];
    let n = tail.len() as f64;
    let (st, sy, stt, sty) = tail.iter().fold((0.0, 0.0, 0.0, 0.0), |(a, b, c, d), &(t, y)| {
        (a + t, b + y, c + t * t, d + t * y)
    });
    let denom = n * stt - st * st;
    if denom.abs() < 1e-300 {
        return None;
    }
    let slope = (n * sty - st * sy) / denom;
    let intercept = (sy - slope * st) / n;
    if slope >= 0.0 {
        return None;
    }
    Some(-intercept / slope)
}

/// Relative defect of the energy dissipation identity at sample k.
pub fn energy_identity_residual(traj: &Trajectory, k: usize) -> f64 {
    let j0 = traj.reports[0].j;
    (traj.dissipation[k] + traj.reports[k].j - j0).abs() / (1.0 + j0.abs())
}

/// Relative defect of the identity d/dt (2L) = -2I at interior sample k,
/// using the nonuniform three-point derivative.
pub fn dl_dt_residual(traj: &Trajectory, k: usize) -> f64 {
    assert!(k > 0 && k + 1 < traj.times.len(), "k must be interior");
    let (t0, t1, t2) = (traj.times[k - 1], traj.times[k], traj.times[k + 1]);
    let (y0, y1, y2) = (
        2.0 * traj.reports[k - 1].l,
        2.0 * traj.reports[k].l,
        2.0 * traj.reports[k + 1].l,
    );
    let d = y0 * (t1 - t2) / ((t0 - t1) * (t0 - t2))
        + y1 * (2.0 * t1 - t0 - t2) / ((t1 - t0) * (t1 - t2))
        + y2 * (t1 - t0) / ((t2 - t0) * (t2 - t1));
    let i = traj.reports[k].i;
    (d + 2.0 * i).abs() / (1.0 + i.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_grid, RadialGrid};
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn setup(s: f64, cells: usize) -> (Arc<RadialGrid>, Params) {
        let params = Params::new(2.0, 3.0, 3, s, 1.0).unwrap();
        let grid = Arc::new(make_grid(&params, cells).unwrap());
        (grid, params)
    }

    #[test]
    fn zero_field_is_stationary() {
        let (grid, params) = setup(1.0, 32);
        let zero = RadialField::zeros(Arc::clone(&grid));
        let next = step(&zero, 1e-2, &params).unwrap();
        assert!(next.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn heat_eigenmode_decay_rate() {
        // p = 2, s = 0, source off: one implicit step scales the first
        // Dirichlet eigenmode sin(pi r)/r by 1/(1 + pi^2 dt).
        let (grid, params) = setup(0.0, 400);
        let u = RadialField::from_fn(Arc::clone(&grid), |r| (PI * r).sin() / (PI * r));
        let dt = 1e-3;
        let next = diffusion_step(&u, dt, &params, 1.0).unwrap();
        let ratio = (weighted_l2_sq(&next, 0.0) / weighted_l2_sq(&u, 0.0)).sqrt();
        let expect = 1.0 / (1.0 + PI * PI * dt);
        assert_relative_eq!(ratio, expect, max_relative = 2e-4);
    }

    #[test]
    fn single_cell_scalar_reduction() {
        // M = 1 collapses the scheme to one scalar semi-implicit update.
        let params = Params::new(2.0, 3.0, 3, 1.0, 1.0).unwrap();
        let grid = Arc::new(RadialGrid::with_cells(&params, 1));
        let u0 = 0.7;
        let u = RadialField::new(Arc::clone(&grid), vec![u0]);
        let dt = 1e-2;
        let next = step(&u, dt, &params).unwrap();

        let h = grid.h;
        let mass = grid.singular_weights(params.s)[0];
        let grad = -u0 / (h / 2.0);
        let a = grad.abs().powf(params.p - 2.0);
        let cond = grid.face_area(1) * a / (h / 2.0);
        let src = grid.weights[0] * u0.abs().powf(params.q - 2.0) * u0 * u0.abs().ln();
        let expected = (mass / dt * u0 + src) / (mass / dt + cond);
        assert_relative_eq!(next.values[0], expected, max_relative = 1e-12);
    }

    #[test]
    fn implicit_diffusion_never_increases_weighted_norm() {
        let (grid, params) = setup(1.0, 48);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let vals: Vec<f64> = (0..48).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let u = RadialField::new(Arc::clone(&grid), vals);
            let before = weighted_l2_sq(&u, params.s);
            let next = diffusion_step(&u, 5e-3, &params, 1.0).unwrap();
            let after = weighted_l2_sq(&next, params.s);
            assert!(after <= before * (1.0 + 1e-12), "{} > {}", after, before);
        }
    }

    #[test]
    fn zero_initial_data_runs_globally() {
        let (grid, params) = setup(1.0, 32);
        let cfg = SolverConfig {
            t_max: 0.05,
            ..SolverConfig::default()
        };
        let traj = run(&RadialField::zeros(grid), &params, &cfg).unwrap();
        assert_eq!(traj.verdict, Verdict::GlobalToHorizon);
        assert!(traj.reports.iter().all(|r| r.j == 0.0 && r.l == 0.0));
        assert_eq!(energy_identity_residual(&traj, 0), 0.0);
        if traj.times.len() >= 3 {
            assert_eq!(dl_dt_residual(&traj, 1), 0.0);
        }
    }

    #[test]
    fn monotone_energy_on_smooth_run() {
        let (grid, params) = setup(1.0, 64);
        let u0 = RadialField::from_fn(Arc::clone(&grid), |r| 0.2 * (1.0 - r));
        let cfg = SolverConfig {
            dt0: 5e-4,
            t_max: 0.2,
            monitor_stride: 20,
            ..SolverConfig::default()
        };
        let traj = run(&u0, &params, &cfg).unwrap();
        assert_eq!(traj.verdict, Verdict::GlobalToHorizon);
        let tol = 5.0 * cfg.dt0 * (1.0 + traj.j0().abs());
        for w in traj.reports.windows(2) {
            assert!(w[1].j <= w[0].j + tol, "J increased: {} -> {}", w[0].j, w[1].j);
        }
    }

    #[test]
    fn csv_shape() {
        let (grid, params) = setup(1.0, 32);
        let u0 = RadialField::from_fn(Arc::clone(&grid), |r| 0.1 * (1.0 - r));
        let cfg = SolverConfig {
            dt0: 1e-3,
            t_max: 2e-3,
            monitor_stride: 1,
            ..SolverConfig::default()
        };
        let traj = run(&u0, &params, &cfg).unwrap();
        let csv = traj.to_csv();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines[0], "t,L,J,I,grad_p,lq_q,log_term,dt");
        assert_eq!(lines.len(), traj.times.len() + 1);
    }
}
