//! Closed-form evaluators for the decay envelope and the blow-up time
//! bounds, auxiliary-inequality verifiers, and trajectory checkers.
//!
//! Each checker lives behind the `TheoremCheck` trait and is registered by
//! name; `check_trajectory` walks the registry and keeps every report whose
//! hypotheses the initial data satisfies. Constant estimates enter with the
//! conservative direction: inflated where an upper bound on a constant
//! weakens the claim, so estimator error can only weaken a pass.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::WellConstants;
use crate::domain::Params;
use crate::error::{Error, Result};
use crate::evolution::{Trajectory, Verdict};

/// Evidence for one theorem applied to one trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem_id: String,
    pub hypotheses_met: bool,
    /// Per-clause hypothesis record: (clause, satisfied).
    pub hypotheses: Vec<(String, bool)>,
    /// Bound being compared against (a time, or an envelope ratio cap).
    pub bound_value: f64,
    pub observed: f64,
    /// Signed observed-vs-bound gap; positive margin means the check holds.
    pub margin: f64,
    pub passed: bool,
}

/// Tolerance on bound comparisons: the theorems are inequalities, so the
/// checkers test ordering with 10% slack for discretization of T_num.
pub const BOUND_TOLERANCE: f64 = 0.10;

/// Decay envelope of Theorem-style subcritical runs, reported in the L
/// convention (half the weighted norm).
pub fn decay_envelope(
    params: &Params,
    wc: &WellConstants,
    l0: f64,
    j0: f64,
    t: f64,
) -> Result<f64> {
    let (p, q) = (params.p, params.q);
    if !(j0 < wc.d_alpha) {
        return Err(Error::Hypothesis(format!(
            "decay clause needs J(u0) < d(alpha) = {} (got {})",
            wc.d_alpha, j0
        )));
    }
    let ct = wc.c_tilde_eff();
    let alpha = wc.alpha;
    if p == 2.0 {
        let ratio = (2.0 * q / (q - 2.0)) * j0.max(0.0) / wc.r_alpha.powi(2);
        let bracket = 1.0 - ratio.powf((q + alpha - 2.0) / 2.0);
        Ok((2.0 * l0) * (-(2.0 / ct) * bracket * t).exp() / 2.0)
    } else {
        let ratio = (p * q / (q - p)) * j0.max(0.0) / wc.r_alpha.powf(p);
        let bracket = 1.0 - ratio.powf((q + alpha - p) / p);
        let base = (p / 2.0 - 1.0) * (2.0 / ct.powf(p / 2.0)) * bracket * t
            + (2.0 * l0).powf(1.0 - p / 2.0);
        Ok(base.powf(2.0 / (2.0 - p)) / 2.0)
    }
}

/// Blow-up time upper bound under negative initial energy.
pub fn blowup_bound_t25(l0: f64, j0: f64, q: f64) -> Result<f64> {
    if !(j0 < 0.0) {
        return Err(Error::Hypothesis(format!("needs J(u0) < 0 (got {})", j0)));
    }
    if !(q > 2.0) {
        return Err(Error::Hypothesis(format!("needs q > 2 (got {})", q)));
    }
    Ok(2.0 * l0 / ((2.0 - q) * q * j0))
}

/// Blow-up time upper bound under J(u0) < M (t0 = 0 specialization).
pub fn blowup_bound_t26(l0: f64, j0: f64, m_depth: f64, q: f64) -> Result<f64> {
    if !(j0 < m_depth) {
        return Err(Error::Hypothesis(format!(
            "needs J(u0) < M = {} (got {})",
            m_depth, j0
        )));
    }
    if !(q > 2.0) {
        return Err(Error::Hypothesis(format!("needs q > 2 (got {})", q)));
    }
    Ok(8.0 * (q - 1.0) * l0 / ((q - 2.0).powi(2) * q * (m_depth - j0)))
}

/// Blow-up time upper bound at arbitrarily high initial energy; returns
/// (F(0), bound). `c_tilde` is passed explicitly so callers pick the
/// conservative direction.
pub fn blowup_bound_t27(l0: f64, j0: f64, params: &Params, c_tilde: f64) -> Result<(f64, f64)> {
    let (p, q) = (params.p, params.q);
    let c1 = c_tilde / 2.0;
    let c2 = p * q / (q - p) * c1;
    if !(c2 * j0 > 0.0) {
        return Err(Error::Hypothesis(format!(
            "needs C2 J(u0) > 0 (got C2 J(u0) = {})",
            c2 * j0
        )));
    }
    if !(c2 * j0 < l0 - c1) {
        return Err(Error::Hypothesis(format!(
            "needs C2 J(u0) < L(0) - C1 (got {} >= {})",
            c2 * j0,
            l0 - c1
        )));
    }
    let f0 = l0 - c1 - c2 * j0;
    let bound = 4.0 * (q - 1.0) * p * c_tilde * l0 / ((q - 2.0).powi(2) * (q - p) * f0);
    Ok((f0, bound))
}

/// Interpolation exponents for the blow-up lower bound.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LowerBoundParams {
    pub alpha: f64,
    pub theta_exp: f64,
    pub kappa_exp: f64,
    pub diam: f64,
}

impl LowerBoundParams {
    pub fn new(params: &Params, alpha: f64) -> Result<LowerBoundParams> {
        let (p, q, n) = (params.p, params.q, params.dim());
        if alpha <= 0.0 || alpha > params.alpha_max() + 1e-12 {
            return Err(Error::Domain(format!("alpha = {} outside the admissible range", alpha)));
        }
        let qa = q + alpha;
        if !(qa < p * (1.0 + 2.0 / n)) {
            return Err(Error::Hypothesis(format!(
                "needs q + alpha < p(1 + 2/N) (got {} >= {})",
                qa,
                p * (1.0 + 2.0 / n)
            )));
        }
        let theta = (0.5 - 1.0 / qa) / (0.5 - (n - p) / (n * p));
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::Hypothesis(format!("theta = {} outside (0, 1)", theta)));
        }
        let kappa = ((1.0 - theta) * qa / 2.0) / (1.0 - theta * qa / p);
        if !(kappa > 1.0) {
            return Err(Error::Hypothesis(format!("kappa = {} must exceed 1", kappa)));
        }
        Ok(LowerBoundParams {
            alpha,
            theta_exp: theta,
            kappa_exp: kappa,
            diam: 2.0 * params.radius,
        })
    }

    /// Largest usable alpha for the exponent regime, if any: half the gap to
    /// p(1 + 2/N), capped by the admissible range.
    pub fn pick_alpha(params: &Params) -> Option<f64> {
        let gap = params.p * (1.0 + 2.0 / params.dim()) - params.q;
        if gap <= 0.0 {
            return None;
        }
        Some((gap / 2.0).min(params.alpha_max()))
    }
}

/// Blow-up time lower bound from the interpolation estimate. `c_star` is
/// passed explicitly so callers pick the conservative direction.
pub fn blowup_lower_bound_t28(
    l0: f64,
    params: &Params,
    c_star: f64,
    lb: &LowerBoundParams,
) -> Result<f64> {
    if !(l0 > 0.0) {
        return Err(Error::Hypothesis("needs L(0) > 0".into()));
    }
    let p = params.p;
    let (alpha, theta, kappa) = (lb.alpha, lb.theta_exp, lb.kappa_exp);
    let qa = params.q + alpha;
    let bracket = c_star.powf(theta * qa)
        * alpha.powf(-theta * qa / p)
        * lb.diam.powf(params.s * (1.0 - theta) * qa / 2.0);
    let denom = (1.0 / alpha) * bracket.powf(p / (p - theta * qa)) * 2f64.powf(kappa) * (kappa - 1.0);
    Ok(l0.powf(1.0 - kappa) / denom)
}

/// Report of the random-sample verification of the two logarithmic
/// inequalities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogInequalityReport {
    pub samples: usize,
    pub violations: usize,
    /// Max of LHS - RHS over the sample (nonpositive when all hold).
    pub max_slack: f64,
}

/// Samples (s, p, mu) and checks s^p ln s <= e^{-1}/mu s^{p+mu} for s >= 1
/// and |s^p ln s| <= 1/(e p) for 0 < s < 1.
pub fn verify_log_inequalities(samples: usize, seed: u64) -> LogInequalityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    let mut max_slack = f64::NEG_INFINITY;
    for _ in 0..samples {
        let pexp = 0.5 + 5.0 * rng.gen::<f64>();
        let mu = 0.05 + 3.0 * rng.gen::<f64>();
        // Branch s >= 1, log-uniform up to e^6.
        let s_big = (rng.gen::<f64>() * 6.0).exp();
        let slack_big = s_big.powf(pexp) * s_big.ln() - (-1.0f64).exp() / mu * s_big.powf(pexp + mu);
        // Branch 0 < s < 1.
        let s_small = rng.gen::<f64>().max(1e-300);
        let slack_small =
            (s_small.powf(pexp) * s_small.ln()).abs() - 1.0 / (std::f64::consts::E * pexp);
        for slack in [slack_big, slack_small] {
            if slack > 0.0 {
                violations += 1;
            }
            if slack > max_slack {
                max_slack = slack;
            }
        }
    }
    LogInequalityReport {
        samples,
        violations,
        max_slack,
    }
}

/// Integrates the equality case of the concavity inequality
/// psi'' psi = (1 + theta) (psi')^2 and reports (t2, observed blow-up time),
/// where t2 = psi0 / (theta psi0') is the predicted bound.
pub fn concavity_blowup_oracle(theta: f64, psi0: f64, dpsi0: f64) -> (f64, f64) {
    assert!(theta > 0.0 && psi0 > 0.0 && dpsi0 > 0.0);
    let t2 = psi0 / (theta * dpsi0);
    let cutoff = psi0 / f64::EPSILON.powf(0.25);

    // RK4 on (psi, psi') with step proportional to the local scale.
    let mut psi = psi0;
    let mut dpsi = dpsi0;
    let mut t = 0.0;
    let f = |p: f64, dp: f64| -> (f64, f64) { (dp, (1.0 + theta) * dp * dp / p) };
    while psi < cutoff {
        let dt = 1e-3 * (psi / dpsi).min(t2);
        let (k1p, k1d) = f(psi, dpsi);
        let (k2p, k2d) = f(psi + 0.5 * dt * k1p, dpsi + 0.5 * dt * k1d);
        let (k3p, k3d) = f(psi + 0.5 * dt * k2p, dpsi + 0.5 * dt * k2d);
        let (k4p, k4d) = f(psi + dt * k3p, dpsi + dt * k3d);
        psi += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        dpsi += dt / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        t += dt;
        if !psi.is_finite() || !dpsi.is_finite() {
            return (t2, t);
        }
    }
    // psi^{-theta} is exactly linear in t for this ODE; extrapolating it to
    // zero from the final state recovers the blow-up time to scheme accuracy.
    (t2, t + psi / (theta * dpsi))
}

/// A theorem checker: inspects a trajectory and produces evidence when its
/// hypotheses apply.
pub trait TheoremCheck: Sync + Send {
    fn name(&self) -> &'static str;
    fn check(&self, traj: &Trajectory, params: &Params, wc: &WellConstants) -> Option<BoundReport>;
}

struct DecayT23;
struct UpperT25;
struct UpperT26;
struct UpperT27;
struct LowerT28;

impl TheoremCheck for DecayT23 {
    fn name(&self) -> &'static str {
        "T2.3_decay"
    }

    fn check(&self, traj: &Trajectory, params: &Params, wc: &WellConstants) -> Option<BoundReport> {
        let (l0, j0) = (traj.l0(), traj.j0());
        let i0 = traj.reports.first()?.i;
        if l0 <= 0.0 || !(i0 > 0.0) || !(j0 < wc.d_alpha) {
            return None;
        }
        let mut worst = 0.0f64;
        for (k, rep) in traj.reports.iter().enumerate() {
            let env = decay_envelope(params, wc, l0, j0, traj.times[k]).ok()?;
            if env > 0.0 {
                worst = worst.max(rep.l / env);
            }
        }
        let passed = worst <= 1.0 + BOUND_TOLERANCE;
        Some(BoundReport {
            theorem_id: self.name().into(),
            hypotheses_met: true,
            hypotheses: vec![
                ("I(u0) > 0".into(), true),
                (format!("J(u0) = {} < d(alpha) = {}", j0, wc.d_alpha), true),
            ],
            bound_value: 1.0,
            observed: worst,
            margin: 1.0 + BOUND_TOLERANCE - worst,
            passed,
        })
    }
}

fn upper_bound_report(
    name: &str,
    traj: &Trajectory,
    bound: f64,
    hypotheses: Vec<(String, bool)>,
) -> BoundReport {
    let observed = traj.t_num().unwrap_or(f64::NAN);
    let passed = matches!(traj.verdict, Verdict::Blowup { .. })
        && observed <= bound * (1.0 + BOUND_TOLERANCE);
    BoundReport {
        theorem_id: name.into(),
        hypotheses_met: true,
        hypotheses,
        bound_value: bound,
        observed,
        margin: bound * (1.0 + BOUND_TOLERANCE) - observed,
        passed,
    }
}

impl TheoremCheck for UpperT25 {
    fn name(&self) -> &'static str {
        "T2.5"
    }

    fn check(&self, traj: &Trajectory, params: &Params, _wc: &WellConstants) -> Option<BoundReport> {
        let (l0, j0) = (traj.l0(), traj.j0());
        let bound = blowup_bound_t25(l0, j0, params.q).ok()?;
        Some(upper_bound_report(
            self.name(),
            traj,
            bound,
            vec![(format!("J(u0) = {} < 0", j0), true)],
        ))
    }
}

impl TheoremCheck for UpperT26 {
    fn name(&self) -> &'static str {
        "T2.6"
    }

    fn check(&self, traj: &Trajectory, params: &Params, wc: &WellConstants) -> Option<BoundReport> {
        let (l0, j0) = (traj.l0(), traj.j0());
        let i0 = traj.reports.first()?.i;
        if !(i0 < 0.0) {
            return None;
        }
        let bound = blowup_bound_t26(l0, j0, wc.m_depth, params.q).ok()?;
        Some(upper_bound_report(
            self.name(),
            traj,
            bound,
            vec![
                (format!("J(u0) = {} < M = {}", j0, wc.m_depth), true),
                (format!("I(u0) = {} < 0", i0), true),
            ],
        ))
    }
}

impl TheoremCheck for UpperT27 {
    fn name(&self) -> &'static str {
        "T2.7"
    }

    fn check(&self, traj: &Trajectory, params: &Params, wc: &WellConstants) -> Option<BoundReport> {
        let (l0, j0) = (traj.l0(), traj.j0());
        let ct = wc.c_tilde_eff();
        let (f0, bound) = blowup_bound_t27(l0, j0, params, ct).ok()?;
        let mut report = upper_bound_report(
            self.name(),
            traj,
            bound,
            vec![(
                format!("0 < C2 J(u0) = {} < L(0) - C1 = {}", wc.c2_eff(params) * j0, l0 - wc.c1_eff()),
                true,
            )],
        );
        // Growth monitor: F(t) stays above its exponential floor while the
        // run remains finite.
        let rate = (params.q - params.p) / params.p * 2.0 / ct;
        let c1 = ct / 2.0;
        let c2 = params.p * params.q / (params.q - params.p) * c1;
        let mut monitor_ok = true;
        for (k, rep) in traj.reports.iter().enumerate() {
            let f_t = rep.l - c1 - c2 * rep.j;
            let floor = f0 * (rate * traj.times[k]).exp() * (1.0 - BOUND_TOLERANCE);
            if f_t < floor {
                monitor_ok = false;
                break;
            }
        }
        report
            .hypotheses
            .push(("F(t) >= F(0) exp(rate t) (monitor)".into(), monitor_ok));
        report.passed = report.passed && monitor_ok;
        Some(report)
    }
}

impl TheoremCheck for LowerT28 {
    fn name(&self) -> &'static str {
        "T2.8"
    }

    fn check(&self, traj: &Trajectory, params: &Params, wc: &WellConstants) -> Option<BoundReport> {
        let (l0, j0) = (traj.l0(), traj.j0());
        // Paired with T2.7 hypotheses only.
        blowup_bound_t27(l0, j0, params, wc.c_tilde_eff()).ok()?;
        let alpha = LowerBoundParams::pick_alpha(params)?;
        let lb = LowerBoundParams::new(params, alpha).ok()?;
        let bound = blowup_lower_bound_t28(l0, params, wc.c_star_eff(), &lb).ok()?;
        let observed = traj.t_num().unwrap_or(f64::NAN);
        let passed = matches!(traj.verdict, Verdict::Blowup { .. }) && bound <= observed;
        Some(BoundReport {
            theorem_id: self.name().into(),
            hypotheses_met: true,
            hypotheses: vec![
                ("conditions of the high-energy upper bound".into(), true),
                (
                    format!("q + alpha = {} < p(1 + 2/N)", params.q + alpha),
                    true,
                ),
            ],
            bound_value: bound,
            observed,
            margin: observed - bound,
            passed,
        })
    }
}

/// All registered theorem checkers, keyed by their names.
pub fn registry() -> Vec<Box<dyn TheoremCheck>> {
    vec![
        Box::new(DecayT23),
        Box::new(UpperT25),
        Box::new(UpperT26),
        Box::new(UpperT27),
        Box::new(LowerT28),
    ]
}

/// Runs every registered checker whose hypotheses the initial data satisfy.
pub fn check_trajectory(traj: &Trajectory, params: &Params, wc: &WellConstants) -> Vec<BoundReport> {
    registry()
        .iter()
        .filter_map(|c| c.check(traj, params, wc))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn wc_with(c_tilde: f64, r_alpha: f64, alpha: f64) -> WellConstants {
        WellConstants {
            alpha,
            b_alpha: 1.0,
            kappa_q: 1.0,
            c_star: 1.0,
            c_hardy: c_tilde,
            c_tilde,
            r_alpha,
            sigma_alpha: r_alpha,
            r_star: r_alpha,
            r_sup: r_alpha,
            m_depth: 0.0,
            d_alpha: f64::INFINITY,
            c1: c_tilde / 2.0,
            c2: c_tilde,
            safety_factor: 1.0,
        }
    }

    #[test]
    fn envelope_closed_forms() {
        let params = Params::new(2.0, 3.0, 3, 1.0, 1.0).unwrap();
        let wc = wc_with(1.0, 1.0, 0.5);
        // J0 = 0 collapses the bracket to 1: pure exponential with rate 2/C.
        let l0 = 0.8;
        let v = decay_envelope(&params, &wc, l0, 0.0, 0.3).unwrap();
        assert_relative_eq!(v, l0 * (-2.0 * 0.3f64).exp(), max_relative = 1e-13);
        // t = 0 returns L0 in both branches.
        assert_relative_eq!(decay_envelope(&params, &wc, l0, 0.0, 0.0).unwrap(), l0);

        let params3 = Params::new(3.0, 4.0, 4, 0.0, 1.0).unwrap();
        let wc3 = wc_with(1.0, 1.0, 0.5);
        assert_relative_eq!(
            decay_envelope(&params3, &wc3, 0.5, 0.0, 0.0).unwrap(),
            0.5,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            decay_envelope(&params3, &wc3, 0.5, 0.0, 1.0).unwrap(),
            0.125,
            max_relative = 1e-13
        );
    }

    #[test]
    fn upper_bound_closed_forms() {
        assert_relative_eq!(blowup_bound_t25(1.0, -1.0, 4.0).unwrap(), 0.25, epsilon = 1e-15);
        assert_relative_eq!(
            blowup_bound_t25(2.0, -1.0, 4.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert!(blowup_bound_t25(1.0, 0.0, 4.0).is_err());
        assert!(blowup_bound_t25(1.0, -1e-9, 4.0).unwrap() > 1e8);

        assert_relative_eq!(blowup_bound_t26(1.0, 0.0, 0.5, 4.0).unwrap(), 3.0, epsilon = 1e-15);
        assert_relative_eq!(
            blowup_bound_t26(1.0, 0.0, 1.0, 3.0).unwrap(),
            16.0 / 3.0,
            epsilon = 1e-12
        );
        assert!(blowup_bound_t26(1.0, 0.5, 0.5, 4.0).is_err());

        let params = Params::new(2.0, 4.0, 3, 0.0, 1.0).unwrap();
        let (f0, bound) = blowup_bound_t27(2.5, 0.5, &params, 1.0).unwrap();
        assert_relative_eq!(f0, 1.0, epsilon = 1e-15);
        assert_relative_eq!(bound, 7.5, epsilon = 1e-12);
        assert!(blowup_bound_t27(0.6, 0.5, &params, 1.0).is_err());
        assert!(blowup_bound_t27(2.5, -0.1, &params, 1.0).is_err());
    }

    #[test]
    fn t27_linearity_in_c_tilde_at_fixed_f0() {
        let params = Params::new(2.0, 4.0, 3, 0.0, 1.0).unwrap();
        let (f0a, ba) = blowup_bound_t27(2.5, 0.5, &params, 1.0).unwrap();
        // Doubling C tilde and rescaling (L0, J0) to keep F0 fixed doubles
        // the bound up to the L0 factor; verify by direct recomputation.
        let c2 = 2.0;
        let l0b = 2.5 + 0.5; // keep L0 - C1 - C2 J0 = 1 with C1 = 1, C2 = 8 J0' ...
        let j0b = (l0b - 1.0 - f0a) / (params.p * params.q / (params.q - params.p) * c2 / 2.0);
        let (f0b, bb) = blowup_bound_t27(l0b, j0b, &params, c2).unwrap();
        assert_relative_eq!(f0b, f0a, epsilon = 1e-12);
        assert_relative_eq!(bb / ba, c2 * l0b / 2.5, max_relative = 1e-12);
    }

    #[test]
    fn lower_bound_exponents() {
        let params = Params::new(2.0, 2.2, 3, 0.0, 1.0).unwrap();
        let lb = LowerBoundParams::new(&params, 0.2).unwrap();
        assert_relative_eq!(lb.theta_exp, 0.25, epsilon = 1e-12);
        assert_relative_eq!(lb.kappa_exp, 9.0 / 7.0, epsilon = 1e-12);
        assert_relative_eq!(lb.diam, 2.0);

        // s = 0 kills the diameter factor.
        let b1 = blowup_lower_bound_t28(1.0, &params, 1.0, &lb).unwrap();
        let mut lb_wide = lb;
        lb_wide.diam = 17.0;
        let b2 = blowup_lower_bound_t28(1.0, &params, 1.0, &lb_wide).unwrap();
        assert_relative_eq!(b1, b2, epsilon = 1e-14);

        // Doubling C_star shrinks the bound by the bracket homogeneity.
        let qa = params.q + lb.alpha;
        let expo = lb.theta_exp * qa * params.p / (params.p - lb.theta_exp * qa);
        let b3 = blowup_lower_bound_t28(1.0, &params, 2.0, &lb).unwrap();
        assert_relative_eq!(b3 / b1, 2f64.powf(-expo), max_relative = 1e-12);
    }

    #[test]
    fn monotonicity_of_upper_bounds() {
        // T2.6 decreasing in M - J0; T2.7 decreasing in F0.
        let q = 3.0;
        let mut prev = f64::INFINITY;
        for k in 1..=20 {
            let gap = 0.05 * k as f64;
            let b = blowup_bound_t26(1.0, 0.0, gap, q).unwrap();
            assert!(b < prev);
            prev = b;
        }
        let params = Params::new(2.0, 3.0, 3, 0.0, 1.0).unwrap();
        let mut prev_bound = f64::INFINITY;
        for k in 1..=20 {
            let j0 = 0.5 - 0.02 * k as f64; // larger F0 as J0 shrinks
            let (_, b) = blowup_bound_t27(5.0, j0, &params, 1.0).unwrap();
            assert!(b < prev_bound);
            prev_bound = b;
        }
    }

    #[test]
    fn log_inequalities_hold_and_reach_equality() {
        let rep = verify_log_inequalities(20_000, 42);
        assert_eq!(rep.violations, 0, "max slack {}", rep.max_slack);

        // Equality at s = e^{1/mu}.
        let (pexp, mu) = (2.0, 1.0);
        let s = (1.0f64 / mu).exp();
        let lhs = s.powf(pexp) * s.ln();
        let rhs = (-1.0f64).exp() / mu * s.powf(pexp + mu);
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);

        // Equality at s = e^{-1/p}.
        let s2 = (-1.0f64 / pexp).exp();
        let lhs2 = (s2.powf(pexp) * s2.ln()).abs();
        assert_relative_eq!(lhs2, 1.0 / (std::f64::consts::E * pexp), max_relative = 1e-12);
    }

    #[test]
    fn concavity_oracle_matches_exact_solutions() {
        let (t2, obs) = concavity_blowup_oracle(1.0, 1.0, 1.0);
        assert_relative_eq!(t2, 1.0);
        assert!((obs - 1.0).abs() < 1e-3, "obs = {}", obs);

        let (t2b, obsb) = concavity_blowup_oracle(2.0, 1.0, 1.0);
        assert_relative_eq!(t2b, 0.5);
        assert!((obsb - 0.5).abs() < 1e-3, "obs = {}", obsb);

        let (t2c, obsc) = concavity_blowup_oracle(0.5, 1.0, 1.0);
        assert_relative_eq!(t2c, 2.0);
        assert!((obsc - 2.0).abs() < 1e-3, "obs = {} vs t2 = {}", obsc, t2c);

        // Doubling psi0' halves t2.
        let (t2d, _) = concavity_blowup_oracle(1.0, 1.0, 2.0);
        assert_relative_eq!(t2d, 0.5);
    }
}
