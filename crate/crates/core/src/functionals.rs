//! Energy functional J, Nehari functional I, and the half weighted L2 norm L.
//!
//! All integrals reuse the shell quadrature from `domain`, so the algebraic
//! decomposition J = I/q + (q-p)/(pq) |grad u|_p^p + |u|_q^q / q^2 closes to
//! machine precision by construction.

use serde::{Deserialize, Serialize};

use crate::domain::{grad_norm_p, lq_pow, weighted_l2_sq, Params, RadialField};

/// Functional values and their constituent integrals for one field snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub j: f64,
    pub i: f64,
    /// Half the weighted L2 norm squared.
    pub l: f64,
    /// Integral of |grad u|^p.
    pub grad_p: f64,
    /// Integral of |u|^q.
    pub lq_q: f64,
    /// Integral of |u|^q ln|u|.
    pub log_term: f64,
}

/// Integral of |u|^q ln|u| with the continuous-extension convention
/// 0 * ln 0 = 0. May be negative when |u| < 1 dominates.
pub fn log_source_integral(u: &RadialField, q: f64) -> f64 {
    let g = u.grid();
    g.weights
        .iter()
        .zip(&u.values)
        .map(|(&w, &v)| {
            let a = v.abs();
            if a == 0.0 {
                0.0
            } else {
                w * a.powf(q) * a.ln()
            }
        })
        .sum()
}

/// Evaluates J, I, L and caches the constituent integrals.
pub fn evaluate(u: &RadialField, params: &Params) -> EnergyReport {
    let grad_p = grad_norm_p(u, params.p);
    let lq_q = lq_pow(u, params.q);
    let log_term = log_source_integral(u, params.q);
    let q = params.q;
    EnergyReport {
        j: grad_p / params.p - log_term / q + lq_q / (q * q),
        i: grad_p - log_term,
        l: weighted_l2_sq(u, params.s) / 2.0,
        grad_p,
        lq_q,
        log_term,
    }
}

/// Residual of the decomposition identity linking J, I and the constituents.
pub fn decomposition_residual(report: &EnergyReport, params: &Params) -> f64 {
    let (p, q) = (params.p, params.q);
    let rhs = report.i / q + (q - p) / (p * q) * report.grad_p + report.lq_q / (q * q);
    (report.j - rhs).abs()
}

/// Value of I along the fiber through u: I(lambda u) assembled from the
/// cached constituents of the report of u.
pub fn fiber_nehari(report: &EnergyReport, params: &Params, lambda: f64) -> f64 {
    let (p, q) = (params.p, params.q);
    lambda.powf(p) * report.grad_p
        - lambda.powf(q) * report.log_term
        - lambda.powf(q) * lambda.ln() * report.lq_q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_grid, RadialField};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn params(p: f64, q: f64, n: u32, s: f64) -> Params {
        Params::new(p, q, n, s, 1.0).unwrap()
    }

    #[test]
    fn log_term_conventions() {
        let pr = params(2.0, 3.0, 3, 0.0);
        let g = Arc::new(make_grid(&pr, 64).unwrap());

        let zero = RadialField::zeros(Arc::clone(&g));
        assert_eq!(log_source_integral(&zero, 3.0), 0.0);

        let one = RadialField::from_fn(Arc::clone(&g), |_| 1.0);
        assert_eq!(log_source_integral(&one, 3.0), 0.0);

        // Constant e: e^q * |Omega| * ln e.
        let e = RadialField::from_fn(Arc::clone(&g), |_| std::f64::consts::E);
        let expect = std::f64::consts::E.powi(3) * 4.0 * PI / 3.0;
        assert_relative_eq!(log_source_integral(&e, 3.0), expect, max_relative = 1e-10);
    }

    #[test]
    fn zero_field_report() {
        let pr = params(2.0, 3.0, 3, 1.0);
        let g = Arc::new(make_grid(&pr, 32).unwrap());
        let rep = evaluate(&RadialField::zeros(g), &pr);
        assert_eq!(rep.j, 0.0);
        assert_eq!(rep.i, 0.0);
        assert_eq!(rep.l, 0.0);
    }

    #[test]
    fn unit_magnitude_field_kills_log_term() {
        let pr = params(2.0, 3.0, 3, 0.0);
        let g = Arc::new(make_grid(&pr, 32).unwrap());
        let vals: Vec<f64> = (0..32).map(|i| if i % 3 == 0 { 0.0 } else { 1.0 }).collect();
        let u = RadialField::new(g, vals);
        let rep = evaluate(&u, &pr);
        assert_eq!(rep.log_term, 0.0);
        assert_eq!(rep.i, rep.grad_p);
        assert_relative_eq!(
            rep.j,
            rep.grad_p / 2.0 + rep.lq_q / 9.0,
            max_relative = 1e-14
        );
    }

    /// Independent oracle: composite Simpson on the radial integrand.
    fn simpson_radial(f: impl Fn(f64) -> f64, intervals: usize) -> f64 {
        let h = 1.0 / intervals as f64;
        let mut acc = f(0.0) + f(1.0);
        for k in 1..intervals {
            let w = if k % 2 == 0 { 2.0 } else { 4.0 };
            acc += w * f(k as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn evaluate_matches_high_resolution_quadrature() {
        let pr = params(2.0, 3.0, 3, 0.0);
        let g = Arc::new(make_grid(&pr, 2000).unwrap());
        let u = RadialField::from_fn(Arc::clone(&g), |r| 1.0 - r);
        let rep = evaluate(&u, &pr);

        let omega = 4.0 * PI;
        let grad = simpson_radial(|r| omega * r * r, 1_000_000);
        let lqq = simpson_radial(|r| omega * r * r * (1.0 - r).powi(3), 1_000_000);
        let log = simpson_radial(
            |r| {
                let v: f64 = 1.0 - r;
                if v == 0.0 {
                    0.0
                } else {
                    omega * r * r * v.powi(3) * v.ln()
                }
            },
            1_000_000,
        );
        assert_relative_eq!(rep.grad_p, grad, max_relative = 1e-6);
        assert_relative_eq!(rep.lq_q, lqq, max_relative = 1e-6);
        assert_relative_eq!(rep.log_term, log, max_relative = 1e-6);
    }

    #[test]
    fn decomposition_residual_is_machine_small() {
        for (p, q, n) in [(2.0, 4.0, 3), (3.0, 5.0, 5)] {
            let pr = params(p, q, n, 0.0);
            let g = Arc::new(make_grid(&pr, 64).unwrap());
            let u = RadialField::from_fn(Arc::clone(&g), |r| 1.0 - r);
            let rep = evaluate(&u, &pr);
            assert!(decomposition_residual(&rep, &pr) <= 1e-12 * (1.0 + rep.j.abs()));
        }
    }

    #[test]
    fn fiber_scaling_matches_direct_evaluation() {
        let pr = params(2.0, 3.0, 3, 1.0);
        let g = Arc::new(make_grid(&pr, 128).unwrap());
        let u = RadialField::from_fn(Arc::clone(&g), |r| 2.0 * (1.0 - r * r));
        let rep = evaluate(&u, &pr);
        for lambda in [0.5, 1.0, 2.0] {
            let direct = evaluate(&u.scaled(lambda), &pr).i;
            let from_fiber = fiber_nehari(&rep, &pr, lambda);
            assert_relative_eq!(direct, from_fiber, max_relative = 1e-10);
        }
    }
}
