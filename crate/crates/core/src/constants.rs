//! Embedding and Hardy-Sobolev constant estimation plus the closed-form
//! well radii and derived constants.
//!
//! The estimators are maxima of Rayleigh-type quotients over deterministic
//! trial families, hence lower bounds on the true discrete optima. Checkers
//! that need an upper bound on a constant multiply by `safety_factor`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{grad_norm_p, lq_norm, Params, RadialField, RadialGrid};
use crate::error::{Error, Result};
use crate::trials::{refine_shape, trial_members};

pub const ALPHA_EPSILON: f64 = 1e-3;
const REFINE_ITERATIONS: usize = 60;

/// Knobs for constant estimation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstantsConfig {
    pub alpha_samples: usize,
    pub family_size: usize,
    pub safety_factor: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        ConstantsConfig {
            alpha_samples: 32,
            family_size: 16,
            safety_factor: 1.25,
        }
    }
}

/// Every estimated and derived constant the theorem checkers consume.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WellConstants {
    /// Argmax of the well radius over the sampled alpha range.
    pub alpha: f64,
    /// Embedding constant estimate for the L^{q+alpha} target at `alpha`.
    pub b_alpha: f64,
    /// Embedding constant estimate for the L^q target.
    pub kappa_q: f64,
    /// Embedding constant estimate for the critical L^{Np/(N-p)} target.
    pub c_star: f64,
    /// Hardy-Sobolev constant estimate for the weighted-L2 instance.
    pub c_hardy: f64,
    /// Volume-adjusted Hardy-Sobolev constant.
    pub c_tilde: f64,
    pub r_alpha: f64,
    pub sigma_alpha: f64,
    pub r_star: f64,
    /// sup of sigma(alpha) over the sample; upper bound companion of r_star.
    pub r_sup: f64,
    /// Well depth floor (q-p)/(pq) r_star^p.
    pub m_depth: f64,
    pub d_alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub safety_factor: f64,
}

impl WellConstants {
    /// C tilde inflated by the safety factor (used where an upper bound on
    /// the constant is conservative).
    pub fn c_tilde_eff(&self) -> f64 {
        self.c_tilde * self.safety_factor
    }

    pub fn c_star_eff(&self) -> f64 {
        self.c_star * self.safety_factor
    }

    pub fn c1_eff(&self) -> f64 {
        self.c_tilde_eff() / 2.0
    }

    pub fn c2_eff(&self, params: &Params) -> f64 {
        params.p * params.q / (params.q - params.p) * self.c1_eff()
    }

    /// Rows for the emitted constants table: (name, value, method, safety factor).
    pub fn table(&self) -> Vec<(String, f64, String, f64)> {
        let ray = "max Rayleigh quotient over trial family (lower bound)".to_string();
        let closed = "closed form from estimated constants".to_string();
        vec![
            ("alpha".into(), self.alpha, "argmax of r(alpha) over sample".into(), 1.0),
            ("B_alpha".into(), self.b_alpha, ray.clone(), 1.0),
            ("kappa_q".into(), self.kappa_q, ray.clone(), 1.0),
            ("C_star".into(), self.c_star, ray.clone(), self.safety_factor),
            ("C_hardy".into(), self.c_hardy, ray, self.safety_factor),
            ("C_tilde".into(), self.c_tilde, closed.clone(), self.safety_factor),
            ("r_alpha".into(), self.r_alpha, closed.clone(), 1.0),
            ("sigma_alpha".into(), self.sigma_alpha, closed.clone(), 1.0),
            ("r_star".into(), self.r_star, "max over alpha sample".into(), 1.0),
            ("r_sup".into(), self.r_sup, "max of sigma(alpha) over sample".into(), 1.0),
            ("M_depth".into(), self.m_depth, closed.clone(), 1.0),
            ("d_alpha".into(), self.d_alpha, closed.clone(), 1.0),
            ("C1".into(), self.c1, closed.clone(), self.safety_factor),
            ("C2".into(), self.c2, closed, self.safety_factor),
        ]
    }
}

/// Rayleigh quotient |u|_{target} / |grad u|_p for the Sobolev embedding.
fn embedding_ratio(u: &RadialField, p: f64, target: f64) -> f64 {
    let grad = grad_norm_p(u, p);
    if grad <= 0.0 {
        return f64::NEG_INFINITY;
    }
    lq_norm(u, target) / grad.powf(1.0 / p)
}

/// Lower-bound estimate of the optimal embedding constant of
/// W_0^{1,p} -> L^{target} by maximizing over the trial family with
/// per-member Nelder-Mead refinement.
pub fn estimate_embedding_constant(
    grid: &Arc<RadialGrid>,
    params: &Params,
    target_exponent: f64,
    family_size: usize,
) -> Result<f64> {
    if target_exponent < params.p || target_exponent > params.sobolev_critical() + 1e-12 {
        return Err(Error::Config(format!(
            "embedding target exponent {} outside [p, Np/(N-p)] = [{}, {}]",
            target_exponent,
            params.p,
            params.sobolev_critical()
        )));
    }
    let p = params.p;
    let objective = move |u: &RadialField| embedding_ratio(u, p, target_exponent);
    Ok(maximize_over_family(grid, params, family_size, &objective))
}

fn maximize_over_family(
    grid: &Arc<RadialGrid>,
    params: &Params,
    family_size: usize,
    objective: &(dyn Fn(&RadialField) -> f64 + Sync),
) -> f64 {
    trial_members(family_size.max(1), params.p)
        .into_par_iter()
        .map(|shape| {
            let seed = objective(&shape.build(grid));
            let (_, refined) = refine_shape(shape, grid, params.p, REFINE_ITERATIONS, &objective);
            seed.max(refined)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

/// Well radius r(alpha) = (alpha / B_alpha^{q+alpha})^{1/(q+alpha-p)}.
pub fn r_alpha(alpha: f64, b_alpha: f64, params: &Params) -> Result<f64> {
    check_alpha(alpha, params)?;
    if b_alpha <= 0.0 {
        return Err(Error::Domain(format!("B_alpha must be positive (got {})", b_alpha)));
    }
    let qa = params.q + alpha;
    Ok((alpha / b_alpha.powf(qa)).powf(1.0 / (qa - params.p)))
}

/// sigma(alpha) = (alpha / kappa^{q+alpha})^{1/(q+alpha-p)} |Omega|^{alpha/(q(q+alpha-p))}.
pub fn sigma_alpha(alpha: f64, kappa_q: f64, params: &Params, volume: f64) -> Result<f64> {
    check_alpha(alpha, params)?;
    if kappa_q <= 0.0 || volume <= 0.0 {
        return Err(Error::Domain("kappa and volume must be positive".into()));
    }
    let qa = params.q + alpha;
    let e = qa - params.p;
    Ok((alpha / kappa_q.powf(qa)).powf(1.0 / e) * volume.powf(alpha / (params.q * e)))
}

fn check_alpha(alpha: f64, params: &Params) -> Result<()> {
    if alpha <= 0.0 || alpha > params.alpha_max() + 1e-12 {
        return Err(Error::Domain(format!(
            "alpha must lie in (0, {}] (got {})",
            params.alpha_max(),
            alpha
        )));
    }
    Ok(())
}

/// Maximizes r(alpha) over a uniform alpha grid; returns (r_star, best alpha).
pub fn r_star(
    grid: &Arc<RadialGrid>,
    params: &Params,
    alpha_samples: usize,
    family_size: usize,
) -> Result<(f64, f64)> {
    let alphas = alpha_grid(params, alpha_samples);
    let results: Vec<(f64, f64)> = alphas
        .par_iter()
        .map(|&alpha| {
            let b = estimate_embedding_constant(grid, params, params.q + alpha, family_size)?;
            Ok((r_alpha(alpha, b, params)?, alpha))
        })
        .collect::<Result<_>>()?;
    results
        .into_iter()
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .ok_or_else(|| Error::Config("alpha sample must be nonempty".into()))
}

pub fn alpha_grid(params: &Params, samples: usize) -> Vec<f64> {
    let amax = params.alpha_max();
    let eps = ALPHA_EPSILON.min(amax / 2.0);
    (0..samples.max(1))
        .map(|j| eps + (j as f64 + 1.0) / samples.max(1) as f64 * (amax - eps))
        .collect()
}

/// Volume-adjusted Hardy-Sobolev constant.
pub fn c_tilde(c_hardy: f64, params: &Params, volume: f64) -> Result<f64> {
    if c_hardy <= 0.0 {
        return Err(Error::Domain("Hardy-Sobolev constant must be positive".into()));
    }
    let n = params.dim();
    let exponent_base = 2.0 * n / (n + 2.0 - params.s);
    if exponent_base > params.p + 1e-12 {
        return Err(Error::Hypothesis(format!(
            "regime requires 2N/(N+2-s) <= p (got {} > {})",
            exponent_base, params.p
        )));
    }
    if (exponent_base - params.p).abs() <= 1e-12 {
        Ok(c_hardy)
    } else {
        Ok(c_hardy * volume.powf((n + 2.0 - params.s) / n - 2.0 / params.p))
    }
}

/// Hardy-Sobolev quotient for exponents (n, beta):
/// [int |u|^gamma |x|^{-beta}] / [int |grad u|^n]^{(N-beta)/(N-n)},
/// gamma = n(N-beta)/(N-n).
pub fn hardy_sobolev_ratio(u: &RadialField, params: &Params, beta: f64, n: f64) -> Result<f64> {
    let dim = params.dim();
    if !(n > 1.0 && n < dim) {
        return Err(Error::Domain(format!("need 1 < n < N (got n = {}, N = {})", n, dim)));
    }
    if !(0.0..=n).contains(&beta) {
        return Err(Error::Domain(format!("need 0 <= beta <= n (got beta = {})", beta)));
    }
    if u.is_zero() {
        return Err(Error::Domain("Hardy-Sobolev quotient undefined for the zero field".into()));
    }
    let gamma = n * (dim - beta) / (dim - n);
    let weights = u.grid().singular_weights(beta);
    let numerator: f64 = weights
        .iter()
        .zip(&u.values)
        .map(|(&w, &v)| w * v.abs().powf(gamma))
        .sum();
    let denominator = grad_norm_p(u, n).powf((dim - beta) / (dim - n));
    Ok(numerator / denominator)
}

/// Exponent n of the gradient integral in the weighted-L2 Hardy-Sobolev
/// instance the theorems consume.
pub fn hardy_gradient_exponent(params: &Params) -> f64 {
    2.0 * params.dim() / (params.dim() + 2.0 - params.s)
}

/// Estimates the Hardy-Sobolev constant for the weighted-L2 instance
/// (gamma = 2, beta = s) as a family maximum.
pub fn estimate_c_hardy(grid: &Arc<RadialGrid>, params: &Params, family_size: usize) -> Result<f64> {
    let n = hardy_gradient_exponent(params);
    let s = params.s;
    let params_copy = *params;
    let objective = move |u: &RadialField| {
        hardy_sobolev_ratio(u, &params_copy, s, n).unwrap_or(f64::NEG_INFINITY)
    };
    Ok(maximize_over_family(grid, params, family_size, &objective))
}

/// Runs every estimator and assembles the derived constants.
pub fn compute(grid: &Arc<RadialGrid>, params: &Params, cfg: &ConstantsConfig) -> Result<WellConstants> {
    let (r_star_val, best_alpha) = r_star(grid, params, cfg.alpha_samples, cfg.family_size)?;
    let b_alpha = estimate_embedding_constant(grid, params, params.q + best_alpha, cfg.family_size)?;
    let kappa_q = estimate_embedding_constant(grid, params, params.q, cfg.family_size)?;
    let c_star = estimate_embedding_constant(grid, params, params.sobolev_critical(), cfg.family_size)?;
    let c_hardy = estimate_c_hardy(grid, params, cfg.family_size)?;
    let volume = grid.volume();
    let c_tilde_val = c_tilde(c_hardy, params, volume)?;

    let sigma = sigma_alpha(best_alpha, kappa_q, params, volume)?;
    let r_sup = alpha_grid(params, cfg.alpha_samples)
        .iter()
        .map(|&a| sigma_alpha(a, kappa_q, params, volume).unwrap_or(0.0))
        .fold(0.0f64, f64::max);

    let (p, q) = (params.p, params.q);
    let shape_factor = (q - p) / (p * q);
    let c1 = c_tilde_val / 2.0;
    Ok(WellConstants {
        alpha: best_alpha,
        b_alpha,
        kappa_q,
        c_star,
        c_hardy,
        c_tilde: c_tilde_val,
        r_alpha: r_alpha(best_alpha, b_alpha, params)?,
        sigma_alpha: sigma,
        r_star: r_star_val,
        r_sup,
        m_depth: shape_factor * r_star_val.powf(p),
        d_alpha: shape_factor * r_alpha(best_alpha, b_alpha, params)?.powf(p),
        c1,
        c2: p * q / (q - p) * c1,
        safety_factor: cfg.safety_factor,
    })
}
