//! Fibering-map projection onto the Nehari manifold, estimation of the
//! mountain-pass level d, and potential-well classification.

use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Params, RadialField, RadialGrid};
use crate::error::{Error, Result};
use crate::functionals::{evaluate, fiber_nehari, EnergyReport};
use crate::trials::trial_members;

const LAMBDA_LO: f64 = 1e-8;
const LAMBDA_HI: f64 = 1e8;
const DESCENT_STEPS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WellLabel {
    InsideW,
    InsideV,
    OnNehari,
    Zero,
    Indeterminate,
}

/// Classification of a field against the potential well at level `d_ref`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WellVerdict {
    pub label: WellLabel,
    pub j: f64,
    pub i: f64,
    pub d_ref: f64,
}

impl WellVerdict {
    /// Membership in the well W, which contains the zero field by definition.
    pub fn in_well(&self) -> bool {
        matches!(self.label, WellLabel::InsideW | WellLabel::Zero)
    }
}

/// Smallest lambda > 0 with I(lambda u) = 0, via sign scan plus bisection on
/// the fiber polynomial assembled from the report of u.
pub fn fiber_scale(u: &RadialField, params: &Params) -> Result<f64> {
    let report = evaluate(u, params);
    fiber_scale_from_report(&report, params)
}

pub fn fiber_scale_from_report(report: &EnergyReport, params: &Params) -> Result<f64> {
    if report.lq_q <= 0.0 {
        return Err(Error::Projection("field must be nonzero with |u|_q > 0".into()));
    }
    let g = |lambda: f64| fiber_nehari(report, params, lambda);

    // March a log grid for the first sign change. g > 0 for small lambda
    // and g -> -inf, and the rescaled fiber has a single positive root, so
    // the first crossing is the projection.
    let decades = (LAMBDA_HI / LAMBDA_LO).log10();
    let steps_per_decade = 64usize;
    let total = (decades * steps_per_decade as f64) as usize;
    let mut lo = LAMBDA_LO;
    let mut glo = g(lo);
    if glo <= 0.0 {
        // Field already negative at the bottom of the window.
        return Err(Error::Projection(format!(
            "no positive bracket: I(lambda u) = {} at lambda = {}",
            glo, lo
        )));
    }
    let mut hi = lo;
    let mut found = false;
    for k in 1..=total {
        hi = LAMBDA_LO * 10f64.powf(k as f64 / steps_per_decade as f64);
        let ghi = g(hi);
        if ghi <= 0.0 {
            found = true;
            break;
        }
        lo = hi;
        glo = ghi;
    }
    let _ = glo;
    if !found {
        return Err(Error::Projection(format!(
            "no sign change of the fiber map within [{}, {}]",
            LAMBDA_LO, LAMBDA_HI
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Upper-bound estimate of the mountain-pass level: minimum of J over Nehari
/// projections of the trial family, with a seeded perturbation descent per
/// member. Nonincreasing in the family size.
pub fn estimate_d(
    grid: &Arc<RadialGrid>,
    params: &Params,
    family_size: usize,
    seed: u64,
) -> Result<f64> {
    let members = trial_members(family_size.max(1), params.p);
    let candidates: Vec<f64> = members
        .par_iter()
        .enumerate()
        .filter_map(|(k, shape)| {
            let u = shape.build(grid);
            let base = projected_j(&u, params).ok()?;
            let refined = perturbation_descent(&u, params, seed.wrapping_add(k as u64));
            Some(refined.map_or(base, |r| r.min(base)))
        })
        .collect();
    candidates
        .into_iter()
        .min_by(|a, b| a.partial_cmp(b).unwrap())
        .ok_or_else(|| Error::Estimation("Nehari projection failed on every trial member".into()))
}

/// J at the Nehari projection of u.
pub fn projected_j(u: &RadialField, params: &Params) -> Result<f64> {
    let lambda = fiber_scale(u, params)?;
    Ok(evaluate(&u.scaled(lambda), params).j)
}

fn perturbation_descent(u: &RadialField, params: &Params, seed: u64) -> Option<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = u.clone();
    let mut best = projected_j(&current, params).ok()?;
    let scale = 0.05 * current.max_abs().max(1e-12);
    for _ in 0..DESCENT_STEPS {
        let trial_values: Vec<f64> = current
            .values
            .iter()
            .map(|&v| v + scale * (rng.gen::<f64>() * 2.0 - 1.0))
            .collect();
        let trial = RadialField::new(current.grid_arc(), trial_values);
        if let Ok(j) = projected_j(&trial, params) {
            if j < best {
                best = j;
                current = trial;
            }
        }
    }
    Some(best)
}

/// Scale-free default tolerance for Nehari membership.
pub fn default_tol(grad_p: f64) -> f64 {
    1e-8 * (1.0 + grad_p)
}

/// Classifies a field into the well W, the exterior V, the Nehari manifold,
/// or the indeterminate super-critical region.
pub fn classify(u: &RadialField, params: &Params, d_ref: f64, tol: f64) -> WellVerdict {
    let report = evaluate(u, params);
    let label = if u.is_zero() {
        WellLabel::Zero
    } else if report.i.abs() <= tol {
        WellLabel::OnNehari
    } else if report.j >= d_ref {
        WellLabel::Indeterminate
    } else if report.i > tol {
        WellLabel::InsideW
    } else {
        WellLabel::InsideV
    };
    WellVerdict {
        label,
        j: report.j,
        i: report.i,
        d_ref,
    }
}
