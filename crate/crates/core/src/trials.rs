//! Deterministic trial families and a small Nelder-Mead refiner.
//!
//! The constant estimators and the mountain-pass estimator both rank
//! Rayleigh-type objectives over the same family, so enlarging the family
//! only ever appends members: maxima are nondecreasing and minima are
//! nonincreasing in the family size by construction.

use std::sync::Arc;

use crate::domain::{RadialField, RadialGrid};

/// Shape of one trial profile; `a` is the shape parameter (power exponent or
/// bump width), `c` a linear tilt factor.
#[derive(Debug, Clone, Copy)]
pub enum TrialShape {
    /// (1 - r/R)^a * (1 + c r/R)
    Power { a: f64, c: f64 },
    /// (exp(-(r/(aR))^2) - exp(-1/a^2)) * (1 + c r/R)
    Bump { a: f64, c: f64 },
}

impl TrialShape {
    pub fn build(&self, grid: &Arc<RadialGrid>) -> RadialField {
        let radius = grid.radius;
        match *self {
            TrialShape::Power { a, c } => RadialField::from_fn(Arc::clone(grid), move |r| {
                let x = r / radius;
                (1.0 - x).powf(a) * (1.0 + c * x)
            }),
            TrialShape::Bump { a, c } => RadialField::from_fn(Arc::clone(grid), move |r| {
                let x = r / radius;
                ((-(x / a) * (x / a)).exp() - (-1.0 / (a * a)).exp()) * (1.0 + c * x)
            }),
        }
    }

    fn with_opt(&self, v: [f64; 2], p: f64) -> TrialShape {
        let (amin, amax) = match self {
            TrialShape::Power { .. } => (power_exponent_floor(p), 12.0),
            TrialShape::Bump { .. } => (0.05, 3.0),
        };
        let a = v[0].exp().clamp(amin, amax);
        let c = v[1].clamp(-0.95, 4.0);
        match self {
            TrialShape::Power { .. } => TrialShape::Power { a, c },
            TrialShape::Bump { .. } => TrialShape::Bump { a, c },
        }
    }

    fn opt_vars(&self) -> [f64; 2] {
        match *self {
            TrialShape::Power { a, c } | TrialShape::Bump { a, c } => [a.ln(), c],
        }
    }
}

/// Smallest power exponent with integrable |grad u|^p near the boundary.
fn power_exponent_floor(p: f64) -> f64 {
    (1.0 - 1.0 / p) + 0.15
}

/// Van der Corput radical-inverse in base 2 (k >= 1), for nested
/// low-discrepancy parameter sequences.
fn van_der_corput(mut k: usize) -> f64 {
    let mut v = 0.0;
    let mut denom = 1.0;
    while k > 0 {
        denom *= 2.0;
        v += (k % 2) as f64 / denom;
        k /= 2;
    }
    v
}

/// Deterministic nested trial family. Member 0 is the plain linear profile;
/// the rest alternate power exponents and bump widths over log grids.
pub fn trial_members(family_size: usize, p: f64) -> Vec<TrialShape> {
    let amin = power_exponent_floor(p);
    (0..family_size)
        .map(|k| {
            if k == 0 {
                TrialShape::Power { a: 1.0, c: 0.0 }
            } else {
                let t = van_der_corput((k + 1) / 2);
                if k % 2 == 1 {
                    let a = (amin.ln() + t * (8.0f64.ln() - amin.ln())).exp();
                    TrialShape::Power { a, c: 0.0 }
                } else {
                    let a = (0.15f64.ln() + t * (1.5f64.ln() - 0.15f64.ln())).exp();
                    TrialShape::Bump { a, c: 0.0 }
                }
            }
        })
        .collect()
}

/// Nelder-Mead maximization of `objective` over the (ln a, c) chart of one
/// trial shape. Returns the best field found (never worse than the seed).
pub fn refine_shape(
    shape: TrialShape,
    grid: &Arc<RadialGrid>,
    p: f64,
    iterations: usize,
    objective: &dyn Fn(&RadialField) -> f64,
) -> (RadialField, f64) {
    let eval = |v: [f64; 2]| -> f64 {
        let field = shape.with_opt(v, p).build(grid);
        let val = objective(&field);
        if val.is_finite() {
            val
        } else {
            f64::NEG_INFINITY
        }
    };

    let x0 = shape.opt_vars();
    let mut simplex = [x0, [x0[0] + 0.35, x0[1]], [x0[0], x0[1] + 0.35]];
    let mut fvals = [eval(simplex[0]), eval(simplex[1]), eval(simplex[2])];

    for _ in 0..iterations {
        // order descending (maximize)
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| fvals[b].partial_cmp(&fvals[a]).unwrap());
        let (best, mid, worst) = (idx[0], idx[1], idx[2]);
        let centroid = [
            (simplex[best][0] + simplex[mid][0]) / 2.0,
            (simplex[best][1] + simplex[mid][1]) / 2.0,
        ];
        let reflect = [
            centroid[0] + (centroid[0] - simplex[worst][0]),
            centroid[1] + (centroid[1] - simplex[worst][1]),
        ];
        let fr = eval(reflect);
        if fr > fvals[best] {
            let expand = [
                centroid[0] + 2.0 * (centroid[0] - simplex[worst][0]),
                centroid[1] + 2.0 * (centroid[1] - simplex[worst][1]),
            ];
            let fe = eval(expand);
            if fe > fr {
                simplex[worst] = expand;
                fvals[worst] = fe;
            } else {
                simplex[worst] = reflect;
                fvals[worst] = fr;
            }
        } else if fr > fvals[mid] {
            simplex[worst] = reflect;
            fvals[worst] = fr;
        } else {
            let contract = [
                centroid[0] + 0.5 * (simplex[worst][0] - centroid[0]),
                centroid[1] + 0.5 * (simplex[worst][1] - centroid[1]),
            ];
            let fc = eval(contract);
            if fc > fvals[worst] {
                simplex[worst] = contract;
                fvals[worst] = fc;
            } else {
                for i in 0..3 {
                    if i != best {
                        simplex[i] = [
                            (simplex[i][0] + simplex[best][0]) / 2.0,
                            (simplex[i][1] + simplex[best][1]) / 2.0,
                        ];
                        fvals[i] = eval(simplex[i]);
                    }
                }
            }
        }
    }

    let mut best_v = x0;
    let mut best_f = eval(x0);
    for i in 0..3 {
        if fvals[i] > best_f {
            best_f = fvals[i];
            best_v = simplex[i];
        }
    }
    (shape.with_opt(best_v, p).build(grid), best_f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_grid, Params};

    #[test]
    fn family_is_nested() {
        let small = trial_members(5, 2.0);
        let large = trial_members(9, 2.0);
        for (a, b) in small.iter().zip(&large) {
            let (va, vb) = match (a, b) {
                (TrialShape::Power { a: x, .. }, TrialShape::Power { a: y, .. }) => (x, y),
                (TrialShape::Bump { a: x, .. }, TrialShape::Bump { a: y, .. }) => (x, y),
                _ => panic!("family prefix changed shape"),
            };
            assert_eq!(va, vb);
        }
    }

    #[test]
    fn refine_never_worse_than_seed() {
        let params = Params::new(2.0, 3.0, 3, 0.0, 1.0).unwrap();
        let grid = Arc::new(make_grid(&params, 64).unwrap());
        let shape = TrialShape::Power { a: 2.0, c: 0.0 };
        let objective = |u: &RadialField| -> f64 {
            crate::domain::lq_norm(u, 2.0) / crate::domain::grad_norm_p(u, 2.0).sqrt()
        };
        let seed_val = objective(&shape.build(&grid));
        let (_, refined) = refine_shape(shape, &grid, 2.0, 60, &objective);
        assert!(refined >= seed_val);
    }
}
