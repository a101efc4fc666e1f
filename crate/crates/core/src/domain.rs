//! Radially symmetric discretization of the ball and singular-weight quadrature.
//!
//! Everything downstream (functionals, constants, evolution) consumes the
//! cell-centered grid defined here. The grid deliberately places no node at
//! r = 0 so the weight r^{-s} stays finite at every quadrature point.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter quadruple (p, q, s, N) plus the ball radius.
///
/// Regime: p >= 2, 0 <= s <= 2, p < q < Np/(N-p), N > p, R > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Diffusion exponent of the p-Laplacian.
    pub p: f64,
    /// Source exponent.
    pub q: f64,
    /// Spatial dimension.
    pub n: u32,
    /// Singular-weight exponent in |x|^{-s}.
    pub s: f64,
    /// Ball radius.
    pub radius: f64,
}

impl Params {
    pub fn new(p: f64, q: f64, n: u32, s: f64, radius: f64) -> Result<Self> {
        let params = Params { p, q, n, s, radius };
        params.validate()?;
        Ok(params)
    }

    /// Checks every regime clause, collecting all violations.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.p >= 2.0) {
            bad.push(format!("p must satisfy p >= 2 (got p = {})", self.p));
        }
        if !(self.s >= 0.0 && self.s <= 2.0) {
            bad.push(format!("s must satisfy 0 <= s <= 2 (got s = {})", self.s));
        }
        if !((self.n as f64) > self.p) {
            bad.push(format!("N must satisfy N > p (got N = {}, p = {})", self.n, self.p));
        } else {
            let crit = self.sobolev_critical();
            if !(self.q > self.p) {
                bad.push(format!("q must satisfy q > p (got q = {}, p = {})", self.q, self.p));
            }
            if !(self.q < crit) {
                bad.push(format!(
                    "q must satisfy q < Np/(N-p) = {} (got q = {})",
                    crit, self.q
                ));
            }
        }
        if !(self.radius > 0.0) {
            bad.push(format!("R must be positive (got R = {})", self.radius));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(bad))
        }
    }

    /// Critical Sobolev exponent Np/(N-p).
    pub fn sobolev_critical(&self) -> f64 {
        let n = self.n as f64;
        n * self.p / (n - self.p)
    }

    /// Upper end of the admissible range for the auxiliary exponent alpha.
    pub fn alpha_max(&self) -> f64 {
        self.sobolev_critical() - self.q
    }

    pub fn dim(&self) -> f64 {
        self.n as f64
    }
}

/// Surface area of the unit (n-1)-sphere: 2 pi^{n/2} / Gamma(n/2).
pub fn unit_sphere_area(n: u32) -> f64 {
    let half = n as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma_half_integer(n)
}

/// Gamma(n/2) for integer n >= 1 via the recursion from Gamma(1/2) and Gamma(1).
fn gamma_half_integer(n: u32) -> f64 {
    let mut x = if n % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut arg = if n % 2 == 0 { 1.0 } else { 0.5 };
    while 2.0 * arg < n as f64 {
        x *= arg;
        arg += 1.0;
    }
    x
}

/// Cell-centered radial grid on (0, R): centers r_i = (i + 1/2) h, h = R/M.
///
/// Volume weights are exact shell volumes, so they telescope to |Omega|.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialGrid {
    pub cells: usize,
    pub h: f64,
    pub radius: f64,
    pub dim: u32,
    pub sphere_area: f64,
    pub centers: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialGrid {
    /// Builds a grid without the minimum-size check (used for reductions in tests).
    pub fn with_cells(params: &Params, cells: usize) -> RadialGrid {
        let h = params.radius / cells as f64;
        let omega = unit_sphere_area(params.n);
        let nf = params.n as f64;
        let centers: Vec<f64> = (0..cells).map(|i| (i as f64 + 0.5) * h).collect();
        let weights: Vec<f64> = (0..cells)
            .map(|i| {
                let lo = i as f64 * h;
                let hi = (i as f64 + 1.0) * h;
                omega * (hi.powf(nf) - lo.powf(nf)) / nf
            })
            .collect();
        RadialGrid {
            cells,
            h,
            radius: params.radius,
            dim: params.n,
            sphere_area: omega,
            centers,
            weights,
        }
    }

    /// Measure of the ball, computed exactly from the shell telescoping.
    pub fn volume(&self) -> f64 {
        self.sphere_area * self.radius.powf(self.dim as f64) / self.dim as f64
    }

    /// Radius of face i (i = 0 .. cells), face 0 at the origin.
    pub fn face_radius(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// Surface area of face i.
    pub fn face_area(&self, i: usize) -> f64 {
        self.sphere_area * self.face_radius(i).powf(self.dim as f64 - 1.0)
    }

    /// Per-cell weights for integrals against |x|^{-s}: exact shell
    /// integrals of r^{N-1-s}, finite for s < N. Reduce to the plain
    /// volume weights at s = 0 and keep the quadrature second order in h
    /// all the way to the origin cell.
    pub fn singular_weights(&self, s: f64) -> Vec<f64> {
        let e = self.dim as f64 - s;
        (0..self.cells)
            .map(|i| {
                let lo = i as f64 * self.h;
                let hi = (i as f64 + 1.0) * self.h;
                self.sphere_area * (hi.powf(e) - lo.powf(e)) / e
            })
            .collect()
    }
}

pub fn make_grid(params: &Params, cells: usize) -> Result<RadialGrid> {
    if cells < 4 {
        return Err(Error::Config(format!(
            "grid needs at least 4 cells (got {})",
            cells
        )));
    }
    Ok(RadialGrid::with_cells(params, cells))
}

/// Discrete radial profile of u at the cell centers.
///
/// The Dirichlet condition u(R) = 0 and the zero-flux symmetry condition at
/// r = 0 live in the gradient/flux closures, not in the stored values.
#[derive(Debug, Clone)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    pub values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> RadialField {
        assert_eq!(grid.cells, values.len(), "field length must match grid");
        RadialField { grid, values }
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> RadialField {
        let n = grid.cells;
        RadialField::new(grid, vec![0.0; n])
    }

    /// Samples a radial function at the cell centers.
    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> RadialField {
        let values = grid.centers.iter().map(|&r| f(r)).collect();
        RadialField::new(grid, values)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> Arc<RadialGrid> {
        Arc::clone(&self.grid)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, c: f64) -> RadialField {
        RadialField::new(self.grid_arc(), self.values.iter().map(|v| c * v).collect())
    }
}

/// Weighted L2 norm squared: integral of |x|^{-s} u^2, shell quadrature with
/// the singular factor integrated exactly per cell.
pub fn weighted_l2_sq(u: &RadialField, s: f64) -> f64 {
    let ws = u.grid().singular_weights(s);
    ws.iter().zip(&u.values).map(|(&w, &v)| w * v * v).sum()
}

/// Face gradients of u with the symmetry and Dirichlet closures.
///
/// Returns (gradient, face area, stencil length) per face i = 0 .. cells.
/// The inner face carries zero flux; the outer face differences against the
/// boundary value 0 over half a cell.
pub fn face_gradients(u: &RadialField) -> Vec<(f64, f64, f64)> {
    let g = u.grid();
    let m = g.cells;
    let h = g.h;
    let mut out = Vec::with_capacity(m + 1);
    out.push((0.0, 0.0, h)); // r = 0: zero area and zero flux
    for i in 1..m {
        out.push(((u.values[i] - u.values[i - 1]) / h, g.face_area(i), h));
    }
    out.push(((0.0 - u.values[m - 1]) / (h / 2.0), g.face_area(m), h / 2.0));
    out
}

/// Integral of |grad u|^p via face quadrature consistent with the flux form
/// of the evolution scheme. Accepts any exponent >= 1.
pub fn grad_norm_p(u: &RadialField, p: f64) -> f64 {
    face_gradients(u)
        .iter()
        .map(|&(grad, area, len)| area * len * grad.abs().powf(p))
        .sum()
}

/// Integral of |u|^e over the ball.
pub fn lq_pow(u: &RadialField, e: f64) -> f64 {
    let g = u.grid();
    g.weights
        .iter()
        .zip(&u.values)
        .map(|(&w, &v)| w * v.abs().powf(e))
        .sum()
}

/// L^e norm: (integral |u|^e)^{1/e}.
pub fn lq_norm(u: &RadialField, e: f64) -> f64 {
    lq_pow(u, e).powf(1.0 / e)
}
