//! Initial-profile builders behind a name-keyed registry, mirroring the
//! checker registry: each builder turns a profile spec into a grid field.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{RadialField, RadialGrid};
use crate::error::{Error, Result};
use crate::trials::TrialShape;

/// Declarative description of an initial datum, as it appears in configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileSpec {
    /// Registry key: "power", "bump", "eigen", or "values".
    pub shape: String,
    /// Overall multiplier applied after the unit shape is built.
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Shape parameter (power exponent or bump width); unused by "eigen".
    #[serde(default = "one")]
    pub a: f64,
    /// Linear tilt factor of the power/bump shapes.
    #[serde(default)]
    pub c: f64,
    /// Cell values for the "values" shape; must match the grid size.
    #[serde(default)]
    pub values: Vec<f64>,
}

fn one() -> f64 {
    1.0
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec {
            shape: "power".into(),
            amplitude: 1.0,
            a: 1.0,
            c: 0.0,
            values: Vec::new(),
        }
    }
}

/// A named initial-profile builder.
pub trait ProfileBuilder: Sync + Send {
    fn name(&self) -> &'static str;
    fn build(&self, spec: &ProfileSpec, grid: &Arc<RadialGrid>) -> Result<RadialField>;
}

struct PowerProfile;
struct BumpProfile;
struct EigenProfile;
struct ValuesProfile;

impl ProfileBuilder for PowerProfile {
    fn name(&self) -> &'static str {
        "power"
    }

    fn build(&self, spec: &ProfileSpec, grid: &Arc<RadialGrid>) -> Result<RadialField> {
        if !(spec.a > 0.0) {
            return Err(Error::Config(format!("power exponent must be positive (got {})", spec.a)));
        }
        Ok(TrialShape::Power { a: spec.a, c: spec.c }
            .build(grid)
            .scaled(spec.amplitude))
    }
}

impl ProfileBuilder for BumpProfile {
    fn name(&self) -> &'static str {
        "bump"
    }

    fn build(&self, spec: &ProfileSpec, grid: &Arc<RadialGrid>) -> Result<RadialField> {
        if !(spec.a > 0.0) {
            return Err(Error::Config(format!("bump width must be positive (got {})", spec.a)));
        }
        Ok(TrialShape::Bump { a: spec.a, c: spec.c }
            .build(grid)
            .scaled(spec.amplitude))
    }
}

impl ProfileBuilder for EigenProfile {
    fn name(&self) -> &'static str {
        "eigen"
    }

    fn build(&self, spec: &ProfileSpec, grid: &Arc<RadialGrid>) -> Result<RadialField> {
        let radius = grid.radius;
        let amp = spec.amplitude;
        Ok(RadialField::from_fn(Arc::clone(grid), move |r| {
            let x = std::f64::consts::PI * r / radius;
            amp * x.sin() / x
        }))
    }
}

impl ProfileBuilder for ValuesProfile {
    fn name(&self) -> &'static str {
        "values"
    }

    fn build(&self, spec: &ProfileSpec, grid: &Arc<RadialGrid>) -> Result<RadialField> {
        if spec.values.len() != grid.cells {
            return Err(Error::Config(format!(
                "inline profile has {} values but the grid has {} cells",
                spec.values.len(),
                grid.cells
            )));
        }
        Ok(RadialField::new(Arc::clone(grid), spec.values.clone()).scaled(spec.amplitude))
    }
}

/// All registered profile builders.
pub fn registry() -> Vec<Box<dyn ProfileBuilder>> {
    vec![
        Box::new(PowerProfile),
        Box::new(BumpProfile),
        Box::new(EigenProfile),
        Box::new(ValuesProfile),
    ]
}

/// Builds the field described by `spec`, or a config error naming the
/// available shapes when the key is unknown.
pub fn build_profile(spec: &ProfileSpec, grid: &Arc<RadialGrid>) -> Result<RadialField> {
    let builders = registry();
    for b in &builders {
        if b.name() == spec.shape {
            return b.build(spec, grid);
        }
    }
    let names: Vec<&str> = builders.iter().map(|b| b.name()).collect();
    Err(Error::Config(format!(
        "unknown profile shape '{}'; available: {}",
        spec.shape,
        names.join(", ")
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_grid, Params};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn grid() -> Arc<RadialGrid> {
        let params = Params::new(2.0, 3.0, 3, 1.0, 1.0).unwrap();
        Arc::new(make_grid(&params, 32).unwrap())
    }

    #[test]
    fn power_profile_matches_formula() {
        let g = grid();
        let spec = ProfileSpec {
            shape: "power".into(),
            amplitude: 2.0,
            a: 2.0,
            c: 0.0,
            values: vec![],
        };
        let u = build_profile(&spec, &g).unwrap();
        for (i, &r) in g.centers.iter().enumerate() {
            assert_relative_eq!(u.values[i], 2.0 * (1.0 - r).powi(2), max_relative = 1e-14);
        }
    }

    #[test]
    fn eigen_profile_matches_sinc() {
        let g = grid();
        let spec = ProfileSpec {
            shape: "eigen".into(),
            ..ProfileSpec::default()
        };
        let u = build_profile(&spec, &g).unwrap();
        for (i, &r) in g.centers.iter().enumerate() {
            assert_relative_eq!(u.values[i], (PI * r).sin() / (PI * r), max_relative = 1e-14);
        }
    }

    #[test]
    fn values_profile_checks_length() {
        let g = grid();
        let mut spec = ProfileSpec {
            shape: "values".into(),
            values: vec![1.0; 3],
            ..ProfileSpec::default()
        };
        assert!(build_profile(&spec, &g).is_err());
        spec.values = vec![0.5; 32];
        let u = build_profile(&spec, &g).unwrap();
        assert!(u.values.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn unknown_shape_rejected() {
        let g = grid();
        let spec = ProfileSpec {
            shape: "mystery".into(),
            ..ProfileSpec::default()
        };
        match build_profile(&spec, &g) {
            Err(Error::Config(msg)) => assert!(msg.contains("power") && msg.contains("eigen")),
            other => panic!("expected config error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn amplitude_scales_linearly() {
        let g = grid();
        let base = ProfileSpec::default();
        let mut doubled = ProfileSpec::default();
        doubled.amplitude = 2.0;
        let u = build_profile(&base, &g).unwrap();
        let v = build_profile(&doubled, &g).unwrap();
        for i in 0..g.cells {
            assert_relative_eq!(v.values[i], 2.0 * u.values[i], max_relative = 1e-14);
        }
    }
}
