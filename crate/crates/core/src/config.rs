//! Experiment configuration: a flat TOML schema with a single seed driving
//! all randomness, validated before any computation.

use serde::{Deserialize, Serialize};

use crate::constants::ConstantsConfig;
use crate::domain::Params;
use crate::error::{Error, Result};
use crate::evolution::SolverConfig;
use crate::profiles::ProfileSpec;

/// Output artifact paths, relative to the run's output directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputsConfig {
    pub series_csv: String,
    pub report_json: String,
    pub constants_json: String,
    pub constants_txt: String,
    pub plot_data: String,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        OutputsConfig {
            series_csv: "series.csv".into(),
            report_json: "report.json".into(),
            constants_json: "constants.json".into(),
            constants_txt: "constants.txt".into(),
            plot_data: "plot_data.csv".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawParams {
    pub p: f64,
    pub q: f64,
    pub n: u32,
    pub s: f64,
    #[serde(default = "default_radius")]
    pub radius: f64,
}

fn default_radius() -> f64 {
    1.0
}

fn default_cells() -> usize {
    128
}

/// Full experiment description as read from disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: RawParams,
    #[serde(default = "default_cells")]
    pub grid_cells: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub initial: ProfileSpec,
    #[serde(default = "default_solver")]
    pub solver: SolverConfig,
    #[serde(default = "default_constants")]
    pub constants: ConstantsConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
}

fn default_solver() -> SolverConfig {
    SolverConfig::default()
}

fn default_constants() -> ConstantsConfig {
    ConstantsConfig::default()
}

impl ExperimentConfig {
    /// Validated Params; lists every violated regime clause.
    pub fn params(&self) -> Result<Params> {
        Params::new(
            self.params.p,
            self.params.q,
            self.params.n,
            self.params.s,
            self.params.radius,
        )
    }
}

/// Parses and validates a config document. Malformed TOML reports the
/// location; regime violations list every failed clause.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    cfg.params()?;
    cfg.solver.validate()?;
    if cfg.grid_cells < 4 {
        return Err(Error::Config(format!(
            "grid_cells must be at least 4 (got {})",
            cfg.grid_cells
        )));
    }
    if !(cfg.constants.safety_factor >= 1.0) {
        return Err(Error::Config(format!(
            "safety_factor must be at least 1 (got {})",
            cfg.constants.safety_factor
        )));
    }
    if cfg.constants.alpha_samples == 0 || cfg.constants.family_size == 0 {
        return Err(Error::Config(
            "alpha_samples and family_size must be positive".into(),
        ));
    }
    Ok(cfg)
}

pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
[params]
p = 2.0
q = 3.0
n = 3
s = 1.0
";

    #[test]
    fn minimal_config_accepted_with_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.grid_cells, 128);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.params.radius, 1.0);
        assert_eq!(cfg.initial.shape, "power");
        assert_eq!(cfg.outputs.series_csv, "series.csv");
        cfg.params().unwrap();
    }

    #[test]
    fn supercritical_q_rejected_with_clause() {
        let text = "
[params]
p = 2.0
q = 7.0
n = 3
s = 1.0
";
        match parse_config(text) {
            Err(Error::InvalidParams(clauses)) => {
                assert!(clauses.iter().any(|c| c.contains("Np/(N-p)")), "{:?}", clauses)
            }
            other => panic!("expected clause listing, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn dimension_at_p_rejected() {
        let text = "
[params]
p = 3.0
q = 4.0
n = 3
s = 1.0
";
        assert!(matches!(parse_config(text), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn malformed_toml_reports_location() {
        let err = parse_config("[params\np = 2.0").unwrap_err();
        match err {
            Error::Parse(msg) => assert!(msg.contains("line"), "{}", msg),
            other => panic!("expected parse error, got {:?}", other),
        }
    }

    #[test]
    fn full_document_round_trip() {
        let text = "
grid_cells = 64
seed = 42

[params]
p = 2.0
q = 3.0
n = 3
s = 1.0
radius = 1.0

[initial]
shape = \"bump\"
amplitude = 0.5
a = 0.4

[solver]
dt0 = 1e-3
t_max = 0.5
blowup_threshold = 1e6
dt_floor = 1e-12
theta_impl = 1.0
monitor_stride = 5

[constants]
alpha_samples = 16
family_size = 8
safety_factor = 1.25

[outputs]
series_csv = \"out.csv\"
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.grid_cells, 64);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.initial.shape, "bump");
        assert_eq!(cfg.solver.monitor_stride, 5);
        assert_eq!(cfg.outputs.series_csv, "out.csv");
        assert_eq!(cfg.outputs.report_json, "report.json");
    }

    #[test]
    fn bad_solver_and_grid_rejected() {
        let text = format!("grid_cells = 2\n{}", MINIMAL);
        assert!(matches!(parse_config(&text), Err(Error::Config(_))));

        let text2 = format!("{}\n[solver]\ndt0 = 0.0\n", MINIMAL);
        assert!(matches!(parse_config(&text2), Err(Error::Config(_))));
    }
}
