//! Command-line shell: constants tables, classification, full runs, config
//! sweeps, and the auxiliary-lemma verification suites.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use wellpde::checkers::{concavity_blowup_oracle, verify_log_inequalities};
use wellpde::config::{load_config, ExperimentConfig};
use wellpde::constants::{estimate_c_hardy, hardy_gradient_exponent, hardy_sobolev_ratio};
use wellpde::domain::make_grid;
use wellpde::error::{Error, Result};
use wellpde::experiment::{compute_constants, run_and_emit};
use wellpde::functionals::evaluate;
use wellpde::nehari::{classify, default_tol, estimate_d};
use wellpde::profiles::build_profile;
use wellpde::report::constants_text;
use wellpde::trials::trial_members;

#[derive(Parser)]
#[command(name = "wellpde", about = "Potential-well laboratory for a singular p-Laplacian flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's grid resolution.
    #[arg(long)]
    grid_cells: Option<usize>,
    /// Output directory for artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate every well constant and print the table.
    Constants(Common),
    /// Classify the configured initial datum against the potential well.
    Classify(Common),
    /// Run the full experiment and write all artifacts.
    Run(Common),
    /// Run every .toml config in a directory, in parallel.
    Sweep(Common),
    /// Self-contained verification of the auxiliary lemmas.
    VerifyLemmas {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = load_config(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(cells) = common.grid_cells {
        cfg.grid_cells = cells;
        if cells < 4 {
            return Err(Error::Config(format!(
                "grid_cells must be at least 4 (got {})",
                cells
            )));
        }
    }
    Ok(cfg)
}

fn cmd_constants(common: &Common) -> Result<()> {
    let cfg = load(common)?;
    let wc = compute_constants(&cfg)?;
    print!("{}", constants_text(&wc));
    Ok(())
}

fn cmd_classify(common: &Common) -> Result<()> {
    let cfg = load(common)?;
    let params = cfg.params()?;
    let grid = std::sync::Arc::new(make_grid(&params, cfg.grid_cells)?);
    let u0 = build_profile(&cfg.initial, &grid)?;
    let rep = evaluate(&u0, &params);
    let d_ref = if u0.is_zero() {
        0.0
    } else {
        estimate_d(&grid, &params, cfg.constants.family_size, cfg.seed)?
    };
    let verdict = classify(&u0, &params, d_ref, default_tol(rep.grad_p));
    println!(
        "{}",
        serde_json::to_string_pretty(&verdict).map_err(|e| Error::Parse(e.to_string()))?
    );
    Ok(())
}

fn cmd_run(common: &Common) -> Result<()> {
    let cfg = load(common)?;
    let outcome = run_and_emit(&cfg, &common.out)?;
    println!(
        "verdict: {:?}  classification: {:?}  bounds: {}",
        outcome.trajectory.verdict,
        outcome.report.classification.label,
        outcome.report.bound_reports.len()
    );
    Ok(())
}

fn cmd_sweep(common: &Common) -> Result<()> {
    let mut configs: Vec<PathBuf> = std::fs::read_dir(&common.config)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map_or(false, |x| x == "toml"))
        .collect();
    configs.sort();
    if configs.is_empty() {
        return Err(Error::Config(format!(
            "no .toml configs found in {}",
            common.config.display()
        )));
    }
    let results: Vec<Result<String>> = configs
        .par_iter()
        .map(|path| {
            let mut cfg = load_config(path)?;
            if let Some(seed) = common.seed {
                cfg.seed = seed;
            }
            if let Some(cells) = common.grid_cells {
                cfg.grid_cells = cells;
            }
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "run".into());
            let out_dir = common.out.join(&stem);
            let outcome = run_and_emit(&cfg, &out_dir)?;
            Ok(format!("{}: {:?}", stem, outcome.trajectory.verdict))
        })
        .collect();
    let mut first_err = None;
    for r in results {
        match r {
            Ok(line) => println!("{}", line),
            Err(e) => {
                eprintln!("sweep member failed: {}", e);
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    first_err.map_or(Ok(()), Err)
}

fn cmd_verify_lemmas(samples: usize, seed: u64) -> Result<()> {
    // Logarithmic inequalities.
    let log_rep = verify_log_inequalities(samples, seed);
    if log_rep.violations > 0 {
        return Err(Error::Numerical(format!(
            "log inequalities violated {} times (max slack {})",
            log_rep.violations, log_rep.max_slack
        )));
    }
    println!(
        "log inequalities: {} samples, 0 violations, max slack {:.3e}",
        log_rep.samples, log_rep.max_slack
    );

    // Concavity blow-up ODE.
    for theta in [0.5, 1.0, 2.0] {
        let (t2, obs) = concavity_blowup_oracle(theta, 1.0, 1.0);
        if !(obs <= t2 * (1.0 + 1e-3)) {
            return Err(Error::Numerical(format!(
                "concavity oracle exceeded its bound: theta = {}, t2 = {}, observed = {}",
                theta, t2, obs
            )));
        }
        println!("concavity theta = {}: bound t2 = {:.6}, observed {:.6}", theta, t2, obs);
    }

    // Hardy-Sobolev: the estimated constant dominates the quotient of every
    // trial member it was built from.
    let params = wellpde::domain::Params::new(2.0, 3.0, 3, 1.0, 1.0)?;
    let grid = std::sync::Arc::new(make_grid(&params, 64)?);
    let est = estimate_c_hardy(&grid, &params, 8)?;
    let n = hardy_gradient_exponent(&params);
    for shape in trial_members(8, params.p) {
        let u = shape.build(&grid);
        let ratio = hardy_sobolev_ratio(&u, &params, params.s, n)?;
        if ratio > est * (1.0 + 1e-12) {
            return Err(Error::Numerical(format!(
                "Hardy-Sobolev estimate {} fails to dominate trial quotient {}",
                est, ratio
            )));
        }
    }
    println!("hardy-sobolev: estimate {:.6e} dominates all trial quotients", est);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Constants(c) => cmd_constants(c),
        Command::Classify(c) => cmd_classify(c),
        Command::Run(c) => cmd_run(c),
        Command::Sweep(c) => cmd_sweep(c),
        Command::VerifyLemmas { samples, seed } => cmd_verify_lemmas(*samples, *seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
