//! Executes run configurations and assembles machine-readable reports.
//!
//! Reports are reproducible: everything outside the `timing` field is a
//! deterministic function of (config, seed, version).

use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cones::{decompose_dual, is_positive_definite, PdMethod};
use crate::config::{
    CheckPdConfig, DecomposeConfig, ParsevalConfig, ReveszConfig, RunConfig, WienerConfig,
};
use crate::error::ConeDualError;
use crate::revesz::{run_bracket, ReveszProblem};
use crate::seqcore::{MultiIndex, SymmetricSequence};
use crate::trig::{fourier_eval, parseval_check, AtomicMeasure, TorusGrid, DEFAULT_EPS_PD};
use crate::wiener::run_wiener_bracket;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG_ERROR: i32 = 1;
pub const EXIT_SOUNDNESS_FAILURE: i32 = 2;

/// Knobs the CLI may override on top of the config file.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub eps_pd: f64,
    pub workers: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: None,
            eps_pd: DEFAULT_EPS_PD,
            workers: None,
        }
    }
}

/// A completed run: the deterministic report, its CSV projection (when the
/// command produces a bracket table), and wall-clock metadata.
pub struct RunArtifacts {
    pub report: Value,
    pub csv: Option<String>,
}

fn report_shell(config: &RunConfig, eps_pd: f64, result: Value, levels_ms: Vec<u128>) -> Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(config).unwrap(),
        "tolerances": {
            "eps_pd": eps_pd,
            "eps_feas": crate::lp::DEFAULT_EPS_FEAS,
            "pivot_tol": crate::lp::DEFAULT_PIVOT_TOL,
        },
        "result": result,
        "timing": {
            "timestamp_ms": std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0),
            "wall_clock_per_level_ms": levels_ms,
        },
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serialization")
}

pub fn execute(config: &RunConfig, opts: &RunOptions) -> Result<RunArtifacts, ConeDualError> {
    match config {
        RunConfig::Revesz(c) => run_revesz(config, c, opts),
        RunConfig::Wiener(c) => run_wiener(config, c, opts),
        RunConfig::CheckPd(c) => run_check_pd(config, c, opts),
        RunConfig::Decompose(c) => run_decompose(config, c, opts),
        RunConfig::ParsevalTest(c) => run_parseval(config, c, opts),
    }
}

fn run_revesz(
    config: &RunConfig,
    c: &ReveszConfig,
    opts: &RunOptions,
) -> Result<RunArtifacts, ConeDualError> {
    if c.g_schedule.is_empty() {
        return Err(ConeDualError::Config("empty grid schedule".into()));
    }
    let first_g = c.g_schedule[0];
    let mut problem = ReveszProblem::new(
        c.dim,
        c.m.clone(),
        c.l.clone(),
        c.r.clone(),
        TorusGrid::new(c.dim, first_g)?,
    )?;
    problem.window_half_width = c.window_half_width;
    problem.eps_pd = opts.eps_pd;

    let start = Instant::now();
    let bracket = run_bracket(&problem, &c.g_schedule)?;
    let elapsed = start.elapsed().as_millis();

    let mut csv = String::from(
        "grid_points,alpha_relaxed,alpha_certified,omega_relaxed,omega_certified,gap\n",
    );
    for lvl in &bracket.trace {
        csv.push_str(&format!(
            "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            lvl.grid_points,
            lvl.alpha_relaxed,
            lvl.alpha_certified,
            lvl.omega_relaxed,
            lvl.omega_certified,
            lvl.gap
        ));
    }
    let result = json!({
        "kind": "revesz-bracket",
        "bounds": {
            "alpha_certified": { "value": bracket.alpha_certified, "direction": "UPPER", "method": "mixture-with-delta" },
            "omega_certified": { "value": bracket.omega_certified, "direction": "LOWER", "method": "origin-shift" },
        },
        "bracket": to_value(&bracket),
    });
    Ok(RunArtifacts {
        report: report_shell(config, opts.eps_pd, result, vec![elapsed]),
        csv: Some(csv),
    })
}

fn run_wiener(
    config: &RunConfig,
    c: &WienerConfig,
    opts: &RunOptions,
) -> Result<RunArtifacts, ConeDualError> {
    if c.r_schedule.len() != c.g_schedule.len() || c.r_schedule.is_empty() {
        return Err(ConeDualError::Config(
            "R and G schedules must be the same nonzero length".into(),
        ));
    }
    let schedule: Vec<(usize, usize)> = c
        .r_schedule
        .iter()
        .copied()
        .zip(c.g_schedule.iter().copied())
        .collect();
    let seed = opts.seed.unwrap_or(c.seed);

    let start = Instant::now();
    let bracket = run_wiener_bracket(c.l, c.n, &schedule, c.budget, seed, opts.eps_pd)?;
    let elapsed = start.elapsed().as_millis();

    let mut csv = String::from("R,grid_points,upper,lower\n");
    for lvl in &bracket.trace {
        csv.push_str(&format!(
            "{},{},{:.17e},{:.17e}\n",
            lvl.r, lvl.grid_points, lvl.upper, bracket.lower
        ));
    }
    let result = json!({
        "kind": "wiener-bracket",
        "bounds": {
            "lower": { "value": bracket.lower, "direction": "LOWER", "method": "autocorrelation-search" },
            "upper": { "value": bracket.upper, "direction": "UPPER", "method": "dual-lp-certified" },
        },
        "bracket": to_value(&bracket),
        "note": "a grid-relaxed primal window LP is deliberately not reported: it bounds C(L,N) from neither side",
    });
    Ok(RunArtifacts {
        report: report_shell(config, opts.eps_pd, result, vec![elapsed]),
        csv: Some(csv),
    })
}

fn run_check_pd(
    config: &RunConfig,
    c: &CheckPdConfig,
    opts: &RunOptions,
) -> Result<RunArtifacts, ConeDualError> {
    let grid = TorusGrid::new(c.sequence.dim(), c.g)?;
    let start = Instant::now();
    let status = is_positive_definite(&c.sequence, &grid, opts.eps_pd);
    let elapsed = start.elapsed().as_millis();

    let mut result = json!({
        "kind": "pd-check",
        "status": to_value(&status.certified.status),
        "method": match status.method {
            PdMethod::L1Bound => "L1_BOUND",
            PdMethod::GridCertificate => "GRID_CERTIFICATE",
        },
        "grid_min": status.certified.grid_min,
        "margin": status.certified.margin,
    });
    if status.is_refuted() {
        let witness_value = fourier_eval(&c.sequence, &status.certified.argmin);
        result["witness"] = json!({
            "x": status.certified.argmin,
            "value": witness_value,
        });
    }
    Ok(RunArtifacts {
        report: report_shell(config, opts.eps_pd, result, vec![elapsed]),
        csv: None,
    })
}

fn run_decompose(
    config: &RunConfig,
    c: &DecomposeConfig,
    opts: &RunOptions,
) -> Result<RunArtifacts, ConeDualError> {
    let grid = TorusGrid::new(1, c.g)?;
    let start = Instant::now();
    let decomposition = decompose_dual(&c.phi, c.window_half_width, &grid, opts.eps_pd)?;
    let elapsed = start.elapsed().as_millis();

    let result = match decomposition {
        Some(dec) => json!({
            "kind": "dual-decomposition",
            "feasible": true,
            "g": to_value(&dec.g),
            "h": to_value(&dec.h),
            "h_certificate": to_value(&dec.h_certificate),
        }),
        None => json!({
            "kind": "dual-decomposition",
            "feasible": false,
            "note": "failure at this window/grid does not prove membership fails",
        }),
    };
    Ok(RunArtifacts {
        report: report_shell(config, opts.eps_pd, result, vec![elapsed]),
        csv: None,
    })
}

/// Random (f, ν) pair used by the parseval-test command and the test suite.
pub fn random_parseval_pair(
    rng: &mut impl Rng,
    support_radius: usize,
    atoms: usize,
) -> (SymmetricSequence, AtomicMeasure) {
    let mut f = SymmetricSequence::zero(1);
    for k in 0..=support_radius {
        f.set(MultiIndex::new(vec![k as i64]), rng.gen_range(-1.0..1.0));
    }
    let atom_list: Vec<(Vec<f64>, f64)> = (0..atoms)
        .map(|_| {
            (
                vec![rng.gen_range(0.0..2.0 * std::f64::consts::PI)],
                rng.gen_range(0.0..1.0),
            )
        })
        .collect();
    (f, AtomicMeasure::new(atom_list).expect("nonnegative weights"))
}

fn run_parseval(
    config: &RunConfig,
    c: &ParsevalConfig,
    opts: &RunOptions,
) -> Result<RunArtifacts, ConeDualError> {
    let seed = opts.seed.unwrap_or(c.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = 0usize;
    for _ in 0..c.trials {
        let (f, nu) = random_parseval_pair(&mut rng, c.support_radius, c.atoms);
        let (lhs, rhs) = parseval_check(&f, &nu)?;
        let rel = (lhs - rhs).abs() / (1.0 + lhs.abs());
        worst = worst.max(rel);
        if rel > 1e-10 {
            failures += 1;
        }
    }
    let elapsed = start.elapsed().as_millis();
    if failures > 0 {
        return Err(ConeDualError::Soundness(format!(
            "{failures} of {} Parseval trials exceeded the 1e-10 contract",
            c.trials
        )));
    }
    let result = json!({
        "kind": "parseval-test",
        "trials": c.trials,
        "worst_relative_mismatch": worst,
        "contract": 1e-10,
    });
    Ok(RunArtifacts {
        report: report_shell(config, opts.eps_pd, result, vec![elapsed]),
        csv: None,
    })
}

/// Loads a config, runs it, writes `report.json` (and `bracket.csv` when the
/// command produces a table) into `out_dir`. Returns the process exit code.
pub fn run_config_file(config_path: &Path, out_dir: &Path, opts: &RunOptions) -> i32 {
    let write_error_record = |message: String, kind: &str| {
        let record = json!({ "error": message, "kind": kind });
        let _ = std::fs::create_dir_all(out_dir);
        let _ = std::fs::write(
            out_dir.join("error.json"),
            serde_json::to_string_pretty(&record).unwrap(),
        );
    };
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            log::error!("cannot read config {}: {e}", config_path.display());
            write_error_record(
                format!("cannot read config {}: {e}", config_path.display()),
                "config-or-runtime",
            );
            return EXIT_CONFIG_ERROR;
        }
    };
    let config: RunConfig = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => {
            log::error!("malformed config: {e}");
            write_error_record(format!("malformed config: {e}"), "config-or-runtime");
            return EXIT_CONFIG_ERROR;
        }
    };
    if let Some(workers) = opts.workers {
        // Ignore failure: the global pool may already be initialized.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
    match execute(&config, opts) {
        Ok(artifacts) => {
            if let Err(e) = std::fs::create_dir_all(out_dir) {
                log::error!("cannot create output directory: {e}");
                return EXIT_CONFIG_ERROR;
            }
            let report_path = out_dir.join("report.json");
            let json = serde_json::to_string_pretty(&artifacts.report).unwrap();
            if let Err(e) = std::fs::write(&report_path, json) {
                log::error!("cannot write report: {e}");
                return EXIT_CONFIG_ERROR;
            }
            if let Some(csv) = artifacts.csv {
                if let Err(e) = std::fs::write(out_dir.join("bracket.csv"), csv) {
                    log::error!("cannot write csv: {e}");
                    return EXIT_CONFIG_ERROR;
                }
            }
            EXIT_OK
        }
        Err(e) => {
            // Structured error record instead of a partial report.
            let record = json!({
                "error": e.to_string(),
                "kind": match &e {
                    ConeDualError::Soundness(_) => "soundness",
                    _ => "config-or-runtime",
                },
            });
            let _ = std::fs::create_dir_all(out_dir);
            let _ = std::fs::write(
                out_dir.join("error.json"),
                serde_json::to_string_pretty(&record).unwrap(),
            );
            log::error!("{e}");
            match e {
                ConeDualError::Soundness(_) => EXIT_SOUNDNESS_FAILURE,
                _ => EXIT_CONFIG_ERROR,
            }
        }
    }
}
