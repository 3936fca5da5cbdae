use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use log::{info, warn};
use serde::Serialize;

use lotto::closed_form::{solve_closed_form, solve_degenerate_threshold};
use lotto::io::{load_json, read_profile_csv, save_json, write_cdf_table, write_strategies_csv, GameConfig};
use lotto::simulation::simulate;
use lotto::solver::{fictitious_play, Checkpoint, FictitiousPlayConfig};
use lotto::verify::{check_epsilon_nash, verify_profile, VerifyOptions};
use lotto::{BidGrid, EquilibriumProfile, LottoError, Regime};

use crate::{Format, Method};

const DEFAULT_AUDIT_K: usize = 10_000;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lotto(LottoError),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Lotto(e) => write!(f, "{e}"),
        }
    }
}

impl From<LottoError> for CliError {
    fn from(e: LottoError) -> Self {
        CliError::Lotto(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Lotto(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Lotto(e.into())
    }
}

pub enum Outcome {
    Success,
    VerificationFailed,
}

#[derive(Debug, Serialize)]
struct SolveSummary {
    method: &'static str,
    regime: Regime,
    support_top: f64,
    exploitability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    converged: Option<bool>,
    expected_bids: Vec<f64>,
    budget_slack: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    trace: Vec<Checkpoint>,
}

pub fn run_solve(
    config: &Path,
    method: Method,
    grid_k: Option<usize>,
    eps: f64,
    max_iters: usize,
    out: &Path,
) -> Result<Outcome, CliError> {
    let cfg = GameConfig::load(config)?;
    let game = cfg.game()?;
    let (profile, summary_grid, fp) = match method {
        Method::ClosedForm => {
            if game.n() > 2 && !game.threshold_binds() {
                return Err(CliError::Usage(format!(
                    "closed form needs two players or a threshold at most the largest budget; \
                     this game has {} players",
                    game.n()
                )));
            }
            (solve_closed_form(&game)?, None, None)
        }
        Method::Degenerate => {
            if !game.threshold_binds() {
                return Err(CliError::Usage("degenerate method needs a threshold at most the largest budget".into()));
            }
            (solve_degenerate_threshold(&game)?, None, None)
        }
        Method::FictitiousPlay => {
            let k = grid_k
                .or(cfg.grid_k)
                .ok_or_else(|| CliError::Usage("fictitious play needs --grid-k or grid_k in the config".into()))?;
            if k < 1 {
                return Err(CliError::Usage("grid_k must be at least 1".into()));
            }
            let grid = BidGrid::new(k, game.effective_cap())?;
            if game.threshold().is_none() {
                info!("no threshold: solving on [0, {}]", grid.cap());
            }
            let report = fictitious_play(
                &game,
                &grid,
                &FictitiousPlayConfig { max_iters, target_eps: eps, ..Default::default() },
            )?;
            if !report.converged {
                warn!("target exploitability {eps} not reached after {} iterations", report.iterations);
            }
            (report.profile.clone(), Some(k), Some(report))
        }
    };

    let exploitability = match &fp {
        Some(r) => r.exploitability,
        None => check_epsilon_nash(&profile, DEFAULT_AUDIT_K, None)?.residual,
    };
    let expected_bids: Vec<f64> = profile.strategies().iter().map(|s| s.expectation()).collect();
    let summary = SolveSummary {
        method: match method {
            Method::ClosedForm => "closed-form",
            Method::FictitiousPlay => "fictitious-play",
            Method::Degenerate => "degenerate",
        },
        regime: profile.regime(),
        support_top: profile.support_sup(),
        exploitability,
        grid_k: summary_grid,
        iterations: fp.as_ref().map(|r| r.iterations),
        converged: fp.as_ref().map(|r| r.converged),
        budget_slack: game.budgets().iter().zip(&expected_bids).map(|(b, e)| b - e).collect(),
        expected_bids,
        trace: fp.map(|r| r.trace).unwrap_or_default(),
    };

    fs::create_dir_all(out)?;
    save_json(&out.join("profile.json"), &profile)?;
    save_json(&out.join("report.json"), &summary)?;
    write_strategies_csv(&profile, BufWriter::new(File::create(out.join("strategies.csv"))?))?;
    write_cdf_table(&profile, BufWriter::new(File::create(out.join("cdf.csv"))?))?;

    println!("regime: {}", serde_json::to_value(summary.regime)?.as_str().unwrap_or_default());
    println!("L = {}", summary.support_top);
    println!("exploitability = {:.6e}", summary.exploitability);
    Ok(Outcome::Success)
}

/// Profile JSON or strategy CSV, checked against the game config when given.
fn load_profile(path: &Path, game: Option<&Path>) -> Result<EquilibriumProfile, CliError> {
    let cfg = game.map(GameConfig::load).transpose()?;
    if path.extension().is_some_and(|e| e == "json") {
        let profile: EquilibriumProfile = load_json(path)?;
        return match cfg {
            Some(cfg) => Ok(profile.with_game(cfg.game()?)?),
            None => Ok(profile),
        };
    }
    let cfg = cfg.ok_or_else(|| CliError::Usage("a strategy CSV needs --game".into()))?;
    let game = cfg.game()?;
    let grid = cfg.grid()?;
    Ok(read_profile_csv(BufReader::new(File::open(path)?), &game, grid.as_ref())?)
}

pub fn run_verify(
    profile: &Path,
    game: &Path,
    k_audit: usize,
    nash_tol: Option<f64>,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    if k_audit < 1000 {
        return Err(CliError::Usage(format!("--k-audit must be at least 1000, got {k_audit}")));
    }
    let profile = load_profile(profile, Some(game))?;
    let report = verify_profile(&profile, &VerifyOptions { k_audit, nash_tol })?;
    for c in &report.checks {
        info!(
            "{} {}: residual {:.3e} (tolerance {:.1e}) {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.residual,
            c.tolerance,
            c.details
        );
    }
    if let Some(out) = out {
        save_json(out, &report)?;
    }
    let stdout = io::stdout();
    let mut w = stdout.lock();
    serde_json::to_writer_pretty(&mut w, &report)?;
    writeln!(w)?;
    Ok(if report.overall() { Outcome::Success } else { Outcome::VerificationFailed })
}

pub fn run_simulate(profile: &Path, game: Option<&Path>, samples: u64, seed: u64) -> Result<Outcome, CliError> {
    if samples < 1 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let profile = load_profile(profile, game)?;
    let result = simulate(&profile, samples, seed)?;
    let stdout = io::stdout();
    let mut w = stdout.lock();
    serde_json::to_writer_pretty(&mut w, &result)?;
    writeln!(w)?;
    Ok(Outcome::Success)
}

pub fn run_export(profile: &Path, game: Option<&Path>, format: Format) -> Result<Outcome, CliError> {
    let profile = load_profile(profile, game)?;
    let stdout = io::stdout();
    let mut w = stdout.lock();
    match format {
        Format::Csv => write_strategies_csv(&profile, &mut w)?,
        Format::Table => write_cdf_table(&profile, &mut w)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &profile)?;
            writeln!(w)?;
        }
    }
    Ok(Outcome::Success)
}
