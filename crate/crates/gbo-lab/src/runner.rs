//! Run orchestration: JSON configuration, verification suites, CSV/JSON
//! artifacts, binary checkpoints, and concurrent parameter sweeps.

use std::fs;
use std::io::{Read as _, Write as _};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{monotonicity_gap, monotonicity_scale, Observables, Trajectory};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::local_mono::{dm_report, LocalMonoReport};
use crate::lp::{nonlinear_estimate_ratios, paraproduct_decompose, DyadicDecomposition};
use crate::positivity::{build_problem, extremize, ChiSpec, ExtremizerReport};
use crate::solver::{simulate, InitialData, Integrator, SimConfig, SimState, Termination};
use crate::weights::WeightFamily;

fn default_pad() -> usize {
    4
}
fn default_integrator() -> Integrator {
    Integrator::EtdRk4
}
fn default_cadence() -> usize {
    100
}
fn default_radii() -> Vec<f64> {
    vec![32.0, 64.0]
}
fn default_modes() -> Vec<usize> {
    vec![4, 8]
}
fn default_restarts() -> usize {
    8
}
fn default_samples() -> usize {
    1000
}
fn default_gap_samples() -> usize {
    200
}

/// Full run configuration: simulation parameters plus suite knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(default = "default_pad")]
    pub pad_factor: usize,
    pub k: u32,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_integrator")]
    pub integrator: Integrator,
    pub data: InitialData,
    #[serde(default = "default_cadence")]
    pub snapshot_every: usize,
    #[serde(default)]
    pub checkpoint_every: usize,
    #[serde(default)]
    pub focusing: bool,
    /// Weight core radii for the localized-functional suite.
    #[serde(default = "default_radii")]
    pub weight_radii: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_modes")]
    pub positivity_modes: Vec<usize>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Random fields drawn for the pointwise monotonicity-gap check.
    #[serde(default = "default_gap_samples")]
    pub gap_samples: usize,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k % 2 != 0 || self.k < 4 {
            return Err(Error::InvalidConfig(format!(
                "k must be even >= 4, got {}",
                self.k
            )));
        }
        if !self.n.is_power_of_two() || self.n < 16 {
            return Err(Error::InvalidConfig(format!(
                "N must be a power of two >= 16, got {}",
                self.n
            )));
        }
        if !(self.l > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "L must be positive, got {}",
                self.l
            )));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidConfig(
                "snapshot_every must be a positive number of steps".into(),
            ));
        }
        for &r in &self.weight_radii {
            if !(r > 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "weight_radii entries must exceed 1, got {r}"
                )));
            }
        }
        Ok(())
    }

    pub fn sim(&self) -> SimConfig {
        SimConfig {
            n: self.n,
            l: self.l,
            pad_factor: self.pad_factor,
            k: self.k,
            dt: self.dt,
            t_end: self.t_end,
            integrator: self.integrator,
            data: self.data.clone(),
            snapshot_every: self.snapshot_every,
            checkpoint_every: self.checkpoint_every,
            focusing: self.focusing,
            weight_r: self.weight_radii.first().copied(),
            weight_r1: self.weight_radii.first().map(|r| r.powf(0.9)),
        }
    }
}

/// Parse and validate a JSON config file; unknown keys are rejected with
/// a field-level message.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    let config: RunConfig = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    config.validate()?;
    Ok(config)
}

/// Parse a sweep file: a JSON array of run configs.
pub fn parse_sweep(path: &Path) -> Result<Vec<RunConfig>> {
    let text = fs::read_to_string(path)?;
    let configs: Vec<RunConfig> = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    if configs.is_empty() {
        return Err(Error::EmptyInput("sweep config list".into()));
    }
    for c in &configs {
        c.validate()?;
    }
    Ok(configs)
}

/// Output directory resolution: `GBO_LAB_OUT` overrides the flag, which
/// overrides the default `gbo_out`.
pub fn resolve_out_dir(cli: Option<&Path>) -> PathBuf {
    if let Ok(env) = std::env::var("GBO_LAB_OUT") {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    cli.map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("gbo_out"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RunStatus {
    Pass,
    AssertionFailure,
    Abort,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Pass => 0,
            RunStatus::AssertionFailure => 1,
            RunStatus::Abort => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Conservation,
    Monotonicity,
    LocalM,
    Positivity,
    Norms,
}

impl Suite {
    pub fn from_name(name: &str) -> Result<Suite> {
        match name {
            "conservation" | "simulate" => Ok(Suite::Conservation),
            "monotonicity" => Ok(Suite::Monotonicity),
            "local" | "local-m" => Ok(Suite::LocalM),
            "positivity" => Ok(Suite::Positivity),
            "norms" => Ok(Suite::Norms),
            other => Err(Error::InvalidConfig(format!(
                "unknown suite {other:?}; expected conservation, monotonicity, local, positivity, or norms"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Conservation => "conservation",
            Suite::Monotonicity => "monotonicity",
            Suite::LocalM => "local",
            Suite::Positivity => "positivity",
            Suite::Norms => "norms",
        }
    }

    pub fn all() -> Vec<Suite> {
        vec![
            Suite::Conservation,
            Suite::Monotonicity,
            Suite::LocalM,
            Suite::Positivity,
            Suite::Norms,
        ]
    }
}

#[derive(Debug, Serialize)]
pub struct SuiteOutcome {
    pub suite: &'static str,
    pub passed: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Serialize)]
struct AbortReport {
    suite: &'static str,
    termination: Termination,
}

// ---- checkpoints ----------------------------------------------------------

const CHECKPOINT_MAGIC: &[u8; 4] = b"GBO1";

/// Binary checkpoint: magic "GBO1", then little-endian `u32 N`, `f64 L`,
/// `f64 t`, `u32 k`, `u32 pad_factor`, and `N` coefficients as
/// `(f64 re, f64 im)` in DFT order.
pub fn write_checkpoint(state: &SimState, path: &Path) -> Result<()> {
    let grid = state.u.grid();
    let mut buf = Vec::with_capacity(4 + 4 + 8 + 8 + 4 + 4 + 16 * grid.len());
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&(grid.len() as u32).to_le_bytes());
    buf.extend_from_slice(&grid.domain_length().to_le_bytes());
    buf.extend_from_slice(&state.t.to_le_bytes());
    buf.extend_from_slice(&state.k.to_le_bytes());
    buf.extend_from_slice(&(grid.pad_factor() as u32).to_le_bytes());
    for c in state.u.coeffs() {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    let mut file = fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<SimState> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() >= 4 && &bytes[0..4] != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint(format!(
            "{}: bad magic {:?}, expected \"GBO1\"",
            path.display(),
            &bytes[0..4]
        )));
    }
    if bytes.len() < 32 {
        return Err(Error::Checkpoint(format!(
            "{}: truncated header ({} bytes)",
            path.display(),
            bytes.len()
        )));
    }
    let u32_at = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
    let f64_at = |off: usize| f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
    let n = u32_at(4) as usize;
    let l = f64_at(8);
    let t = f64_at(16);
    let k = u32_at(24);
    let pad = u32_at(28) as usize;
    let need = 32 + 16 * n;
    if bytes.len() < need {
        return Err(Error::Checkpoint(format!(
            "{}: truncated body, need {need} bytes, got {}",
            path.display(),
            bytes.len()
        )));
    }
    let grid = TorusGrid::new(n, l, pad)?;
    let coeffs: Vec<Complex64> = (0..n)
        .map(|m| {
            let off = 32 + 16 * m;
            Complex64::new(f64_at(off), f64_at(off + 8))
        })
        .collect();
    Ok(SimState {
        t,
        u: SpectralField::from_coeffs(&grid, coeffs),
        k,
        step_count: 0,
    })
}

// ---- suites ---------------------------------------------------------------

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn run_trajectory(config: &RunConfig, out: &Path, suite: &'static str) -> Result<Trajectory> {
    let outcome = simulate(&config.sim())?;
    // series + checkpoints are written even for aborted runs
    let mut csv = String::from(Observables::CSV_HEADER);
    csv.push('\n');
    for rec in &outcome.trajectory.records {
        csv.push_str(&rec.csv_row());
        csv.push('\n');
    }
    fs::write(out.join("series.csv"), csv)?;
    if config.checkpoint_every > 0 {
        let dir = out.join("checkpoints");
        fs::create_dir_all(&dir)?;
        for (i, snap) in outcome.trajectory.snapshots.iter().enumerate() {
            let step = i * config.snapshot_every;
            if step > 0 && step % config.checkpoint_every == 0 {
                let state = SimState {
                    t: outcome.trajectory.times[i],
                    u: snap.clone(),
                    k: config.k,
                    step_count: step as u64,
                };
                write_checkpoint(&state, &dir.join(format!("ckpt_{step:08}.bin")))?;
            }
        }
    }
    write_checkpoint(&outcome.last_state, &out.join("final.ckpt"))?;
    match outcome.termination {
        Termination::Completed => Ok(outcome.trajectory),
        term => {
            write_json(
                &out.join("abort.json"),
                &AbortReport {
                    suite,
                    termination: term.clone(),
                },
            )?;
            match term {
                Termination::BlowUp { t } => Err(Error::BlowUp {
                    t,
                    what: "simulation aborted".into(),
                }),
                Termination::GuardViolation { t, fraction } => {
                    Err(Error::BoundaryGuard { t, fraction })
                }
                Termination::Completed => unreachable!(),
            }
        }
    }
}

fn conservation_suite(config: &RunConfig, out: &Path) -> Result<SuiteOutcome> {
    let traj = run_trajectory(config, out, "conservation")?;
    let first = &traj.records[0];
    let last = traj.records.last().unwrap();
    let mass_drift = if first.mass > 0.0 {
        (last.mass - first.mass).abs() / first.mass
    } else {
        0.0
    };
    let energy_drift = if first.energy.abs() > 0.0 {
        (last.energy - first.energy).abs() / first.energy.abs()
    } else {
        0.0
    };
    let mean_drift = (last.mean - first.mean).abs() / (1.0 + first.mean.abs());
    let mut notes = vec![
        format!("mass drift {mass_drift:.3e}"),
        format!("energy drift {energy_drift:.3e}"),
        format!("mean drift {mean_drift:.3e}"),
    ];
    let passed = mass_drift <= 1e-6 && energy_drift <= 1e-6 && mean_drift <= 1e-8;
    if !passed {
        notes.push("conserved-quantity drift exceeded tolerance".into());
    }
    Ok(SuiteOutcome {
        suite: "conservation",
        passed,
        notes,
    })
}

#[derive(Debug, Serialize)]
struct MonotonicityReport {
    gap_samples: usize,
    min_normalized_gap: f64,
    center_checked: bool,
    min_center_increment: f64,
}

fn monotonicity_suite(config: &RunConfig, out: &Path) -> Result<SuiteOutcome> {
    let grid = TorusGrid::new(config.n.min(256), config.l, config.pad_factor)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut min_norm_gap = f64::INFINITY;
    for _ in 0..config.gap_samples {
        let data = InitialData::RandomBand {
            amp: rng.gen_range(0.1..2.0),
            modes: rng.gen_range(4..=grid.len() / 4),
            seed: rng.gen(),
        };
        let u = data.build(&grid);
        let gap = monotonicity_gap(&u, config.k);
        let scale = monotonicity_scale(&u, config.k).max(1e-300);
        min_norm_gap = min_norm_gap.min(gap / scale);
    }
    let traj = run_trajectory(config, out, "monotonicity")?;
    let (center_checked, min_increment) = if traj.records.iter().all(|r| r.centers_valid) {
        let xm = traj.unwrapped_centers(false);
        let xe = traj.unwrapped_centers(true);
        let sep: Vec<f64> = xm.iter().zip(&xe).map(|(m, e)| e - m).collect();
        let min_inc = sep
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        (true, min_inc)
    } else {
        (false, 0.0)
    };
    let report = MonotonicityReport {
        gap_samples: config.gap_samples,
        min_normalized_gap: min_norm_gap,
        center_checked,
        min_center_increment: min_increment,
    };
    write_json(&out.join("monotonicity.json"), &report)?;
    let mut passed = min_norm_gap >= -1e-10;
    let mut notes = vec![format!("min normalized gap {min_norm_gap:.3e}")];
    if center_checked {
        notes.push(format!("min center-separation increment {min_increment:.3e}"));
        passed &= min_increment >= -1e-6 * config.l;
    } else {
        notes.push("centers not meaningful for this data; separation check skipped".into());
    }
    Ok(SuiteOutcome {
        suite: "monotonicity",
        passed,
        notes,
    })
}

fn local_suite(config: &RunConfig, out: &Path) -> Result<SuiteOutcome> {
    let traj = run_trajectory(config, out, "local")?;
    let mut reports: Vec<LocalMonoReport> = Vec::new();
    let mut notes = Vec::new();
    let mut passed = true;
    for &r in &config.weight_radii {
        let w = WeightFamily::build(traj.grid(), r, r.powf(0.9))?;
        let report = dm_report(&traj, &w)?;
        let sup_m = report
            .records
            .iter()
            .map(|rec| rec.m.abs())
            .fold(0.0, f64::max);
        notes.push(format!(
            "R = {r}: sup|M|/R = {:.3e}, error budget {:.3e}",
            sup_m / r,
            report.error_budget.total()
        ));
        passed &= report.records.iter().all(|rec| rec.m.is_finite());
        reports.push(report);
    }
    for pair in reports.windows(2) {
        if pair[1].error_budget.total() >= pair[0].error_budget.total() {
            passed = false;
            notes.push(format!(
                "error budget did not decrease from R = {} to R = {}",
                pair[0].r, pair[1].r
            ));
        }
    }
    write_json(&out.join("local_mono.json"), &reports)?;
    Ok(SuiteOutcome {
        suite: "local",
        passed,
        notes,
    })
}

fn positivity_suite(config: &RunConfig, out: &Path) -> Result<SuiteOutcome> {
    let mut reports: Vec<ExtremizerReport> = Vec::new();
    let mut passed = true;
    let mut notes = Vec::new();
    for &modes in &config.positivity_modes {
        let problem = build_problem(config.k, modes, ChiSpec::One)?;
        let report = extremize(&problem, config.restarts, config.samples, config.seed);
        notes.push(format!(
            "N_modes = {modes}: f_min = {:.6e}, lagrange residual {:.3e}",
            report.f_min, report.residuals.lagrange
        ));
        passed &= report.f_min >= -1e-6
            && report.residuals.lagrange < 1e-6
            && report.residuals.pohozaev1 < 1e-6
            && report.residuals.pohozaev2 < 1e-6;
        reports.push(report);
    }
    write_json(&out.join("positivity.json"), &reports)?;
    Ok(SuiteOutcome {
        suite: "positivity",
        passed,
        notes,
    })
}

#[derive(Debug, Serialize)]
struct NormsReport {
    identity_samples: usize,
    identity_max_residual: f64,
    estimates: crate::lp::NonlinearEstimateReport,
}

fn norms_suite(config: &RunConfig, out: &Path) -> Result<SuiteOutcome> {
    let grid = TorusGrid::new(config.n.min(256), config.l, config.pad_factor)?;
    let decomp = DyadicDecomposition::with_defaults(&grid, config.k);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let samples = 25;
    let mut max_residual = 0.0f64;
    for _ in 0..samples {
        let data = InitialData::RandomBand {
            amp: rng.gen_range(0.1..1.5),
            modes: rng.gen_range(4..=grid.len() / 4),
            seed: rng.gen(),
        };
        let u = data.build(&grid);
        let split = paraproduct_decompose(&u, &decomp, config.k);
        let resid = split
            .f_of_u
            .add(&split.pi_part)
            .sub(&split.g_part)
            .l2_norm();
        let scale = split.f_of_u.l2_norm().max(1e-300);
        max_residual = max_residual.max(resid / scale);
    }
    // short linear-flow ensembles feed the estimate-ratio report
    let mut ensembles = Vec::new();
    for run in 0..3 {
        let data = InitialData::RandomBand {
            amp: 0.4,
            modes: 16,
            seed: config.seed.wrapping_add(run),
        };
        let u0 = data.build(&grid);
        let times: Vec<f64> = (0..9).map(|i| i as f64 * 0.05).collect();
        let snaps: Vec<SpectralField> =
            times.iter().map(|&t| u0.linear_propagate(t)).collect();
        ensembles.push(crate::lp::SpaceTimeArray::new(times, snaps)?);
    }
    let estimates = nonlinear_estimate_ratios(&ensembles, config.k, 0.1)?;
    let passed = max_residual <= 1e-10
        && estimates.pi_max.is_finite()
        && estimates.g_max.is_finite();
    let report = NormsReport {
        identity_samples: samples,
        identity_max_residual: max_residual,
        estimates,
    };
    write_json(&out.join("norms.json"), &report)?;
    Ok(SuiteOutcome {
        suite: "norms",
        passed,
        notes: vec![format!("max identity residual {max_residual:.3e}")],
    })
}

/// Execute the selected suites, writing artifacts under `out_dir`.
///
/// Exit semantics: `Pass` if every suite's assertions held, `AssertionFailure`
/// if any failed, `Abort` on blow-up, guard violation, or I/O failure.
pub fn run(config: &RunConfig, suites: &[Suite], out_dir: &Path) -> (RunStatus, Vec<SuiteOutcome>) {
    let mut outcomes = Vec::new();
    if let Err(e) = fs::create_dir_all(out_dir) {
        outcomes.push(SuiteOutcome {
            suite: "setup",
            passed: false,
            notes: vec![e.to_string()],
        });
        return (RunStatus::Abort, outcomes);
    }
    if let Err(e) = write_json(&out_dir.join("config.json"), config) {
        outcomes.push(SuiteOutcome {
            suite: "setup",
            passed: false,
            notes: vec![e.to_string()],
        });
        return (RunStatus::Abort, outcomes);
    }
    let mut status = RunStatus::Pass;
    for &suite in suites {
        let result = match suite {
            Suite::Conservation => conservation_suite(config, out_dir),
            Suite::Monotonicity => monotonicity_suite(config, out_dir),
            Suite::LocalM => local_suite(config, out_dir),
            Suite::Positivity => positivity_suite(config, out_dir),
            Suite::Norms => norms_suite(config, out_dir),
        };
        match result {
            Ok(outcome) => {
                if !outcome.passed {
                    status = status.max(RunStatus::AssertionFailure);
                }
                outcomes.push(outcome);
            }
            Err(e) => {
                status = RunStatus::Abort;
                outcomes.push(SuiteOutcome {
                    suite: suite.name(),
                    passed: false,
                    notes: vec![e.to_string()],
                });
            }
        }
    }
    let _ = write_json(&out_dir.join("summary.json"), &outcomes);
    (status, outcomes)
}

/// Run a list of configs concurrently; artifacts land in isolated
/// `run_NNN` subdirectories. Returns the worst status.
pub fn sweep(
    configs: &[RunConfig],
    suites: &[Suite],
    out_root: &Path,
    workers: usize,
) -> Result<RunStatus> {
    fs::create_dir_all(out_root)?;
    let next = AtomicUsize::new(0);
    let statuses: Mutex<Vec<RunStatus>> = Mutex::new(Vec::new());
    let workers = workers.max(1).min(configs.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= configs.len() {
                    break;
                }
                let dir = out_root.join(format!("run_{i:03}"));
                let (status, _) = run(&configs[i], suites, &dir);
                statuses.lock().unwrap().push(status);
            });
        }
    });
    let statuses = statuses.into_inner().unwrap();
    Ok(statuses.into_iter().max().unwrap_or(RunStatus::Pass))
}
