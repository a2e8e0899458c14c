//! Config-driven experiment runner behind the command-line interface.
//!
//! Each mode writes CSV tables plus a `manifest.json` listing every file with
//! its SHA-256, so identical configurations give identical data files.

pub mod config;
pub mod output;
pub mod validate;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use crate::analysis::{
    self, convergence_exponents, cross_concurrence_first_pair_analytic, fit_alpha,
    ness_summary, scaling_collapse, threshold_magnetization, xi_current_relation, NessSummary,
    ProfileAtTime,
};
use crate::dynamics::{
    self, check_trajectory, max_step, propagate_rk4, DiscreteRip, ExactPropagator, Method,
    Snapshot, Trajectory,
};
use crate::error::Error;
use crate::model::{initial_correlation, CorrelationMatrix, SystemSpec};
use crate::observables::{
    chain_magnetization, cross_concurrence_profile, current_profile,
    longitudinal_concurrence_profile, magnetization_profile,
};
use config::{ConfigError, ExperimentConfig, Integrator, Mode, Observable, SweepAxis};
use output::{
    AggregateRow, PointFailure, ProfileRow, RunManifest, SeriesRow, AGGREGATE_FILE,
    PROFILES_FILE, SERIES_FILE,
};
use validate::{Oracles, ValidationReport};

/// Directory used when neither `--out` nor `output_dir` is given.
pub const DEFAULT_OUTPUT_DIR: &str = "replichain-out";
pub const VALIDATION_FILE: &str = "validation.json";
pub const ANALYSIS_FILE: &str = "analysis.json";

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub threads: usize,
    pub quiet: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            config: None,
            out: None,
            threads: 1,
            quiet: true,
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numerical(Error),
    Io(io::Error),
    /// The oracle suite ran and some checks failed.
    Validation(ValidationReport),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) => 1,
            RunError::Config(_) => 2,
            RunError::Numerical(_) | RunError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "configuration error: {e}"),
            RunError::Numerical(e) => write!(f, "numerical error: {e}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
            RunError::Validation(r) => {
                let names: Vec<&str> = r.failed().iter().map(|c| c.name.as_str()).collect();
                write!(f, "validation failed: {}", names.join(", "))
            }
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e)
    }
}

/// Library errors: bad parameters are configuration errors, the rest numerical.
impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } => RunError::Config(e.into()),
            other => RunError::Numerical(other),
        }
    }
}

struct Context {
    out: PathBuf,
    manifest: RunManifest,
    quiet: bool,
    threads: usize,
}

impl Context {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

/// Runs one mode end to end and writes its manifest.
pub fn run(mode: Mode, options: &RunOptions) -> Result<RunManifest, RunError> {
    run_with_oracles(mode, options, &Oracles::default())
}

pub fn run_with_oracles(
    mode: Mode,
    options: &RunOptions,
    oracles: &Oracles,
) -> Result<RunManifest, RunError> {
    let start = Instant::now();
    if options.threads == 0 {
        return Err(ConfigError::new("threads", "must be at least 1").into());
    }
    let (config, digest) = match &options.config {
        Some(path) => {
            let bytes = fs::read(path).map_err(|e| {
                ConfigError::new("config", format!("cannot read {}: {e}", path.display()))
            })?;
            let text = String::from_utf8(bytes.clone())
                .map_err(|_| ConfigError::new("config", "file is not UTF-8"))?;
            let cfg = ExperimentConfig::parse(&text)?;
            cfg.check_for(mode)?;
            (Some(cfg), Some(output::sha256_hex(&bytes)))
        }
        None if mode == Mode::Validate => (None, None),
        None => return Err(ConfigError::new("config", "--config is required for this mode").into()),
    };
    let out = options
        .out
        .clone()
        .or_else(|| config.as_ref().and_then(|c| c.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    fs::create_dir_all(&out)?;
    let mut ctx = Context {
        out,
        manifest: RunManifest::new(mode.name(), digest, options.threads),
        quiet: options.quiet,
        threads: options.threads,
    };
    let result = match (mode, &config) {
        (Mode::Validate, _) => run_validate(&mut ctx, oracles),
        (Mode::Simulate, Some(cfg)) => run_simulate(&mut ctx, cfg),
        (Mode::Steady, Some(cfg)) => run_steady(&mut ctx, cfg),
        (Mode::Sweep, Some(cfg)) => run_sweep(&mut ctx, cfg),
        (Mode::Analyze, Some(cfg)) => run_analyze(&mut ctx, cfg),
        (_, None) => unreachable!("config presence checked above"),
    };
    ctx.manifest.wall_seconds = start.elapsed().as_secs_f64();
    ctx.manifest.write(&ctx.out)?;
    result.map(|()| ctx.manifest)
}

fn profile_rows<'a>(time: f64, observable: &str, values: &'a [f64]) -> impl Iterator<Item = ProfileRow> + 'a {
    let observable = observable.to_string();
    values.iter().enumerate().map(move |(p, &value)| ProfileRow {
        time,
        p,
        observable: observable.clone(),
        value,
    })
}

fn series_rows<'a>(time: f64, observable: &str, values: &'a [f64]) -> impl Iterator<Item = SeriesRow> + 'a {
    let observable = observable.to_string();
    values.iter().enumerate().map(move |(index, &value)| SeriesRow {
        time,
        index,
        observable: observable.clone(),
        value,
    })
}

/// Series (per site / per bond) and profile (per pair distance) rows of one state.
fn state_rows(
    time: f64,
    g: &CorrelationMatrix,
    spec: &SystemSpec,
    observables: &[Observable],
    series: &mut Vec<SeriesRow>,
    profiles: &mut Vec<ProfileRow>,
) -> Result<(), Error> {
    for obs in observables {
        match obs {
            Observable::Magnetization => {
                series.extend(series_rows(time, "magnetization", &magnetization_profile(g)));
            }
            Observable::Current => {
                let j = current_profile(g, spec)?;
                series.extend(series_rows(time, "current_chain1", &j.chain1));
                series.extend(series_rows(time, "current_chain2", &j.chain2));
            }
            Observable::CrossConcurrence => {
                profiles.extend(profile_rows(time, "cross_concurrence", &cross_concurrence_profile(g)?));
            }
            Observable::LongitudinalConcurrence => {
                profiles.extend(profile_rows(
                    time,
                    "longitudinal_concurrence",
                    &longitudinal_concurrence_profile(g)?,
                ));
            }
        }
    }
    Ok(())
}

fn write_tables(
    ctx: &mut Context,
    dir: &Path,
    series: &[SeriesRow],
    profiles: &[ProfileRow],
) -> Result<(), RunError> {
    let rel = dir.strip_prefix(&ctx.out).unwrap_or(Path::new("")).to_path_buf();
    if !series.is_empty() {
        output::write_series(&dir.join(SERIES_FILE), series)?;
        ctx.manifest.record(&ctx.out, rel.join(SERIES_FILE))?;
    }
    if !profiles.is_empty() {
        output::write_profiles(&dir.join(PROFILES_FILE), profiles)?;
        ctx.manifest.record(&ctx.out, rel.join(PROFILES_FILE))?;
    }
    Ok(())
}

fn discrete_trajectory(spec: &SystemSpec, g0: &CorrelationMatrix, times: &[f64]) -> Result<Trajectory, Error> {
    let rip = DiscreteRip::new(spec)?;
    let tau = rip.tau();
    let mut g = g0.clone();
    let mut done = 0usize;
    let mut snapshots = Vec::with_capacity(times.len());
    for &t in times {
        let target = (t / tau).round() as usize;
        while done < target {
            g = rip.step(&g)?;
            done += 1;
        }
        snapshots.push(Snapshot {
            time: t,
            state: g.clone(),
        });
    }
    Ok(Trajectory {
        spec: spec.clone(),
        method: Method::Discrete { tau },
        snapshots,
    })
}

fn run_simulate(ctx: &mut Context, cfg: &ExperimentConfig) -> Result<(), RunError> {
    let spec = cfg.spec()?;
    let times = cfg.times()?;
    let g0 = initial_correlation(&spec);
    ctx.note(format!(
        "simulate: N = {}, gamma = {}, {} samples up to t = {}",
        spec.sites(),
        spec.coupling(),
        times.len(),
        times[times.len() - 1]
    ));
    let traj = match cfg.integrator {
        Integrator::Exact => ExactPropagator::new(&spec)?.trajectory(&g0, &times)?,
        Integrator::Rk4 => propagate_rk4(&g0, &spec, &times, cfg.dt.unwrap_or_else(|| max_step(&spec)))?,
        Integrator::Discrete => discrete_trajectory(&spec, &g0, &times)?,
    };
    check_trajectory(&traj)?;
    let mut series = Vec::new();
    let mut profiles = Vec::new();
    for s in &traj.snapshots {
        state_rows(s.time, &s.state, &spec, &cfg.observables, &mut series, &mut profiles)?;
    }
    let out = ctx.out.clone();
    write_tables(ctx, &out, &series, &profiles)?;
    ctx.manifest.summary = json!({
        "integrator": cfg.integrator,
        "samples": traj.len(),
        "sites": spec.sites(),
        "gamma": spec.coupling(),
    });
    Ok(())
}

fn run_steady(ctx: &mut Context, cfg: &ExperimentConfig) -> Result<(), RunError> {
    let spec = cfg.spec()?;
    ctx.note(format!("steady: Lyapunov solve for N = {}", spec.sites()));
    let g = dynamics::steady_state(&spec)?;
    let mut series = Vec::new();
    let mut profiles = Vec::new();
    state_rows(f64::INFINITY, &g, &spec, &cfg.observables, &mut series, &mut profiles)?;
    let out = ctx.out.clone();
    write_tables(ctx, &out, &series, &profiles)?;
    let map = spec.index_map();
    let mut off_mirror = 0.0f64;
    for i in 0..spec.dim() {
        for j in 0..spec.dim() {
            if i != j && j != map.mirror_site(i) {
                off_mirror = off_mirror.max(g.get(i, j).norm());
            }
        }
    }
    let cc = cross_concurrence_profile(&g)?;
    let min_cc = cc.iter().copied().fold(f64::INFINITY, f64::min);
    ctx.manifest.summary = json!({
        "min_cross_concurrence": min_cc,
        "max_off_mirror_correlation": off_mirror,
        "distance_to_bell_pairs": g.distance(&dynamics::analytic_steady_state(spec.sites())),
    });
    Ok(())
}

fn ness_rows(s: &NessSummary, spec: &SystemSpec) -> Result<Vec<ProfileRow>, Error> {
    let mut rows: Vec<ProfileRow> = profile_rows(s.time, "magnetization", &s.magnetization).collect();
    let prop = ExactPropagator::new(spec)?;
    let g = prop.evolve(&initial_correlation(spec), s.time)?;
    rows.extend(profile_rows(s.time, "current", &current_profile(&g, spec)?.chain1));
    rows.extend(profile_rows(s.time, "cross_concurrence", &s.cross_concurrence));
    Ok(rows)
}

fn run_sweep(ctx: &mut Context, cfg: &ExperimentConfig) -> Result<(), RunError> {
    let sweep = cfg.sweep.clone().expect("checked by check_for");
    ctx.note(format!(
        "sweep: {} points along {:?} on {} thread(s)",
        sweep.grid.len(),
        sweep.axis,
        ctx.threads
    ));
    let specs: Vec<Result<SystemSpec, ConfigError>> = sweep
        .grid
        .iter()
        .map(|&v| match sweep.axis {
            SweepAxis::Gamma => cfg.spec_with(v, cfg.mu),
            SweepAxis::Mu => cfg.spec_with(cfg.gamma, v),
        })
        .collect();
    let specs = specs.into_iter().collect::<Result<Vec<_>, _>>()?;
    let out = ctx.out.clone();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.threads)
        .build()
        .map_err(io::Error::other)?;
    // each point stages its own directory; aggregation below follows grid order
    let results: Vec<Result<NessSummary, String>> = pool.install(|| {
        specs
            .par_iter()
            .enumerate()
            .map(|(k, spec)| {
                let point = || -> Result<NessSummary, RunError> {
                    let s = ness_summary(spec)?;
                    let dir = out.join(point_dir(k));
                    fs::create_dir_all(&dir)?;
                    output::write_profiles(&dir.join(PROFILES_FILE), &ness_rows(&s, spec)?)?;
                    Ok(s)
                };
                point().map_err(|e| e.to_string())
            })
            .collect()
    });

    let mut rows = Vec::with_capacity(results.len());
    let mut ok = Vec::new();
    for (k, (res, &v)) in results.iter().zip(&sweep.grid).enumerate() {
        match res {
            Ok(s) => {
                let xi = s.xi.as_ref().map_or(f64::NAN, |f| f.estimate);
                rows.push(AggregateRow {
                    gamma_or_mu: v,
                    xi,
                    j_star: s.j_star,
                    beta: xi * s.j_star,
                    cc0: s.cross_concurrence[0],
                });
                let mut point = RunManifest::new("sweep-point", ctx.manifest.config_digest.clone(), 1);
                let dir = ctx.out.join(point_dir(k));
                point.record(&dir, PROFILES_FILE)?;
                point.summary = json!({ "value": v, "ness": s });
                point.write(&dir)?;
                ctx.manifest.record(&ctx.out, Path::new(&point_dir(k)).join(PROFILES_FILE))?;
                ok.push(s.clone());
            }
            Err(e) => {
                ctx.note(format!("point {k} ({v}) failed: {e}"));
                rows.push(AggregateRow {
                    gamma_or_mu: v,
                    xi: f64::NAN,
                    j_star: f64::NAN,
                    beta: f64::NAN,
                    cc0: f64::NAN,
                });
                ctx.manifest.failures.push(PointFailure {
                    index: k,
                    value: v,
                    error: e.clone(),
                });
            }
        }
    }
    output::write_aggregate(&ctx.out.join(AGGREGATE_FILE), &rows)?;
    ctx.manifest.record(&ctx.out, AGGREGATE_FILE)?;

    let with_xi: Vec<NessSummary> = ok.iter().filter(|s| s.xi.is_some()).cloned().collect();
    let beta = xi_current_relation(&with_xi).ok();
    let first_pair = match sweep.axis {
        SweepAxis::Mu => {
            let alpha = fit_alpha(&cfg.spec_with(cfg.gamma, 1.0)?).ok();
            alpha.map(|a| {
                json!({
                    "alpha": a,
                    "threshold_mu": threshold_magnetization(a),
                    "predicted_cc0": sweep.grid.iter()
                        .map(|&mu| cross_concurrence_first_pair_analytic(a, mu))
                        .collect::<Vec<_>>(),
                })
            })
        }
        SweepAxis::Gamma => None,
    };
    ctx.manifest.summary = json!({
        "axis": sweep.axis,
        "points": sweep.grid.len(),
        "failed": ctx.manifest.failures.len(),
        "beta": beta,
        "first_pair": first_pair,
    });
    Ok(())
}

fn point_dir(k: usize) -> String {
    format!("point_{k:03}")
}

fn run_analyze(ctx: &mut Context, cfg: &ExperimentConfig) -> Result<(), RunError> {
    let spec = cfg.spec()?;
    let n = spec.sites();
    ctx.note(format!("analyze: steady-state protocol at t = N = {n}"));
    let mut summary = ness_summary(&spec)?;
    let rows = ness_rows(&summary, &spec)?;
    let out = ctx.out.clone();
    write_tables(ctx, &out, &[], &rows)?;

    // exponents where the fit window [4p + 10, 0.9 N] is long enough
    for p in [5usize, 20] {
        let (lo, hi) = analysis::convergence_window(n, p);
        if hi - lo >= 20.0 {
            match convergence_exponents(&spec, p, 0.1) {
                Ok((m, j)) => {
                    if summary.m_exponent.is_none() {
                        summary.m_exponent = Some(m.clone());
                        summary.j_exponent = Some(j.clone());
                    }
                    ctx.note(format!("p = {p}: m exponent {:.3}, j exponent {:.3}", m.estimate, j.estimate));
                }
                Err(e) => ctx.note(format!("p = {p}: no exponent ({e})")),
            }
        }
    }

    // collapse of m and j on four times inside the light cone
    let collapse = if n >= 40 {
        let prop = ExactPropagator::new(&spec)?;
        let evo = prop.prepare(&initial_correlation(&spec))?;
        let times: Vec<f64> = [1.0 / 3.0, 0.5, 2.0 / 3.0, 5.0 / 6.0].iter().map(|f| f * n as f64).collect();
        let mut m = Vec::new();
        let mut j = Vec::new();
        for &t in &times {
            let g = evo.state(t);
            m.push(ProfileAtTime { time: t, values: chain_magnetization(&g) });
            j.push(ProfileAtTime { time: t, values: current_profile(&g, &spec)?.chain1 });
        }
        Some(json!({
            "times": times,
            "magnetization": scaling_collapse(&m, 0.05)?,
            "current": scaling_collapse(&j, 0.05)?,
        }))
    } else {
        None
    };
    let report = json!({ "ness": summary, "collapse": collapse });
    fs::write(
        ctx.out.join(ANALYSIS_FILE),
        serde_json::to_string_pretty(&report).map_err(io::Error::other)? + "\n",
    )?;
    ctx.manifest.record(&ctx.out, ANALYSIS_FILE)?;
    ctx.manifest.summary = json!({
        "xi": summary.xi.as_ref().map(|f| f.estimate),
        "j_star": summary.j_star,
        "cc0": summary.cross_concurrence[0],
    });
    Ok(())
}

fn run_validate(ctx: &mut Context, oracles: &Oracles) -> Result<(), RunError> {
    let report = validate::run_checks(oracles);
    for c in &report.checks {
        ctx.note(format!(
            "{} {:<32} deviation {:.3e} (tolerance {:.1e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.deviation,
            c.tolerance
        ));
    }
    fs::write(
        ctx.out.join(VALIDATION_FILE),
        serde_json::to_string_pretty(&report).map_err(io::Error::other)? + "\n",
    )?;
    ctx.manifest.record(&ctx.out, VALIDATION_FILE)?;
    ctx.manifest.summary = json!({
        "passed": report.passed(),
        "checks": report.checks.len(),
        "failed": report.failed().iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
    });
    if report.passed() {
        Ok(())
    } else {
        Err(RunError::Validation(report))
    }
}
