//! Least-squares fits: entanglement length, algebraic approach to a plateau
//! and scaling collapse.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Concurrences at or below this are excluded from the entanglement-length fit.
pub const CONCURRENCE_FIT_FLOOR: f64 = 1e-8;
/// Fewest points accepted by any fit.
pub const MIN_FIT_POINTS: usize = 4;

/// Outcome of a one-parameter fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub quantity: String,
    pub estimate: f64,
    pub std_error: f64,
    /// Inclusive range of the fitted abscissa (indices or times).
    pub window: (f64, f64),
    /// Number of points that entered the regression.
    pub points: usize,
    /// Euclidean norm of the regression residuals.
    pub residual: f64,
    pub r_squared: f64,
    pub method: String,
}

/// Ordinary least squares for `y = a + b x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_error: f64,
    pub residual: f64,
    pub r_squared: f64,
}

pub fn linear_regression(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::Fit(format!("{n} points cannot fix a line")));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let slope_error = if n > 2 {
        (ss_res / (n - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(LinearFit {
        slope,
        intercept,
        slope_error,
        residual: ss_res.sqrt(),
        r_squared,
    })
}

/// Longest run of consecutive indices whose value exceeds `floor`; the
/// earliest wins a tie.
fn longest_run_above(values: &[f64], floor: f64) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for (i, &v) in values.iter().chain(std::iter::once(&f64::NEG_INFINITY)).enumerate() {
        match (v > floor, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                let len = i - s;
                if best.is_none_or(|(b0, b1)| len > b1 - b0 + 1) {
                    best = Some((s, i - 1));
                }
                start = None;
            }
            _ => {}
        }
    }
    best
}

/// Decay length of `C(p) ∝ exp(−p/ξ)` from a profile indexed by `p`.
///
/// Fits `ln C` against `p` over the longest contiguous run above
/// [`CONCURRENCE_FIT_FLOOR`].
pub fn fit_entanglement_length(profile: &[f64]) -> Result<FitResult> {
    let (lo, hi) = longest_run_above(profile, CONCURRENCE_FIT_FLOOR)
        .ok_or_else(|| Error::Fit("no concurrence above the floor".into()))?;
    let count = hi - lo + 1;
    if count < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "only {count} consecutive pairs above the floor, need {MIN_FIT_POINTS}"
        )));
    }
    let x: Vec<f64> = (lo..=hi).map(|p| p as f64).collect();
    let y: Vec<f64> = profile[lo..=hi].iter().map(|c| c.ln()).collect();
    let line = linear_regression(&x, &y)?;
    if line.slope >= 0.0 {
        return Err(Error::Fit("concurrence does not decay with distance".into()));
    }
    let xi = -1.0 / line.slope;
    Ok(FitResult {
        quantity: "xi".into(),
        estimate: xi,
        std_error: line.slope_error / (line.slope * line.slope),
        window: (lo as f64, hi as f64),
        points: count,
        residual: line.residual,
        r_squared: line.r_squared,
        method: "log-linear least squares".into(),
    })
}

/// Indices of strict local maxima (ties broken to the right).
fn local_maxima(y: &[f64]) -> Vec<usize> {
    (1..y.len().saturating_sub(1))
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1])
        .collect()
}

struct EnvelopeFit {
    line: LinearFit,
    points: usize,
    envelope: bool,
}

fn envelope_fit(t: &[f64], q: &[f64], plateau: f64) -> Option<EnvelopeFit> {
    let dev: Vec<f64> = q.iter().map(|v| (v - plateau).abs()).collect();
    let peaks = local_maxima(&dev);
    // a monotone approach is its own envelope
    let (idx, envelope) = if peaks.len() >= MIN_FIT_POINTS {
        (peaks, true)
    } else {
        ((0..dev.len()).collect(), false)
    };
    let idx: Vec<usize> = idx.into_iter().filter(|&i| dev[i] > 0.0).collect();
    if idx.len() < MIN_FIT_POINTS {
        return None;
    }
    let x: Vec<f64> = idx.iter().map(|&i| t[i].ln()).collect();
    let y: Vec<f64> = idx.iter().map(|&i| dev[i].ln()).collect();
    let line = linear_regression(&x, &y).ok()?;
    Some(EnvelopeFit {
        line,
        points: idx.len(),
        envelope,
    })
}

/// Mean squared log-residual of the envelope fit, the objective for the plateau.
fn plateau_objective(t: &[f64], q: &[f64], plateau: f64) -> f64 {
    match envelope_fit(t, q, plateau) {
        Some(f) => f.line.residual * f.line.residual / f.points as f64,
        None => f64::INFINITY,
    }
}

/// Plateau beyond the last sample that makes the envelope most nearly a power law.
fn cofit_plateau(t: &[f64], q: &[f64]) -> Result<f64> {
    let n = q.len();
    let last = q[n - 1];
    let mid = q[n / 2];
    let span = (last - mid).abs();
    if span == 0.0 {
        return Ok(last);
    }
    let dir = (last - mid).signum();
    // log-spaced scan of the offset, then golden-section refinement
    let offset = |s: f64| last + dir * span * s;
    let scan: Vec<f64> = (0..=600).map(|k| 10f64.powf(-6.0 + 6.5 * k as f64 / 600.0)).collect();
    let (mut best, mut best_val) = (0, f64::INFINITY);
    for (k, &s) in scan.iter().enumerate() {
        let v = plateau_objective(t, q, offset(s));
        if v < best_val {
            best = k;
            best_val = v;
        }
    }
    if !best_val.is_finite() {
        return Err(Error::Fit("no plateau gives a usable envelope".into()));
    }
    let mut a = scan[best.saturating_sub(1)];
    let mut b = scan[(best + 1).min(scan.len() - 1)];
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    for _ in 0..80 {
        if plateau_objective(t, q, offset(c)) < plateau_objective(t, q, offset(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    Ok(offset(0.5 * (a + b)))
}

/// Exponent `a` of `|Q(t) − Q*| ∝ t^a`.
///
/// Samples must be restricted to the fit window by the caller. The approach
/// to the plateau usually oscillates, so the log-log regression runs through
/// the local maxima of `|Q − Q*|`; a monotone approach is fitted point by
/// point. Without a known plateau, `Q*` is chosen beyond the last sample so
/// that the envelope is as close to a straight line as possible.
pub fn fit_algebraic_convergence(
    times: &[f64],
    values: &[f64],
    plateau: Option<f64>,
) -> Result<FitResult> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            found: values.len(),
        });
    }
    if times.len() < MIN_FIT_POINTS {
        return Err(Error::Fit("series too short".into()));
    }
    if times.iter().any(|&t| t <= 0.0) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Fit("times must be positive and increasing".into()));
    }
    let (plateau, cofit) = match plateau {
        Some(q) => (q, false),
        None => (cofit_plateau(times, values)?, true),
    };
    let fit = envelope_fit(times, values, plateau)
        .ok_or_else(|| Error::Fit("series does not approach the plateau".into()))?;
    if fit.line.slope >= 0.0 {
        return Err(Error::Fit("deviation from the plateau does not decay".into()));
    }
    let mut method = String::from(if fit.envelope {
        "log-log fit of local maxima"
    } else {
        "log-log fit of all samples"
    });
    if cofit {
        method.push_str(&format!(", plateau co-fitted at {plateau:e}"));
    }
    Ok(FitResult {
        quantity: "exponent".into(),
        estimate: fit.line.slope,
        std_error: fit.line.slope_error,
        window: (times[0], times[times.len() - 1]),
        points: fit.points,
        residual: fit.line.residual,
        r_squared: fit.line.r_squared,
        method,
    })
}

/// One snapshot `Q(p, t)` on the integer grid `p = 0, 1, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileAtTime {
    pub time: f64,
    pub values: Vec<f64>,
}

/// Result of a scaling-collapse test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Collapse {
    /// Mean pairwise RMS distance divided by the amplitude of the data.
    pub residual: f64,
    /// Range of `p/t` that was compared.
    pub window: (f64, f64),
    pub bins: usize,
}

/// Number of `p/t` points on which curves are compared.
pub const COLLAPSE_BINS: usize = 200;

fn interpolate(values: &[f64], p: f64) -> f64 {
    let i = p.floor() as usize;
    if i + 1 >= values.len() {
        return values[values.len() - 1];
    }
    let w = p - i as f64;
    values[i] * (1.0 - w) + values[i + 1] * w
}

/// Tests `Q(p, t) = f(p/t)` on `p/t ∈ [exclude_below, 1]`.
///
/// Each profile is linearly interpolated onto a common `p/t` grid; the
/// residual is the mean over all pairs of profiles of their RMS difference,
/// divided by the peak-to-peak amplitude of the rebinned data.
pub fn scaling_collapse(profiles: &[ProfileAtTime], exclude_below: f64) -> Result<Collapse> {
    if profiles.len() < 3 {
        return Err(Error::Fit("a collapse needs at least three times".into()));
    }
    let len = profiles[0].values.len();
    if profiles.iter().any(|p| p.values.len() != len) {
        return Err(Error::Fit("profiles must share one p grid".into()));
    }
    if profiles.iter().any(|p| !(p.time > 0.0)) {
        return Err(Error::Fit("profile times must be positive".into()));
    }
    let upper = profiles
        .iter()
        .map(|p| ((len - 1) as f64 / p.time).min(1.0))
        .fold(f64::INFINITY, f64::min);
    let lower = exclude_below.max(0.0);
    if upper - lower <= 0.0 || (upper - lower) * profiles[0].time < 2.0 {
        return Err(Error::Fit("profiles do not overlap in p/t".into()));
    }
    let grid: Vec<f64> = (0..COLLAPSE_BINS)
        .map(|k| lower + (upper - lower) * k as f64 / (COLLAPSE_BINS - 1) as f64)
        .collect();
    let curves: Vec<Vec<f64>> = profiles
        .iter()
        .map(|p| grid.iter().map(|&u| interpolate(&p.values, u * p.time)).collect())
        .collect();
    let (lo, hi) = curves
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let amplitude = hi - lo;
    if amplitude == 0.0 {
        return Ok(Collapse {
            residual: 0.0,
            window: (lower, upper),
            bins: COLLAPSE_BINS,
        });
    }
    let mut total = 0.0;
    let mut pairs = 0;
    for i in 0..curves.len() {
        for j in (i + 1)..curves.len() {
            let ms: f64 = curves[i]
                .iter()
                .zip(&curves[j])
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                / COLLAPSE_BINS as f64;
            total += ms.sqrt();
            pairs += 1;
        }
    }
    Ok(Collapse {
        residual: total / pairs as f64 / amplitude,
        window: (lower, upper),
        bins: COLLAPSE_BINS,
    })
}
