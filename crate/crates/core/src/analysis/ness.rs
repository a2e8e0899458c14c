//! Measurements in the transient nonequilibrium steady state that forms near
//! the drive before excitations reach the far ends (`t ≤ N`).

use faer::c64;
use serde::{Deserialize, Serialize};

use super::closed_form::ALPHA_THRESHOLD;
use super::fit::{fit_algebraic_convergence, fit_entanglement_length, FitResult};
use crate::dynamics::ExactPropagator;
use crate::error::{Error, Result};
use crate::model::{initial_correlation, SystemSpec};
use crate::observables::{chain_magnetization, cross_concurrence_profile, current_profile};

/// Bisection tolerance in Γ for the threshold crossing.
pub const CROSSING_TOL: f64 = 1e-3;

/// `|ln Γ|` below which β is reported but flagged as outside the
/// proportional regime.
pub const BETA_FLAG_WINDOW: f64 = 0.5;

/// Local observables of the transient steady state at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NessSummary {
    pub gamma: f64,
    pub mu: f64,
    pub sites: usize,
    pub time: f64,
    /// Chain-1 magnetization by distance from the contact.
    pub magnetization: Vec<f64>,
    /// Current through the bond next to the contact on chain 1.
    pub j_star: f64,
    /// Facing-pair concurrence by distance from the contact.
    pub cross_concurrence: Vec<f64>,
    pub xi: Option<FitResult>,
    pub m_exponent: Option<FitResult>,
    pub j_exponent: Option<FitResult>,
}

fn uniform_mu(spec: &SystemSpec) -> Result<f64> {
    let m = spec.magnetization();
    if m.iter().any(|&v| v != m[0]) {
        return Err(Error::invalid("mu", "steady-state protocol needs a uniform magnetization"));
    }
    Ok(m[0])
}

/// Profiles at `t = N`, the last time before reflections from the far ends
/// return to the contact.
pub fn ness_summary(spec: &SystemSpec) -> Result<NessSummary> {
    ness_summary_at(spec, spec.sites() as f64)
}

pub fn ness_summary_at(spec: &SystemSpec, time: f64) -> Result<NessSummary> {
    let mu = uniform_mu(spec)?;
    if spec.sites() < 2 {
        return Err(Error::invalid("N", "a current needs at least two sites per chain"));
    }
    let prop = ExactPropagator::new(spec)?;
    let g = prop.evolve(&initial_correlation(spec), time)?;
    let cross_concurrence = cross_concurrence_profile(&g)?;
    let j_star = current_profile(&g, spec)?.chain1[0];
    Ok(NessSummary {
        gamma: spec.coupling(),
        mu,
        sites: spec.sites(),
        time,
        magnetization: chain_magnetization(&g),
        j_star,
        xi: fit_entanglement_length(&cross_concurrence).ok(),
        cross_concurrence,
        m_exponent: None,
        j_exponent: None,
    })
}

/// Time series of the chain-1 magnetization at distance `p` and of the
/// current through bond `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSeries {
    pub times: Vec<f64>,
    pub magnetization: Vec<f64>,
    pub current: Vec<f64>,
}

pub fn local_series(spec: &SystemSpec, p: usize, times: &[f64]) -> Result<LocalSeries> {
    let n = spec.sites();
    if p + 1 >= n {
        return Err(Error::invalid("p", "bond lies outside the chain"));
    }
    let prop = ExactPropagator::new(spec)?;
    let evo = prop.prepare(&initial_correlation(spec))?;
    let site = n - 1 - p;
    let pairs = [(site, site), (site - 1, site)];
    let k = spec.hopping();
    let mut magnetization = Vec::with_capacity(times.len());
    let mut current = Vec::with_capacity(times.len());
    for &t in times {
        let e = evo.entries(&pairs, t);
        magnetization.push(2.0 * e[0].re - 1.0);
        current.push((c64::new(0.0, 2.0 * k) * (e[1] - e[1].conj())).re);
    }
    Ok(LocalSeries {
        times: times.to_vec(),
        magnetization,
        current,
    })
}

/// Fit window `t ∈ [4p + 10, 0.9 N]` for the approach to the plateau at distance `p`.
pub fn convergence_window(sites: usize, p: usize) -> (f64, f64) {
    ((4 * p + 10) as f64, 0.9 * sites as f64)
}

/// Exponents of the algebraic approach of `m(p, t)` and `j(p, t)` to their
/// plateaus, sampled every `dt` over [`convergence_window`], plateaus co-fitted.
pub fn convergence_exponents(spec: &SystemSpec, p: usize, dt: f64) -> Result<(FitResult, FitResult)> {
    let (lo, hi) = convergence_window(spec.sites(), p);
    if !(dt > 0.0) || hi - lo < 4.0 * dt {
        return Err(Error::invalid("dt", "window too short for the sampling step"));
    }
    let count = ((hi - lo) / dt).floor() as usize + 1;
    let times: Vec<f64> = (0..count).map(|k| lo + dt * k as f64).collect();
    let s = local_series(spec, p, &times)?;
    let mut m = fit_algebraic_convergence(&s.times, &s.magnetization, None)?;
    let mut j = fit_algebraic_convergence(&s.times, &s.current, None)?;
    m.quantity = format!("magnetization exponent at p = {p}");
    j.quantity = format!("current exponent at p = {p}");
    Ok((m, j))
}

/// Bath-correlation fraction α(Γ): the first-pair concurrence at `t = N`
/// for fully polarized chains.
pub fn fit_alpha(spec: &SystemSpec) -> Result<f64> {
    if uniform_mu(spec)? != 1.0 {
        return Err(Error::invalid("mu", "α is defined for fully polarized chains (mu = 1)"));
    }
    let prop = ExactPropagator::new(spec)?;
    let g = prop.evolve(&initial_correlation(spec), spec.sites() as f64)?;
    let (a, b) = spec.index_map().mirror_pair(0);
    crate::observables::concurrence_x_state(&crate::observables::two_site_rdm(&g, a, b)?)
}

/// Coupling at which α(Γ) crosses √2 − 1, by bisection on `[lo, hi]`.
pub fn alpha_crossing(sites: usize, lo: f64, hi: f64) -> Result<f64> {
    let alpha = |gamma: f64| -> Result<f64> { fit_alpha(&SystemSpec::uniform(sites, gamma, 1.0)?) };
    let (mut lo, mut hi) = (lo, hi);
    let f_lo = alpha(lo)? - ALPHA_THRESHOLD;
    let f_hi = alpha(hi)? - ALPHA_THRESHOLD;
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Fit(format!(
            "α − (√2 − 1) has the same sign at Γ = {lo} and Γ = {hi}"
        )));
    }
    while hi - lo > CROSSING_TOL {
        let mid = 0.5 * (lo + hi);
        if (alpha(mid)? - ALPHA_THRESHOLD).signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaPoint {
    pub gamma: f64,
    pub xi: f64,
    pub j_star: f64,
    pub beta: f64,
    /// Near Γ = 1, where the proportionality is not expected to hold.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaReport {
    pub points: Vec<BetaPoint>,
    /// `(max − min)/mean` of β over unflagged points.
    pub spread: f64,
    pub mean: f64,
}

/// `β(Γ) = ξ(Γ) j*(Γ)` across a sweep.
pub fn xi_current_relation(summaries: &[NessSummary]) -> Result<BetaReport> {
    let points = summaries
        .iter()
        .map(|s| {
            let xi = s
                .xi
                .as_ref()
                .ok_or_else(|| Error::Fit(format!("no entanglement length at Γ = {}", s.gamma)))?
                .estimate;
            if !s.j_star.is_finite() {
                return Err(Error::Fit(format!("no steady current at Γ = {}", s.gamma)));
            }
            Ok(BetaPoint {
                gamma: s.gamma,
                xi,
                j_star: s.j_star,
                beta: xi * s.j_star,
                flagged: s.gamma.ln().abs() < BETA_FLAG_WINDOW,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let kept: Vec<f64> = points.iter().filter(|p| !p.flagged).map(|p| p.beta).collect();
    let (spread, mean) = if kept.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        let mean = kept.iter().sum::<f64>() / kept.len() as f64;
        let max = kept.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = kept.iter().copied().fold(f64::INFINITY, f64::min);
        ((max - min) / mean, mean)
    };
    Ok(BetaReport {
        points,
        spread,
        mean,
    })
}
