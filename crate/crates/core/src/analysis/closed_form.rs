//! Closed-form predictions used as oracles for the simulations.

/// Bath-correlation fraction above which the first facing pair stays entangled
/// for every initial magnetization.
pub const ALPHA_THRESHOLD: f64 = std::f64::consts::SQRT_2 - 1.0;

/// Bisection tolerance in μ for [`threshold_magnetization`].
pub const THRESHOLD_TOL: f64 = 1e-10;

/// Concurrence of two single-site chains, initial magnetizations `mu1` and
/// `mu4`, after driving for a time `t` at rescaled coupling `gamma`.
pub fn concurrence_two_qubit_analytic(t: f64, mu1: f64, mu4: f64, gamma: f64) -> f64 {
    let e = (-gamma * gamma * t).exp();
    let e2 = e * e;
    let bracket = 2.0 * e + (mu1 * mu4 - 1.0) * e2;
    let radicand = bracket * bracket - (mu1 + mu4).powi(2) * e2;
    f64::max(0.0, 1.0 - e - 0.5 * radicand.max(0.0).sqrt())
}

/// Waiting time before entanglement appears for opposite initial
/// magnetizations `±mu`.
pub fn delay_time(mu: f64, gamma: f64) -> f64 {
    let s = ((1.0 - mu * mu) / 2.0).max(0.0).sqrt();
    s.ln_1p() / (gamma * gamma)
}

/// `g(α, μ) = (1−α)²(1−μ²)[(1+α)² − μ²(1−α)²]`.
pub fn g_function(alpha: f64, mu: f64) -> f64 {
    let a = 1.0 - alpha;
    let b = 1.0 + alpha;
    let m2 = mu * mu;
    a * a * (1.0 - m2) * (b * b - m2 * a * a)
}

fn first_pair_margin(alpha: f64, mu: f64) -> f64 {
    alpha - 0.5 * g_function(alpha, mu).max(0.0).sqrt()
}

/// Steady concurrence of the first facing pair when a fraction `alpha` of the
/// bath correlation is transferred and the contact magnetization is
/// `(1 − α) μ`.
pub fn cross_concurrence_first_pair_analytic(alpha: f64, mu: f64) -> f64 {
    first_pair_margin(alpha, mu).max(0.0)
}

/// Magnetization below which the first facing pair is separable, or `None`
/// when it is entangled for every `μ ∈ [0, 1]`.
///
/// The margin `α − √g/2` increases with `|μ|`, so a sign change on `[0, 1]`
/// brackets a unique root.
pub fn threshold_magnetization(alpha: f64) -> Option<f64> {
    let f = |mu: f64| first_pair_margin(alpha, mu);
    if f(0.0) > 0.0 {
        return None;
    }
    if f(1.0) <= 0.0 {
        // only possible for α ≤ 0
        return Some(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
