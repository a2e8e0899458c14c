//! Acceptance criteria, one test per criterion. Each prints a single
//! `criterion k ... PASS|FAIL` line with the measured numbers, then asserts.

mod support;

use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use replichain::analysis::{
    alpha_crossing, concurrence_two_qubit_analytic, convergence_exponents,
    cross_concurrence_first_pair_analytic, delay_time, fit_alpha, fit_entanglement_length,
    linear_regression, ness_summary, scaling_collapse, threshold_magnetization,
    xi_current_relation, ProfileAtTime, ALPHA_THRESHOLD,
};
use replichain::dynamics::{self, propagate_rk4, spectral_gap, DiscreteRip, ExactPropagator};
use replichain::linalg;
use replichain::model::{
    full_hopping, full_hopping_including_field, initial_correlation, CorrelationMatrix, SystemSpec,
};
use replichain::observables::{
    chain_magnetization, concurrence_wootters, concurrence_x_state, cross_concurrence_profile,
    current_profile, longitudinal_concurrence_profile, pfaffian, two_site_rdm, TwoSiteState,
};

/// Prints the verdict line and the individual checks, then fails if any check did.
fn report(id: u32, title: &str, checks: &[(String, bool)]) {
    let ok = checks.iter().all(|(_, pass)| *pass);
    println!("criterion {id} {title}: {}", if ok { "PASS" } else { "FAIL" });
    for (line, pass) in checks {
        println!("    [{}] {line}", if *pass { "ok" } else { "FAIL" });
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
    assert!(failed.is_empty(), "criterion {id} failed: {failed:?}");
}

fn concurrence(g: &CorrelationMatrix, a: usize, b: usize) -> f64 {
    concurrence_x_state(&two_site_rdm(g, a, b).unwrap()).unwrap()
}

#[test]
fn criterion_1_perfect_replication() {
    let mut checks = Vec::new();
    for n in [2, 4, 8] {
        let spec = SystemSpec::uniform(n, 0.7, 0.3).unwrap();
        let g = dynamics::steady_state(&spec).unwrap();
        let map = spec.index_map();

        let worst_c = cross_concurrence_profile(&g)
            .unwrap()
            .iter()
            .map(|c| (c - 1.0).abs())
            .fold(0.0, f64::max);
        checks.push((format!("N = {n}: max |C_c(p) − 1| = {worst_c:.1e} (< 1e-8)"), worst_c < 1e-8));

        let mut off = 0.0f64;
        for i in 0..spec.dim() {
            for j in 0..spec.dim() {
                if i != j && map.mirror_site(i) != j {
                    off = off.max(g.get(i, j).norm());
                }
            }
        }
        checks.push((format!("N = {n}: off-mirror |G_ij| = {off:.1e} (< 1e-10)"), off < 1e-10));

        let mut bell = 0.0f64;
        for p in 0..n {
            let (a, b) = map.mirror_pair(p);
            let sign = if p % 2 == 0 { -1.0 } else { 1.0 };
            let rdm = two_site_rdm(&g, a, b).unwrap();
            bell = bell.max(rdm.distance(&TwoSiteState::bell((a, b), sign)));
        }
        checks.push((
            format!("N = {n}: even p in |Φ⁻⟩, odd p in |Φ⁺⟩, worst distance {bell:.1e} (< 1e-8)"),
            bell < 1e-8,
        ));
    }
    report(1, "perfect replication", &checks);
}

#[test]
fn criterion_2_two_qubit_exactness() {
    let gamma = 0.8;
    let t_max = 20.0 / (gamma * gamma);
    let grid: Vec<f64> = (0..=400).map(|k| t_max * k as f64 / 400.0).collect();
    let mut checks = Vec::new();
    for (m1, m4) in [(1.0, 1.0), (1.0, -1.0), (0.5, -0.5), (0.3, 0.8)] {
        let spec = SystemSpec::with_profile(1, gamma, vec![m1, m4]).unwrap();
        let g0 = initial_correlation(&spec);
        let exact = ExactPropagator::new(&spec).unwrap().trajectory(&g0, &grid).unwrap();
        let rk4 = propagate_rk4(&g0, &spec, &grid, 0.01).unwrap();
        let mut worst = 0.0f64;
        for traj in [&exact, &rk4] {
            for s in &traj.snapshots {
                let c = concurrence(&s.state, 0, 1);
                worst = worst.max((c - concurrence_two_qubit_analytic(s.time, m1, m4, gamma)).abs());
            }
        }
        checks.push((
            format!("(μ1, μ4) = ({m1}, {m4}): max |C − closed form| = {worst:.1e} (< 1e-6)"),
            worst < 1e-6,
        ));
    }
    for mu in [0.0, 0.5, 0.9] {
        let spec = SystemSpec::with_profile(1, gamma, vec![mu, -mu]).unwrap();
        let prop = ExactPropagator::new(&spec).unwrap();
        let evo = prop.prepare(&initial_correlation(&spec)).unwrap();
        let entangled = |t: f64| concurrence(&evo.state(t), 0, 1) > 0.0;
        let (mut lo, mut hi) = (0.0, t_max);
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if entangled(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let expected = delay_time(mu, gamma);
        let dev = (hi - expected).abs();
        checks.push((
            format!("μ = {mu}: delay {hi:.6} vs {expected:.6}, deviation {dev:.1e} (< 1e-4)"),
            dev < 1e-4,
        ));
    }
    report(2, "two-qubit exactness", &checks);
}

#[test]
fn criterion_3_ness_exponential_decay() {
    let mut checks = Vec::new();
    let at = |gamma: f64| ness_summary(&SystemSpec::uniform(60, gamma, 1.0).unwrap()).unwrap();

    let half = at(0.5);
    let fit = fit_entanglement_length(&half.cross_concurrence).unwrap();
    checks.push((
        format!(
            "Γ = 0.5: ln C_c(p) linear over p ∈ [{}, {}], R² = {:.4} (> 0.99), ξ = {:.3}",
            fit.window.0, fit.window.1, fit.r_squared, fit.estimate
        ),
        fit.r_squared > 0.99,
    ));

    let product = fit.estimate * half.j_star;
    let rel = (product - 5.67).abs() / 5.67;
    checks.push((
        format!(
            "Γ = 0.5: ξ·j* = {product:.4} vs 5.67, relative deviation {:.0}% (< 15%); 1/(ξ·j*) = {:.3}",
            100.0 * rel,
            1.0 / product
        ),
        rel < 0.15,
    ));

    let summaries: Vec<_> = [0.25, 0.4, 2.5, 4.0].into_iter().map(at).collect();
    let beta = xi_current_relation(&summaries).unwrap();
    let listing: Vec<String> = beta
        .points
        .iter()
        .map(|p| format!("Γ = {}: ξ·j* = {:.3}", p.gamma, p.beta))
        .collect();
    checks.push((
        format!("β spread {:.0}% (< 15%) over {}", 100.0 * beta.spread, listing.join(", ")),
        beta.spread < 0.15,
    ));

    let two = at(2.0);
    let asym = (half.j_star - two.j_star).abs();
    checks.push((
        format!(
            "j*(0.5) = {:.9}, j*(2) = {:.9}, |difference| = {asym:.1e} (< 1e-6)",
            half.j_star, two.j_star
        ),
        asym < 1e-6,
    ));
    report(3, "transient steady state, exponential decay", &checks);
}

#[test]
fn criterion_4_algebraic_convergence() {
    let spec = SystemSpec::uniform(300, 0.5, 1.0).unwrap();
    let mut checks = Vec::new();
    for p in [5, 20] {
        let (m, j) = convergence_exponents(&spec, p, 0.1).unwrap();
        checks.push((
            format!("p = {p}: magnetization exponent {:.3} (−2 ± 0.3)", m.estimate),
            (m.estimate + 2.0).abs() <= 0.3,
        ));
        checks.push((
            format!("p = {p}: current exponent {:.3} (−3 ± 0.3)", j.estimate),
            (j.estimate + 3.0).abs() <= 0.3,
        ));
    }
    report(4, "algebraic convergence", &checks);
}

#[test]
fn criterion_5_scaling_collapse() {
    let mut checks = Vec::new();
    let times = [100.0, 150.0, 200.0, 250.0];

    let spec = SystemSpec::uniform(300, 0.5, 1.0).unwrap();
    let prop = ExactPropagator::new(&spec).unwrap();
    let evo = prop.prepare(&initial_correlation(&spec)).unwrap();
    let mut m = Vec::new();
    let mut j = Vec::new();
    for &t in &times {
        let g = evo.state(t);
        m.push(ProfileAtTime { time: t, values: chain_magnetization(&g) });
        j.push(ProfileAtTime { time: t, values: current_profile(&g, &spec).unwrap().chain1 });
    }
    let cm = scaling_collapse(&m, 0.05).unwrap();
    let cj = scaling_collapse(&j, 0.05).unwrap();
    checks.push((format!("N = 300 magnetization: residual {:.4} (< 0.05)", cm.residual), cm.residual < 0.05));
    checks.push((format!("N = 300 current: residual {:.4} (< 0.05)", cj.residual), cj.residual < 0.05));

    let spec = SystemSpec::uniform(500, 0.5, 1.0).unwrap();
    let prop = ExactPropagator::new(&spec).unwrap();
    let evo = prop.prepare(&initial_correlation(&spec)).unwrap();
    let long: Vec<ProfileAtTime> = [100.0, 200.0, 300.0, 400.0]
        .into_iter()
        .map(|t| ProfileAtTime {
            time: t,
            values: longitudinal_concurrence_profile(&evo.state(t)).unwrap(),
        })
        .collect();
    let cl = scaling_collapse(&long, 0.05).unwrap();
    checks.push((
        format!("N = 500 longitudinal concurrence: residual {:.4} (< 0.08)", cl.residual),
        cl.residual < 0.08,
    ));
    report(5, "scaling collapse", &checks);
}

#[test]
fn criterion_6_threshold_physics() {
    let mut checks = Vec::new();
    let crossing = alpha_crossing(60, 0.4, 0.8).unwrap();
    checks.push((
        format!("α(Γ) = √2 − 1 at Γ = {crossing:.4} (0.5916 ± 0.02)"),
        (crossing - 0.5916).abs() <= 0.02,
    ));

    for gamma in [0.5, 2.0] {
        let alpha = fit_alpha(&SystemSpec::uniform(60, gamma, 1.0).unwrap()).unwrap();
        let first_pair = |mu: f64| {
            let spec = SystemSpec::uniform(60, gamma, mu).unwrap();
            let g = ExactPropagator::new(&spec).unwrap().evolve(&initial_correlation(&spec), 60.0).unwrap();
            let (a, b) = spec.index_map().mirror_pair(0);
            concurrence(&g, a, b)
        };
        let worst = (0..=20)
            .map(|k| {
                let mu = k as f64 / 20.0;
                (first_pair(mu) - cross_concurrence_first_pair_analytic(alpha, mu)).abs()
            })
            .fold(0.0, f64::max);
        checks.push((
            format!("Γ = {gamma}: α = {alpha:.5}, closed form vs numerics over μ ∈ [0, 1]: {worst:.1e} (< 1e-2)"),
            worst < 1e-2,
        ));

        match threshold_magnetization(alpha) {
            Some(mu_t) => {
                let below = first_pair((mu_t - 0.05).max(0.0));
                let above = first_pair((mu_t + 0.05).min(1.0));
                checks.push((
                    format!(
                        "Γ = {gamma}: μ_thre = {mu_t:.4}; C(μ_thre − 0.05) = {below:.1e}, C(μ_thre + 0.05) = {above:.1e}"
                    ),
                    gamma < 1.0 && mu_t > 0.0 && below == 0.0 && above > 0.0,
                ));
            }
            None => {
                let c0 = first_pair(0.0);
                checks.push((
                    format!("Γ = {gamma}: no threshold, C(μ = 0) = {c0:.4}"),
                    gamma > 1.0 && c0 > 0.0 && alpha > ALPHA_THRESHOLD,
                ));
            }
        }
    }
    report(6, "threshold physics", &checks);
}

#[test]
fn criterion_7_gap_scaling() {
    let sizes = [8usize, 12, 16, 24, 32, 48, 64];
    let mut checks = Vec::new();
    for gamma in [0.5, 1.0, 2.0] {
        let x: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
        let y: Vec<f64> = sizes
            .iter()
            .map(|&n| spectral_gap(&SystemSpec::uniform(n, gamma, 1.0).unwrap()).unwrap().ln())
            .collect();
        let fit = linear_regression(&x, &y).unwrap();
        checks.push((
            format!("Γ = {gamma}: gap slope {:.3} (−3 ± 0.3), R² = {:.4}", fit.slope, fit.r_squared),
            (fit.slope + 3.0).abs() <= 0.3,
        ));
    }
    report(7, "gap scaling", &checks);
}

fn random_antisymmetric(rng: &mut ChaCha8Rng, n: usize) -> Mat<c64> {
    let mut a = Mat::<c64>::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let z = c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            a[(i, j)] = z;
            a[(j, i)] = -z;
        }
    }
    a
}

/// Random physical X state: populations on the simplex, coherences inside
/// the positivity bounds.
fn random_x_state(rng: &mut ChaCha8Rng) -> TwoSiteState {
    let w: Vec<f64> = (0..4).map(|_| -rng.random::<f64>().ln()).collect();
    let s: f64 = w.iter().sum();
    let p: Vec<f64> = w.iter().map(|v| v / s).collect();
    let phase = |rng: &mut ChaCha8Rng| c64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    let z = phase(rng) * (p[1] * p[2]).sqrt() * rng.random::<f64>();
    let y = phase(rng) * (p[0] * p[3]).sqrt() * rng.random::<f64>();
    let zero = c64::new(0.0, 0.0);
    let r = |v: f64| c64::new(v, 0.0);
    TwoSiteState::new(
        (0, 1),
        [
            [r(p[0]), zero, zero, y],
            [zero, r(p[1]), z, zero],
            [zero, z.conj(), r(p[2]), zero],
            [y.conj(), zero, zero, r(p[3])],
        ],
    )
}

#[test]
fn criterion_8_oracle_equivalence() {
    let mut checks = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_bf = 0.0f64;
    for n in 1..=3 {
        for _ in 0..2 {
            let mu: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let hopping = rng.random_range(0.3..1.2);
            let gamma = rng.random_range(0.3..1.8);
            worst_bf = worst_bf.max(support::brute_force::compare(n, hopping, gamma, mu, &[0.7, 2.0]));
        }
    }
    checks.push((
        format!("brute-force spin evolution, N ≤ 3: worst deviation {worst_bf:.1e} (< 1e-6)"),
        worst_bf < 1e-6,
    ));

    // discrete collisions approach the continuous limit linearly in τ
    let (gamma, t) = (0.8, 2.0);
    let base = SystemSpec::with_profile(2, gamma, vec![0.9, 0.2, -0.4, 1.0]).unwrap();
    let g0 = initial_correlation(&base);
    let reference = ExactPropagator::new(&base).unwrap().evolve(&g0, t).unwrap();
    let taus = [0.04, 0.02, 0.01, 0.005];
    let errors: Vec<f64> = taus
        .iter()
        .map(|&tau| {
            let spec = base.clone().interaction_time(tau).unwrap();
            let steps = (t / tau).round() as usize;
            DiscreteRip::new(&spec).unwrap().run(&g0, steps).unwrap().distance(&reference)
        })
        .collect();
    let order = linear_regression(
        &taus.iter().map(|v| v.ln()).collect::<Vec<_>>(),
        &errors.iter().map(|v| v.ln()).collect::<Vec<_>>(),
    )
    .unwrap()
    .slope;
    checks.push((
        format!(
            "discrete collisions: errors [{}] for τ = {taus:?}, order {order:.3} (1 ± 0.1)",
            errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(", ")
        ),
        (order - 1.0).abs() <= 0.1,
    ));

    // uniform field
    let spec = base.clone().interaction_time(0.05).unwrap().field_strength(0.73).unwrap();
    let plain = DiscreteRip::from_hopping(&spec, full_hopping(&spec).unwrap().as_ref()).unwrap();
    let field = DiscreteRip::from_hopping(&spec, full_hopping_including_field(&spec).unwrap().as_ref()).unwrap();
    let dh = plain.run(&g0, 40).unwrap().distance(&field.run(&g0, 40).unwrap());
    let cont = ExactPropagator::new(&spec).unwrap().evolve(&g0, t).unwrap().distance(&reference);
    checks.push((
        format!("field h = 0.73: discrete deviation {dh:.1e}, continuous deviation {cont:.1e} (< 1e-12)"),
        dh < 1e-12 && cont < 1e-12,
    ));

    let mut worst_pf = 0.0f64;
    for _ in 0..50 {
        let n = 2 * rng.random_range(1..=6);
        let a = random_antisymmetric(&mut rng, n);
        let pf = pfaffian(a.as_ref()).unwrap();
        let det = linalg::determinant(a.clone());
        worst_pf = worst_pf.max((pf * pf - det).norm() / det.norm().max(1.0));
    }
    checks.push((format!("Pf² = det on 50 random antisymmetric matrices: {worst_pf:.1e} (< 1e-10)"), worst_pf < 1e-10));

    let mut worst_x = 0.0f64;
    for _ in 0..100 {
        let state = random_x_state(&mut rng);
        worst_x = worst_x.max((concurrence_x_state(&state).unwrap() - concurrence_wootters(&state)).abs());
    }
    checks.push((format!("X-state vs Wootters on 100 random states: {worst_x:.1e} (< 1e-10)"), worst_x < 1e-10));

    report(8, "oracle equivalence", &checks);
}
