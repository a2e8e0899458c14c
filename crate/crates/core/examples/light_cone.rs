//! Ballistic spreading of the magnetization from the contact and the
//! algebraic approach of local observables to their plateaus.
//!
//! Usage: `cargo run --release --example light_cone -- [N] [gamma]`

use replichain::analysis::{convergence_exponents, scaling_collapse, ProfileAtTime};
use replichain::dynamics::ExactPropagator;
use replichain::model::{initial_correlation, SystemSpec};
use replichain::observables::chain_magnetization;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let sites: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(120);
    let gamma: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.5);

    let spec = SystemSpec::uniform(sites, gamma, 1.0)?;
    let prop = ExactPropagator::new(&spec)?;
    let evo = prop.prepare(&initial_correlation(&spec))?;

    let times: Vec<f64> = [0.4, 0.55, 0.7, 0.85].iter().map(|f| f * sites as f64).collect();
    let profiles: Vec<ProfileAtTime> = times
        .iter()
        .map(|&t| ProfileAtTime { time: t, values: chain_magnetization(&evo.state(t)) })
        .collect();
    for p in &profiles {
        let front = p.values.iter().position(|m| *m > 0.99).unwrap_or(sites);
        println!("t = {:6.1}: magnetization front at p = {front} (p/t = {:.3})", p.time, front as f64 / p.time);
    }
    let collapse = scaling_collapse(&profiles, 0.05)?;
    println!("collapse residual on p/t ∈ [{:.2}, {:.2}]: {:.4}", collapse.window.0, collapse.window.1, collapse.residual);

    // the window t ∈ [4p + 10, 0.9 N] needs a long chain
    let long = SystemSpec::uniform(300, gamma, 1.0)?;
    for p in [5, 20] {
        let (m, j) = convergence_exponents(&long, p, 0.1)?;
        println!("p = {p}: m − m* ∝ t^{:.3}, j − j* ∝ t^{:.3}", m.estimate, j.estimate);
    }
    Ok(())
}
