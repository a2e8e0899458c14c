//! Magnetization threshold for replicating the bath entanglement onto the
//! first facing pair at `t = N`.
//!
//! Usage: `cargo run --release --example threshold -- [N] [gamma ...]`

use replichain::analysis::{
    alpha_crossing, cross_concurrence_first_pair_analytic, fit_alpha, threshold_magnetization,
};
use replichain::dynamics::ExactPropagator;
use replichain::model::{initial_correlation, SystemSpec};
use replichain::observables::{concurrence_x_state, two_site_rdm};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let sites: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(40);
    let mut gammas: Vec<f64> = args.map(|s| s.parse()).collect::<Result<_, _>>()?;
    if gammas.is_empty() {
        gammas = vec![0.5, 1.0, 2.0];
    }

    for gamma in gammas {
        let alpha = fit_alpha(&SystemSpec::uniform(sites, gamma, 1.0)?)?;
        match threshold_magnetization(alpha) {
            Some(mu) => println!("Γ = {gamma}: α = {alpha:.5}, threshold μ = {mu:.5}"),
            None => println!("Γ = {gamma}: α = {alpha:.5}, no threshold (entangled for every μ)"),
        }
        println!("     μ    C(numeric)  C(closed form)");
        for mu in [0.0, 0.2, 0.4, 0.6, 0.8, 1.0] {
            let spec = SystemSpec::uniform(sites, gamma, mu)?;
            let g = ExactPropagator::new(&spec)?.evolve(&initial_correlation(&spec), sites as f64)?;
            let (a, b) = spec.index_map().mirror_pair(0);
            let c = concurrence_x_state(&two_site_rdm(&g, a, b)?)?;
            println!("  {mu:4.1}   {c:.6}    {:.6}", cross_concurrence_first_pair_analytic(alpha, mu));
        }
    }
    println!("\nα crosses √2 − 1 at Γ = {:.4}", alpha_crossing(sites, 0.1, 1.0)?);
    Ok(())
}
