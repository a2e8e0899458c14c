//! Long-time limit: every facing pair of sites ends up in a Bell state.
//!
//! Usage: `cargo run --release --example steady_state -- [N] [gamma] [mu]`

use replichain::dynamics::{lindblad_rhs, steady_state, ExactPropagator};
use replichain::linalg;
use replichain::model::{initial_correlation, SystemSpec};
use replichain::observables::{cross_concurrence_profile, magnetization_profile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let sites: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(6);
    let gamma: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.7);
    let mu: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.3);

    let spec = SystemSpec::uniform(sites, gamma, mu)?;
    let g = steady_state(&spec)?;
    let drift = lindblad_rhs(&g, &spec)?;
    println!("N = {sites}, Γ = {gamma}, μ = {mu}");
    println!("|dG/dt| at the fixed point: {:.2e}", linalg::max_abs(drift.as_ref()));
    println!("magnetization: {:?}", magnetization_profile(&g).iter().map(|m| format!("{m:+.3}")).collect::<Vec<_>>());
    println!("facing-pair concurrence: {:?}", cross_concurrence_profile(&g)?);

    // approach from the product state
    let prop = ExactPropagator::new(&spec)?;
    let evo = prop.prepare(&initial_correlation(&spec))?;
    println!("\n     t   distance to fixed point");
    for t in [0.0, 10.0, 50.0, 200.0, 1000.0] {
        println!("{t:6.0}   {:.3e}", evo.state(t).distance(&g));
    }
    Ok(())
}
