//! One site per chain: exact propagation against the closed-form concurrence
//! and the onset delay of entanglement.
//!
//! Usage: `cargo run --release --example two_qubit -- [gamma] [mu1] [mu4]`

use replichain::analysis::{concurrence_two_qubit_analytic, delay_time};
use replichain::dynamics::ExactPropagator;
use replichain::model::{initial_correlation, SystemSpec};
use replichain::observables::{concurrence_x_state, two_site_rdm};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let gamma = args.first().copied().unwrap_or(0.8);
    let mu1 = args.get(1).copied().unwrap_or(0.5);
    let mu4 = args.get(2).copied().unwrap_or(-0.5);

    let spec = SystemSpec::with_profile(1, gamma, vec![mu1, mu4])?;
    let prop = ExactPropagator::new(&spec)?;
    let evo = prop.prepare(&initial_correlation(&spec))?;

    println!("Γ = {gamma}, μ1 = {mu1}, μ4 = {mu4}");
    println!("     t    C(numeric)   C(closed form)");
    let t_max = 8.0 / (gamma * gamma);
    let mut worst = 0.0f64;
    for k in 0..=16 {
        let t = t_max * k as f64 / 16.0;
        let c = concurrence_x_state(&two_site_rdm(&evo.state(t), 0, 1)?)?;
        let o = concurrence_two_qubit_analytic(t, mu1, mu4, gamma);
        worst = worst.max((c - o).abs());
        println!("{t:7.3}   {c:.8}   {o:.8}");
    }
    println!("largest deviation: {worst:.2e}");
    if mu1 == -mu4 {
        println!("entanglement sets in at t_d = {:.6}", delay_time(mu1, gamma));
    }
    Ok(())
}
