//! Finite-τ collision map converging to the continuum limit.
//!
//! Usage: `cargo run --release --example discrete_rip -- [N] [gamma] [t]`

use replichain::analysis::linear_regression;
use replichain::dynamics::{DiscreteRip, ExactPropagator};
use replichain::model::{initial_correlation, SystemSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let sites: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(6);
    let gamma: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.8);
    let t: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(4.0);

    let spec = SystemSpec::uniform(sites, gamma, 0.6)?;
    let g0 = initial_correlation(&spec);
    let reference = ExactPropagator::new(&spec)?.evolve(&g0, t)?;

    println!("N = {sites}, Γ = {gamma}, t = {t}\n      τ   steps   |G_τ − G|");
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for tau in [0.04, 0.02, 0.01, 0.005] {
        let steps = (t / tau).round() as usize;
        let rip = DiscreteRip::new(&spec.clone().interaction_time(tau)?)?;
        let err = rip.run(&g0, steps)?.distance(&reference);
        println!("{tau:7.3}  {steps:6}   {err:.3e}");
        x.push(tau.ln());
        y.push(err.ln());
    }
    println!("error ∝ τ^{:.3}", linear_regression(&x, &y)?.slope);
    Ok(())
}
