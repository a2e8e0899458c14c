//! Relaxation rate of the drift matrix against chain length.
//!
//! Usage: `cargo run --release --example gap_scaling -- [gamma]`

use replichain::analysis::linear_regression;
use replichain::dynamics::spectral_gap;
use replichain::model::SystemSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gamma: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1.0);
    let sizes = [20usize, 40, 80, 160];
    let (mut x, mut y) = (Vec::new(), Vec::new());
    println!("Γ = {gamma}\n    N      gap");
    for n in sizes {
        let gap = spectral_gap(&SystemSpec::uniform(n, gamma, 0.0)?)?;
        println!("{n:5}  {gap:.4e}");
        x.push((n as f64).ln());
        y.push(gap.ln());
    }
    let fit = linear_regression(&x, &y)?;
    println!("gap ∝ N^{:.3} (R² = {:.5})", fit.slope, fit.r_squared);
    Ok(())
}
