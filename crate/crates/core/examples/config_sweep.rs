//! Drives a configured run through the library instead of the binary and
//! reads the aggregate table back.
//!
//! Usage: `cargo run --release --example config_sweep -- [config.toml] [out_dir] [threads]`

use std::path::PathBuf;

use replichain::runner::config::Mode;
use replichain::runner::output::{self, AGGREGATE_FILE};
use replichain::runner::{run, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let config = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/sweep_mu.toml")
    });
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("replichain-sweep"));
    let threads: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let options = RunOptions { config: Some(config), out: Some(out.clone()), threads, quiet: true };
    let manifest = run(Mode::Sweep, &options).map_err(|e| format!("{e} (exit code {})", e.exit_code()))?;
    println!("wrote {} files to {} in {:.1} s", manifest.files.len(), out.display(), manifest.wall_seconds);
    for f in &manifest.files {
        println!("  {}", f.path);
    }
    for row in output::read_aggregate(&out.join(AGGREGATE_FILE))? {
        println!("{row:?}");
    }
    println!("summary: {}", serde_json::to_string_pretty(&manifest.summary)?);
    Ok(())
}
