//! All three stages into one output directory, as `monoped pipeline` does.
//!
//!     cargo run --release --example full_pipeline -- out/pipeline

use std::path::PathBuf;

use monoped_codesign::cli::cmd_pipeline;
use monoped_codesign::config::RunConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| PathBuf::from("out/pipeline"), PathBuf::from);
    let config = RunConfig::default();
    let outcome = cmd_pipeline(&config, None, &out)?;
    print!("{}", outcome.text);
    for entry in std::fs::read_dir(&out)? {
        println!("  {}", entry?.path().display());
    }
    Ok(())
}
