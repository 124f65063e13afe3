//! Drive the `whw` workflows from code: build a configuration, run
//! `simulate` then `decay-fit`, and list the emitted files.
//!
//! Run with `cargo run --release --example cli_workflows [out_dir]`.

use whw::cli::{cmd_decay_fit, cmd_simulate};
use whw::config::RunConfig;

fn main() -> whw::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "whw_example_out".into());
    let mut config = RunConfig::from_text(&format!("mesh = 64\nprofile = bump_heat\nt_final = 200\nsample_stride = 4\nout = {out}\n"))?;
    let sim = cmd_simulate(&config);
    println!("[exit {}] {}", sim.code, sim.message);

    config.trace = Some(config.out.join("trace.csv"));
    let fit = cmd_decay_fit(&config);
    println!("[exit {}] {}", fit.code, fit.message);
    for f in sim.files.iter().chain(&fit.files) {
        println!("  wrote {}", f.display());
    }
    println!("\neffective configuration:\n{}", config.to_text());
    Ok(())
}
