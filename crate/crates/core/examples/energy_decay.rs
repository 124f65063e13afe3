//! Simulate a built-in profile and fit the power-law energy decay on
//! `t ∈ [25, 200]`, at two resolutions.
//!
//! Run with `cargo run --release --example energy_decay [profile]`.

use whw::analysis::decay_exponent;
use whw::dynamics::{build_generator, make_initial_data, simulate, Mesh, Profile};

fn main() -> whw::Result<()> {
    let profile: Profile = std::env::args().nth(1).as_deref().unwrap_or("bump_heat").parse()?;
    for n in [64, 128] {
        let mesh = Mesh::full(n)?;
        let gen = build_generator(mesh);
        let x0 = make_initial_data(&profile, mesh)?;
        let out = simulate(&x0, &gen, mesh.dx() / 2.0, 200.0, 4, None)?;
        let fit = decay_exponent(&out.trace, 25.0)?;
        let last = out.trace.rows.last().expect("non-empty trace");
        println!("{profile} n={n}: E(0)={:.4e} E(200)={:.4e}", out.trace.rows[0].energy, last.energy);
        println!("  {fit}");
        println!("  max step increase {:.1e}, balance residual {:.1e}", out.max_step_increase, out.max_balance_residual);
    }
    Ok(())
}
