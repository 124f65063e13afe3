//! Odd reflection of half-system data onto the full system: the reflected
//! energy stays exactly twice the half-system energy for all time.
//!
//! Run with `cargo run --release --example reflection_embedding`.

use whw::analysis::compare_reflection;
use whw::dynamics::{make_initial_data, Mesh, Profile, RoughLift};

fn main() -> whw::Result<()> {
    let mesh = Mesh::half(64)?;
    for profile in [Profile::BumpWave1, Profile::RoughLift(RoughLift::default())] {
        let x0 = make_initial_data(&profile, mesh)?;
        let cmp = compare_reflection(&x0, mesh.dx() / 2.0, 50.0, 640)?;
        println!("{profile}:");
        for (t, full, half) in &cmp.rows {
            println!("  t = {t:>5.1}  E_full = {full:.6e}  2 E_half = {:.6e}", 2.0 * half);
        }
        println!("  max relative deviation from 2: {:.2e}", cmp.max_relative_deviation());
    }
    Ok(())
}
