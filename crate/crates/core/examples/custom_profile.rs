//! Initial data from expressions in `x`, the domain checks that guard them,
//! and snapshots of the evolving state.
//!
//! Run with `cargo run --release --example custom_profile`.

use whw::dynamics::{build_generator, make_initial_data, simulate, Mesh, Profile};

fn main() -> whw::Result<()> {
    let mesh = Mesh::full(32)?;
    // vanishes to high order at the interfaces, so it is compatible data
    let good: Profile = "custom:u=sin(pi*x)^8;vt=sin(pi*(x-2))^4".parse()?;
    let x0 = make_initial_data(&good, mesh)?;
    let out = simulate(&x0, &build_generator(mesh), mesh.dx() / 2.0, 4.0, 64, Some(128))?;
    for snap in &out.snapshots {
        let e = snap.state.energy();
        println!(
            "t = {:.2}: E_wave1 = {:.4e}, E_heat = {:.4e}, E_wave2 = {:.4e}",
            snap.state.time, e.wave1, e.heat, e.wave2
        );
    }
    let csv = out.snapshots.last().expect("snapshots").to_csv();
    println!("last snapshot: {} rows, header `{}`", csv.lines().count() - 1, csv.lines().next().unwrap_or(""));

    // u(0) ≠ 0 breaks the clamped end; the profile is rejected
    let bad: Profile = "custom:u=1+x".parse()?;
    match make_initial_data(&bad, mesh) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
