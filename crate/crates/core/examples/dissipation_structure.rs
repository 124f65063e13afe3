//! The discrete energy identity: `Re⟨A_h x, x⟩ = −‖D_h w‖²` exactly, energy
//! that never increases under Crank–Nicolson, and the convergence of the
//! discrete dissipation to the continuous one.
//!
//! Run with `cargo run --release --example dissipation_structure`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use whw::analysis::dissipation_order_check;
use whw::dynamics::{build_generator, make_initial_data, simulate, Mesh, Profile};

fn main() -> whw::Result<()> {
    let mesh = Mesh::full(32)?;
    let gen = build_generator(mesh);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..3 {
        let x: Vec<f64> = (0..gen.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        println!(
            "random x: Re<A_h x, x> = {:+.6e}, -|D_h w|^2 = {:+.6e}",
            gen.inner(&gen.apply(&x), &x),
            -gen.dissipation(&x)
        );
    }

    let x0 = make_initial_data(&Profile::BumpWave1, mesh)?;
    let run = simulate(&x0, &gen, mesh.dx() / 2.0, 50.0, 8, None)?;
    println!(
        "\nbump_wave1 to t = 50: E {:.6} -> {:.6}, largest step increase {:.2e}",
        run.trace.rows[0].energy,
        run.trace.rows.last().expect("rows").energy,
        run.max_step_increase
    );

    let c = dissipation_order_check();
    println!("\n{}: {} ({})", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail);
    Ok(())
}
