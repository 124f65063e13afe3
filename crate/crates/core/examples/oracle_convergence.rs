//! Compare the discrete resolvent `(is − A_h)⁻¹y_h` with the closed-form
//! solution under mesh refinement.
//!
//! Run with `cargo run --release --example oracle_convergence`.

use whw::analysis::oracle_convergence;
use whw::resolvent::smooth_test_data;

fn main() -> whw::Result<()> {
    let y = smooth_test_data();
    println!("{:>6} {:>22} {:>32} {:>7}", "s", "meshes", "relative errors", "order");
    for s in [1.0, 10.0, 50.0, 100.0, 500.0] {
        let c = oracle_convergence(s, &y)?;
        println!(
            "{s:>6} {:>22} {:>32} {:>7.3}",
            format!("{:?}", c.meshes),
            format!("{:.2e} {:.2e} {:.2e}", c.errors[0], c.errors[1], c.errors[2]),
            c.order()
        );
    }
    Ok(())
}
