//! Dyadic-band maxima of `s^{−1/2}‖R(is, B_h)‖` for the half system: a
//! positive floor across bands means the `√s` growth cannot be improved.
//!
//! Run with `cargo run --release --example optimality_bands`.

use whw::analysis::{log_grid, scan_resolvent, MeshPolicy, OptimalityIndicator, ScanMode};
use whw::dynamics::SystemKind;

fn main() -> whw::Result<()> {
    let grid = log_grid(32.0, 511.0, 24)?;
    let rows: Vec<_> = scan_resolvent(&grid, &MeshPolicy::new(SystemKind::Half), ScanMode::PeakResolved)
        .into_iter()
        .collect::<whw::Result<_>>()?;
    let ind = OptimalityIndicator::from_rows(&rows);
    for (k, v) in &ind.bands {
        println!("band [2^{k}, 2^{}): max s^-1/2 ‖R‖ = {v:.4}", k + 1);
    }
    println!(
        "lower bound {:.4}, variation x{:.3}, holds (4 bands, x2): {}",
        ind.lower_bound,
        ind.variation,
        ind.holds(4, 2.0)
    );
    Ok(())
}
