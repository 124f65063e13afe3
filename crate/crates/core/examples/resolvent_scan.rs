//! Scan `‖R(is, A_h)‖` along the imaginary axis and fit its growth exponent.
//!
//! Run with `cargo run --release --example resolvent_scan [s_min s_max points]`.

use whw::analysis::{log_grid, scan_exponent, scan_resolvent, MeshPolicy, ScanMode};
use whw::dynamics::SystemKind;

fn main() -> whw::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (s_min, s_max, points) = match args[..] {
        [a, b, n] => (a, b, n as usize),
        _ => (100.0, 1000.0, 12),
    };
    let grid = log_grid(s_min, s_max, points)?;
    let policy = MeshPolicy::new(SystemKind::Full);
    let rows: Vec<_> = scan_resolvent(&grid, &policy, ScanMode::PeakResolved)
        .into_iter()
        .collect::<whw::Result<_>>()?;
    println!("{:>10} {:>12} {:>8} {:>10} {:>10}", "s", "norm", "mesh", "converged", "norm/√s");
    for r in &rows {
        println!(
            "{:>10.3} {:>12.5} {:>8} {:>10} {:>10.4}",
            r.s,
            r.resolvent_norm,
            r.mesh_n,
            r.converged,
            r.resolvent_norm / r.s.sqrt()
        );
    }
    let fit = scan_exponent(&rows, ScanMode::PeakResolved.fit_window(s_min, s_max))?;
    println!("\n{fit}");
    Ok(())
}
