//! Locate the eigenvalues in a rectangle of the left half-plane with the
//! argument principle and Newton polishing, then check the imaginary axis.
//!
//! Run with `cargo run --release --example spectrum_search [re_min,re_max,im_min,im_max]`.

use whw::spectrum::{count_zeros, find_eigenvalues, imaginary_axis_clearance, SearchRegion, DEFAULT_CLEARANCE_FLOOR};

fn main() -> whw::Result<()> {
    let region = match std::env::args().nth(1) {
        Some(text) => SearchRegion::parse(&text)?,
        None => SearchRegion::default(),
    };
    let report = find_eigenvalues(&region, 1e-10)?;
    println!(
        "{} eigenvalues (winding total {}) in [{}, {}] x [{}, {}]",
        report.eigenvalues.len(),
        report.winding_total,
        region.re_min,
        region.re_max,
        region.im_min,
        region.im_max
    );
    let mut by_decay = report.eigenvalues.clone();
    by_decay.sort_by(|a, b| b.lambda.re.total_cmp(&a.lambda.re));
    println!("least damped:");
    for e in by_decay.iter().take(6) {
        println!("  {:+.6} {:+.6}i  residual {:.1e}  newton {}", e.lambda.re, e.lambda.im, e.abs_det_residual, e.newton_iters);
    }
    if let Some(a) = report.spectral_abscissa() {
        println!("spectral abscissa {a:.6}");
    }

    let right = SearchRegion::new(1e-3, 10.0, -50.0, 50.0).audit();
    println!("zeros in the right half-plane audit box: {}", count_zeros(&right, 256)?);

    let c = imaginary_axis_clearance(1.0, 1e3, 4000, DEFAULT_CLEARANCE_FLOOR)?;
    println!("min |scaled det(is)| on s in [1, 1000]: {:.4} at s = {:.3}", c.margin, c.argmin);
    Ok(())
}
