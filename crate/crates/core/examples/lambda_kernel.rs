//! The frequency-domain building blocks: branch square root, the `T±`
//! factors, the three determinant forms and the cofactor table.
//!
//! Run with `cargo run --example lambda_kernel`.

use whw::lambda::{compare_cofactors, det_m, reduced_det, t_factors, CofactorSource, DetForm, Frequency};

fn main() -> whw::Result<()> {
    println!("{:>10} {:>12} {:>12} {:>14}", "s", "|T+(is)|", "|T-(is)|", "raw/factored-1");
    for s in [0.5, 3.0, 10.0, 100.0, 1000.0] {
        let lam = Frequency::imaginary(s);
        let t = t_factors(lam);
        let raw = det_m(lam, DetForm::Raw)?.value;
        let factored = det_m(lam, DetForm::Factored)?.value;
        println!(
            "{s:>10} {:>12.5} {:>12.5} {:>14.2e}",
            t.t_plus.norm(),
            t.t_minus.norm(),
            (raw / factored - 1.0).norm()
        );
    }

    // the scaled form divides out 2λ²e^{√λ}; rescaling recovers the raw value
    let lam = Frequency::new(-2.0, 300.0);
    let scaled = det_m(lam, DetForm::Scaled)?;
    let raw = det_m(lam, DetForm::Raw)?.value;
    println!(
        "\nλ = {}: scaled det {:.6}, scale exponent {:.2}, rescaled/raw - 1 = {:.1e}",
        lam.0,
        scaled.value,
        scaled.scale_exponent,
        (scaled.rescaled()? / raw - 1.0).norm()
    );

    let one = det_m(Frequency::new(1.0, 0.0), DetForm::Raw)?.value;
    let expected = -(1f64).sinh() * (4.0 * (1f64).cosh().powi(2) - 1.0);
    println!("\ndet M at λ = 1: {} (closed value {expected})", one.re);

    // det/√λ is entire; its zeros are the eigenvalues
    let lam = Frequency::new(-0.026978896891108, 1.078148);
    println!("|det/√λ| near the least-damped eigenvalue: {:.3e}", reduced_det(lam)?.norm());

    for source in [CofactorSource::ClosedForm, CofactorSource::Misprinted] {
        let cmp = compare_cofactors(Frequency::new(2.0, 1.0), source)?;
        println!(
            "{source:?} cofactors vs signed minors: max relative error {:.2e} at entry {:?}",
            cmp.max_rel_err, cmp.worst_entry
        );
    }
    Ok(())
}
