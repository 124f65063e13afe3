//! Solve `(λ − A)x = y` in closed form and audit the solution: ODE residuals,
//! boundary/transmission residuals and agreement of the two coefficient paths.
//!
//! Run with `cargo run --example closed_form_resolvent`.

use whw::lambda::Frequency;
use whw::quadrature::QuadratureRule;
use whw::resolvent::{smooth_test_data, solve_resolvent, CoefficientPath};

fn main() -> whw::Result<()> {
    let y = smooth_test_data();
    for lam in [Frequency::new(1.0, 0.0), Frequency::imaginary(10.0), Frequency::new(-3.0, 40.0)] {
        let rule = QuadratureRule::for_rate(4.0 * lam.norm().max(1.0));
        let x = solve_resolvent(lam, &y, &rule, CoefficientPath::ScaledLu)?;
        let report = x.residual_check(24, 1e-3)?;
        println!("λ = {}", lam.0);
        println!("  max ODE residual       {:.2e} (step {:.1e})", report.max_ode(), report.step);
        println!("  max interface residual {:.2e}", report.interfaces.max());
        println!("  |x| scale              {:.3e}", x.magnitude());
        match solve_resolvent(lam, &y, &rule, CoefficientPath::Cramer) {
            Ok(c) => {
                let p = x.evaluate_state(1.5)?;
                let q = c.evaluate_state(1.5)?;
                println!("  w(1.5): scaled LU {} vs Cramer {}", p.w, q.w);
            }
            Err(e) => println!("  Cramer path refused: {e}"),
        }
    }

    // a quadrature rule too coarse for the oscillation rate is refused
    let coarse = QuadratureRule::new(2, 4);
    if let Err(e) = solve_resolvent(Frequency::imaginary(500.0), &y, &coarse, CoefficientPath::ScaledLu) {
        println!("\ncoarse rule at s = 500: {e}");
    }
    Ok(())
}
