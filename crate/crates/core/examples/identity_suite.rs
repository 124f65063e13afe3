//! The packaged checks behind `whw verify`, plus the same suite with the
//! literal (uncorrected) cofactor table to show how a typo is pinpointed.
//!
//! Run with `cargo run --release --example identity_suite`.

use whw::analysis::{discrete_suite, analytic_suite, SuiteOptions};
use whw::lambda::CofactorSource;

fn main() {
    let mut report = analytic_suite(&SuiteOptions::default());
    report.extend(discrete_suite(7));
    print!("{}", report.to_text());

    let literal = analytic_suite(&SuiteOptions {
        cofactor_source: CofactorSource::Misprinted,
        ..SuiteOptions::default()
    });
    let adj = literal.get("adjugate_identity").expect("adjugate check is part of the suite");
    println!("\nwith the literal cofactor table: {} ({})", if adj.passed { "PASS" } else { "FAIL" }, adj.detail);
}
