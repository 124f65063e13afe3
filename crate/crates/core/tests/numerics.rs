//! Near-singular coupling detection and mesh refinement of the discrete
//! resolvent norm.

use num_complex::Complex64;

use whw::analysis::resolvent_norm;
use whw::dynamics::{build_generator, Mesh};
use whw::lambda::Frequency;
use whw::quadrature::QuadratureRule;
use whw::resolvent::{smooth_test_data, solve_resolvent, CoefficientPath};
use whw::spectrum::{find_eigenvalues, SearchRegion};
use whw::Error;

#[test]
fn solves_near_an_eigenvalue_are_refused() {
    let report = find_eigenvalues(&SearchRegion::default(), 1e-12).unwrap();
    let y = smooth_test_data();
    for e in &report.eigenvalues {
        let rule = QuadratureRule::for_rate(4.0 * e.lambda.norm().max(1.0));
        for k in 0..6 {
            let dir = Complex64::from_polar(1.0, k as f64);
            for path in [CoefficientPath::ScaledLu, CoefficientPath::Cramer] {
                for d in [0.0, 1e-9, 1e-6] {
                    let err = solve_resolvent(Frequency(e.lambda + d * dir), &y, &rule, path).unwrap_err();
                    assert!(matches!(err, Error::SingularCoupling { .. }), "{} {d} {path:?}: {err}", e.lambda);
                }
                let far = Frequency(e.lambda + 1e-2 * dir);
                assert!(solve_resolvent(far, &y, &rule, path).is_ok(), "{} {path:?}", e.lambda);
            }
        }
    }
}

fn norms(s: f64, meshes: &[usize]) -> Vec<f64> {
    meshes
        .iter()
        .map(|&n| resolvent_norm(s, &build_generator(Mesh::full(n).unwrap())).unwrap())
        .collect()
}

fn assert_cauchy(values: &[f64]) {
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    for w in diffs.windows(2) {
        assert!(w[1] <= 0.5 * w[0], "changes {diffs:?} do not halve");
    }
}

#[test]
fn norm_is_cauchy_under_doubling_at_low_shift() {
    assert_cauchy(&norms(10.0, &[64, 128, 256, 512, 1024]));
}

#[test]
fn norm_settles_at_high_shift() {
    let v = norms(100.0, &[512, 1024, 2048, 4096]);
    assert_cauchy(&v);
    let last = (v[3] - v[2]).abs() / v[3];
    assert!(last < 0.02, "{v:?}");
}
