//! Randomised invariants of the frequency-domain kernel, the closed-form
//! resolvent, the discrete generator, the fits and the file formats.

use num_complex::Complex64;
use proptest::prelude::*;

use whw::analysis::{decay_exponent, fit_power, resolvent_norm, scan_from_csv, scan_to_csv, ScanRow};
use whw::config::RunConfig;
use whw::dynamics::{
    build_generator, make_initial_data, reflect_half_state, EnergyRow, EnergyTrace, GridState, Mesh,
    Profile,
};
use whw::lambda::{
    adjugate_residual, build_m, cofactors, det_m, reduced_det, sqrt_branch, t_factors, CofactorSource, DetForm,
    Frequency,
};
use whw::quadrature::QuadratureRule;
use whw::resolvent::{smooth_test_data, solve_resolvent, CoefficientPath, DataFn, DataQuintuple};

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

/// λ off the negative real axis with moderate real part.
fn frequency() -> impl Strategy<Value = Frequency> {
    (-20.0..20.0f64, -1e3..1e3f64)
        .prop_filter("off the cut and the origin", |(re, im)| im.abs() > 1e-3 || *re > 1e-3)
        .prop_map(|(re, im)| Frequency::new(re, im))
}

fn polynomial_data(c: [f64; 4]) -> DataQuintuple {
    // f(0) = 0 and f̃(3) = 0 keep the data admissible
    DataQuintuple {
        f: DataFn::real(move |x| c[0] * x * (2.0 - x)).with_real_derivative(move |x| c[0] * (2.0 - 2.0 * x)),
        g: DataFn::real(move |x| c[1] * x),
        h: DataFn::real(move |x| c[2] + c[3] * x),
        ft: DataFn::real(move |x| c[3] * (3.0 - x)).with_real_derivative(move |_| -c[3]),
        gt: DataFn::real(move |x| c[1] * (3.0 - x) * x),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn branch_sqrt_squares_back(re in -1e4..1e4f64, im in -1e4..1e4f64) {
        prop_assume!(im.abs() > 1e-9 || re > 0.0);
        let z = Complex64::new(re, im);
        let r = sqrt_branch(z);
        prop_assert!(r.re >= 0.0);
        prop_assert!(rel(r * r, z) <= 1e-14);
    }

    #[test]
    fn t_factors_sum_and_difference(re in -20.0..20.0f64, im in -200.0..200.0f64) {
        prop_assume!(im.abs() > 1e-6 || re > 0.0);
        let lam = Frequency::new(re, im);
        let t = t_factors(lam);
        let l = lam.value();
        prop_assert!(rel(t.t_plus + t.t_minus, l.cosh()) <= 1e-12);
        prop_assert!(rel(t.t_plus - t.t_minus, lam.sqrt() * l.sinh()) <= 1e-12);
    }

    #[test]
    fn t_factors_bounded_below_on_the_axis(s in 2.914_213_562_373_095..1e4f64, sign in prop::bool::ANY) {
        let s = if sign { s } else { -s };
        let t = t_factors(Frequency::imaginary(s));
        prop_assert!(t.t_plus.norm().min(t.t_minus.norm()) >= 0.25);
    }

    #[test]
    fn determinant_forms_agree_on_the_axis(log_s in -2.0..3.0f64, sign in prop::bool::ANY) {
        let s = 10f64.powf(log_s) * if sign { 1.0 } else { -1.0 };
        let lam = Frequency::imaginary(s);
        let raw = det_m(lam, DetForm::Raw).unwrap().value;
        let factored = det_m(lam, DetForm::Factored).unwrap().value;
        let scaled = det_m(lam, DetForm::Scaled).unwrap().rescaled().unwrap();
        prop_assert!(rel(raw, factored) <= 1e-10);
        prop_assert!(rel(raw, scaled) <= 1e-10);
    }

    #[test]
    fn adjugate_identity_holds(lam in frequency()) {
        let m = build_m(lam).unwrap();
        let c = cofactors(lam, CofactorSource::ClosedForm).unwrap();
        let (r, _) = adjugate_residual(&m, &c, m.determinant());
        prop_assert!(r <= 1e-9, "residual {r} at {}", lam.0);
    }

    #[test]
    fn determinant_is_conjugate_symmetric(lam in frequency()) {
        let a = reduced_det(lam).unwrap();
        let b = reduced_det(lam.conj()).unwrap();
        prop_assert!(rel(a.conj(), b) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn resolvent_is_linear_in_the_data(
        c1 in prop::array::uniform4(-2.0..2.0f64),
        c2 in prop::array::uniform4(-2.0..2.0f64),
        k in -3.0..3.0f64,
        s in 0.5..60.0f64,
    ) {
        let lam = Frequency::new(0.3, s);
        let rule = QuadratureRule::for_rate(4.0 * s.max(1.0));
        let (y1, y2) = (polynomial_data(c1), polynomial_data(c2));
        let combined = y1.plus(&y2.scaled(Complex64::new(k, 0.0)));
        let x1 = solve_resolvent(lam, &y1, &rule, CoefficientPath::ScaledLu).unwrap();
        let x2 = solve_resolvent(lam, &y2, &rule, CoefficientPath::ScaledLu).unwrap();
        let x = solve_resolvent(lam, &combined, &rule, CoefficientPath::ScaledLu).unwrap();
        let scale = x1.magnitude().max(x2.magnitude() * k.abs()).max(1e-300);
        for xi in [0.2, 1.0, 1.4, 2.0, 2.7] {
            let (a, b, c) = (x1.evaluate_state(xi).unwrap(), x2.evaluate_state(xi).unwrap(), x.evaluate_state(xi).unwrap());
            for (p, q, r) in [(a.u, b.u, c.u), (a.w, b.w, c.w), (a.ut, b.ut, c.ut), (a.v, b.v, c.v)] {
                prop_assert!((p + k * q - r).norm() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn cramer_and_lu_paths_agree(re in -5.0..5.0f64, im in 0.5..200.0f64) {
        let lam = Frequency::new(re, im);
        let y = smooth_test_data();
        let rule = QuadratureRule::for_rate(4.0 * lam.norm().max(1.0));
        let a = solve_resolvent(lam, &y, &rule, CoefficientPath::ScaledLu).unwrap();
        let b = solve_resolvent(lam, &y, &rule, CoefficientPath::Cramer).unwrap();
        for (p, q) in [(a.coeff_a, b.coeff_a), (a.coeff_b, b.coeff_b), (a.coeff_c, b.coeff_c), (a.coeff_atilde, b.coeff_atilde)] {
            let scale = a.magnitude().max(p.norm());
            prop_assert!((p - q).norm() <= 1e-9 * scale, "{p} vs {q}");
        }
    }

    #[test]
    fn discrete_dissipation_identity(n in 8usize..40, seed in any::<u64>(), half in prop::bool::ANY) {
        let n = if half { n + n % 2 } else { n };
        let mesh = if half { Mesh::half(n).unwrap() } else { Mesh::full(n).unwrap() };
        let gen = build_generator(mesh);
        let mut state = seed;
        let x: Vec<f64> = (0..gen.dim())
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        let defect = gen.dissipation_defect(&x);
        let scale = gen.energy(&x) * n as f64 * n as f64;
        prop_assert!(defect.abs() <= 1e-12 * scale.max(1.0));
        prop_assert!(gen.inner(&gen.apply(&x), &x) <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn crank_nicolson_never_gains_energy(n in 8usize..24, dt_factor in 0.1..4.0f64, seed in any::<u64>()) {
        let mesh = Mesh::full(n).unwrap();
        let gen = build_generator(mesh);
        let mut state = seed | 1;
        let x: Vec<f64> = (0..gen.dim())
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state % 2001) as f64 / 1000.0 - 1.0
            })
            .collect();
        // packed steps: arbitrary grid vectors need not sample admissible data
        let dt = dt_factor * mesh.dx();
        let lhs = gen.a_h.shifted(1.0, -0.5 * dt).factor().unwrap();
        let rhs = gen.a_h.shifted(1.0, 0.5 * dt);
        let (mut cur, mut next) = (x, vec![0.0; gen.dim()]);
        let e0 = gen.energy(&cur);
        for _ in 0..20 {
            let before = gen.energy(&cur);
            rhs.matvec_into(&cur, &mut next);
            lhs.solve_in_place(&mut next);
            std::mem::swap(&mut cur, &mut next);
            prop_assert!(gen.energy(&cur) - before <= 1e-12 * e0);
        }
    }

    #[test]
    fn reflection_doubles_energy_of_any_admissible_half_state(beta in 0.05..0.49f64, n in 4usize..20) {
        let mesh = Mesh::half(2 * n).unwrap();
        let half = make_initial_data(&Profile::RoughLift(whw::dynamics::RoughLift { beta }), mesh).unwrap();
        let full: GridState = reflect_half_state(&half).unwrap();
        let ratio = full.energy().total / half.energy().total;
        prop_assert!((ratio - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn scan_norm_is_even_in_s(s in 0.5..40.0f64) {
        let gen = build_generator(Mesh::full(16).unwrap());
        let a = resolvent_norm(s, &gen).unwrap();
        let b = resolvent_norm(-s, &gen).unwrap();
        prop_assert!((a - b).abs() <= 1e-6 * a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_fit_recovers_exact_exponent(p in -5.0..5.0f64, c in 1e-3..1e3f64, x0 in 1.0..100.0f64) {
        let xs: Vec<f64> = (0..20).map(|k| x0 * 1.2f64.powi(k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| c * x.powf(p)).collect();
        let fit = fit_power(&xs, &ys, None).unwrap();
        prop_assert!((fit.exponent - p).abs() <= 1e-9);
        prop_assert!(fit.ci_halfwidth <= 1e-8);
    }

    #[test]
    fn decay_fit_recovers_exact_decay(p in 0.5..6.0f64, c in 1e-2..1e2f64, dt in 0.05..1.0f64) {
        let rows: Vec<EnergyRow> = (0..=(200.0 / dt) as usize)
            .map(|k| {
                let t = k as f64 * dt;
                let e = c * (1.0 + t).powf(-p);
                EnergyRow { t, energy: e, wave1: e, heat: 0.0, wave2: 0.0, dissipation: 0.0 }
            })
            .collect();
        let trace = EnergyTrace { rows };
        let fit = decay_exponent(&trace, 25.0).unwrap();
        // (1+t)^{-p} is a pure power only asymptotically
        prop_assert!((fit.exponent - p).abs() <= 0.05 * p);
    }

    #[test]
    fn csv_round_trips_are_exact(vals in prop::collection::vec((1e-3..1e4f64, 1e-20..1e20f64, 8usize..10000, any::<bool>()), 0..20)) {
        let rows: Vec<ScanRow> = vals
            .iter()
            .map(|&(s, r, n, c)| ScanRow { s, resolvent_norm: r, mesh_n: n, converged: c })
            .collect();
        prop_assert_eq!(scan_from_csv(&scan_to_csv(&rows)).unwrap(), rows);

        let trace = EnergyTrace {
            rows: vals
                .iter()
                .map(|&(t, e, _, _)| EnergyRow { t, energy: e, wave1: e / 3.0, heat: e / 7.0, wave2: e.sqrt(), dissipation: 1.0 / e })
                .collect(),
        };
        prop_assert_eq!(EnergyTrace::from_csv(&trace.to_csv()).unwrap(), trace);
    }

    #[test]
    fn config_text_round_trips(mesh in 8usize..4096, seed in any::<u64>(), t_final in 1e-3..1e4f64, half in prop::bool::ANY) {
        let system = if half { "half" } else { "full" };
        let mesh = mesh + mesh % 2;
        let c = RunConfig::from_text(&format!("mesh = {mesh}\nseed = {seed}\nt_final = {t_final:?}\nsystem = {system}")).unwrap();
        let d = RunConfig::from_text(&c.to_text()).unwrap();
        prop_assert_eq!(c.to_text(), d.to_text());
        prop_assert_eq!(d.t_final, t_final);
    }

    #[test]
    fn unknown_keys_are_always_rejected(key in "[a-z_]{1,12}") {
        prop_assume!(!whw::config::KEYS.contains(&key.as_str()));
        let text = format!("{} = 1", key);
        prop_assert!(RunConfig::from_text(&text).is_err());
    }
}
