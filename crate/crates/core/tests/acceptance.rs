//! End-to-end acceptance criteria. Prints one `PASS`/`FAIL` line per
//! criterion and exits nonzero if any fails.

use std::process::ExitCode;
use std::thread;

use whw::analysis::{
    analytic_suite, compare_reflection, decay_exponent, dissipation_order_check, log_grid, oracle_convergence,
    scan_exponent, scan_resolvent, MeshPolicy, OptimalityIndicator, ScanMode, ScanRow, SuiteOptions,
};
use whw::dynamics::{build_generator, make_initial_data, simulate, Mesh, Profile, SystemKind};
use whw::resolvent::smooth_test_data;
use whw::spectrum::{find_eigenvalues, SearchRegion};

type Verdict = Result<String, String>;

fn scan_rows(grid: &[f64], system: SystemKind) -> Result<Vec<ScanRow>, String> {
    scan_resolvent(grid, &MeshPolicy::new(system), ScanMode::PeakResolved)
        .into_iter()
        .collect::<whw::Result<_>>()
        .map_err(|e| e.to_string())
}

/// Peak-resolved resolvent growth on `[100, 1000]` fits `s^{1/2}`.
fn growth_exponent() -> Verdict {
    let grid = log_grid(100.0, 1000.0, 16).map_err(|e| e.to_string())?;
    let rows = scan_rows(&grid, SystemKind::Full)?;
    let fit = scan_exponent(&rows, ScanMode::PeakResolved.fit_window(100.0, 1000.0)).map_err(|e| e.to_string())?;
    let msg = format!("exponent {:.4} ± {:.4}", fit.exponent, fit.ci_halfwidth);
    if (fit.exponent - 0.5).abs() <= 0.1 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// `s^{-1/2}‖R(is)‖` on the half system keeps a floor over dyadic bands 5 to 8.
fn optimality_bands() -> Verdict {
    let grid = log_grid(34.0, 510.0, 24).map_err(|e| e.to_string())?;
    let ind = OptimalityIndicator::from_rows(&scan_rows(&grid, SystemKind::Half)?);
    let msg = format!(
        "{} bands, lower bound {:.4}, variation x{:.3}",
        ind.bands.len(),
        ind.lower_bound,
        ind.variation
    );
    if ind.holds(4, 2.0) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

struct DecayRun {
    profile: &'static str,
    n: usize,
    exponent: f64,
    monotone: bool,
}

fn decay_runs() -> Result<Vec<DecayRun>, String> {
    let cases: Vec<(&'static str, usize)> = ["bump_heat", "bump_wave1", "rough_lift"]
        .into_iter()
        .flat_map(|p| [64, 128, 256].map(move |n| (p, n)))
        .collect();
    thread::scope(|scope| {
        let handles: Vec<_> = cases
            .iter()
            .map(|&(profile, n)| {
                scope.spawn(move || -> whw::Result<DecayRun> {
                    let mesh = Mesh::full(n)?;
                    let x0 = make_initial_data(&profile.parse::<Profile>()?, mesh)?;
                    let out = simulate(&x0, &build_generator(mesh), mesh.dx() / 2.0, 200.0, 4, None)?;
                    let e0 = out.trace.rows[0].energy;
                    Ok(DecayRun {
                        profile,
                        n,
                        exponent: decay_exponent(&out.trace, 25.0)?.exponent,
                        monotone: out.max_step_increase <= 1e-12 * e0,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked").map_err(|e| e.to_string()))
            .collect()
    })
}

/// Energy decays like `t^{-4}` on `[25, 200]`, stably under refinement.
fn decay_rate(runs: &[DecayRun]) -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for profile in ["bump_heat", "bump_wave1", "rough_lift"] {
        let p: Vec<&DecayRun> = runs.iter().filter(|r| r.profile == profile).collect();
        let drift = (p[p.len() - 1].exponent - p[p.len() - 2].exponent).abs();
        ok &= p.iter().all(|r| (3.5..=4.5).contains(&r.exponent)) && drift < 0.2;
        let exps: Vec<String> = p.iter().map(|r| format!("{:.3}@{}", r.exponent, r.n)).collect();
        parts.push(format!("{profile} {} drift {drift:.3}", exps.join(" ")));
    }
    let msg = parts.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Every eigenvalue in the default region lies strictly left of the axis.
fn spectral_gap() -> Verdict {
    let report = find_eigenvalues(&SearchRegion::default(), 1e-10).map_err(|e| e.to_string())?;
    let abscissa = report.spectral_abscissa().unwrap_or(f64::NEG_INFINITY);
    let msg = format!(
        "{} roots (winding {}), abscissa {abscissa:.6}",
        report.eigenvalues.len(),
        report.winding_total
    );
    if report.is_consistent() && abscissa < -1e-4 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// The analytic identities all hold.
fn identities() -> Verdict {
    let report = analytic_suite(&SuiteOptions::default());
    if report.passed() {
        Ok(format!("{} checks", report.checks.len()))
    } else {
        Err(format!("failing: {}", report.failures().join(", ")))
    }
}

/// The discrete resolvent converges to the closed form at second order.
fn oracle_order() -> Verdict {
    let y = smooth_test_data();
    let mut parts = Vec::new();
    let mut ok = true;
    for s in [1.0, 10.0, 50.0, 100.0, 500.0] {
        let c = oracle_convergence(s, &y).map_err(|e| e.to_string())?;
        ok &= c.order() >= 1.8;
        parts.push(format!("s={s}: {:.2}", c.order()));
    }
    let msg = parts.join(", ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Crank–Nicolson energy never increases and the dissipation identity converges.
fn energy_monotone(runs: &[DecayRun]) -> Verdict {
    let bad: Vec<String> = runs.iter().filter(|r| !r.monotone).map(|r| format!("{}@{}", r.profile, r.n)).collect();
    let order = dissipation_order_check();
    let msg = format!("{} runs monotone; {}", runs.len() - bad.len(), order.detail);
    if bad.is_empty() && order.passed {
        Ok(msg)
    } else {
        Err(format!("{msg}; non-monotone: {}", bad.join(" ")))
    }
}

/// Odd reflection of half-system data doubles the energy for `t ≤ 50`.
fn reflection() -> Verdict {
    let mesh = Mesh::half(64).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for profile in ["bump_wave1", "rough_lift"] {
        let profile: Profile = profile.parse().map_err(|e: whw::Error| e.to_string())?;
        let x0 = make_initial_data(&profile, mesh).map_err(|e| e.to_string())?;
        let cmp = compare_reflection(&x0, mesh.dx() / 2.0, 50.0, 64).map_err(|e| e.to_string())?;
        worst = worst.max(cmp.max_relative_deviation());
    }
    let msg = format!("max relative deviation {worst:.2e}");
    if worst < 0.01 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let runs = decay_runs();
    let with_runs = |f: fn(&[DecayRun]) -> Verdict| match &runs {
        Ok(r) => f(r),
        Err(e) => Err(e.clone()),
    };
    let verdicts: Vec<(&str, Verdict)> = vec![
        ("1 resolvent growth exponent", growth_exponent()),
        ("2 optimality band floor", optimality_bands()),
        ("3 energy decay exponent", with_runs(decay_rate)),
        ("4 spectral abscissa", spectral_gap()),
        ("5 analytic identities", identities()),
        ("6 resolvent oracle order", oracle_order()),
        ("7 monotone energy", with_runs(energy_monotone)),
        ("8 reflection embedding", reflection()),
    ];
    let mut failed = 0;
    for (name, verdict) in &verdicts {
        match verdict {
            Ok(msg) => println!("PASS {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
