//! Resolvent-norm scans along the imaginary axis.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use super::norm::resolvent_norm;
use crate::dynamics::{build_generator, DiscreteGenerator, Mesh, SystemKind};
use crate::error::{Error, Result};

/// One row of a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub s: f64,
    pub resolvent_norm: f64,
    pub mesh_n: usize,
    /// The value moved by less than [`CONVERGENCE_RTOL`] when the mesh was doubled.
    pub converged: bool,
}

pub const SCAN_HEADER: &str = "s,resolvent_norm,mesh_n,converged";
pub const CONVERGENCE_RTOL: f64 = 0.02;

/// How each row samples `s ↦ ‖R(is)‖`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanMode {
    /// The norm exactly at the requested `s`.
    Pointwise,
    /// The largest norm in `[s − π/2, s + π/2]`, reported at its location.
    ///
    /// The norm has one resonance peak per eigenvalue branch roughly every π
    /// in `s`, and peak positions drift with the mesh, so pointwise values are
    /// not comparable across meshes while peak heights are.
    #[default]
    PeakResolved,
}

impl ScanMode {
    /// How far a row's reported `s` may sit from the requested one.
    pub fn location_slack(&self) -> f64 {
        match self {
            Self::Pointwise => 0.0,
            Self::PeakResolved => 0.5 * PI,
        }
    }

    /// Fit window covering rows requested in `[s_min, s_max]`.
    pub fn fit_window(&self, s_min: f64, s_max: f64) -> (f64, f64) {
        let d = self.location_slack();
        ((s_min - d).max(f64::MIN_POSITIVE), s_max + d)
    }
}

/// Mesh chosen for a shift `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshPolicy {
    pub system: SystemKind,
    pub min_n: usize,
    pub points_per_wavelength: f64,
}

impl MeshPolicy {
    pub fn new(system: SystemKind) -> Self {
        Self {
            system,
            min_n: 64,
            points_per_wavelength: 20.0,
        }
    }

    /// `max(min_n, ⌈ppw·|s|/2π⌉)`, rounded up to even. The default of 20
    /// points per wavelength keeps peak heights within 2% under doubling.
    pub fn n_for(&self, s: f64) -> usize {
        let n = self.min_n.max((self.points_per_wavelength * s.abs() / (2.0 * PI)).ceil() as usize);
        n + n % 2
    }
}

const COARSE_POINTS: usize = 24;
const GOLDEN_ITERS: usize = 40;

/// Maximise the norm over `[s − π/2, s + π/2]`: coarse grid, then golden section.
pub fn peak_norm(s: f64, gen: &DiscreteGenerator) -> Result<(f64, f64)> {
    let half = 0.5 * PI;
    let h = 2.0 * half / (COARSE_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..COARSE_POINTS).map(|k| s - half + h * k as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&x| resolvent_norm(x, gen)).collect::<Result<_>>()?;
    let best = (0..COARSE_POINTS)
        .max_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("non-empty grid");
    let (mut a, mut b) = (grid[best] - h, grid[best] + h);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = resolvent_norm(x1, gen)?;
    let mut f2 = resolvent_norm(x2, gen)?;
    for _ in 0..GOLDEN_ITERS {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = resolvent_norm(x1, gen)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = resolvent_norm(x2, gen)?;
        }
        if b - a < 1e-7 * s.abs().max(1.0) {
            break;
        }
    }
    let candidates = [(grid[best], values[best]), (x1, f1), (x2, f2)];
    Ok(candidates
        .into_iter()
        .max_by(|p, q| p.1.total_cmp(&q.1))
        .expect("three candidates"))
}

fn evaluate(s: f64, gen: &DiscreteGenerator, mode: ScanMode) -> Result<(f64, f64)> {
    match mode {
        ScanMode::Pointwise => Ok((s, resolvent_norm(s, gen)?)),
        ScanMode::PeakResolved => peak_norm(s, gen),
    }
}

/// Extra doublings allowed for a row that fails the 2% rule.
pub const EXTRA_REFINEMENTS: usize = 1;

/// One scan row: evaluate on the doubled policy mesh and compare with the
/// policy mesh; a row that changes by more than [`CONVERGENCE_RTOL`] is
/// doubled again (up to [`EXTRA_REFINEMENTS`] times) and judged on the last
/// pair. The row reports the finest value.
///
/// In peak-resolved mode every further evaluation is centred on the peak of
/// the finest mesh so far, so all meshes measure the same resonance.
pub fn scan_row(s: f64, policy: &MeshPolicy, mode: ScanMode) -> Result<ScanRow> {
    let gen = |n: usize| -> Result<DiscreteGenerator> { Ok(build_generator(Mesh::new(n, policy.system)?)) };
    let mut n = 2 * policy.n_for(s);
    let (mut at, mut value) = evaluate(s, &gen(n)?, mode)?;
    let (_, mut previous) = evaluate(at, &gen(n / 2)?, mode)?;
    let converged = |a: f64, b: f64| (a - b).abs() < CONVERGENCE_RTOL * a;
    for _ in 0..EXTRA_REFINEMENTS {
        if converged(value, previous) {
            break;
        }
        n *= 2;
        previous = value;
        (at, value) = evaluate(at, &gen(n)?, mode)?;
    }
    Ok(ScanRow {
        s: at,
        resolvent_norm: value,
        mesh_n: n,
        converged: converged(value, previous),
    })
}

/// Scan every `s` in `grid` in parallel. Failures stay per row.
pub fn scan_resolvent(grid: &[f64], policy: &MeshPolicy, mode: ScanMode) -> Vec<Result<ScanRow>> {
    grid.par_iter().map(|&s| scan_row(s, policy, mode)).collect()
}

/// `points` values log-spaced over `[s_min, s_max]`.
pub fn log_grid(s_min: f64, s_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(s_min > 0.0 && s_max > s_min) || points < 2 {
        return Err(Error::InvalidArgument(format!(
            "log grid needs 0 < s_min < s_max and ≥ 2 points, got [{s_min}, {s_max}] × {points}"
        )));
    }
    let (a, b) = (s_min.ln(), s_max.ln());
    Ok((0..points)
        .map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp())
        .collect())
}

pub fn scan_to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(SCAN_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(out, "{:?},{:?},{},{}", r.s, r.resolvent_norm, r.mesh_n, r.converged).expect("write to string");
    }
    out
}

pub fn scan_from_csv(text: &str) -> Result<Vec<ScanRow>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(SCAN_HEADER) {
        return Err(Error::Config(format!("scan CSV must start with `{SCAN_HEADER}`")));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(k, line)| {
            let bad = |e: String| Error::Config(format!("scan line {}: {e}", k + 2));
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(bad("expected 4 columns".into()));
            }
            Ok(ScanRow {
                s: cols[0].parse().map_err(|e| bad(format!("{e}")))?,
                resolvent_norm: cols[1].parse().map_err(|e| bad(format!("{e}")))?,
                mesh_n: cols[2].parse().map_err(|e| bad(format!("{e}")))?,
                converged: cols[3].parse().map_err(|e| bad(format!("{e}")))?,
            })
        })
        .collect()
}
