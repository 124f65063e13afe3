//! Power-law fits on log–log axes.

use std::fmt;

use statrs::distribution::{ContinuousCDF, StudentsT};

use super::scan::ScanRow;
use crate::dynamics::EnergyTrace;
use crate::error::{Error, Result};

pub const MIN_FIT_POINTS: usize = 12;
/// Energies below this are rounding noise and end the fit window.
pub const ENERGY_FLOOR: f64 = 1e-30;
/// Samples taken from an energy trace for [`decay_exponent`].
pub const DECAY_SAMPLES: usize = 64;

/// Least-squares fit of `log y = intercept + exponent·log x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub exponent: f64,
    pub intercept: f64,
    /// Half-width of the 95% confidence interval on `exponent`.
    pub ci_halfwidth: f64,
    /// Smallest and largest abscissa used.
    pub window: (f64, f64),
    pub points: usize,
    /// RMS of the log-residuals.
    pub residual_rms: f64,
}

impl ExponentFit {
    /// `exponent=…,ci=…,window=…` block.
    pub fn key_values(&self) -> String {
        format!(
            "exponent={:?},ci={:?},window={:?}:{:?},points={},residual_rms={:?}",
            self.exponent, self.ci_halfwidth, self.window.0, self.window.1, self.points, self.residual_rms
        )
    }

    pub fn contains(&self, lo: f64, hi: f64) -> bool {
        self.exponent >= lo && self.exponent <= hi
    }
}

impl fmt::Display for ExponentFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "exponent {:.4} ± {:.4} over [{}, {}] ({} points)",
            self.exponent, self.ci_halfwidth, self.window.0, self.window.1, self.points
        )
    }
}

/// Fit `y ≈ C·x^p` on the points with `x` inside `window` (all when `None`).
pub fn fit_power(xs: &[f64], ys: &[f64], window: Option<(f64, f64)>) -> Result<ExponentFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument(format!("{} abscissae but {} ordinates", xs.len(), ys.len())));
    }
    let (lo, hi) = window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let mut pts = Vec::new();
    for (&x, &y) in xs.iter().zip(ys) {
        if x < lo || x > hi {
            continue;
        }
        if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidArgument(format!("non-positive point ({x}, {y}) in fit window")));
        }
        pts.push((x.ln(), y.ln(), x));
    }
    let n = pts.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints { got: n, need: MIN_FIT_POINTS });
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::InvalidArgument("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let dof = nf - 2.0;
    let se = (sse / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof).expect("dof > 0").inverse_cdf(0.975);
    let xmin = pts.iter().map(|p| p.2).fold(f64::INFINITY, f64::min);
    let xmax = pts.iter().map(|p| p.2).fold(f64::NEG_INFINITY, f64::max);
    Ok(ExponentFit {
        exponent: slope,
        intercept,
        ci_halfwidth: t * se,
        window: (xmin, xmax),
        points: n,
        residual_rms: (sse / nf).sqrt(),
    })
}

/// Growth exponent of the converged scan rows with `s` in `window`.
pub fn scan_exponent(rows: &[ScanRow], window: (f64, f64)) -> Result<ExponentFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.converged)
        .map(|r| (r.s.abs(), r.resolvent_norm))
        .unzip();
    fit_power(&xs, &ys, Some(window))
}

/// Energy-decay exponent `p` in `E(t) ≈ C t^{−p}` for `t ≥ t_start`.
///
/// The trace is resampled at [`DECAY_SAMPLES`] log-uniform times (nearest
/// recorded row) so that every octave of the window carries equal weight;
/// a uniform-in-time sample would let the tail dominate the slope. The
/// window ends where the energy first drops below [`ENERGY_FLOOR`].
pub fn decay_exponent(trace: &EnergyTrace, t_start: f64) -> Result<ExponentFit> {
    if !(t_start > 0.0) {
        return Err(Error::InvalidArgument(format!("t_start must be positive, got {t_start}")));
    }
    let rows = &trace.rows;
    let t_last = rows.last().map_or(0.0, |r| r.t);
    if t_last < 4.0 * t_start * (1.0 - 1e-9) {
        return Err(Error::InvalidArgument(format!(
            "trace ends at t = {t_last}; need at least 4·t_start = {}",
            4.0 * t_start
        )));
    }
    let first = rows.iter().position(|r| r.t >= t_start).expect("trace reaches t_start");
    let end = rows[first..]
        .iter()
        .position(|r| !(r.energy >= ENERGY_FLOOR))
        .map_or(rows.len(), |k| first + k);
    if end == first {
        return Err(Error::EnergyUnderflow { floor: ENERGY_FLOOR });
    }
    let window = &rows[first..end];
    let (a, b) = (window[0].t.ln(), window[window.len() - 1].t.ln());
    let mut picked: Vec<usize> = Vec::with_capacity(DECAY_SAMPLES);
    let mut cursor = 0;
    for k in 0..DECAY_SAMPLES {
        let target = (a + (b - a) * k as f64 / (DECAY_SAMPLES - 1) as f64).exp();
        while cursor + 1 < window.len() && (window[cursor + 1].t - target).abs() <= (window[cursor].t - target).abs() {
            cursor += 1;
        }
        if picked.last() != Some(&cursor) {
            picked.push(cursor);
        }
    }
    let xs: Vec<f64> = picked.iter().map(|&i| window[i].t).collect();
    let ys: Vec<f64> = picked.iter().map(|&i| window[i].energy).collect();
    let fit = fit_power(&xs, &ys, None)?;
    Ok(ExponentFit {
        exponent: -fit.exponent,
        intercept: fit.intercept,
        ..fit
    })
}

/// Comparison rates `r(t)` for decay statements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateFunction {
    /// `t^{−p}`
    Power(f64),
    /// `t^{−p}·ln t`
    PowerLog(f64),
}

impl RateFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Self::Power(p) => t.powf(-p),
            Self::PowerLog(p) => t.powf(-p) * t.ln(),
        }
    }

    pub fn tag(&self) -> String {
        match *self {
            Self::Power(p) => format!("t^-{p}"),
            Self::PowerLog(p) => format!("t^-{p}*log(t)"),
        }
    }

    /// Domain start: `r` is positive for `t` above this.
    pub fn domain_start(&self) -> f64 {
        match self {
            Self::Power(_) => 0.0,
            Self::PowerLog(_) => 1.0,
        }
    }

    /// `E(t)/r(t)` at each trace time inside the domain.
    pub fn ratios(&self, trace: &EnergyTrace) -> Vec<(f64, f64)> {
        trace
            .rows
            .iter()
            .filter(|r| r.t > self.domain_start())
            .map(|r| (r.t, r.energy / self.eval(r.t)))
            .collect()
    }
}

/// Maximum of `s^{−1/2}‖R(is)‖` over each dyadic band `[2^k, 2^{k+1})`.
pub fn dyadic_band_maxima(rows: &[ScanRow]) -> Vec<(i32, f64)> {
    let mut bands: Vec<(i32, f64)> = Vec::new();
    for r in rows.iter().filter(|r| r.s.abs() >= 1.0) {
        let k = r.s.abs().log2().floor() as i32;
        let v = r.resolvent_norm / r.s.abs().sqrt();
        match bands.iter_mut().find(|b| b.0 == k) {
            Some(b) => b.1 = b.1.max(v),
            None => bands.push((k, v)),
        }
    }
    bands.sort_by_key(|b| b.0);
    bands
}

/// Result of the band-maxima optimality check.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityIndicator {
    pub bands: Vec<(i32, f64)>,
    pub lower_bound: f64,
    /// Largest over smallest band maximum.
    pub variation: f64,
}

impl OptimalityIndicator {
    pub fn from_rows(rows: &[ScanRow]) -> Self {
        let bands = dyadic_band_maxima(rows);
        let lo = bands.iter().map(|b| b.1).fold(f64::INFINITY, f64::min);
        let hi = bands.iter().map(|b| b.1).fold(0.0, f64::max);
        Self {
            lower_bound: if bands.is_empty() { 0.0 } else { lo },
            variation: if bands.is_empty() { f64::INFINITY } else { hi / lo },
            bands,
        }
    }

    /// At least `min_bands` consecutive bands, positive floor, variation within `max_variation`.
    pub fn holds(&self, min_bands: usize, max_variation: f64) -> bool {
        let consecutive = self.bands.windows(2).all(|w| w[1].0 == w[0].0 + 1);
        self.bands.len() >= min_bands && consecutive && self.lower_bound > 0.0 && self.variation <= max_variation
    }
}

/// `|decay − 2/α̂|` and the combined uncertainty it should fall within.
pub fn exponent_consistency(scan: &ExponentFit, decay: &ExponentFit) -> (f64, f64) {
    let alpha = scan.exponent;
    let predicted = 2.0 / alpha;
    // d(2/α) = 2/α² dα
    let predicted_ci = 2.0 / (alpha * alpha) * scan.ci_halfwidth;
    ((decay.exponent - predicted).abs(), predicted_ci + decay.ci_halfwidth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::EnergyRow;

    fn xs() -> Vec<f64> {
        (1..=20).map(|k| k as f64).collect()
    }

    #[test]
    fn exact_power_law() {
        let x = xs();
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        let f = fit_power(&x, &y, None).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-12 && f.ci_halfwidth < 1e-10);
    }

    #[test]
    fn constant_data() {
        let x = xs();
        let f = fit_power(&x, &[3.0; 20], None).unwrap();
        assert!(f.exponent.abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let x = xs();
        let y = x.clone();
        assert!(matches!(
            fit_power(&x, &y, Some((1.0, 5.0))),
            Err(Error::InsufficientPoints { got: 5, need: 12 })
        ));
    }

    fn synthetic(f: impl Fn(f64) -> f64, t_end: f64) -> EnergyTrace {
        EnergyTrace {
            rows: (0..=4000)
                .map(|k| {
                    let t = t_end * k as f64 / 4000.0;
                    EnergyRow { t, energy: f(t), wave1: 0.0, heat: 0.0, wave2: 0.0, dissipation: 0.0 }
                })
                .collect(),
        }
    }

    #[test]
    fn decay_of_exact_power() {
        let tr = synthetic(|t| (1.0 + t).powi(-4) * 1e3, 200.0);
        let f = decay_exponent(&tr, 25.0).unwrap();
        assert!((f.exponent - 4.0).abs() < 0.15, "{f}");
        let tr = synthetic(|t| t.max(1e-3).powi(-4), 200.0);
        assert!((decay_exponent(&tr, 25.0).unwrap().exponent - 4.0).abs() < 1e-9);
    }

    #[test]
    fn decay_rejects_short_or_empty_traces() {
        let tr = synthetic(|t| t.max(1e-3).powi(-4), 80.0);
        assert!(decay_exponent(&tr, 25.0).is_err());
        let zero = synthetic(|_| 0.0, 200.0);
        assert!(matches!(decay_exponent(&zero, 25.0), Err(Error::EnergyUnderflow { .. })));
    }

    #[test]
    fn band_maxima() {
        let rows: Vec<ScanRow> = [33.0, 50.0, 70.0, 100.0, 130.0, 250.0]
            .iter()
            .map(|&s: &f64| ScanRow { s, resolvent_norm: 1.5 * s.sqrt(), mesh_n: 64, converged: true })
            .collect();
        let ind = OptimalityIndicator::from_rows(&rows);
        assert_eq!(ind.bands.iter().map(|b| b.0).collect::<Vec<_>>(), vec![5, 6, 7]);
        assert!((ind.variation - 1.0).abs() < 1e-12);
        assert!(ind.holds(3, 2.0) && !ind.holds(4, 2.0));
    }

    #[test]
    fn rate_functions() {
        assert_eq!(RateFunction::Power(4.0).eval(2.0), 1.0 / 16.0);
        assert!(RateFunction::PowerLog(4.0).eval(std::f64::consts::E) > 0.0);
        assert_eq!(RateFunction::Power(4.0).tag(), "t^-4");
    }
}
