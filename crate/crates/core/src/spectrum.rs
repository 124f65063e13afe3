//! Eigenvalues of the generator as zeros of `det M_λ`.
//!
//! Zeros are counted with the argument principle on rectangles, isolated by
//! quadtree bisection and polished with Newton's method. Contour integrals
//! use [`reduced_det`], which is entire, so rectangles may straddle the
//! negative real axis where the scaled determinant has its branch cut.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lambda::{det_m, reduced_det, DetForm, Frequency};

/// Axis-aligned rectangle in the λ-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    /// Radius of the disk around λ = 0 the region must avoid.
    pub exclusion_radius: f64,
    /// Permit `re_max > 0`. Used only to confirm there is nothing there.
    pub audit: bool,
}

impl Default for SearchRegion {
    fn default() -> Self {
        Self::new(-20.0, -1e-3, -50.0, 50.0)
    }
}

impl SearchRegion {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Self {
            re_min,
            re_max,
            im_min,
            im_max,
            exclusion_radius: 1e-3,
            audit: false,
        }
    }

    pub fn audit(mut self) -> Self {
        self.audit = true;
        self
    }

    /// Parse `re_min,re_max,im_min,im_max`.
    pub fn parse(text: &str) -> Result<Self> {
        let v: Vec<f64> = text
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Config(format!("region `{text}`: {e}")))?;
        if v.len() != 4 {
            return Err(Error::Config(format!(
                "region `{text}` needs four numbers re_min,re_max,im_min,im_max"
            )));
        }
        let r = Self::new(v[0], v[1], v[2], v[3]);
        Ok(if r.re_max > 0.0 { r.audit() } else { r })
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re_min - slack
            && z.re <= self.re_max + slack
            && z.im >= self.im_min - slack
            && z.im <= self.im_max + slack
    }

    /// Reflection through the real axis.
    pub fn conj(&self) -> Self {
        Self {
            im_min: -self.im_max,
            im_max: -self.im_min,
            ..*self
        }
    }

    fn distance_to_origin(&self) -> f64 {
        let dx = if self.re_min > 0.0 {
            self.re_min
        } else if self.re_max < 0.0 {
            -self.re_max
        } else {
            0.0
        };
        let dy = if self.im_min > 0.0 {
            self.im_min
        } else if self.im_max < 0.0 {
            -self.im_max
        } else {
            0.0
        };
        dx.hypot(dy)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.re_min < self.re_max) || !(self.im_min < self.im_max) {
            return Err(Error::InvalidArgument(format!("degenerate region {self:?}")));
        }
        if self.re_max > 0.0 && !self.audit {
            return Err(Error::InvalidArgument(
                "regions reaching into Re λ > 0 must be flagged as audits".into(),
            ));
        }
        if self.distance_to_origin() < self.exclusion_radius * (1.0 - 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "region comes within {} of λ = 0",
                self.exclusion_radius
            )));
        }
        Ok(())
    }

    /// Split into four quadrants; `bias` nudges the cut lines off-centre.
    fn quadrants(&self, bias: f64) -> [Self; 4] {
        let xm = self.re_min + (0.5 + bias) * self.width();
        let ym = self.im_min + (0.5 + bias) * self.height();
        let mk = |a, b, c, d| Self {
            re_min: a,
            re_max: b,
            im_min: c,
            im_max: d,
            ..*self
        };
        [
            mk(self.re_min, xm, self.im_min, ym),
            mk(xm, self.re_max, self.im_min, ym),
            mk(self.re_min, xm, ym, self.im_max),
            mk(xm, self.re_max, ym, self.im_max),
        ]
    }
}

/// The function whose zeros are sought.
fn f(z: Complex64) -> Result<Complex64> {
    reduced_det(Frequency(z))
}

fn diff_step(z: Complex64) -> f64 {
    1e-6 * z.norm().max(1.0)
}

/// `f′(z)` by central differencing.
fn derivative(z: Complex64) -> Result<Complex64> {
    let h = diff_step(z);
    Ok((f(z + h)? - f(z - h)?) / (2.0 * h))
}

/// Sampling cap per edge for the doubling check.
const MAX_EDGE_POINTS: usize = 1 << 12;

/// Phase change of `f` from `a` to `b`, subdividing until every step turns
/// by less than π/4.
fn phase_change(a: Complex64, fa: Complex64, b: Complex64, fb: Complex64, scale: f64, depth: u32) -> Result<f64> {
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    if fm.norm() == 0.0 || !fm.is_finite() {
        return Err(Error::ContourThroughZero { near: m });
    }
    let (d1, d2) = ((fm / fa).arg(), (fb / fm).arg());
    let quarter = std::f64::consts::FRAC_PI_4;
    // |f′/f| bounds the turning rate, which rules out aliased full turns.
    let rate = (derivative(m)? / fm).norm();
    if d1.abs() < quarter
        && d2.abs() < quarter
        && (fb / fa).arg().abs() < 2.0 * quarter
        && rate * (b - a).norm() < quarter
    {
        return Ok(d1 + d2);
    }
    if depth >= 48 || (b - a).norm() < 1e-12 * scale {
        return Err(Error::ContourThroughZero { near: m });
    }
    Ok(phase_change(a, fa, m, fm, scale, depth + 1)? + phase_change(m, fm, b, fb, scale, depth + 1)?)
}

/// Winding number of `f` around the region boundary.
///
/// The boundary is sampled at `m` points per edge and each interval is
/// bisected adaptively until the phase of `f` is resolved, so the sum of
/// phase steps equals `∮ f′/f dλ / i` exactly.
fn winding_value(region: &SearchRegion, m: usize) -> Result<f64> {
    let corners = [
        Complex64::new(region.re_min, region.im_min),
        Complex64::new(region.re_max, region.im_min),
        Complex64::new(region.re_max, region.im_max),
        Complex64::new(region.re_min, region.im_max),
    ];
    let scale = region.width().max(region.height());
    let mut total = 0.0;
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        let step = (b - a) / m as f64;
        let mut z0 = a;
        let mut f0 = f(a)?;
        if f0.norm() == 0.0 {
            return Err(Error::ContourThroughZero { near: a });
        }
        for j in 1..=m {
            let z1 = if j == m { b } else { a + step * j as f64 };
            let f1 = f(z1)?;
            if f1.norm() == 0.0 {
                return Err(Error::ContourThroughZero { near: z1 });
            }
            total += phase_change(z0, f0, z1, f1, scale, 0)?;
            z0 = z1;
            f0 = f1;
        }
    }
    Ok(total / (2.0 * std::f64::consts::PI))
}

/// Number of zeros of `det M_λ` inside `region`, counted with multiplicity.
///
/// `contour_points` is the starting number of samples per edge. The count is
/// accepted once doubling the sampling leaves it unchanged.
pub fn count_zeros(region: &SearchRegion, contour_points: usize) -> Result<usize> {
    region.validate()?;
    let mut m = contour_points.max(8);
    let mut prev = winding_value(region, m)?;
    loop {
        m *= 2;
        let next = winding_value(region, m)?;
        if (next - prev).abs() < 0.25 && (next - next.round()).abs() < 0.25 && next.round() >= 0.0 {
            return Ok(next.round() as usize);
        }
        if m >= MAX_EDGE_POINTS {
            return Err(Error::NonIntegerWinding { value: next });
        }
        prev = next;
    }
}

/// Cut-line offsets tried when a contour runs through a zero.
const BIASES: [f64; 4] = [0.0, 0.0371, -0.0529, 0.0813];

/// Split a box, nudging the cut lines when one of them hits a zero.
fn split_counted(region: &SearchRegion, points: usize) -> Result<Vec<(SearchRegion, usize)>> {
    let mut last_err = None;
    for bias in BIASES {
        let quads = region.quadrants(bias);
        let counts: Result<Vec<usize>> = quads.iter().map(|q| count_zeros(q, points)).collect();
        match counts {
            Ok(c) => return Ok(quads.into_iter().zip(c).collect()),
            Err(e @ Error::ContourThroughZero { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

/// One located eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub lambda: Complex64,
    /// `|−T₊² + e^{−2√λ}T₋²|` at the reported point.
    pub abs_det_residual: f64,
    /// Newton steps taken; 0 when the root came from bisection alone.
    pub newton_iters: usize,
}

/// A box that still encloses several zeros at the minimum width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cluster {
    pub center: Complex64,
    pub width: f64,
    pub count: usize,
}

/// Output of [`find_eigenvalues`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub region: SearchRegion,
    /// Sorted by `(Re, Im)`; a cluster of multiplicity `k` appears `k` times.
    pub eigenvalues: Vec<Eigenvalue>,
    pub clusters: Vec<Cluster>,
    pub boxes_scanned: usize,
    pub winding_total: usize,
}

pub const EIGENVALUE_HEADER: &str = "re,im,abs_det_residual,newton_iters";

impl SpectrumReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(EIGENVALUE_HEADER);
        s.push('\n');
        for e in &self.eigenvalues {
            writeln!(s, "{:?},{:?},{:?},{}", e.lambda.re, e.lambda.im, e.abs_det_residual, e.newton_iters)
                .expect("write to string");
        }
        s
    }

    /// Largest real part among the reported eigenvalues.
    pub fn spectral_abscissa(&self) -> Option<f64> {
        self.eigenvalues.iter().map(|e| e.lambda.re).reduce(f64::max)
    }

    pub fn is_consistent(&self) -> bool {
        self.eigenvalues.len() == self.winding_total
    }
}

/// `|scaled det|` at `z`.
pub fn scaled_residual(z: Complex64) -> Result<f64> {
    Ok(det_m(Frequency(z), DetForm::Scaled)?.value.norm())
}

const NEWTON_MAX_ITERS: usize = 60;

fn newton(start: Complex64, tol: f64) -> Result<(Complex64, usize)> {
    let mut z = start;
    for k in 1..=NEWTON_MAX_ITERS {
        let step = f(z)? / derivative(z)?;
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= tol {
            return Ok((z, k));
        }
    }
    Err(Error::NewtonDivergence { start })
}

/// Bisect a single-zero box down to width `tol`.
fn bisect_single(region: SearchRegion, tol: f64, points: usize) -> Result<Complex64> {
    let mut b = region;
    while b.width().max(b.height()) > tol {
        let next = split_counted(&b, points)?
            .into_iter()
            .find(|(_, c)| *c == 1)
            .map(|(q, _)| q);
        match next {
            Some(q) => b = q,
            None => break,
        }
    }
    Ok(b.center())
}

enum BoxOutcome {
    Leaf(Vec<Eigenvalue>, Vec<Cluster>),
    Split(Vec<(SearchRegion, usize)>),
}

fn process_box(region: SearchRegion, count: usize, tol: f64, points: usize) -> Result<BoxOutcome> {
    let min_width = (tol * 1e3).max(1e-7);
    if count == 1 {
        let polished = newton(region.center(), tol)
            .ok()
            .filter(|(z, _)| region.contains(*z, tol));
        let (z, iters) = match polished {
            Some(p) => p,
            None => {
                let z = bisect_single(region, tol, points)?;
                newton(z, tol)
                    .ok()
                    .filter(|(p, _)| (p - z).norm() <= 4.0 * tol)
                    .unwrap_or((z, 0))
            }
        };
        let ev = Eigenvalue {
            lambda: z,
            abs_det_residual: scaled_residual(z)?,
            newton_iters: iters,
        };
        return Ok(BoxOutcome::Leaf(vec![ev], Vec::new()));
    }
    if region.width().max(region.height()) <= min_width {
        let c = region.center();
        let ev = Eigenvalue {
            lambda: c,
            abs_det_residual: scaled_residual(c)?,
            newton_iters: 0,
        };
        let cl = Cluster {
            center: c,
            width: region.width().max(region.height()),
            count,
        };
        return Ok(BoxOutcome::Leaf(vec![ev; count], vec![cl]));
    }
    let children = split_counted(&region, points)?;
    Ok(BoxOutcome::Split(children.into_iter().filter(|(_, c)| *c > 0).collect()))
}

/// Locate all zeros of `det M_λ` in `region` to tolerance `tol`.
pub fn find_eigenvalues(region: &SearchRegion, tol: f64) -> Result<SpectrumReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let points = 64;
    let total = count_zeros(region, points)?;
    let mut frontier = vec![(*region, total)];
    let mut boxes = 1;
    let mut eigenvalues = Vec::new();
    let mut clusters = Vec::new();
    while !frontier.is_empty() {
        let outcomes: Vec<Result<BoxOutcome>> = frontier
            .par_iter()
            .map(|(r, c)| process_box(*r, *c, tol, points))
            .collect();
        let mut next = Vec::new();
        for o in outcomes {
            match o? {
                BoxOutcome::Leaf(e, c) => {
                    eigenvalues.extend(e);
                    clusters.extend(c);
                }
                BoxOutcome::Split(children) => {
                    boxes += 4;
                    next.extend(children);
                }
            }
        }
        frontier = next;
    }
    eigenvalues.sort_by(|a, b| {
        (a.lambda.re, a.lambda.im)
            .partial_cmp(&(b.lambda.re, b.lambda.im))
            .expect("finite eigenvalues")
    });
    // Simple roots found from neighbouring boxes can coincide.
    let mut deduped: Vec<Eigenvalue> = Vec::with_capacity(eigenvalues.len());
    for e in eigenvalues {
        let is_cluster_member = clusters.iter().any(|c| (c.center - e.lambda).norm() == 0.0);
        if !is_cluster_member && deduped.iter().any(|d| (d.lambda - e.lambda).norm() <= 2.0 * tol) {
            continue;
        }
        deduped.push(e);
    }
    Ok(SpectrumReport {
        region: *region,
        eigenvalues: deduped,
        clusters,
        boxes_scanned: boxes,
        winding_total: total,
    })
}

/// Minimum of `|scaled det(is)|` over `samples` evenly spaced `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clearance {
    pub margin: f64,
    pub argmin: f64,
}

pub const DEFAULT_CLEARANCE_FLOOR: f64 = 1e-6;

/// Sample `|scaled det|` along `i[s_min, s_max]` and require it to stay above `floor`.
pub fn imaginary_axis_clearance(s_min: f64, s_max: f64, samples: usize, floor: f64) -> Result<Clearance> {
    if !(s_min < s_max) || samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "need s_min < s_max and ≥ 2 samples, got [{s_min}, {s_max}] with {samples}"
        )));
    }
    if s_min <= 0.0 && s_max >= 0.0 {
        return Err(Error::InvalidArgument("interval must not contain s = 0".into()));
    }
    let values: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let s = s_min + (s_max - s_min) * k as f64 / (samples - 1) as f64;
            Ok((s, scaled_residual(Complex64::new(0.0, s))?))
        })
        .collect::<Result<_>>()?;
    let (argmin, margin) = values
        .into_iter()
        .fold((f64::NAN, f64::INFINITY), |acc, (s, v)| if v < acc.1 { (s, v) } else { acc });
    if margin < floor {
        return Err(Error::ClearanceViolation { s: argmin, margin, floor });
    }
    Ok(Clearance { margin, argmin })
}
