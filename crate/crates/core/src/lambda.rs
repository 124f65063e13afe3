//! Scalar and 4×4 algebra in the spectral parameter λ.
//!
//! Everything here is a pure function of λ: the branch square root, the
//! half-plane factors `T±(λ) = ½[cosh λ ± √λ sinh λ]`, the coupling matrix
//! `M_λ` that glues the three closed-form pieces together at ξ = 1 and ξ = 2,
//! its determinant in raw, factored and overflow-safe scaled form, and its
//! cofactor matrix (closed forms and signed minors).

use nalgebra::{Matrix3, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest exponent we let a raw `exp` see before calling it an overflow.
pub const EXP_BUDGET: f64 = 700.0;

/// Principal square root with the cut on the negative real axis.
///
/// For `λ = r e^{iθ}` with `θ ∈ (−π, π]` this returns `r^{1/2} e^{iθ/2}`, so the
/// real part is never negative and points on the negative real axis map to
/// the positive imaginary axis regardless of the sign of a zero imaginary part.
pub fn sqrt_branch(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return if z.re >= 0.0 {
            Complex64::new(z.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-z.re).sqrt())
        };
    }
    let modulus = z.re.hypot(z.im);
    let t = ((modulus + z.re.abs()) * 0.5).sqrt();
    if z.re >= 0.0 {
        Complex64::new(t, z.im / (2.0 * t))
    } else {
        Complex64::new(z.im.abs() / (2.0 * t), t.copysign(z.im))
    }
}

/// Spectral parameter λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequency(pub Complex64);

impl Frequency {
    pub fn new(re: f64, im: f64) -> Self {
        Self(Complex64::new(re, im))
    }

    /// `λ = is` on the imaginary axis.
    pub fn imaginary(s: f64) -> Self {
        Self(Complex64::new(0.0, s))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn sqrt(self) -> Complex64 {
        sqrt_branch(self.0)
    }

    pub fn norm(self) -> f64 {
        self.0.norm()
    }

    pub fn is_zero(self) -> bool {
        self.0.re == 0.0 && self.0.im == 0.0
    }

    pub fn conj(self) -> Self {
        Self(self.0.conj())
    }
}

impl From<Complex64> for Frequency {
    fn from(z: Complex64) -> Self {
        Self(z)
    }
}

/// `T₊(λ)` and `T₋(λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlaneFactors {
    pub t_plus: Complex64,
    pub t_minus: Complex64,
}

/// `T± = ½[cosh λ ± √λ sinh λ]`. Callers keep `|Re λ| ≤ 50`.
pub fn t_factors(lambda: Frequency) -> HalfPlaneFactors {
    let l = lambda.0;
    let r = lambda.sqrt();
    let (c, s) = (l.cosh(), l.sinh());
    HalfPlaneFactors {
        t_plus: 0.5 * (c + r * s),
        t_minus: 0.5 * (c - r * s),
    }
}

/// Which closed form of `det M_λ` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetForm {
    /// `−λ²[2√λ cosh√λ cosh λ sinh λ + sinh√λ (λ sinh²λ + cosh²λ)]`
    Raw,
    /// `2λ²[−e^{√λ}T₊² + e^{−√λ}T₋²]`
    Factored,
    /// `−T₊² + e^{−2√λ}T₋²`, i.e. the determinant divided by `2λ²e^{√λ}`.
    Scaled,
}

/// A determinant value together with the factor that was divided out of it.
///
/// For [`DetForm::Scaled`] the true determinant is `value · 2λ² e^{√λ}`; the
/// real part of the exponent is kept in `scale_exponent` so that callers can
/// compare magnitudes without ever forming `e^{√λ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetM {
    pub lambda: Frequency,
    pub form: DetForm,
    pub value: Complex64,
    pub scale_exponent: f64,
}

impl DetM {
    /// Undo the scaling. Fails when the scaled-out factor does not fit in f64.
    pub fn rescaled(&self) -> Result<Complex64> {
        match self.form {
            DetForm::Raw | DetForm::Factored => Ok(self.value),
            DetForm::Scaled => {
                let l = self.lambda.0;
                let r = self.lambda.sqrt();
                if r.re.abs() + 2.0 * l.norm().max(1.0).ln() > EXP_BUDGET {
                    return Err(Error::Overflow { lambda: l });
                }
                Ok(self.value * 2.0 * l * l * r.exp())
            }
        }
    }
}

fn exp_load(lambda: Frequency) -> f64 {
    let l = lambda.0;
    lambda.sqrt().re.abs() + 2.0 * l.re.abs() + 2.5 * l.norm().max(1.0).ln()
}

fn check_budget(lambda: Frequency) -> Result<()> {
    if exp_load(lambda) > EXP_BUDGET {
        Err(Error::Overflow { lambda: lambda.0 })
    } else {
        Ok(())
    }
}

/// `det M_λ` in the requested form.
pub fn det_m(lambda: Frequency, form: DetForm) -> Result<DetM> {
    let l = lambda.0;
    let r = lambda.sqrt();
    let value = match form {
        DetForm::Raw => {
            check_budget(lambda)?;
            let (c, s) = (l.cosh(), l.sinh());
            -l * l * (2.0 * r * r.cosh() * c * s + r.sinh() * (l * s * s + c * c))
        }
        DetForm::Factored => {
            check_budget(lambda)?;
            let t = t_factors(lambda);
            2.0 * l * l * (-r.exp() * t.t_plus * t.t_plus + (-r).exp() * t.t_minus * t.t_minus)
        }
        DetForm::Scaled => {
            if lambda.is_zero() {
                return Err(Error::ZeroFrequency);
            }
            if 2.0 * l.re.abs() > EXP_BUDGET {
                return Err(Error::Overflow { lambda: l });
            }
            let t = t_factors(lambda);
            -t.t_plus * t.t_plus + (-2.0 * r).exp() * t.t_minus * t.t_minus
        }
    };
    let scale_exponent = match form {
        DetForm::Scaled => r.re,
        _ => 0.0,
    };
    Ok(DetM {
        lambda,
        form,
        value,
        scale_exponent,
    })
}

/// Branch-free reduced determinant `det M_λ / √λ`.
///
/// `det M_λ` is odd in `√λ` and therefore flips sign across the negative real
/// axis; dividing by `√λ` leaves an entire function of λ with the same zeros
/// off the origin. Contour integrals are taken of this function.
pub fn reduced_det(lambda: Frequency) -> Result<Complex64> {
    check_budget(lambda)?;
    let l = lambda.0;
    let r = lambda.sqrt();
    let (c, s) = (l.cosh(), l.sinh());
    let sinhc = if r.norm() < 1e-4 {
        // sinh(z)/z series
        let z2 = r * r;
        1.0 + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        r.sinh() / r
    };
    Ok(-l * l * (2.0 * r.cosh() * c * s + sinhc * (l * s * s + c * c)))
}

/// The coupling matrix `M_λ`.
pub fn build_m(lambda: Frequency) -> Result<Matrix4<Complex64>> {
    check_budget(lambda)?;
    let l = lambda.0;
    let r = lambda.sqrt();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let (c, s) = (l.cosh(), l.sinh());
    let (cr, sr) = (r.cosh(), r.sinh());
    Ok(Matrix4::new(
        l * s, -one, zero, zero, //
        l * c, zero, -r, zero, //
        zero, -cr, -sr, l * s, //
        zero, r * sr, r * cr, l * c,
    ))
}

/// Where cofactor entries come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CofactorSource {
    /// Closed forms in terms of `e^{±√λ}T±`, with the (3,4) entry corrected.
    ClosedForm,
    /// Closed forms with the (3,4) entry misread as a product (a known-bad table).
    Misprinted,
    /// Signed 3×3 minors of `M_λ`.
    Numeric,
}

/// The cofactor matrix `C`, so that `Cᵀ M_λ = det M_λ · I`.
pub fn cofactors(lambda: Frequency, source: CofactorSource) -> Result<Matrix4<Complex64>> {
    if lambda.is_zero() {
        return Err(Error::ZeroFrequency);
    }
    match source {
        CofactorSource::Numeric => Ok(numeric_cofactors(&build_m(lambda)?)),
        CofactorSource::ClosedForm => closed_form_cofactors(lambda, false),
        CofactorSource::Misprinted => closed_form_cofactors(lambda, true),
    }
}

pub(crate) fn numeric_cofactors(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| {
        let minor = Matrix3::from_fn(|a, b| {
            let r = if a < i { a } else { a + 1 };
            let c = if b < j { b } else { b + 1 };
            m[(r, c)]
        });
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        sign * minor.determinant()
    })
}

fn closed_form_cofactors(lambda: Frequency, literal_c34: bool) -> Result<Matrix4<Complex64>> {
    check_budget(lambda)?;
    let l = lambda.0;
    let r = lambda.sqrt();
    let t = t_factors(lambda);
    let ep = r.exp() * t.t_plus;
    let em = (-r).exp() * t.t_minus;
    let p = ep + em;
    let q = ep - em;
    let (ch, sh) = (l.cosh(), l.sinh());
    let l32 = l * r;
    let l2 = l * l;
    let l52 = l2 * r;
    let c34 = if literal_c34 { -l32 * (ep * em) } else { -l32 * p };
    Ok(Matrix4::new(
        -l32 * p,
        l2 * ch * q,
        -l2 * ch * p,
        l32 * ch,
        -l * q,
        -l2 * sh * q,
        l2 * sh * p,
        -l32 * sh,
        l32 * ch,
        l52 * sh * ch,
        l2 * ch * ch,
        c34,
        -l32 * sh,
        -l52 * sh * sh,
        -l2 * ch * sh,
        -l * q,
    ))
}

/// Entrywise agreement report between two cofactor sources.
#[derive(Debug, Clone, PartialEq)]
pub struct CofactorComparison {
    pub max_rel_err: f64,
    pub worst_entry: (usize, usize),
}

/// Compare closed-form cofactors against signed minors, 1-based worst entry.
pub fn compare_cofactors(lambda: Frequency, source: CofactorSource) -> Result<CofactorComparison> {
    let closed = cofactors(lambda, source)?;
    let minors = cofactors(lambda, CofactorSource::Numeric)?;
    let mut worst = (0.0, (1, 1));
    for i in 0..4 {
        for j in 0..4 {
            let scale = minors[(i, j)].norm().max(closed[(i, j)].norm()).max(f64::MIN_POSITIVE);
            let rel = (closed[(i, j)] - minors[(i, j)]).norm() / scale;
            if rel > worst.0 {
                worst = (rel, (i + 1, j + 1));
            }
        }
    }
    Ok(CofactorComparison {
        max_rel_err: worst.0,
        worst_entry: worst.1,
    })
}

/// Fail with the offending entry when two cofactor sources disagree.
pub fn check_cofactors(lambda: Frequency, source: CofactorSource, tol: f64) -> Result<()> {
    let cmp = compare_cofactors(lambda, source)?;
    if cmp.max_rel_err > tol {
        return Err(Error::CofactorMismatch {
            row: cmp.worst_entry.0,
            col: cmp.worst_entry.1,
            rel_err: cmp.max_rel_err,
        });
    }
    Ok(())
}

/// Worst entrywise residual of `Cᵀ M − det · I`.
///
/// Each entry is measured against `Σ_k |C_ki||M_kj|` (plus `|det|` on the
/// diagonal), i.e. relative to the size of the terms that cancel in it.
/// Returns `(relative residual, 1-based (row, col))`.
pub fn adjugate_residual(
    m: &Matrix4<Complex64>,
    c: &Matrix4<Complex64>,
    det: Complex64,
) -> (f64, (usize, usize)) {
    let prod = c.transpose() * m;
    let mut worst = (0.0, (1, 1));
    for i in 0..4 {
        for j in 0..4 {
            let target = if i == j { det } else { Complex64::new(0.0, 0.0) };
            let mut scale: f64 = (0..4).map(|k| c[(k, i)].norm() * m[(k, j)].norm()).sum();
            if i == j {
                scale += det.norm();
            }
            let rel = (prod[(i, j)] - target).norm() / scale.max(f64::MIN_POSITIVE);
            if rel > worst.0 {
                worst = (rel, (i + 1, j + 1));
            }
        }
    }
    worst
}

/// `M_λ` bundled with its determinant and cofactors.
#[derive(Debug, Clone)]
pub struct CouplingSystem {
    pub lambda: Frequency,
    pub m: Matrix4<Complex64>,
    pub det: DetM,
    pub cofactors: Matrix4<Complex64>,
}

impl CouplingSystem {
    pub fn new(lambda: Frequency, source: CofactorSource) -> Result<Self> {
        Ok(Self {
            lambda,
            m: build_m(lambda)?,
            det: det_m(lambda, DetForm::Raw)?,
            cofactors: cofactors(lambda, source)?,
        })
    }

    /// `(a, b, c, ã) = Cᵀ b / det M_λ`.
    pub fn cramer_solve(&self, rhs: &Vector4<Complex64>) -> Vector4<Complex64> {
        self.cofactors.transpose() * rhs / self.det.value
    }

    pub fn adjugate_residual(&self) -> (f64, (usize, usize)) {
        adjugate_residual(&self.m, &self.cofactors, self.det.value)
    }
}
