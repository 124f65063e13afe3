//! Closed-form solution of `(λ − A)x = y`.
//!
//! On each piece the boundary value problem is solved by variation of
//! parameters:
//!
//! * `u(ξ) = a sinh(λξ) − U_λ(ξ)` on `[0,1]`,
//! * `w(ξ) = b cosh(√λ(ξ−1)) + c sinh(√λ(ξ−1)) − W_λ(ξ)` on `[1,2]`,
//! * `ũ(ξ) = ã sinh(λ(3−ξ)) − Ũ_λ(ξ)` on `[2,3]`, where `Ũ_λ` is the mirror
//!   image of `U_λ`,
//!
//! with `v = λu − f`, `ṽ = λũ − f̃`, and the four coefficients fixed by the
//! transmission conditions at ξ = 1 and ξ = 2, i.e. `M_λ (a,b,c,ã)ᵀ = b`.
//!
//! For `Re √λ` of even moderate size the heat coefficients `b, c` cancel
//! against `W_λ` to many digits, so the default solve works with the
//! equivalent decaying-exponential form
//! `w = β e^{−√λ(ξ−1)} + γ e^{−√λ(2−ξ)} + P(ξ)`, where
//! `P(ξ) = (2√λ)⁻¹ ∫₁² e^{−√λ|ξ−r|} h(r) dr` is bounded for every λ.
//! The `(a, b, c, ã)` of the textbook form are reported alongside.

use std::sync::Arc;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lambda::{CofactorSource, CouplingSystem, Frequency};
use crate::quadrature::QuadratureRule;

type Fun = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// One data component: an evaluator plus an optional derivative.
#[derive(Clone)]
pub struct DataFn {
    value: Option<Fun>,
    derivative: Option<Fun>,
}

impl std::fmt::Debug for DataFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DataFn")
            .field("zero", &self.value.is_none())
            .field("has_derivative", &self.derivative.is_some())
            .finish()
    }
}

impl DataFn {
    pub fn zero() -> Self {
        Self {
            value: None,
            derivative: None,
        }
    }

    pub fn new(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self {
            value: Some(Arc::new(f)),
            derivative: None,
        }
    }

    pub fn real(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(move |x| Complex64::new(f(x), 0.0))
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn with_real_derivative(self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.with_derivative(move |x| Complex64::new(d(x), 0.0))
    }

    /// Natural cubic spline through `(xs[i], ys[i])`; `xs` strictly increasing.
    pub fn from_samples(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let spline = CubicSpline::new(xs, ys)?;
        let s = Arc::new(spline);
        let d = Arc::clone(&s);
        Ok(Self::real(move |x| s.eval(x)).with_real_derivative(move |x| d.derivative(x)))
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_none()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match &self.value {
            Some(f) => f(x),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Derivative, falling back to a centred difference when none was given.
    pub fn eval_derivative(&self, x: f64) -> Complex64 {
        match (&self.derivative, &self.value) {
            (Some(d), _) => d(x),
            (None, None) => Complex64::new(0.0, 0.0),
            (None, Some(f)) => {
                let h = 1e-5;
                (f(x + h) - f(x - h)) / (2.0 * h)
            }
        }
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        match (&self.value, &self.derivative) {
            (None, _) => Self::zero(),
            (Some(f), d) => {
                let f = Arc::clone(f);
                let mut out = Self::new(move |x| k * f(x));
                if let Some(d) = d {
                    let d = Arc::clone(d);
                    out = out.with_derivative(move |x| k * d(x));
                }
                out
            }
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        match (&self.value, &other.value) {
            (None, _) => other.clone(),
            (_, None) => self.clone(),
            (Some(f), Some(g)) => {
                let (f, g) = (Arc::clone(f), Arc::clone(g));
                let (a, b) = (self.clone(), other.clone());
                Self::new(move |x| f(x) + g(x))
                    .with_derivative(move |x| a.eval_derivative(x) + b.eval_derivative(x))
            }
        }
    }
}

#[derive(Debug)]
struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n || xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "spline needs ≥ 2 strictly increasing abscissae".into(),
            ));
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior second-derivative system
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            let mut sup = vec![0.0; k];
            for i in 0..k {
                let h0 = xs[i + 1] - xs[i];
                let h1 = xs[i + 2] - xs[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                sup[i] = h1;
                rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
            }
            for i in 1..k {
                let h = xs[i + 1] - xs[i];
                let w = h / diag[i - 1];
                diag[i] -= w * sup[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - sup[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(Self { xs, ys, m })
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.clamp(1, self.xs.len() - 1) - 1,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    fn derivative(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        (self.ys[i + 1] - self.ys[i]) / h
            + ((1.0 - 3.0 * a * a) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0
    }
}

/// Right-hand side `y = (f, g, h, f̃, g̃)` of `(λ − A)x = y`.
#[derive(Debug, Clone)]
pub struct DataQuintuple {
    /// on `[0,1]`, with `f(0) = 0`
    pub f: DataFn,
    /// on `[0,1]`
    pub g: DataFn,
    /// on `[1,2]`
    pub h: DataFn,
    /// on `[2,3]`, with `f̃(3) = 0`
    pub ft: DataFn,
    /// on `[2,3]`
    pub gt: DataFn,
}

impl Default for DataQuintuple {
    fn default() -> Self {
        Self::zero()
    }
}

impl DataQuintuple {
    pub fn zero() -> Self {
        Self {
            f: DataFn::zero(),
            g: DataFn::zero(),
            h: DataFn::zero(),
            ft: DataFn::zero(),
            gt: DataFn::zero(),
        }
    }

    /// Check the state-space constraints `f(0) = 0`, `f̃(3) = 0`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let mut violations = Vec::new();
        let f0 = self.f.eval(0.0).norm();
        if f0 > tol {
            violations.push(format!("f(0) = {f0:.3e} ≠ 0"));
        }
        let f3 = self.ft.eval(3.0).norm();
        if f3 > tol {
            violations.push(format!("f̃(3) = {f3:.3e} ≠ 0"));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::ProfileViolatesDomain { violations })
        }
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        Self {
            f: self.f.scaled(k),
            g: self.g.scaled(k),
            h: self.h.scaled(k),
            ft: self.ft.scaled(k),
            gt: self.gt.scaled(k),
        }
    }

    pub fn plus(&self, o: &Self) -> Self {
        Self {
            f: self.f.plus(&o.f),
            g: self.g.plus(&o.g),
            h: self.h.plus(&o.h),
            ft: self.ft.plus(&o.ft),
            gt: self.gt.plus(&o.gt),
        }
    }

    /// Data reflected through ξ = 3/2: `f̃(r) = f(3−r)`, `g̃(r) = g(3−r)`,
    /// `h(r) ↦ h(3−r)`, and vice versa.
    pub fn mirrored(&self) -> Self {
        fn mirror(d: &DataFn) -> DataFn {
            if d.is_zero() {
                return DataFn::zero();
            }
            let (a, b) = (d.clone(), d.clone());
            DataFn::new(move |x| a.eval(3.0 - x)).with_derivative(move |x| -b.eval_derivative(3.0 - x))
        }
        Self {
            f: mirror(&self.ft),
            g: mirror(&self.gt),
            h: mirror(&self.h),
            ft: mirror(&self.f),
            gt: mirror(&self.g),
        }
    }

    /// `‖f′‖² + ‖g‖² + ‖h‖² + ‖f̃′‖² + ‖g̃‖²` by quadrature.
    pub fn energy_norm_sq(&self) -> f64 {
        let rule = QuadratureRule::new(64, 8);
        let sq = |d: &DataFn, a: f64, b: f64, deriv: bool| -> f64 {
            if d.is_zero() {
                return 0.0;
            }
            rule.integrate(a, b, |x| {
                let v = if deriv { d.eval_derivative(x) } else { d.eval(x) };
                v.norm_sqr()
            })
        };
        sq(&self.f, 0.0, 1.0, true)
            + sq(&self.g, 0.0, 1.0, false)
            + sq(&self.h, 1.0, 2.0, false)
            + sq(&self.ft, 2.0, 3.0, true)
            + sq(&self.gt, 2.0, 3.0, false)
    }
}

fn require_nonzero(lambda: Frequency) -> Result<()> {
    if lambda.is_zero() {
        Err(Error::ZeroFrequency)
    } else {
        Ok(())
    }
}

fn check_interval(xi: f64, a: f64, b: f64) -> Result<()> {
    if !(a..=b).contains(&xi) {
        return Err(Error::InvalidArgument(format!("ξ = {xi} outside [{a}, {b}]")));
    }
    Ok(())
}

/// `(U_λ(ξ), U′_λ(ξ))` for `ξ ∈ [0,1]`.
pub fn quad_u(
    lambda: Frequency,
    f: &DataFn,
    g: &DataFn,
    xi: f64,
    rule: &QuadratureRule,
) -> Result<(Complex64, Complex64)> {
    require_nonzero(lambda)?;
    check_interval(xi, 0.0, 1.0)?;
    rule.check(lambda.norm())?;
    let l = lambda.0;
    if f.is_zero() && g.is_zero() {
        return Ok(Default::default());
    }
    let pair: [Complex64; 2] = integrate_pair(rule, 0.0, xi, |r| {
        let src = l * f.eval(r) + g.eval(r);
        let z = l * (xi - r);
        [z.sinh() * src, z.cosh() * src]
    });
    Ok((pair[0] / l, pair[1]))
}

/// `(W_λ(ξ), W′_λ(ξ))` for `ξ ∈ [1,2]`, exactly as defined (no rescaling).
pub fn quad_w(
    lambda: Frequency,
    h: &DataFn,
    xi: f64,
    rule: &QuadratureRule,
) -> Result<(Complex64, Complex64)> {
    require_nonzero(lambda)?;
    check_interval(xi, 1.0, 2.0)?;
    let r = lambda.sqrt();
    rule.check(r.norm())?;
    if h.is_zero() {
        return Ok(Default::default());
    }
    let pair = integrate_pair(rule, 1.0, xi, |s| {
        let z = r * (xi - s);
        let hv = h.eval(s);
        [z.sinh() * hv, z.cosh() * hv]
    });
    Ok((pair[0] / r, pair[1]))
}

/// `(Ũ_λ(ξ), Ũ′_λ(ξ))` for `ξ ∈ [2,3]`.
pub fn quad_ut(
    lambda: Frequency,
    ft: &DataFn,
    gt: &DataFn,
    xi: f64,
    rule: &QuadratureRule,
) -> Result<(Complex64, Complex64)> {
    require_nonzero(lambda)?;
    check_interval(xi, 2.0, 3.0)?;
    rule.check(lambda.norm())?;
    let l = lambda.0;
    if ft.is_zero() && gt.is_zero() {
        return Ok(Default::default());
    }
    let pair = integrate_pair(rule, xi, 3.0, |r| {
        let src = l * ft.eval(r) + gt.eval(r);
        let z = l * (r - xi);
        [z.sinh() * src, z.cosh() * src]
    });
    Ok((pair[0] / l, -pair[1]))
}

/// Bounded heat particular solution `(P(ξ), P′(ξ))`, `ξ ∈ [1,2]`.
pub fn quad_heat_green(
    lambda: Frequency,
    h: &DataFn,
    xi: f64,
    rule: &QuadratureRule,
) -> Result<(Complex64, Complex64)> {
    require_nonzero(lambda)?;
    check_interval(xi, 1.0, 2.0)?;
    let r = lambda.sqrt();
    rule.check(r.norm())?;
    if h.is_zero() {
        return Ok(Default::default());
    }
    let left = integrate_c(rule, 1.0, xi, |s| (-r * (xi - s)).exp() * h.eval(s));
    let right = integrate_c(rule, xi, 2.0, |s| (-r * (s - xi)).exp() * h.eval(s));
    Ok(((left + right) / (2.0 * r), 0.5 * (right - left)))
}

/// `K e^{−√λ} = (2√λ)⁻¹ ∫₁² e^{√λ(1−r)} h(r) dr`, the link between the two
/// heat parameterisations.
fn heat_link(lambda: Frequency, h: &DataFn, rule: &QuadratureRule) -> Complex64 {
    if h.is_zero() {
        return Complex64::new(0.0, 0.0);
    }
    let r = lambda.sqrt();
    integrate_c(rule, 1.0, 2.0, |s| (r * (1.0 - s)).exp() * h.eval(s)) / (2.0 * r)
}

fn integrate_c(rule: &QuadratureRule, a: f64, b: f64, f: impl FnMut(f64) -> Complex64) -> Complex64 {
    rule.integrate(a, b, f)
}

#[derive(Clone, Copy, Default)]
struct Pair([Complex64; 2]);

impl std::ops::Add for Pair {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Pair([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl std::ops::Mul<f64> for Pair {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Pair([self.0[0] * k, self.0[1] * k])
    }
}

fn integrate_pair(
    rule: &QuadratureRule,
    a: f64,
    b: f64,
    mut f: impl FnMut(f64) -> [Complex64; 2],
) -> [Complex64; 2] {
    rule.integrate(a, b, |x| Pair(f(x))).0
}

/// The vector `b` of the coupling system.
pub fn rhs_vector(lambda: Frequency, y: &DataQuintuple, rule: &QuadratureRule) -> Result<Vector4<Complex64>> {
    let l = lambda.0;
    let (u1, du1) = quad_u(lambda, &y.f, &y.g, 1.0, rule)?;
    let (ut2, dut2) = quad_ut(lambda, &y.ft, &y.gt, 2.0, rule)?;
    let (w2, dw2) = quad_w(lambda, &y.h, 2.0, rule)?;
    Ok(Vector4::new(
        l * u1 + y.f.eval(1.0),
        du1,
        l * ut2 + y.ft.eval(2.0) - w2,
        -dut2 + dw2,
    ))
}

/// How the four coefficients are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoefficientPath {
    /// LU on the equilibrated, overflow-free system (default).
    #[default]
    ScaledLu,
    /// `(det M_λ)⁻¹ Cᵀ b` with the closed-form cofactors.
    Cramer,
}

/// Relative conditioning below which the coupling is declared singular.
pub const SINGULAR_RCOND: f64 = 1e-5;

/// Solution of `(λ − A)x = y` in closed form.
#[derive(Debug, Clone)]
pub struct ClosedFormState {
    pub lambda: Frequency,
    pub coeff_a: Complex64,
    pub coeff_b: Complex64,
    pub coeff_c: Complex64,
    pub coeff_atilde: Complex64,
    /// `β`: weight of `e^{−√λ(ξ−1)}` in w
    pub heat_left: Complex64,
    /// `γ`: weight of `e^{−√λ(2−ξ)}` in w
    pub heat_right: Complex64,
    pub data: DataQuintuple,
    pub rule: QuadratureRule,
}

/// Values of the five components (and the spatial derivatives of u, w, ũ)
/// at one point; components are zero off their native interval.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PointValue {
    pub u: Complex64,
    pub du: Complex64,
    pub v: Complex64,
    pub w: Complex64,
    pub dw: Complex64,
    pub ut: Complex64,
    pub dut: Complex64,
    pub vt: Complex64,
}

/// Solve `(λ − A)x = y`.
pub fn solve_resolvent(
    lambda: Frequency,
    y: &DataQuintuple,
    rule: &QuadratureRule,
    path: CoefficientPath,
) -> Result<ClosedFormState> {
    require_nonzero(lambda)?;
    rule.check(lambda.norm())?;
    let l = lambda.0;
    let r = lambda.sqrt();
    let e = (-r).exp();
    let link = heat_link(lambda, &y.h, rule);

    let (a, beta, gamma, at) = match path {
        CoefficientPath::ScaledLu => {
            let (u1, du1) = quad_u(lambda, &y.f, &y.g, 1.0, rule)?;
            let (ut2, dut2) = quad_ut(lambda, &y.ft, &y.gt, 2.0, rule)?;
            let (p1, dp1) = quad_heat_green(lambda, &y.h, 1.0, rule)?;
            let (p2, dp2) = quad_heat_green(lambda, &y.h, 2.0, rule)?;
            let n = scaled_coupling(lambda);
            let rhs = Vector4::new(
                l * u1 + y.f.eval(1.0) + p1,
                du1 + dp1,
                l * ut2 + y.ft.eval(2.0) + p2,
                dut2 + dp2,
            );
            let sol = equilibrated_solve(lambda, n, rhs)?;
            (sol[0], sol[1], sol[2], sol[3])
        }
        CoefficientPath::Cramer => {
            let sys = CouplingSystem::new(lambda, CofactorSource::ClosedForm)?;
            let (_, _, rcond, _) = equilibrate(scaled_coupling(lambda), Vector4::zeros());
            if !(rcond >= SINGULAR_RCOND) {
                return Err(Error::SingularCoupling { lambda: l, rcond });
            }
            let b = rhs_vector(lambda, y, rule)?;
            let x = sys.cramer_solve(&b);
            let (b_, c_) = (x[1], x[2]);
            let gamma = (0.5 * (b_ + c_) - link) * r.exp();
            (x[0], 0.5 * (b_ - c_), gamma, x[3])
        }
    };
    Ok(ClosedFormState {
        lambda,
        coeff_a: a,
        coeff_b: beta + gamma * e + link,
        coeff_c: gamma * e + link - beta,
        coeff_atilde: at,
        heat_left: beta,
        heat_right: gamma,
        data: y.clone(),
        rule: rule.clone(),
    })
}

/// Interface conditions in the unknowns `(a, β, γ, ã)`, with the right heat
/// mode written against `e^{-√λ}` so no entry grows with `Re √λ`.
fn scaled_coupling(lambda: Frequency) -> Matrix4<Complex64> {
    let l = lambda.0;
    let r = lambda.sqrt();
    let e = (-r).exp();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let (sh, ch) = (l.sinh(), l.cosh());
    Matrix4::new(
        l * sh, -one, -e, zero, //
        l * ch, r, -r * e, zero, //
        zero, -e, -one, l * sh, //
        zero, r * e, -r, -l * ch,
    )
}

/// Row then column equilibration; returns the column scales and the
/// reciprocal condition number of the result.
fn equilibrate(
    mut n: Matrix4<Complex64>,
    mut rhs: Vector4<Complex64>,
) -> (Matrix4<Complex64>, Vector4<Complex64>, f64, [f64; 4]) {
    for i in 0..4 {
        let s = (0..4).map(|j| n[(i, j)].norm()).fold(0.0, f64::max);
        if s > 0.0 {
            for j in 0..4 {
                n[(i, j)] /= s;
            }
            rhs[i] /= s;
        }
    }
    let mut col_scale = [1.0; 4];
    for (j, cs) in col_scale.iter_mut().enumerate() {
        let s = (0..4).map(|i| n[(i, j)].norm()).fold(0.0, f64::max);
        if s > 0.0 {
            *cs = s;
            for i in 0..4 {
                n[(i, j)] /= s;
            }
        }
    }
    let sv = n.singular_values();
    (n, rhs, sv.min() / sv.max(), col_scale)
}

fn equilibrated_solve(lambda: Frequency, n: Matrix4<Complex64>, rhs: Vector4<Complex64>) -> Result<Vector4<Complex64>> {
    let (n, rhs, rcond, col_scale) = equilibrate(n, rhs);
    if !(rcond >= SINGULAR_RCOND) {
        return Err(Error::SingularCoupling {
            lambda: lambda.0,
            rcond,
        });
    }
    let mut x = n.lu().solve(&rhs).ok_or(Error::SingularCoupling {
        lambda: lambda.0,
        rcond: 0.0,
    })?;
    for j in 0..4 {
        x[j] /= col_scale[j];
    }
    Ok(x)
}

impl ClosedFormState {
    /// `(u, v, w, ũ, ṽ)` at ξ, zero-extended off the native subintervals.
    pub fn evaluate_state(&self, xi: f64) -> Result<PointValue> {
        check_interval(xi, 0.0, 3.0)?;
        let l = self.lambda.0;
        let r = self.lambda.sqrt();
        let y = &self.data;
        let mut out = PointValue::default();
        if xi <= 1.0 {
            let (uu, du) = quad_u(self.lambda, &y.f, &y.g, xi, &self.rule)?;
            out.u = self.coeff_a * (l * xi).sinh() - uu;
            out.du = l * self.coeff_a * (l * xi).cosh() - du;
            out.v = l * out.u - y.f.eval(xi);
        }
        if (1.0..=2.0).contains(&xi) {
            let (p, dp) = quad_heat_green(self.lambda, &y.h, xi, &self.rule)?;
            let el = (-r * (xi - 1.0)).exp();
            let er = (-r * (2.0 - xi)).exp();
            out.w = self.heat_left * el + self.heat_right * er + p;
            out.dw = -r * self.heat_left * el + r * self.heat_right * er + dp;
        }
        if xi >= 2.0 {
            let (uu, du) = quad_ut(self.lambda, &y.ft, &y.gt, xi, &self.rule)?;
            out.ut = self.coeff_atilde * (l * (3.0 - xi)).sinh() - uu;
            out.dut = -l * self.coeff_atilde * (l * (3.0 - xi)).cosh() - du;
            out.vt = l * out.ut - y.ft.eval(xi);
        }
        Ok(out)
    }

    /// `w` through the textbook coefficients, `b cosh + c sinh − W_λ`.
    /// Only well conditioned for moderate `|√λ|`.
    pub fn w_from_textbook_coefficients(&self, xi: f64) -> Result<Complex64> {
        let r = self.lambda.sqrt();
        let (w, _) = quad_w(self.lambda, &self.data.h, xi, &self.rule)?;
        let z = r * (xi - 1.0);
        Ok(self.coeff_b * z.cosh() + self.coeff_c * z.sinh() - w)
    }

    /// Sample all components on the uniform grid with `n_per_unit` cells per
    /// unit length, using running-integral recurrences (O(n) quadrature work).
    pub fn sample(&self, n_per_unit: usize) -> SampledState {
        let n = n_per_unit;
        let dx = 1.0 / n as f64;
        let l = self.lambda.0;
        let r = self.lambda.sqrt();
        let y = &self.data;
        let rule = &self.rule;
        let zero = Complex64::new(0.0, 0.0);

        let mut out = SampledState {
            n_per_unit: n,
            u: vec![zero; n + 1],
            du: vec![zero; n + 1],
            v: vec![zero; n + 1],
            w: vec![zero; n + 1],
            dw: vec![zero; n + 1],
            ut: vec![zero; n + 1],
            dut: vec![zero; n + 1],
            vt: vec![zero; n + 1],
        };

        // wave on [0,1]: S = ∫₀^ξ e^{λ(ξ−r)}F, T = ∫₀^ξ e^{−λ(ξ−r)}F
        let (ep, em) = ((l * dx).exp(), (-l * dx).exp());
        let (mut s, mut t) = (zero, zero);
        let src = |x: f64| l * y.f.eval(x) + y.g.eval(x);
        for i in 0..=n {
            let xi = i as f64 * dx;
            if i > 0 {
                let a = xi - dx;
                let cell = integrate_pair(rule, a, xi, |q| {
                    let fq = src(q);
                    [(l * (xi - q)).exp() * fq, (-l * (xi - q)).exp() * fq]
                });
                s = ep * s + cell[0];
                t = em * t + cell[1];
            }
            let uu = (s - t) / (2.0 * l);
            let du = 0.5 * (s + t);
            out.u[i] = self.coeff_a * (l * xi).sinh() - uu;
            out.du[i] = l * self.coeff_a * (l * xi).cosh() - du;
            out.v[i] = l * out.u[i] - y.f.eval(xi);
        }

        // heat on [1,2]: running left/right Green integrals
        let decay = (-r * dx).exp();
        let mut left = vec![zero; n + 1];
        let mut right = vec![zero; n + 1];
        if !y.h.is_zero() {
            for i in 1..=n {
                let xi = 1.0 + i as f64 * dx;
                let cell = integrate_c(rule, xi - dx, xi, |q| (-r * (xi - q)).exp() * y.h.eval(q));
                left[i] = decay * left[i - 1] + cell;
            }
            for i in (0..n).rev() {
                let xi = 1.0 + i as f64 * dx;
                let cell = integrate_c(rule, xi, xi + dx, |q| (-r * (q - xi)).exp() * y.h.eval(q));
                right[i] = decay * right[i + 1] + cell;
            }
        }
        for i in 0..=n {
            let xi = 1.0 + i as f64 * dx;
            let el = (-r * (xi - 1.0)).exp();
            let er = (-r * (2.0 - xi)).exp();
            out.w[i] = self.heat_left * el + self.heat_right * er + (left[i] + right[i]) / (2.0 * r);
            out.dw[i] = -r * self.heat_left * el + r * self.heat_right * er + 0.5 * (right[i] - left[i]);
        }

        // wave on [2,3]: backward recurrences from ξ = 3
        let srct = |x: f64| l * y.ft.eval(x) + y.gt.eval(x);
        let (mut s, mut t) = (zero, zero);
        for i in (0..=n).rev() {
            let xi = 2.0 + i as f64 * dx;
            if i < n {
                let b = xi + dx;
                let cell = integrate_pair(rule, xi, b, |q| {
                    let fq = srct(q);
                    [(l * (q - xi)).exp() * fq, (-l * (q - xi)).exp() * fq]
                });
                s = ep * s + cell[0];
                t = em * t + cell[1];
            }
            let uu = (s - t) / (2.0 * l);
            let du = -0.5 * (s + t);
            out.ut[i] = self.coeff_atilde * (l * (3.0 - xi)).sinh() - uu;
            out.dut[i] = -l * self.coeff_atilde * (l * (3.0 - xi)).cosh() - du;
            out.vt[i] = l * out.ut[i] - y.ft.eval(xi);
        }
        out
    }

    /// Boundary and transmission residuals (absolute).
    pub fn interface_residuals(&self) -> Result<InterfaceResiduals> {
        let p0 = self.evaluate_state(0.0)?;
        let p1 = self.evaluate_state(1.0)?;
        let p2 = self.evaluate_state(2.0)?;
        let p3 = self.evaluate_state(3.0)?;
        Ok(InterfaceResiduals {
            u0: p0.u.norm(),
            v0: p0.v.norm(),
            ut3: p3.ut.norm(),
            vt3: p3.vt.norm(),
            v1_w1: (p1.v - p1.w).norm(),
            du1_dw1: (p1.du - p1.dw).norm(),
            vt2_w2: (p2.vt - p2.w).norm(),
            dut2_dw2: (p2.dut - p2.dw).norm(),
        })
    }

    /// Largest component magnitude over a coarse probe, used as "scale of x".
    pub fn magnitude(&self) -> f64 {
        let s = self.sample(64);
        s.u.iter()
            .chain(&s.du)
            .chain(&s.v)
            .chain(&s.w)
            .chain(&s.ut)
            .chain(&s.dut)
            .chain(&s.vt)
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// ODE residuals at `n_probe` interior points plus the interface report.
    ///
    /// Second derivatives come from the fourth-order centred stencil with
    /// step `step` (clamped to `0.05/max(1,|λ|)`).
    pub fn residual_check(&self, n_probe: usize, step: f64) -> Result<ResidualReport> {
        let l = self.lambda.0;
        let h = step.min(0.05 / self.lambda.norm().max(1.0));
        let y = &self.data;
        let d2 = |vals: [Complex64; 5]| -> Complex64 {
            (-vals[0] + 16.0 * vals[1] - 30.0 * vals[2] + 16.0 * vals[3] - vals[4]) / (12.0 * h * h)
        };
        let stencil = |xi: f64, pick: &dyn Fn(&PointValue) -> Complex64| -> Result<[Complex64; 5]> {
            let mut out = [Complex64::new(0.0, 0.0); 5];
            for (k, o) in out.iter_mut().enumerate() {
                *o = pick(&self.evaluate_state(xi + (k as f64 - 2.0) * h)?);
            }
            Ok(out)
        };
        let probe = |a: f64, k: usize| a + 2.0 * h + (1.0 - 4.0 * h) * (k as f64 + 0.5) / n_probe as f64;
        let (mut ru, mut rw, mut rut) = (0.0f64, 0.0f64, 0.0f64);
        for k in 0..n_probe {
            let xi = probe(0.0, k);
            let s = stencil(xi, &|p| p.u)?;
            let res = d2(s) - (l * l * s[2] - l * y.f.eval(xi) - y.g.eval(xi));
            ru = ru.max(res.norm());

            let xi = probe(1.0, k);
            let s = stencil(xi, &|p| p.w)?;
            let res = d2(s) - (l * s[2] - y.h.eval(xi));
            rw = rw.max(res.norm());

            let xi = probe(2.0, k);
            let s = stencil(xi, &|p| p.ut)?;
            let res = d2(s) - (l * l * s[2] - l * y.ft.eval(xi) - y.gt.eval(xi));
            rut = rut.max(res.norm());
        }
        Ok(ResidualReport {
            wave_left: ru,
            heat: rw,
            wave_right: rut,
            step: h,
            interfaces: self.interface_residuals()?,
        })
    }
}

/// Nodal samples of a closed-form state; each vector has `n_per_unit + 1`
/// entries covering its own unit subinterval including both endpoints.
#[derive(Debug, Clone)]
pub struct SampledState {
    pub n_per_unit: usize,
    pub u: Vec<Complex64>,
    pub du: Vec<Complex64>,
    pub v: Vec<Complex64>,
    pub w: Vec<Complex64>,
    pub dw: Vec<Complex64>,
    pub ut: Vec<Complex64>,
    pub dut: Vec<Complex64>,
    pub vt: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceResiduals {
    pub u0: f64,
    pub v0: f64,
    pub ut3: f64,
    pub vt3: f64,
    pub v1_w1: f64,
    pub du1_dw1: f64,
    pub vt2_w2: f64,
    pub dut2_dw2: f64,
}

impl InterfaceResiduals {
    pub fn max(&self) -> f64 {
        [
            self.u0,
            self.v0,
            self.ut3,
            self.vt3,
            self.v1_w1,
            self.du1_dw1,
            self.vt2_w2,
            self.dut2_dw2,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Per-equation maximum residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub wave_left: f64,
    pub heat: f64,
    pub wave_right: f64,
    pub step: f64,
    pub interfaces: InterfaceResiduals,
}

impl ResidualReport {
    pub fn max_ode(&self) -> f64 {
        self.wave_left.max(self.heat).max(self.wave_right)
    }
}

/// A smooth, generic data set used by examples and tests.
pub fn smooth_test_data() -> DataQuintuple {
    use std::f64::consts::PI;
    DataQuintuple {
        f: DataFn::real(|x| x * (1.5 - x)).with_real_derivative(|x| 1.5 - 2.0 * x),
        g: DataFn::real(|x| (PI * x).cos() + 0.5),
        h: DataFn::real(|x| 1.0 + 0.3 * (2.0 * x).sin()),
        ft: DataFn::real(|x| (3.0 - x) * (x - 1.2)).with_real_derivative(|x| 4.2 - 2.0 * x),
        gt: DataFn::real(|x| x.exp() / 10.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rule() -> QuadratureRule {
        QuadratureRule::new(32, 8)
    }

    #[test]
    fn zero_data_gives_zero_integrals() {
        let z = DataFn::zero();
        let l = Frequency::new(1.0, 0.0);
        assert_eq!(quad_u(l, &z, &z, 0.7, &rule()).unwrap(), (c(0.0, 0.0), c(0.0, 0.0)));
        assert_eq!(quad_w(l, &z, 1.7, &rule()).unwrap(), (c(0.0, 0.0), c(0.0, 0.0)));
        assert_eq!(quad_ut(l, &z, &z, 2.7, &rule()).unwrap(), (c(0.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn quad_u_linear_f() {
        // ∫₀¹ sinh(1−r) r dr = sinh 1 − 1, ∫₀¹ cosh(1−r) r dr = cosh 1 − 1
        let f = DataFn::real(|x| x);
        let (u, du) = quad_u(Frequency::new(1.0, 0.0), &f, &DataFn::zero(), 1.0, &rule()).unwrap();
        assert!((u - c(1f64.sinh() - 1.0, 0.0)).norm() < 1e-14);
        assert!((du - c(1f64.cosh() - 1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn quad_w_constant_h() {
        let h = DataFn::real(|_| 1.0);
        let (w, _) = quad_w(Frequency::new(1.0, 0.0), &h, 2.0, &rule()).unwrap();
        assert!((w - c(1f64.cosh() - 1.0, 0.0)).norm() < 1e-14);
        let (w, _) = quad_w(Frequency::new(4.0, 0.0), &h, 2.0, &rule()).unwrap();
        assert!((w - c((2f64.cosh() - 1.0) / 4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn quad_ut_mirror_identity() {
        let f = DataFn::real(|x| x * x * (1.0 - x));
        let g = DataFn::real(|x| (3.0 * x).cos());
        let y = DataQuintuple {
            f: f.clone(),
            g: g.clone(),
            ..DataQuintuple::zero()
        }
        .mirrored();
        let l = Frequency::new(0.4, 3.0);
        for xi in [2.0, 2.3, 2.9, 3.0] {
            let (ut, dut) = quad_ut(l, &y.ft, &y.gt, xi, &rule()).unwrap();
            let (u, du) = quad_u(l, &f, &g, 3.0 - xi, &rule()).unwrap();
            assert!((ut - u).norm() < 1e-13);
            assert!((dut + du).norm() < 1e-13);
        }
        let ft = DataFn::real(|x| 3.0 - x);
        let (ut, _) = quad_ut(Frequency::new(1.0, 0.0), &ft, &DataFn::zero(), 2.0, &rule()).unwrap();
        assert!((ut - c(1f64.sinh() - 1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rhs_examples() {
        let l = Frequency::new(1.0, 0.0);
        let b = rhs_vector(l, &DataQuintuple::zero(), &rule()).unwrap();
        assert!(b.iter().all(|z| z.norm() == 0.0));

        let y = DataQuintuple {
            f: DataFn::real(|x| x),
            ..DataQuintuple::zero()
        };
        let b = rhs_vector(l, &y, &rule()).unwrap();
        assert!((b[0] - c(1f64.sinh(), 0.0)).norm() < 1e-14);
        assert!((b[1] - c(1f64.cosh() - 1.0, 0.0)).norm() < 1e-14);
        assert_eq!(b[2].norm() + b[3].norm(), 0.0);

        let y = DataQuintuple {
            h: DataFn::real(|_| 1.0),
            ..DataQuintuple::zero()
        };
        let b = rhs_vector(l, &y, &rule()).unwrap();
        assert!((b[2] + c(1f64.cosh() - 1.0, 0.0)).norm() < 1e-14);
        assert!((b[3] - c(1f64.sinh(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn too_coarse_rule_is_refused() {
        let y = smooth_test_data();
        let err = quad_u(Frequency::imaginary(500.0), &y.f, &y.g, 0.5, &QuadratureRule::new(10, 8));
        assert!(matches!(err, Err(Error::QuadratureTooCoarse { .. })));
    }

    #[test]
    fn zero_data_gives_zero_state() {
        let st = solve_resolvent(
            Frequency::imaginary(3.0),
            &DataQuintuple::zero(),
            &rule(),
            CoefficientPath::ScaledLu,
        )
        .unwrap();
        for z in [st.coeff_a, st.coeff_b, st.coeff_c, st.coeff_atilde] {
            assert_eq!(z.norm(), 0.0);
        }
    }

    #[test]
    fn solution_satisfies_transmission_conditions() {
        let y = smooth_test_data();
        for l in [Frequency::new(1.0, 0.0), Frequency::imaginary(10.0), Frequency::new(-0.5, 4.0)] {
            let st = solve_resolvent(l, &y, &QuadratureRule::for_rate(l.norm()), CoefficientPath::ScaledLu)
                .unwrap();
            let scale = st.magnitude().max(1.0);
            let res = st.interface_residuals().unwrap();
            assert!(res.max() < 1e-10 * scale, "{l:?}: {res:?}");
            let p = st.evaluate_state(0.0).unwrap();
            assert_eq!(p.u.norm(), 0.0);
            assert!(st.evaluate_state(3.0).unwrap().ut.norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn cramer_and_lu_paths_agree() {
        let y = smooth_test_data();
        for l in [Frequency::new(1.0, 0.0), Frequency::imaginary(7.5), Frequency::new(-1.0, 12.0)] {
            let r = QuadratureRule::for_rate(l.norm());
            let a = solve_resolvent(l, &y, &r, CoefficientPath::ScaledLu).unwrap();
            let b = solve_resolvent(l, &y, &r, CoefficientPath::Cramer).unwrap();
            for (p, q) in [
                (a.coeff_a, b.coeff_a),
                (a.coeff_b, b.coeff_b),
                (a.coeff_c, b.coeff_c),
                (a.coeff_atilde, b.coeff_atilde),
            ] {
                assert!((p - q).norm() <= 1e-9 * p.norm().max(q.norm()), "{l:?}");
            }
        }
    }

    #[test]
    fn textbook_heat_form_agrees_with_green_form() {
        let y = smooth_test_data();
        let l = Frequency::new(0.5, 6.0);
        let st = solve_resolvent(l, &y, &rule(), CoefficientPath::ScaledLu).unwrap();
        for xi in [1.0, 1.25, 1.5, 2.0] {
            let a = st.evaluate_state(xi).unwrap().w;
            let b = st.w_from_textbook_coefficients(xi).unwrap();
            assert!((a - b).norm() < 1e-10 * a.norm().max(1.0));
        }
    }

    #[test]
    fn sampled_and_pointwise_evaluation_agree() {
        let y = smooth_test_data();
        let l = Frequency::imaginary(20.0);
        let st = solve_resolvent(l, &y, &QuadratureRule::for_rate(20.0), CoefficientPath::ScaledLu).unwrap();
        let s = st.sample(16);
        for i in [0, 5, 16] {
            let x = i as f64 / 16.0;
            let p = st.evaluate_state(x).unwrap();
            assert!((p.u - s.u[i]).norm() < 1e-11);
            assert!((p.du - s.du[i]).norm() < 1e-10);
            let p = st.evaluate_state(1.0 + x).unwrap();
            assert!((p.w - s.w[i]).norm() < 1e-11);
            assert!((p.dw - s.dw[i]).norm() < 1e-10);
            let p = st.evaluate_state(2.0 + x).unwrap();
            assert!((p.ut - s.ut[i]).norm() < 1e-11);
            assert!((p.vt - s.vt[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn residual_check_at_one() {
        let y = smooth_test_data();
        let st = solve_resolvent(Frequency::new(1.0, 0.0), &y, &rule(), CoefficientPath::ScaledLu).unwrap();
        let rep = st.residual_check(64, 1e-3).unwrap();
        let scale = st.magnitude();
        assert!(rep.max_ode() < 1e-6 * scale, "{rep:?}");
    }

    #[test]
    fn residual_check_zero_data() {
        let st = solve_resolvent(Frequency::new(1.0, 0.0), &DataQuintuple::zero(), &rule(), CoefficientPath::ScaledLu)
            .unwrap();
        let rep = st.residual_check(16, 1e-3).unwrap();
        assert_eq!(rep.max_ode(), 0.0);
        assert_eq!(rep.interfaces.max(), 0.0);
    }

    #[test]
    fn validate_rejects_nonzero_endpoint() {
        let y = DataQuintuple {
            f: DataFn::real(|x| x + 1.0),
            ..DataQuintuple::zero()
        };
        assert!(matches!(y.validate(1e-12), Err(Error::ProfileViolatesDomain { .. })));
        smooth_test_data().validate(1e-12).unwrap();
    }

    #[test]
    fn spline_reproduces_cubic_interior() {
        let xs: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (2.0 * x).sin()).collect();
        let d = DataFn::from_samples(xs, ys).unwrap();
        for x in [0.13, 0.5, 0.77] {
            assert!((d.eval(x).re - (2.0 * x).sin()).abs() < 1e-5);
            assert!((d.eval_derivative(x).re - 2.0 * (2.0 * x).cos()).abs() < 1e-3);
        }
    }
}
