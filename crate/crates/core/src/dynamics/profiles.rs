//! Initial data and the odd reflection from the half system to the full one.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;

use super::{GridState, Mesh, SystemKind};
use crate::banded::Scalar;
use crate::error::{Error, Result};
use crate::expression::Expression;
use crate::lambda::Frequency;
use crate::quadrature::QuadratureRule;
use crate::resolvent::{solve_resolvent, CoefficientPath, DataFn, DataQuintuple};

/// `x = R(1, A)y` with `y = (0, ξ^{−β}, 0, 0, 0)`.
///
/// `y` is square integrable but no smoother, so `x` lies in `D(A)` and not in
/// any smaller power domain: the slowest-decaying kind of classical data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoughLift {
    pub beta: f64,
}

impl Default for RoughLift {
    fn default() -> Self {
        Self { beta: 0.45 }
    }
}

impl RoughLift {
    pub fn data(&self) -> DataQuintuple {
        let b = self.beta;
        DataQuintuple {
            g: DataFn::real(move |x| x.powf(-b)),
            ..DataQuintuple::zero()
        }
    }
}

/// Named initial profile.
#[derive(Debug, Clone)]
pub enum Profile {
    /// `u = ξ²(1−ξ)²`, everything else zero.
    BumpWave1,
    /// `w = sin²(π(ξ−1))` (half system: `sin²(2π(ξ−1))`), everything else zero.
    BumpHeat,
    /// `u = ξ²(1−ξ)²` and its odd mirror `ũ(ξ) = −u(3−ξ)`.
    SymmetricPair,
    RoughLift(RoughLift),
    /// Expressions in `x` per component; missing components are zero.
    Custom {
        u: Option<Expression>,
        v: Option<Expression>,
        w: Option<Expression>,
        ut: Option<Expression>,
        vt: Option<Expression>,
    },
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::BumpWave1 => f.write_str("bump_wave1"),
            Self::BumpHeat => f.write_str("bump_heat"),
            Self::SymmetricPair => f.write_str("symmetric_pair"),
            Self::RoughLift(r) => write!(f, "rough_lift:{}", r.beta),
            Self::Custom { u, v, w, ut, vt } => {
                let parts: Vec<String> = [("u", u), ("v", v), ("w", w), ("ut", ut), ("vt", vt)]
                    .into_iter()
                    .filter_map(|(k, e)| e.as_ref().map(|e| format!("{k}={}", e.source())))
                    .collect();
                write!(f, "custom:{}", parts.join(";"))
            }
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    /// `bump_wave1 | bump_heat | symmetric_pair | rough_lift[:β] |
    /// custom:u=…;v=…;w=…;ut=…;vt=…`
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "bump_wave1" => return Ok(Self::BumpWave1),
            "bump_heat" => return Ok(Self::BumpHeat),
            "symmetric_pair" => return Ok(Self::SymmetricPair),
            "rough_lift" => return Ok(Self::RoughLift(RoughLift::default())),
            _ => {}
        }
        if let Some(beta) = s.strip_prefix("rough_lift:") {
            let beta: f64 = beta
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad rough_lift exponent `{beta}`")))?;
            if !(0.0..0.5).contains(&beta) {
                return Err(Error::Config(format!(
                    "rough_lift exponent must lie in [0, 1/2) for square-integrable data, got {beta}"
                )));
            }
            return Ok(Self::RoughLift(RoughLift { beta }));
        }
        if let Some(body) = s.strip_prefix("custom:") {
            let (mut u, mut v, mut w, mut ut, mut vt) = (None, None, None, None, None);
            for part in body.split(';').map(str::trim).filter(|p| !p.is_empty()) {
                let (key, expr) = part
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("expected component=expression, got `{part}`")))?;
                let slot = match key.trim() {
                    "u" => &mut u,
                    "v" => &mut v,
                    "w" => &mut w,
                    "ut" => &mut ut,
                    "vt" => &mut vt,
                    other => return Err(Error::Config(format!("unknown profile component `{other}`"))),
                };
                *slot = Some(Expression::parse(expr.trim())?);
            }
            return Ok(Self::Custom { u, v, w, ut, vt });
        }
        Err(Error::Config(format!(
            "unknown profile `{s}` (bump_wave1|bump_heat|symmetric_pair|rough_lift[:β]|custom:…)"
        )))
    }
}

type Component = Box<dyn Fn(f64) -> Result<f64>>;

fn zero() -> Component {
    Box::new(|_| Ok(0.0))
}

fn closed(f: impl Fn(f64) -> f64 + 'static) -> Component {
    Box::new(move |x| Ok(f(x)))
}

fn from_expr(e: &Option<Expression>) -> Component {
    match e {
        None => zero(),
        Some(e) => {
            let e = e.clone();
            Box::new(move |x| e.eval(x))
        }
    }
}

fn bump(x: f64) -> f64 {
    x * x * (1.0 - x) * (1.0 - x)
}

/// The five component functions of an analytic profile.
fn components(profile: &Profile, system: SystemKind) -> Result<[Component; 5]> {
    Ok(match profile {
        Profile::BumpWave1 => [closed(bump), zero(), zero(), zero(), zero()],
        Profile::BumpHeat => {
            let k = if system == SystemKind::Half { 2.0 * PI } else { PI };
            [zero(), zero(), closed(move |x| (k * (x - 1.0)).sin().powi(2)), zero(), zero()]
        }
        Profile::SymmetricPair => {
            if system == SystemKind::Half {
                return Err(Error::InvalidArgument(
                    "symmetric_pair is the reflected form of bump_wave1 and needs the full system".into(),
                ));
            }
            [closed(bump), zero(), zero(), closed(|x| -bump(3.0 - x)), zero()]
        }
        Profile::Custom { u, v, w, ut, vt } => {
            [from_expr(u), from_expr(v), from_expr(w), from_expr(ut), from_expr(vt)]
        }
        Profile::RoughLift(_) => unreachable!("sampled from the closed-form resolvent"),
    })
}

/// Constraint check on the continuous profile functions.
fn check_continuous(c: &[Component; 5], system: SystemKind) -> Result<Vec<String>> {
    let h = 1e-4;
    // second-order one-sided differences
    let d_left = |f: &Component, x: f64| -> Result<f64> {
        Ok((3.0 * f(x)? - 4.0 * f(x - h)? + f(x - 2.0 * h)?) / (2.0 * h))
    };
    let d_right = |f: &Component, x: f64| -> Result<f64> {
        Ok((-3.0 * f(x)? + 4.0 * f(x + h)? - f(x + 2.0 * h)?) / (2.0 * h))
    };
    let [u, v, w, ut, vt] = c;
    let tol = 1e-9;
    let dtol = 1e-6;
    let mut out = Vec::new();
    let mut check = |name: &str, r: f64, tol: f64| {
        if !(r.abs() <= tol) {
            out.push(format!("{name} (residual {:.3e})", r.abs()));
        }
    };
    check("u(0) = 0", u(0.0)?, tol);
    check("v(0) = 0", v(0.0)?, tol);
    check("v(1) = w(1)", v(1.0)? - w(1.0)?, tol);
    check("u′(1) = w′(1)", d_left(u, 1.0)? - d_right(w, 1.0)?, dtol);
    match system {
        SystemKind::Full => {
            check("ũ(3) = 0", ut(3.0)?, tol);
            check("ṽ(3) = 0", vt(3.0)?, tol);
            check("ṽ(2) = w(2)", vt(2.0)? - w(2.0)?, tol);
            check("ũ′(2) = w′(2)", d_right(ut, 2.0)? - d_left(w, 2.0)?, dtol);
        }
        SystemKind::Half => check("w(3/2) = 0", w(1.5)?, tol),
    }
    Ok(out)
}

/// Sample `profile` on `mesh`, checking every domain constraint.
pub fn make_initial_data(profile: &Profile, mesh: Mesh) -> Result<GridState<f64>> {
    let n = mesh.n_per_unit;
    let mut s = GridState::<f64>::zeros(mesh);
    if let Profile::RoughLift(r) = profile {
        return rough_lift_state(*r, mesh);
    }
    let c = components(profile, mesh.system)?;
    let violations = check_continuous(&c, mesh.system)?;
    if !violations.is_empty() {
        return Err(Error::ProfileViolatesDomain { violations });
    }
    let [u, v, w, ut, vt] = &c;
    for i in 0..=n {
        let x = mesh.node(i);
        s.u[i] = u(x)?;
        s.v[i] = v(x)?;
        if mesh.system == SystemKind::Full {
            s.ut[i] = ut(2.0 + x)?;
            s.vt[i] = vt(2.0 + x)?;
        }
    }
    for j in 0..s.w.len() {
        s.w[j] = w(1.0 + mesh.node(j))?;
    }
    ensure_discrete_domain(&s)?;
    Ok(s)
}

fn ensure_discrete_domain<T: Scalar>(s: &GridState<T>) -> Result<()> {
    let scale = s.domain_scale();
    let violations = s.domain_residuals().violations(s.mesh.dx(), scale);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::ProfileViolatesDomain { violations })
    }
}

fn rough_lift_state(r: RoughLift, mesh: Mesh) -> Result<GridState<f64>> {
    let n = mesh.n_per_unit;
    let mut y = r.data();
    if mesh.system == SystemKind::Half {
        // odd data on [0,3] restricts to the half system
        y = y.plus(&y.mirrored().scaled(Complex64::new(-1.0, 0.0)));
    }
    let rule = QuadratureRule::new(QuadratureRule::required_panels(1.0).max(2 * n), 8);
    let state = solve_resolvent(Frequency::new(1.0, 0.0), &y, &rule, CoefficientPath::ScaledLu)?;
    let smp = state.sample(n);
    let re = |v: &[Complex64]| v.iter().map(|z| z.re).collect::<Vec<f64>>();
    let mut s = GridState::<f64>::zeros(mesh);
    s.u = re(&smp.u);
    s.v = re(&smp.v);
    let w = re(&smp.w);
    let k = s.w.len();
    s.w.copy_from_slice(&w[..k]);
    s.u[0] = 0.0;
    s.v[0] = 0.0;
    s.v[n] = s.w[0];
    match mesh.system {
        SystemKind::Full => {
            s.ut = re(&smp.ut);
            s.vt = re(&smp.vt);
            s.ut[n] = 0.0;
            s.vt[n] = 0.0;
            s.vt[0] = s.w[n];
        }
        SystemKind::Half => s.w[k - 1] = 0.0,
    }
    Ok(s)
}

/// Odd reflection `x̃(ξ) = −x(3−ξ)` of a half-system state onto `[0,3]`.
pub fn reflect_half_state<T: Scalar>(half: &GridState<T>) -> Result<GridState<T>> {
    if half.mesh.system != SystemKind::Half {
        return Err(Error::InvalidArgument("reflection expects a half-system state".into()));
    }
    let n = half.mesh.n_per_unit;
    let seam = half.w[half.w.len() - 1].modulus();
    if seam > 1e-12 * half.max_abs().max(1.0) {
        return Err(Error::ReflectionSeam { residual: seam });
    }
    let mesh = Mesh::full(n)?;
    let mut s = GridState::zeros(mesh);
    s.time = half.time;
    s.u.clone_from(&half.u);
    s.v.clone_from(&half.v);
    for j in 0..=n {
        s.w[j] = if 2 * j <= n { half.w[j] } else { -half.w[n - j] };
        s.ut[j] = -half.u[n - j];
        s.vt[j] = -half.v[n - j];
    }
    Ok(s)
}
