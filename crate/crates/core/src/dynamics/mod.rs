//! Semi-discretisation and time integration of the wave–heat–wave system.
//!
//! The grid carries one *velocity* value per node (`v` on `[0,1]`, `w` on
//! `[1,2]`, `ṽ` on `[2,3]`, shared at the interface nodes) and a displacement
//! per wave node. Fluxes live on cells: `(u_c − u_{c−1})/Δ` on wave cells and
//! `(w_c − w_{c−1})/Δ` on heat cells. Every velocity node evolves by the
//! difference of its neighbouring fluxes, so the interface conditions
//! `v = w`, `u′ = w′` hold by construction and the discrete energy obeys
//! `dE/dt = −Σ_heat Δ·flux²` exactly.

mod generator;
mod profiles;
mod simulate;

pub use generator::{build_generator, grid_state_from_samples, DiscreteGenerator, Layout};
pub use profiles::{make_initial_data, reflect_half_state, Profile, RoughLift};
pub use simulate::{simulate, EnergyRow, EnergyTrace, SimulationOutput, Snapshot};

use crate::banded::Scalar;
use crate::error::{Error, Result};

/// Full system on `[0,3]` or the half system on `[0, 3/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SystemKind {
    #[default]
    Full,
    Half,
}

impl std::str::FromStr for SystemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" | "full_A" | "A" => Ok(Self::Full),
            "half" | "half_B" | "B" => Ok(Self::Half),
            other => Err(Error::Config(format!("unknown system `{other}` (full|half)"))),
        }
    }
}

impl std::fmt::Display for SystemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Full => "full",
            Self::Half => "half",
        })
    }
}

/// Uniform grid with `n_per_unit` cells per unit length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mesh {
    pub n_per_unit: usize,
    pub system: SystemKind,
}

pub const MIN_CELLS_PER_UNIT: usize = 8;

impl Mesh {
    pub fn new(n_per_unit: usize, system: SystemKind) -> Result<Self> {
        if n_per_unit < MIN_CELLS_PER_UNIT {
            return Err(Error::InvalidArgument(format!(
                "mesh needs at least {MIN_CELLS_PER_UNIT} cells per unit, got {n_per_unit}"
            )));
        }
        if system == SystemKind::Half && n_per_unit % 2 == 1 {
            return Err(Error::InvalidArgument(
                "half system needs an even cell count so that ξ = 3/2 is a node".into(),
            ));
        }
        Ok(Self { n_per_unit, system })
    }

    pub fn full(n_per_unit: usize) -> Result<Self> {
        Self::new(n_per_unit, SystemKind::Full)
    }

    pub fn half(n_per_unit: usize) -> Result<Self> {
        Self::new(n_per_unit, SystemKind::Half)
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.n_per_unit as f64
    }

    /// Index of the last node (`ξ = 3` or `ξ = 3/2`).
    pub fn last_node(&self) -> usize {
        match self.system {
            SystemKind::Full => 3 * self.n_per_unit,
            SystemKind::Half => 3 * self.n_per_unit / 2,
        }
    }

    /// Number of heat nodes including both ends.
    pub fn heat_len(&self) -> usize {
        self.last_node().min(2 * self.n_per_unit) - self.n_per_unit + 1
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }
}

/// Sampled state `(u, v, w, ũ, ṽ)`.
///
/// `u, v` hold `n+1` values on `[0,1]`; `w` holds the heat nodes; `ũ, ṽ` hold
/// `n+1` values on `[2,3]` and are empty for the half system. Interface
/// values are stored on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState<T = f64> {
    pub mesh: Mesh,
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub w: Vec<T>,
    pub ut: Vec<T>,
    pub vt: Vec<T>,
    pub time: f64,
}

/// Energy and its split over the three pieces (interface nodes shared ½/½).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyParts {
    pub total: f64,
    pub wave1: f64,
    pub heat: f64,
    pub wave2: f64,
}

impl<T: Scalar> GridState<T> {
    pub fn zeros(mesh: Mesh) -> Self {
        let n = mesh.n_per_unit;
        let z = T::zero();
        let (ut, vt) = match mesh.system {
            SystemKind::Full => (vec![z; n + 1], vec![z; n + 1]),
            SystemKind::Half => (Vec::new(), Vec::new()),
        };
        Self {
            mesh,
            u: vec![z; n + 1],
            v: vec![z; n + 1],
            w: vec![z; mesh.heat_len()],
            ut,
            vt,
            time: 0.0,
        }
    }

    pub fn scaled(&self, k: T) -> Self {
        let m = |x: &Vec<T>| x.iter().map(|&a| k * a).collect();
        Self {
            mesh: self.mesh,
            u: m(&self.u),
            v: m(&self.v),
            w: m(&self.w),
            ut: m(&self.ut),
            vt: m(&self.vt),
            time: self.time,
        }
    }

    /// `self − other` componentwise (meshes must match).
    pub fn difference(&self, other: &Self) -> Self {
        assert_eq!(self.mesh, other.mesh);
        let d = |a: &Vec<T>, b: &Vec<T>| a.iter().zip(b).map(|(&x, &y)| x - y).collect();
        Self {
            mesh: self.mesh,
            u: d(&self.u, &other.u),
            v: d(&self.v, &other.v),
            w: d(&self.w, &other.w),
            ut: d(&self.ut, &other.ut),
            vt: d(&self.vt, &other.vt),
            time: self.time,
        }
    }

    /// Inject onto a mesh whose spacing is an integer multiple of this one.
    pub fn restrict(&self, coarse: Mesh) -> Result<Self> {
        let (n, m) = (self.mesh.n_per_unit, coarse.n_per_unit);
        if coarse.system != self.mesh.system || m == 0 || n % m != 0 {
            return Err(Error::InvalidArgument(format!(
                "cannot restrict a {} mesh with n = {n} to one with n = {m}",
                self.mesh.system
            )));
        }
        let k = n / m;
        let pick = |x: &Vec<T>| x.iter().step_by(k).copied().collect();
        Ok(Self {
            mesh: coarse,
            u: pick(&self.u),
            v: pick(&self.v),
            w: pick(&self.w),
            ut: pick(&self.ut),
            vt: pick(&self.vt),
            time: self.time,
        })
    }

    /// `E = ½(‖u′‖² + ‖v‖² + ‖w‖² + ‖ũ′‖² + ‖ṽ‖²)` with first differences for
    /// `u′, ũ′` and lumped (trapezoid) node weights.
    pub fn energy(&self) -> EnergyParts {
        let dx = self.mesh.dx();
        let sq = |x: T| x.modulus().powi(2);
        let lumped = |x: &[T]| -> f64 {
            let k = x.len();
            if k == 0 {
                return 0.0;
            }
            let inner: f64 = x[1..k - 1].iter().map(|&a| sq(a)).sum();
            dx * (inner + 0.5 * (sq(x[0]) + sq(x[k - 1])))
        };
        let grad = |x: &[T]| -> f64 { x.windows(2).map(|p| sq(p[1] - p[0])).sum::<f64>() / dx };
        let wave1 = 0.5 * (lumped(&self.v) + grad(&self.u));
        let heat = 0.5 * lumped(&self.w);
        let wave2 = 0.5 * (lumped(&self.vt) + grad(&self.ut));
        EnergyParts {
            total: wave1 + heat + wave2,
            wave1,
            heat,
            wave2,
        }
    }

    /// `Σ_heat Δ·|(w_c − w_{c−1})/Δ|²`, the discrete `‖w′‖²`.
    pub fn heat_gradient_sq(&self) -> f64 {
        let dx = self.mesh.dx();
        self.w.windows(2).map(|p| (p[1] - p[0]).modulus().powi(2)).sum::<f64>() / dx
    }

    /// Residuals of the discrete domain constraints.
    pub fn domain_residuals(&self) -> DomainResiduals {
        let dx = self.mesh.dx();
        let n = self.mesh.n_per_unit;
        let m = self.w.len() - 1;
        let d_right = |x: &[T], i: usize| (x[i] * 3.0 - x[i - 1] * 4.0 + x[i - 2]) * (0.5 / dx);
        let d_left = |x: &[T], i: usize| (x[i] * (-3.0) + x[i + 1] * 4.0 - x[i + 2]) * (0.5 / dx);
        let mut r = DomainResiduals {
            u0: self.u[0].modulus(),
            v0: self.v[0].modulus(),
            v1_w1: (self.v[n] - self.w[0]).modulus(),
            du1_dw1: (d_right(&self.u, n) - d_left(&self.w, 0)).modulus(),
            ..Default::default()
        };
        match self.mesh.system {
            SystemKind::Full => {
                r.ut3 = self.ut[n].modulus();
                r.vt3 = self.vt[n].modulus();
                r.vt2_w2 = (self.vt[0] - self.w[m]).modulus();
                r.dut2_dw2 = (d_left(&self.ut, 0) - d_right(&self.w, m)).modulus();
            }
            SystemKind::Half => r.w_seam = self.w[m].modulus(),
        }
        r
    }

    /// Largest component magnitude, used to scale tolerances.
    pub fn max_abs(&self) -> f64 {
        self.u
            .iter()
            .chain(&self.v)
            .chain(&self.w)
            .chain(&self.ut)
            .chain(&self.vt)
            .map(|a| a.modulus())
            .fold(0.0, f64::max)
    }

    /// Largest value, first difference quotient or second difference
    /// quotient over all components: the discrete graph-norm scale used for
    /// domain tolerances.
    pub fn domain_scale(&self) -> f64 {
        let dx = self.mesh.dx();
        let comps = [&self.u, &self.v, &self.w, &self.ut, &self.vt];
        let d1 = comps
            .iter()
            .flat_map(|x| x.windows(2).map(|p| (p[1] - p[0]).modulus() / dx))
            .fold(0.0, f64::max);
        let d2 = comps
            .iter()
            .flat_map(|x| x.windows(3).map(|p| (p[2] - p[1] * 2.0 + p[0]).modulus() / (dx * dx)))
            .fold(0.0, f64::max);
        self.max_abs().max(d1).max(d2)
    }

    /// Rows `(ξ, u, v, w, ũ, ṽ)` over all nodes, components zero off their
    /// own subinterval.
    pub fn rows(&self) -> Vec<(f64, [T; 5])> {
        let n = self.mesh.n_per_unit;
        let z = T::zero();
        let mut out = Vec::with_capacity(self.mesh.last_node() + 1);
        for i in 0..=self.mesh.last_node() {
            let mut c = [z; 5];
            if i <= n {
                c[0] = self.u[i];
                c[1] = self.v[i];
            }
            if i >= n && i - n < self.w.len() {
                c[2] = self.w[i - n];
            }
            if self.mesh.system == SystemKind::Full && i >= 2 * n {
                c[3] = self.ut[i - 2 * n];
                c[4] = self.vt[i - 2 * n];
            }
            out.push((self.mesh.node(i), c));
        }
        out
    }
}

impl GridState<f64> {
    pub fn to_complex(&self) -> GridState<num_complex::Complex64> {
        let c = |x: &Vec<f64>| x.iter().map(|&a| num_complex::Complex64::new(a, 0.0)).collect();
        GridState {
            mesh: self.mesh,
            u: c(&self.u),
            v: c(&self.v),
            w: c(&self.w),
            ut: c(&self.ut),
            vt: c(&self.vt),
            time: self.time,
        }
    }
}

/// Domain-constraint residuals of a [`GridState`]; derivatives at the
/// interfaces use one-sided second-order differences.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DomainResiduals {
    pub u0: f64,
    pub v0: f64,
    pub ut3: f64,
    pub vt3: f64,
    pub v1_w1: f64,
    pub du1_dw1: f64,
    pub vt2_w2: f64,
    pub dut2_dw2: f64,
    /// `|w(3/2)|` for the half system
    pub w_seam: f64,
}

impl DomainResiduals {
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
            self.w_seam,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Exact constraints must hold to rounding; the derivative matches to
    /// `10·Δ²·scale`.
    pub fn violations(&self, dx: f64, scale: f64) -> Vec<String> {
        let exact = 1e-12 * scale.max(1.0);
        let approx = 10.0 * dx * dx * scale.max(1.0);
        let mut out = Vec::new();
        let mut check = |name: &str, value: f64, tol: f64| {
            if !(value <= tol) {
                out.push(format!("{name} residual {value:.3e} > {tol:.1e}"));
            }
        };
        check("u(0) = 0", self.u0, exact);
        check("v(0) = 0", self.v0, exact);
        check("ũ(3) = 0", self.ut3, exact);
        check("ṽ(3) = 0", self.vt3, exact);
        check("v(1) = w(1)", self.v1_w1, exact);
        check("ṽ(2) = w(2)", self.vt2_w2, exact);
        check("w(3/2) = 0", self.w_seam, exact);
        check("u′(1) = w′(1)", self.du1_dw1, approx);
        check("ũ′(2) = w′(2)", self.dut2_dw2, approx);
        out
    }
}
