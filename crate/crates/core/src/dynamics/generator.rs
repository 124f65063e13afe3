//! The discrete generator `A_h` and its energy Gram matrix.

use num_complex::Complex64;

use super::{GridState, Mesh, SystemKind};
use crate::banded::{BandMatrix, Scalar};
use crate::resolvent::{DataQuintuple, SampledState};

/// Position of each unknown in the packed state vector.
///
/// Unknowns are interleaved node by node (`u_i`, `ũ_i`, then the velocity
/// `φ_i`), which keeps `A_h` and the Gram matrix within bandwidth 3.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub mesh: Mesh,
    pub dim: usize,
    u_idx: Vec<Option<usize>>,
    ut_idx: Vec<Option<usize>>,
    phi_idx: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cell {
    Wave1,
    Heat,
    Wave2,
}

impl Layout {
    pub fn new(mesh: Mesh) -> Self {
        let n = mesh.n_per_unit;
        let last = mesh.last_node();
        let mut u_idx = vec![None; last + 1];
        let mut ut_idx = vec![None; last + 1];
        let mut phi_idx = vec![None; last + 1];
        let mut k = 0;
        for i in 1..last {
            if i <= n {
                u_idx[i] = Some(k);
                k += 1;
            }
            if mesh.system == SystemKind::Full && i >= 2 * n {
                ut_idx[i] = Some(k);
                k += 1;
            }
            phi_idx[i] = Some(k);
            k += 1;
        }
        Self {
            mesh,
            dim: k,
            u_idx,
            ut_idx,
            phi_idx,
        }
    }

    fn cell(&self, c: usize) -> Cell {
        let n = self.mesh.n_per_unit;
        if c <= n {
            Cell::Wave1
        } else if c <= 2 * n {
            Cell::Heat
        } else {
            Cell::Wave2
        }
    }

    /// Flux on cell `c` (between nodes `c−1` and `c`) as `(index, weight)`.
    fn flux(&self, c: usize) -> Vec<(usize, f64)> {
        let inv = self.mesh.n_per_unit as f64;
        let idx = match self.cell(c) {
            Cell::Wave1 => &self.u_idx,
            Cell::Heat => &self.phi_idx,
            Cell::Wave2 => &self.ut_idx,
        };
        let mut out = Vec::with_capacity(2);
        if let Some(k) = idx[c] {
            out.push((k, inv));
        }
        if let Some(k) = idx[c - 1] {
            out.push((k, -inv));
        }
        out
    }

    fn is_heat(&self, c: usize) -> bool {
        self.cell(c) == Cell::Heat
    }

    fn value<T: Scalar>(idx: &[Option<usize>], x: &[T], i: usize) -> T {
        idx[i].map_or(T::zero(), |k| x[k])
    }

    /// Pack a grid state; interface velocities are averaged from both sides.
    pub fn pack<T: Scalar>(&self, s: &GridState<T>) -> Vec<T> {
        assert_eq!(s.mesh, self.mesh);
        let n = self.mesh.n_per_unit;
        let last = self.mesh.last_node();
        let mut x = vec![T::zero(); self.dim];
        for i in 1..last {
            if let Some(k) = self.u_idx[i] {
                x[k] = s.u[i];
            }
            if let Some(k) = self.ut_idx[i] {
                x[k] = s.ut[i - 2 * n];
            }
            let phi = if i < n {
                s.v[i]
            } else if i == n {
                (s.v[n] + s.w[0]) * 0.5
            } else if i < 2 * n {
                s.w[i - n]
            } else if i == 2 * n {
                (s.w[n] + s.vt[0]) * 0.5
            } else {
                s.vt[i - 2 * n]
            };
            x[self.phi_idx[i].expect("velocity at every interior node")] = phi;
        }
        x
    }

    pub fn unpack<T: Scalar>(&self, x: &[T], time: f64) -> GridState<T> {
        assert_eq!(x.len(), self.dim);
        let n = self.mesh.n_per_unit;
        let mut s = GridState::zeros(self.mesh);
        s.time = time;
        for i in 0..=n {
            s.u[i] = Self::value(&self.u_idx, x, i);
            s.v[i] = Self::value(&self.phi_idx, x, i);
        }
        for j in 0..s.w.len() {
            s.w[j] = Self::value(&self.phi_idx, x, n + j);
        }
        for j in 0..s.ut.len() {
            s.ut[j] = Self::value(&self.ut_idx, x, 2 * n + j);
            s.vt[j] = Self::value(&self.phi_idx, x, 2 * n + j);
        }
        s
    }

    /// Nodal discretisation of resolvent data `y`; velocity data at the
    /// interface nodes is the mean of the two one-sided values.
    pub fn discretize_data(&self, y: &DataQuintuple) -> Vec<Complex64> {
        let n = self.mesh.n_per_unit;
        let last = self.mesh.last_node();
        let mut x = vec![Complex64::new(0.0, 0.0); self.dim];
        for i in 1..last {
            let xi = self.mesh.node(i);
            if let Some(k) = self.u_idx[i] {
                x[k] = y.f.eval(xi);
            }
            if let Some(k) = self.ut_idx[i] {
                x[k] = y.ft.eval(xi);
            }
            let phi = if i < n {
                y.g.eval(xi)
            } else if i == n {
                0.5 * (y.g.eval(xi) + y.h.eval(xi))
            } else if i < 2 * n {
                y.h.eval(xi)
            } else if i == 2 * n {
                0.5 * (y.h.eval(xi) + y.gt.eval(xi))
            } else {
                y.gt.eval(xi)
            };
            x[self.phi_idx[i].expect("velocity at every interior node")] = phi;
        }
        x
    }
}

/// `A_h` together with the Gram matrix `G` of the discrete energy inner
/// product `⟨x, y⟩ = yᴴ G x`, so that `E = ½⟨x, x⟩`.
#[derive(Debug, Clone)]
pub struct DiscreteGenerator {
    pub layout: Layout,
    pub a_h: BandMatrix<f64>,
    pub gram: BandMatrix<f64>,
    /// packed indices of `(w_c, w_{c−1})` per heat cell
    heat_pairs: Vec<(Option<usize>, Option<usize>)>,
}

/// Assemble the generator for `mesh`.
pub fn build_generator(mesh: Mesh) -> DiscreteGenerator {
    let layout = Layout::new(mesh);
    let dx = mesh.dx();
    let last = mesh.last_node();
    let mut a_entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut g_entries: Vec<(usize, usize, f64)> = Vec::new();

    for i in 1..last {
        let p = layout.phi_idx[i].expect("velocity at every interior node");
        for idx in [&layout.u_idx, &layout.ut_idx] {
            if let Some(k) = idx[i] {
                a_entries.push((k, p, 1.0));
            }
        }
        for (k, c) in layout.flux(i + 1) {
            a_entries.push((p, k, c / dx));
        }
        for (k, c) in layout.flux(i) {
            a_entries.push((p, k, -c / dx));
        }
        g_entries.push((p, p, dx));
    }
    for c in 1..=last {
        if layout.is_heat(c) {
            continue;
        }
        let f = layout.flux(c);
        for &(a, ca) in &f {
            for &(b, cb) in &f {
                g_entries.push((a, b, dx * ca * cb));
            }
        }
    }

    let assemble = |entries: &[(usize, usize, f64)]| {
        let bw = entries.iter().map(|&(i, j, _)| i.abs_diff(j)).max().unwrap_or(0);
        let mut m = BandMatrix::zeros(layout.dim, bw, bw);
        for &(i, j, v) in entries {
            m.add_to(i, j, v);
        }
        m
    };
    let heat_pairs = (1..=last)
        .filter(|&c| layout.is_heat(c))
        .map(|c| (layout.phi_idx[c], layout.phi_idx[c - 1]))
        .collect();
    DiscreteGenerator {
        a_h: assemble(&a_entries),
        gram: assemble(&g_entries),
        layout,
        heat_pairs,
    }
}

impl DiscreteGenerator {
    pub fn mesh(&self) -> Mesh {
        self.layout.mesh
    }

    pub fn dim(&self) -> usize {
        self.layout.dim
    }

    pub fn apply<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        self.a_h.apply(x)
    }

    /// `⟨x, y⟩_G = yᴴ G x`.
    pub fn inner<T: Scalar>(&self, x: &[T], y: &[T]) -> T {
        let gx = self.gram.apply(x);
        gx.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + b.conj() * a)
    }

    pub fn norm<T: Scalar>(&self, x: &[T]) -> f64 {
        self.gram.quadratic_form(x).max(0.0).sqrt()
    }

    /// `½⟨x, x⟩_G`.
    pub fn energy<T: Scalar>(&self, x: &[T]) -> f64 {
        0.5 * self.gram.quadratic_form(x)
    }

    /// Heat-cell fluxes `(w_c − w_{c−1})/Δ`.
    pub fn heat_fluxes<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let inv = self.mesh().n_per_unit as f64;
        let at = |k: Option<usize>| k.map_or(T::zero(), |k| x[k]);
        self.heat_pairs.iter().map(|&(a, b)| (at(a) - at(b)) * inv).collect()
    }

    /// `‖D_h w‖² = Σ_heat Δ |flux|²`.
    pub fn dissipation<T: Scalar>(&self, x: &[T]) -> f64 {
        let n = self.mesh().n_per_unit as f64;
        let at = |k: Option<usize>| k.map_or(T::zero(), |k| x[k]);
        n * self
            .heat_pairs
            .iter()
            .map(|&(a, b)| (at(a) - at(b)).modulus().powi(2))
            .sum::<f64>()
    }

    /// `Re⟨A_h x, x⟩_G + ‖D_h w‖²`; zero up to rounding for every `x`.
    pub fn dissipation_defect<T: Scalar>(&self, x: &[T]) -> f64 {
        self.inner(&self.apply(x), x).re() + self.dissipation(x)
    }

    /// `αI + βA_h` over the complex numbers.
    pub fn shifted(&self, alpha: Complex64, beta: Complex64) -> BandMatrix<Complex64> {
        self.a_h.to_complex().shifted(alpha, beta)
    }

    pub fn pack<T: Scalar>(&self, s: &GridState<T>) -> Vec<T> {
        self.layout.pack(s)
    }

    pub fn unpack<T: Scalar>(&self, x: &[T], time: f64) -> GridState<T> {
        self.layout.unpack(x, time)
    }
}

/// Restrict closed-form nodal samples to a grid state on `mesh` (full system,
/// same `n_per_unit`).
pub fn grid_state_from_samples(mesh: Mesh, s: &SampledState) -> GridState<Complex64> {
    assert_eq!(mesh.n_per_unit, s.n_per_unit);
    assert_eq!(mesh.system, SystemKind::Full);
    GridState {
        mesh,
        u: s.u.clone(),
        v: s.v.clone(),
        w: s.w.clone(),
        ut: s.ut.clone(),
        vt: s.vt.clone(),
        time: 0.0,
    }
}
