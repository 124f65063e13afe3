//! Energy-norm resolvent norms `‖(isI − A_h)⁻¹‖` of the discrete generator.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::banded::BandLu;
use crate::dynamics::DiscreteGenerator;
use crate::error::{Error, Result};

/// Relative accuracy target for [`resolvent_norm`].
pub const NORM_RTOL: f64 = 1e-4;
const MAX_LANCZOS: usize = 300;
/// Norms above this are treated as a shift sitting on the spectrum.
const NEAR_SPECTRUM: f64 = 1e12;

/// Factored pieces for repeated norm evaluations at one shift.
struct ShiftedSolver<'a> {
    gen: &'a DiscreteGenerator,
    b: BandLu<Complex64>,
    g: BandLu<Complex64>,
}

impl ShiftedSolver<'_> {
    /// `K x = G⁻¹ B⁻ᴴ G B⁻¹ x`, self-adjoint and non-negative in `⟨·,·⟩_G`.
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let y = self.b.solve(x);
        let mut z = self.gen.gram.apply(&y);
        self.b.solve_adjoint_in_place(&mut z);
        self.g.solve_in_place(&mut z);
        z
    }
}

fn g_inner(gx: &[Complex64], y: &[Complex64]) -> Complex64 {
    gx.iter().zip(y).map(|(a, b)| b.conj() * a).sum()
}

/// `‖(isI − A_h)⁻¹‖` in the discrete energy norm.
///
/// The square of the norm is the top eigenvalue of `K = G⁻¹B⁻ᴴGB⁻¹`, which is
/// self-adjoint in the Gram inner product; it is found by Lanczos in that
/// inner product with full reorthogonalisation.
pub fn resolvent_norm(s: f64, gen: &DiscreteGenerator) -> Result<f64> {
    let b = gen
        .shifted(Complex64::new(0.0, s), Complex64::new(-1.0, 0.0))
        .factor()
        .map_err(|_| Error::ShiftNearSpectrum { s })?;
    let g = gen.gram.to_complex().factor()?;
    let op = ShiftedSolver { gen, b, g };
    let n = gen.dim();

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ n as u64);
    let mut q: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let nq = gen.norm(&q);
    q.iter_mut().for_each(|v| *v /= nq);

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut gbasis: Vec<Vec<Complex64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut prev_theta = 0.0;
    let max_steps = MAX_LANCZOS.min(n);
    for k in 0..max_steps {
        let mut w = op.apply(&q);
        let gq = gen.gram.apply(&q);
        let a = g_inner(&w, &gq).re;
        basis.push(q);
        gbasis.push(gq);
        alpha.push(a);
        // Full reorthogonalisation (twice is enough).
        for _ in 0..2 {
            for (v, gv) in basis.iter().zip(&gbasis) {
                let c = g_inner(gv, &w).conj();
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
            }
        }
        let bnorm = gen.norm(&w);

        let m = alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (top, theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let resid = bnorm * eig.eigenvectors[(m - 1, top)].abs();
        if !theta.is_finite() || theta.sqrt() > NEAR_SPECTRUM {
            return Err(Error::ShiftNearSpectrum { s });
        }
        // The squared norm needs half the relative accuracy of the norm.
        let settled = resid <= 0.5 * NORM_RTOL * NORM_RTOL * theta
            || (k > 2 && (theta - prev_theta).abs() <= 1e-3 * NORM_RTOL * theta && resid <= NORM_RTOL * theta);
        if settled || bnorm <= 1e-14 * theta || k + 1 == n {
            return Ok(theta.sqrt());
        }
        prev_theta = theta;
        beta.push(bnorm);
        q = w.into_iter().map(|v| v / bnorm).collect();
    }
    Err(Error::NoConvergence {
        what: "Lanczos resolvent norm",
        iterations: max_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_generator, Mesh};

    fn dense_norm(s: f64, gen: &DiscreteGenerator) -> f64 {
        let n = gen.dim();
        let b = DMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { Complex64::new(0.0, s) } else { Complex64::new(0.0, 0.0) };
            d - gen.a_h.get(i, j)
        });
        let g = DMatrix::from_fn(n, n, |i, j| gen.gram.get(i, j));
        let l = g.clone().cholesky().unwrap().l().map(|v| Complex64::new(v, 0.0));
        let binv = b.try_inverse().unwrap();
        let linv = l.clone().try_inverse().unwrap();
        // ‖R‖_G = ‖Lᴴ R L⁻ᴴ‖₂
        let m = l.adjoint() * binv * linv.adjoint();
        m.singular_values().max()
    }

    #[test]
    fn matches_dense_computation() {
        for system in [Mesh::full(8).unwrap(), Mesh::half(8).unwrap()] {
            let gen = build_generator(system);
            for s in [0.5, 3.0, 17.0] {
                let a = resolvent_norm(s, &gen).unwrap();
                let b = dense_norm(s, &gen);
                assert!((a - b).abs() <= 1e-6 * b, "s={s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn conjugate_shift_gives_same_norm() {
        let gen = build_generator(Mesh::full(32).unwrap());
        let a = resolvent_norm(12.3, &gen).unwrap();
        let b = resolvent_norm(-12.3, &gen).unwrap();
        assert!((a - b).abs() <= 2.0 * NORM_RTOL * a);
    }
}
