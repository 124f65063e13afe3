//! Agreement between the closed-form resolvent and the discrete one.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{build_generator, grid_state_from_samples, Mesh};
use crate::error::Result;
use crate::lambda::Frequency;
use crate::quadrature::QuadratureRule;
use crate::resolvent::{solve_resolvent, CoefficientPath, DataQuintuple};

/// Relative energy-norm errors of `(is − A_h)⁻¹y_h` against the sampled
/// closed-form solution on three successively doubled meshes.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleConvergence {
    pub s: f64,
    pub meshes: [usize; 3],
    pub errors: [f64; 3],
}

impl OracleConvergence {
    /// Observed order from the two finest meshes.
    pub fn order(&self) -> f64 {
        (self.errors[1] / self.errors[2]).log2()
    }
}

/// Coarsest mesh for shift `s`: the discrete error scales like `s³Δ²`, so
/// `n ∝ s^{3/2}` keeps the three meshes in the asymptotic range.
pub fn oracle_base_mesh(s: f64) -> usize {
    ((0.7 * s.abs().powf(1.5)).max(32.0).ceil() as usize).next_power_of_two()
}

/// Relative error of the discrete resolvent against the closed form at one mesh.
pub fn oracle_error(s: f64, y: &DataQuintuple, n_per_unit: usize) -> Result<f64> {
    let lam = Frequency::imaginary(s);
    let closed = solve_resolvent(lam, y, &QuadratureRule::for_rate(4.0 * s.abs().max(1.0)), CoefficientPath::ScaledLu)?;
    oracle_error_against(&closed.sample(n_per_unit), s, y, n_per_unit)
}

fn oracle_error_against(
    sampled: &crate::resolvent::SampledState,
    s: f64,
    y: &DataQuintuple,
    n_per_unit: usize,
) -> Result<f64> {
    let mesh = Mesh::full(n_per_unit)?;
    let gen = build_generator(mesh);
    let rhs = gen.layout.discretize_data(y);
    let discrete = gen
        .shifted(Complex64::new(0.0, s), Complex64::new(-1.0, 0.0))
        .factor()?
        .solve(&rhs);
    let exact = gen.pack(&grid_state_from_samples(mesh, sampled));
    let diff: Vec<Complex64> = exact.iter().zip(&discrete).map(|(a, b)| a - b).collect();
    Ok(gen.norm(&diff) / gen.norm(&exact))
}

/// Errors on meshes `n₀, 2n₀, 4n₀` with `n₀ = oracle_base_mesh(s)`.
pub fn oracle_convergence(s: f64, y: &DataQuintuple) -> Result<OracleConvergence> {
    let lam = Frequency::imaginary(s);
    let closed = solve_resolvent(lam, y, &QuadratureRule::for_rate(4.0 * s.abs().max(1.0)), CoefficientPath::ScaledLu)?;
    let n0 = oracle_base_mesh(s);
    let meshes = [n0, 2 * n0, 4 * n0];
    let errs = meshes
        .par_iter()
        .map(|&n| oracle_error_against(&closed.sample(n), s, y, n))
        .collect::<Result<Vec<f64>>>()?;
    Ok(OracleConvergence {
        s,
        meshes,
        errors: [errs[0], errs[1], errs[2]],
    })
}
