//! Energy of reflected data on the full system against the half system.

use crate::dynamics::{build_generator, reflect_half_state, simulate, GridState};
use crate::error::{Error, Result};

/// `E_full(t) / E_half(t)` along two simulations: the half-system state
/// `half` and its odd reflection on the full system, same mesh and step.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionComparison {
    /// `(t, E_full, E_half)` per recorded row
    pub rows: Vec<(f64, f64, f64)>,
}

impl ReflectionComparison {
    /// Largest `|E_full/E_half − 2| / 2` over the rows.
    pub fn max_relative_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|&(_, full, half)| (full / half - 2.0).abs() / 2.0)
            .fold(0.0, f64::max)
    }
}

pub fn compare_reflection(half: &GridState, dt: f64, t_final: f64, stride: usize) -> Result<ReflectionComparison> {
    let full = reflect_half_state(half)?;
    let a = simulate(&full, &build_generator(full.mesh), dt, t_final, stride, None)?;
    let b = simulate(half, &build_generator(half.mesh), dt, t_final, stride, None)?;
    if a.trace.rows.len() != b.trace.rows.len() {
        return Err(Error::InvalidArgument("traces differ in length".into()));
    }
    let rows = a
        .trace
        .rows
        .iter()
        .zip(&b.trace.rows)
        .map(|(x, y)| (x.t, x.energy, y.energy))
        .collect();
    Ok(ReflectionComparison { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{make_initial_data, Mesh, Profile};

    #[test]
    fn reflected_energy_stays_doubled() {
        let mesh = Mesh::half(32).unwrap();
        let x0 = make_initial_data(&Profile::BumpWave1, mesh).unwrap();
        let cmp = compare_reflection(&x0, mesh.dx() / 2.0, 10.0, 16).unwrap();
        assert!(cmp.rows.len() > 10);
        assert!(cmp.max_relative_deviation() < 1e-10, "{}", cmp.max_relative_deviation());
    }
}
