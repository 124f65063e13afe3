//! Crank–Nicolson time stepping with energy bookkeeping.

use std::fmt::Write as _;
use std::path::Path;

use super::{DiscreteGenerator, GridState};
use crate::error::{Error, Result};

/// One sampled row of an energy trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRow {
    pub t: f64,
    pub energy: f64,
    pub wave1: f64,
    pub heat: f64,
    pub wave2: f64,
    /// instantaneous `‖D_h w‖² = −dE/dt`
    pub dissipation: f64,
}

/// Time series of energies.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyTrace {
    pub rows: Vec<EnergyRow>,
}

pub const TRACE_HEADER: &str = "t,E,E_wave1,E_heat,E_wave2,dissipation";

impl EnergyTrace {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(TRACE_HEADER);
        s.push('\n');
        for r in &self.rows {
            writeln!(s, "{:?},{:?},{:?},{:?},{:?},{:?}", r.t, r.energy, r.wave1, r.heat, r.wave2, r.dissipation)
                .expect("write to string");
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == TRACE_HEADER => {}
            other => {
                return Err(Error::Config(format!(
                    "energy trace must start with `{TRACE_HEADER}`, found {other:?}"
                )))
            }
        }
        let mut rows = Vec::new();
        for (k, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("trace line {}: {e}", k + 2)))?;
            if vals.len() != 6 {
                return Err(Error::Config(format!("trace line {}: expected 6 columns", k + 2)));
            }
            rows.push(EnergyRow {
                t: vals[0],
                energy: vals[1],
                wave1: vals[2],
                heat: vals[3],
                wave2: vals[4],
                dissipation: vals[5],
            });
        }
        Ok(Self { rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.energy).collect()
    }

    /// Largest `E_{k+1} − E_k` over consecutive rows (≤ 0 for a dissipative run).
    pub fn max_increase(&self) -> f64 {
        self.rows
            .windows(2)
            .map(|w| w[1].energy - w[0].energy)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Sampled state at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub state: GridState<f64>,
}

impl Snapshot {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("xi,re_u,im_u,re_v,im_v,re_w,im_w,re_ut,im_ut,re_vt,im_vt\n");
        for (xi, c) in self.state.rows() {
            write!(s, "{xi:?}").expect("write to string");
            for v in c {
                write!(s, ",{v:?},0").expect("write to string");
            }
            s.push('\n');
        }
        s
    }
}

/// Result of [`simulate`].
#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub trace: EnergyTrace,
    pub snapshots: Vec<Snapshot>,
    pub final_state: GridState<f64>,
    pub steps: usize,
    /// max over all steps of `E_{n+1} − E_n`
    pub max_step_increase: f64,
    /// max over all steps of `|E_{n+1} − E_n + dt·‖D_h w_{n+½}‖²|`
    pub max_balance_residual: f64,
}

/// Integrate `x′ = A_h x` from `x0` to `t_final` with Crank–Nicolson.
///
/// A row is recorded every `sample_stride` steps (and at the end); a snapshot
/// every `snapshot_stride` steps when given.
pub fn simulate(
    x0: &GridState<f64>,
    gen: &DiscreteGenerator,
    dt: f64,
    t_final: f64,
    sample_stride: usize,
    snapshot_stride: Option<usize>,
) -> Result<SimulationOutput> {
    if !(dt > 0.0) || !(t_final >= 0.0) || !dt.is_finite() || !t_final.is_finite() {
        return Err(Error::InvalidArgument(format!("need dt > 0 and t_final ≥ 0, got {dt}, {t_final}")));
    }
    if x0.mesh != gen.mesh() {
        return Err(Error::InvalidArgument("initial state and generator use different meshes".into()));
    }
    let violations = x0.domain_residuals().violations(x0.mesh.dx(), x0.domain_scale());
    if !violations.is_empty() {
        return Err(Error::ProfileViolatesDomain { violations });
    }
    let sample_stride = sample_stride.max(1);
    let steps = (t_final / dt - 1e-9).ceil().max(0.0) as usize;

    let half = 0.5 * dt;
    let lhs = gen.a_h.shifted(1.0, -half).factor()?;
    let rhs_op = gen.a_h.shifted(1.0, half);

    let mut x = gen.pack(x0);
    let t0 = x0.time;
    let mut e_prev = gen.energy(&x);
    let mut trace = EnergyTrace::default();
    let mut snapshots = Vec::new();
    let record = |x: &[f64], t: f64, trace: &mut EnergyTrace| {
        let parts = gen.unpack(x, t).energy();
        trace.rows.push(EnergyRow {
            t,
            energy: parts.total,
            wave1: parts.wave1,
            heat: parts.heat,
            wave2: parts.wave2,
            dissipation: gen.dissipation(x),
        });
    };
    record(&x, t0, &mut trace);
    if snapshot_stride.is_some() {
        snapshots.push(Snapshot { state: gen.unpack(&x, t0) });
    }

    let mut max_inc = f64::NEG_INFINITY;
    let mut max_bal: f64 = 0.0;
    let mut next = vec![0.0; x.len()];
    let mut mid = vec![0.0; x.len()];
    for k in 1..=steps {
        rhs_op.matvec_into(&x, &mut next);
        lhs.solve_in_place(&mut next);
        for ((m, a), b) in mid.iter_mut().zip(&x).zip(&next) {
            *m = 0.5 * (a + b);
        }
        std::mem::swap(&mut x, &mut next);
        let e = gen.energy(&x);
        max_inc = max_inc.max(e - e_prev);
        max_bal = max_bal.max((e - e_prev + dt * gen.dissipation(&mid)).abs());
        e_prev = e;
        let t = t0 + k as f64 * dt;
        if k % sample_stride == 0 || k == steps {
            record(&x, t, &mut trace);
        }
        if let Some(ss) = snapshot_stride {
            if k % ss.max(1) == 0 || k == steps {
                snapshots.push(Snapshot { state: gen.unpack(&x, t) });
            }
        }
    }
    Ok(SimulationOutput {
        trace,
        snapshots,
        final_state: gen.unpack(&x, t0 + steps as f64 * dt),
        steps,
        max_step_increase: if steps == 0 { 0.0 } else { max_inc },
        max_balance_residual: max_bal,
    })
}
