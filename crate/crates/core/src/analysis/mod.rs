//! Resolvent-norm scans, exponent fits and the packaged identity checks.

mod fit;
mod norm;
mod oracle;
mod reflection;
mod scan;
mod suite;

pub use fit::{
    decay_exponent, dyadic_band_maxima, exponent_consistency, fit_power, scan_exponent, ExponentFit,
    OptimalityIndicator, RateFunction, DECAY_SAMPLES, ENERGY_FLOOR, MIN_FIT_POINTS,
};
pub use norm::{resolvent_norm, NORM_RTOL};
pub use reflection::{compare_reflection, ReflectionComparison};
pub use oracle::{oracle_base_mesh, oracle_convergence, oracle_error, OracleConvergence};
pub use scan::{
    log_grid, peak_norm, scan_from_csv, scan_resolvent, scan_row, scan_to_csv, MeshPolicy, ScanMode, ScanRow,
    CONVERGENCE_RTOL, EXTRA_REFINEMENTS, SCAN_HEADER,
};
pub use suite::{
    adjugate_check, clearance_check, det_at_one_check, det_form_check, discrete_dissipativity_check, discrete_suite,
    dissipation_order_check, integral_uniformity_check, analytic_suite, mesh_convergence_check, t_factor_bound_check,
    CheckResult, SuiteOptions, SuiteReport,
};
