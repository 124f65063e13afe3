//! The five command-line workflows and the argument parser behind `whw`.
//!
//! Every workflow takes a validated [`RunConfig`], writes its artifacts into
//! `config.out` and returns an [`Outcome`] whose exit code follows the
//! contract: 0 when everything passed, 1 when a check or fit failed, 2 on
//! configuration or I/O errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{
    decay_exponent, discrete_suite, analytic_suite, scan_exponent, scan_resolvent, scan_to_csv, MeshPolicy,
    OptimalityIndicator, ScanRow, SuiteOptions,
};
use crate::config::RunConfig;
use crate::dynamics::{build_generator, make_initial_data, simulate, EnergyTrace, Mesh, SystemKind};
use crate::error::{Error, Result};
use crate::lambda::CofactorSource;
use crate::plot::{complex_scatter, loglog, Guide, Series};
use crate::spectrum::find_eigenvalues;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILURE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

/// Relative slack allowed on a step-to-step energy increase.
pub const MONOTONE_SLACK: f64 = 1e-12;

impl Error {
    /// Exit code for a workflow that stopped with this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_)
            | Error::Io(_)
            | Error::InvalidArgument(_)
            | Error::ProfileViolatesDomain { .. }
            | Error::ReflectionSeam { .. } => EXIT_CONFIG,
            _ => EXIT_CHECK_FAILURE,
        }
    }
}

/// Result of one workflow run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: u8,
    /// human-readable summary printed to stdout
    pub message: String,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    fn failed(err: &Error) -> Self {
        Self {
            code: err.exit_code(),
            message: format!("error: {err}"),
            files: Vec::new(),
        }
    }
}

/// Collects written files; all output goes through here.
struct Emitter {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Emitter {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Config(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, contents)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(path);
        Ok(())
    }

    fn finish(self, code: u8, message: String) -> Outcome {
        Outcome {
            code,
            message,
            files: self.files,
        }
    }
}

fn run(f: impl FnOnce() -> Result<Outcome>) -> Outcome {
    f().unwrap_or_else(|e| Outcome::failed(&e))
}

/// Identity suite, discrete dissipativity and the mesh-convergence smoke test.
pub fn cmd_verify(config: &RunConfig) -> Outcome {
    run(|| {
        let mut out = Emitter::new(&config.out)?;
        let options = SuiteOptions {
            cofactor_source: if config.mutate_cofactor {
                CofactorSource::Misprinted
            } else {
                CofactorSource::ClosedForm
            },
            seed: config.seed,
        };
        let mut report = analytic_suite(&options);
        report.extend(discrete_suite(config.seed));
        let text = report.to_text();
        out.write("verify_report.txt", &text)?;
        let failures = report.failures();
        let (code, mut message) = if failures.is_empty() {
            (EXIT_PASS, format!("verify: all {} checks passed", report.checks.len()))
        } else {
            (EXIT_CHECK_FAILURE, format!("verify: failing checks: {}", failures.join(", ")))
        };
        message.push('\n');
        message.push_str(&text);
        Ok(out.finish(code, message))
    })
}

/// Eigenvalues in the configured region as CSV plus a scatter plot.
pub fn cmd_spectrum(config: &RunConfig) -> Outcome {
    run(|| {
        let mut out = Emitter::new(&config.out)?;
        let report = find_eigenvalues(&config.region, config.tol)?;
        out.write("eigenvalues.csv", &report.to_csv())?;
        let points: Vec<(f64, f64)> = report.eigenvalues.iter().map(|e| (e.lambda.re, e.lambda.im)).collect();
        out.write("spectrum.svg", &complex_scatter("Eigenvalues of the generator", &points))?;
        let mut message = format!(
            "spectrum: {} eigenvalues, winding total {}, {} boxes",
            report.eigenvalues.len(),
            report.winding_total,
            report.boxes_scanned
        );
        if let Some(a) = report.spectral_abscissa() {
            write!(message, ", spectral abscissa {a}").expect("write to string");
        }
        for c in &report.clusters {
            write!(message, "\ncluster of {} at {} (width {})", c.count, c.center, c.width).expect("write to string");
        }
        let code = if report.is_consistent() {
            EXIT_PASS
        } else {
            message.push_str("\nwinding total does not match the number of reported roots");
            EXIT_CHECK_FAILURE
        };
        Ok(out.finish(code, message))
    })
}

/// Resolvent-norm scan, growth-exponent fit and (half system) band maxima.
pub fn cmd_resolvent_scan(config: &RunConfig) -> Outcome {
    run(|| {
        let mut out = Emitter::new(&config.out)?;
        let grid = config.scan_grid()?;
        let policy = MeshPolicy {
            min_n: config.mesh,
            ..MeshPolicy::new(config.system)
        };
        let results = scan_resolvent(&grid, &policy, config.scan_mode);
        let mut rows: Vec<ScanRow> = Vec::with_capacity(results.len());
        let mut errors = Vec::new();
        for (s, r) in grid.iter().zip(results) {
            match r {
                Ok(row) => rows.push(row),
                Err(e) => errors.push(format!("s = {s}: {e}")),
            }
        }
        out.write("scan.csv", &scan_to_csv(&rows))?;
        let series = [
            Series {
                label: "resolvent norm".into(),
                points: rows.iter().map(|r| (r.s.abs(), r.resolvent_norm)).collect(),
            },
            Series {
                label: "unconverged rows".into(),
                points: rows.iter().filter(|r| !r.converged).map(|r| (r.s.abs(), r.resolvent_norm)).collect(),
            },
        ];
        out.write(
            "scan.svg",
            &loglog("Resolvent norm on the imaginary axis", "s", "‖R(is)‖", &series, &[Guide { slope: 0.5 }]),
        )?;
        let converged = rows.iter().filter(|r| r.converged).count();
        let mut message = format!("resolvent-scan: {} rows, {converged} converged", rows.len());
        for e in &errors {
            write!(message, "\n{e}").expect("write to string");
        }
        let fit = scan_exponent(&rows, config.scan_mode.fit_window(config.s_min, config.s_max));
        let mut block = String::new();
        let mut code = if errors.is_empty() { EXIT_PASS } else { EXIT_CHECK_FAILURE };
        match &fit {
            Ok(f) => {
                writeln!(block, "{}", f.key_values()).expect("write to string");
                write!(message, "\n{}", f.key_values()).expect("write to string");
            }
            Err(e) => {
                writeln!(block, "error={e}").expect("write to string");
                write!(message, "\nfit failed: {e}").expect("write to string");
                code = EXIT_CHECK_FAILURE;
            }
        }
        if config.system == SystemKind::Half {
            let ind = OptimalityIndicator::from_rows(&rows);
            let bands: Vec<String> = ind.bands.iter().map(|(k, v)| format!("{k}:{v}")).collect();
            let line = format!("bands={},lower_bound={},variation={}", bands.join(";"), ind.lower_bound, ind.variation);
            writeln!(block, "{line}").expect("write to string");
            write!(message, "\n{line}").expect("write to string");
        }
        out.write("scan_fit.txt", &block)?;
        Ok(out.finish(code, message))
    })
}

/// Crank–Nicolson run: energy trace, optional snapshots and a log–log plot.
pub fn cmd_simulate(config: &RunConfig) -> Outcome {
    run(|| {
        let mut out = Emitter::new(&config.out)?;
        let mesh = Mesh::new(config.mesh, config.system)?;
        let gen = build_generator(mesh);
        let x0 = make_initial_data(&config.profile, mesh)?;
        let snapshot_stride = (config.snapshot_stride > 0).then_some(config.snapshot_stride);
        let dt = config.effective_dt();
        let sim = simulate(&x0, &gen, dt, config.t_final, config.sample_stride, snapshot_stride)?;
        out.write("trace.csv", &sim.trace.to_csv())?;
        if !sim.snapshots.is_empty() {
            let mut index = String::from("index,t,file\n");
            for (k, snap) in sim.snapshots.iter().enumerate() {
                let name = format!("snapshots/snapshot_{k:05}.csv");
                out.write(&name, &snap.to_csv())?;
                writeln!(index, "{k},{},{name}", snap.state.time).expect("write to string");
            }
            out.write("snapshots/index.csv", &index)?;
        }
        let series = [Series {
            label: "E(t)".into(),
            points: sim.trace.rows.iter().map(|r| (r.t, r.energy)).collect(),
        }];
        out.write("trace.svg", &loglog("Energy", "t", "E(t)", &series, &[Guide { slope: -4.0 }]))?;

        let e0 = sim.trace.rows.first().map_or(0.0, |r| r.energy);
        let e1 = sim.trace.rows.last().map_or(0.0, |r| r.energy);
        let mut message = format!(
            "simulate: {} on {} mesh n={} dt={dt:?}, {} steps, E(0)={e0:?}, E({:?})={e1:?}, max step increase {:?}, balance residual {:?}",
            config.profile, config.system, config.mesh, sim.steps, config.t_final, sim.max_step_increase, sim.max_balance_residual
        );
        let code = if sim.max_step_increase <= MONOTONE_SLACK * e0 {
            EXIT_PASS
        } else {
            message.push_str("\nenergy increased beyond the monotonicity slack");
            EXIT_CHECK_FAILURE
        };
        Ok(out.finish(code, message))
    })
}

/// Power-law fit of an energy trace over `[fit_start, end]`.
pub fn cmd_decay_fit(config: &RunConfig) -> Outcome {
    run(|| {
        let path = config
            .trace
            .as_ref()
            .ok_or_else(|| Error::Config("decay-fit needs a trace CSV (`trace = PATH` or a positional argument)".into()))?;
        let trace = EnergyTrace::read(path)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), e)))?;
        let mut out = Emitter::new(&config.out)?;
        let fit = decay_exponent(&trace, config.fit_start);
        let series = [Series {
            label: "E(t)".into(),
            points: trace.rows.iter().map(|r| (r.t, r.energy)).collect(),
        }];
        out.write("decay.svg", &loglog("Energy decay", "t", "E(t)", &series, &[Guide { slope: -4.0 }]))?;
        match fit {
            Ok(f) => {
                out.write("decay_fit.txt", &format!("{}\n", f.key_values()))?;
                Ok(out.finish(EXIT_PASS, format!("decay-fit: {}", f.key_values())))
            }
            Err(e) => {
                out.write("decay_fit.txt", &format!("error={e}\n"))?;
                Ok(out.finish(e.exit_code().max(EXIT_CHECK_FAILURE), format!("decay-fit failed: {e}")))
            }
        }
    })
}

/// Command-line interface of `whw`.
#[derive(Debug, Parser)]
#[command(name = "whw", version, about = "Resolvent, spectrum and energy decay of the wave-heat-wave system")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the identity suite and the discrete energy checks.
    Verify(Flags),
    /// Locate eigenvalues in a rectangle of the left half-plane.
    Spectrum(Flags),
    /// Scan the resolvent norm along the imaginary axis and fit its growth.
    ResolventScan(Flags),
    /// Integrate the discrete system and record its energy.
    Simulate(Flags),
    /// Fit the decay exponent of an energy trace.
    DecayFit {
        /// energy trace CSV written by `simulate`
        trace: Option<PathBuf>,
        #[command(flatten)]
        flags: Flags,
    },
}

/// Flags shared by every subcommand; each overrides the config-file key of
/// the same name.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// flat `key = value` configuration file
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// cells per unit length
    #[arg(long)]
    pub mesh: Option<String>,
    /// time step (default: half the cell width)
    #[arg(long)]
    pub dt: Option<String>,
    /// end time of the simulation
    #[arg(long = "t-final")]
    pub t_final: Option<String>,
    /// bump_wave1 | bump_heat | symmetric_pair | rough_lift[:β] | custom:u=…;w=…
    #[arg(long)]
    pub profile: Option<String>,
    /// smallest scanned shift
    #[arg(long = "s-min", allow_hyphen_values = true)]
    pub s_min: Option<String>,
    /// largest scanned shift
    #[arg(long = "s-max", allow_hyphen_values = true)]
    pub s_max: Option<String>,
    /// number of scanned shifts
    #[arg(long)]
    pub points: Option<String>,
    /// re_min,re_max,im_min,im_max
    #[arg(long, allow_hyphen_values = true)]
    pub region: Option<String>,
    /// full | half
    #[arg(long)]
    pub system: Option<String>,
    /// output directory (default: $WHW_OUT or ./whw_out)
    #[arg(long, value_name = "DIR")]
    pub out: Option<String>,
    /// seed for randomised checks
    #[arg(long)]
    pub seed: Option<String>,
    /// cap on worker threads
    #[arg(long)]
    pub jobs: Option<String>,
    /// debug: use the misprinted cofactor table (verify fails)
    #[arg(long = "mutate-cofactor", hide = true)]
    pub mutate_cofactor: bool,
}

impl Flags {
    /// Defaults, then the config file, then the flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut config = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            config.apply_text(&text)?;
        }
        let pairs = [
            ("mesh", &self.mesh),
            ("dt", &self.dt),
            ("t_final", &self.t_final),
            ("profile", &self.profile),
            ("s_min", &self.s_min),
            ("s_max", &self.s_max),
            ("points", &self.points),
            ("region", &self.region),
            ("system", &self.system),
            ("out", &self.out),
            ("seed", &self.seed),
            ("jobs", &self.jobs),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                config.set(key, v)?;
            }
        }
        if self.mutate_cofactor {
            config.mutate_cofactor = true;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Cap the global worker pool; later calls keep the first setting.
pub fn configure_threads(jobs: usize) {
    if jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
}

/// Parse arguments, run the workflow and print its summary; returns the exit code.
pub fn run_from_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    let (flags, trace) = match &cli.command {
        Command::Verify(f) | Command::Spectrum(f) | Command::ResolventScan(f) | Command::Simulate(f) => (f, None),
        Command::DecayFit { trace, flags } => (flags, trace.clone()),
    };
    let config = match flags.resolve() {
        Ok(mut c) => {
            if let Some(t) = trace {
                c.trace = Some(t);
            }
            c
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    configure_threads(config.jobs);
    let outcome = match cli.command {
        Command::Verify(_) => cmd_verify(&config),
        Command::Spectrum(_) => cmd_spectrum(&config),
        Command::ResolventScan(_) => cmd_resolvent_scan(&config),
        Command::Simulate(_) => cmd_simulate(&config),
        Command::DecayFit { .. } => cmd_decay_fit(&config),
    };
    if outcome.code == EXIT_PASS {
        println!("{}", outcome.message);
    } else {
        eprintln!("{}", outcome.message);
    }
    outcome.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(Error::Config("x".into()).exit_code(), EXIT_CONFIG);
        assert_eq!(Error::EnergyUnderflow { floor: 1e-30 }.exit_code(), EXIT_CHECK_FAILURE);
        assert_eq!(Error::NonIntegerWinding { value: 0.5 }.exit_code(), EXIT_CHECK_FAILURE);
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("run.cfg");
        std::fs::write(&file, "mesh = 32\nseed = 3\n").unwrap();
        let flags = Flags {
            config: Some(file),
            mesh: Some("48".into()),
            ..Flags::default()
        };
        let c = flags.resolve().unwrap();
        assert_eq!((c.mesh, c.seed), (48, 3));
    }

    #[test]
    fn parser_accepts_negative_region() {
        let cli = Cli::try_parse_from(["whw", "spectrum", "--region", "-5,-0.01,-10,10"]).unwrap();
        let Command::Spectrum(f) = cli.command else { panic!() };
        assert_eq!(f.resolve().unwrap().region.re_min, -5.0);
    }

    #[test]
    fn small_mesh_is_a_config_error() {
        assert_eq!(run_from_args(["whw", "simulate", "--mesh", "4"]), EXIT_CONFIG);
    }
}
