//! Run configuration: a flat `key = value` file plus command-line overrides.
//!
//! Blank lines and lines starting with `#` are ignored. Every key must be one
//! of [`KEYS`]; a later assignment of the same key wins, which is how flags
//! override the file.

use std::path::{Path, PathBuf};

use crate::analysis::ScanMode;
use crate::dynamics::{Profile, SystemKind, MIN_CELLS_PER_UNIT};
use crate::error::{Error, Result};
use crate::spectrum::SearchRegion;

/// Spacing of the resolvent scan grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

/// Every recognised configuration key.
pub const KEYS: &[&str] = &[
    "system",
    "mesh",
    "dt",
    "t_final",
    "profile",
    "sample_stride",
    "snapshot_stride",
    "s_min",
    "s_max",
    "points",
    "spacing",
    "scan_mode",
    "region",
    "tol",
    "fit_start",
    "trace",
    "out",
    "seed",
    "jobs",
    "mutate_cofactor",
];

/// Environment variable holding the default output directory.
pub const OUT_ENV: &str = "WHW_OUT";

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub system: SystemKind,
    /// cells per unit length
    pub mesh: usize,
    /// time step; `None` means `Δξ/2`
    pub dt: Option<f64>,
    pub t_final: f64,
    pub profile: Profile,
    /// record an energy row every this many steps
    pub sample_stride: usize,
    /// write a snapshot every this many steps (0 = none)
    pub snapshot_stride: usize,
    pub s_min: f64,
    pub s_max: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub scan_mode: ScanMode,
    pub region: SearchRegion,
    /// root tolerance for the spectrum search
    pub tol: f64,
    /// start of the decay-fit window
    pub fit_start: f64,
    /// energy trace consumed by `decay-fit`
    pub trace: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    /// worker cap (0 = all cores)
    pub jobs: usize,
    /// debug: verify with the misprinted cofactor table
    pub mutate_cofactor: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            system: SystemKind::Full,
            mesh: 64,
            dt: None,
            t_final: 200.0,
            profile: Profile::BumpHeat,
            sample_stride: 1,
            snapshot_stride: 0,
            s_min: 100.0,
            s_max: 1000.0,
            points: 16,
            spacing: Spacing::Log,
            scan_mode: ScanMode::PeakResolved,
            region: SearchRegion::default(),
            tol: 1e-10,
            fit_start: 25.0,
            trace: None,
            out: std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("whw_out"), PathBuf::from),
            seed: 7,
            jobs: 0,
            mutate_cofactor: false,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Config(format!("`{key}`: cannot parse `{value}`: {e}")))
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("`{key}`: expected a boolean, got `{value}`"))),
    }
}

impl RunConfig {
    /// Assign one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "system" => self.system = value.parse()?,
            "mesh" => self.mesh = num(key, value)?,
            "dt" => self.dt = if value == "auto" { None } else { Some(num(key, value)?) },
            "t_final" => self.t_final = num(key, value)?,
            "profile" => self.profile = value.parse()?,
            "sample_stride" => self.sample_stride = num(key, value)?,
            "snapshot_stride" => self.snapshot_stride = num(key, value)?,
            "s_min" => self.s_min = num(key, value)?,
            "s_max" => self.s_max = num(key, value)?,
            "points" => self.points = num(key, value)?,
            "spacing" => {
                self.spacing = match value {
                    "log" => Spacing::Log,
                    "linear" => Spacing::Linear,
                    _ => return Err(Error::Config(format!("`spacing`: expected log|linear, got `{value}`"))),
                }
            }
            "scan_mode" => {
                self.scan_mode = match value {
                    "peak" => ScanMode::PeakResolved,
                    "pointwise" => ScanMode::Pointwise,
                    _ => return Err(Error::Config(format!("`scan_mode`: expected peak|pointwise, got `{value}`"))),
                }
            }
            "region" => self.region = SearchRegion::parse(value).map_err(|e| Error::Config(format!("`region`: {e}")))?,
            "tol" => self.tol = num(key, value)?,
            "fit_start" => self.fit_start = num(key, value)?,
            "trace" => self.trace = Some(PathBuf::from(value)),
            "out" => self.out = PathBuf::from(value),
            "seed" => self.seed = num(key, value)?,
            "jobs" => self.jobs = num(key, value)?,
            "mutate_cofactor" => self.mutate_cofactor = boolean(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}` (known: {})", KEYS.join(", ")))),
        }
        Ok(())
    }

    /// Apply every assignment in a `key = value` text.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, got `{line}`", k + 1)))?;
            self.set(key.trim(), value)
                .map_err(|e| Error::Config(format!("line {}: {}", k + 1, strip_prefix(&e))))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = Self::default();
        c.apply_text(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// Time step actually used.
    pub fn effective_dt(&self) -> f64 {
        self.dt.unwrap_or(0.5 / self.mesh as f64)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.mesh < MIN_CELLS_PER_UNIT {
            return bad(format!("mesh = {} is below the minimum {MIN_CELLS_PER_UNIT}", self.mesh));
        }
        if self.system == SystemKind::Half && !self.mesh.is_multiple_of(2) {
            return bad(format!("the half system needs an even mesh, got {}", self.mesh));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("dt must be positive, got {dt}"));
            }
        }
        let positive = [("t_final", self.t_final), ("s_min", self.s_min), ("s_max", self.s_max), ("tol", self.tol)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.fit_start >= 0.0) {
            return bad(format!("fit_start must be non-negative, got {}", self.fit_start));
        }
        if self.s_min >= self.s_max {
            return bad(format!("need s_min < s_max, got {} ≥ {}", self.s_min, self.s_max));
        }
        if self.points < 2 {
            return bad(format!("points must be at least 2, got {}", self.points));
        }
        if self.sample_stride == 0 {
            return bad("sample_stride must be at least 1".into());
        }
        self.region.validate().map_err(|e| Error::Config(format!("region: {}", strip_prefix(&e))))
    }

    /// Scan abscissae per `spacing`.
    pub fn scan_grid(&self) -> Result<Vec<f64>> {
        match self.spacing {
            Spacing::Log => crate::analysis::log_grid(self.s_min, self.s_max, self.points),
            Spacing::Linear => {
                let step = (self.s_max - self.s_min) / (self.points - 1) as f64;
                Ok((0..self.points).map(|k| self.s_min + step * k as f64).collect())
            }
        }
    }

    /// The effective configuration as `key = value` lines.
    pub fn to_text(&self) -> String {
        let r = &self.region;
        let lines = [
            format!("system = {}", self.system),
            format!("mesh = {}", self.mesh),
            format!("dt = {}", self.dt.map_or("auto".to_string(), |d| format!("{d:?}"))),
            format!("t_final = {:?}", self.t_final),
            format!("profile = {}", self.profile),
            format!("sample_stride = {}", self.sample_stride),
            format!("snapshot_stride = {}", self.snapshot_stride),
            format!("s_min = {:?}", self.s_min),
            format!("s_max = {:?}", self.s_max),
            format!("points = {}", self.points),
            format!("spacing = {}", if self.spacing == Spacing::Log { "log" } else { "linear" }),
            format!("scan_mode = {}", if self.scan_mode == ScanMode::Pointwise { "pointwise" } else { "peak" }),
            format!("region = {:?},{:?},{:?},{:?}", r.re_min, r.re_max, r.im_min, r.im_max),
            format!("tol = {:?}", self.tol),
            format!("fit_start = {:?}", self.fit_start),
            format!("seed = {}", self.seed),
            format!("jobs = {}", self.jobs),
            format!("mutate_cofactor = {}", self.mutate_cofactor),
        ];
        let mut s = lines.join("\n");
        if let Some(t) = &self.trace {
            s.push_str(&format!("\ntrace = {}", t.display()));
        }
        s.push_str(&format!("\nout = {}\n", self.out.display()));
        s
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_values() {
        let c = RunConfig::from_text("# run\nmesh = 32\n\nsystem = half\nregion = -5,-0.01,-10,10\ndt = 0.01\n").unwrap();
        assert_eq!(c.mesh, 32);
        assert_eq!(c.system, SystemKind::Half);
        assert_eq!(c.region.im_max, 10.0);
        assert_eq!(c.effective_dt(), 0.01);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let e = RunConfig::from_text("mesh = 32\nmeshh = 64\n").unwrap_err();
        assert!(e.to_string().contains("meshh"), "{e}");
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn small_mesh_is_rejected() {
        assert!(matches!(RunConfig::from_text("mesh = 4"), Err(Error::Config(_))));
        assert!(RunConfig::from_text("mesh = 8").is_ok());
    }

    #[test]
    fn later_assignments_win() {
        let mut c = RunConfig::from_text("mesh = 32").unwrap();
        c.set("mesh", "128").unwrap();
        assert_eq!(c.mesh, 128);
    }

    #[test]
    fn custom_profile_keeps_its_equals_signs() {
        let c = RunConfig::from_text("profile = custom:u=sin(pi*x)^8").unwrap();
        assert!(matches!(c.profile, Profile::Custom { .. }));
    }

    #[test]
    fn effective_text_round_trips() {
        let mut c = RunConfig::from_text("mesh = 48\nprofile = rough_lift:0.4\nspacing = linear\nscan_mode = pointwise").unwrap();
        c.trace = Some("t.csv".into());
        let d = RunConfig::from_text(&c.to_text()).unwrap();
        assert_eq!(d.to_text(), c.to_text());
    }

    #[test]
    fn rejects_bad_ranges() {
        for text in ["s_min = 10\ns_max = 5", "points = 1", "dt = -1", "tol = 0", "system = half\nmesh = 9"] {
            assert!(RunConfig::from_text(text).is_err(), "{text}");
        }
    }

    #[test]
    fn linear_grid_hits_endpoints() {
        let c = RunConfig::from_text("s_min = 1\ns_max = 3\npoints = 3\nspacing = linear").unwrap();
        assert_eq!(c.scan_grid().unwrap(), vec![1.0, 2.0, 3.0]);
    }
}
