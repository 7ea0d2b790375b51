//! Run configuration: a TOML document with one table per concern.
//!
//! ```toml
//! [run]
//! command = "mc"
//! target = "mean_mass"
//! seed = 7
//!
//! [model]
//! m = 2.0
//!
//! [noise]
//! horizon = 1.0
//! steps = 500
//! f = 1.0                       # or [[0.0, 1.0], [2.0, 0.0]]: (knot, value) pairs
//! g = 0.0
//! ```
//!
//! Unknown keys are rejected. Every other table is optional and falls back to
//! the defaults below.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use spme_core::{CoefficientPair, StepFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Exact,
    Path,
    Evolve,
    Transform,
    Mc,
    Asymptotics,
    Support,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Exact,
        Command::Path,
        Command::Evolve,
        Command::Transform,
        Command::Mc,
        Command::Asymptotics,
        Command::Support,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Exact => "exact",
            Command::Path => "path",
            Command::Evolve => "evolve",
            Command::Transform => "transform",
            Command::Mc => "mc",
            Command::Asymptotics => "asymptotics",
            Command::Support => "support",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub command: Command,
    /// Catalog entry for `exact` and `transform`, or the claim for `mc`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub m: f64,
    #[serde(default = "one")]
    pub d: usize,
}

fn one() -> usize {
    1
}

/// A coefficient given as a constant or as `(knot, value)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Constant(f64),
    Steps(Vec<[f64; 2]>),
}

impl Default for Coefficient {
    fn default() -> Self {
        Coefficient::Constant(0.0)
    }
}

impl Coefficient {
    pub fn to_step(&self, key: &str) -> Result<StepFunction, ConfigError> {
        match self {
            Coefficient::Constant(v) => Ok(StepFunction::constant(*v)),
            Coefficient::Steps(pairs) => {
                let (knots, values) = pairs.iter().map(|p| (p[0], p[1])).unzip();
                StepFunction::new(knots, values).map_err(|e| ConfigError::new(key, e.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub horizon: f64,
    pub steps: usize,
    #[serde(default)]
    pub f: Coefficient,
    #[serde(default)]
    pub g: Coefficient,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            horizon: 1.0,
            steps: 1000,
            f: Coefficient::default(),
            g: Coefficient::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridShape {
    Cartesian,
    Radial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    #[serde(default = "cartesian")]
    pub kind: GridShape,
    /// Left end for Cartesian grids; ignored for radial ones.
    #[serde(default = "minus_ten")]
    pub lo: f64,
    /// Right end, or the outer radius of a radial grid.
    #[serde(default = "ten")]
    pub hi: f64,
    #[serde(default = "two_hundred")]
    pub cells: usize,
}

fn cartesian() -> GridShape {
    GridShape::Cartesian
}
fn minus_ten() -> f64 {
    -10.0
}
fn ten() -> f64 {
    10.0
}
fn two_hundred() -> usize {
    200
}

impl Default for SpaceSection {
    fn default() -> Self {
        Self {
            kind: GridShape::Cartesian,
            lo: -10.0,
            hi: 10.0,
            cells: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "profile", rename_all = "snake_case")]
pub enum InitialSection {
    Box { half_width: f64, height: f64 },
    Barenblatt { b: f64, t0: f64 },
    Constant { value: f64 },
    /// Two-column `x,value` CSV with a header row.
    Csv { path: PathBuf },
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection::Box {
            half_width: 1.0,
            height: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactSection {
    #[serde(default = "one_f")]
    pub b: f64,
    /// Quadratic-pressure parameter.
    #[serde(default = "one_f")]
    pub q: f64,
    /// Time of the `exact` dump.
    #[serde(default = "one_f")]
    pub t: f64,
    /// Self-similar family: `(p/q²)^{1/(m−1)} U(p t + t0, q x)`.
    #[serde(default = "one_f")]
    pub scale_p: f64,
    #[serde(default = "one_f")]
    pub scale_q: f64,
    #[serde(default = "one_f")]
    pub t0: f64,
}

fn one_f() -> f64 {
    1.0
}

impl Default for ExactSection {
    fn default() -> Self {
        Self {
            b: 1.0,
            q: 1.0,
            t: 1.0,
            scale_p: 1.0,
            scale_q: 1.0,
            t0: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_safety")]
    pub safety: f64,
    /// End time of `evolve`.
    #[serde(default = "one_f")]
    pub end: f64,
    /// Evenly spaced snapshots written by `evolve`.
    #[serde(default = "ten_snapshots")]
    pub snapshots: usize,
    /// Snapshots kept in the tables behind the Monte Carlo commands.
    #[serde(default = "table_snapshots")]
    pub table_snapshots: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_dt: Option<f64>,
    /// Support threshold.
    #[serde(default)]
    pub threshold: f64,
}

fn default_safety() -> f64 {
    0.4
}
fn ten_snapshots() -> usize {
    10
}
fn table_snapshots() -> usize {
    400
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            safety: 0.4,
            end: 1.0,
            snapshots: 10,
            table_snapshots: 400,
            fixed_dt: None,
            threshold: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    /// One-dimensional points, or radii for radial bases.
    #[serde(default = "default_points")]
    pub points: Vec<f64>,
}

fn default_times() -> Vec<f64> {
    vec![0.5, 1.0]
}
fn default_points() -> Vec<f64> {
    vec![0.0]
}

impl Default for ProbeSection {
    fn default() -> Self {
        Self {
            times: default_times(),
            points: default_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    #[serde(default = "default_paths")]
    pub paths: usize,
    /// Probe time of `mean_mass` and `lp_bound`; defaults to the horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default = "two_f")]
    pub p: f64,
    #[serde(default = "two_hundred")]
    pub profile_paths: usize,
    #[serde(default)]
    pub test_center: f64,
    #[serde(default = "one_f")]
    pub test_half_width: f64,
    /// Refinement levels of the weak-form study.
    #[serde(default = "four")]
    pub levels: usize,
    /// Solver tolerance granted to the comparison and maximum checks.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Closed-form solution used by the weak-form study.
    #[serde(default = "linear_pressure")]
    pub base: String,
    /// The comparison check pits the initial data against this multiple of them.
    #[serde(default = "two_f")]
    pub upper_scale: f64,
}

fn linear_pressure() -> String {
    "linear_pressure".into()
}

fn default_paths() -> usize {
    1000
}
fn two_f() -> f64 {
    2.0
}
fn four() -> usize {
    4
}
fn default_tolerance() -> f64 {
    1e-9
}

impl Default for McSection {
    fn default() -> Self {
        Self {
            paths: 1000,
            t: None,
            p: 2.0,
            profile_paths: 200,
            test_center: 0.0,
            test_half_width: 1.0,
            levels: 4,
            tolerance: 1e-9,
            base: linear_pressure(),
            upper_scale: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub model: ModelSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub space: SpaceSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub exact: ExactSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub probes: ProbeSection,
    #[serde(default)]
    pub mc: McSection,
}

/// A configuration problem tied to one key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.key.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.key, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

pub const EXACT_TARGETS: [&str; 5] = ["barenblatt", "quadratic_pressure", "linear_pressure", "self_similar", "burgers"];
pub const MC_TARGETS: [&str; 6] = ["mean_mass", "lp_bound", "weak_form", "comparison", "maximum", "limit_profile"];

fn require(ok: bool, key: &str, message: impl Into<String>) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::new(key, message))
    }
}

/// Parses and validates a configuration. Syntax errors carry the line and key
/// reported by the TOML parser.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::new("", e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn coefficients(&self) -> Result<CoefficientPair, ConfigError> {
        Ok(CoefficientPair::new(self.noise.f.to_step("noise.f")?, self.noise.g.to_step("noise.g")?))
    }

    pub fn target(&self) -> Option<&str> {
        self.run.target.as_deref()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let m = self.model.m;
        require(m.is_finite() && m > 1.0, "model.m", format!("must satisfy m > 1, got {m}"))?;
        require(self.model.d >= 1, "model.d", "must satisfy d >= 1")?;
        require(
            self.noise.horizon.is_finite() && self.noise.horizon > 0.0,
            "noise.horizon",
            "must be positive",
        )?;
        require(self.noise.steps >= 1, "noise.steps", "must be at least 1")?;
        self.coefficients()?;

        require(self.space.cells >= 8, "space.cells", "must be at least 8")?;
        match self.space.kind {
            GridShape::Cartesian => {
                require(self.model.d == 1, "space.kind", "Cartesian grids are one-dimensional; use radial for d > 1")?;
                require(self.space.hi > self.space.lo, "space.hi", "must exceed space.lo")?;
            }
            GridShape::Radial => require(self.space.hi > 0.0, "space.hi", "outer radius must be positive")?,
        }

        match &self.initial {
            InitialSection::Box { half_width, height } => {
                require(*half_width > 0.0, "initial.half_width", "must be positive")?;
                require(*height >= 0.0, "initial.height", "must be non-negative")?;
            }
            InitialSection::Barenblatt { b, t0 } => {
                require(*b > 0.0, "initial.b", "must satisfy b > 0")?;
                require(*t0 > 0.0, "initial.t0", "must satisfy t0 > 0")?;
            }
            InitialSection::Constant { value } => require(*value >= 0.0, "initial.value", "must be non-negative")?,
            InitialSection::Csv { .. } => {}
        }

        let e = &self.exact;
        require(e.b > 0.0, "exact.b", "must satisfy b > 0")?;
        require(e.q > 0.0, "exact.q", "must satisfy q > 0")?;
        require(e.t > 0.0, "exact.t", "must be positive")?;
        require(e.scale_p > 0.0 && e.scale_q > 0.0, "exact.scale_p", "scales must be positive")?;
        require(e.t0 > 0.0, "exact.t0", "must satisfy t0 > 0")?;

        let s = &self.solver;
        require(s.safety > 0.0 && s.safety <= 1.0, "solver.safety", "must lie in (0, 1]")?;
        require(s.end > 0.0, "solver.end", "must be positive")?;
        require(s.snapshots >= 1, "solver.snapshots", "must be at least 1")?;
        require(s.table_snapshots >= 8, "solver.table_snapshots", "must be at least 8")?;
        if let Some(dt) = s.fixed_dt {
            require(dt > 0.0, "solver.fixed_dt", "must be positive")?;
        }
        require(s.threshold >= 0.0, "solver.threshold", "must be non-negative")?;

        let horizon = self.noise.horizon;
        for &t in &self.probes.times {
            require((0.0..=horizon).contains(&t), "probes.times", format!("{t} lies outside [0, {horizon}]"))?;
        }
        require(!self.probes.points.is_empty(), "probes.points", "must not be empty")?;

        let mc = &self.mc;
        require(mc.paths >= 2, "mc.paths", "must be at least 2")?;
        if let Some(t) = mc.t {
            require((0.0..=horizon).contains(&t), "mc.t", format!("{t} lies outside [0, {horizon}]"))?;
        }
        require(mc.p > 1.0, "mc.p", "must satisfy p > 1")?;
        require(mc.test_half_width > 0.0, "mc.test_half_width", "must be positive")?;
        require(mc.levels >= 2, "mc.levels", "must be at least 2")?;
        require(mc.tolerance >= 0.0, "mc.tolerance", "must be non-negative")?;
        require(
            EXACT_TARGETS[..4].contains(&mc.base.as_str()),
            "mc.base",
            format!("unknown solution `{}`", mc.base),
        )?;
        require(mc.upper_scale >= 1.0, "mc.upper_scale", "must be at least 1")?;

        match self.run.command {
            Command::Exact | Command::Transform => {
                let target = self.target().unwrap_or("barenblatt");
                let allowed = self.run.command == Command::Transform && target == "table";
                require(
                    allowed || EXACT_TARGETS.contains(&target),
                    "run.target",
                    format!("unknown solution `{target}`"),
                )?;
            }
            Command::Mc => {
                let target = self.target().unwrap_or("");
                require(MC_TARGETS.contains(&target), "run.target", format!("unknown claim `{target}`"))?;
            }
            Command::Support => require(m == 2.0, "model.m", "the support experiment needs m = 2")?,
            _ => {}
        }
        Ok(())
    }
}
