use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::discretize::max_driver_bound;
use crate::error::{invalid, Error, Result};
use crate::halfplane::{ContourSettings, DiscreteMeasure};
use crate::loewner::{DriverFormula, DrivingFunction, HerglotzField, SolverSettings};

/// Driving function as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriverSpec {
    Constant { value: f64 },
    Piecewise { breakpoints: Vec<f64>, values: Vec<f64> },
    /// Samples on a uniform grid over `[0, horizon]`.
    Sampled { values: Vec<f64> },
    Linear { intercept: f64, slope: f64 },
    CosineShift { offset: f64, amplitude: f64, frequency: f64 },
    SqrtRamp { scale: f64 },
}

impl DriverSpec {
    pub fn build(&self, horizon: f64) -> Result<DrivingFunction<f64>> {
        Ok(match self {
            DriverSpec::Constant { value } => DrivingFunction::Constant(*value),
            DriverSpec::Piecewise { breakpoints, values } => {
                DrivingFunction::piecewise(breakpoints.clone(), values.clone())?
            }
            DriverSpec::Sampled { values } => DrivingFunction::sampled(horizon, values.clone())?,
            DriverSpec::Linear { intercept, slope } => DrivingFunction::Formula(DriverFormula::Linear {
                intercept: *intercept,
                slope: *slope,
            }),
            DriverSpec::CosineShift { offset, amplitude, frequency } => {
                DrivingFunction::Formula(DriverFormula::CosineShift {
                    offset: *offset,
                    amplitude: *amplitude,
                    frequency: *frequency,
                })
            }
            DriverSpec::SqrtRamp { scale } => {
                DrivingFunction::Formula(DriverFormula::SqrtRamp { scale: *scale })
            }
        })
    }
}

/// Herglotz field: either one measure for all times (`atoms`) or one measure
/// per piece `(b_{i-1}, b_i]` (`breakpoints` + `measures`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Constant { atoms: Vec<(f64, f64)> },
    Piecewise { breakpoints: Vec<f64>, measures: Vec<Vec<(f64, f64)>> },
}

impl FieldSpec {
    pub fn build(&self, horizon: f64, bound: f64) -> Result<HerglotzField<f64>> {
        match self {
            FieldSpec::Constant { atoms } => {
                HerglotzField::constant(DiscreteMeasure::new(atoms.clone())?, horizon, bound)
            }
            FieldSpec::Piecewise { breakpoints, measures } => {
                let measures = measures
                    .iter()
                    .map(|m| DiscreteMeasure::new(m.clone()))
                    .collect::<Result<Vec<_>>>()?;
                HerglotzField::new(breakpoints.clone(), measures, bound)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKeyword {
    /// Every grid time `kT/n`, `k = 1 … n`, of each resolution.
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeSelection {
    List(Vec<f64>),
    Keyword(GridKeyword),
}

impl TimeSelection {
    pub fn for_resolution(&self, horizon: f64, n: usize) -> Vec<f64> {
        match self {
            TimeSelection::List(ts) => ts.clone(),
            TimeSelection::Keyword(GridKeyword::Grid) => {
                (1..=n).map(|k| horizon * k as f64 / n as f64).collect()
            }
        }
    }
}

/// Number of cells used at resolution `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellRule {
    /// `n` cells.
    Resolution,
    /// `⌊√n⌋` cells.
    Sqrt,
    /// `⌈n/2⌉` cells.
    Half,
    Fixed(usize),
}

impl CellRule {
    pub fn cells(&self, n: usize) -> usize {
        let m = match *self {
            CellRule::Resolution => n,
            CellRule::Sqrt => (n as f64).sqrt().floor() as usize,
            CellRule::Half => n.div_ceil(2),
            CellRule::Fixed(m) => m,
        };
        m.max(1)
    }
}

/// How a Herglotz field is turned into a single driver at resolution `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Refinement {
    /// Spatial bins of `[0, M]`.
    #[serde(default = "default_space")]
    pub space: CellRule,
    /// Time intervals of `[0, T]` on which the bin weights are frozen.
    #[serde(default = "default_time")]
    pub time: CellRule,
    /// Use each bin's centre of mass instead of its midpoint.
    #[serde(default = "default_true")]
    pub barycenter: bool,
}

fn default_space() -> CellRule {
    CellRule::Resolution
}

fn default_time() -> CellRule {
    CellRule::Sqrt
}

fn default_true() -> bool {
    true
}

impl Default for Refinement {
    fn default() -> Self {
        Self { space: default_space(), time: default_time(), barycenter: true }
    }
}

/// Numerical controls. All have defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub solver_abs: f64,
    pub solver_max_steps: usize,
    pub contour_points: usize,
    pub contour_stability: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { solver_abs: 1e-10, solver_max_steps: 1_000_000, contour_points: 1024, contour_stability: 1e-8 }
    }
}

impl Tolerances {
    pub fn solver(&self) -> SolverSettings<f64> {
        SolverSettings { abs_tol: self.solver_abs, max_steps: self.solver_max_steps, ..SolverSettings::default() }
    }

    pub fn contour(&self) -> ContourSettings<f64> {
        ContourSettings {
            points: self.contour_points,
            stability_tol: self.contour_stability,
            ..ContourSettings::default()
        }
    }
}

/// How the per-time errors must behave along the resolution ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    None,
    /// Error at the largest `n` strictly below the error at the smallest.
    #[default]
    Endpoints,
    /// Strictly decreasing from each `n` to the next.
    Strict,
}

/// Assertions applied to a finished report. `None` disables a check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Checks {
    pub mean_tol: Option<f64>,
    pub variance_tol: Option<f64>,
    pub nonnegative_tol: Option<f64>,
    pub trend: Trend,
    /// Highest order entering the trend check (all orders when absent).
    pub trend_max_order: Option<usize>,
    /// Errors at or below this level count as converged in the trend check.
    pub trend_floor: f64,
    /// Bound on every absolute error.
    pub max_error: Option<f64>,
}

impl Default for Checks {
    fn default() -> Self {
        Self {
            mean_tol: Some(1e-10),
            variance_tol: Some(1e-10),
            nonnegative_tol: Some(1e-9),
            trend: Trend::Endpoints,
            trend_max_order: None,
            trend_floor: 1e-12,
            max_error: None,
        }
    }
}

/// Where reference moments of `μ_t` come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceSource {
    /// Numerical Loewner flow plus contour moments.
    #[default]
    Flow,
    /// `√((z−u)² − 2t) + u`, available for constant drivers only.
    ClosedForm,
}

/// Pipeline configuration, read from a JSON document.
///
/// ```json
/// {
///   "driver": { "kind": "constant", "value": 1.0 },
///   "horizon": 1.0,
///   "resolutions": [8, 16, 32, 64],
///   "times": [0.25, 0.5, 1.0],
///   "moments": 6
/// }
/// ```
///
/// A `field` replaces `driver` for the Herglotz pipeline; `bound` is `M`
/// (defaults to the driver supremum, or the largest atom of the field).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub driver: Option<DriverSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    pub horizon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub resolutions: Vec<usize>,
    pub times: TimeSelection,
    pub moments: usize,
    #[serde(default)]
    pub reference: ReferenceSource,
    #[serde(default)]
    pub refinement: Refinement,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn for_driver(driver: DriverSpec, horizon: f64, resolutions: Vec<usize>, times: Vec<f64>, moments: usize) -> Self {
        Self {
            driver: Some(driver),
            field: None,
            horizon,
            bound: None,
            resolutions,
            times: TimeSelection::List(times),
            moments,
            reference: ReferenceSource::default(),
            refinement: Refinement::default(),
            tolerances: Tolerances::default(),
            checks: Checks::default(),
            output: None,
        }
    }

    pub fn for_field(field: FieldSpec, horizon: f64, bound: f64, resolutions: Vec<usize>, times: Vec<f64>, moments: usize) -> Self {
        Self { driver: None, field: Some(field), bound: Some(bound), ..Self::for_driver(DriverSpec::Constant { value: 0.0 }, horizon, resolutions, times, moments) }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn driver(&self) -> Result<DrivingFunction<f64>> {
        self.driver
            .as_ref()
            .ok_or_else(|| invalid("config has no driver"))?
            .build(self.horizon)
    }

    pub fn field(&self) -> Result<HerglotzField<f64>> {
        let spec = self.field.as_ref().ok_or_else(|| invalid("config has no field"))?;
        let bound = match (self.bound, spec) {
            (Some(m), _) => m,
            (None, FieldSpec::Constant { atoms }) => atoms.iter().map(|a| a.0).fold(0.0, f64::max),
            (None, FieldSpec::Piecewise { measures, .. }) => {
                measures.iter().flatten().map(|a| a.0).fold(0.0, f64::max)
            }
        };
        spec.build(self.horizon, bound)
    }

    /// Shape checks that do not depend on the driver.
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0) {
            return Err(invalid("horizon must be positive"));
        }
        if self.moments < 2 {
            return Err(invalid("moment order must be at least 2"));
        }
        if self.resolutions.is_empty() || self.resolutions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("resolutions must be non-empty and strictly increasing"));
        }
        if self.resolutions[0] == 0 {
            return Err(invalid("resolutions must be positive"));
        }
        if let TimeSelection::List(ts) = &self.times {
            if ts.is_empty() || ts.iter().any(|&t| !(0.0..=self.horizon).contains(&t)) {
                return Err(invalid(format!("times must be non-empty and lie in [0, {}]", self.horizon)));
            }
        }
        Ok(())
    }

    /// Feasibility of every resolution for driver bound `m`.
    pub fn check_feasible(&self, m: f64) -> Result<()> {
        for &n in &self.resolutions {
            let max = max_driver_bound(self.horizon, n);
            if m > max {
                return Err(Error::InfeasibleResolution { n, bound: m, max });
            }
        }
        Ok(())
    }
}
