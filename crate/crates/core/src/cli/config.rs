//! Run configuration: a single TOML document per run.
//!
//! ```toml
//! mass = 1.0
//! parity = "both"            # even | odd | both (default both)
//!
//! [potential]
//! kind = "square-well"       # free | square-well | square-barrier | gaussian
//! V0 = 1.0
//! a = 1.0                    # half-width (square kinds); gaussian takes w
//! epsilon_v = 1e-12          # optional
//!
//! [k_grid]
//! min = 0.5
//! max = 5.0
//! count = 10
//! spacing = "linear"         # optional
//!
//! [solver]                   # optional
//! h = 1e-3
//! method = "numerov"         # numerov | rk4-reference
//!
//! [verify.delta]             # optional
//! k0 = 1.0
//! sigma = 0.05
//! L = 200.0
//!
//! [verify.completeness]      # optional
//! x = 0.7
//! y = 0.7
//! k_max = 60.0
//! sigma_x = 0.1
//!
//! [output]                   # optional; command-line flags take precedence
//! path = "sweep.csv"
//! format = "csv"
//! ```
//!
//! Units: ħ = 1, so E = k²/(2m) and V0 is in the same energy units.

use std::fmt;
use std::path::PathBuf;

use serde::Deserialize;

use crate::error::Error;
use crate::integrator::{Method, Parity, SolverConfig};
use crate::potential::{Potential, PotentialKind, DEFAULT_EPSILON_V};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_DELTA_TOLERANCE: f64 = 0.02;
pub const DEFAULT_COMPLETENESS_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("config error")?;
        if let Some(line) = self.line {
            write!(f, " at line {line}")?;
        }
        if let Some(field) = &self.field {
            write!(f, ", field `{field}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParitySelection {
    Even,
    Odd,
    Both,
}

impl ParitySelection {
    pub fn parities(self) -> &'static [Parity] {
        match self {
            ParitySelection::Even => &[Parity::Even],
            ParitySelection::Odd => &[Parity::Odd],
            ParitySelection::Both => &[Parity::Even, Parity::Odd],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl KGrid {
    pub fn values(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Linear => {
                if self.count == 1 {
                    return vec![self.min];
                }
                let dk = (self.max - self.min) / (self.count - 1) as f64;
                (0..self.count).map(|i| self.min + i as f64 * dk).collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outputs {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaBlock {
    pub parity: Parity,
    pub k0: f64,
    pub sigma: f64,
    pub window: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletenessBlock {
    pub x: f64,
    pub y: f64,
    pub k_max: f64,
    pub sigma_x: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub potential: Potential,
    pub parity: ParitySelection,
    pub k_grid: Option<KGrid>,
    pub solver: SolverConfig,
    pub outputs: Outputs,
    pub delta: Option<DeltaBlock>,
    pub completeness: Option<CompletenessBlock>,
}

impl RunConfig {
    pub fn mass(&self) -> f64 {
        self.solver.mass
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mass: f64,
    parity: Option<ParitySelection>,
    potential: RawPotential,
    k_grid: Option<RawKGrid>,
    solver: Option<RawSolver>,
    verify: Option<RawVerify>,
    output: Option<RawOutput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    kind: String,
    #[serde(rename = "V0")]
    v0: Option<f64>,
    a: Option<f64>,
    w: Option<f64>,
    epsilon_v: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKGrid {
    min: f64,
    max: f64,
    count: i64,
    #[serde(default)]
    spacing: Spacing,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    h: Option<f64>,
    method: Option<Method>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVerify {
    delta: Option<RawDelta>,
    completeness: Option<RawCompleteness>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDelta {
    k0: f64,
    sigma: f64,
    #[serde(rename = "L")]
    window: f64,
    parity: Option<Parity>,
    tolerance: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCompleteness {
    x: f64,
    y: f64,
    k_max: f64,
    sigma_x: f64,
    tolerance: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    format: Option<Format>,
}

/// Parses and validates a run configuration, applying defaults
/// (h = 1e-3, ε_V = 1e-12, parity = both).
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of_offset(text, s.start));
        ConfigError {
            field: None,
            line,
            message: e.message().to_string(),
        }
    })?;
    let v = Validator { text };

    let potential = v.potential(&raw.potential)?;

    v.check(raw.mass.is_finite() && raw.mass > 0.0, "", "mass", format!("must be > 0 (got {})", raw.mass))?;
    let step = raw.solver.as_ref().and_then(|s| s.h).unwrap_or(DEFAULT_STEP);
    v.check(step.is_finite() && step > 0.0, "solver", "h", format!("must be > 0 (got {step})"))?;
    let method = raw.solver.as_ref().and_then(|s| s.method).unwrap_or_default();
    let solver = SolverConfig {
        mass: raw.mass,
        step,
        method,
    };

    let k_grid = match raw.k_grid {
        None => None,
        Some(g) => {
            v.check(g.min.is_finite() && g.min > 0.0, "k_grid", "min", format!("must be > 0 (got {})", g.min))?;
            v.check(g.max.is_finite() && g.max >= g.min, "k_grid", "max", format!("must be >= min (got {})", g.max))?;
            v.check(g.count >= 1, "k_grid", "count", format!("must be >= 1 (got {})", g.count))?;
            Some(KGrid {
                min: g.min,
                max: g.max,
                count: g.count as usize,
                spacing: g.spacing,
            })
        }
    };

    let (delta, completeness) = match raw.verify {
        None => (None, None),
        Some(block) => (
            block.delta.map(|d| v.delta(d)).transpose()?,
            block.completeness.map(|c| v.completeness(c)).transpose()?,
        ),
    };

    let outputs = raw
        .output
        .map(|o| Outputs {
            path: o.path,
            format: o.format,
        })
        .unwrap_or_default();

    Ok(RunConfig {
        potential,
        parity: raw.parity.unwrap_or(ParitySelection::Both),
        k_grid,
        solver,
        outputs,
        delta,
        completeness,
    })
}

struct Validator<'a> {
    text: &'a str,
}

impl Validator<'_> {
    fn error(&self, table: &str, key: &str, message: String) -> ConfigError {
        let field = if table.is_empty() {
            key.to_string()
        } else {
            format!("{table}.{key}")
        };
        ConfigError {
            line: locate_key(self.text, table, key),
            field: Some(field),
            message,
        }
    }

    fn check(&self, ok: bool, table: &str, key: &str, message: String) -> Result<(), ConfigError> {
        if ok {
            Ok(())
        } else {
            Err(self.error(table, key, message))
        }
    }

    fn potential(&self, raw: &RawPotential) -> Result<Potential, ConfigError> {
        let need = |value: Option<f64>, key: &str| {
            value.ok_or_else(|| {
                self.error(
                    "potential",
                    key,
                    format!("missing required parameter for kind `{}`", raw.kind),
                )
            })
        };
        let kind = match raw.kind.as_str() {
            "free" => PotentialKind::Free,
            "square-well" => PotentialKind::SquareWell {
                depth: need(raw.v0, "V0")?,
                a: need(raw.a, "a")?,
            },
            "square-barrier" => PotentialKind::SquareBarrier {
                height: need(raw.v0, "V0")?,
                a: need(raw.a, "a")?,
            },
            "gaussian" => PotentialKind::Gaussian {
                strength: need(raw.v0, "V0")?,
                w: need(raw.w, "w")?,
            },
            other => {
                return Err(self.error(
                    "potential",
                    "kind",
                    format!("unknown kind `{other}` (expected free, square-well, square-barrier or gaussian)"),
                ))
            }
        };
        Potential::new(kind, raw.epsilon_v.unwrap_or(DEFAULT_EPSILON_V)).map_err(|e| match e {
            Error::InvalidParameter { name, reason } => self.error("potential", name, reason),
            other => self.error("potential", "kind", other.to_string()),
        })
    }

    fn delta(&self, d: RawDelta) -> Result<DeltaBlock, ConfigError> {
        let t = "verify.delta";
        self.check(d.k0.is_finite() && d.k0 > 0.0, t, "k0", format!("must be > 0 (got {})", d.k0))?;
        self.check(d.sigma.is_finite() && d.sigma > 0.0, t, "sigma", format!("must be > 0 (got {})", d.sigma))?;
        self.check(d.window.is_finite() && d.window > 0.0, t, "L", format!("must be > 0 (got {})", d.window))?;
        let tolerance = d.tolerance.unwrap_or(DEFAULT_DELTA_TOLERANCE);
        self.check(tolerance > 0.0, t, "tolerance", format!("must be > 0 (got {tolerance})"))?;
        Ok(DeltaBlock {
            parity: d.parity.unwrap_or(Parity::Even),
            k0: d.k0,
            sigma: d.sigma,
            window: d.window,
            tolerance,
        })
    }

    fn completeness(&self, c: RawCompleteness) -> Result<CompletenessBlock, ConfigError> {
        let t = "verify.completeness";
        self.check(c.x.is_finite(), t, "x", "must be finite".into())?;
        self.check(c.y.is_finite(), t, "y", "must be finite".into())?;
        self.check(c.k_max.is_finite() && c.k_max > 0.0, t, "k_max", format!("must be > 0 (got {})", c.k_max))?;
        self.check(
            c.sigma_x.is_finite() && c.sigma_x > 0.0,
            t,
            "sigma_x",
            format!("must be > 0 (got {})", c.sigma_x),
        )?;
        let tolerance = c.tolerance.unwrap_or(DEFAULT_COMPLETENESS_TOLERANCE);
        self.check(tolerance > 0.0, t, "tolerance", format!("must be > 0 (got {tolerance})"))?;
        Ok(CompletenessBlock {
            x: c.x,
            y: c.y,
            k_max: c.k_max,
            sigma_x: c.sigma_x,
            tolerance,
        })
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// 1-based line of `key = ...` inside `[table]` (or the root table when empty).
fn locate_key(text: &str, table: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (n, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(header) = trimmed.strip_prefix('[') {
            current = header.trim_end_matches(']').trim().to_string();
            continue;
        }
        if current == table {
            if let Some((lhs, _)) = trimmed.split_once('=') {
                if lhs.trim().trim_matches('"') == key {
                    return Some(n + 1);
                }
            }
        }
    }
    None
}
