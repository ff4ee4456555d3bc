//! Real, symmetric, finite-range potential models.
//!
//! Units follow ħ = 1: energies are in the same units as k²/(2m) and lengths
//! in inverse wavenumber units. A potential is plain data so it can live in a
//! run configuration; the integrator only ever asks for `V(x)` and the
//! effective support edge `x_b`.

use serde::{Deserialize, Serialize};

use crate::error::{require, Result};

/// Default truncation level for non-compact tails.
pub const DEFAULT_EPSILON_V: f64 = 1e-12;

fn default_epsilon_v() -> f64 {
    DEFAULT_EPSILON_V
}

/// The model family together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialKind {
    /// V(x) = 0 everywhere.
    Free,
    /// V(x) = -V0 for |x| < a.
    SquareWell {
        #[serde(rename = "V0")]
        depth: f64,
        a: f64,
    },
    /// V(x) = +V0 for |x| < a.
    SquareBarrier {
        #[serde(rename = "V0")]
        height: f64,
        a: f64,
    },
    /// V(x) = V0 exp(-x² / (2 w²)); V0 may have either sign.
    Gaussian {
        #[serde(rename = "V0")]
        strength: f64,
        w: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    #[serde(flatten)]
    pub kind: PotentialKind,
    /// Tail truncation level ε_V; only consulted for non-compact kinds.
    #[serde(default = "default_epsilon_v")]
    pub epsilon_v: f64,
}

impl Potential {
    pub fn new(kind: PotentialKind, epsilon_v: f64) -> Result<Self> {
        let p = Self { kind, epsilon_v };
        p.validate()?;
        Ok(p)
    }

    pub fn free() -> Self {
        Self {
            kind: PotentialKind::Free,
            epsilon_v: DEFAULT_EPSILON_V,
        }
    }

    pub fn square_well(depth: f64, a: f64) -> Result<Self> {
        Self::new(PotentialKind::SquareWell { depth, a }, DEFAULT_EPSILON_V)
    }

    pub fn square_barrier(height: f64, a: f64) -> Result<Self> {
        Self::new(PotentialKind::SquareBarrier { height, a }, DEFAULT_EPSILON_V)
    }

    pub fn gaussian(strength: f64, w: f64, epsilon_v: f64) -> Result<Self> {
        Self::new(PotentialKind::Gaussian { strength, w }, epsilon_v)
    }

    pub fn validate(&self) -> Result<()> {
        require(
            self.epsilon_v.is_finite() && self.epsilon_v > 0.0,
            "epsilon_v",
            format!("must be finite and > 0, got {}", self.epsilon_v),
        )?;
        match self.kind {
            PotentialKind::Free => Ok(()),
            PotentialKind::SquareWell { depth: v0, a } | PotentialKind::SquareBarrier { height: v0, a } => {
                require(v0.is_finite() && v0 >= 0.0, "V0", format!("must be finite and >= 0, got {v0}"))?;
                require(a.is_finite() && a > 0.0, "a", format!("must be finite and > 0, got {a}"))
            }
            PotentialKind::Gaussian { strength, w } => {
                require(strength.is_finite(), "V0", format!("must be finite, got {strength}"))?;
                require(w.is_finite() && w > 0.0, "w", format!("must be finite and > 0, got {w}"))
            }
        }
    }

    /// V(x). Compact kinds are open at the edge: `evaluate(±a) == 0`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let x = x.abs();
        match self.kind {
            PotentialKind::Free => 0.0,
            PotentialKind::SquareWell { depth, a } => {
                if x < a {
                    -depth
                } else {
                    0.0
                }
            }
            PotentialKind::SquareBarrier { height, a } => {
                if x < a {
                    height
                } else {
                    0.0
                }
            }
            PotentialKind::Gaussian { strength, w } => strength * (-(x * x) / (2.0 * w * w)).exp(),
        }
    }

    /// V(x) with compact kinds closed at the edge, i.e. the limit taken from
    /// inside the support. The integrator uses this on [0, x_b] so the interior
    /// solution stays smooth up to and including the last grid point.
    pub fn evaluate_inside(&self, x: f64) -> f64 {
        let x = x.abs();
        match self.kind {
            PotentialKind::SquareWell { depth, a } if x <= a => -depth,
            PotentialKind::SquareBarrier { height, a } if x <= a => height,
            _ => self.evaluate(x),
        }
    }

    /// Right edge `x_b` of the effective support; the support is `[-x_b, x_b]`.
    pub fn support_edge(&self) -> f64 {
        match self.kind {
            PotentialKind::Free => 0.0,
            PotentialKind::SquareWell { a, .. } | PotentialKind::SquareBarrier { a, .. } => a,
            PotentialKind::Gaussian { strength, w } => {
                let ratio = strength.abs() / self.epsilon_v;
                if ratio <= 1.0 {
                    0.0
                } else {
                    w * (2.0 * ratio.ln()).sqrt()
                }
            }
        }
    }

    /// Effective support `[x_a, x_b]` with `x_a = -x_b`.
    pub fn support(&self) -> (f64, f64) {
        let xb = self.support_edge();
        (-xb, xb)
    }

    /// Whether the potential can bind a state. In one dimension any net
    /// attraction does, so this is true for wells and negative gaussians.
    pub fn admits_bound_states(&self) -> bool {
        match self.kind {
            PotentialKind::Free | PotentialKind::SquareBarrier { .. } => false,
            PotentialKind::SquareWell { depth, .. } => depth > 0.0,
            PotentialKind::Gaussian { strength, .. } => strength < 0.0,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            PotentialKind::Free => "free",
            PotentialKind::SquareWell { .. } => "square-well",
            PotentialKind::SquareBarrier { .. } => "square-barrier",
            PotentialKind::Gaussian { .. } => "gaussian",
        }
    }
}
