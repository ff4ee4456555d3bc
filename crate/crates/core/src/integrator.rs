//! Propagation of the real stationary equation ψ'' = 2m(V(x) − E)ψ with
//! E = k²/(2m), from the symmetry point x = 0 outwards.
//!
//! Only x ≥ 0 is integrated. Values at negative x follow from parity,
//! ψ(−x) = ±ψ(x), so every [`WaveSamples`] answers queries on the whole
//! symmetric range `[-extent, extent]`.
//!
//! The default scheme is Numerov. An RK4 path on the first-order system
//! (ψ, ψ') is kept as an independent reference.

use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::potential::Potential;

/// Minimum number of cells across the interior region for an accepted run.
pub const MIN_CELLS: usize = 16;

/// Cells appended past x_b when a run continues into the outer region; the
/// one-sided derivative stencils need five points on each side of the edge.
const MIN_OUTER_CELLS: usize = 4;

const RK4_START_SUBSTEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// +1 for even, −1 for odd: ψ(−x) = sign · ψ(x).
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Numerov,
    Rk4Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub mass: f64,
    pub step: f64,
    #[serde(default)]
    pub method: Method,
}

impl SolverConfig {
    pub fn new(mass: f64, step: f64) -> Result<Self> {
        let c = Self {
            mass,
            step,
            method: Method::Numerov,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn validate(&self) -> Result<()> {
        require(
            self.mass.is_finite() && self.mass > 0.0,
            "mass",
            format!("must be finite and > 0, got {}", self.mass),
        )?;
        require(
            self.step.is_finite() && self.step > 0.0,
            "h",
            format!("must be finite and > 0, got {}", self.step),
        )
    }

    pub fn energy(&self, k: f64) -> f64 {
        k * k / (2.0 * self.mass)
    }
}

/// A real stationary solution tabulated on the uniform grid `x_i = i·step`,
/// `i = 0..=n`, with the support edge x_b at `edge_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSamples {
    k: f64,
    parity: Parity,
    config: SolverConfig,
    step: f64,
    edge: f64,
    edge_index: usize,
    xs: Vec<f64>,
    psi: Vec<f64>,
    dpsi: Vec<f64>,
}

impl WaveSamples {
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Grid spacing actually used (≤ the configured step).
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Support edge x_b.
    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn edge_index(&self) -> usize {
        self.edge_index
    }

    /// Largest tabulated |x|.
    pub fn extent(&self) -> f64 {
        *self.xs.last().expect("grid is never empty")
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn dpsi(&self) -> &[f64] {
        &self.dpsi
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Grid index of |x|.
    pub fn index_of(&self, x: f64) -> Result<usize> {
        let ax = x.abs();
        let tol = 1e-7 * self.step;
        if !ax.is_finite() || ax > self.extent() + tol {
            return Err(Error::OutOfRange {
                x,
                extent: self.extent(),
            });
        }
        let i = (ax / self.step).round() as usize;
        let i = i.min(self.xs.len() - 1);
        if (ax - self.xs[i]).abs() > tol {
            return Err(Error::OffGrid { x });
        }
        Ok(i)
    }

    /// ψ(x) for a grid point x (either sign).
    pub fn value_at(&self, x: f64) -> Result<f64> {
        let i = self.index_of(x)?;
        Ok(if x < 0.0 {
            self.parity.sign() * self.psi[i]
        } else {
            self.psi[i]
        })
    }

    /// ψ'(x) for a grid point x (either sign); ψ' has the opposite parity of ψ.
    pub fn derivative_at(&self, x: f64) -> Result<f64> {
        let i = self.index_of(x)?;
        Ok(if x < 0.0 {
            -self.parity.sign() * self.dpsi[i]
        } else {
            self.dpsi[i]
        })
    }

    /// The same state with ψ and ψ' multiplied by `c`.
    pub fn scaled(&self, c: f64) -> WaveSamples {
        let mut out = self.clone();
        out.psi.iter_mut().for_each(|v| *v *= c);
        out.dpsi.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// Appends one grid point past the current extent. Used when extending
    /// samples into the outer region by closed-form evaluation.
    pub(crate) fn push(&mut self, psi: f64, dpsi: f64) {
        let x = self.xs.len() as f64 * self.step;
        self.xs.push(x);
        self.psi.push(psi);
        self.dpsi.push(dpsi);
    }

    /// Changes the spacing of a single-point grid (empty support).
    pub(crate) fn restep(&mut self, step: f64) {
        debug_assert_eq!(self.xs.len(), 1);
        self.step = step;
    }

    pub(crate) fn same_grid(&self, other: &WaveSamples) -> bool {
        (self.step - other.step).abs() <= 1e-12 * self.step
    }
}

/// ψ'(x) at a grid point of `samples`.
pub fn derivative_at(samples: &WaveSamples, x: f64) -> Result<f64> {
    samples.derivative_at(x)
}

/// Propagates over the interior region `[0, x_b]`.
pub fn propagate(potential: &Potential, k: f64, parity: Parity, config: &SolverConfig) -> Result<WaveSamples> {
    propagate_with_scale(potential, k, parity, config, potential.support_edge(), 1.0)
}

/// Propagates over `[0, max(x_b, x_end)]`, stepping through the outer region
/// with the same integrator when `x_end > x_b`.
pub fn propagate_to(
    potential: &Potential,
    k: f64,
    parity: Parity,
    config: &SolverConfig,
    x_end: f64,
) -> Result<WaveSamples> {
    propagate_with_scale(potential, k, parity, config, x_end, 1.0)
}

/// As [`propagate_to`], with both initial conditions multiplied by `scale`.
/// Even: (ψ, ψ')(0) = (scale, 0). Odd: (0, scale·k).
pub fn propagate_with_scale(
    potential: &Potential,
    k: f64,
    parity: Parity,
    config: &SolverConfig,
    x_end: f64,
    scale: f64,
) -> Result<WaveSamples> {
    require(k.is_finite() && k > 0.0, "k", format!("must be finite and > 0, got {k}"))?;
    require(x_end.is_finite() && x_end >= 0.0, "x_end", format!("must be finite and >= 0, got {x_end}"))?;
    require(scale.is_finite() && scale != 0.0, "scale", "must be finite and nonzero")?;
    config.validate()?;
    potential.validate()?;

    let edge = potential.support_edge();
    let grid = Grid::build(edge, x_end.max(edge), config.step)?;
    let (psi0, dpsi0) = match parity {
        Parity::Even => (scale, 0.0),
        Parity::Odd => (0.0, scale * k),
    };

    let (psi, dpsi) = if grid.cells() == 0 {
        (vec![psi0], vec![dpsi0])
    } else {
        let coeff = Coefficients::new(potential, k, config.mass, &grid);
        match config.method {
            Method::Numerov => {
                let psi = numerov(&coeff, &grid, parity, psi0, dpsi0, k)?;
                let mut dpsi = stencil_derivatives(&psi, &grid, parity);
                dpsi[0] = dpsi0;
                (psi, dpsi)
            }
            Method::Rk4Reference => rk4(&coeff, &grid, psi0, dpsi0, k)?,
        }
    };

    let xs = (0..=grid.cells())
        .map(|i| if i == grid.edge_index { edge } else { i as f64 * grid.step })
        .collect();

    Ok(WaveSamples {
        k,
        parity,
        config: *config,
        step: grid.step,
        edge,
        edge_index: grid.edge_index,
        xs,
        psi,
        dpsi,
    })
}

#[derive(Debug, Clone, Copy)]
struct Grid {
    step: f64,
    edge_index: usize,
    end_index: usize,
}

impl Grid {
    fn build(edge: f64, end: f64, step: f64) -> Result<Self> {
        let count = |len: f64, h: f64| ((len / h) - 1e-9).ceil().max(0.0) as usize;
        if edge > 0.0 {
            let n = count(edge, step);
            if n < MIN_CELLS {
                return Err(Error::StepTooCoarse {
                    step,
                    extent: edge,
                    cells: n,
                    min: MIN_CELLS,
                });
            }
            let h = edge / n as f64;
            let outer = if end > edge {
                count(end - edge, h).max(MIN_OUTER_CELLS)
            } else {
                0
            };
            Ok(Self {
                step: h,
                edge_index: n,
                end_index: n + outer,
            })
        } else if end > 0.0 {
            let n = count(end, step);
            if n < MIN_CELLS {
                return Err(Error::StepTooCoarse {
                    step,
                    extent: end,
                    cells: n,
                    min: MIN_CELLS,
                });
            }
            Ok(Self {
                step: end / n as f64,
                edge_index: 0,
                end_index: n,
            })
        } else {
            Ok(Self {
                step,
                edge_index: 0,
                end_index: 0,
            })
        }
    }

    fn cells(&self) -> usize {
        self.end_index
    }

    fn x(&self, i: usize) -> f64 {
        i as f64 * self.step
    }
}

/// f(x) = 2m(V(x) − E) at the grid nodes. At the edge node a compact
/// potential jumps, so both one-sided limits are kept.
struct Coefficients {
    inside: Vec<f64>,
    outside: Vec<f64>,
    edge_index: usize,
    potential: Potential,
    two_m: f64,
    k2: f64,
}

impl Coefficients {
    fn new(potential: &Potential, k: f64, mass: f64, grid: &Grid) -> Self {
        let two_m = 2.0 * mass;
        let k2 = k * k;
        let f = |v: f64| two_m * v - k2;
        let inside = (0..=grid.cells()).map(|i| f(potential.evaluate_inside(grid.x(i)))).collect();
        let outside = (0..=grid.cells()).map(|i| f(potential.evaluate(grid.x(i)))).collect();
        Self {
            inside,
            outside,
            edge_index: grid.edge_index,
            potential: *potential,
            two_m,
            k2,
        }
    }

    /// f at node `j` as seen from a Numerov step centred on node `c`.
    fn seen_from(&self, j: usize, c: usize) -> f64 {
        if j != self.edge_index {
            return self.outside[j];
        }
        match c.cmp(&self.edge_index) {
            std::cmp::Ordering::Less => self.inside[j],
            std::cmp::Ordering::Greater => self.outside[j],
            std::cmp::Ordering::Equal => 0.5 * (self.inside[j] + self.outside[j]),
        }
    }

    /// f at an arbitrary position inside a step that lies on the given side of the edge.
    fn at(&self, x: f64, inside: bool) -> f64 {
        let v = if inside {
            self.potential.evaluate_inside(x)
        } else {
            self.potential.evaluate(x)
        };
        self.two_m * v - self.k2
    }
}

fn numerov(coeff: &Coefficients, grid: &Grid, parity: Parity, psi0: f64, dpsi0: f64, k: f64) -> Result<Vec<f64>> {
    let n = grid.cells();
    let h2 = grid.step * grid.step / 12.0;
    let mut psi = vec![0.0; n + 1];
    psi[0] = psi0;
    psi[1] = match parity {
        // Symmetric Numerov step about x = 0 with ψ(−h) = ψ(h).
        Parity::Even => {
            let f0 = coeff.seen_from(0, 0);
            let f1 = coeff.seen_from(1, 0);
            psi0 * (1.0 + 5.0 * h2 * f0) / (1.0 - h2 * f1)
        }
        // The odd step is undetermined by symmetry; seed it with fine RK4.
        Parity::Odd => {
            let inside = grid.edge_index >= 1;
            rk4_span(coeff, 0.0, grid.step, psi0, dpsi0, RK4_START_SUBSTEPS, inside).0
        }
    };
    if !psi[1].is_finite() {
        return Err(Error::NonFinite { k, x: grid.x(1) });
    }
    let e = grid.edge_index;
    for c in 1..n {
        if c == e {
            // ψ'' jumps at the edge of a compact potential, which costs the
            // plain three-term recurrence an O(h³) local error. Restart the
            // outer segment from (ψ, ψ') at the edge instead.
            let slope = BACKWARD.iter().zip(&psi[e - 4..=e]).map(|(w, v)| w * v).sum::<f64>() / (12.0 * grid.step);
            let next = rk4_span(coeff, grid.x(e), grid.x(e + 1), psi[e], slope, RK4_START_SUBSTEPS, false).0;
            if !next.is_finite() {
                return Err(Error::NonFinite { k, x: grid.x(e + 1) });
            }
            psi[e + 1] = next;
            continue;
        }
        let f_prev = coeff.seen_from(c - 1, c);
        let f_c = coeff.seen_from(c, c);
        let f_next = coeff.seen_from(c + 1, c);
        let next = (2.0 * psi[c] * (1.0 + 5.0 * h2 * f_c) - psi[c - 1] * (1.0 - h2 * f_prev)) / (1.0 - h2 * f_next);
        if !next.is_finite() {
            return Err(Error::NonFinite { k, x: grid.x(c + 1) });
        }
        psi[c + 1] = next;
    }
    Ok(psi)
}

fn rk4_span(coeff: &Coefficients, x0: f64, x1: f64, psi: f64, dpsi: f64, substeps: usize, inside: bool) -> (f64, f64) {
    let h = (x1 - x0) / substeps as f64;
    let (mut y, mut dy) = (psi, dpsi);
    for s in 0..substeps {
        let x = x0 + s as f64 * h;
        let fa = coeff.at(x, inside);
        let fm = coeff.at(x + 0.5 * h, inside);
        let fb = coeff.at(x + h, inside);
        let (k1y, k1d) = (dy, fa * y);
        let (k2y, k2d) = (dy + 0.5 * h * k1d, fm * (y + 0.5 * h * k1y));
        let (k3y, k3d) = (dy + 0.5 * h * k2d, fm * (y + 0.5 * h * k2y));
        let (k4y, k4d) = (dy + h * k3d, fb * (y + h * k3y));
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        dy += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    }
    (y, dy)
}

fn rk4(coeff: &Coefficients, grid: &Grid, psi0: f64, dpsi0: f64, k: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = grid.cells();
    let mut psi = Vec::with_capacity(n + 1);
    let mut dpsi = Vec::with_capacity(n + 1);
    psi.push(psi0);
    dpsi.push(dpsi0);
    let (mut y, mut dy) = (psi0, dpsi0);
    for i in 0..n {
        let inside = i < grid.edge_index;
        (y, dy) = rk4_span(coeff, grid.x(i), grid.x(i + 1), y, dy, 1, inside);
        if !(y.is_finite() && dy.is_finite()) {
            return Err(Error::NonFinite { k, x: grid.x(i + 1) });
        }
        psi.push(y);
        dpsi.push(dy);
    }
    Ok((psi, dpsi))
}

// Five-point first-derivative stencils, all O(h⁴). Index 0 of each array
// multiplies the leftmost point of the stencil.
const CENTRAL: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const FORWARD: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
const FORWARD_OFFSET: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
const BACKWARD_OFFSET: [f64; 5] = [-1.0, 6.0, -18.0, 10.0, 3.0];
const BACKWARD: [f64; 5] = [3.0, -16.0, 36.0, -48.0, 25.0];

/// ψ' on the grid from ψ alone. The interior segment `[0, x_b]` and the outer
/// segment `[x_b, end]` are differentiated separately because ψ'' jumps at
/// the edge of a compact potential; the interior segment uses mirrored values
/// ψ(−x) = ±ψ(x) across the symmetry point.
fn stencil_derivatives(psi: &[f64], grid: &Grid, parity: Parity) -> Vec<f64> {
    let mut out = vec![0.0; psi.len()];
    let last = psi.len() - 1;
    let e = grid.edge_index;
    if e == 0 {
        differentiate_segment(psi, 0, last, Some(parity.sign()), grid.step, &mut out);
    } else {
        differentiate_segment(psi, 0, e, Some(parity.sign()), grid.step, &mut out);
        if last > e {
            let mut tail = vec![0.0; psi.len()];
            differentiate_segment(psi, e, last, None, grid.step, &mut tail);
            // Keep the interior one-sided value at the edge itself.
            out[e + 1..].copy_from_slice(&tail[e + 1..]);
        }
    }
    out
}

fn differentiate_segment(psi: &[f64], lo: usize, hi: usize, mirror: Option<f64>, h: f64, out: &mut [f64]) {
    let get = |j: isize| -> f64 {
        if j < 0 {
            mirror.expect("mirror only used at the symmetry point") * psi[(-j) as usize]
        } else {
            psi[j as usize]
        }
    };
    let apply = |stencil: &[f64; 5], first: isize| -> f64 {
        stencil.iter().enumerate().map(|(m, c)| c * get(first + m as isize)).sum::<f64>() / (12.0 * h)
    };
    let lo_i = lo as isize;
    let hi_i = hi as isize;
    for i in lo..=hi {
        let i = i as isize;
        let left_ok = mirror.is_some() || i - 2 >= lo_i;
        out[i as usize] = if i + 2 <= hi_i && left_ok {
            apply(&CENTRAL, i - 2)
        } else if i + 2 > hi_i && i == hi_i - 1 {
            apply(&BACKWARD_OFFSET, i - 3)
        } else if i == hi_i {
            apply(&BACKWARD, i - 4)
        } else if i == lo_i {
            apply(&FORWARD, i)
        } else {
            apply(&FORWARD_OFFSET, i - 1)
        };
    }
}
