//! δ-normalization of continuum states.
//!
//! A state whose outer form is `A e^{ikx} + A* e^{−ikx}` satisfies
//! `∫ψ_k ψ_k' dx = 4π|A|² δ(k − k')` over the whole line, so dividing by
//! `2√π|A|` gives unit δ-strength. The two `verify_*` checks test this
//! numerically by smearing the distributions with narrow Gaussians.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{require, Error, Result};
use crate::integrator::{propagate, Parity, SolverConfig, WaveSamples};
use crate::matching::{extract_amplitude, AsymptoticAmplitude};
use crate::overlap::overlap_quadrature;
use crate::potential::Potential;
use crate::quadrature::{gauss_legendre_panels, simpson_fn, simpson_weights};

/// Smallest accepted `L·σ` for the δ(k − k') check.
pub const MIN_WINDOW_SIGMA: f64 = 5.0;
/// Smallest accepted `k_max·σ_x` for the completeness check.
pub const MIN_KMAX_SIGMA: f64 = 4.0;
/// Half-width of every Gaussian smearing window, in units of its σ.
pub const GAUSSIAN_CUTOFF: f64 = 6.0;
/// Minimum node count of the k' grid for the smeared packet.
pub const MIN_PACKET_NODES: usize = 121;

/// The coefficient of δ(k − k') in the whole-line overlap: 4π|A|².
pub fn delta_strength(amplitude: &AsymptoticAmplitude) -> f64 {
    4.0 * PI * amplitude.modulus * amplitude.modulus
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedState {
    /// Samples already multiplied by `norm_constant`.
    pub base: WaveSamples,
    /// Amplitude of the unnormalized state.
    pub amplitude: AsymptoticAmplitude,
    pub norm_constant: f64,
    /// δ-strength of the unnormalized state.
    pub delta_strength: f64,
}

impl NormalizedState {
    pub fn k(&self) -> f64 {
        self.base.k()
    }

    pub fn parity(&self) -> Parity {
        self.base.parity()
    }

    /// Outer-form amplitude after normalization; its modulus is 1/(2√π).
    pub fn normalized_amplitude(&self) -> AsymptoticAmplitude {
        self.amplitude.scaled(self.norm_constant)
    }

    /// ψ_norm(x): tabulated values on the grid, the outer form beyond the
    /// support edge. Off-grid points inside the support are an error.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        match self.base.value_at(x) {
            Ok(v) => Ok(v),
            Err(e) if x.abs() < self.base.edge() => Err(e),
            Err(_) => Ok(self.normalized_amplitude().value(x)),
        }
    }
}

/// Rescales the samples by `1/(2√π|A|)`.
pub fn normalize(samples: &WaveSamples, amplitude: &AsymptoticAmplitude) -> Result<NormalizedState> {
    if amplitude.k != samples.k() || amplitude.parity != samples.parity() {
        return Err(Error::AmplitudeMismatch {
            samples_k: samples.k(),
            amp_k: amplitude.k,
        });
    }
    if !(amplitude.modulus > 0.0 && amplitude.modulus.is_finite()) {
        return Err(Error::ZeroAmplitude);
    }
    let c = 1.0 / (2.0 * PI.sqrt() * amplitude.modulus);
    Ok(NormalizedState {
        base: samples.scaled(c),
        amplitude: *amplitude,
        norm_constant: c,
        delta_strength: delta_strength(amplitude),
    })
}

/// propagate → extract at the support edge → normalize.
pub fn normalized_state(potential: &Potential, k: f64, parity: Parity, config: &SolverConfig) -> Result<NormalizedState> {
    let samples = propagate(potential, k, parity, config)?;
    let amplitude = extract_amplitude(&samples, samples.edge())?;
    normalize(&samples, &amplitude)
}

/// Which smeared identity a [`DeltaReport`] checks, with every parameter
/// needed to rerun it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Probe {
    /// `∫ψ_k0 ψ_k' dx = δ(k0 − k')` smeared over k'.
    Delta {
        parity: Parity,
        k0: f64,
        sigma: f64,
        window: f64,
    },
    /// `Σ∫ψ_k(x) ψ_k(y) dk = δ(x − y)` smeared over y.
    Completeness {
        x: f64,
        y: f64,
        k_max: f64,
        sigma_x: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaReport {
    pub probe: Probe,
    pub measured: f64,
    pub expected: f64,
    pub relative_error: f64,
}

impl DeltaReport {
    fn new(probe: Probe, measured: f64, expected: f64) -> Self {
        Self {
            probe,
            measured,
            expected,
            relative_error: (measured - expected).abs() / expected.abs(),
        }
    }
}

fn gaussian(u: f64, sigma: f64) -> f64 {
    (-(u * u) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt())
}

/// Smeared δ(k − k') check.
///
/// Builds the packet `Φ(x) = ∫ g(k') ψ_norm,k'(x) dk'` from a unit-area
/// Gaussian g centred at k0 and measures `∫_{−L}^{L} ψ_norm,k0 Φ dx`, which
/// should equal g(k0). The x-integral is taken node by node (interior on the
/// integrator grid, outer region on the closed form) and the k'-sum runs in
/// node order, so the result does not depend on thread scheduling.
pub fn verify_delta(
    potential: &Potential,
    parity: Parity,
    k0: f64,
    sigma: f64,
    window: f64,
    config: &SolverConfig,
) -> Result<DeltaReport> {
    require(k0.is_finite() && k0 > 0.0, "k0", format!("must be > 0, got {k0}"))?;
    require(sigma.is_finite() && sigma > 0.0, "sigma", format!("must be > 0, got {sigma}"))?;
    require(window.is_finite() && window > 0.0, "L", format!("must be > 0, got {window}"))?;
    if window * sigma < MIN_WINDOW_SIGMA {
        return Err(Error::WindowTooSmall {
            product_name: "L*sigma",
            product: window * sigma,
            min: MIN_WINDOW_SIGMA,
        });
    }
    let k_lo = k0 - GAUSSIAN_CUTOFF * sigma;
    require(k_lo > 0.0, "sigma", format!("k0 - {GAUSSIAN_CUTOFF} sigma must stay > 0"))?;
    let edge = potential.support_edge();
    require(window > edge, "L", format!("must exceed the support edge {edge}"))?;

    // Sampling the k' integrand finely enough that the Dirichlet kernel of
    // width 1/L is not aliased.
    let aliasing = (1.5 * 2.0 * GAUSSIAN_CUTOFF * sigma * (window + 8.0 / sigma) / PI).ceil() as usize;
    let cells = (MIN_PACKET_NODES - 1).max(aliasing + aliasing % 2);
    let dk = 2.0 * GAUSSIAN_CUTOFF * sigma / cells as f64;
    let weights = simpson_weights(cells, dk);

    let probe = normalized_state(potential, k0, parity, config)?;
    let probe_outer = probe.normalized_amplitude();
    let outer_cells = ((window - edge) / config.step).ceil() as usize;

    let overlaps: Vec<f64> = (0..=cells)
        .into_par_iter()
        .map(|j| -> Result<f64> {
            let kp = k_lo + j as f64 * dk;
            let state = normalized_state(potential, kp, parity, config)?;
            let outer = state.normalized_amplitude();
            let interior = overlap_quadrature(&probe.base, &state.base, -edge, edge)?.value;
            let tail = simpson_fn(|x| probe_outer.value(x) * outer.value(x), edge, window, outer_cells);
            // Same parity: the product is even, so both tails are equal.
            Ok(interior + 2.0 * tail)
        })
        .collect::<Result<_>>()?;

    let measured = overlaps
        .iter()
        .zip(&weights)
        .enumerate()
        .map(|(j, (o, w))| w * gaussian(k_lo + j as f64 * dk - k0, sigma) * o)
        .sum::<f64>();
    let expected = gaussian(0.0, sigma);
    Ok(DeltaReport::new(
        Probe::Delta {
            parity,
            k0,
            sigma,
            window,
        },
        measured,
        expected,
    ))
}

/// Smeared completeness check for potentials without bound states:
/// `∫₀^{k_max} Σ_parity ψ_norm,k(x) ψ_norm,k(y') dk`, integrated against a
/// Gaussian of width σ_x in y' around y, should equal that Gaussian at x.
pub fn verify_completeness(
    potential: &Potential,
    x: f64,
    y: f64,
    k_max: f64,
    sigma_x: f64,
    config: &SolverConfig,
) -> Result<DeltaReport> {
    if potential.admits_bound_states() {
        return Err(Error::BoundStatesPossible(format!(
            "{} is attractive; completeness would need its bound states too",
            potential.kind_name()
        )));
    }
    require(x.is_finite(), "x", "must be finite")?;
    require(y.is_finite(), "y", "must be finite")?;
    require(k_max.is_finite() && k_max > 0.0, "k_max", format!("must be > 0, got {k_max}"))?;
    require(sigma_x.is_finite() && sigma_x > 0.0, "sigma_x", format!("must be > 0, got {sigma_x}"))?;
    if k_max * sigma_x < MIN_KMAX_SIGMA {
        return Err(Error::WindowTooSmall {
            product_name: "k_max*sigma_x",
            product: k_max * sigma_x,
            min: MIN_KMAX_SIGMA,
        });
    }

    // y' nodes sit on the integrator grid so interior values are tabulated.
    let edge = potential.support_edge();
    let step = propagate(potential, 1.0, Parity::Even, config)?.step();
    let half = GAUSSIAN_CUTOFF * sigma_x;
    let first = ((y - half) / step).floor() as i64;
    let mut last = ((y + half) / step).ceil() as i64;
    if (last - first) % 2 == 1 {
        last += 1;
    }
    let ys: Vec<f64> = (first..=last).map(|i| i as f64 * step).collect();
    let smear: Vec<f64> = simpson_weights(ys.len() - 1, step)
        .iter()
        .zip(&ys)
        .map(|(w, yi)| w * gaussian(yi - y, sigma_x))
        .collect();

    // Oscillation rate of the k-integrand bounds the panel width.
    let rate = x.abs() + y.abs() + half + 2.0 * edge + 1.0;
    let panels = (k_max * rate / 2.0).ceil() as usize;
    let nodes = gauss_legendre_panels(0.0, k_max, panels, 10);

    let terms: Vec<f64> = nodes
        .par_iter()
        .map(|&(k, w)| -> Result<f64> {
            let mut sum = 0.0;
            for parity in [Parity::Even, Parity::Odd] {
                let state = normalized_state(potential, k, parity, config)?;
                let at_x = state.value_at(x)?;
                let mut smeared = 0.0;
                for (yi, g) in ys.iter().zip(&smear) {
                    smeared += g * state.value_at(*yi)?;
                }
                sum += at_x * smeared;
            }
            Ok(w * sum)
        })
        .collect::<Result<_>>()?;

    let measured = terms.iter().sum::<f64>();
    let expected = gaussian(x - y, sigma_x);
    Ok(DeltaReport::new(
        Probe::Completeness { x, y, k_max, sigma_x },
        measured,
        expected,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> SolverConfig {
        SolverConfig::new(1.0, 1e-3).unwrap()
    }

    #[test]
    fn free_strength_is_pi() {
        let s = normalized_state(&Potential::free(), 1.7, Parity::Even, &cfg()).unwrap();
        assert_relative_eq!(s.delta_strength, PI, max_relative = 1e-15);
        assert_relative_eq!(s.norm_constant, 1.0 / PI.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn strength_is_quadratic_in_scale() {
        let a = AsymptoticAmplitude::new(1.0, Parity::Odd, num_complex::Complex64::new(0.2, 0.9));
        assert_relative_eq!(delta_strength(&a.scaled(3.0)), 9.0 * delta_strength(&a), max_relative = 1e-14);
    }

    #[test]
    fn square_well_constants() {
        let s = normalized_state(&Potential::square_well(1.0, 1.0).unwrap(), 1.0, Parity::Even, &cfg()).unwrap();
        let q = 3f64.sqrt();
        let a2 = (q.cos().powi(2) + q * q * q.sin().powi(2)) / 4.0;
        assert_relative_eq!(s.delta_strength, 4.0 * PI * a2, max_relative = 1e-10);
        assert_relative_eq!(s.delta_strength, 9.2629, epsilon = 1e-4);
        assert_relative_eq!(s.amplitude.modulus, 0.85855, epsilon = 1e-5);
        assert_relative_eq!(s.norm_constant, 0.32857, epsilon = 1e-5);
        assert_relative_eq!(s.norm_constant, 1.0 / (2.0 * PI.sqrt() * a2.sqrt()), max_relative = 1e-10);
        assert_relative_eq!(s.norm_constant * s.norm_constant * s.delta_strength, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn mismatched_amplitude_is_rejected() {
        let well = Potential::square_well(1.0, 1.0).unwrap();
        let a = propagate(&well, 1.0, Parity::Even, &cfg()).unwrap();
        let b = propagate(&well, 1.2, Parity::Even, &cfg()).unwrap();
        let amp_b = extract_amplitude(&b, 1.0).unwrap();
        assert!(matches!(normalize(&a, &amp_b), Err(Error::AmplitudeMismatch { .. })));
        let zero = AsymptoticAmplitude::new(1.0, Parity::Even, num_complex::Complex64::new(0.0, 0.0));
        assert!(matches!(normalize(&a, &zero), Err(Error::ZeroAmplitude)));
    }

    #[test]
    fn delta_window_guard() {
        let r = verify_delta(&Potential::free(), Parity::Even, 1.0, 0.05, 50.0, &cfg());
        assert!(matches!(r, Err(Error::WindowTooSmall { .. })));
    }

    #[test]
    fn completeness_rejects_wells() {
        let well = Potential::square_well(1.0, 1.0).unwrap();
        let r = verify_completeness(&well, 0.7, 0.7, 60.0, 0.1, &cfg());
        assert!(matches!(r, Err(Error::BoundStatesPossible(_))));
    }

    #[test]
    fn completeness_window_guard() {
        let r = verify_completeness(&Potential::free(), 0.7, 0.7, 20.0, 0.1, &cfg());
        assert!(matches!(r, Err(Error::WindowTooSmall { .. })));
    }
}
