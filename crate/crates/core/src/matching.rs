//! Matching the interior solution to the outer standing wave
//! `ψ_out(x) = A e^{ikx} + A* e^{−ikx} = 2|A| cos(kx + arg A)`, valid for
//! x ≥ x_b. Continuity of ψ and ψ' at a single matching point fixes the two
//! real unknowns Re A and Im A.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{require, Error, Result};
use crate::integrator::{Parity, WaveSamples};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticAmplitude {
    pub k: f64,
    pub parity: Parity,
    pub re: f64,
    pub im: f64,
    /// |A|
    pub modulus: f64,
    /// arg A in (−π, π]
    pub phase: f64,
}

impl AsymptoticAmplitude {
    pub fn new(k: f64, parity: Parity, a: Complex64) -> Self {
        let mut phase = a.arg();
        if phase == -PI {
            phase = PI;
        }
        Self {
            k,
            parity,
            re: a.re,
            im: a.im,
            modulus: a.norm(),
            phase,
        }
    }

    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::new(self.k, self.parity, self.complex() * c)
    }

    /// Outer-form ψ at any |x| ≥ x_b, continued to negative x by parity.
    pub fn value(&self, x: f64) -> f64 {
        let v = 2.0 * (self.complex() * Complex64::cis(self.k * x.abs())).re;
        if x < 0.0 {
            self.parity.sign() * v
        } else {
            v
        }
    }

    /// Outer-form ψ' at any |x| ≥ x_b, continued to negative x by parity.
    pub fn derivative(&self, x: f64) -> f64 {
        let d = -2.0 * self.k * (self.complex() * Complex64::cis(self.k * x.abs())).im;
        if x < 0.0 {
            -self.parity.sign() * d
        } else {
            d
        }
    }
}

/// A from ψ(at), ψ'(at): `A = e^{−ik·at} (ψ − iψ'/k) / 2`.
pub fn extract_amplitude(samples: &WaveSamples, at: f64) -> Result<AsymptoticAmplitude> {
    let k = samples.k();
    require(k.is_finite() && k > 0.0, "k", format!("must be > 0, got {k}"))?;
    let edge = samples.edge();
    if !(at >= edge - 1e-9 * samples.step()) {
        return Err(Error::MatchingInsideSupport { at, edge });
    }
    let psi = samples.value_at(at)?;
    let dpsi = samples.derivative_at(at)?;
    Ok(amplitude_from(k, samples.parity(), at, psi, dpsi))
}

pub(crate) fn amplitude_from(k: f64, parity: Parity, at: f64, psi: f64, dpsi: f64) -> AsymptoticAmplitude {
    let a = Complex64::cis(-k * at) * Complex64::new(psi, -dpsi / k) * 0.5;
    AsymptoticAmplitude::new(k, parity, a)
}

/// arg A reduced modulo π to (−π/2, π/2]: the node shift of the outer cosine.
pub fn phase_shift(amplitude: &AsymptoticAmplitude) -> f64 {
    let r = amplitude.phase.rem_euclid(PI);
    if r > 0.5 * PI {
        r - PI
    } else {
        r
    }
}

/// Appends closed-form outer samples, on the same grid spacing, until the
/// samples reach at least `x_end`. The amplitude is taken at the support edge.
///
/// For a potential with empty support the spacing is chosen so that `x_end`
/// itself is a grid point.
pub fn extend_samples(samples: &WaveSamples, x_end: f64) -> Result<WaveSamples> {
    require(x_end.is_finite(), "x_end", "must be finite")?;
    let mut out = samples.clone();
    if x_end <= out.extent() {
        return Ok(out);
    }
    let amp = extract_amplitude(samples, samples.edge())?;
    if out.len() == 1 {
        let cells = (x_end / samples.config().step - 1e-9).ceil().max(1.0);
        out.restep(x_end / cells);
    }
    while out.extent() < x_end - 1e-9 * out.step() {
        let x = out.len() as f64 * out.step();
        out.push(amp.value(x), amp.derivative(x));
    }
    Ok(out)
}
