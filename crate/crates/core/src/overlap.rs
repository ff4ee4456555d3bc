//! Overlap integrals `I = ∫_{x1}^{x2} ψ_k ψ_k' dx` of two stationary states.
//!
//! For k ≠ k' the integral reduces to boundary terms of the Wronskian,
//!
//! ```text
//! I = [ψ'_k'(x) ψ_k(x) − ψ'_k(x) ψ_k'(x)] / (k² − k'²)  evaluated from x1 to x2,
//! ```
//!
//! which is exact for any two solutions at the same mass and potential.
//! Composite Simpson quadrature on the shared grid is the independent check,
//! and also serves the degenerate case k = k' where the boundary form is 0/0.

use crate::error::{require, Error, Result};
use crate::integrator::WaveSamples;
use crate::matching::extract_amplitude;
use crate::quadrature::simpson_uniform;

/// Relative separation below which `k` and `k'` count as degenerate.
pub const DEGENERACY_RELATIVE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapMethod {
    Wronskian,
    Quadrature,
    EqualKLimit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapResult {
    pub value: f64,
    pub k: f64,
    pub kprime: f64,
    pub interval: (f64, f64),
    pub method: OverlapMethod,
}

pub fn degeneracy_threshold(k: f64, kprime: f64) -> f64 {
    DEGENERACY_RELATIVE * k.max(kprime)
}

/// (ψ, ψ') at x: grid values where tabulated, otherwise the outer form when
/// |x| is at or beyond the support edge.
pub fn state_at(s: &WaveSamples, x: f64) -> Result<(f64, f64)> {
    match (s.value_at(x), s.derivative_at(x)) {
        (Ok(v), Ok(d)) => Ok((v, d)),
        (Err(e), _) | (_, Err(e)) => {
            if x.abs() >= s.edge() {
                let amp = extract_amplitude(s, s.edge())?;
                Ok((amp.value(x), amp.derivative(x)))
            } else {
                Err(e)
            }
        }
    }
}

/// W(x) = ψ_a ψ'_b − ψ'_a ψ_b.
pub fn wronskian(a: &WaveSamples, b: &WaveSamples, x: f64) -> Result<f64> {
    let (pa, da) = state_at(a, x)?;
    let (pb, db) = state_at(b, x)?;
    Ok(pa * db - da * pb)
}

fn check_interval(x1: f64, x2: f64) -> Result<()> {
    require(x1.is_finite(), "x1", "must be finite")?;
    require(x2.is_finite(), "x2", "must be finite")
}

/// Overlap from the Wronskian boundary terms. `a` carries k, `b` carries k'.
pub fn overlap_wronskian(a: &WaveSamples, b: &WaveSamples, x1: f64, x2: f64) -> Result<OverlapResult> {
    check_interval(x1, x2)?;
    let (k, kp) = (a.k(), b.k());
    let threshold = degeneracy_threshold(k, kp);
    if !((k - kp).abs() >= threshold) {
        return Err(Error::DegenerateK { k, kprime: kp, threshold });
    }
    let value = (wronskian(a, b, x2)? - wronskian(a, b, x1)?) / ((k - kp) * (k + kp));
    if !value.is_finite() {
        return Err(Error::NonFinite { k, x: x2 });
    }
    Ok(OverlapResult {
        value,
        k,
        kprime: kp,
        interval: (x1, x2),
        method: OverlapMethod::Wronskian,
    })
}

/// Overlap by composite Simpson quadrature on the common grid. Both interval
/// ends must be grid points of both samples.
pub fn overlap_quadrature(a: &WaveSamples, b: &WaveSamples, x1: f64, x2: f64) -> Result<OverlapResult> {
    let value = quadrature(a, b, x1, x2)?;
    Ok(OverlapResult {
        value,
        k: a.k(),
        kprime: b.k(),
        interval: (x1, x2),
        method: OverlapMethod::Quadrature,
    })
}

/// `∫ψ_k²` over the interval, the k' → k limit of the overlap.
pub fn overlap_equal_k(a: &WaveSamples, x1: f64, x2: f64) -> Result<OverlapResult> {
    let value = quadrature(a, a, x1, x2)?;
    Ok(OverlapResult {
        value,
        k: a.k(),
        kprime: a.k(),
        interval: (x1, x2),
        method: OverlapMethod::EqualKLimit,
    })
}

fn quadrature(a: &WaveSamples, b: &WaveSamples, x1: f64, x2: f64) -> Result<f64> {
    check_interval(x1, x2)?;
    if !a.same_grid(b) {
        return Err(Error::IncompatibleGrids {
            step_a: a.step(),
            step_b: b.step(),
        });
    }
    if x1 > x2 {
        return quadrature(a, b, x2, x1).map(|v| -v);
    }
    // Every endpoint must sit on both grids.
    for x in [x1, x2] {
        let ia = a.index_of(x)?;
        let ib = b.index_of(x)?;
        debug_assert_eq!(ia, ib);
    }
    let fold_sign = a.parity().sign() * b.parity().sign();
    let mut total = 0.0;
    if x1 < 0.0 {
        // [x1, min(x2, 0)] folds onto [max(-x2, 0), -x1].
        let lo = if x2 < 0.0 { -x2 } else { 0.0 };
        total += fold_sign * positive_piece(a, b, a.index_of(lo)?, a.index_of(x1)?);
    }
    if x2 > 0.0 {
        let lo = if x1 > 0.0 { x1 } else { 0.0 };
        total += positive_piece(a, b, a.index_of(lo)?, a.index_of(x2)?);
    }
    Ok(total)
}

/// ∫ ψ_a ψ_b over grid indices [lo, hi] on x ≥ 0, split at the support edge
/// where the integrand's second derivative may jump.
fn positive_piece(a: &WaveSamples, b: &WaveSamples, lo: usize, hi: usize) -> f64 {
    let product = |r: std::ops::RangeInclusive<usize>| -> Vec<f64> {
        r.map(|i| a.psi()[i] * b.psi()[i]).collect()
    };
    let e = a.edge_index();
    let h = a.step();
    if lo < e && e < hi {
        simpson_uniform(&product(lo..=e), h) + simpson_uniform(&product(e..=hi), h)
    } else {
        simpson_uniform(&product(lo..=hi), h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{propagate, Parity, SolverConfig};
    use crate::matching::extend_samples;
    use crate::potential::Potential;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn free(k: f64, parity: Parity, x_end: f64) -> WaveSamples {
        let cfg = SolverConfig::new(1.0, 1e-3).unwrap();
        let s = propagate(&Potential::free(), k, parity, &cfg).unwrap();
        extend_samples(&s, x_end).unwrap()
    }

    // ∫₀¹ cos x cos 2x dx = sin(1)/2 + sin(3)/6, from the product-to-sum identity.
    fn cos_cos_closed_form() -> f64 {
        1f64.sin() / 2.0 + 3f64.sin() / 6.0
    }

    #[test]
    fn cosines_orthogonal_on_zero_to_pi() {
        let a = free(1.0, Parity::Even, PI);
        let b = free(2.0, Parity::Even, PI);
        let w = overlap_wronskian(&a, &b, 0.0, PI).unwrap();
        assert!(w.value.abs() < 1e-14, "{}", w.value);
        let q = overlap_quadrature(&a, &b, 0.0, PI).unwrap();
        assert!(q.value.abs() < 1e-12, "{}", q.value);
    }

    #[test]
    fn cosines_on_unit_interval() {
        let expected = cos_cos_closed_form();
        assert_relative_eq!(expected, 0.444255, epsilon = 1e-6);
        let a = free(1.0, Parity::Even, 1.0);
        let b = free(2.0, Parity::Even, 1.0);
        let w = overlap_wronskian(&a, &b, 0.0, 1.0).unwrap();
        assert_relative_eq!(w.value, expected, max_relative = 1e-14);
        assert_eq!(w.method, OverlapMethod::Wronskian);
        let q = overlap_quadrature(&a, &b, 0.0, 1.0).unwrap();
        assert_relative_eq!(q.value, expected, max_relative = 1e-11);
    }

    #[test]
    fn equal_k_half_interval() {
        for parity in [Parity::Even, Parity::Odd] {
            let a = free(1.0, parity, 2.0 * PI);
            let r = overlap_equal_k(&a, 0.0, 2.0 * PI).unwrap();
            assert_relative_eq!(r.value, PI, max_relative = 1e-11);
            assert_eq!(r.method, OverlapMethod::EqualKLimit);
        }
    }

    #[test]
    fn self_overlap_is_positive() {
        let well = Potential::square_well(1.0, 1.0).unwrap();
        let cfg = SolverConfig::new(1.0, 1e-3).unwrap();
        let s = propagate(&well, 0.8, Parity::Odd, &cfg).unwrap();
        assert!(overlap_quadrature(&s, &s, -0.3, 0.9).unwrap().value > 0.0);
    }

    #[test]
    fn square_well_wronskian_matches_quadrature() {
        let well = Potential::square_well(1.0, 1.0).unwrap();
        let cfg = SolverConfig::new(1.0, 1e-3).unwrap();
        let a = propagate(&well, 1.0, Parity::Even, &cfg).unwrap();
        let b = propagate(&well, 1.3, Parity::Even, &cfg).unwrap();
        let w = overlap_wronskian(&a, &b, -1.0, 1.0).unwrap().value;
        let q = overlap_quadrature(&a, &b, -1.0, 1.0).unwrap().value;
        assert!((w - q).abs() <= 1e-6 * q.abs(), "{w} vs {q}");
    }

    #[test]
    fn degenerate_k_is_refused() {
        let a = free(1.0, Parity::Even, 1.0);
        let b = free(1.0 + 1e-7, Parity::Even, 1.0);
        assert!(matches!(
            overlap_wronskian(&a, &b, 0.0, 1.0),
            Err(Error::DegenerateK { .. })
        ));
        assert!(overlap_equal_k(&a, 0.0, 1.0).unwrap().value.is_finite());
    }

    #[test]
    fn grids_must_agree() {
        let cfg = SolverConfig::new(1.0, 1e-3).unwrap();
        let well = Potential::square_well(1.0, 1.0).unwrap();
        let a = propagate(&well, 1.0, Parity::Even, &cfg).unwrap();
        let b = propagate(&well, 1.3, Parity::Even, &cfg.with_step(5e-4)).unwrap();
        assert!(matches!(
            overlap_quadrature(&a, &b, 0.0, 1.0),
            Err(Error::IncompatibleGrids { .. })
        ));
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let a = free(1.0, Parity::Even, 1.0);
        let b = free(2.0, Parity::Odd, 1.0);
        let f = overlap_quadrature(&a, &b, 0.2, 0.9).unwrap().value;
        let r = overlap_quadrature(&a, &b, 0.9, 0.2).unwrap().value;
        assert_eq!(f, -r);
    }
}
