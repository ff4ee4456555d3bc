//! Continuum normalization of one-dimensional scattering states.
//!
//! Stationary states of a symmetric, finite-range potential are propagated
//! from the symmetry point, matched to the outer plane-wave form
//! `A e^{ikx} + A* e^{-ikx}`, and normalized so that
//! `∫ψ_k ψ_k' dx = δ(k − k')`. The overlap of two states over any interval
//! reduces to Wronskian boundary terms, which [`overlap`] implements next to
//! a quadrature cross-check.

pub mod cli;
pub mod error;
pub mod integrator;
pub mod matching;
pub mod normalization;
pub mod overlap;
pub mod potential;
pub mod quadrature;

pub use error::{Error, Result};
pub use integrator::{propagate, propagate_to, Method, Parity, SolverConfig, WaveSamples};
pub use matching::{extract_amplitude, phase_shift, AsymptoticAmplitude};


pub use potential::{Potential, PotentialKind};
pub use overlap::{overlap_equal_k, overlap_quadrature, overlap_wronskian, OverlapMethod, OverlapResult};
pub use normalization::{delta_strength, normalize, verify_completeness, verify_delta, DeltaReport, NormalizedState};
