use rayon::prelude::*;

use super::config::{CompletenessBlock, DeltaBlock, RunConfig};
use crate::error::Error;
use crate::integrator::{propagate, Parity};
use crate::matching::{extract_amplitude, phase_shift};
use crate::normalization::{normalize, verify_completeness, verify_delta, DeltaReport, Probe};

/// One (k, parity) line of a sweep table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub k: f64,
    pub parity: Parity,
    pub a_re: f64,
    pub a_im: f64,
    pub a_abs: f64,
    pub a_arg: f64,
    pub phase_mod_pi: f64,
    pub norm_constant: f64,
    pub delta_strength: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub k: f64,
    pub parity: Parity,
    pub error: Error,
}

/// Outcome of one verification block.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub name: &'static str,
    pub tolerance: f64,
    pub result: Result<DeltaReport, Error>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        match &self.result {
            Ok(r) => error_vs_peak(r) <= self.tolerance,
            Err(_) => false,
        }
    }
}

/// `|measured − expected|` relative to the height of the smeared peak.
///
/// This equals `relative_error` for the δ(k − k') check and for on-diagonal
/// completeness probes; off the diagonal the expected value is essentially
/// zero, so the peak height is the meaningful scale.
pub fn error_vs_peak(report: &DeltaReport) -> f64 {
    let sigma = match report.probe {
        Probe::Delta { sigma, .. } => sigma,
        Probe::Completeness { sigma_x, .. } => sigma_x,
    };
    let peak = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    (report.measured - report.expected).abs() / peak
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<SweepFailure>,
    pub verifications: Vec<Verification>,
}

impl SweepOutcome {
    pub fn all_verifications_passed(&self) -> bool {
        self.verifications.iter().all(Verification::passed)
    }
}

pub fn sweep_row(config: &RunConfig, k: f64, parity: Parity) -> Result<SweepRow, Error> {
    let samples = propagate(&config.potential, k, parity, &config.solver)?;
    let amp = extract_amplitude(&samples, samples.edge())?;
    let state = normalize(&samples, &amp)?;
    Ok(SweepRow {
        k,
        parity,
        a_re: amp.re,
        a_im: amp.im,
        a_abs: amp.modulus,
        a_arg: amp.phase,
        phase_mod_pi: phase_shift(&amp),
        norm_constant: state.norm_constant,
        delta_strength: state.delta_strength,
    })
}

/// propagate → match → normalize for every k and selected parity, ordered
/// by k then parity. Failures at individual k are collected, not fatal.
pub fn sweep_rows(config: &RunConfig, ks: &[f64]) -> (Vec<SweepRow>, Vec<SweepFailure>) {
    let jobs: Vec<(f64, Parity)> = ks
        .iter()
        .flat_map(|&k| config.parity.parities().iter().map(move |&p| (k, p)))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(k, parity)| (k, parity, sweep_row(config, k, parity)))
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (k, parity, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(error) => failures.push(SweepFailure { k, parity, error }),
        }
    }
    (rows, failures)
}

pub fn run_delta(config: &RunConfig, block: &DeltaBlock) -> Verification {
    Verification {
        name: "delta",
        tolerance: block.tolerance,
        result: verify_delta(
            &config.potential,
            block.parity,
            block.k0,
            block.sigma,
            block.window,
            &config.solver,
        ),
    }
}

pub fn run_completeness(config: &RunConfig, block: &CompletenessBlock) -> Verification {
    Verification {
        name: "completeness",
        tolerance: block.tolerance,
        result: verify_completeness(
            &config.potential,
            block.x,
            block.y,
            block.k_max,
            block.sigma_x,
            &config.solver,
        ),
    }
}

/// Every verification block present in the configuration, delta first.
pub fn run_verifications(config: &RunConfig) -> Vec<Verification> {
    let mut out = Vec::new();
    if let Some(d) = &config.delta {
        out.push(run_delta(config, d));
    }
    if let Some(c) = &config.completeness {
        out.push(run_completeness(config, c));
    }
    out
}

/// Full sweep: the k-grid table (empty when the config has no k-grid) plus
/// every requested verification block.
pub fn run_sweep(config: &RunConfig) -> SweepOutcome {
    let ks = config.k_grid.map(|g| g.values()).unwrap_or_default();
    let (rows, failures) = sweep_rows(config, &ks);
    SweepOutcome {
        rows,
        failures,
        verifications: run_verifications(config),
    }
}
