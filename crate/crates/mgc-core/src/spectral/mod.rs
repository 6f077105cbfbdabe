//! Spectral gap of the standard Kirchhoff Laplacian and the Cheeger
//! inequality check. The secular solver is primary; the finite-element
//! solver is the independent cross-check. This module is the only float
//! arithmetic in the crate.

use alloc::string::String;
use core::fmt;

use crate::cheeger::{cheeger_cut, CheegerError, CheegerOptions};
use crate::graph::MetricGraph;
use crate::rational::{rat_to_f64, Rat};

pub mod fem;
pub mod linalg;
pub mod secular;

pub use fem::{assemble, fem_gap, GraphMatrix};
pub use secular::{default_scan_step, secular_gap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpectralError {
    NoRootInRange,
    ScanTooCoarse,
    MeshTooCoarse,
    SolverStalled,
    Cheeger(CheegerError),
}

impl fmt::Display for SpectralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralError::NoRootInRange => write!(f, "no eigenvalue found in the scan range"),
            SpectralError::ScanTooCoarse => {
                write!(f, "two roots within one scan step; decrease the step")
            }
            SpectralError::MeshTooCoarse => write!(f, "need at least 2 cells per edge"),
            SpectralError::SolverStalled => write!(f, "eigenvalue iteration failed to converge"),
            SpectralError::Cheeger(e) => write!(f, "cheeger: {e}"),
        }
    }
}

impl core::error::Error for SpectralError {}

impl From<CheegerError> for SpectralError {
    fn from(e: CheegerError) -> Self {
        SpectralError::Cheeger(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralMethod {
    Secular,
    Fem,
}

impl SpectralMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SpectralMethod::Secular => "secular",
            SpectralMethod::Fem => "fem",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub k: f64,
    pub eigenvalue: f64,
    /// Smallest singular value at the root (secular) or the eigen-residual
    /// norm (fem).
    pub residual: f64,
    pub multiplicity: usize,
    pub method: SpectralMethod,
    pub detail: String,
}

/// Secular gap with the scan range bracketed by a coarse finite-element
/// estimate, so no k_max guess is needed.
pub fn gap_auto(graph: &MetricGraph, tol: f64) -> Result<SpectralResult, SpectralError> {
    let estimate = fem_gap(graph, 64)?.eigenvalue;
    let k_max = 1.25 * libm::sqrt(estimate) + default_scan_step(graph);
    secular_gap(graph, k_max, default_scan_step(graph), tol)
}

#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub h: Rat,
    pub h2_over_4: f64,
    pub gap: f64,
    pub method: SpectralMethod,
    pub residual: f64,
    pub slack: f64,
    pub ok: bool,
    /// Relative disagreement between the secular and fem gap values.
    pub cross_check: f64,
}

/// Checks h^2/4 <= gap + tol with h exact from the enumeration solver, the
/// gap from the secular solver, and the fem value as a cross-check.
pub fn cheeger_inequality_check(
    graph: &MetricGraph,
    opts: &CheegerOptions,
    tol: f64,
) -> Result<InequalityReport, SpectralError> {
    let h = cheeger_cut(graph, opts)?.value;
    let secular = gap_auto(graph, 1e-8)?;
    let fem = fem_gap(graph, 256)?;
    let cross_check =
        (secular.eigenvalue - fem.eigenvalue).abs() / secular.eigenvalue.max(f64::MIN_POSITIVE);
    let hf = rat_to_f64(&h);
    let h2_over_4 = hf * hf / 4.0;
    let slack = secular.eigenvalue - h2_over_4;
    Ok(InequalityReport {
        h,
        h2_over_4,
        gap: secular.eigenvalue,
        method: SpectralMethod::Secular,
        residual: secular.residual,
        slack,
        ok: h2_over_4 <= secular.eigenvalue + tol,
        cross_check,
    })
}
