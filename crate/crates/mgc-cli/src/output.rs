//! Canonical JSON result shapes. Rationals as reduced strings, floats rounded
//! to 12 significant digits so outputs are byte-stable across runs.

use serde::Serialize;

use crate::docs::{field_to_doc, subset_to_doc, ArcDoc, FieldDoc, RatDoc};
use mgc_core::cheeger::{CheegerResult, CutPattern};
use mgc_core::duality::{CheegerCertificate, Eigenpair};
use mgc_core::spectral::{InequalityReport, SpectralResult};

/// Rounds to 12 significant digits; serde then prints the shortest form.
pub fn sig12(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap()
}

#[derive(Debug, Serialize)]
pub struct PatternEntryOut {
    pub edge: String,
    pub from: RatDoc,
    pub to: RatDoc,
    pub tag: &'static str,
}

pub fn pattern_out(p: &CutPattern) -> Vec<PatternEntryOut> {
    p.segments
        .iter()
        .zip(&p.tags)
        .map(|(s, t)| PatternEntryOut {
            edge: s.edge.clone(),
            from: RatDoc(s.start.clone()),
            to: RatDoc(s.end.clone()),
            tag: t.name(),
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct LowerBoundOut {
    pub bound: RatDoc,
    pub ok: bool,
}

#[derive(Debug, Serialize)]
pub struct CertificateOut {
    pub primal: RatDoc,
    pub dual: RatDoc,
    pub gap: RatDoc,
    pub field: FieldDoc,
}

pub fn certificate_out(c: &CheegerCertificate) -> CertificateOut {
    CertificateOut {
        primal: RatDoc(c.primal_value.clone()),
        dual: RatDoc(c.dual_value.clone()),
        gap: RatDoc(c.gap.clone()),
        field: field_to_doc(&c.dual_field),
    }
}

#[derive(Debug, Serialize)]
pub struct CheegerOut {
    pub problem: &'static str,
    pub value: RatDoc,
    pub witness: Vec<ArcDoc>,
    pub pattern: Vec<PatternEntryOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound_check: Option<LowerBoundOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateOut>,
}

pub fn cheeger_out(
    problem: &'static str,
    r: &CheegerResult,
    lower_bound: Option<LowerBoundOut>,
    certificate: Option<CertificateOut>,
) -> CheegerOut {
    CheegerOut {
        problem,
        value: RatDoc(r.value.clone()),
        witness: subset_to_doc(&r.witness),
        pattern: pattern_out(&r.pattern),
        lower_bound_check: lower_bound,
        certificate,
    }
}

#[derive(Debug, Serialize)]
pub struct EigenOut {
    pub accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<RatDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<crate::docs::FunctionDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<FieldDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_integral: Option<RatDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_median: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

pub fn eigen_accepted_out(p: &Eigenpair) -> EigenOut {
    EigenOut {
        accepted: true,
        lambda: Some(RatDoc(p.lambda.clone())),
        xi: Some(crate::docs::function_to_doc(&p.xi)),
        z: Some(field_to_doc(&p.z)),
        xi_integral: Some(RatDoc(p.xi_integral.clone())),
        zero_median: Some(p.zero_median),
        reason: None,
    }
}

pub fn eigen_rejected_out(reason: String) -> EigenOut {
    EigenOut {
        accepted: false,
        lambda: None,
        xi: None,
        z: None,
        xi_integral: None,
        zero_median: None,
        reason: Some(reason),
    }
}

#[derive(Debug, Serialize)]
pub struct GapOut {
    pub method: &'static str,
    pub k: f64,
    pub eigenvalue: f64,
    pub residual: f64,
    pub multiplicity: usize,
    pub detail: String,
}

pub fn gap_out(r: &SpectralResult) -> GapOut {
    GapOut {
        method: r.method.name(),
        k: sig12(r.k),
        eigenvalue: sig12(r.eigenvalue),
        residual: sig12(r.residual),
        multiplicity: r.multiplicity,
        detail: r.detail.clone(),
    }
}

#[derive(Debug, Serialize)]
pub struct InequalityOut {
    pub h: RatDoc,
    pub h2_over_4: f64,
    pub gap: f64,
    pub method: &'static str,
    pub residual: f64,
    pub slack: f64,
    pub ok: bool,
    pub cross_check: f64,
}

pub fn inequality_out(r: &InequalityReport) -> InequalityOut {
    InequalityOut {
        h: RatDoc(r.h.clone()),
        h2_over_4: sig12(r.h2_over_4),
        gap: sig12(r.gap),
        method: r.method.name(),
        residual: sig12(r.residual),
        slack: sig12(r.slack),
        ok: r.ok,
        cross_check: sig12(r.cross_check),
    }
}

pub fn print_json<T: Serialize>(value: &T) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    // Tolerate closed pipes (e.g. piping into head).
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(value).unwrap());
}
