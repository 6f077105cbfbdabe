//! Spectral gap by secular-equation root location: per edge the eigenfunction
//! ansatz is a trigonometric pair, vertex continuity and current conservation
//! couple the coefficients, and eigenvalues are the k where the matching
//! matrix drops rank. Roots are located as dips of the smallest singular
//! value, which stays informative at double eigenvalues where the determinant
//! does not change sign.

use alloc::vec::Vec;
use libm::{cos, sin};

use super::{SpectralError, SpectralMethod, SpectralResult};
use crate::graph::{EdgeEnd, MetricGraph};
use crate::rational::rat_to_f64;
use crate::spectral::linalg::singular_values;

/// Matching matrix M(k): one column pair (cos, sin coefficients) per edge;
/// per vertex, degree-1 continuity rows and one current row scaled by 1/k.
fn matching_matrix(graph: &MetricGraph, lengths: &[f64], k: f64) -> Vec<Vec<f64>> {
    let m = graph.edges().len();
    let edge_pos: alloc::collections::BTreeMap<&str, usize> = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id.as_str(), i))
        .collect();

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(2 * m);
    for v in graph.vertices() {
        let incident = graph.incident(v).unwrap();
        // Value and scaled outward-derivative coefficients of (alpha, beta)
        // at this end.
        let coeffs = |eid: &str, end: EdgeEnd| -> ([f64; 2], [f64; 2]) {
            let idx = edge_pos[eid];
            let l = lengths[idx];
            match end {
                EdgeEnd::Tail => ([1.0, 0.0], [0.0, -1.0]),
                EdgeEnd::Head => {
                    let (c, s) = (cos(k * l), sin(k * l));
                    ([c, s], [-s, c])
                }
            }
        };
        let (first_edge, first_end) = &incident[0];
        let (first_val, _) = coeffs(first_edge, *first_end);
        for (eid, end) in incident.iter().skip(1) {
            let (val, _) = coeffs(eid, *end);
            let mut row = alloc::vec![0.0; 2 * m];
            let i = edge_pos[eid.as_str()];
            let j = edge_pos[first_edge.as_str()];
            row[2 * i] += val[0];
            row[2 * i + 1] += val[1];
            row[2 * j] -= first_val[0];
            row[2 * j + 1] -= first_val[1];
            rows.push(row);
        }
        let mut current = alloc::vec![0.0; 2 * m];
        for (eid, end) in incident {
            let (_, der) = coeffs(eid, *end);
            let i = edge_pos[eid.as_str()];
            current[2 * i] += der[0];
            current[2 * i + 1] += der[1];
        }
        rows.push(current);
    }
    rows
}

fn smallest_singular(graph: &MetricGraph, lengths: &[f64], k: f64) -> f64 {
    singular_values(&matching_matrix(graph, lengths, k))[0]
}

/// Golden-section refinement of a V-shaped dip inside [lo, hi].
fn refine_dip(
    graph: &MetricGraph,
    lengths: &[f64],
    mut lo: f64,
    mut hi: f64,
) -> (f64, f64) {
    let phi = 0.618_033_988_749_894_9;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = smallest_singular(graph, lengths, x1);
    let mut f2 = smallest_singular(graph, lengths, x2);
    while (hi - lo) > 1e-13 * (1.0 + hi) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = smallest_singular(graph, lengths, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = smallest_singular(graph, lengths, x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, smallest_singular(graph, lengths, mid))
}

/// Smallest k in (eps, k_max] where the matching matrix is singular; the
/// constant mode at k = 0 is skipped by starting the scan at
/// eps = 1e-6 / ell(Gamma). `tol` is the acceptance threshold on the
/// smallest singular value after refinement.
pub fn secular_gap(
    graph: &MetricGraph,
    k_max: f64,
    scan_step: f64,
    tol: f64,
) -> Result<SpectralResult, SpectralError> {
    let lengths: Vec<f64> = graph.edges().iter().map(|e| rat_to_f64(&e.length)).collect();
    let total: f64 = lengths.iter().sum();
    let eps = 1e-6 / total;
    if !(scan_step > 0.0) || k_max <= eps {
        return Err(SpectralError::NoRootInRange);
    }

    let n_steps = ((k_max - eps) / scan_step) as usize + 2;
    let mut ks: Vec<f64> = Vec::with_capacity(n_steps);
    let mut vals: Vec<f64> = Vec::with_capacity(n_steps);
    let mut k = eps;
    while k <= k_max {
        ks.push(k);
        vals.push(smallest_singular(graph, lengths.as_slice(), k));
        k += scan_step;
    }

    let mut found: Option<(f64, f64)> = None;
    for i in 1..vals.len().saturating_sub(1) {
        if vals[i] < vals[i - 1] && vals[i] <= vals[i + 1] {
            let (k_hat, s_hat) = refine_dip(graph, &lengths, ks[i - 1], ks[i + 1]);
            if s_hat <= tol {
                match found {
                    None => found = Some((k_hat, s_hat)),
                    Some((k_first, _)) => {
                        if k_hat - k_first < scan_step && k_hat - k_first > 10.0 * 1e-13 * k_hat {
                            return Err(SpectralError::ScanTooCoarse);
                        }
                        break;
                    }
                }
            }
        } else if found.is_some() && ks[i] > found.unwrap().0 + 2.0 * scan_step {
            break;
        }
    }

    let (k_hat, residual) = found.ok_or(SpectralError::NoRootInRange)?;
    let sv = singular_values(&matching_matrix(graph, &lengths, k_hat));
    let multiplicity = sv.iter().take_while(|s| **s < 1e-6).count().max(1);
    Ok(SpectralResult {
        k: k_hat,
        eigenvalue: k_hat * k_hat,
        residual,
        multiplicity,
        method: SpectralMethod::Secular,
        detail: alloc::format!("scan_step={scan_step:e} k_max={k_max:e} tol={tol:e}"),
    })
}

/// Conservative default scan step: a small fraction of the mean spectral
/// spacing pi / ell(Gamma).
pub fn default_scan_step(graph: &MetricGraph) -> f64 {
    core::f64::consts::PI / (64.0 * rat_to_f64(graph.total_length()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{equilateral_tripod, one_edge};
    use core::f64::consts::PI;

    #[test]
    fn single_edge_neumann_gap() {
        let g = one_edge(1);
        let res = secular_gap(&g, 2.0 * PI, default_scan_step(&g), 1e-8).unwrap();
        assert!((res.eigenvalue - PI * PI).abs() / (PI * PI) < 1e-9);
        assert_eq!(res.multiplicity, 1);
        assert!(res.residual <= 1e-8);
    }

    #[test]
    fn equilateral_star_gap_is_double() {
        let g = equilateral_tripod(1);
        let res = secular_gap(&g, PI, default_scan_step(&g), 1e-8).unwrap();
        let expect = (PI / 2.0) * (PI / 2.0);
        assert!((res.eigenvalue - expect).abs() / expect < 1e-9);
        assert_eq!(res.multiplicity, 2);
    }

    #[test]
    fn triangle_cycle_gap() {
        let g = crate::graph::build_graph(
            &["a", "b", "c"],
            &[
                ("e1", "a", "b", crate::rational::rat_int(1)),
                ("e2", "b", "c", crate::rational::rat_int(1)),
                ("e3", "c", "a", crate::rational::rat_int(1)),
            ],
        )
        .unwrap();
        // Total length 3: gap = (2 pi / 3)^2, double.
        let res = secular_gap(&g, PI, default_scan_step(&g), 1e-8).unwrap();
        let expect = (2.0 * PI / 3.0) * (2.0 * PI / 3.0);
        assert!((res.eigenvalue - expect).abs() / expect < 1e-8);
        assert_eq!(res.multiplicity, 2);
    }

    #[test]
    fn no_root_below_the_gap() {
        let g = one_edge(1);
        assert!(matches!(
            secular_gap(&g, 2.0, default_scan_step(&g), 1e-8),
            Err(SpectralError::NoRootInRange)
        ));
    }
}
