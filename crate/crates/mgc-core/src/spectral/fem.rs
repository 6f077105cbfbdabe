//! Independent finite-element cross-check for the spectral gap: continuous
//! piecewise-affine elements on a uniform subdivision of every edge, shared
//! vertex degrees of freedom (continuity built in, current conservation
//! natural), and a shift-inverted block subspace iteration with the constant
//! mode deflated.
//!
//! Stiffness and mass share an arrow sparsity pattern: tridiagonal interior
//! chains per edge bordered by the vertex block, so factoring reduces to
//! Thomas sweeps plus a dense Schur complement on the vertices.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use libm::sqrt;

use super::{SpectralError, SpectralMethod, SpectralResult};
use crate::graph::MetricGraph;
use crate::rational::rat_to_f64;
use crate::spectral::linalg::{cholesky, cholesky_solve, sym_eigen};

struct EdgeBlock {
    /// Global index of the first interior DOF; the chain has `len` DOFs.
    start: usize,
    len: usize,
    diag: Vec<f64>,
    off: Vec<f64>,
    tail_dof: usize,
    head_dof: usize,
    /// Coupling between the vertex DOFs and the first/last interior DOF.
    c_tail: f64,
    c_head: f64,
}

/// Symmetric arrow matrix: per-edge interior tridiagonal blocks bordered by
/// the vertex DOFs (vertex-vertex entries vanish for >= 2 cells per edge).
pub struct GraphMatrix {
    n: usize,
    n_interior: usize,
    edges: Vec<EdgeBlock>,
    vert_diag: Vec<f64>,
}

impl GraphMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for i in 0..self.vert_diag.len() {
            y[self.n_interior + i] = self.vert_diag[i] * x[self.n_interior + i];
        }
        for b in &self.edges {
            for i in 0..b.len {
                let g = b.start + i;
                y[g] += b.diag[i] * x[g];
                if i + 1 < b.len {
                    y[g] += b.off[i] * x[g + 1];
                    y[g + 1] += b.off[i] * x[g];
                }
            }
            y[b.start] += b.c_tail * x[b.tail_dof];
            y[b.tail_dof] += b.c_tail * x[b.start];
            let last = b.start + b.len - 1;
            y[last] += b.c_head * x[b.head_dof];
            y[b.head_dof] += b.c_head * x[last];
        }
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = alloc::vec![0.0; self.n];
        self.matvec(x, &mut y);
        x.iter().zip(&y).map(|(a, b)| a * b).sum()
    }
}

/// Assembles stiffness and mass for `cells` P1 cells per edge.
pub fn assemble(graph: &MetricGraph, cells: usize) -> (GraphMatrix, GraphMatrix) {
    let vertex_ids: Vec<&String> = graph.vertices().iter().collect();
    let vpos: BTreeMap<&String, usize> = vertex_ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let n_interior_per_edge = cells - 1;
    let n_interior = graph.edges().len() * n_interior_per_edge;
    let n = n_interior + vertex_ids.len();

    let mut k_edges = Vec::new();
    let mut m_edges = Vec::new();
    let mut k_vert = alloc::vec![0.0; vertex_ids.len()];
    let mut m_vert = alloc::vec![0.0; vertex_ids.len()];

    for (ei, e) in graph.edges().iter().enumerate() {
        let h = rat_to_f64(&e.length) / cells as f64;
        let start = ei * n_interior_per_edge;
        let tail_dof = n_interior + vpos[&e.tail];
        let head_dof = n_interior + vpos[&e.head];
        // Per cell: stiffness (1/h) [[1,-1],[-1,1]], mass (h/6) [[2,1],[1,2]].
        let (ks, km) = (1.0 / h, h / 6.0);
        let mut kd = alloc::vec![2.0 * ks; n_interior_per_edge];
        let ko = alloc::vec![-ks; n_interior_per_edge - 1];
        let mut md = alloc::vec![4.0 * km; n_interior_per_edge];
        let mo = alloc::vec![km; n_interior_per_edge - 1];
        // Interior diag entries already account for both adjacent cells.
        let _ = &mut kd;
        let _ = &mut md;
        k_vert[vpos[&e.tail]] += ks;
        k_vert[vpos[&e.head]] += ks;
        m_vert[vpos[&e.tail]] += 2.0 * km;
        m_vert[vpos[&e.head]] += 2.0 * km;
        k_edges.push(EdgeBlock {
            start,
            len: n_interior_per_edge,
            diag: kd,
            off: ko,
            tail_dof,
            head_dof,
            c_tail: -ks,
            c_head: -ks,
        });
        m_edges.push(EdgeBlock {
            start,
            len: n_interior_per_edge,
            diag: md,
            off: mo,
            tail_dof,
            head_dof,
            c_tail: km,
            c_head: km,
        });
    }

    (
        GraphMatrix {
            n,
            n_interior,
            edges: k_edges,
            vert_diag: k_vert,
        },
        GraphMatrix {
            n,
            n_interior,
            edges: m_edges,
            vert_diag: m_vert,
        },
    )
}

/// Factorization of an SPD arrow matrix: LDL of each interior chain plus a
/// dense Cholesky of the vertex Schur complement.
struct ArrowFactor {
    n_interior: usize,
    chains: Vec<ChainFactor>,
    schur_l: Vec<Vec<f64>>,
}

struct ChainFactor {
    start: usize,
    d: Vec<f64>,
    l: Vec<f64>,
    tail_dof: usize,
    head_dof: usize,
    c_tail: f64,
    c_head: f64,
}

impl ChainFactor {
    /// Solves the tridiagonal chain T x = b in place.
    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 1..n {
            b[i] -= self.l[i - 1] * b[i - 1];
        }
        for i in 0..n {
            b[i] /= self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            b[i] -= self.l[i] * b[i + 1];
        }
    }
}

fn factor_arrow(a: &GraphMatrix) -> Option<ArrowFactor> {
    let n_vert = a.vert_diag.len();
    let mut schur = alloc::vec![alloc::vec![0.0; n_vert]; n_vert];
    for i in 0..n_vert {
        schur[i][i] = a.vert_diag[i];
    }
    let mut chains = Vec::with_capacity(a.edges.len());
    for b in &a.edges {
        // LDL^T of the tridiagonal block: T = L D L^T with unit bidiagonal L.
        let n = b.len;
        let mut d = alloc::vec![0.0; n];
        let mut l = alloc::vec![0.0; n.saturating_sub(1)];
        d[0] = b.diag[0];
        for i in 1..n {
            if d[i - 1] <= 0.0 {
                return None;
            }
            l[i - 1] = b.off[i - 1] / d[i - 1];
            d[i] = b.diag[i] - l[i - 1] * b.off[i - 1];
        }
        if d[n - 1] <= 0.0 {
            return None;
        }
        let chain = ChainFactor {
            start: b.start,
            d,
            l,
            tail_dof: b.tail_dof,
            head_dof: b.head_dof,
            c_tail: b.c_tail,
            c_head: b.c_head,
        };
        // Schur update: S -= C T^{-1} C^T where C has c_tail at (tail, first)
        // and c_head at (head, last).
        let mut e_first = alloc::vec![0.0; n];
        e_first[0] = b.c_tail;
        chain.solve(&mut e_first);
        let mut e_last = alloc::vec![0.0; n];
        e_last[n - 1] = b.c_head;
        chain.solve(&mut e_last);
        let ti = b.tail_dof - a.n_interior;
        let hi = b.head_dof - a.n_interior;
        schur[ti][ti] -= b.c_tail * e_first[0];
        schur[hi][hi] -= b.c_head * e_last[n - 1];
        schur[ti][hi] -= b.c_tail * e_last[0];
        schur[hi][ti] -= b.c_head * e_first[n - 1];
        chains.push(chain);
    }
    let schur_l = cholesky(&schur)?;
    Some(ArrowFactor {
        n_interior: a.n_interior,
        chains,
        schur_l,
    })
}

impl ArrowFactor {
    /// Solves A x = b.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n_vert = self.schur_l.len();
        // Interior pre-solve: w = T^{ -1} b_int per chain.
        let mut w = b.to_vec();
        let mut rhs_v: Vec<f64> = b[self.n_interior..].to_vec();
        for c in &self.chains {
            let seg = &mut w[c.start..c.start + c.d.len()];
            c.solve(seg);
            rhs_v[c.tail_dof - self.n_interior] -= c.c_tail * seg[0];
            rhs_v[c.head_dof - self.n_interior] -= c.c_head * seg[c.d.len() - 1];
        }
        let v = cholesky_solve(&self.schur_l, &rhs_v);
        // Back-substitute interiors with the vertex values folded in.
        let mut x = alloc::vec![0.0; self.n_interior + n_vert];
        for c in &self.chains {
            let n = c.d.len();
            let mut seg: Vec<f64> = b[c.start..c.start + n].to_vec();
            seg[0] -= c.c_tail * v[c.tail_dof - self.n_interior];
            seg[n - 1] -= c.c_head * v[c.head_dof - self.n_interior];
            c.solve(&mut seg);
            x[c.start..c.start + n].copy_from_slice(&seg);
        }
        x[self.n_interior..].copy_from_slice(&v);
        x
    }
}

fn m_inner(m: &GraphMatrix, x: &[f64], y: &[f64]) -> f64 {
    let mut my = alloc::vec![0.0; m.dim()];
    m.matvec(y, &mut my);
    x.iter().zip(&my).map(|(a, b)| a * b).sum()
}

/// Smallest nonzero generalized eigenvalue of (K, M) by shift-inverted block
/// subspace iteration, deflating the constant kernel of K.
pub fn fem_gap(graph: &MetricGraph, cells: usize) -> Result<SpectralResult, SpectralError> {
    if cells < 2 {
        return Err(SpectralError::MeshTooCoarse);
    }
    let (k_mat, m_mat) = assemble(graph, cells);
    let n = k_mat.dim();
    let total = rat_to_f64(graph.total_length());
    let sigma = 0.01 * (core::f64::consts::PI / total) * (core::f64::consts::PI / total);

    // A = K + sigma M.
    let a_mat = add_scaled(&k_mat, &m_mat, sigma);
    let factor = factor_arrow(&a_mat).ok_or(SpectralError::SolverStalled)?;

    let block = 4.min(n.saturating_sub(1)).max(1);
    let ones = alloc::vec![1.0; n];
    let ones_m = m_inner(&m_mat, &ones, &ones);

    // Deterministic pseudo-random start block.
    let mut state: u64 = 0x9e3779b97f4a7c15;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut x: Vec<Vec<f64>> = (0..block).map(|_| (0..n).map(|_| next()).collect()).collect();

    let mut lambda_prev = f64::INFINITY;
    let mut stable = 0usize;
    let mut ritz_vals: Vec<f64> = alloc::vec![0.0; block];
    for _iter in 0..500 {
        // Deflate the constant and M-orthonormalize the block.
        for col in x.iter_mut() {
            let proj = m_inner(&m_mat, col, &ones) / ones_m;
            for (c, o) in col.iter_mut().zip(&ones) {
                *c -= proj * o;
            }
        }
        for j in 0..block {
            for i in 0..j {
                let (head, tail) = x.split_at_mut(j);
                let proj = m_inner(&m_mat, &tail[0], &head[i]);
                for (c, o) in tail[0].iter_mut().zip(&head[i]) {
                    *c -= proj * o;
                }
            }
            let norm = sqrt(m_inner(&m_mat, &x[j], &x[j]));
            if norm < 1e-300 {
                return Err(SpectralError::SolverStalled);
            }
            for c in x[j].iter_mut() {
                *c /= norm;
            }
        }

        // Y = A^{-1} M X.
        let mut y: Vec<Vec<f64>> = Vec::with_capacity(block);
        for col in &x {
            let mut mx = alloc::vec![0.0; n];
            m_mat.matvec(col, &mut mx);
            y.push(factor.solve(&mx));
        }
        // Rayleigh-Ritz on span(Y) with (K, M).
        for col in y.iter_mut() {
            let proj = m_inner(&m_mat, col, &ones) / ones_m;
            for (c, o) in col.iter_mut().zip(&ones) {
                *c -= proj * o;
            }
        }
        let mut k_small = alloc::vec![alloc::vec![0.0; block]; block];
        let mut m_small = alloc::vec![alloc::vec![0.0; block]; block];
        for i in 0..block {
            let mut ky = alloc::vec![0.0; n];
            k_mat.matvec(&y[i], &mut ky);
            let mut my = alloc::vec![0.0; n];
            m_mat.matvec(&y[i], &mut my);
            for j in 0..block {
                k_small[j][i] = y[j].iter().zip(&ky).map(|(a, b)| a * b).sum();
                m_small[j][i] = y[j].iter().zip(&my).map(|(a, b)| a * b).sum();
            }
        }
        // Symmetrize against roundoff.
        for i in 0..block {
            for j in (i + 1)..block {
                let k_avg = 0.5 * (k_small[i][j] + k_small[j][i]);
                k_small[i][j] = k_avg;
                k_small[j][i] = k_avg;
                let m_avg = 0.5 * (m_small[i][j] + m_small[j][i]);
                m_small[i][j] = m_avg;
                m_small[j][i] = m_avg;
            }
        }
        let l = cholesky(&m_small).ok_or(SpectralError::SolverStalled)?;
        // Standard problem L^{-1} K L^{-T}.
        let mut reduced = alloc::vec![alloc::vec![0.0; block]; block];
        for j in 0..block {
            let col: Vec<f64> = (0..block).map(|i| k_small[i][j]).collect();
            let solved = forward_solve(&l, &col);
            for i in 0..block {
                reduced[i][j] = solved[i];
            }
        }
        for i in 0..block {
            let row: Vec<f64> = reduced[i].clone();
            let solved = forward_solve(&l, &row);
            reduced[i] = solved;
        }
        let (vals, vecs) = sym_eigen(&reduced);
        // Ritz vectors: X = Y * (L^{-T} W).
        let mut coef = alloc::vec![alloc::vec![0.0; block]; block];
        for j in 0..block {
            let w: Vec<f64> = (0..block).map(|i| vecs[i][j]).collect();
            let c = back_solve(&l, &w);
            for i in 0..block {
                coef[i][j] = c[i];
            }
        }
        let mut x_new: Vec<Vec<f64>> = Vec::with_capacity(block);
        for j in 0..block {
            let mut col = alloc::vec![0.0; n];
            for i in 0..block {
                let c = coef[i][j];
                for (dst, src) in col.iter_mut().zip(&y[i]) {
                    *dst += c * src;
                }
            }
            x_new.push(col);
        }
        x = x_new;
        ritz_vals.copy_from_slice(&vals);

        let lambda = vals[0];
        if lambda.is_finite() && (lambda - lambda_prev).abs() <= 1e-13 * lambda.abs().max(1e-30) {
            stable += 1;
            if stable >= 3 {
                break;
            }
        } else {
            stable = 0;
        }
        lambda_prev = lambda;
    }

    let lambda = ritz_vals[0];
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(SpectralError::SolverStalled);
    }
    // Residual ||K x - lambda M x||_2 with ||x||_M = 1.
    let xv = &x[0];
    let norm = sqrt(m_inner(&m_mat, xv, xv));
    let mut kx = alloc::vec![0.0; n];
    k_mat.matvec(xv, &mut kx);
    let mut mx = alloc::vec![0.0; n];
    m_mat.matvec(xv, &mut mx);
    let residual = sqrt(
        kx.iter()
            .zip(&mx)
            .map(|(a, b)| (a - lambda * b) * (a - lambda * b))
            .sum::<f64>(),
    ) / norm;

    let multiplicity = ritz_vals
        .iter()
        .take_while(|v| (**v - lambda).abs() <= 1e-6 * lambda)
        .count()
        .max(1);

    Ok(SpectralResult {
        k: sqrt(lambda),
        eigenvalue: lambda,
        residual,
        multiplicity,
        method: SpectralMethod::Fem,
        detail: alloc::format!("cells_per_edge={cells} dofs={n}"),
    })
}

fn add_scaled(k: &GraphMatrix, m: &GraphMatrix, sigma: f64) -> GraphMatrix {
    GraphMatrix {
        n: k.n,
        n_interior: k.n_interior,
        vert_diag: k
            .vert_diag
            .iter()
            .zip(&m.vert_diag)
            .map(|(a, b)| a + sigma * b)
            .collect(),
        edges: k
            .edges
            .iter()
            .zip(&m.edges)
            .map(|(kb, mb)| EdgeBlock {
                start: kb.start,
                len: kb.len,
                diag: kb.diag.iter().zip(&mb.diag).map(|(a, b)| a + sigma * b).collect(),
                off: kb.off.iter().zip(&mb.off).map(|(a, b)| a + sigma * b).collect(),
                tail_dof: kb.tail_dof,
                head_dof: kb.head_dof,
                c_tail: kb.c_tail + sigma * mb.c_tail,
                c_head: kb.c_head + sigma * mb.c_head,
            })
            .collect(),
    }
}

fn forward_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = l.len();
    let mut y = alloc::vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i][k] * y[k];
        }
        y[i] = sum / l[i][i];
    }
    y
}

fn back_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = l.len();
    let mut x = alloc::vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = b[i];
        for k in (i + 1)..n {
            sum -= l[k][i] * x[k];
        }
        x[i] = sum / l[i][i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{equilateral_tripod, one_edge};
    use core::f64::consts::PI;

    #[test]
    fn single_edge_gap_converges_at_second_order() {
        let g = one_edge(1);
        let exact = PI * PI;
        let r256 = fem_gap(&g, 256).unwrap();
        assert!((r256.eigenvalue - exact).abs() / exact < 1e-4);
        let e64 = (fem_gap(&g, 64).unwrap().eigenvalue - exact).abs();
        let e128 = (fem_gap(&g, 128).unwrap().eigenvalue - exact).abs();
        let ratio = e64 / e128;
        assert!(
            (3.2..=4.8).contains(&ratio),
            "Richardson ratio {ratio} outside 4 +- 20%"
        );
    }

    #[test]
    fn star_gap_matches_secular_and_is_double() {
        let g = equilateral_tripod(1);
        let fem = fem_gap(&g, 256).unwrap();
        let expect = (PI / 2.0) * (PI / 2.0);
        assert!((fem.eigenvalue - expect).abs() / expect < 1e-4);
        assert_eq!(fem.multiplicity, 2);
    }

    #[test]
    fn coarse_mesh_rejected() {
        let g = one_edge(1);
        assert!(matches!(fem_gap(&g, 1), Err(SpectralError::MeshTooCoarse)));
    }

    #[test]
    fn rayleigh_quotient_dominates_gap() {
        // Any mean-zero continuous piecewise-affine test function has
        // H(u)/||u||^2 at or above the gap.
        let g = equilateral_tripod(1);
        let (k_mat, m_mat) = assemble(&g, 64);
        let n = k_mat.dim();
        let gap = fem_gap(&g, 256).unwrap().eigenvalue;
        let mut state = 7u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let ones = alloc::vec![1.0; n];
        let ones_m = m_inner(&m_mat, &ones, &ones);
        for _ in 0..20 {
            let mut u: Vec<f64> = (0..n).map(|_| next()).collect();
            let proj = m_inner(&m_mat, &u, &ones) / ones_m;
            for (c, o) in u.iter_mut().zip(&ones) {
                *c -= proj * o;
            }
            let num = k_mat.quadratic_form(&u);
            let den = m_mat.quadratic_form(&u);
            assert!(num / den >= gap - 1e-9);
        }
    }
}
