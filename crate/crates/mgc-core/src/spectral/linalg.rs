//! Small dense float linear algebra: one-sided Jacobi singular values,
//! symmetric Jacobi eigensolver, and Cholesky. Sized for matching matrices
//! and Rayleigh-Ritz blocks, not for large systems.

use alloc::vec::Vec;
use libm::{fabs, sqrt};

/// Singular values of a dense matrix (rows x cols, rows >= cols), ascending.
/// One-sided Jacobi on columns keeps small singular values accurate.
pub fn singular_values(a: &[Vec<f64>]) -> Vec<f64> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    // Column-major copy.
    let mut u: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| a[i][j]).collect())
        .collect();

    let eps = 1e-15;
    for _sweep in 0..40 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut app, mut aqq, mut apq) = (0.0, 0.0, 0.0);
                for i in 0..rows {
                    app += u[p][i] * u[p][i];
                    aqq += u[q][i] * u[q][i];
                    apq += u[p][i] * u[q][i];
                }
                if fabs(apq) <= eps * sqrt(app * aqq) {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..rows {
                    let up = u[p][i];
                    let uq = u[q][i];
                    u[p][i] = c * up - s * uq;
                    u[q][i] = s * up + c * uq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = u
        .iter()
        .map(|col| sqrt(col.iter().map(|x| x * x).sum::<f64>()))
        .collect();
    sv.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sv
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a small symmetric
/// matrix, by cyclic Jacobi rotations.
pub fn sym_eigen(a_in: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a_in.len();
    let mut a: Vec<Vec<f64>> = a_in.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for _sweep in 0..60 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if fabs(a[p][q]) < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta >= 0.0 {
                    1.0 / (theta + sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = a[p][j];
                    let aqj = a[q][j];
                    a[p][j] = c * apj - s * aqj;
                    a[q][j] = s * apj + c * aqj;
                }
                for i in 0..n {
                    let vip = v[i][p];
                    let viq = v[i][q];
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
    let vecs: Vec<Vec<f64>> = (0..n)
        .map(|i| order.iter().map(|&j| v[i][j]).collect())
        .collect();
    (vals, vecs)
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = alloc::vec![alloc::vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i][j] = sqrt(sum);
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Some(l)
}

/// Solves L y = b, then L^T x = y.
pub fn cholesky_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = l.len();
    let mut y = alloc::vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i][k] * y[k];
        }
        y[i] = sum / l[i][i];
    }
    let mut x = alloc::vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
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

    #[test]
    fn singular_values_of_diag() {
        let a = alloc::vec![
            alloc::vec![3.0, 0.0],
            alloc::vec![0.0, -2.0],
        ];
        let sv = singular_values(&a);
        assert!((sv[0] - 2.0).abs() < 1e-12);
        assert!((sv[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn singular_value_of_near_singular() {
        let a = alloc::vec![
            alloc::vec![1.0, 1.0],
            alloc::vec![1.0, 1.0 + 1e-9],
        ];
        let sv = singular_values(&a);
        // det = 1e-9, sigma_max ~ 2 => sigma_min ~ 5e-10.
        assert!(sv[0] < 1e-9);
        assert!(sv[0] > 1e-11);
    }

    #[test]
    fn sym_eigen_small() {
        let a = alloc::vec![
            alloc::vec![2.0, 1.0],
            alloc::vec![1.0, 2.0],
        ];
        let (vals, vecs) = sym_eigen(&a);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        // Check A v = lambda v for the first eigenvector.
        let v0: Vec<f64> = (0..2).map(|i| vecs[i][0]).collect();
        for i in 0..2 {
            let av: f64 = (0..2).map(|j| a[i][j] * v0[j]).sum();
            assert!((av - vals[0] * v0[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn cholesky_round_trip() {
        let a = alloc::vec![
            alloc::vec![4.0, 2.0],
            alloc::vec![2.0, 3.0],
        ];
        let l = cholesky(&a).unwrap();
        let x = cholesky_solve(&l, &[2.0, 1.0]);
        // Check A x = b.
        assert!((4.0 * x[0] + 2.0 * x[1] - 2.0).abs() < 1e-12);
        assert!((2.0 * x[0] + 3.0 * x[1] - 1.0).abs() < 1e-12);
    }
}
