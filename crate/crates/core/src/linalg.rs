//! Small dense helpers for the low-dimensional vectors and frames used
//! throughout the crate (ambient dimension is single digits in practice).

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist_max(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn scaled(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| c * x).collect()
}

pub fn add_scaled(a: &[f64], b: &[f64], c: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn unit(dim: usize, axis: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[axis] = 1.0;
    v
}

/// Threshold below which a residual after projection counts as rank-deficient.
pub const RANK_TOL: f64 = 1e-9;

/// Modified Gram-Schmidt with one re-orthogonalization pass per row.
///
/// Rows are normalized in place, preserving order and (for small
/// perturbations of an orthonormal set) orientation. Returns the index of
/// the first rank-deficient row, if any; rows past a deficient one are left
/// untouched.
pub fn orthonormalize(rows: &mut [Vec<f64>]) -> std::result::Result<(), usize> {
    for i in 0..rows.len() {
        // two projection passes keep the Gram defect near machine precision
        for _ in 0..2 {
            for j in 0..i {
                let c = dot(&rows[i], &rows[j]);
                let q = rows[j].clone();
                for (x, y) in rows[i].iter_mut().zip(&q) {
                    *x -= c * y;
                }
            }
        }
        let n = norm(&rows[i]);
        if n < RANK_TOL {
            return Err(i);
        }
        for x in rows[i].iter_mut() {
            *x /= n;
        }
    }
    Ok(())
}

/// Completes `rows` (assumed orthonormal) to a full orthonormal basis of
/// R^dim, deterministically, by orthogonalizing canonical axes against them.
pub fn complement_basis(rows: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(dim - rows.len());
    let mut all: Vec<Vec<f64>> = rows.to_vec();
    for axis in 0..dim {
        if all.len() == dim {
            break;
        }
        let mut v = unit(dim, axis);
        for _ in 0..2 {
            for q in &all {
                let c = dot(&v, q);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
        }
        let n = norm(&v);
        if n > 1e-6 {
            for x in v.iter_mut() {
                *x /= n;
            }
            all.push(v.clone());
            out.push(v);
        }
    }
    out
}

/// Maximal absolute entry of G - I for the Gram matrix of `rows`.
pub fn gram_defect(rows: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..rows.len() {
        for j in i..rows.len() {
            let g = dot(&rows[i], &rows[j]);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

/// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi sweeps.
///
/// Returns eigenvalues in non-decreasing order together with matching unit
/// eigenvectors (as rows).
pub fn symmetric_eigen(mat: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = mat.len();
    let mut a: Vec<Vec<f64>> = mat.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| unit(n, i)).collect();
    for _sweep in 0..64 {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[p][q].abs());
            }
        }
        if off < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vpk = v[p][k];
                    let vqk = v[q][k];
                    v[p][k] = c * vpk - s * vqk;
                    v[q][k] = s * vpk + c * vqk;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let vals = order.iter().map(|&i| a[i][i]).collect();
    let vecs = order.iter().map(|&i| v[i].clone()).collect();
    (vals, vecs)
}
