//! Small dense linear-algebra helpers on plain `f64` slices.

#![allow(clippy::needless_range_loop)]

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `v ← v − Σ (⟨v,q⟩ q)` over an orthonormal family, applied twice for stability.
pub fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(v, q);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= c * qi;
            }
        }
    }
}

/// Coordinates of `v` in an orthonormal family.
pub fn coordinates(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    basis.iter().map(|q| dot(v, q)).collect()
}

/// Extends the orthonormal family `basis` by the vectors in `vectors`,
/// skipping any whose residual is below `rel_tol` times its own norm.
/// Returns the number of vectors that were rejected.
pub fn extend_orthonormal(basis: &mut Vec<Vec<f64>>, vectors: &[Vec<f64>], rel_tol: f64) -> usize {
    let mut rejected = 0;
    for v in vectors {
        let original = norm(v);
        let mut r = v.clone();
        project_out(&mut r, basis);
        let len = norm(&r);
        if original == 0.0 || len <= rel_tol * original {
            rejected += 1;
            continue;
        }
        r.iter_mut().for_each(|x| *x /= len);
        basis.push(r);
    }
    rejected
}

/// Orthonormal basis of the span of `vectors`.
pub fn orthonormal_basis(vectors: &[Vec<f64>], rel_tol: f64) -> Vec<Vec<f64>> {
    let mut basis = Vec::new();
    extend_orthonormal(&mut basis, vectors, rel_tol);
    basis
}

/// Orthonormal basis of the orthogonal complement of an orthonormal family in R^dim.
pub fn complement_basis(basis: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut full = basis.to_vec();
    let mut candidates: Vec<(f64, usize)> = (0..dim)
        .map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            project_out(&mut e, basis);
            (norm(&e), i)
        })
        .collect();
    // Largest residuals first gives the best-conditioned completion.
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    let start = full.len();
    for (_, i) in candidates {
        if full.len() == dim {
            break;
        }
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        extend_orthonormal(&mut full, &[e], 1e-8);
    }
    full.split_off(start)
}

/// Solves the square system `m·x = rhs` (row-major `m`) by Gaussian
/// elimination with partial pivoting. Returns `None` when a pivot falls
/// below `tol` times the largest entry.
pub fn solve(m: &[Vec<f64>], rhs: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = rhs.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut b = rhs.to_vec();
    let scale = a.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= tol * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[row][c] -= f * a[col][c];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Determinant of a square row-major matrix.
pub fn determinant(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let Some(piv) = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
        else {
            return 0.0;
        };
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
        }
    }
    det
}

/// Advances `idx` to the next k-combination of 0..n in lexicographic order.
pub fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        let b = orthonormal_basis(&[vec![1.0, 1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0, 0.0]], 1e-12);
        let c = complement_basis(&b, 4);
        assert_eq!(c.len(), 2);
        let all: Vec<_> = b.iter().chain(&c).collect();
        for (i, u) in all.iter().enumerate() {
            for (j, v) in all.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(u, v) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn solve_and_det() {
        let m = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve(&m, &[3.0, 5.0], 1e-14).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
        assert!((determinant(&m) - 5.0).abs() < 1e-14);
        assert!(solve(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[1.0, 1.0], 1e-12).is_none());
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut idx = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut idx, 5) {
            count += 1;
        }
        assert_eq!(count, 10);
    }
}
