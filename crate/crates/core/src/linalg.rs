//! Small dense helpers for fixed-size real matrices.

/// Reduced row echelon form with partial pivoting.
///
/// Columns whose best remaining pivot is below `tol` in magnitude are skipped.
/// Returns the nonzero rows (one per pivot) and the pivot columns.
pub(crate) fn rref<const N: usize>(mut rows: Vec<[f64; N]>, tol: f64) -> (Vec<[f64; N]>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..N {
        if r == rows.len() {
            break;
        }
        let (best, mag) = (r..rows.len())
            .map(|i| (i, rows[i][c].abs()))
            .fold((r, -1.0), |acc, it| if it.1 > acc.1 { it } else { acc });
        if mag <= tol {
            continue;
        }
        rows.swap(r, best);
        let p = rows[r][c];
        if p != 1.0 {
            for v in rows[r].iter_mut() {
                *v /= p;
            }
        }
        rows[r][c] = 1.0;
        let pivot_row = rows[r];
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(pivot_row.iter()) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Basis of the null space of the row space described by an RREF matrix.
pub(crate) fn null_space<const N: usize>(rows: &[[f64; N]], pivots: &[usize]) -> Vec<[f64; N]> {
    (0..N)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = [0.0; N];
            v[free] = 1.0;
            for (row, &pc) in rows.iter().zip(pivots) {
                v[pc] = -row[free];
            }
            v
        })
        .collect()
}

pub(crate) fn dot<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub(crate) fn norm<const N: usize>(a: &[f64; N]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for c in 0..4 {
        let p = (c..4)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap_or(c);
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for i in c + 1..4 {
            let f = a[i][c] / a[c][c];
            for j in c..4 {
                a[i][j] -= f * a[c][j];
            }
        }
    }
    det
}

/// Solves `m x = b`; `None` when a pivot falls below `tol` relative to the largest entry.
pub(crate) fn solve4(m: &[[f64; 4]; 4], b: &[f64; 4], tol: f64) -> Option<[f64; 4]> {
    let scale = m.iter().flat_map(|r| r.iter()).fold(0.0_f64, |s, x| s.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    let mut a = *m;
    let mut rhs = *b;
    for c in 0..4 {
        let p = (c..4)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap_or(c);
        if a[p][c].abs() <= tol * scale {
            return None;
        }
        a.swap(p, c);
        rhs.swap(p, c);
        for i in c + 1..4 {
            let f = a[i][c] / a[c][c];
            for j in c..4 {
                a[i][j] -= f * a[c][j];
            }
            rhs[i] -= f * rhs[c];
        }
    }
    let mut x = [0.0; 4];
    for i in (0..4).rev() {
        let s: f64 = (i + 1..4).map(|j| a[i][j] * x[j]).sum();
        x[i] = (rhs[i] - s) / a[i][i];
    }
    Some(x)
}

/// Rank by pivoted Gram–Schmidt: a direction counts when its residual exceeds
/// `tol` times the largest input norm.
pub(crate) fn numeric_rank<const N: usize>(rows: &[[f64; N]], tol: f64) -> usize {
    let scale = rows.iter().map(norm).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let mut rest: Vec<[f64; N]> = rows.to_vec();
    let mut rank = 0;
    while !rest.is_empty() {
        let (k, best) = rest
            .iter()
            .enumerate()
            .map(|(k, r)| (k, norm(r)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if best <= tol * scale {
            break;
        }
        let q = rest.swap_remove(k).map(|c| c / best);
        for r in &mut rest {
            let d = dot(r, &q);
            for i in 0..N {
                r[i] -= d * q[i];
            }
        }
        rank += 1;
    }
    rank
}

/// Euclidean norm of `a ∧ b ∧ c` in the third exterior power of `R⁴`.
pub(crate) fn wedge3_norm(a: &[f64; 4], b: &[f64; 4], c: &[f64; 4]) -> f64 {
    let mut sum = 0.0;
    for skip in 0..4 {
        let cols: Vec<usize> = (0..4).filter(|&i| i != skip).collect();
        let m = [a, b, c].map(|v| [v[cols[0]], v[cols[1]], v[cols[2]]]);
        let d = det3(&m);
        sum += d * d;
    }
    sum.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_drops_dependent_rows() {
        let (rows, piv) = rref(vec![[1.0, 1.0, 0.0], [2.0, 2.0, 0.0], [0.0, 0.0, 3.0]], 1e-12);
        assert_eq!(piv, vec![0, 2]);
        assert_eq!(rows, vec![[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    }

    #[test]
    fn null_space_annihilates_rows() {
        let (rows, piv) = rref(vec![[1.0, 2.0, 3.0, 4.0], [0.0, 1.0, -1.0, 2.0]], 1e-12);
        let ns = null_space(&rows, &piv);
        assert_eq!(ns.len(), 2);
        for n in &ns {
            for r in &rows {
                assert!(dot(n, r).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn det_and_solve_agree() {
        let m = [
            [2.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 1.0, 0.0],
            [0.0, 1.0, 4.0, 1.0],
            [0.0, 0.0, 1.0, 5.0],
        ];
        // Tridiagonal continuant recurrence.
        let (mut d0, mut d1) = (1.0, 2.0);
        for (a, bc) in [(3.0, 1.0), (4.0, 1.0), (5.0, 1.0)] {
            let d2 = a * d1 - bc * d0;
            d0 = d1;
            d1 = d2;
        }
        assert!((det4(&m) - d1).abs() < 1e-12);
        let x = solve4(&m, &[1.0, 2.0, 3.0, 4.0], 1e-14).unwrap();
        for i in 0..4 {
            let lhs: f64 = (0..4).map(|j| m[i][j] * x[j]).sum();
            assert!((lhs - (i + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_of_dependent_rows() {
        let rows = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [1.0, 1.0, 1e-12, 0.0]];
        assert_eq!(numeric_rank(&rows, 1e-9), 2);
        assert_eq!(numeric_rank(&rows, 1e-14), 3);
        assert_eq!(numeric_rank::<4>(&[], 1e-9), 0);
    }

    #[test]
    fn wedge_of_basis_vectors() {
        let e = |i: usize| {
            let mut v = [0.0; 4];
            v[i] = 1.0;
            v
        };
        assert_eq!(wedge3_norm(&e(0), &e(1), &e(3)), 1.0);
        assert_eq!(wedge3_norm(&e(0), &e(1), &[1.0, 2.0, 0.0, 0.0]), 0.0);
    }
}
