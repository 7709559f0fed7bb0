//! Small dense complex linear algebra on top of nalgebra.

use nalgebra::DMatrix;

use crate::tensor::{C64, ONE, ZERO};

pub(crate) fn matrix_from_rows(rows: &[Vec<C64>], ncols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}

/// Singular values (descending) of the matrix with the given rows.
pub(crate) fn singular_values(rows: &[Vec<C64>], ncols: usize) -> Vec<f64> {
    if rows.is_empty() || ncols == 0 {
        return Vec::new();
    }
    let m = matrix_from_rows(rows, ncols);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank: singular values above `tol` times the largest one.
pub(crate) fn numerical_rank(profile: &[f64], tol: f64) -> usize {
    match profile.first() {
        Some(&top) if top > 0.0 => profile.iter().filter(|&&s| s > tol * top).count(),
        _ => 0,
    }
}

/// Kernel of `x ↦ (Σ_j row_j x_j)_rows` (bilinear, no conjugation), as a
/// Hermitian-orthonormal basis, plus the singular value profile of the rows.
pub(crate) fn bilinear_kernel(rows: &[Vec<C64>], ncols: usize, tol: f64) -> (Vec<f64>, Vec<Vec<C64>>) {
    let nrows = rows.len().max(ncols);
    // Zero-padding to at least square gives the full right singular basis.
    let m = DMatrix::from_fn(nrows, ncols, |i, j| if i < rows.len() { rows[i][j] } else { ZERO });
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let mut kernel = Vec::new();
    for (r, &s) in sv.iter().enumerate() {
        if top == 0.0 || s <= tol * top {
            kernel.push((0..ncols).map(|j| v_t[(r, j)].conj()).collect());
        }
    }
    let mut profile = sv;
    profile.sort_by(|a, b| b.total_cmp(a));
    profile.truncate(rows.len().min(ncols));
    (profile, kernel)
}

/// Solves `A x = b` by LU with partial pivoting; `None` when singular.
pub(crate) fn solve(a: DMatrix<C64>, b: &[C64]) -> Option<Vec<C64>> {
    let rhs = nalgebra::DVector::from_column_slice(b);
    let x = a.lu().solve(&rhs)?;
    x.iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
        .then(|| x.iter().copied().collect())
}

/// Determinant of a small square matrix given by rows.
pub(crate) fn det(rows: &[Vec<C64>]) -> C64 {
    let n = rows.len();
    match n {
        0 => ONE,
        1 => rows[0][0],
        2 => rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0],
        _ => matrix_from_rows(rows, n).determinant(),
    }
}

/// Roots of `Σ_m c_m t^m` (ascending coefficients, `c_deg ≠ 0`) as eigenvalues of the
/// companion matrix.
pub(crate) fn polynomial_roots(ascending: &[C64]) -> Vec<C64> {
    let deg = ascending.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = ascending[deg];
    let companion = DMatrix::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -ascending[i] / lead
        } else if i == j + 1 {
            ONE
        } else {
            ZERO
        }
    });
    let schur = nalgebra::Schur::new(companion);
    let (_, t) = schur.unpack();
    (0..deg).map(|i| t[(i, i)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn roots_of_cubic() {
        // (t-1)(t-2)(t+3) = t^3 - 7t + 6
        let mut r = polynomial_roots(&[c(6.0, 0.0), c(-7.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (got, want) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((got - c(want, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn complex_roots() {
        // t^2 + 1
        let r = polynomial_roots(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(r.iter().any(|z| (z - C64::i()).norm() < 1e-12));
        assert!(r.iter().any(|z| (z + C64::i()).norm() < 1e-12));
    }

    #[test]
    fn kernel_of_wide_matrix() {
        let rows = vec![vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]];
        let (profile, ker) = bilinear_kernel(&rows, 3, 1e-10);
        assert_eq!(profile.len(), 1);
        assert_eq!(ker.len(), 2);
        for k in &ker {
            let dot: C64 = rows[0].iter().zip(k).map(|(a, b)| a * b).sum();
            assert!(dot.norm() < 1e-12);
        }
    }

    #[test]
    fn solve_and_det() {
        let a = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)]);
        let x = solve(a, &[c(3.0, 0.0), c(5.0, 0.0)]).unwrap();
        assert!((x[0] - c(0.8, 0.0)).norm() < 1e-12 && (x[1] - c(1.4, 0.0)).norm() < 1e-12);
        let rows = vec![
            vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0), c(4.0, 0.0)],
            vec![c(5.0, 0.0), c(6.0, 0.0), c(0.0, 0.0)],
        ];
        assert!((det(&rows) - c(1.0, 0.0)).norm() < 1e-10);
    }
}
