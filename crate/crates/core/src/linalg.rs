//! Thin wrappers over faer for the handful of dense kernels used here.

use faer::{c64, Mat, MatRef, Side};

pub(crate) fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut worst = 0.0f64;
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            worst = worst.max((a[(r, c)] - b[(r, c)]).norm());
        }
    }
    worst
}

pub(crate) fn to_complex(m: MatRef<'_, f64>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |r, c| c64::new(m[(r, c)], 0.0))
}

/// Eigendecomposition of a normal matrix with orthonormal eigenvectors.
///
/// The general solver returns eigenvectors that lose orthogonality inside
/// (near-)degenerate clusters. For a normal matrix the QR factor of the
/// eigenvector matrix is a Schur basis, and a triangular Schur form of a
/// normal matrix is diagonal, so the Q columns are orthonormal eigenvectors.
pub(crate) fn normal_eigen(a: MatRef<'_, c64>) -> Option<(Vec<c64>, Mat<c64>)> {
    let n = a.nrows();
    if n == 0 {
        return Some((Vec::new(), Mat::zeros(0, 0)));
    }
    let evd = a.eigen().ok()?;
    let q = evd.U().qr().compute_Q();
    // T = R S R^{-1} keeps the diagonal of S, so column i of Q still belongs
    // to eigenvalue i
    let s = evd.S();
    Some(((0..n).map(|i| s[i]).collect(), q))
}

pub(crate) fn normal_eigenvalues(a: MatRef<'_, c64>) -> Option<Vec<c64>> {
    a.eigenvalues().ok()
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub(crate) fn hermitian_eigen(a: MatRef<'_, c64>) -> Option<(Vec<f64>, Mat<c64>)> {
    let evd = a.self_adjoint_eigen(Side::Lower).ok()?;
    let n = a.nrows();
    let s = evd.S();
    Some(((0..n).map(|i| s[i].re).collect(), evd.U().to_owned()))
}

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
pub(crate) fn symmetric_eigen(a: MatRef<'_, f64>) -> Option<(Vec<f64>, Mat<f64>)> {
    let evd = a.self_adjoint_eigen(Side::Lower).ok()?;
    let n = a.nrows();
    let s = evd.S();
    Some(((0..n).map(|i| s[i]).collect(), evd.U().to_owned()))
}

/// Copies the selected columns of `m` into a new matrix.
pub(crate) fn select_columns<T>(m: MatRef<'_, T>, cols: &[usize]) -> Mat<T>
where
    T: Copy + faer::traits::ComplexField,
{
    Mat::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])])
}
