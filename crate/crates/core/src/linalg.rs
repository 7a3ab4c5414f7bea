//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff for rank and singularity decisions.
pub(crate) const RANK_TOL: f64 = 1e-10;

pub(crate) fn matrix_from_rows(rows: &[DVector<f64>], ncols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}

pub(crate) fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

/// Solve a square system, refusing numerically singular matrices.
pub(crate) fn solve_square(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if m.nrows() != m.ncols() || rank(m) < m.nrows() {
        return None;
    }
    m.clone().lu().solve(rhs)
}

/// Component of `g` orthogonal to the row space of `rows` (rows assumed
/// linearly independent).
pub(crate) fn residual_off_rowspace(rows: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    if rows.nrows() == 0 {
        return g.clone();
    }
    let gram = rows * rows.transpose();
    match gram.lu().solve(&(rows * g)) {
        Some(y) => g - rows.transpose() * y,
        None => g.clone(),
    }
}

/// A unit vector spanning the null space of an `(n-1) x n` matrix of full rank.
pub(crate) fn null_vector(rows: &DMatrix<f64>) -> DVector<f64> {
    let n = rows.ncols();
    let mut square = DMatrix::zeros(n, n);
    square.view_mut((0, 0), (rows.nrows(), n)).copy_from(rows);
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    v_t.row(idx).transpose().normalize()
}
