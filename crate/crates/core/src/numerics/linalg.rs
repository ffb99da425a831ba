use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Dense real matrix; data points and basis vectors are stored as columns.
pub type Mat = DMatrix<f64>;
/// Dense real vector in the ambient space.
pub type Vector = DVector<f64>;

/// Relative rank tolerance (scaled by the largest column norm).
pub const RANK_TOL: f64 = 1e-10;
/// Absolute symmetry tolerance for [`sym_eig`], scaled by `max(1, max|S|)`.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Orthonormal basis for the span of `cols`, dropping numerically dependent
/// columns.
pub fn orthonormalize(cols: &Mat) -> Result<Mat> {
    orthonormalize_with_tol(cols, RANK_TOL)
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. A column is
/// kept when its remainder exceeds `rel_tol` times the largest input column
/// norm.
pub fn orthonormalize_with_tol(cols: &Mat, rel_tol: f64) -> Result<Mat> {
    let max_norm = cols
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0_f64, f64::max);
    if max_norm == 0.0 || !max_norm.is_finite() {
        return Err(Error::DegenerateSpan);
    }
    let threshold = rel_tol * max_norm;
    let mut basis: Vec<Vector> = Vec::with_capacity(cols.ncols());
    for col in cols.column_iter() {
        let mut v: Vector = col.into_owned();
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dot(&v);
                v.axpy(-proj, q, 1.0);
            }
        }
        let norm = v.norm();
        if norm > threshold {
            basis.push(v / norm);
        }
    }
    if basis.is_empty() {
        return Err(Error::DegenerateSpan);
    }
    Ok(Mat::from_columns(&basis))
}

/// Split `v` into its component in `span(basis)` and the orthogonal
/// remainder. `basis` must have orthonormal columns.
pub fn project(basis: &Mat, v: &Vector) -> (Vector, Vector) {
    let coords = basis.tr_mul(v);
    let par = basis * coords;
    let perp = v - &par;
    (par, perp)
}

/// Minimum-norm minimizer of `‖A c − b‖₂`.
pub fn least_squares(a: &Mat, b: &Vector) -> Result<Vector> {
    if a.ncols() == 0 {
        return Err(Error::InvalidArgument("least squares needs at least one column".into()));
    }
    if a.nrows() != b.len() {
        return Err(Error::Dimension(format!(
            "A has {} rows but b has length {}",
            a.nrows(),
            b.len()
        )));
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return Ok(Vector::zeros(a.ncols()));
    }
    svd.solve(b, RANK_TOL * smax)
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

/// Eigenpairs of a symmetric matrix, sorted by ascending eigenvalue.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the same order as `values`.
    pub vectors: Mat,
}

pub fn sym_eig(s: &Mat) -> Result<SymEig> {
    if s.nrows() != s.ncols() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    let scale = s.amax().max(1.0);
    let asym = (s - s.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric(asym));
    }
    // Symmetrize exactly so the solver sees a symmetric input.
    let sym = (s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<Vector> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    Ok(SymEig {
        values,
        vectors: Mat::from_columns(&cols),
    })
}
