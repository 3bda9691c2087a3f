//! Small dense helpers on top of nalgebra.

use alloc::format;
use alloc::string::String;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Moore-Penrose pseudo-inverse via SVD.
pub fn pseudo_inverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return DMatrix::zeros(a.ncols(), a.nrows());
    }
    let scale = a.amax().max(1.0);
    let svd = a.clone().svd(true, true);
    // pseudo_inverse only fails for a negative epsilon.
    svd.pseudo_inverse(1e-13 * scale)
        .unwrap_or_else(|_| DMatrix::zeros(a.ncols(), a.nrows()))
}

/// Smallest eigenvalue of the symmetric part of `a`.
pub fn min_sym_eigenvalue(a: &DMatrix<f64>) -> f64 {
    let sym = (a + a.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.min()
}

pub fn max_sym_eigenvalue(a: &DMatrix<f64>) -> f64 {
    let sym = (a + a.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.max()
}

/// Largest singular value.
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().max()
}

pub fn is_symmetric(a: &DMatrix<f64>, tol: f64) -> bool {
    a.is_square() && (a - a.transpose()).amax() <= tol
}

pub fn is_positive_definite(a: &DMatrix<f64>) -> bool {
    a.is_square() && is_symmetric(a, 1e-12) && min_sym_eigenvalue(a) > 0.0
}

pub fn fmt_vector(v: &DVector<f64>) -> String {
    let parts: alloc::vec::Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

pub fn all_finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}
