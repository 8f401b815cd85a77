//! Dense products pinned to a single thread so results are bitwise
//! reproducible.

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par};

/// `a · b`
pub fn product(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> Mat<f64> {
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    matmul(out.as_mut(), Accum::Replace, a, b, 1.0, Par::Seq);
    out
}

/// `aᵀ · a`
pub fn gram(a: MatRef<'_, f64>) -> Mat<f64> {
    product(a.transpose(), a)
}
