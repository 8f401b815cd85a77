//! The real orthogonal matrix derived from the DFT, and the column split that
//! gives every row the same energy on the kernel-space block.

use std::f64::consts::PI;

use faer::Mat;

use crate::error::{PpsfError, Result};

/// `X′ = Re(X) + Im(X)` for the unitary DFT matrix `X` of the given order,
/// i.e. `X′_ij = (cos θ − sin θ)/√order` with `θ = 2π·ij/order`.
pub fn dft_mixing_matrix(order: usize) -> Result<Mat<f64>> {
    if order == 0 {
        return Err(PpsfError::Argument(
            "mixing matrix order must be at least 1".into(),
        ));
    }
    let scale = 1.0 / (order as f64).sqrt();
    Ok(Mat::from_fn(order, order, |i, j| {
        // Reduce ij mod order before scaling to keep θ in [0, 2π).
        let theta = 2.0 * PI * ((i * j) % order) as f64 / order as f64;
        (theta.cos() - theta.sin()) * scale
    }))
}

/// Columns of `X′` assigned to the kernel-space block.
///
/// For even `m` these are columns `1..=m/2` and the last `m/2`; for odd `m`
/// column `0` (constant `1/√order`) is added to the pattern for `m − 1`.
/// Columns `k` and `order − k` pair up so that every row has energy exactly
/// `m/order` on the selected set. When `m == order` every column is selected.
pub fn select_lambda_columns(order: usize, m: usize) -> Result<Vec<usize>> {
    if m > order {
        return Err(PpsfError::Argument(format!(
            "cannot select {m} columns from a matrix of order {order}"
        )));
    }
    if m == order {
        return Ok((0..order).collect());
    }
    let pairs = m / 2;
    let mut cols = Vec::with_capacity(m);
    if m % 2 == 1 {
        cols.push(0);
    }
    cols.extend(1..=pairs);
    cols.extend(order - pairs..order);
    Ok(cols)
}

/// The orthogonal matrix `Q = [Q^Γ Q^Λ]`: `X′` with its kernel-space columns
/// moved to the last `m` positions.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMatrix {
    order: usize,
    q: Mat<f64>,
    lambda_columns: Vec<usize>,
}

impl MixingMatrix {
    pub fn new(order: usize, m: usize) -> Result<Self> {
        let x = dft_mixing_matrix(order)?;
        let lambda_columns = select_lambda_columns(order, m)?;
        let mut selected = vec![false; order];
        for &c in &lambda_columns {
            selected[c] = true;
        }
        let permutation: Vec<usize> = (0..order)
            .filter(|&c| !selected[c])
            .chain(lambda_columns.iter().copied())
            .collect();
        let q = Mat::from_fn(order, order, |i, j| x[(i, permutation[j])]);
        Ok(Self {
            order,
            q,
            lambda_columns,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of kernel-space columns.
    pub fn m(&self) -> usize {
        self.lambda_columns.len()
    }

    /// Number of eigenfunction columns.
    pub fn n(&self) -> usize {
        self.order - self.m()
    }

    pub fn q(&self) -> &Mat<f64> {
        &self.q
    }

    /// Original `X′` column indices of the kernel-space block.
    pub fn lambda_columns(&self) -> &[usize] {
        &self.lambda_columns
    }

    /// `‖Q_j^Λ‖²` for every row `j`.
    pub fn lambda_row_energies(&self) -> Vec<f64> {
        let n = self.n();
        (0..self.order)
            .map(|j| (n..self.order).map(|k| self.q[(j, k)].powi(2)).sum())
            .collect()
    }

    /// `max |QᵀQ − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        orthogonality_defect(&self.q)
    }
}

/// Row energies `Σ_{c ∈ columns} X_jc²` of an arbitrary column subset.
pub fn row_energies(x: &Mat<f64>, columns: &[usize]) -> Vec<f64> {
    (0..x.nrows())
        .map(|j| columns.iter().map(|&c| x[(j, c)].powi(2)).sum())
        .collect()
}

/// `max |AᵀA − I|` for a square matrix.
pub fn orthogonality_defect(a: &Mat<f64>) -> f64 {
    let gram = crate::linalg::gram(a.as_ref());
    let mut worst = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let e = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - e).abs());
        }
    }
    worst
}
