//! Pseudo prolate spheroidal functions.
//!
//! Near-1 eigenfunctions `φ_k` (those with `λ_k > 1 − σ`) are combined with
//! `m` orthonormal functions from the kernel of the concentration operator.
//! Mixing the `n + m` basis functions with [`MixingMatrix`] yields an
//! orthonormal family `Φ_j = ψ_j + ρ_j` in which every member carries exactly
//! `m/(m+n)` of its energy in the kernel part, so that
//!
//! ```text
//! ‖PΦ_j − Φ_j‖² ≤ σ² + (1 − σ²)·m/(m+n) ≤ ε.
//! ```

use faer::Mat;

use crate::error::{PpsfError, Result};
use crate::geometry::{
    apply_concentration_columns, build_concentration_matrix, Geometry, GridFunction,
};
use crate::linalg::{gram, product};
use crate::mixing::MixingMatrix;
use crate::spectrum::Spectrum;

/// Slack allowed on residuals for discretization and round-off.
pub const DEFAULT_DISC_TOL: f64 = 1e-6;

/// Upper limit on the kernel-space dimension `m`.
pub const MAX_KERNEL_DIM: usize = 1 << 20;

/// Splits the energy budget `ε` into the eigenvalue slack `σ²` and the
/// kernel fraction `γ`, with `σ² + (1 − σ²)γ = ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetSplit {
    epsilon: f64,
    sigma_sq: f64,
    gamma: f64,
}

impl BudgetSplit {
    pub fn new(epsilon: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(PpsfError::Budget(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Self::from_sigma_sq(epsilon, sigma * sigma)
    }

    /// `σ² = ε/10`.
    pub fn auto(epsilon: f64) -> Result<Self> {
        Self::from_sigma_sq(epsilon, epsilon / 10.0)
    }

    pub fn from_sigma_sq(epsilon: f64, sigma_sq: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(PpsfError::Budget(format!(
                "epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        if !(sigma_sq > 0.0 && sigma_sq.is_finite()) {
            return Err(PpsfError::Budget(format!(
                "sigma² must be positive, got {sigma_sq}"
            )));
        }
        if sigma_sq > epsilon {
            return Err(PpsfError::Budget(format!(
                "sigma² = {sigma_sq} exceeds epsilon = {epsilon}"
            )));
        }
        Ok(Self {
            epsilon,
            sigma_sq,
            gamma: (epsilon - sigma_sq) / (1.0 - sigma_sq),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn sigma(&self) -> f64 {
        self.sigma_sq.sqrt()
    }

    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `σ² + (1 − σ²)·m/(m+n)`.
    pub fn residual_bound(&self, n: usize, m: usize) -> f64 {
        let s2 = self.sigma_sq();
        s2 + (1.0 - s2) * m as f64 / (m + n) as f64
    }
}

/// Indices of the eigenfunctions with `λ_k > 1 − σ`, in eigenvalue order.
/// For `σ ≥ 1` this selects every positive eigenvalue.
pub fn select_family(spec: &Spectrum, sigma: f64) -> Result<(Vec<usize>, usize)> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(PpsfError::Argument(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let threshold = (1.0 - sigma).max(0.0);
    let family: Vec<usize> = spec
        .lambdas()
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > threshold)
        .map(|(k, _)| k)
        .collect();
    if family.is_empty() {
        return Err(PpsfError::EmptyFamily {
            threshold,
            top: spec.lambdas().first().copied().unwrap_or(f64::NAN),
        });
    }
    let n = family.len();
    Ok((family, n))
}

/// Largest `m` with `m/(m+n) ≤ γ`, i.e. `m = ⌊nγ/(1−γ)⌋`.
///
/// When `nγ/(1−γ)` is an integer up to a few ulps it is taken as exact, so
/// boundary cases such as `n = 10, γ = 1/11` give `m = 1`.
pub fn choose_m(n: usize, budget: &BudgetSplit) -> Result<usize> {
    if n == 0 {
        return Err(PpsfError::Argument(
            "family size n must be at least 1".into(),
        ));
    }
    let gamma = budget.gamma();
    let bound = n as f64 * gamma / (1.0 - gamma);
    if !bound.is_finite() || bound >= MAX_KERNEL_DIM as f64 {
        return Err(PpsfError::Budget(format!(
            "gamma = {gamma} requires {bound} kernel functions (limit {MAX_KERNEL_DIM})"
        )));
    }
    let nearest = bound.round();
    let m = if (bound - nearest).abs() <= 4.0 * f64::EPSILON * nearest.max(1.0) {
        nearest
    } else {
        bound.floor()
    };
    Ok(m as usize)
}

/// `m` orthonormal grid functions on disjoint blocks of nodes outside `rT`.
/// Returned as an `N × m` matrix of columns.
pub fn kernel_padding_basis(geom: &Geometry, m: usize) -> Result<Mat<f64>> {
    let n = geom.grid_points();
    let mut basis = Mat::zeros(n, m);
    if m == 0 {
        return Ok(basis);
    }
    let inside = geom.inside_range();
    let outside: Vec<usize> = (0..inside.start).chain(inside.end..n).collect();
    if outside.len() < m {
        return Err(PpsfError::InsufficientPadding {
            needed: m,
            available: outside.len(),
        });
    }
    let block = outside.len() / m;
    let value = 1.0 / (block as f64 * geom.h()).sqrt();
    for (j, chunk) in outside.chunks_exact(block).take(m).enumerate() {
        for &i in chunk {
            basis[(i, j)] = value;
        }
    }
    Ok(basis)
}

/// An orthonormal family of `m + n` pseudoeigenfunctions with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoProlateSet {
    functions: Mat<f64>,
    psi: Mat<f64>,
    rho: Mat<f64>,
    psi_norms_sq: Vec<f64>,
    rho_norms_sq: Vec<f64>,
    residuals: Vec<f64>,
    budget: BudgetSplit,
    family: Vec<usize>,
    n: usize,
    m: usize,
    mixing: MixingMatrix,
    h: f64,
}

impl PseudoProlateSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `m + n`.
    pub fn count(&self) -> usize {
        self.m + self.n
    }

    pub fn budget(&self) -> &BudgetSplit {
        &self.budget
    }

    /// Spectrum indices of the selected eigenfunctions.
    pub fn family(&self) -> &[usize] {
        &self.family
    }

    pub fn mixing(&self) -> &MixingMatrix {
        &self.mixing
    }

    /// `N × (m+n)` matrix whose column `j` is `Φ_j`.
    pub fn functions(&self) -> &Mat<f64> {
        &self.functions
    }

    /// Eigenfunction components `ψ_j` as columns.
    pub fn psi(&self) -> &Mat<f64> {
        &self.psi
    }

    /// Kernel components `ρ_j` as columns.
    pub fn rho(&self) -> &Mat<f64> {
        &self.rho
    }

    pub fn function(&self, j: usize) -> GridFunction {
        GridFunction::new(self.functions.col(j).iter().copied().collect(), self.h)
    }

    /// `‖ψ_j‖²`
    pub fn psi_norms_sq(&self) -> &[f64] {
        &self.psi_norms_sq
    }

    /// `‖ρ_j‖²`
    pub fn rho_norms_sq(&self) -> &[f64] {
        &self.rho_norms_sq
    }

    /// `‖PΦ_j − Φ_j‖²`
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// `σ² + (1 − σ²)·m/(m+n)`.
    pub fn residual_bound(&self) -> f64 {
        self.budget.residual_bound(self.n, self.m)
    }

    /// Checks every residual against `ε + disc_tol`.
    pub fn verify(&self, disc_tol: f64) -> Result<()> {
        let limit = self.budget.epsilon() + disc_tol;
        for (index, &residual) in self.residuals.iter().enumerate() {
            if residual.is_nan() || residual > limit {
                return Err(PpsfError::Verification {
                    index,
                    residual,
                    limit,
                });
            }
        }
        Ok(())
    }

    /// Gram matrix of the functions in the discrete inner product.
    pub fn gram(&self) -> Mat<f64> {
        let mut g = gram(self.functions.as_ref());
        for j in 0..g.ncols() {
            for i in 0..g.nrows() {
                g[(i, j)] *= self.h;
            }
        }
        g
    }
}

fn weighted_column_norms(a: &Mat<f64>, h: f64) -> Vec<f64> {
    (0..a.ncols())
        .map(|j| h * a.col(j).iter().map(|x| x * x).sum::<f64>())
        .collect()
}

/// Builds the family and computes all diagnostics without checking residuals.
pub fn construct_unchecked(
    spec: &Spectrum,
    geom: &Geometry,
    budget: &BudgetSplit,
) -> Result<PseudoProlateSet> {
    if spec.geometry() != geom {
        return Err(PpsfError::Argument(
            "spectrum was computed for a different geometry".into(),
        ));
    }
    let (family, n) = select_family(spec, budget.sigma())?;
    if family.iter().any(|&k| k >= spec.retained()) {
        return Err(PpsfError::Argument(format!(
            "family needs {n} eigenfunctions but the spectrum retains {}",
            spec.retained()
        )));
    }
    let m = choose_m(n, budget)?;
    let padding = kernel_padding_basis(geom, m)?;
    let mixing = MixingMatrix::new(n + m, m)?;
    let q = mixing.q();
    let grid = geom.grid_points();
    let h = geom.h();

    // Column j of Φ is Σ_k Q_jk b_k, so ψ = B_Γ (Q^Γ)ᵀ and ρ = B_Λ (Q^Λ)ᵀ.
    let gamma_basis = Mat::from_fn(grid, n, |i, k| spec.phis()[(i, family[k])]);
    let q_gamma_t = Mat::from_fn(n, n + m, |k, j| q[(j, k)]);
    let q_lambda_t = Mat::from_fn(m, n + m, |k, j| q[(j, n + k)]);
    let psi = product(gamma_basis.as_ref(), q_gamma_t.as_ref());
    let rho = product(padding.as_ref(), q_lambda_t.as_ref());
    let functions = &psi + &rho;

    let concentration = build_concentration_matrix(geom)?;
    let applied = apply_concentration_columns(geom, &concentration, &functions)?;
    let residuals = weighted_column_norms(&(&applied - &functions), h);

    Ok(PseudoProlateSet {
        psi_norms_sq: weighted_column_norms(&psi, h),
        rho_norms_sq: weighted_column_norms(&rho, h),
        residuals,
        functions,
        psi,
        rho,
        budget: *budget,
        family,
        n,
        m,
        mixing,
        h,
    })
}

/// Builds the family and fails if any residual exceeds `ε + disc_tol`.
pub fn construct_with_tolerance(
    spec: &Spectrum,
    geom: &Geometry,
    budget: &BudgetSplit,
    disc_tol: f64,
) -> Result<PseudoProlateSet> {
    let set = construct_unchecked(spec, geom, budget)?;
    set.verify(disc_tol)?;
    Ok(set)
}

/// [`construct_with_tolerance`] with [`DEFAULT_DISC_TOL`].
pub fn construct(
    spec: &Spectrum,
    geom: &Geometry,
    budget: &BudgetSplit,
) -> Result<PseudoProlateSet> {
    construct_with_tolerance(spec, geom, budget, DEFAULT_DISC_TOL)
}
