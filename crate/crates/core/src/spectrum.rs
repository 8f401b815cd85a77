//! Ordered eigenpairs of the discretized concentration operator.

use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::{Mat, Par};

use crate::error::{PpsfError, Result};
use crate::geometry::{build_concentration_matrix, Geometry, GridFunction};

/// Tolerance on eigenvalues leaving `[0, 1]` through round-off.
pub const EIGENVALUE_TOL: f64 = 1e-8;

/// Eigenvalues (nonincreasing) and `h`-orthonormal eigenfunctions of the
/// concentration matrix, zero-extended to the whole window grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    geom: Geometry,
    lambdas: Vec<f64>,
    /// `N × K` matrix, column `k` is `φ_k` sampled on the full grid.
    phis: Mat<f64>,
}

impl Spectrum {
    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    /// Raw (unclamped) eigenvalues in nonincreasing order.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Eigenvalues clamped to `[0, 1]`, for threshold selection.
    pub fn clamped_lambdas(&self) -> Vec<f64> {
        self.lambdas.iter().map(|l| l.clamp(0.0, 1.0)).collect()
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Number of eigenfunctions retained (equal to [`len`](Self::len) unless
    /// the spectrum was truncated).
    pub fn retained(&self) -> usize {
        self.phis.ncols()
    }

    pub fn phis(&self) -> &Mat<f64> {
        &self.phis
    }

    pub fn phi(&self, k: usize) -> GridFunction {
        let col = self.phis.col(k);
        GridFunction::new(col.iter().copied().collect(), self.geom.h())
    }

    pub fn trace(&self) -> f64 {
        self.lambdas.iter().sum()
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.lambdas.iter().map(|l| l * l).sum()
    }
}

fn frobenius(a: &Mat<f64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)] * a[(i, j)];
        }
    }
    s.sqrt()
}

/// Full symmetric eigendecomposition of the concentration matrix.
pub fn compute_spectrum(geom: &Geometry) -> Result<Spectrum> {
    compute_spectrum_truncated(geom, usize::MAX)
}

/// Like [`compute_spectrum`] but keeps only the first `keep` eigenfunctions.
/// All eigenvalues are always retained.
pub fn compute_spectrum_truncated(geom: &Geometry, keep: usize) -> Result<Spectrum> {
    let p = build_concentration_matrix(geom)?;
    let m = p.nrows();

    let mut u = Mat::<f64>::zeros(m, m);
    let mut s = Diag::<f64>::zeros(m);
    let par = Par::Seq;
    let mut buf = MemBuffer::new(evd::self_adjoint_evd_scratch::<f64>(
        m,
        ComputeEigenvectors::Yes,
        par,
        Default::default(),
    ));
    evd::self_adjoint_evd(
        p.as_ref(),
        s.as_mut(),
        Some(u.as_mut()),
        par,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|e| PpsfError::Numerical {
        size: m,
        trace: (0..m).map(|i| p[(i, i)]).sum(),
        frobenius: frobenius(&p),
        reason: format!("{e:?}"),
    })?;

    let raw: Vec<f64> = s.column_vector().iter().copied().collect();
    // Stable sort keeps ties in the solver's original order.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| raw[b].total_cmp(&raw[a]));

    let lambdas: Vec<f64> = order.iter().map(|&k| raw[k]).collect();
    let kept = keep.min(m);
    let inside = geom.inside_range();
    let scale = 1.0 / geom.h().sqrt();
    let mut phis = Mat::<f64>::zeros(geom.grid_points(), kept);
    for (c, &k) in order.iter().take(kept).enumerate() {
        let v = u.col(k);
        let peak = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let first = v
            .iter()
            .copied()
            .find(|x| x.abs() > f64::EPSILON * peak)
            .unwrap_or(1.0);
        let sign = if first < 0.0 { -scale } else { scale };
        for (i, x) in v.iter().enumerate() {
            phis[(inside.start + i, c)] = sign * x;
        }
    }

    Ok(Spectrum {
        geom: *geom,
        lambdas,
        phis,
    })
}

/// Number of eigenvalues not smaller than `gamma`.
pub fn count_above(spec: &Spectrum, gamma: f64) -> Result<usize> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(PpsfError::Argument(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    Ok(spec.lambdas.iter().filter(|&&l| l >= gamma).count())
}

/// Width of the plunge region, `#{λ ≥ δ} − #{λ ≥ 1−δ}`.
pub fn plunge_width(spec: &Spectrum, delta: f64) -> Result<usize> {
    Ok(count_above(spec, delta)? - count_above(spec, 1.0 - delta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::apply_concentration;
    use std::f64::consts::PI;

    fn spectrum(r: f64, n: usize) -> Spectrum {
        compute_spectrum(&Geometry::new(0.5, PI, r, 1.0, n).unwrap()).unwrap()
    }

    #[test]
    fn eigenpairs_are_orthonormal_and_ordered() {
        let s = spectrum(4.0, 193);
        let geom = *s.geometry();
        let p = build_concentration_matrix(&geom).unwrap();
        assert!(s.lambdas().windows(2).all(|w| w[0] >= w[1]));
        for &l in s.lambdas() {
            assert!((-EIGENVALUE_TOL..=1.0 + EIGENVALUE_TOL).contains(&l));
        }
        for a in 0..s.len() {
            let pa = s.phi(a);
            let rq = pa.inner(&apply_concentration(&geom, &p, &pa).unwrap());
            assert!((rq - s.lambdas()[a]).abs() < 1e-9);
            for b in 0..s.len() {
                let g = pa.inner(&s.phi(b));
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((g - e).abs() < 1e-10, "gram[{a},{b}] = {g}");
            }
        }
    }

    #[test]
    fn trace_is_preserved() {
        let s = spectrum(8.0, 400);
        let p = build_concentration_matrix(s.geometry()).unwrap();
        let tr: f64 = (0..p.nrows()).map(|i| p[(i, i)]).sum();
        assert!((s.trace() - tr).abs() < 1e-9);
    }

    #[test]
    fn unit_cell_trace_is_one() {
        // margin = t_half; with margin 1 the boundary misalignment alone is ~3e-3.
        let s = compute_spectrum(&Geometry::new(0.5, PI, 1.0, 0.5, 1024).unwrap()).unwrap();
        assert!((s.trace() - 1.0).abs() <= 1e-3, "{}", s.trace());
    }

    #[test]
    fn sign_convention_and_determinism() {
        let a = spectrum(4.0, 129);
        let b = spectrum(4.0, 129);
        assert_eq!(a, b);
        for k in 0..a.retained() {
            let col: Vec<f64> = a.phi(k).into_values();
            let peak = col.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let first = col.iter().find(|x| x.abs() > f64::EPSILON * peak).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn truncation_keeps_lambdas() {
        let g = Geometry::new(0.5, PI, 4.0, 1.0, 129).unwrap();
        let full = compute_spectrum(&g).unwrap();
        let cut = compute_spectrum_truncated(&g, 5).unwrap();
        assert_eq!(cut.lambdas(), full.lambdas());
        assert_eq!(cut.retained(), 5);
        for k in 0..5 {
            assert_eq!(cut.phi(k), full.phi(k));
        }
    }

    #[test]
    fn count_above_rejects_out_of_range() {
        let s = spectrum(2.0, 65);
        assert!(count_above(&s, 0.0).is_err());
        assert!(count_above(&s, 1.0).is_err());
        assert!(count_above(&s, f64::NAN).is_err());
        assert!(count_above(&s, 1.0 - 1e-15).unwrap() <= count_above(&s, 0.5).unwrap());
    }

    #[test]
    fn second_moment_below_first() {
        let s = spectrum(8.0, 321);
        assert!(s.sum_of_squares() <= s.trace());
        let clamped = s.clamped_lambdas();
        assert!(clamped.iter().all(|l| (0.0..=1.0).contains(l)));
    }
}
