//! Slepian's comparison sequence built from the prolates, and the
//! eigenvalue-count proxy for his approximate dimension.
//!
//! The formula for `g_j` is applied exactly as it is usually printed:
//!
//! ```text
//! g_j(t) = √(ε/(1−λ_j)) φ_j(t) + √(ε/(λ_j(1−λ_j))) 1_{[−1,1]}(2t/T) φ_j(t)
//! ```
//!
//! Both prefactors scale like `√ε` and blow up as `λ_j → 1`; the printed
//! form may contain typos, but no derivation is available to correct it.

use crate::error::{PpsfError, Result};
use crate::geometry::{Geometry, GridFunction};
use crate::spectrum::Spectrum;

/// Eigenvalues within this distance of 0 or 1 make `g_j` undefined.
pub const EXCLUSION_GUARD: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SlepianSequence<'a> {
    /// `(j, g_j)` for every admissible index `j ≤ j_max`.
    pub functions: Vec<(usize, GridFunction)>,
    /// Indices skipped because `λ_j` is numerically 0 or 1.
    pub excluded: Vec<usize>,
    pub epsilon: f64,
    /// Approximation level `ε′ > ε`; carried as metadata only.
    pub epsilon_prime: Option<f64>,
    pub source: &'a Spectrum,
}

impl SlepianSequence<'_> {
    /// Copies of the functions rescaled to unit discrete norm (for plotting).
    pub fn normalized(&self) -> Vec<(usize, GridFunction)> {
        self.functions
            .iter()
            .map(|(j, g)| (*j, g.scaled(1.0 / g.norm_sq().sqrt())))
            .collect()
    }
}

/// Prefactors `(outer, inner)`: `g_j = outer·φ_j` off `rT` and
/// `(outer + inner)·φ_j` on `rT`.
pub fn slepian_prefactors(lambda: f64, epsilon: f64) -> (f64, f64) {
    let outer = (epsilon / (1.0 - lambda)).sqrt();
    let inner = (epsilon / (lambda * (1.0 - lambda))).sqrt();
    (outer, inner)
}

/// `g_0, …, g_{j_max}` on the grid. The indicator `1_{[−1,1]}(2t/T)` is
/// realized as the indicator of the dilated interval `rT`.
pub fn slepian_g<'a>(
    spec: &'a Spectrum,
    geom: &Geometry,
    epsilon: f64,
    j_max: usize,
) -> Result<SlepianSequence<'a>> {
    if spec.geometry() != geom {
        return Err(PpsfError::Argument(
            "spectrum was computed for a different geometry".into(),
        ));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(PpsfError::Argument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if j_max >= spec.retained() {
        return Err(PpsfError::Argument(format!(
            "j_max = {j_max} but only {} eigenfunctions are available",
            spec.retained()
        )));
    }
    let inside = geom.inside_range();
    let mut functions = Vec::new();
    let mut excluded = Vec::new();
    for j in 0..=j_max {
        let lambda = spec.lambdas()[j];
        if lambda <= EXCLUSION_GUARD || lambda >= 1.0 - EXCLUSION_GUARD {
            excluded.push(j);
            continue;
        }
        let (outer, inner) = slepian_prefactors(lambda, epsilon);
        let phi = spec.phi(j);
        let values = phi
            .values()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let indicator = if inside.contains(&i) { 1.0 } else { 0.0 };
                outer * v + inner * indicator * v
            })
            .collect();
        functions.push((j, GridFunction::new(values, geom.h())));
    }
    Ok(SlepianSequence {
        functions,
        excluded,
        epsilon,
        epsilon_prime: None,
        source: spec,
    })
}

/// Count proxy for the approximate dimension: `#{λ_k > ε}`.
pub fn slepian_count(spec: &Spectrum, epsilon: f64) -> usize {
    spec.lambdas().iter().filter(|&&l| l > epsilon).count()
}

/// Least-squares slope of `(x, y)` pairs.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(PpsfError::Argument("need at least two points".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(PpsfError::Argument(
            "abscissae are all identical; slope is undefined".into(),
        ));
    }
    Ok(sxy / sxx)
}

/// Slope of the count proxy `#{λ_k > ε}` against `r` over a family of spectra.
/// This is a proxy for, not the exact value of, the minimax dimension.
pub fn slepian_dimension_slope(spectra: &[Spectrum], epsilon: f64) -> Result<f64> {
    if spectra.len() < 3 {
        return Err(PpsfError::Argument(format!(
            "need spectra for at least 3 values of r, got {}",
            spectra.len()
        )));
    }
    let points: Vec<(f64, f64)> = spectra
        .iter()
        .map(|s| (s.geometry().r(), slepian_count(s, epsilon) as f64))
        .collect();
    least_squares_slope(&points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::compute_spectrum;
    use std::f64::consts::PI;

    fn setup() -> (Geometry, Spectrum) {
        let g = Geometry::with_resolution(0.5, PI, 4.0, 1.0, 16.0).unwrap();
        let s = compute_spectrum(&g).unwrap();
        (g, s)
    }

    #[test]
    fn piecewise_multiple_of_phi() {
        let (g, s) = setup();
        let seq = slepian_g(&s, &g, 0.1, 8).unwrap();
        let inside = g.inside_range();
        for (j, gj) in &seq.functions {
            let phi = s.phi(*j);
            let (outer, inner) = slepian_prefactors(s.lambdas()[*j], 0.1);
            for i in 0..g.grid_points() {
                let factor = if inside.contains(&i) {
                    outer + inner
                } else {
                    outer
                };
                let expected = factor * phi.values()[i];
                assert!((gj.values()[i] - expected).abs() <= 1e-10 * (1.0 + expected.abs()));
            }
        }
    }

    #[test]
    fn doubling_epsilon_scales_by_sqrt2() {
        let (g, s) = setup();
        let a = slepian_g(&s, &g, 0.05, 8).unwrap();
        let b = slepian_g(&s, &g, 0.1, 8).unwrap();
        assert_eq!(a.excluded, b.excluded);
        for ((_, ga), (_, gb)) in a.functions.iter().zip(&b.functions) {
            for (x, y) in ga.values().iter().zip(gb.values()) {
                assert!((y - 2f64.sqrt() * x).abs() <= 1e-10 * (1.0 + y.abs()));
            }
        }
    }

    #[test]
    fn excludes_saturated_eigenvalues() {
        let (g, s) = setup();
        let seq = slepian_g(&s, &g, 0.1, 8).unwrap();
        for &j in &seq.excluded {
            let l = s.lambdas()[j];
            assert!(l >= 1.0 - EXCLUSION_GUARD || l <= EXCLUSION_GUARD);
        }
        assert_eq!(seq.functions.len() + seq.excluded.len(), 9);
        for (_, f) in seq.normalized() {
            assert!((f.norm_sq() - 1.0).abs() < 1e-12);
        }
        assert!(slepian_g(&s, &g, 0.1, s.retained()).is_err());
        assert!(slepian_g(&s, &g, 0.0, 2).is_err());
    }

    #[test]
    fn slope_needs_three_distinct_r() {
        let (_, s) = setup();
        let two = vec![s.clone(), s.clone()];
        assert!(slepian_dimension_slope(&two, 0.1).is_err());
        let same = vec![s.clone(), s.clone(), s];
        assert!(matches!(
            slepian_dimension_slope(&same, 0.1),
            Err(PpsfError::Argument(_))
        ));
    }

    #[test]
    fn regression_slope() {
        let pts = [(1.0, 3.0), (2.0, 5.0), (4.0, 9.0)];
        assert!((least_squares_slope(&pts).unwrap() - 2.0).abs() < 1e-14);
    }
}
