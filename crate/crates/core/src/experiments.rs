//! Counting experiments over a ladder of dilations `r`.
//!
//! Each rung computes the spectrum of the concentration operator on `rT`,
//! builds the pseudo prolate family and records the counts next to the
//! reference slopes: the Nyquist density `D = |T||Ω|/2π`, the sharp value
//! `(1−ε)⁻¹D`, and the older bounds `(1+ε)D` and `(1−2ε)⁻¹D`.

use rayon::prelude::*;

use crate::error::{PpsfError, Result};
use crate::geometry::Geometry;
use crate::pseudoprolate::{construct_unchecked, BudgetSplit, DEFAULT_DISC_TOL};
use crate::spectrum::{compute_spectrum_truncated, count_above, Spectrum};

/// Eigenvalue threshold for the Landau–Pollak count.
pub const LP_THRESHOLD: f64 = 0.5;

/// One rung of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub r: f64,
    pub epsilon: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub n: usize,
    pub m: usize,
    /// `m + n`
    pub count: usize,
    /// `#{λ_k ≥ 1/2}`
    pub lp_count: usize,
    /// `count / r`
    pub slope: f64,
    /// `(1−ε)⁻¹ D`
    pub target: f64,
    /// `(1−γ)⁻¹ D`, the finite-σ value of the sharp target.
    pub finite_sigma_target: f64,
    pub lp_slope: f64,
    /// `D`
    pub lp_target: f64,
    /// `(1+ε) D`
    pub lower_bound: f64,
    /// `(1−2ε)⁻¹ D`, infinite for `ε ≥ 1/2`.
    pub upper_bound: f64,
    pub grid_points: usize,
    pub max_residual: f64,
    pub valid: bool,
    pub note: Option<String>,
}

impl SweepRecord {
    fn empty(r: f64, geom: &Geometry, budget: &BudgetSplit) -> Self {
        let d = geom.nyquist_density();
        let eps = budget.epsilon();
        Self {
            r,
            epsilon: eps,
            sigma: budget.sigma(),
            gamma: budget.gamma(),
            n: 0,
            m: 0,
            count: 0,
            lp_count: 0,
            slope: 0.0,
            target: d / (1.0 - eps),
            finite_sigma_target: d / (1.0 - budget.gamma()),
            lp_slope: 0.0,
            lp_target: d,
            lower_bound: (1.0 + eps) * d,
            upper_bound: if 2.0 * eps < 1.0 {
                d / (1.0 - 2.0 * eps)
            } else {
                f64::INFINITY
            },
            grid_points: geom.grid_points(),
            max_residual: f64::NAN,
            valid: false,
            note: None,
        }
    }
}

/// Number of eigenfunctions worth keeping at dilation `r`.
pub fn retained_eigenpairs(geom: &Geometry) -> usize {
    (4.0 * geom.expected_trace()).ceil() as usize + 64
}

/// Spectrum plus record for a single dilation.
pub fn run_single(
    geom: &Geometry,
    budget: &BudgetSplit,
    disc_tol: f64,
) -> (SweepRecord, Option<Spectrum>) {
    let mut record = SweepRecord::empty(geom.r(), geom, budget);
    let spec = match compute_spectrum_truncated(geom, retained_eigenpairs(geom)) {
        Ok(s) => s,
        Err(e) => {
            record.note = Some(e.to_string());
            return (record, None);
        }
    };
    record.lp_count = count_above(&spec, LP_THRESHOLD).expect("threshold in (0, 1)");
    record.lp_slope = record.lp_count as f64 / geom.r();
    match construct_unchecked(&spec, geom, budget) {
        Ok(set) => {
            record.n = set.n();
            record.m = set.m();
            record.count = set.count();
            record.slope = record.count as f64 / geom.r();
            record.max_residual = set.max_residual();
            match set.verify(disc_tol) {
                Ok(()) => record.valid = true,
                Err(e) => record.note = Some(e.to_string()),
            }
        }
        Err(e) => record.note = Some(e.to_string()),
    }
    (record, Some(spec))
}

fn check_r_list(r_list: &[f64]) -> Result<()> {
    if r_list.len() < 2 {
        return Err(PpsfError::Argument(format!(
            "a sweep needs at least 2 dilations, got {}",
            r_list.len()
        )));
    }
    if !r_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(PpsfError::Argument(
            "dilations must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Runs the pipeline at every `r` of `r_list`, with the grid spacing of
/// `template` (so the number of points grows with `r`).
pub fn run_sweep(
    template: &Geometry,
    r_list: &[f64],
    budget: &BudgetSplit,
) -> Result<Vec<SweepRecord>> {
    run_sweep_with_tolerance(template, r_list, budget, DEFAULT_DISC_TOL)
}

pub fn run_sweep_with_tolerance(
    template: &Geometry,
    r_list: &[f64],
    budget: &BudgetSplit,
    disc_tol: f64,
) -> Result<Vec<SweepRecord>> {
    check_r_list(r_list)?;
    let geoms = r_list
        .iter()
        .map(|&r| template.rescaled(r))
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<SweepRecord> = geoms
        .par_iter()
        .map(|g| run_single(g, budget, disc_tol).0)
        .collect();
    records.sort_by(|a, b| a.r.total_cmp(&b.r));
    Ok(records)
}

/// Outcome of comparing the largest-`r` slope with the non-sharp bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub r: f64,
    pub slope: f64,
    pub lower_limit: f64,
    pub upper_limit: f64,
    pub tol_band: f64,
    pub lower_pass: bool,
    pub upper_pass: bool,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.lower_pass && self.upper_pass
    }
}

/// Checks `(1+ε)D − 0.1D ≤ slope ≤ (1−2ε)⁻¹D + 0.1D` at the largest `r`.
pub fn sandwich_check(records: &[SweepRecord]) -> Result<SandwichReport> {
    let last = records
        .iter()
        .max_by(|a, b| a.r.total_cmp(&b.r))
        .ok_or_else(|| PpsfError::NoValidRecords("the sweep is empty".into()))?;
    if !last.valid {
        return Err(PpsfError::NoValidRecords(format!(
            "largest-r record (r = {}) is invalid: {}",
            last.r,
            last.note.as_deref().unwrap_or("residual above tolerance")
        )));
    }
    let tol_band = 0.1 * last.lp_target;
    let lower_limit = last.lower_bound - tol_band;
    let upper_limit = last.upper_bound + tol_band;
    Ok(SandwichReport {
        r: last.r,
        slope: last.slope,
        lower_limit,
        upper_limit,
        tol_band,
        lower_pass: last.slope >= lower_limit,
        upper_pass: last.slope <= upper_limit,
    })
}
