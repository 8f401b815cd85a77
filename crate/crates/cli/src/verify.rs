//! Read-only invariant suite behind `ppsf verify`.

use std::f64::consts::PI;
use std::time::Instant;

use ppsf::linalg::gram;
use ppsf::mixing::{orthogonality_defect, row_energies};
use ppsf::pseudoprolate::construct_unchecked;
use ppsf::spectrum::compute_spectrum_truncated;
use ppsf::{
    compute_spectrum, dft_mixing_matrix, dpss_sequences, select_lambda_columns, Geometry, Result,
    Spectrum,
};

use crate::config::RunConfig;
use crate::error::CliError;

/// Largest order checked by the mixing-matrix suites.
pub const MAX_MIXING_ORDER: usize = 256;
/// Dilation and grid size of the trace check.
pub const TRACE_R: f64 = 8.0;
pub const TRACE_GRID: usize = 1024;
/// DPSS reference: length, half-bandwidth (cycles per sample), eigenvalues compared.
pub const DPSS_LEN: usize = 128;
pub const DPSS_W: f64 = 0.125;
pub const DPSS_TOP: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Largest `|QᵀQ − I|` over all orders `1..=max_order`.
pub fn mixing_orthogonality(max_order: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 1..=max_order {
        worst = worst.max(orthogonality_defect(&dft_mixing_matrix(k)?));
    }
    Ok(worst)
}

/// Largest `|‖Q_j^Λ‖² − m/k|` over every order `k ≤ max_order`, every
/// `m ≤ k` and every row `j`.
pub fn mixing_row_energy(max_order: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 1..=max_order {
        let x = dft_mixing_matrix(k)?;
        for m in 0..=k {
            let target = m as f64 / k as f64;
            let cols = select_lambda_columns(k, m)?;
            for e in row_energies(&x, &cols) {
                worst = worst.max((e - target).abs());
            }
        }
    }
    Ok(worst)
}

/// Largest `|h·ΦᵀΦ − I|` over the retained eigenfunctions.
pub fn eigen_gram_defect(spec: &Spectrum) -> f64 {
    let h = spec.geometry().h();
    let g = gram(spec.phis().as_ref());
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let e = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((h * g[(i, j)] - e).abs());
        }
    }
    worst
}

/// Relative error of `Σλ` against `|rT||Ω|/2π` on an `n`-point grid.
pub fn trace_relative_error(cfg: &RunConfig, r: f64, n: usize) -> Result<f64> {
    let g = &cfg.geometry;
    let geom = Geometry::new(g.t_half, g.omega_half, r, g.margin(), n)?;
    let spec = compute_spectrum_truncated(&geom, 0)?;
    Ok((spec.trace() - geom.expected_trace()).abs() / geom.expected_trace())
}

/// Grid on which the Nyström operator reproduces the DPSS matrix of length
/// `len`: unit sample spacing, `rT` covering `len` samples, `Ω = 2πW`.
pub fn matched_dpss_geometry(len: usize, w: f64) -> Result<Geometry> {
    let half = len as f64 / 2.0;
    Geometry::new(half, 2.0 * PI * w, 1.0, half, 8 * len + 1)
}

/// Largest difference between the top `count` DPSS concentrations and the
/// top Nyström eigenvalues on the matched geometry.
pub fn backend_agreement(len: usize, w: f64, count: usize) -> Result<f64> {
    let dpss = dpss_sequences(len, w, count)?;
    let spec = compute_spectrum_truncated(&matched_dpss_geometry(len, w)?, 0)?;
    Ok(dpss
        .concentrations
        .iter()
        .zip(spec.lambdas())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

fn timed(
    name: &'static str,
    f: impl FnOnce() -> std::result::Result<(bool, String), CliError>,
) -> SuiteResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    SuiteResult {
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn within(value: f64, tol: f64) -> bool {
    value <= tol
}

pub fn run_suites(cfg: &RunConfig) -> Vec<SuiteResult> {
    let tol = &cfg.tolerances;
    let mut results = Vec::new();

    results.push(timed("mixing-orthogonality", || {
        let d = mixing_orthogonality(MAX_MIXING_ORDER)?;
        Ok((
            within(d, tol.orthogonality),
            format!(
                "max |QᵀQ - I| = {d:.2e} for orders <= {MAX_MIXING_ORDER} (tol {:.1e})",
                tol.orthogonality
            ),
        ))
    }));

    results.push(timed("row-energy", || {
        let d = mixing_row_energy(MAX_MIXING_ORDER)?;
        Ok((
            within(d, tol.row_energy),
            format!(
                "max |row energy - m/k| = {d:.2e}, all m <= k <= {MAX_MIXING_ORDER} (tol {:.1e})",
                tol.row_energy
            ),
        ))
    }));

    let r0 = cfg.sweep.r_list[0];
    results.push(timed("eigen-gram", || {
        let spec = compute_spectrum(&cfg.geometry.at(r0)?)?;
        let d = eigen_gram_defect(&spec);
        Ok((
            within(d, tol.gram),
            format!("r = {r0}: max |h ΦᵀΦ - I| = {d:.2e} (tol {:.1e})", tol.gram),
        ))
    }));

    results.push(timed("trace", || {
        let e = trace_relative_error(cfg, TRACE_R, TRACE_GRID)?;
        Ok((
            within(e, tol.trace_relative),
            format!(
                "r = {TRACE_R}, N = {TRACE_GRID}: relative error {e:.2e} (tol {:.1e})",
                tol.trace_relative
            ),
        ))
    }));

    results.push(timed("construction", || {
        let geom = cfg.geometry.at(r0)?;
        let budget = cfg.budget.split()?;
        let spec = compute_spectrum_truncated(&geom, ppsf::experiments::retained_eigenpairs(&geom))?;
        let set = construct_unchecked(&spec, &geom, &budget)?;
        let bound = set.residual_bound();
        let residual_ok = set.residuals().iter().all(|&x| x <= bound + tol.disc_tol)
            && bound <= budget.epsilon() + tol.disc_tol;
        let share = set.m() as f64 / set.count() as f64;
        let split = set
            .rho_norms_sq()
            .iter()
            .map(|x| (x - share).abs())
            .fold(0.0, f64::max);
        let g = set.gram();
        let mut gd = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let e = if i == j { 1.0 } else { 0.0 };
                gd = gd.max((g[(i, j)] - e).abs());
            }
        }
        Ok((
            residual_ok && within(split, tol.split) && within(gd, tol.gram),
            format!(
                "r = {r0}: n = {}, m = {}, max residual {:.3e} <= bound {bound:.3e}; split defect {split:.1e}; gram defect {gd:.1e}",
                set.n(),
                set.m(),
                set.max_residual()
            ),
        ))
    }));

    results.push(timed("backend-agreement", || {
        let d = backend_agreement(DPSS_LEN, DPSS_W, DPSS_TOP)?;
        Ok((
            within(d, tol.backend),
            format!("DPSS L = {DPSS_LEN}, W = {DPSS_W}: top-{DPSS_TOP} max difference {d:.2e} (tol {:.1e})", tol.backend),
        ))
    }));

    results
}

pub fn render_table(results: &[SuiteResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    results
        .iter()
        .map(|r| {
            format!(
                "{:<width$}  {}  {:>7.2}s  {}\n",
                r.name,
                if r.passed { "PASS" } else { "FAIL" },
                r.seconds,
                r.detail
            )
        })
        .collect()
}
