//! Subcommand implementations. Each returns the lines it wants printed.

use std::path::PathBuf;

use ppsf::experiments::{retained_eigenpairs, run_sweep_with_tolerance};
use ppsf::pseudoprolate::construct_unchecked;
use ppsf::spectrum::compute_spectrum_truncated;
use ppsf::{sandwich_check, slepian_g, PpsfError};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{self, r_label, Cell, Table};

#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub messages: Vec<String>,
}

impl Outcome {
    fn note(&mut self, msg: impl Into<String>) {
        self.messages.push(msg.into());
    }
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = cfg.output_dir();
    output::ensure_dir(&dir)?;
    Ok(dir)
}

/// `spectrum_r{r}.csv` for every `r` in the list.
pub fn eig(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let dir = out_dir(cfg)?;
    let mut outcome = Outcome::default();
    for &r in &cfg.sweep.r_list {
        let geom = cfg.geometry.at(r)?;
        let spec = compute_spectrum_truncated(&geom, 0)?;
        let mut t = Table::new(&["k", "lambda"], cfg.output.csv_precision);
        for (k, &l) in spec.lambdas().iter().enumerate() {
            t.row(&[Cell::Int(k), Cell::Float(l)]);
        }
        let path = dir.join(format!("spectrum_r{}.csv", r_label(r)));
        outcome.files.push(output::write_file(&path, t.as_str())?);
        outcome.note(format!(
            "r = {}: {} eigenvalues, trace {:.6} (expected {:.6})",
            r_label(r),
            spec.len(),
            spec.trace(),
            geom.expected_trace()
        ));
    }
    Ok(outcome)
}

/// `pseudoprolates_r{r}.csv` for every `r`; fails if any residual exceeds
/// its bound plus the discretization tolerance.
pub fn construct(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let dir = out_dir(cfg)?;
    let budget = cfg.budget.split()?;
    let disc_tol = cfg.tolerances.disc_tol;
    let mut outcome = Outcome::default();
    let mut failures = Vec::new();
    for &r in &cfg.sweep.r_list {
        let geom = cfg.geometry.at(r)?;
        let spec = compute_spectrum_truncated(&geom, retained_eigenpairs(&geom))?;
        let set = match construct_unchecked(&spec, &geom, &budget) {
            Ok(s) => s,
            Err(e @ PpsfError::EmptyFamily { .. }) => {
                return Err(CliError::Numerical(format!(
                    "r = {}: {e}; increase budget.sigma or r",
                    r_label(r)
                )))
            }
            Err(e) => return Err(e.into()),
        };
        let bound = set.residual_bound();
        let mut t = Table::new(
            &["j", "rho_norm_sq", "residual_sq", "bound"],
            cfg.output.csv_precision,
        );
        for j in 0..set.count() {
            let res = set.residuals()[j];
            t.row(&[
                Cell::Int(j),
                Cell::Float(set.rho_norms_sq()[j]),
                Cell::Float(res),
                Cell::Float(bound),
            ]);
            if res.is_nan() || res > bound + disc_tol {
                failures.push(format!(
                    "r = {}, j = {j}: residual {res:.3e} > bound {bound:.3e} + {disc_tol:.1e}",
                    r_label(r)
                ));
            }
        }
        let path = dir.join(format!("pseudoprolates_r{}.csv", r_label(r)));
        outcome.files.push(output::write_file(&path, t.as_str())?);

        if cfg.output.emit_functions {
            let fdir = dir.join(format!("functions_r{}", r_label(r)));
            output::ensure_dir(&fdir)?;
            let nodes = geom.nodes();
            for j in 0..set.count() {
                let mut t = Table::new(&["x", "phi", "psi", "rho"], cfg.output.csv_precision);
                for (i, &x) in nodes.iter().enumerate() {
                    t.row(&[
                        Cell::Float(x),
                        Cell::Float(set.functions()[(i, j)]),
                        Cell::Float(set.psi()[(i, j)]),
                        Cell::Float(set.rho()[(i, j)]),
                    ]);
                }
                let path = fdir.join(format!("phi_{j}.csv"));
                outcome.files.push(output::write_file(&path, t.as_str())?);
            }
        }
        outcome.note(format!(
            "r = {}: n = {}, m = {}, {} functions, max residual {:.3e}, bound {:.3e}",
            r_label(r),
            set.n(),
            set.m(),
            set.count(),
            set.max_residual(),
            bound
        ));
    }
    if failures.is_empty() {
        Ok(outcome)
    } else {
        Err(CliError::Numerical(format!(
            "residual check failed:\n  {}",
            failures.join("\n  ")
        )))
    }
}

/// `sweep.csv` (and `sweep.svg` when plots are enabled).
pub fn sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.sweep.r_list.len() < 2 {
        return Err(CliError::Validation(vec![format!(
            "sweep.r_list: a sweep needs at least 2 values, got {}",
            cfg.sweep.r_list.len()
        )]));
    }
    let dir = out_dir(cfg)?;
    let budget = cfg.budget.split()?;
    let template = cfg.geometry.at(cfg.sweep.r_list[0])?;
    let records = run_sweep_with_tolerance(
        &template,
        &cfg.sweep.r_list,
        &budget,
        cfg.tolerances.disc_tol,
    )?;

    let mut outcome = Outcome::default();
    let table = output::sweep_table(&records, cfg.output.csv_precision);
    outcome
        .files
        .push(output::write_file(&dir.join("sweep.csv"), table.as_str())?);
    if cfg.output.emit_plots {
        outcome.files.push(output::write_file(
            &dir.join("sweep.svg"),
            &output::sweep_svg(&records),
        )?);
    }
    for rec in &records {
        outcome.note(format!(
            "r = {:>6}: count {:>5}  slope {:.4}  lp_slope {:.4}  target {:.4}{}",
            r_label(rec.r),
            rec.count,
            rec.slope,
            rec.lp_slope,
            rec.target,
            match &rec.note {
                Some(n) => format!("  [invalid: {n}]"),
                None if !rec.valid => "  [invalid]".to_string(),
                None => String::new(),
            }
        ));
    }
    let report = sandwich_check(&records)?;
    outcome.note(format!(
        "r = {}: slope {:.4} vs [{:.4}, {:.4}] -> {}",
        r_label(report.r),
        report.slope,
        report.lower_limit,
        report.upper_limit,
        if report.passed() {
            "within bounds"
        } else {
            "outside bounds"
        }
    ));
    Ok(outcome)
}

/// `slepian_g.csv` with grid samples of `g_0..g_jmax` and
/// `slepian_excluded.csv` listing indices whose eigenvalue is saturated.
pub fn slepian(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let dir = out_dir(cfg)?;
    let r = cfg.sweep.r_list[0];
    let geom = cfg.geometry.at(r)?;
    let j_max = cfg.slepian.j_max;
    let spec = compute_spectrum_truncated(&geom, j_max + 1)?;
    let seq = slepian_g(&spec, &geom, cfg.budget.epsilon, j_max)?;
    if seq.functions.is_empty() {
        return Err(CliError::Numerical(format!(
            "all of g_0..g_{j_max} are excluded (eigenvalues within 1e-12 of 0 or 1); \
             raise slepian.j_max"
        )));
    }

    let mut header = vec!["x".to_string()];
    header.extend(seq.functions.iter().map(|(j, _)| format!("g_{j}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::new(&header, cfg.output.csv_precision);
    for (i, x) in geom.nodes().into_iter().enumerate() {
        let mut row = vec![Cell::Float(x)];
        row.extend(
            seq.functions
                .iter()
                .map(|(_, g)| Cell::Float(g.values()[i])),
        );
        t.row(&row);
    }
    let mut outcome = Outcome::default();
    outcome
        .files
        .push(output::write_file(&dir.join("slepian_g.csv"), t.as_str())?);

    let mut ex = Table::new(&["j", "lambda"], cfg.output.csv_precision);
    for &j in &seq.excluded {
        ex.row(&[Cell::Int(j), Cell::Float(spec.lambdas()[j])]);
    }
    outcome.files.push(output::write_file(
        &dir.join("slepian_excluded.csv"),
        ex.as_str(),
    )?);
    outcome.note(format!(
        "r = {}: {} functions written, excluded {:?}",
        r_label(r),
        seq.functions.len(),
        seq.excluded
    ));
    Ok(outcome)
}
