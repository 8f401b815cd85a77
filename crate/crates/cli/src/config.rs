//! Run configuration: a TOML file with `geometry`, `budget`, `sweep`,
//! `output`, `slepian` and `tolerances` tables, every field optional.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use ppsf::{BudgetSplit, Geometry, DEFAULT_DISC_TOL};

use crate::error::CliError;

pub const OUT_DIR_ENV: &str = "PPSF_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "ppsf-out";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoKeyword {
    Auto,
}

/// `sigma = "auto"` (σ² = ε/10) or an explicit σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigmaSetting {
    Value(f64),
    Keyword(AutoKeyword),
}

impl Default for SigmaSetting {
    fn default() -> Self {
        SigmaSetting::Keyword(AutoKeyword::Auto)
    }
}

impl std::str::FromStr for SigmaSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            Ok(SigmaSetting::Keyword(AutoKeyword::Auto))
        } else {
            s.parse::<f64>()
                .map(SigmaSetting::Value)
                .map_err(|_| format!("expected a number or \"auto\", got {s:?}"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub t_half: f64,
    pub omega_half: f64,
    /// Defaults to `max(t_half, 1)` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    pub points_per_unit: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            t_half: 0.5,
            omega_half: PI,
            margin: None,
            points_per_unit: 32.0,
        }
    }
}

impl GeometryConfig {
    pub fn margin(&self) -> f64 {
        self.margin
            .unwrap_or_else(|| Geometry::default_margin(self.t_half))
    }

    pub fn at(&self, r: f64) -> Result<Geometry, CliError> {
        Geometry::with_resolution(
            self.t_half,
            self.omega_half,
            r,
            self.margin(),
            self.points_per_unit,
        )
        .map_err(|e| CliError::Validation(vec![format!("geometry: {e}")]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetConfig {
    pub epsilon: f64,
    pub sigma: SigmaSetting,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.2,
            sigma: SigmaSetting::default(),
        }
    }
}

impl BudgetConfig {
    pub fn split(&self) -> Result<BudgetSplit, CliError> {
        let b = match self.sigma {
            SigmaSetting::Keyword(AutoKeyword::Auto) => BudgetSplit::auto(self.epsilon),
            SigmaSetting::Value(s) => BudgetSplit::new(self.epsilon, s),
        };
        b.map_err(|e| CliError::Validation(vec![format!("budget: {e}")]))
    }

    pub fn sigma_label(&self) -> &'static str {
        match self.sigma {
            SigmaSetting::Keyword(AutoKeyword::Auto) => "auto (sigma^2 = epsilon/10)",
            SigmaSetting::Value(_) => "explicit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub r_list: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            r_list: vec![8.0, 16.0, 32.0, 64.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    pub emit_plots: bool,
    /// Write `phi_{j}.csv` samples of every constructed function.
    pub emit_functions: bool,
    pub csv_precision: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: None,
            emit_plots: false,
            emit_functions: false,
            csv_precision: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlepianConfig {
    pub j_max: usize,
}

impl Default for SlepianConfig {
    fn default() -> Self {
        Self { j_max: 8 }
    }
}

/// Thresholds used by `verify` and by the residual check of `construct`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    pub orthogonality: f64,
    pub row_energy: f64,
    pub gram: f64,
    pub trace_relative: f64,
    pub split: f64,
    pub disc_tol: f64,
    pub backend: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            orthogonality: 1e-12,
            row_energy: 1e-12,
            gram: 1e-9,
            trace_relative: 1e-3,
            split: 1e-10,
            disc_tol: DEFAULT_DISC_TOL,
            backend: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub budget: BudgetConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
    pub slepian: SlepianConfig,
    pub tolerances: ToleranceConfig,
}

fn check_positive(errors: &mut Vec<String>, path: &str, v: f64) {
    if !(v.is_finite() && v > 0.0) {
        errors.push(format!("{path}: must be positive and finite, got {v}"));
    }
}

fn check_nonnegative(errors: &mut Vec<String>, path: &str, v: f64) {
    if !(v.is_finite() && v >= 0.0) {
        errors.push(format!("{path}: must be nonnegative and finite, got {v}"));
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(vec![format!("config: {e}")]))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut errors = Vec::new();
        let g = &self.geometry;
        check_positive(&mut errors, "geometry.t_half", g.t_half);
        check_positive(&mut errors, "geometry.omega_half", g.omega_half);
        check_positive(&mut errors, "geometry.points_per_unit", g.points_per_unit);
        if let Some(m) = g.margin {
            check_positive(&mut errors, "geometry.margin", m);
            if m < g.t_half {
                errors.push(format!(
                    "geometry.margin: must be at least t_half ({}), got {m}",
                    g.t_half
                ));
            }
        }

        let eps = self.budget.epsilon;
        if !(eps > 0.0 && eps < 1.0) {
            errors.push(format!("budget.epsilon: must lie in (0, 1), got {eps}"));
        }
        if let SigmaSetting::Value(s) = self.budget.sigma {
            if !(s.is_finite() && s > 0.0) {
                errors.push(format!("budget.sigma: must be positive, got {s}"));
            } else if eps > 0.0 && s * s > eps {
                errors.push(format!(
                    "budget.sigma: sigma^2 = {} exceeds epsilon = {eps}",
                    s * s
                ));
            }
        }

        let r = &self.sweep.r_list;
        if r.is_empty() {
            errors.push("sweep.r_list: must not be empty".into());
        }
        for (i, &v) in r.iter().enumerate() {
            check_positive(&mut errors, &format!("sweep.r_list[{i}]"), v);
        }
        if !r.windows(2).all(|w| w[0] < w[1]) {
            errors.push("sweep.r_list: must be strictly increasing".into());
        }

        if self.output.csv_precision > 17 {
            errors.push(format!(
                "output.csv_precision: at most 17 digits, got {}",
                self.output.csv_precision
            ));
        }

        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.orthogonality", t.orthogonality),
            ("tolerances.row_energy", t.row_energy),
            ("tolerances.gram", t.gram),
            ("tolerances.trace_relative", t.trace_relative),
            ("tolerances.split", t.split),
            ("tolerances.disc_tol", t.disc_tol),
            ("tolerances.backend", t.backend),
        ] {
            check_nonnegative(&mut errors, name, v);
        }

        if errors.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(errors))
        }
    }

    /// Output directory: explicit setting, else `PPSF_OUT_DIR`, else `ppsf-out`.
    pub fn output_dir(&self) -> PathBuf {
        self.output
            .directory
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!(c.geometry.t_half, 0.5);
        assert_eq!(c.geometry.omega_half, PI);
        assert_eq!(c.geometry.margin(), 1.0);
        assert_eq!(c.budget.epsilon, 0.2);
        assert_eq!(c.budget.sigma, SigmaSetting::Keyword(AutoKeyword::Auto));
        assert_eq!(c.sweep.r_list, vec![8.0, 16.0, 32.0, 64.0]);
        assert_eq!(c.geometry.points_per_unit, 32.0);
        assert_eq!(c.output.csv_precision, 12);
        assert!(c.validate().is_ok());
        let b = c.budget.split().unwrap();
        assert!((b.sigma_sq() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn empty_file_is_default() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn round_trip() {
        let text = r#"
            [geometry]
            t_half = 1.0
            omega_half = 2.0
            margin = 3.0
            points_per_unit = 16.0

            [budget]
            epsilon = 0.3
            sigma = 0.1

            [sweep]
            r_list = [4.0, 8.0]

            [output]
            directory = "results"
            emit_plots = true
            csv_precision = 8
        "#;
        let a = RunConfig::from_toml(text).unwrap();
        let b = RunConfig::from_toml(&a.to_toml()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.budget.sigma, SigmaSetting::Value(0.1));

        let auto = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&auto.to_toml()).unwrap(), auto);
    }

    #[test]
    fn sigma_keyword() {
        let c = RunConfig::from_toml("[budget]\nsigma = \"auto\"\n").unwrap();
        assert_eq!(c.budget.sigma, SigmaSetting::Keyword(AutoKeyword::Auto));
        assert!(RunConfig::from_toml("[budget]\nsigma = \"often\"\n").is_err());
        assert_eq!(
            "auto".parse::<SigmaSetting>().unwrap(),
            SigmaSetting::default()
        );
        assert_eq!(
            "0.25".parse::<SigmaSetting>().unwrap(),
            SigmaSetting::Value(0.25)
        );
    }

    #[test]
    fn all_errors_reported_with_paths() {
        let mut c = RunConfig::default();
        c.geometry.t_half = -1.0;
        c.budget.epsilon = 1.5;
        c.sweep.r_list = vec![16.0, 8.0];
        c.tolerances.gram = -1.0;
        match c.validate() {
            Err(CliError::Validation(errs)) => {
                assert!(errs.iter().any(|e| e.starts_with("geometry.t_half")));
                assert!(errs.iter().any(|e| e.starts_with("budget.epsilon")));
                assert!(errs.iter().any(|e| e.starts_with("sweep.r_list")));
                assert!(errs.iter().any(|e| e.starts_with("tolerances.gram")));
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(RunConfig::from_toml("[geometry]\nradius = 2.0\n").is_err());
    }
}
