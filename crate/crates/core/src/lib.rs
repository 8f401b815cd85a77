//! Pseudo prolate spheroidal functions.
//!
//! This crate discretizes the time–band limiting operator `P = D_rT B_Ω D_rT`
//! on a uniform grid, computes its prolate eigenpairs, and builds orthonormal
//! families of ε-pseudoeigenfunctions (`‖PΦ − Φ‖² ≤ ε`) whose size grows like
//! `(1−ε)⁻¹ r|T||Ω|/2π`. The [`experiments`] module measures that growth
//! against the classical eigenvalue counts.
//!
//! ```no_run
//! use ppsf::{construct, compute_spectrum, BudgetSplit, Geometry};
//!
//! let geom = Geometry::with_resolution(0.5, std::f64::consts::PI, 16.0, 1.0, 32.0)?;
//! let spectrum = compute_spectrum(&geom)?;
//! let set = construct(&spectrum, &geom, &BudgetSplit::from_sigma_sq(0.2, 0.02)?)?;
//! assert!(set.max_residual() <= 0.2 + 1e-6);
//! # Ok::<(), ppsf::PpsfError>(())
//! ```

pub mod dpss;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod linalg;
pub mod mixing;
pub mod pseudoprolate;
pub mod slepian;
pub mod spectrum;

pub use dpss::{dpss_oracle, dpss_sequences, DpssSet};
pub use error::{PpsfError, Result};
pub use experiments::{run_sweep, sandwich_check, SandwichReport, SweepRecord};
pub use geometry::{
    apply_time_limit, build_band_kernel, build_concentration_matrix, Geometry, GeometryParams,
    GridFunction,
};
pub use mixing::{dft_mixing_matrix, select_lambda_columns, MixingMatrix};
pub use pseudoprolate::{
    choose_m, construct, kernel_padding_basis, select_family, BudgetSplit, PseudoProlateSet,
    DEFAULT_DISC_TOL,
};
pub use slepian::{slepian_dimension_slope, slepian_g, SlepianSequence};
pub use spectrum::{compute_spectrum, count_above, Spectrum};
