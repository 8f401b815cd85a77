//! Time/band geometry on a uniform grid and the discretized time-limiting,
//! band-limiting and concentration operators.
//!
//! The time set is `T = [-t_half, t_half]`, the band is
//! `Ω = [-omega_half, omega_half]` and the dilated set `rT` is sampled on a
//! symmetric grid that extends `margin` beyond `rT` on each side. The band
//! projection is discretized with the Nyström rule using the uniform weight
//! `h`, which keeps every matrix symmetric.

use std::f64::consts::PI;
use std::ops::Range;

use faer::Mat;

use crate::error::{PpsfError, Result};

/// Relative slack (in units of `h`) used when deciding whether a grid point
/// lies on the closed interval `rT`.
const BOUNDARY_SLACK: f64 = 1e-9;

/// Geometry parameters, including the ambient dimension.
///
/// Only `dimension == 1` is accepted by [`GeometryParams::build`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryParams {
    pub dimension: usize,
    pub t_half: f64,
    pub omega_half: f64,
    pub r: f64,
    pub margin: f64,
    pub grid_points: usize,
}

impl GeometryParams {
    pub fn build(&self) -> Result<Geometry> {
        if self.dimension != 1 {
            return Err(PpsfError::UnsupportedDimension(self.dimension));
        }
        Geometry::new(
            self.t_half,
            self.omega_half,
            self.r,
            self.margin,
            self.grid_points,
        )
    }
}

/// The interval `T`, the band `Ω`, the dilation `r` and the sampling window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    t_half: f64,
    omega_half: f64,
    r: f64,
    margin: f64,
    grid_points: usize,
}

fn positive_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(PpsfError::Geometry(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

impl Geometry {
    pub fn new(
        t_half: f64,
        omega_half: f64,
        r: f64,
        margin: f64,
        grid_points: usize,
    ) -> Result<Self> {
        positive_finite("t_half", t_half)?;
        positive_finite("omega_half", omega_half)?;
        positive_finite("r", r)?;
        positive_finite("margin", margin)?;
        if margin < t_half {
            return Err(PpsfError::Geometry(format!(
                "margin ({margin}) must be at least t_half ({t_half})"
            )));
        }
        if grid_points < 2 {
            return Err(PpsfError::Geometry(format!(
                "at least 2 grid points are required, got {grid_points}"
            )));
        }
        Ok(Self {
            t_half,
            omega_half,
            r,
            margin,
            grid_points,
        })
    }

    /// Builds a geometry whose grid has (at least) `points_per_unit` samples
    /// per unit length, i.e. `h <= 1 / points_per_unit`.
    pub fn with_resolution(
        t_half: f64,
        omega_half: f64,
        r: f64,
        margin: f64,
        points_per_unit: f64,
    ) -> Result<Self> {
        positive_finite("points_per_unit", points_per_unit)?;
        positive_finite("t_half", t_half)?;
        positive_finite("r", r)?;
        positive_finite("margin", margin)?;
        let cells = (2.0 * (r * t_half + margin) * points_per_unit - 1e-9).ceil();
        Self::new(t_half, omega_half, r, margin, cells as usize + 1)
    }

    /// Default window margin, `max(t_half, 1)`.
    pub fn default_margin(t_half: f64) -> f64 {
        t_half.max(1.0)
    }

    /// Same `T`, `Ω` and margin at a new dilation, keeping the grid spacing
    /// (so the number of points grows with `r`).
    pub fn rescaled(&self, r: f64) -> Result<Self> {
        Self::with_resolution(self.t_half, self.omega_half, r, self.margin, 1.0 / self.h())
    }

    pub fn t_half(&self) -> f64 {
        self.t_half
    }

    pub fn omega_half(&self) -> f64 {
        self.omega_half
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn grid_points(&self) -> usize {
        self.grid_points
    }

    /// Half width of the sampling window, `r·t_half + margin`.
    pub fn window_half(&self) -> f64 {
        self.r * self.t_half + self.margin
    }

    /// Half width of `rT`.
    pub fn dilated_half(&self) -> f64 {
        self.r * self.t_half
    }

    /// Grid spacing, which is also the quadrature weight.
    pub fn h(&self) -> f64 {
        2.0 * self.window_half() / (self.grid_points - 1) as f64
    }

    /// Grid node `i`. Computed so that `x(N-1-i) == -x(i)` exactly.
    pub fn x(&self, i: usize) -> f64 {
        let n1 = (self.grid_points - 1) as f64;
        (2.0 * i as f64 - n1) * self.window_half() / n1
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.grid_points).map(|i| self.x(i)).collect()
    }

    /// Whether node `i` lies in the closed interval `rT`.
    pub fn is_inside(&self, i: usize) -> bool {
        self.x(i).abs() <= self.dilated_half() + BOUNDARY_SLACK * self.h()
    }

    /// Indices of the nodes inside `rT`; contiguous because `rT` is an interval.
    pub fn inside_range(&self) -> Range<usize> {
        let first = (0..self.grid_points).find(|&i| self.is_inside(i));
        match first {
            Some(lo) => lo..self.grid_points - lo,
            None => 0..0,
        }
    }

    pub fn inside_count(&self) -> usize {
        self.inside_range().len()
    }

    pub fn outside_count(&self) -> usize {
        self.grid_points - self.inside_count()
    }

    /// `|T|`
    pub fn time_measure(&self) -> f64 {
        2.0 * self.t_half
    }

    /// `|Ω|`
    pub fn band_measure(&self) -> f64 {
        2.0 * self.omega_half
    }

    /// `|T||Ω| / 2π`, the number of degrees of freedom per unit dilation.
    pub fn nyquist_density(&self) -> f64 {
        self.time_measure() * self.band_measure() / (2.0 * PI)
    }

    /// `r |T||Ω| / 2π`, the exact trace of the continuous concentration operator.
    pub fn expected_trace(&self) -> f64 {
        self.r * self.nyquist_density()
    }

    /// One quadrature cell's worth of kernel mass, `h·omega_half/π`. This is
    /// the size of the trace error caused by `rT` not aligning with the grid.
    pub fn quadrature_error(&self) -> f64 {
        self.h() * self.omega_half / PI
    }
}

/// Samples of a function on the grid, with the uniform quadrature weight.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
    weight: f64,
}

impl GridFunction {
    pub fn new(values: Vec<f64>, weight: f64) -> Self {
        Self { values, weight }
    }

    pub fn zeros(geom: &Geometry) -> Self {
        Self::new(vec![0.0; geom.grid_points()], geom.h())
    }

    pub fn from_fn(geom: &Geometry, f: impl Fn(f64) -> f64) -> Self {
        Self::new(geom.nodes().into_iter().map(f).collect(), geom.h())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Discrete inner product `h Σ f_i g_i`.
    pub fn inner(&self, other: &GridFunction) -> f64 {
        self.weight
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }

    /// Discrete squared L² norm `h Σ f_i²`.
    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn scaled(&self, factor: f64) -> GridFunction {
        GridFunction::new(
            self.values.iter().map(|v| v * factor).collect(),
            self.weight,
        )
    }

    fn check_len(&self, geom: &Geometry) -> Result<()> {
        if self.values.len() != geom.grid_points() {
            return Err(PpsfError::Dimension {
                expected: geom.grid_points(),
                found: self.values.len(),
            });
        }
        Ok(())
    }
}

/// `D_rT f`: multiplication by the indicator of `rT`.
pub fn apply_time_limit(geom: &Geometry, f: &GridFunction) -> Result<GridFunction> {
    f.check_len(geom)?;
    let inside = geom.inside_range();
    let values = f
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| if inside.contains(&i) { v } else { 0.0 })
        .collect();
    Ok(GridFunction::new(values, f.weight))
}

/// Weighted sinc kernel `h sin(Ω d) / (π d)` at the node offset `offset`.
fn kernel_entry(geom: &Geometry, offset: usize) -> f64 {
    let h = geom.h();
    let w = geom.omega_half();
    if offset == 0 {
        h * w / PI
    } else {
        let d = offset as f64 * h;
        h * (w * d).sin() / (PI * d)
    }
}

fn toeplitz_column(geom: &Geometry, len: usize) -> Vec<f64> {
    (0..len).map(|k| kernel_entry(geom, k)).collect()
}

/// The full `N×N` band-limiting kernel on the window grid.
pub fn build_band_kernel(geom: &Geometry) -> Mat<f64> {
    let n = geom.grid_points();
    let col = toeplitz_column(geom, n);
    Mat::from_fn(n, n, |i, j| col[i.abs_diff(j)])
}

/// `K f` on the full window grid.
pub fn apply_band_kernel(geom: &Geometry, f: &GridFunction) -> Result<GridFunction> {
    f.check_len(geom)?;
    let n = geom.grid_points();
    let col = toeplitz_column(geom, n);
    let values = (0..n)
        .map(|i| {
            f.values
                .iter()
                .enumerate()
                .map(|(j, v)| col[i.abs_diff(j)] * v)
                .sum()
        })
        .collect();
    Ok(GridFunction::new(values, f.weight))
}

/// The `M×M` Nyström matrix of the concentration operator restricted to the
/// `M` nodes inside `rT`.
pub fn build_concentration_matrix(geom: &Geometry) -> Result<Mat<f64>> {
    let m = geom.inside_count();
    if m == 0 {
        return Err(PpsfError::DegenerateGeometry {
            half_width: geom.dilated_half(),
        });
    }
    let col = toeplitz_column(geom, m);
    Ok(Mat::from_fn(m, m, |i, j| col[i.abs_diff(j)]))
}

/// Applies a concentration matrix (as returned by
/// [`build_concentration_matrix`]) to every column of `functions`, where each
/// column is a full-window grid function. The result vanishes off `rT`.
pub fn apply_concentration_columns(
    geom: &Geometry,
    concentration: &Mat<f64>,
    functions: &Mat<f64>,
) -> Result<Mat<f64>> {
    if functions.nrows() != geom.grid_points() {
        return Err(PpsfError::Dimension {
            expected: geom.grid_points(),
            found: functions.nrows(),
        });
    }
    let inside = geom.inside_range();
    if concentration.nrows() != inside.len() || concentration.ncols() != inside.len() {
        return Err(PpsfError::Dimension {
            expected: inside.len(),
            found: concentration.nrows(),
        });
    }
    let restricted = functions.subrows(inside.start, inside.len());
    let product = crate::linalg::product(concentration.as_ref(), restricted);
    let mut out = Mat::zeros(functions.nrows(), functions.ncols());
    out.subrows_mut(inside.start, inside.len())
        .copy_from(&product);
    Ok(out)
}

/// `P f` for a single full-window grid function.
pub fn apply_concentration(
    geom: &Geometry,
    concentration: &Mat<f64>,
    f: &GridFunction,
) -> Result<GridFunction> {
    f.check_len(geom)?;
    let column = Mat::from_fn(f.len(), 1, |i, _| f.values[i]);
    let out = apply_concentration_columns(geom, concentration, &column)?;
    Ok(GridFunction::new(
        (0..f.len()).map(|i| out[(i, 0)]).collect(),
        f.weight,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Geometry {
        Geometry::new(0.5, PI, 4.0, 1.0, 129).unwrap()
    }

    #[test]
    fn grid_is_symmetric() {
        let g = small();
        for i in 0..g.grid_points() {
            assert_eq!(g.x(i), -g.x(g.grid_points() - 1 - i));
        }
        assert!(g.h() > 0.0);
        let r = g.inside_range();
        assert_eq!(r.start, g.grid_points() - r.end);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Geometry::new(0.5, PI, 1.0, 0.25, 100).is_err());
        assert!(Geometry::new(-0.5, PI, 1.0, 1.0, 100).is_err());
        assert!(Geometry::new(0.5, f64::NAN, 1.0, 1.0, 100).is_err());
        assert!(Geometry::new(0.5, PI, 1.0, 1.0, 1).is_err());
        let p = GeometryParams {
            dimension: 2,
            t_half: 0.5,
            omega_half: PI,
            r: 1.0,
            margin: 1.0,
            grid_points: 64,
        };
        assert_eq!(p.build(), Err(PpsfError::UnsupportedDimension(2)));
        assert!(GeometryParams { dimension: 1, ..p }.build().is_ok());
    }

    #[test]
    fn resolution_gives_requested_spacing() {
        let g = Geometry::with_resolution(0.5, PI, 64.0, 1.0, 32.0).unwrap();
        assert_eq!(g.grid_points(), 2113);
        assert_eq!(g.h(), 1.0 / 32.0);
        assert_eq!(g.inside_count(), 2049);
        let r = g.rescaled(8.0).unwrap();
        assert_eq!(r.h(), 1.0 / 32.0);
        assert_eq!(r.grid_points(), 321);
    }

    #[test]
    fn nyquist_density_of_unit_cell() {
        let g = small();
        assert!((g.nyquist_density() - 1.0).abs() < 1e-15);
        assert!((g.expected_trace() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn time_limit_fixes_inside_and_kills_outside() {
        let g = small();
        let inside = GridFunction::from_fn(&g, |x| if x.abs() <= 1.5 { x.cos() } else { 0.0 });
        assert_eq!(apply_time_limit(&g, &inside).unwrap(), inside);

        let outside = GridFunction::from_fn(&g, |x| if x.abs() > 2.5 { 1.0 + x } else { 0.0 });
        let cut = apply_time_limit(&g, &outside).unwrap();
        assert!(cut.values().iter().all(|&v| v == 0.0));

        let f = GridFunction::from_fn(&g, |x| (3.0 * x).sin() + 0.1);
        let once = apply_time_limit(&g, &f).unwrap();
        let twice = apply_time_limit(&g, &once).unwrap();
        assert_eq!(
            once.values()
                .iter()
                .map(|v| v.to_bits())
                .collect::<Vec<_>>(),
            twice
                .values()
                .iter()
                .map(|v| v.to_bits())
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn time_limit_length_mismatch() {
        let g = small();
        let f = GridFunction::new(vec![1.0; 10], g.h());
        assert_eq!(
            apply_time_limit(&g, &f),
            Err(PpsfError::Dimension {
                expected: 129,
                found: 10
            })
        );
    }

    #[test]
    fn band_kernel_is_symmetric_with_analytic_diagonal() {
        let g = small();
        let k = build_band_kernel(&g);
        let diag = g.h() * g.omega_half() / PI;
        for i in 0..k.nrows() {
            assert_eq!(k[(i, i)], diag);
            for j in 0..k.ncols() {
                assert_eq!(k[(i, j)], k[(j, i)]);
            }
        }
    }

    #[test]
    fn integer_grid_sampling_orthogonality() {
        // omega_half = π on an integer grid: sin(πk)/(πk) vanishes for k ≠ 0.
        let g = Geometry::new(1.0, PI, 4.0, 4.0, 17).unwrap();
        assert_eq!(g.h(), 1.0);
        let k = build_band_kernel(&g);
        for i in 0..17 {
            for j in 0..17 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (k[(i, j)] - expected).abs() < 1e-15,
                    "{i} {j} {}",
                    k[(i, j)]
                );
            }
        }
    }

    #[test]
    fn concentration_matrix_matches_operator_composition() {
        let g = Geometry::new(0.5, PI, 2.0, 1.0, 65).unwrap();
        let p = build_concentration_matrix(&g).unwrap();
        let inside = g.inside_range();
        assert_eq!(p.nrows(), inside.len());
        for (a, j) in inside.clone().enumerate() {
            let mut e = vec![0.0; g.grid_points()];
            e[j] = 1.0;
            let unit = GridFunction::new(e, g.h());
            let col = apply_time_limit(
                &g,
                &apply_band_kernel(&g, &apply_time_limit(&g, &unit).unwrap()).unwrap(),
            )
            .unwrap();
            for i in 0..g.grid_points() {
                let expected = if inside.contains(&i) {
                    p[(i - inside.start, a)]
                } else {
                    0.0
                };
                assert!((col.values()[i] - expected).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn concentration_trace_is_diagonal_mass() {
        let g = small();
        let p = build_concentration_matrix(&g).unwrap();
        let diag = g.h() * g.omega_half() / PI;
        let trace: f64 = (0..p.nrows()).map(|i| p[(i, i)]).sum();
        assert!((trace - diag * p.nrows() as f64).abs() < 1e-12);
        assert!((trace - g.expected_trace()).abs() <= g.quadrature_error());
    }

    #[test]
    fn degenerate_geometry() {
        // rT = [-0.01, 0.01] falls strictly between nodes -0.5 and 0.5.
        let g = Geometry::new(0.01, PI, 1.0, 0.49, 2).unwrap();
        assert_eq!(g.inside_count(), 0);
        assert!(matches!(
            build_concentration_matrix(&g),
            Err(PpsfError::DegenerateGeometry { .. })
        ));
    }

    #[test]
    fn apply_concentration_vanishes_off_t() {
        let g = small();
        let p = build_concentration_matrix(&g).unwrap();
        let f = GridFunction::from_fn(&g, |x| (-x * x).exp());
        let pf = apply_concentration(&g, &p, &f).unwrap();
        let inside = g.inside_range();
        for (i, v) in pf.values().iter().enumerate() {
            if !inside.contains(&i) {
                assert_eq!(*v, 0.0);
            }
        }
        assert!(pf.norm_sq() <= f.norm_sq());
    }
}
