//! Discrete prolate spheroidal sequences, used as an independent check on the
//! Nyström spectra.
//!
//! The sequences are eigenvectors of the symmetric tridiagonal matrix that
//! commutes with the discrete sinc matrix, so they are obtained here from a
//! self-contained implicit QL iteration and never touch the dense solver used
//! by [`crate::spectrum`].

use std::f64::consts::PI;

use crate::error::{PpsfError, Result};

const MAX_QL_SWEEPS: usize = 60;

/// The first `count` DPSS of length `len` with concentrations.
#[derive(Debug, Clone, PartialEq)]
pub struct DpssSet {
    /// Unit Euclidean norm sequences, most concentrated first.
    pub sequences: Vec<Vec<f64>>,
    /// Rayleigh quotients against the discrete sinc matrix.
    pub concentrations: Vec<f64>,
}

/// Diagonal and off-diagonal of the commuting tridiagonal matrix.
fn commuting_tridiagonal(len: usize, half_bandwidth: f64) -> (Vec<f64>, Vec<f64>) {
    let c = (2.0 * PI * half_bandwidth).cos();
    let l = len as f64;
    let diag = (0..len)
        .map(|i| {
            let t = (l - 1.0 - 2.0 * i as f64) / 2.0;
            t * t * c
        })
        .collect();
    let off = (1..len).map(|i| i as f64 * (l - i as f64) / 2.0).collect();
    (diag, off)
}

/// Eigen-decomposition of a symmetric tridiagonal matrix by implicit QL with
/// Wilkinson shifts. Returns eigenvalues and row-major eigenvector storage
/// `z[i][k]` (component `i` of eigenvector `k`).
fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(off);
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|k| if i == k { 1.0 } else { 0.0 }).collect())
        .collect();

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(PpsfError::Numerical {
                    size: n,
                    trace: diag.iter().sum(),
                    frobenius: diag.iter().map(|x| x * x).sum::<f64>().sqrt(),
                    reason: format!("tridiagonal QL did not converge at index {l}"),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let zf = row[i + 1];
                    row[i + 1] = s * row[i] + c * zf;
                    row[i] = c * row[i] - s * zf;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

/// Discrete sinc matrix `sin(2πW(i−j)) / (π(i−j))`, diagonal `2W`.
fn sinc_entry(offset: usize, half_bandwidth: f64) -> f64 {
    if offset == 0 {
        2.0 * half_bandwidth
    } else {
        let k = offset as f64;
        (2.0 * PI * half_bandwidth * k).sin() / (PI * k)
    }
}

fn concentration(seq: &[f64], half_bandwidth: f64) -> f64 {
    let n = seq.len();
    let kernel: Vec<f64> = (0..n).map(|k| sinc_entry(k, half_bandwidth)).collect();
    let mut q = 0.0;
    for i in 0..n {
        let row: f64 = (0..n).map(|j| kernel[i.abs_diff(j)] * seq[j]).sum();
        q += seq[i] * row;
    }
    let norm: f64 = seq.iter().map(|x| x * x).sum();
    q / norm
}

fn check_args(len: usize, half_bandwidth: f64) -> Result<()> {
    if !(half_bandwidth > 0.0 && half_bandwidth < 0.5) {
        return Err(PpsfError::Argument(format!(
            "normalized half bandwidth must lie in (0, 1/2), got {half_bandwidth}"
        )));
    }
    if len == 0 {
        return Err(PpsfError::Argument(
            "sequence length must be positive".into(),
        ));
    }
    Ok(())
}

/// The first `count` discrete prolate spheroidal sequences of length `len`
/// with normalized half bandwidth `half_bandwidth`.
pub fn dpss_sequences(len: usize, half_bandwidth: f64, count: usize) -> Result<DpssSet> {
    check_args(len, half_bandwidth)?;
    if count > len {
        return Err(PpsfError::Argument(format!(
            "requested {count} sequences of length {len}"
        )));
    }
    let (diag, off) = commuting_tridiagonal(len, half_bandwidth);
    let (values, vectors) = tridiagonal_eigen(&diag, &off)?;
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

    let mut sequences = Vec::with_capacity(count);
    let mut concentrations = Vec::with_capacity(count);
    for &k in order.iter().take(count) {
        let mut seq: Vec<f64> = vectors.iter().map(|row| row[k]).collect();
        let norm = seq.iter().map(|x| x * x).sum::<f64>().sqrt();
        let peak = seq.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let first = seq
            .iter()
            .copied()
            .find(|x| x.abs() > f64::EPSILON * peak)
            .unwrap_or(1.0);
        let scale = if first < 0.0 { -1.0 / norm } else { 1.0 / norm };
        seq.iter_mut().for_each(|x| *x *= scale);
        concentrations.push(concentration(&seq, half_bandwidth));
        sequences.push(seq);
    }
    Ok(DpssSet {
        sequences,
        concentrations,
    })
}

/// The `k`-th DPSS and its concentration.
pub fn dpss_oracle(len: usize, half_bandwidth: f64, k: usize) -> Result<(Vec<f64>, f64)> {
    check_args(len, half_bandwidth)?;
    if k >= len {
        return Err(PpsfError::Argument(format!(
            "sequence index {k} out of range for length {len}"
        )));
    }
    let mut set = dpss_sequences(len, half_bandwidth, k + 1)?;
    let seq = set.sequences.pop().expect("k + 1 sequences");
    let conc = set.concentrations.pop().expect("k + 1 concentrations");
    Ok((seq, conc))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn tridiagonal_solver_on_known_matrix() {
        // Path-graph Laplacian-like matrix: eigenvalues 2 − 2cos(kπ/(n+1)).
        let n = 12;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let (mut vals, vecs) = tridiagonal_eigen(&diag, &off).unwrap();
        vals.sort_by(f64::total_cmp);
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-12);
        }
        for a in 0..n {
            for b in 0..n {
                let g: f64 = vecs.iter().map(|row| row[a] * row[b]).sum();
                assert!((g - if a == b { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn first_sequences_are_orthonormal() {
        let set = dpss_sequences(128, 0.125, 4).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let g = dot(&set.sequences[a], &set.sequences[b]);
                assert!((g - if a == b { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn concentrations_nonincreasing() {
        let set = dpss_sequences(64, 0.1, 30).unwrap();
        assert!(set.concentrations.windows(2).all(|w| w[0] >= w[1] - 1e-12));
        assert!(set.concentrations[0] < 1.0 + 1e-12);
        assert!(set.concentrations[29] > -1e-12);
    }

    #[test]
    fn argument_errors() {
        assert!(dpss_oracle(16, 0.0, 0).is_err());
        assert!(dpss_oracle(16, 0.5, 0).is_err());
        assert!(dpss_oracle(16, 0.2, 16).is_err());
        assert!(dpss_oracle(16, 0.2, 15).is_ok());
    }

    #[test]
    fn oracle_matches_set() {
        let set = dpss_sequences(32, 0.2, 3).unwrap();
        let (seq, conc) = dpss_oracle(32, 0.2, 2).unwrap();
        assert_eq!(seq, set.sequences[2]);
        assert_eq!(conc, set.concentrations[2]);
    }
}
