use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{residual_norm, Method, SolverMeta, SpectrumResult};
use crate::error::{Error, Result};
use crate::sparse::{Scalar, SparseHermitian};

pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Residuals above `DENSE_TOL · ‖H‖` mark the result as not converged.
const DENSE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseOptions {
    pub cap: usize,
    /// Keep eigenvectors in the result. Residuals are computed either way.
    pub vectors: bool,
}

impl Default for DenseOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_DENSE_CAP,
            vectors: false,
        }
    }
}

/// Full spectrum of `h` by dense diagonalization.
pub fn dense_spectrum(h: &SparseHermitian) -> Result<SpectrumResult> {
    dense_spectrum_with(h, DenseOptions::default())
}

pub fn dense_spectrum_with(h: &SparseHermitian, opts: DenseOptions) -> Result<SpectrumResult> {
    let dim = h.dim();
    if dim > opts.cap {
        return Err(Error::DenseCap { dim, cap: opts.cap });
    }
    let (values, vectors) = if h.is_real() {
        decompose(h.to_dense_real()?)
    } else {
        decompose(h.to_dense_complex())
    };
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let vecs: Vec<Vec<Complex64>> = order.iter().map(|&i| vectors[i].clone()).collect();
    let residuals: Vec<f64> = eigenvalues
        .iter()
        .zip(&vecs)
        .map(|(&l, v)| residual_norm(h, l, v))
        .collect();
    let norm_bound = h.norm_bound();
    let converged = residuals
        .iter()
        .all(|&r| r <= DENSE_TOL * norm_bound.max(1.0));
    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors: opts.vectors.then_some(vecs),
        meta: SolverMeta {
            method: Method::Dense,
            iterations: 0,
            residuals,
            dim,
            norm_bound,
            converged,
        },
    })
}

/// Eigenvalues of `h` in ascending order, without eigenvectors or residuals.
pub fn dense_eigenvalues(h: &SparseHermitian) -> Result<Vec<f64>> {
    let dim = h.dim();
    if dim > DEFAULT_DENSE_CAP {
        return Err(Error::DenseCap {
            dim,
            cap: DEFAULT_DENSE_CAP,
        });
    }
    let mut values: Vec<f64> = if h.is_real() {
        h.to_dense_real()?
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    } else {
        h.to_dense_complex()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    };
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn decompose<T: Scalar>(m: DMatrix<T>) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let eig = SymmetricEigen::new(m);
    let values = eig.eigenvalues.iter().copied().collect();
    let vectors = eig
        .eigenvectors
        .column_iter()
        .map(|c| c.iter().map(|x| x.to_c64()).collect())
        .collect();
    (values, vectors)
}
