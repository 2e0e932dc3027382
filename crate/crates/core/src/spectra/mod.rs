//! Eigensolvers and the numerical checks built on them.

mod dense;
mod fiber;
mod gap;
mod hvz;
mod lanczos;

pub use dense::{
    dense_eigenvalues, dense_spectrum, dense_spectrum_with, DenseOptions, DEFAULT_DENSE_CAP,
};
pub use fiber::{fiber_sweep, interior_residual, theta_grid, FiberRow, InteriorResidual};
pub use gap::{gap_certificate, CountMethod, GapCertificate};
pub use hvz::{hvz_check, weyl_product, HvzReport, WeylProduct};
pub use lanczos::{extremal_eigenvalues, extremal_with, End, LanczosConfig};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::sparse::SparseHermitian;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub method: Method,
    pub iterations: usize,
    /// `‖Hv − λv‖` per returned pair, computed explicitly.
    pub residuals: Vec<f64>,
    pub dim: usize,
    /// Gershgorin bound used to scale tolerances.
    pub norm_bound: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors in the order of `eigenvalues`, when requested.
    pub eigenvectors: Option<Vec<Vec<Complex64>>>,
    pub meta: SolverMeta,
}

impl SpectrumResult {
    pub fn lowest(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn highest(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }

    pub fn max_residual(&self) -> f64 {
        self.meta.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Below this dimension [`lowest_pairs`] diagonalizes densely.
pub const AUTO_DENSE_MAX: usize = 1200;

/// The `count` lowest eigenpairs, dense for small matrices and Lanczos
/// otherwise. A Lanczos run that hits its cap returns its best Ritz pairs,
/// marked `converged = false`.
pub fn lowest_pairs(
    h: &SparseHermitian,
    count: usize,
    cfg: &LanczosConfig,
) -> crate::Result<SpectrumResult> {
    let count = count.min(h.dim());
    if h.dim() <= AUTO_DENSE_MAX {
        let mut full = dense_spectrum_with(
            h,
            DenseOptions {
                cap: AUTO_DENSE_MAX,
                vectors: cfg.vectors,
            },
        )?;
        full.eigenvalues.truncate(count);
        full.meta.residuals.truncate(count);
        if let Some(v) = full.eigenvectors.as_mut() {
            v.truncate(count);
        }
        return Ok(full);
    }
    match extremal_with(h, count, End::Lowest, cfg) {
        Err(crate::Error::NotConverged { best, .. }) => Ok(*best),
        other => other,
    }
}

/// `‖Hv − λv‖`.
pub fn residual_norm(h: &SparseHermitian, lambda: f64, v: &[Complex64]) -> f64 {
    let hv = h.apply_vec(v);
    hv.iter()
        .zip(v)
        .map(|(a, b)| (a - b * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
