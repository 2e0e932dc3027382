//! Lanczos iteration with full reorthogonalization.
//!
//! Real symmetric matrices run in `f64`, everything else in `Complex64`. The
//! Krylov basis is reorthogonalized against all previous vectors twice per
//! step, so Ritz values do not duplicate. On breakdown the iteration continues
//! from a fresh deterministic vector orthogonal to the current basis.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Method, SolverMeta, SpectrumResult};
use crate::error::{param_err, Error, Result};
use crate::sparse::{Scalar, SparseHermitian};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    Lowest,
    Highest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanczosConfig {
    /// Krylov dimension cap; `None` means `10 · count + 200`.
    pub max_iter: Option<usize>,
    /// Residual tolerance relative to the Gershgorin norm bound.
    pub tol: f64,
    pub vectors: bool,
    /// Seed of the fixed perturbation added to the all-ones start vector.
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self {
            max_iter: None,
            tol: 1e-9,
            vectors: false,
            seed: 0,
        }
    }
}

impl LanczosConfig {
    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = Some(max_iter);
        self
    }

    pub fn with_vectors(mut self) -> Self {
        self.vectors = true;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// The `count` lowest or highest eigenpairs with default settings.
pub fn extremal_eigenvalues(h: &SparseHermitian, count: usize, end: End) -> Result<SpectrumResult> {
    extremal_with(h, count, end, &LanczosConfig::default())
}

pub fn extremal_with(
    h: &SparseHermitian,
    count: usize,
    end: End,
    cfg: &LanczosConfig,
) -> Result<SpectrumResult> {
    if count == 0 || count > h.dim() {
        return Err(param_err(
            "count",
            format!("need 1 <= count <= dimension {}, got {count}", h.dim()),
        ));
    }
    let sign = match end {
        End::Lowest => 1.0,
        End::Highest => -1.0,
    };
    if h.is_real() {
        run::<f64>(h, count, sign, cfg)
    } else {
        run::<Complex64>(h, count, sign, cfg)
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x.conjugate() * *y;
    }
    acc
}

fn norm<T: Scalar>(a: &[T]) -> f64 {
    a.iter().map(|x| x.modulus_squared()).sum::<f64>().sqrt()
}

fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi -= alpha * *xi;
    }
}

fn orthogonalize<T: Scalar>(basis: &[Vec<T>], w: &mut [T]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, w);
            axpy(c, q, w);
        }
    }
}

fn noise(n: usize, rng: &mut ChaCha8Rng) -> impl Iterator<Item = f64> + '_ {
    (0..n).map(move |_| (rng.next_u64() >> 11) as f64 * (2.0 / (1u64 << 53) as f64) - 1.0)
}

/// Normalized all-ones vector plus a fixed 10% perturbation, so that the
/// Krylov space is not confined to a symmetry sector of the all-ones vector.
fn start_vector<T: Scalar>(n: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<T> = noise(n, &mut rng)
        .map(|r| T::from_real(1.0 + 0.1 * r))
        .collect();
    let s = 1.0 / norm(&v);
    v.iter_mut().for_each(|x| *x = x.scale(s));
    v
}

struct Ritz {
    values: Vec<f64>,
    /// Columns of the tridiagonal eigenvector matrix for the selected values.
    coords: Vec<Vec<f64>>,
    estimates: Vec<f64>,
}

fn ritz(alpha: &[f64], beta: &[f64], b_last: f64, count: usize) -> Ritz {
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order.truncate(count);
    Ritz {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        coords: order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
            .collect(),
        estimates: order
            .iter()
            .map(|&i| (b_last * eig.eigenvectors[(k - 1, i)]).abs())
            .collect(),
    }
}

fn run<T: Scalar>(
    h: &SparseHermitian,
    count: usize,
    sign: f64,
    cfg: &LanczosConfig,
) -> Result<SpectrumResult> {
    let n = h.dim();
    let norm_bound = h.norm_bound();
    let tol = cfg.tol * norm_bound.max(f64::MIN_POSITIVE);
    let cap = cfg.max_iter.unwrap_or(10 * count + 200).max(count).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);

    let mut basis: Vec<Vec<T>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut v = start_vector::<T>(n, cfg.seed);
    let mut w = vec![T::zero(); n];

    loop {
        h.apply(&v, &mut w);
        if sign < 0.0 {
            w.iter_mut().for_each(|x| *x = -*x);
        }
        let a = dot(&v, &w).real();
        axpy(T::from_real(a), &v, &mut w);
        if let (Some(prev), Some(&b)) = (basis.last(), beta.last()) {
            axpy(T::from_real(b), prev, &mut w);
        }
        basis.push(std::mem::take(&mut v));
        alpha.push(a);
        orthogonalize(&basis, &mut w);
        let b = norm(&w);
        let k = basis.len();

        let exhausted = k == n;
        let breakdown = b <= 1e-12 * norm_bound.max(1.0);
        let stride = (k / 20).max(1);
        let check = k >= count && (k.is_multiple_of(stride) || k == cap || breakdown);
        if check {
            let r = ritz(&alpha, &beta, if exhausted { 0.0 } else { b }, count);
            let estimated = r.estimates.iter().all(|&e| e <= tol);
            if estimated || k == cap {
                let (vectors, residuals) = ritz_pairs(h, &basis, &r, sign);
                let converged = residuals.iter().all(|&x| x <= tol);
                if converged || k == cap {
                    let result = finish(
                        r,
                        vectors,
                        residuals,
                        sign,
                        k,
                        n,
                        norm_bound,
                        converged,
                        cfg.vectors,
                    );
                    if converged {
                        return Ok(result);
                    }
                    return Err(Error::NotConverged {
                        iterations: k,
                        max_residual: result.max_residual(),
                        best: Box::new(result),
                    });
                }
            }
        }

        if breakdown {
            // invariant subspace: continue from a fresh orthogonal direction
            let mut fresh: Vec<T> = noise(n, &mut rng).map(T::from_real).collect();
            orthogonalize(&basis, &mut fresh);
            let f = norm(&fresh);
            if f <= 1e-8 {
                let r = ritz(&alpha, &beta, 0.0, count);
                let (vectors, residuals) = ritz_pairs(h, &basis, &r, sign);
                let converged = residuals.iter().all(|&x| x <= tol);
                return Ok(finish(
                    r,
                    vectors,
                    residuals,
                    sign,
                    k,
                    n,
                    norm_bound,
                    converged,
                    cfg.vectors,
                ));
            }
            beta.push(0.0);
            v = fresh.into_iter().map(|x| x.scale(1.0 / f)).collect();
        } else {
            beta.push(b);
            v = w.iter().map(|x| x.scale(1.0 / b)).collect();
        }
    }
}

fn ritz_pairs<T: Scalar>(
    h: &SparseHermitian,
    basis: &[Vec<T>],
    r: &Ritz,
    sign: f64,
) -> (Vec<Vec<T>>, Vec<f64>) {
    let n = h.dim();
    let mut vectors = Vec::with_capacity(r.values.len());
    let mut residuals = Vec::with_capacity(r.values.len());
    for (theta, s) in r.values.iter().zip(&r.coords) {
        let mut y = vec![T::zero(); n];
        for (q, &c) in basis.iter().zip(s) {
            for (yi, qi) in y.iter_mut().zip(q) {
                *yi += qi.scale(c);
            }
        }
        let scale = 1.0 / norm(&y);
        y.iter_mut().for_each(|x| *x = x.scale(scale));
        let hy = h.apply_vec(&y);
        let lambda = sign * theta;
        let res = hy
            .iter()
            .zip(&y)
            .map(|(a, b)| (*a - b.scale(lambda)).modulus_squared())
            .sum::<f64>()
            .sqrt();
        vectors.push(y);
        residuals.push(res);
    }
    (vectors, residuals)
}

#[allow(clippy::too_many_arguments)]
fn finish<T: Scalar>(
    r: Ritz,
    vectors: Vec<Vec<T>>,
    residuals: Vec<f64>,
    sign: f64,
    iterations: usize,
    dim: usize,
    norm_bound: f64,
    converged: bool,
    keep_vectors: bool,
) -> SpectrumResult {
    let mut pairs: Vec<(f64, Vec<T>, f64)> = r
        .values
        .iter()
        .zip(vectors)
        .zip(residuals)
        .map(|((&t, v), res)| (sign * t, v, res))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let residuals = pairs.iter().map(|p| p.2).collect();
    let eigenvectors = keep_vectors.then(|| {
        pairs
            .into_iter()
            .map(|(_, v, _)| v.into_iter().map(|x| x.to_c64()).collect())
            .collect()
    });
    SpectrumResult {
        eigenvalues,
        eigenvectors,
        meta: SolverMeta {
            method: Method::Lanczos,
            iterations,
            residuals,
            dim,
            norm_bound,
            converged,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Window;
    use crate::hamiltonians::{build_fiber, build_lattice_xn};
    use crate::params::ModelParams;
    use crate::spectra::dense_spectrum;

    #[test]
    fn matches_dense_on_lattice() {
        let p = ModelParams::new(2.0, 2).unwrap();
        let h = build_lattice_xn(&p, Window::of_len(30).unwrap()).unwrap();
        let dense = dense_spectrum(&h).unwrap();
        let low = extremal_eigenvalues(&h, 4, End::Lowest).unwrap();
        for (a, b) in low.eigenvalues.iter().zip(&dense.eigenvalues) {
            assert!((a - b).abs() < 1e-9, "{a} {b}");
        }
        let high = extremal_eigenvalues(&h, 3, End::Highest).unwrap();
        let top = &dense.eigenvalues[dense.eigenvalues.len() - 3..];
        for (a, b) in high.eigenvalues.iter().zip(top) {
            assert!((a - b).abs() < 1e-9, "{a} {b}");
        }
    }

    #[test]
    fn matches_dense_on_complex_fiber() {
        let p = ModelParams::new(1.5, 3).unwrap();
        let h = build_fiber(&p, 1.3, 20).unwrap();
        let dense = dense_spectrum(&h).unwrap();
        let low =
            extremal_with(&h, 3, End::Lowest, &LanczosConfig::default().with_vectors()).unwrap();
        for (a, b) in low.eigenvalues.iter().zip(&dense.eigenvalues) {
            assert!((a - b).abs() < 1e-9);
        }
        let tol = 1e-9 * h.norm_bound();
        assert!(low.meta.residuals.iter().all(|&r| r <= tol));
        for (l, v) in low
            .eigenvalues
            .iter()
            .zip(low.eigenvectors.as_ref().unwrap())
        {
            assert!(crate::spectra::residual_norm(&h, *l, v) <= tol);
        }
    }

    #[test]
    fn finds_degenerate_and_antisymmetric_states() {
        // reflection-symmetric chain; the second state is odd under reflection
        let p = ModelParams::new(3.0, 1).unwrap();
        let h = build_lattice_xn(&p, Window::of_len(40).unwrap()).unwrap();
        let dense = dense_spectrum(&h).unwrap();
        let low = extremal_eigenvalues(&h, 2, End::Lowest).unwrap();
        assert!((low.eigenvalues[1] - dense.eigenvalues[1]).abs() < 1e-9);
    }

    #[test]
    fn exhausts_small_spaces() {
        let p = ModelParams::new(2.0, 2).unwrap();
        let h = build_fiber(&p, -std::f64::consts::PI, 6).unwrap();
        let s = extremal_eigenvalues(&h, 6, End::Lowest).unwrap();
        assert_eq!(s.eigenvalues.len(), 6);
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!(s.eigenvalues[1..].iter().all(|&x| (x - 2.0).abs() < 1e-12));
    }

    #[test]
    fn deterministic() {
        let p = ModelParams::new(2.0, 3).unwrap();
        let h = build_lattice_xn(&p, Window::of_len(14).unwrap()).unwrap();
        let a = extremal_eigenvalues(&h, 2, End::Lowest).unwrap();
        let b = extremal_eigenvalues(&h, 2, End::Lowest).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cap_yields_best_estimate() {
        let p = ModelParams::new(1.1, 2).unwrap();
        let h = build_lattice_xn(&p, Window::of_len(120).unwrap()).unwrap();
        let cfg = LanczosConfig::default().with_max_iter(5);
        match extremal_with(&h, 1, End::Lowest, &cfg) {
            Err(Error::NotConverged {
                iterations, best, ..
            }) => {
                assert_eq!(iterations, 5);
                assert_eq!(best.eigenvalues.len(), 1);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_counts() {
        let p = ModelParams::new(2.0, 2).unwrap();
        let h = build_fiber(&p, 0.0, 3).unwrap();
        assert!(extremal_eigenvalues(&h, 0, End::Lowest).is_err());
        assert!(extremal_eigenvalues(&h, 4, End::Lowest).is_err());
    }
}
