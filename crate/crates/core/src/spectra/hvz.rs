//! Two-cluster Weyl products.
//!
//! `ψ` is the ground vector of the `m`-particle operator on `[1, W]` and `φ`
//! that of the `(N − m)`-particle operator on `[1, W]`, translated by `c ≥ W + 2`.
//! Because every particle of the first cluster sits left of every particle of
//! the second, `χ(x, y) = ψ(x) φ(y − c)` is already a unit vector on ordered
//! tuples. The attraction has range one, so the only residual is leakage
//! through the window edges:
//!
//! `‖(H − λ − μ)χ‖² = ‖(H̃₁ − λ)ψ‖² + ‖(H̃₂ − μ)φ‖²`
//!
//! with `H̃₁` on `[1, W + 1]` and `H̃₂` on `[c, c + W]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{lowest_pairs, norm, residual_norm, LanczosConfig};
use crate::basis::{enumerate_window_basis, BasisIndex, Window};
use crate::error::{param_err, Error, Result};
use crate::hamiltonians::build_lattice_xn;
use crate::params::ModelParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylProduct {
    pub n: usize,
    pub split: usize,
    pub component_window: usize,
    pub shift: i64,
    pub total_window: Window,
    pub lambda: f64,
    pub mu: f64,
    pub psi: Vec<Complex64>,
    pub phi: Vec<Complex64>,
    /// `χ` in the [`enumerate_window_basis`] order of `total_window`.
    pub chi: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HvzReport {
    pub delta: f64,
    pub n: usize,
    pub split: usize,
    pub component_window: usize,
    pub shift: i64,
    pub total_window: Window,
    pub lambda: f64,
    pub mu: f64,
    pub energy: f64,
    /// `‖(H − λ − μ)χ‖`.
    pub residual: f64,
    /// `‖(H̃₁ − λ)ψ‖`, `‖(H̃₂ − μ)φ‖`.
    pub component_residuals: [f64; 2],
    /// `|residual² − Σ component_residuals²|`.
    pub identity_discrepancy: f64,
    pub chi_norm: f64,
}

fn ground_vector(p: &ModelParams, window: Window) -> Result<(f64, Vec<Complex64>)> {
    let h = build_lattice_xn(p, window)?;
    let cfg = LanczosConfig::default().with_vectors().with_max_iter(800);
    let s = lowest_pairs(&h, 1, &cfg)?;
    let v = s.eigenvectors.and_then(|mut v| v.drain(..).next());
    match v {
        Some(v) => Ok((s.eigenvalues[0], v)),
        None => Err(Error::Representation("ground vector unavailable".into())),
    }
}

/// Builds `χ` for the split `m | N − m` with component window `[1, W]` and
/// shift `c` (defaults to `W + 2`).
pub fn weyl_product(
    p: &ModelParams,
    split: usize,
    component_window: usize,
    shift: Option<i64>,
) -> Result<WeylProduct> {
    let n = p.n();
    if split == 0 || split >= n {
        return Err(param_err(
            "split",
            format!("need 1 <= m <= N-1, got m={split}, N={n}"),
        ));
    }
    if !p.field().is_zero() {
        return Err(Error::Representation(
            "Weyl products are built for the field-free chain".into(),
        ));
    }
    let w = component_window;
    if w < split.max(n - split) {
        return Err(Error::WindowTooSmall(format!(
            "component window {w} cannot hold clusters of {split} and {} particles",
            n - split
        )));
    }
    let c = shift.unwrap_or(w as i64 + 2);
    if c < w as i64 + 2 {
        return Err(Error::WindowTooSmall(format!(
            "shift {c} is below W + 2 = {}",
            w + 2
        )));
    }
    let comp = Window::of_len(w)?;
    let total_window = Window::new(1, c + w as i64)?;
    let (lambda, psi) = ground_vector(&p.with_n(split)?, comp)?;
    let (mu, phi) = ground_vector(&p.with_n(n - split)?, comp)?;

    let b1 = enumerate_window_basis(split, comp)?;
    let b2 = enumerate_window_basis(n - split, comp)?;
    let total = enumerate_window_basis(n, total_window)?;
    let mut chi = vec![Complex64::new(0.0, 0.0); total.len()];
    let mut sites = Vec::with_capacity(n);
    for (i, a) in b1.configs().iter().enumerate() {
        for (j, b) in b2.configs().iter().enumerate() {
            sites.clear();
            sites.extend_from_slice(a.sites());
            sites.extend(b.sites().iter().map(|s| s + c));
            let idx = total
                .index_of_sites(&sites)
                .expect("separated clusters stay ordered");
            chi[idx] = psi[i] * phi[j];
        }
    }
    Ok(WeylProduct {
        n,
        split,
        component_window: w,
        shift: c,
        total_window,
        lambda,
        mu,
        psi,
        phi,
        chi,
    })
}

/// Embeds a vector on `from` into the basis of `to`, translating sites by `offset`.
fn embed(v: &[Complex64], from: &BasisIndex, to: &BasisIndex, offset: i64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); to.len()];
    let mut sites = Vec::new();
    for (i, cfg) in from.configs().iter().enumerate() {
        sites.clear();
        sites.extend(cfg.sites().iter().map(|s| s + offset));
        out[to
            .index_of_sites(&sites)
            .expect("embedding window contains the source")] = v[i];
    }
    out
}

pub fn hvz_check(
    p: &ModelParams,
    split: usize,
    component_window: usize,
    shift: Option<i64>,
) -> Result<HvzReport> {
    let wp = weyl_product(p, split, component_window, shift)?;
    let n = wp.n;
    let w = wp.component_window;
    let energy = wp.lambda + wp.mu;
    let h = build_lattice_xn(p, wp.total_window)?;
    let residual = residual_norm(&h, energy, &wp.chi);

    let comp = Window::of_len(w)?;
    let ext = Window::of_len(w + 1)?;
    let p1 = p.with_n(split)?;
    let p2 = p.with_n(n - split)?;
    let r1 = {
        let h1 = build_lattice_xn(&p1, ext)?;
        let psi = embed(
            &wp.psi,
            &enumerate_window_basis(split, comp)?,
            &enumerate_window_basis(split, ext)?,
            0,
        );
        residual_norm(&h1, wp.lambda, &psi)
    };
    let r2 = {
        // [c, c + W] translated by −(c − 1) is [1, W + 1]; φ moves one site right
        let h2 = build_lattice_xn(&p2, ext)?;
        let phi = embed(
            &wp.phi,
            &enumerate_window_basis(n - split, comp)?,
            &enumerate_window_basis(n - split, ext)?,
            1,
        );
        residual_norm(&h2, wp.mu, &phi)
    };

    Ok(HvzReport {
        delta: p.delta(),
        n,
        split,
        component_window: w,
        shift: wp.shift,
        total_window: wp.total_window,
        lambda: wp.lambda,
        mu: wp.mu,
        energy,
        residual,
        component_residuals: [r1, r2],
        identity_discrepancy: (residual * residual - r1 * r1 - r2 * r2).abs(),
        chi_norm: norm(&wp.chi),
    })
}
