use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{lowest_pairs, norm, LanczosConfig, Method};
use crate::basis::GapBox;
use crate::bethe::{droplet_vector, solve_coefficients};
use crate::error::{param_err, Result};
use crate::hamiltonians::build_fiber;
use crate::params::ModelParams;

/// `points` equally spaced quasimomenta from `−π` to `π` inclusive.
pub fn theta_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|j| -PI + 2.0 * PI * j as f64 / (points - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberRow {
    pub theta: f64,
    pub analytic: f64,
    /// Lowest eigenvalues of the truncated fiber, ascending.
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `eigenvalues[0] − analytic`.
    pub diff: f64,
    pub method: Method,
    pub dim: usize,
}

/// Lowest `k_low` eigenvalues of the fiber with gap cap `gap_cap` at each `θ`,
/// next to `E_N(θ)`.
pub fn fiber_sweep(
    p: &ModelParams,
    thetas: &[f64],
    gap_cap: u32,
    k_low: usize,
) -> Result<Vec<FiberRow>> {
    thetas
        .iter()
        .map(|&t| fiber_point(p, t, gap_cap, k_low))
        .collect()
}

pub(crate) fn fiber_point(
    p: &ModelParams,
    theta: f64,
    gap_cap: u32,
    k_low: usize,
) -> Result<FiberRow> {
    if p.n() < 2 {
        return Err(param_err("n", "fiber sweeps need at least two particles"));
    }
    if k_low == 0 {
        return Err(param_err("k_low", "must request at least one eigenvalue"));
    }
    let h = build_fiber(p, theta, gap_cap)?;
    let analytic = solve_coefficients(p, theta)?.energy;
    let cfg = LanczosConfig::default().with_max_iter(10 * k_low + 400);
    let s = lowest_pairs(&h, k_low, &cfg)?;
    Ok(FiberRow {
        theta,
        analytic,
        diff: s.eigenvalues[0] - analytic,
        eigenvalues: s.eigenvalues,
        residuals: s.meta.residuals,
        method: s.meta.method,
        dim: h.dim(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteriorResidual {
    /// `max |(Ĥφ − Eφ)(n)|` over rows with every gap below the cap.
    pub interior_max: f64,
    /// `‖Ĥφ − Eφ‖ / ‖φ‖` over the whole box.
    pub full_relative: f64,
}

/// Residual of the sampled droplet eigenfunction under the truncated fiber.
pub fn interior_residual(p: &ModelParams, theta: f64, gap_cap: u32) -> Result<InteriorResidual> {
    let s = solve_coefficients(p, theta)?;
    let phi = droplet_vector(&s, gap_cap)?;
    let h = build_fiber(p, theta, gap_cap)?;
    let hphi = h.apply_vec(&phi);
    let gb = GapBox::new(p.n() - 1, gap_cap)?;
    let mut gaps = vec![0u32; gb.m()];
    let mut interior_max: f64 = 0.0;
    let mut total = 0.0;
    for (i, (a, b)) in hphi.iter().zip(&phi).enumerate() {
        let r = (a - b * s.energy).norm();
        total += r * r;
        gb.gaps(i, &mut gaps);
        if gaps.iter().all(|&g| g < gap_cap) {
            interior_max = interior_max.max(r);
        }
    }
    Ok(InteriorResidual {
        interior_max,
        full_relative: total.sqrt() / norm(&phi),
    })
}
