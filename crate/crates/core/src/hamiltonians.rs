//! Finite truncations of the `N`-magnon Hamiltonian in four representations.
//!
//! | builder | basis | boundary |
//! |---|---|---|
//! | [`build_spin_sector`] | magnon configurations on the chain `[1, L]` | open chain, edge terms summed over `x = 1..L-1` |
//! | [`build_lattice_xn`] | ordered tuples in a window | compression: hoppings leaving the window are dropped |
//! | [`build_relative`] | anchor × gaps `≤ cap` | compression in both anchor and gaps |
//! | [`build_fiber`] | gaps `≤ cap` at quasimomentum `θ` | hard gap cap |
//!
//! The open chain and the lattice compression differ only on the diagonal: a
//! particle at a chain end sees one edge instead of two and so misses `1/2`.
//! [`spin_boundary_correction`] returns exactly that difference.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;

use crate::basis::{enumerate_window_basis, GapBox, Window};
use crate::error::{param_err, Error, Result};
use crate::params::ModelParams;
use crate::sparse::{phase, BasisInfo, HermitianBuilder, Representation, SparseHermitian};

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `−(1/2Δ) h₀ + V + W + N` on ordered `N`-tuples inside `window`.
pub fn build_lattice_xn(p: &ModelParams, window: Window) -> Result<SparseHermitian> {
    let n = p.n();
    let basis = enumerate_window_basis(n, window)?;
    let t = p.hopping();
    let mut b = HermitianBuilder::with_capacity(basis.len(), basis.len() * n);
    let mut moved = vec![0i64; n];
    for (idx, cfg) in basis.configs().iter().enumerate() {
        let x = cfg.sites();
        let field: f64 = x.iter().map(|&s| p.field().at(s)).sum();
        b.add_diag(idx, n as f64 - cfg.adjacent_pairs() as f64 + field);

        // only rightward moves: every edge is then visited exactly once
        for j in 0..n {
            let target = x[j] + 1;
            let blocked = if j + 1 < n {
                x[j + 1] == target
            } else {
                !window.contains(target)
            };
            if blocked {
                continue;
            }
            moved.copy_from_slice(x);
            moved[j] = target;
            let other = basis
                .index_of_sites(&moved)
                .expect("rightward move inside the window stays in the basis");
            b.add(idx, other, real(t));
        }
    }
    Ok(b.finish(BasisInfo::Window { n, window }, Representation::LatticeXn))
}

/// The open XXZ chain on `[1, L]` restricted
/// to `N` magnons, assembled from the expanded two-site terms
/// `−N_x N_{x+1} + ½N_x + ½N_{x+1} − (1/2Δ)(S⁻_x S⁺_{x+1} + S⁺_x S⁻_{x+1})`
/// plus `Σ ν_x N_x`.
pub fn build_spin_sector(p: &ModelParams, length: usize) -> Result<SparseHermitian> {
    let n = p.n();
    if n > length {
        return Err(param_err(
            "n",
            format!("{n} magnons do not fit on a chain of length {length}"),
        ));
    }
    let window = Window::of_len(length)?;
    let basis = enumerate_window_basis(n, window)?;
    let t = p.hopping();
    let mut b = HermitianBuilder::with_capacity(basis.len(), basis.len() * n);
    let mut occ = vec![false; length + 2];
    for (idx, cfg) in basis.configs().iter().enumerate() {
        occ.iter_mut().for_each(|o| *o = false);
        for &s in cfg.sites() {
            occ[s as usize] = true;
        }
        let mut diag = 0.0;
        for x in 1..length {
            let (a, c) = (occ[x] as u8 as f64, occ[x + 1] as u8 as f64);
            diag += -a * c + 0.5 * a + 0.5 * c;
            if occ[x] != occ[x + 1] {
                // flip term: move the single down spin across the edge
                let mut sites: Vec<i64> = cfg.sites().to_vec();
                let (from, to) = if occ[x] { (x, x + 1) } else { (x + 1, x) };
                let k = sites.iter().position(|&s| s as usize == from).unwrap();
                sites[k] = to as i64;
                sites.sort_unstable();
                let other = basis.index_of_sites(&sites).unwrap();
                if other > idx {
                    b.add(idx, other, real(t));
                }
            }
        }
        diag += cfg.sites().iter().map(|&s| p.field().at(s)).sum::<f64>();
        b.add_diag(idx, diag);
    }
    Ok(b.finish(
        BasisInfo::SpinChain { n, length },
        Representation::SpinSector,
    ))
}

/// Diagonal shifts `+½` per particle sitting at site `1` or `L`; adding them to
/// [`build_spin_sector`] reproduces [`build_lattice_xn`] on `[1, L]`.
pub fn spin_boundary_correction(p: &ModelParams, length: usize) -> Result<Vec<(usize, f64)>> {
    let basis = enumerate_window_basis(p.n(), Window::of_len(length)?)?;
    let ends = [1i64, length as i64];
    Ok(basis
        .configs()
        .iter()
        .enumerate()
        .filter_map(|(idx, cfg)| {
            let at_end = cfg.sites().iter().filter(|s| ends.contains(s)).count();
            // a single-site chain has one end, not two
            let at_end = if length == 1 { at_end.min(1) } else { at_end };
            (at_end > 0).then_some((idx, 0.5 * at_end as f64))
        })
        .collect())
}

/// Relative coordinates `(x, n₁, …, n_{N−1})`: anchors in `anchors`, gaps capped
/// at `gap_cap`. Requires a vanishing field.
pub fn build_relative(p: &ModelParams, anchors: Window, gap_cap: u32) -> Result<SparseHermitian> {
    let n = p.n();
    if n < 2 {
        return Err(param_err(
            "n",
            "relative coordinates need at least two particles",
        ));
    }
    if !p.field().is_zero() {
        return Err(Error::Representation(
            "the relative-coordinate picture requires a translation-invariant (zero) field".into(),
        ));
    }
    let gb = GapBox::new(n - 1, gap_cap)?;
    let block = gb.len();
    let dim = anchors.len() * block;
    let t = real(p.hopping());
    let m = n - 1;
    let cap = gap_cap;
    let mut b = HermitianBuilder::with_capacity(dim, dim * n);
    let mut gaps = vec![0u32; m];
    let mut moved = vec![0u32; m];
    for a in 0..anchors.len() {
        for g in 0..block {
            let idx = a * block + g;
            gb.gaps(g, &mut gaps);
            let wide = gaps.iter().filter(|&&x| x >= 2).count();
            b.add_diag(idx, 1.0 + wide as f64);

            // Each edge of the ordered lattice is a single particle moving one
            // site right; only those moves are emitted.
            // particle 1 right: x + 1, n₁ − 1
            if gaps[0] >= 2 && a + 1 < anchors.len() {
                moved.copy_from_slice(&gaps);
                moved[0] -= 1;
                b.add(idx, (a + 1) * block + gb.index(&moved), t);
            }
            // interior particle j+1 (between gaps j-1 and j) right
            for j in 1..m {
                if gaps[j] >= 2 && gaps[j - 1] < cap {
                    moved.copy_from_slice(&gaps);
                    moved[j - 1] += 1;
                    moved[j] -= 1;
                    b.add(idx, a * block + gb.index(&moved), t);
                }
            }
            // last particle right
            if gaps[m - 1] < cap {
                moved.copy_from_slice(&gaps);
                moved[m - 1] += 1;
                b.add(idx, a * block + gb.index(&moved), t);
            }
        }
    }
    Ok(b.finish(
        BasisInfo::Relative {
            n,
            anchors,
            gap_cap,
        },
        Representation::Relative,
    ))
}

/// Maps `θ` into `[−π, π)`.
pub fn normalize_theta(theta: f64) -> f64 {
    if (-PI..PI).contains(&theta) {
        return theta;
    }
    let t = theta - 2.0 * PI * ((theta + PI) / (2.0 * PI)).floor();
    if t >= PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Bloch fiber at quasimomentum `θ` on the gap box `[1, gap_cap]^(N−1)`:
///
/// `−(1/2Δ)(e^{iθ}T₁* + e^{−iθ}T₁ + Σ_j (T*_{j+1}T_j + T*_jT_{j+1}) + T_m + T*_m) + Σ_j P_j + 1`.
pub fn build_fiber(p: &ModelParams, theta: f64, gap_cap: u32) -> Result<SparseHermitian> {
    let n = p.n();
    if n < 2 {
        return Err(param_err(
            "n",
            "the fiber operator needs at least two particles",
        ));
    }
    if !theta.is_finite() {
        return Err(param_err("theta", "quasimomentum must be finite"));
    }
    let theta_n = normalize_theta(theta);
    if theta_n != theta {
        warn!("theta = {theta} normalized to {theta_n} by 2π-periodicity");
    }
    let m = n - 1;
    let gb = GapBox::new(m, gap_cap)?;
    let dim = gb.len();
    let t = p.hopping();
    let twisted = phase(theta_n) * t;
    let mut b = HermitianBuilder::with_capacity(dim, dim * n);
    let mut gaps = vec![0u32; m];
    let mut moved = vec![0u32; m];
    for idx in 0..dim {
        gb.gaps(idx, &mut gaps);
        let wide = gaps.iter().filter(|&&x| x >= 2).count();
        b.add_diag(idx, 1.0 + wide as f64);

        if gaps[0] < gap_cap {
            // e^{iθ} T₁*: couples n to n + e₁ (adjoint supplied by storage)
            moved.copy_from_slice(&gaps);
            moved[0] += 1;
            b.add(idx, gb.index(&moved), twisted);
        }
        for j in 0..m.saturating_sub(1) {
            // T*_{j+1} T_j: n → n − e_j + e_{j+1}
            if gaps[j] >= 2 && gaps[j + 1] < gap_cap {
                moved.copy_from_slice(&gaps);
                moved[j] -= 1;
                moved[j + 1] += 1;
                b.add(idx, gb.index(&moved), real(t));
            }
        }
        if gaps[m - 1] < gap_cap {
            // T_m*: n → n + e_m
            moved.copy_from_slice(&gaps);
            moved[m - 1] += 1;
            b.add(idx, gb.index(&moved), real(t));
        }
    }
    Ok(b.finish(
        BasisInfo::Fiber {
            n,
            theta: theta_n,
            gap_cap,
        },
        Representation::Fiber,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::OrderedConfig;

    fn lattice_index(n: usize, window: Window, sites: &[i64]) -> usize {
        enumerate_window_basis(n, window)
            .unwrap()
            .index_of(&OrderedConfig::new(sites.to_vec()).unwrap())
            .unwrap()
    }

    #[test]
    fn lattice_two_particles_window_three() {
        let p = ModelParams::new(2.0, 2).unwrap();
        let w = Window::new(1, 3).unwrap();
        let h = build_lattice_xn(&p, w).unwrap();
        assert_eq!(h.dim(), 3);
        let d = h.to_dense_real().unwrap();
        let expected = nalgebra::DMatrix::from_row_slice(
            3,
            3,
            &[1.0, -0.25, 0.0, -0.25, 2.0, -0.25, 0.0, -0.25, 1.0],
        );
        assert_eq!(d, expected);
    }

    #[test]
    fn lattice_diagonal_counts_adjacent_pairs() {
        let p = ModelParams::new(2.0, 2).unwrap();
        let w = Window::new(1, 6).unwrap();
        let h = build_lattice_xn(&p, w).unwrap();
        assert_eq!(h.diagonal()[lattice_index(2, w, &[1, 2])], 1.0);
        assert_eq!(h.diagonal()[lattice_index(2, w, &[1, 3])], 2.0);
        for (i, j, v) in h.entries() {
            if i != j {
                assert_eq!(v, real(-0.25));
            }
        }
    }

    #[test]
    fn lattice_field_enters_diagonal() {
        let field = crate::params::Field::new(1, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let p = ModelParams::new(3.0, 2).unwrap().with_field(field);
        let w = Window::new(1, 4).unwrap();
        let h = build_lattice_xn(&p, w).unwrap();
        let i = lattice_index(2, w, &[2, 4]);
        assert!((h.diagonal()[i] - (2.0 + 0.2 + 0.4)).abs() < 1e-15);
    }

    #[test]
    fn spin_sector_small_chains() {
        let p = ModelParams::new(2.0, 1).unwrap();
        let h = build_spin_sector(&p, 2).unwrap();
        let expected = nalgebra::DMatrix::from_row_slice(2, 2, &[0.5, -0.25, -0.25, 0.5]);
        assert_eq!(h.to_dense_real().unwrap(), expected);

        let p2 = ModelParams::new(2.0, 2).unwrap();
        let h = build_spin_sector(&p2, 2).unwrap();
        assert_eq!(h.dim(), 1);
        assert_eq!(h.get(0, 0), real(0.0));

        let h = build_spin_sector(&p, 3).unwrap();
        assert_eq!(h.diagonal(), &[0.5, 1.0, 0.5]);
        assert_eq!(h.get(0, 1), real(-0.25));
        assert_eq!(h.get(1, 2), real(-0.25));
        assert_eq!(h.get(0, 2), real(0.0));

        assert!(build_spin_sector(&ModelParams::new(2.0, 4).unwrap(), 3).is_err());
    }

    #[test]
    fn spin_sector_plus_boundary_equals_lattice() {
        for n in 1..=3 {
            for len in n.max(2)..=7 {
                let p = ModelParams::new(1.5, n).unwrap();
                let spin = build_spin_sector(&p, len).unwrap();
                let corrected =
                    spin.with_diagonal_added(&spin_boundary_correction(&p, len).unwrap());
                let lattice = build_lattice_xn(&p, Window::of_len(len).unwrap()).unwrap();
                for i in 0..lattice.dim() {
                    for j in 0..lattice.dim() {
                        assert!((corrected.get(i, j) - lattice.get(i, j)).norm() <= 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn relative_vertex_potentials() {
        let p2 = ModelParams::new(2.0, 2).unwrap();
        let anchors = Window::new(0, 3).unwrap();
        let h = build_relative(&p2, anchors, 5).unwrap();
        // anchor block 0, gaps 1 and 2
        assert_eq!(h.diagonal()[0], 1.0);
        assert_eq!(h.diagonal()[1], 2.0);
        assert_eq!(h.diagonal()[4], 2.0);

        let p3 = ModelParams::new(2.0, 3).unwrap();
        let h = build_relative(&p3, anchors, 4).unwrap();
        let gb = GapBox::new(2, 4).unwrap();
        assert_eq!(h.diagonal()[gb.index(&[1, 1])], 1.0);
        assert_eq!(h.diagonal()[gb.index(&[1, 2])], 2.0);
        assert_eq!(h.diagonal()[gb.index(&[2, 2])], 3.0);
    }

    #[test]
    fn relative_rejects_field() {
        let field = crate::params::Field::new(0, vec![0.5]).unwrap();
        let p = ModelParams::new(2.0, 2).unwrap().with_field(field);
        let err = build_relative(&p, Window::new(0, 3).unwrap(), 3).unwrap_err();
        assert!(matches!(err, Error::Representation(_)));
    }

    #[test]
    fn relative_edges_are_images_of_lattice_edges() {
        // Every relative edge maps to an l1-neighbour pair of ordered tuples.
        let p = ModelParams::new(2.0, 3).unwrap();
        let anchors = Window::new(0, 4).unwrap();
        let cap = 4;
        let h = build_relative(&p, anchors, cap).unwrap();
        let gb = GapBox::new(2, cap).unwrap();
        let decode = |idx: usize| {
            let mut g = [0u32; 2];
            gb.gaps(idx % gb.len(), &mut g);
            let r =
                crate::basis::RelativeConfig::new(anchors.lo + (idx / gb.len()) as i64, g.to_vec())
                    .unwrap();
            r.to_ordered().sites().to_vec()
        };
        let mut edges = 0;
        for (i, j, v) in h.entries() {
            if i == j {
                continue;
            }
            edges += 1;
            assert_eq!(v, real(-0.25));
            let (a, b) = (decode(i), decode(j));
            let l1: i64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
            assert_eq!(l1, 1, "{a:?} {b:?}");
        }
        assert!(edges > 0);
    }

    #[test]
    fn fiber_two_particles_is_jacobi() {
        let p = ModelParams::new(2.0, 2).unwrap();
        let h = build_fiber(&p, 0.0, 6).unwrap();
        assert!(h.is_real());
        let diag: Vec<f64> = h.diagonal().to_vec();
        assert_eq!(diag, vec![1.0, 2.0, 2.0, 2.0, 2.0, 2.0]);
        for i in 0..5 {
            assert_eq!(h.get(i, i + 1), real(-0.5));
            if i + 2 < 6 {
                assert_eq!(h.get(i, i + 2), real(0.0));
            }
        }
        let theta = 0.7;
        let h = build_fiber(&p, theta, 6).unwrap();
        let expected = -(Complex64::new(1.0, 0.0) + phase(theta)) / 4.0;
        assert!((h.get(0, 1) - expected).norm() < 1e-16);
    }

    #[test]
    fn fiber_two_particles_at_minus_pi_is_diagonal() {
        let p = ModelParams::new(2.0, 2).unwrap();
        let h = build_fiber(&p, -PI, 5).unwrap();
        assert_eq!(h.offdiag_len(), 0);
        assert_eq!(h.diagonal(), &[1.0, 2.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn fiber_three_particles_vertex_potentials() {
        let p = ModelParams::new(2.0, 3).unwrap();
        let gb = GapBox::new(2, 5).unwrap();
        let h = build_fiber(&p, 0.3, 5).unwrap();
        assert!(!h.is_real());
        assert_eq!(h.diagonal()[gb.index(&[1, 1])], 1.0);
        assert_eq!(h.diagonal()[gb.index(&[2, 1])], 2.0);
        assert_eq!(h.diagonal()[gb.index(&[3, 4])], 3.0);
        // directed edge in n₁ carries the phase
        assert!((h.get(gb.index(&[1, 1]), gb.index(&[2, 1])) - phase(0.3) * -0.25).norm() < 1e-16);
        // exchange hop n₁ → n₂
        assert_eq!(h.get(gb.index(&[1, 2]), gb.index(&[2, 1])), real(-0.25));
    }

    #[test]
    fn theta_normalization() {
        assert_eq!(normalize_theta(0.5), 0.5);
        assert!((normalize_theta(PI) + PI).abs() < 1e-15);
        assert!((normalize_theta(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((normalize_theta(-5.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        let p = ModelParams::new(2.0, 3).unwrap();
        let h = build_fiber(&p, 2.0 * PI + 0.25, 3).unwrap();
        match h.basis() {
            BasisInfo::Fiber { theta, .. } => assert!((theta - 0.25).abs() < 1e-14),
            other => panic!("unexpected basis {other:?}"),
        }
    }
}
