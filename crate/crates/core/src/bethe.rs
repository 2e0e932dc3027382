//! The droplet bound state: coefficients, dispersion and bands.
//!
//! On the fiber at quasimomentum `θ` the droplet eigenfunction is the product
//! `φ(n₁, …, n_{N−1}) = Π a_k^{n_k}`. The coefficients solve a Jacobi system
//! with diagonal `2Δ`, off-diagonal `−1` and right-hand side
//! `(e^{−iθ}, 0, …, 0, 1)`; they also have the closed form
//!
//! ```text
//! a_k = e^{−iθ/2} ( cos(θ/2) cosh((k − N/2)ρ) / cosh(Nρ/2)
//!                 + i sin(θ/2) sinh((k − N/2)ρ) / sinh(Nρ/2) )
//! ```
//!
//! Both are computed and compared on every call.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::GapBox;
use crate::error::{param_err, Error, Result};
use crate::hamiltonians::normalize_theta;
use crate::params::ModelParams;
use crate::sparse::phase;

/// Tolerance for the internal cross-checks between the two derivations.
pub const DERIVATION_TOL: f64 = 1e-12;

/// Closed energy interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(param_err(
                "band",
                format!("[{lo}, {hi}] is not a closed interval"),
            ));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        self.lo - slack <= x && x <= self.hi + slack
    }

    /// Minkowski sum `self + other`.
    pub fn add(&self, other: &Band) -> Band {
        Band {
            lo: self.lo + other.lo,
            hi: self.hi + other.hi,
        }
    }

    /// `k · self` for `k ≥ 0`.
    pub fn scale(&self, k: f64) -> Band {
        Band {
            lo: k * self.lo,
            hi: k * self.hi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialCase {
    Generic,
    N1,
    N2,
    /// `θ = −π` with `N` even: `a_{N/2}` vanishes and the eigenfunction lives
    /// on the hypersurface `n_{N/2} = 1`.
    ThetaMinusPiEven,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheSolution {
    pub theta: f64,
    pub n: usize,
    pub delta: f64,
    /// `a₁ … a_{N−1}`.
    pub coefficients: Vec<Complex64>,
    /// `b_j = e^{iθ/2} a_{j + N/2}` for `j = −(N−2)/2 … (N−2)/2` in unit steps.
    pub b: Vec<Complex64>,
    /// `b_j = c₊ e^{ρj} + conj(c₊) e^{−ρj}`.
    pub c_plus: Complex64,
    pub energy: f64,
    pub special_case: SpecialCase,
}

impl BetheSolution {
    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|a| a.norm())
            .fold(0.0, f64::max)
    }
}

/// `E_N(θ) = tanh ρ (cosh Nρ − cos θ) / sinh Nρ`, written so that large `Nρ`
/// does not overflow.
pub fn dispersion(p: &ModelParams, theta: f64) -> f64 {
    let rho = p.rho();
    let x = p.n() as f64 * rho;
    rho.tanh() * (1.0 / x.tanh() - theta.cos() / x.sinh())
}

/// Solves the `m × m` Jacobi system `2Δ a_k − a_{k−1} − a_{k+1} = r_k` by the
/// Thomas algorithm.
pub fn solve_jacobi(delta: f64, rhs: &[Complex64]) -> Vec<Complex64> {
    let m = rhs.len();
    let mut c = vec![0.0; m];
    let mut d = vec![Complex64::new(0.0, 0.0); m];
    let diag = 2.0 * delta;
    for k in 0..m {
        let denom = if k == 0 { diag } else { diag + c[k - 1] };
        c[k] = -1.0 / denom;
        d[k] = if k == 0 {
            rhs[0] / denom
        } else {
            (rhs[k] + d[k - 1]) / denom
        };
    }
    let mut x = d;
    for k in (0..m.saturating_sub(1)).rev() {
        let next = x[k + 1];
        x[k] -= c[k] * next;
    }
    x
}

/// Closed-form coefficients `a₁ … a_{N−1}`.
pub fn closed_form_coefficients(p: &ModelParams, theta: f64) -> Vec<Complex64> {
    let n = p.n();
    let rho = p.rho();
    let half = n as f64 / 2.0;
    let (s, c) = (theta / 2.0).sin_cos();
    let pre = phase(-theta / 2.0);
    let ch = (half * rho).cosh();
    let sh = (half * rho).sinh();
    (1..n)
        .map(|k| {
            let y = (k as f64 - half) * rho;
            pre * Complex64::new(c * y.cosh() / ch, s * y.sinh() / sh)
        })
        .collect()
}

fn special_case(n: usize, theta: f64) -> SpecialCase {
    match n {
        1 => SpecialCase::N1,
        2 if theta != -PI => SpecialCase::N2,
        _ if theta == -PI && n.is_multiple_of(2) => SpecialCase::ThetaMinusPiEven,
        _ => SpecialCase::Generic,
    }
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Droplet coefficients at quasimomentum `θ` (taken modulo `2π`).
///
/// The direct Jacobi solve and the closed form must agree to
/// [`DERIVATION_TOL`]; otherwise [`Error::DerivationMismatch`] is returned.
pub fn solve_coefficients(p: &ModelParams, theta: f64) -> Result<BetheSolution> {
    if !theta.is_finite() {
        return Err(param_err("theta", "quasimomentum must be finite"));
    }
    let theta = normalize_theta(theta);
    let n = p.n();
    let delta = p.delta();
    let special = special_case(n, theta);
    let energy = dispersion(p, theta);

    if special == SpecialCase::N1 {
        return Ok(BetheSolution {
            theta,
            n,
            delta,
            coefficients: Vec::new(),
            b: Vec::new(),
            c_plus: Complex64::new(0.0, 0.0),
            energy,
            special_case: special,
        });
    }

    let m = n - 1;
    let mut rhs = vec![Complex64::new(0.0, 0.0); m];
    rhs[0] += phase(-theta);
    rhs[m - 1] += Complex64::new(1.0, 0.0);
    let direct = solve_jacobi(delta, &rhs);
    let closed = closed_form_coefficients(p, theta);
    let mismatch = |discrepancy| Error::DerivationMismatch {
        n,
        delta,
        theta,
        discrepancy,
    };
    let discrepancy = max_diff(&direct, &closed);
    if discrepancy > DERIVATION_TOL {
        return Err(mismatch(discrepancy));
    }
    if special == SpecialCase::Generic && closed.iter().any(|a| a.norm() == 0.0) {
        return Err(Error::Representation(format!(
            "a vanishing droplet coefficient at N={n}, theta={theta}"
        )));
    }

    // Site-(1, …, 1) evaluation of the eigenvalue equation.
    let site = 1.0 - (phase(theta) * closed[0] + closed[m - 1]) / (2.0 * delta);
    let discrepancy = (site.re - energy).abs().max(site.im.abs());
    if discrepancy > DERIVATION_TOL {
        return Err(mismatch(discrepancy));
    }

    let rho = p.rho();
    let half = n as f64 / 2.0;
    let (s, c) = (theta / 2.0).sin_cos();
    let c_plus = Complex64::new(
        c / (2.0 * (half * rho).cosh()),
        s / (2.0 * (half * rho).sinh()),
    );
    let shift = phase(theta / 2.0);
    let b = closed.iter().map(|a| shift * a).collect();

    Ok(BetheSolution {
        theta,
        n,
        delta,
        coefficients: closed,
        b,
        c_plus,
        energy,
        special_case: special,
    })
}

/// `E_N(θ)`, cross-checked against the site evaluation for `N ≥ 3`.
pub fn droplet_energy(p: &ModelParams, theta: f64) -> Result<f64> {
    if p.n() >= 3 {
        Ok(solve_coefficients(p, theta)?.energy)
    } else {
        Ok(dispersion(p, theta))
    }
}

/// Amplitude of the droplet eigenfunction at the gap vector `gaps`.
pub fn droplet_eigenfunction(s: &BetheSolution, gaps: &[u32]) -> Complex64 {
    debug_assert_eq!(gaps.len(), s.coefficients.len());
    let pinned = (s.special_case == SpecialCase::ThetaMinusPiEven).then(|| s.n / 2 - 1);
    let mut amp = Complex64::new(1.0, 0.0);
    for (k, (&a, &g)) in s.coefficients.iter().zip(gaps).enumerate() {
        if Some(k) == pinned {
            if g != 1 {
                return Complex64::new(0.0, 0.0);
            }
        } else {
            amp *= a.powu(g);
        }
    }
    amp
}

/// The droplet eigenfunction sampled on the gap box `[1, cap]^(N−1)` in
/// [`GapBox`] order.
pub fn droplet_vector(s: &BetheSolution, cap: u32) -> Result<Vec<Complex64>> {
    if s.n < 2 {
        return Err(param_err(
            "n",
            "the droplet vector needs at least two particles",
        ));
    }
    let gb = GapBox::new(s.n - 1, cap)?;
    let mut gaps = vec![0u32; gb.m()];
    Ok((0..gb.len())
        .map(|i| {
            gb.gaps(i, &mut gaps);
            droplet_eigenfunction(s, &gaps)
        })
        .collect())
}

/// `δ_N = [E_N(0), E_N(π)]`.
pub fn droplet_band(p: &ModelParams) -> Band {
    Band {
        lo: dispersion(p, 0.0),
        hi: dispersion(p, PI),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(delta: f64, n: usize) -> ModelParams {
        ModelParams::new(delta, n).unwrap()
    }

    #[test]
    fn three_particles_at_zero_momentum() {
        let s = solve_coefficients(&params(2.0, 3), 0.0).unwrap();
        for a in &s.coefficients {
            assert!((a - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
        }
        assert!((s.energy - 5.0 / 6.0).abs() < 1e-15);
        assert!((droplet_eigenfunction(&s, &[1, 1]).re - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn two_particle_coefficient() {
        let s = solve_coefficients(&params(2.0, 2), 0.0).unwrap();
        assert_eq!(s.special_case, SpecialCase::N2);
        assert!((s.coefficients[0] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((droplet_eigenfunction(&s, &[3]).re - 0.125).abs() < 1e-15);

        let theta = 1.1;
        let s = solve_coefficients(&params(3.0, 2), theta).unwrap();
        let expected = (Complex64::new(1.0, 0.0) + phase(-theta)) / 6.0;
        assert!((s.coefficients[0] - expected).norm() < 1e-15);
    }

    #[test]
    fn energies() {
        assert!((droplet_energy(&params(2.0, 2), 0.0).unwrap() - 0.75).abs() < 1e-15);
        assert!((droplet_energy(&params(2.0, 3), 0.0).unwrap() - 5.0 / 6.0).abs() < 1e-15);
        assert!((droplet_energy(&params(2.0, 1), PI / 2.0).unwrap() - 1.0).abs() < 1e-15);
        for &delta in &[1.5, 2.0, 4.0] {
            for &theta in &[0.0, 0.4, 2.0, -2.9] {
                let e1 = dispersion(&params(delta, 1), theta);
                assert!((e1 - (1.0 - theta.cos() / delta)).abs() < 1e-14);
                let e2 = dispersion(&params(delta, 2), theta);
                assert!((e2 - (1.0 - (1.0 + theta.cos()) / (2.0 * delta * delta))).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn bands_match_closed_forms() {
        for &d in &[1.5, 2.0, 4.0] {
            let b1 = droplet_band(&params(d, 1));
            assert!(
                (b1.lo - (1.0 - 1.0 / d)).abs() < 1e-13 && (b1.hi - (1.0 + 1.0 / d)).abs() < 1e-13
            );
            let b2 = droplet_band(&params(d, 2));
            assert!((b2.lo - (1.0 - 1.0 / (d * d))).abs() < 1e-13 && (b2.hi - 1.0).abs() < 1e-13);
            let b3 = droplet_band(&params(d, 3));
            assert!((b3.lo - (1.0 - 1.0 / (2.0 * d * d - d))).abs() < 1e-13);
            assert!((b3.hi - (1.0 - 1.0 / (2.0 * d * d + d))).abs() < 1e-13);
        }
        let b3 = droplet_band(&params(2.0, 3));
        assert!((b3.lo - 5.0 / 6.0).abs() < 1e-15 && (b3.hi - 0.9).abs() < 1e-15);
    }

    #[test]
    fn minus_pi_even_pins_middle_gap() {
        let s = solve_coefficients(&params(2.0, 4), -PI).unwrap();
        assert_eq!(s.special_case, SpecialCase::ThetaMinusPiEven);
        assert!(s.coefficients[1].norm() < 1e-15);
        let rho = params(2.0, 4).rho();
        let expected = (-rho).sinh() / (2.0 * rho).sinh();
        assert!((s.coefficients[0].re - expected).abs() < 1e-15);
        assert_ne!(
            droplet_eigenfunction(&s, &[1, 1, 1]),
            Complex64::new(0.0, 0.0)
        );
        assert_eq!(
            droplet_eigenfunction(&s, &[1, 2, 1]),
            Complex64::new(0.0, 0.0)
        );

        // π is the same fiber as −π
        let s = solve_coefficients(&params(2.0, 4), PI).unwrap();
        assert_eq!(s.special_case, SpecialCase::ThetaMinusPiEven);
    }

    #[test]
    fn minus_pi_odd_stays_generic() {
        let s = solve_coefficients(&params(2.0, 5), -PI).unwrap();
        assert_eq!(s.special_case, SpecialCase::Generic);
        assert!(s.coefficients.iter().all(|a| a.norm() > 0.0));
    }

    #[test]
    fn b_profile_matches_c_plus() {
        for n in [3usize, 4, 7] {
            let p = params(1.7, n);
            let s = solve_coefficients(&p, 0.9).unwrap();
            let half = n as f64 / 2.0;
            for (idx, b) in s.b.iter().enumerate() {
                let j = (idx + 1) as f64 - half;
                let expect =
                    s.c_plus * (p.rho() * j).exp() + s.c_plus.conj() * (-p.rho() * j).exp();
                assert!((b - expect).norm() < 1e-14);
            }
            let len = s.b.len();
            for i in 0..len {
                assert!((s.b[i] - s.b[len - 1 - i].conj()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn thomas_solves_general_system() {
        let rhs = vec![
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        let x = solve_jacobi(1.3, &rhs);
        let apply = |k: usize| {
            let mut v = 2.6 * x[k];
            if k > 0 {
                v -= x[k - 1];
            }
            if k + 1 < 3 {
                v -= x[k + 1];
            }
            v
        };
        for (k, r) in rhs.iter().enumerate() {
            assert!((apply(k) - r).norm() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn coefficients_bounded_by_inverse_delta(
            n in 2usize..=12,
            delta in 1.05f64..12.0,
            theta in -PI..PI,
        ) {
            let s = solve_coefficients(&params(delta, n), theta).unwrap();
            prop_assert!(s.max_abs_coefficient() <= 1.0 / delta + 1e-14);
            prop_assert!(s.energy.is_finite());
        }

        #[test]
        fn zero_momentum_coefficients_positive(n in 2usize..=12, delta in 1.05f64..12.0) {
            let s = solve_coefficients(&params(delta, n), 0.0).unwrap();
            for a in &s.coefficients {
                prop_assert!(a.re > 0.0);
                prop_assert!(a.im.abs() < 1e-15);
            }
        }

        #[test]
        fn droplet_bands_nest(n in 1usize..=14, delta in 1.05f64..12.0) {
            let lower = droplet_band(&params(delta, n));
            let upper = droplet_band(&params(delta, n + 1));
            // strict while the edge differences e^{-Nρ} stay above rounding
            if (n + 1) as f64 * params(delta, 1).rho() < 25.0 {
                prop_assert!(upper.lo > lower.lo);
                prop_assert!(upper.hi < lower.hi);
            }
            prop_assert!(upper.lo >= lower.lo && upper.hi <= lower.hi);
            let common = (1.0 - 1.0 / (delta * delta)).sqrt();
            prop_assert!(lower.contains(common, 1e-14));
        }

        #[test]
        fn dispersion_extremes_at_band_edges(n in 1usize..=10, delta in 1.05f64..12.0, theta in -PI..PI) {
            let p = params(delta, n);
            let band = droplet_band(&p);
            prop_assert!(band.contains(dispersion(&p, theta), 1e-14));
        }
    }
}
