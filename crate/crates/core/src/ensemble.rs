//! Random nonnegative fields on a finite window.
//!
//! Sample `i` of a run with master seed `s` draws its field from a ChaCha20
//! stream keyed by `SHA-256(s.to_le_bytes() ‖ i.to_le_bytes())`, so a sample is
//! reproducible on its own and independent of the order samples are run in.
//! Uniform variates are `(next_u64 >> 11) · 2⁻⁵³`.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bands::enclosure_bands;
use crate::basis::Window;
use crate::bethe::droplet_band;
use crate::error::{param_err, Error, Result};
use crate::hamiltonians::build_lattice_xn;
use crate::params::{Field, ModelParams};
use crate::spectra::{
    dense_spectrum_with, extremal_with, DenseOptions, End, LanczosConfig, Method, AUTO_DENSE_MAX,
};

/// Identifier of the sampling scheme, recorded in every output.
pub const PRNG_ID: &str = "sha256(seed_le||index_le)->chacha20;u=(u64>>11)*2^-53";

/// Slack for the rigorous finite-volume checks.
pub const CHECK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldSpec {
    /// i.i.d. uniform on `[0, ν_max]`.
    Uniform { nu_max: f64 },
    /// `ν_max` with probability `p`, else `0`.
    TwoPoint { nu_max: f64, p: f64 },
}

impl FieldSpec {
    pub fn nu_max(&self) -> f64 {
        match *self {
            FieldSpec::Uniform { nu_max } | FieldSpec::TwoPoint { nu_max, .. } => nu_max,
        }
    }

    fn validate(&self) -> Result<()> {
        let nu = self.nu_max();
        if !(nu.is_finite() && nu >= 0.0) {
            return Err(param_err(
                "nu_max",
                format!("must be finite and nonnegative, got {nu}"),
            ));
        }
        if let FieldSpec::TwoPoint { p, .. } = *self {
            if !(0.0..=1.0).contains(&p) {
                return Err(param_err(
                    "p",
                    format!("probability must lie in [0, 1], got {p}"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub window: Window,
    pub values: Vec<f64>,
    pub spec: FieldSpec,
    pub master_seed: u64,
    pub index: u64,
}

impl FieldSample {
    pub fn field(&self) -> Field {
        Field::new(self.window.lo, self.values.clone()).expect("sampled values are nonnegative")
    }
}

pub fn sample_seed(master_seed: u64, index: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(master_seed.to_le_bytes());
    h.update(index.to_le_bytes());
    h.finalize().into()
}

pub fn sample_field(
    spec: &FieldSpec,
    window: Window,
    master_seed: u64,
    index: u64,
) -> Result<FieldSample> {
    spec.validate()?;
    let mut rng = ChaCha20Rng::from_seed(sample_seed(master_seed, index));
    let mut uniform = || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let values = (0..window.len())
        .map(|_| match *spec {
            FieldSpec::Uniform { nu_max } => uniform() * nu_max,
            FieldSpec::TwoPoint { nu_max, p } => {
                if uniform() < p {
                    nu_max
                } else {
                    0.0
                }
            }
        })
        .collect();
    Ok(FieldSample {
        window,
        values,
        spec: *spec,
        master_seed,
        index,
    })
}

/// `Σ |v_i|⁴` for a unit vector.
pub fn ipr(v: &[Complex64]) -> Result<f64> {
    let n2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if (n2.sqrt() - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(n2.sqrt()));
    }
    Ok(v.iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: u64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub ground_ipr: f64,
    /// `min σ ≥ min δ_N − tol`.
    pub lower_bound_ok: bool,
    /// Spectrum inside `∪_k [k − N/Δ, k + N/Δ + N ν_max]`.
    pub enclosure_ok: bool,
    /// `min σ` with the field `≥` `min σ` without it.
    pub monotone_ok: bool,
    /// `max |σ| ≤ N(1 + 1/Δ + ν_max)`.
    pub norm_ok: bool,
    pub method: Method,
    pub max_residual: f64,
}

impl SampleRecord {
    pub fn all_ok(&self) -> bool {
        self.lower_bound_ok && self.enclosure_ok && self.monotone_ok && self.norm_ok
    }
}

/// Solver settings for ensemble samples; the cap is larger than the generic
/// default because random fields cluster the low-lying levels.
pub fn ensemble_lanczos() -> LanczosConfig {
    LanczosConfig::default().with_max_iter(1500)
}

struct Extremes {
    lowest: f64,
    highest: f64,
    all: Option<Vec<f64>>,
    ground: Vec<Complex64>,
    method: Method,
    max_residual: f64,
}

fn extremes(p: &ModelParams, window: Window, need_all: bool) -> Result<Extremes> {
    let h = build_lattice_xn(p, window)?;
    if need_all || h.dim() <= AUTO_DENSE_MAX {
        let s = dense_spectrum_with(
            &h,
            DenseOptions {
                cap: crate::spectra::DEFAULT_DENSE_CAP,
                vectors: true,
            },
        )?;
        let ground = s.eigenvectors.as_ref().unwrap()[0].clone();
        return Ok(Extremes {
            lowest: s.eigenvalues[0],
            highest: *s.eigenvalues.last().unwrap(),
            max_residual: s.max_residual(),
            all: Some(s.eigenvalues),
            ground,
            method: Method::Dense,
        });
    }
    let cfg = ensemble_lanczos().with_vectors();
    let low = extremal_with(&h, 1, End::Lowest, &cfg)?;
    let high = extremal_with(&h, 1, End::Highest, &ensemble_lanczos())?;
    let max_residual = low.max_residual().max(high.max_residual());
    Ok(Extremes {
        lowest: low.eigenvalues[0],
        highest: high.eigenvalues[0],
        all: None,
        ground: low.eigenvectors.unwrap().swap_remove(0),
        method: Method::Lanczos,
        max_residual,
    })
}

/// Fieldless ground energy on `window`, shared by every sample of a run.
pub fn baseline_minimum(p: &ModelParams, window: Window) -> Result<f64> {
    let base = ModelParams::new(p.delta(), p.n())?;
    Ok(extremes(&base, window, false)?.lowest)
}

pub fn run_sample(
    p: &ModelParams,
    spec: &FieldSpec,
    window: Window,
    master_seed: u64,
    index: u64,
    baseline_min: f64,
) -> Result<SampleRecord> {
    let sample = sample_field(spec, window, master_seed, index)?;
    let pf = ModelParams::new(p.delta(), p.n())?.with_field(sample.field());
    let n = p.n() as f64;
    let nu = spec.nu_max();
    let shifted: Vec<(f64, f64)> = enclosure_bands(p)
        .into_iter()
        .map(|b| (b.lo, b.hi + n * nu))
        .collect();
    let single_interval = shifted.windows(2).all(|w| w[1].0 <= w[0].1);
    let e = extremes(&pf, window, !single_interval)?;

    let inside = |x: f64| {
        shifted
            .iter()
            .any(|&(lo, hi)| lo - CHECK_TOL <= x && x <= hi + CHECK_TOL)
    };
    let enclosure_ok = match &e.all {
        Some(all) if !single_interval => all.iter().all(|&x| inside(x)),
        _ => inside(e.lowest) && inside(e.highest),
    };
    let bound = pf.norm_bound();
    Ok(SampleRecord {
        index,
        min_eigenvalue: e.lowest,
        max_eigenvalue: e.highest,
        ground_ipr: ipr(&e.ground)?,
        lower_bound_ok: e.lowest >= droplet_band(p).lo - CHECK_TOL,
        enclosure_ok,
        monotone_ok: e.lowest >= baseline_min - 1e-10,
        norm_ok: e.lowest.abs().max(e.highest.abs()) <= bound + CHECK_TOL,
        method: e.method,
        max_residual: e.max_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub q10: f64,
    pub q50: f64,
    pub q90: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |t: f64| {
            let x = t * (v.len() - 1) as f64;
            let (i, f) = (x.floor() as usize, x.fract());
            if i + 1 < v.len() {
                v[i] * (1.0 - f) + v[i + 1] * f
            } else {
                v[i]
            }
        };
        Some(Self {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            min: v[0],
            max: v[v.len() - 1],
            q10: q(0.1),
            q50: q(0.5),
            q90: q(0.9),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub params: ModelParams,
    pub spec: FieldSpec,
    pub window: Window,
    pub master_seed: u64,
    pub prng: String,
    pub baseline_min: f64,
    /// Sorted by sample index.
    pub samples: Vec<SampleRecord>,
    pub min_energy: Summary,
    pub ground_ipr: Summary,
    pub all_checks_pass: bool,
}

/// Assembles statistics from per-sample records in any order.
pub fn collect_stats(
    p: &ModelParams,
    spec: &FieldSpec,
    window: Window,
    master_seed: u64,
    baseline_min: f64,
    mut samples: Vec<SampleRecord>,
) -> Result<EnsembleStats> {
    if samples.is_empty() {
        return Err(param_err("samples", "at least one sample is required"));
    }
    samples.sort_by_key(|s| s.index);
    let energies: Vec<f64> = samples.iter().map(|s| s.min_eigenvalue).collect();
    let iprs: Vec<f64> = samples.iter().map(|s| s.ground_ipr).collect();
    Ok(EnsembleStats {
        params: p.clone(),
        spec: *spec,
        window,
        master_seed,
        prng: PRNG_ID.to_string(),
        baseline_min,
        all_checks_pass: samples.iter().all(SampleRecord::all_ok),
        min_energy: Summary::of(&energies).unwrap(),
        ground_ipr: Summary::of(&iprs).unwrap(),
        samples,
    })
}

/// Runs samples `0..n_samples` one after another.
pub fn ensemble_run(
    p: &ModelParams,
    spec: &FieldSpec,
    window: Window,
    n_samples: u64,
    master_seed: u64,
) -> Result<EnsembleStats> {
    if n_samples == 0 {
        return Err(param_err("samples", "at least one sample is required"));
    }
    spec.validate()?;
    let baseline = baseline_minimum(p, window)?;
    let samples = (0..n_samples)
        .map(|i| run_sample(p, spec, window, master_seed, i, baseline))
        .collect::<Result<Vec<_>>>()?;
    collect_stats(p, spec, window, master_seed, baseline, samples)
}
