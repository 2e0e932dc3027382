//! Cluster bands and the interval algebra behind them.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bethe::{droplet_band, Band};
use crate::error::{param_err, Result};
use crate::params::ModelParams;

/// Touching or overlapping intervals closer than this are merged.
pub const MERGE_TOL: f64 = 1e-12;

/// Sorted union of pairwise disjoint closed intervals.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BandSet {
    bands: Vec<Band>,
}

impl BandSet {
    pub fn from_bands(mut bands: Vec<Band>) -> Self {
        bands.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut merged: Vec<Band> = Vec::with_capacity(bands.len());
        for b in bands {
            match merged.last_mut() {
                Some(last) if b.lo <= last.hi + MERGE_TOL => last.hi = last.hi.max(b.hi),
                _ => merged.push(b),
            }
        }
        Self { bands: merged }
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    pub fn union(&self, other: &BandSet) -> BandSet {
        BandSet::from_bands(self.bands.iter().chain(&other.bands).copied().collect())
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        self.bands.iter().any(|b| b.contains(x, slack))
    }

    /// Every band of `self` lies inside some band of `other`.
    pub fn is_subset_of(&self, other: &BandSet, slack: f64) -> bool {
        self.bands.iter().all(|b| {
            other
                .bands
                .iter()
                .any(|o| o.lo - slack <= b.lo && b.hi <= o.hi + slack)
        })
    }

    /// Largest endpoint distance between two sets with the same number of
    /// components, `∞` otherwise.
    pub fn distance(&self, other: &BandSet) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.bands
            .iter()
            .zip(&other.bands)
            .map(|(a, b)| (a.lo - b.lo).abs().max((a.hi - b.hi).abs()))
            .fold(0.0, f64::max)
    }

    pub fn min(&self) -> Option<f64> {
        self.bands.first().map(|b| b.lo)
    }

    pub fn max(&self) -> Option<f64> {
        self.bands.last().map(|b| b.hi)
    }
}

/// Non-increasing list of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// All partitions of `n` into exactly `k` parts, in reverse lexicographic order.
pub fn partitions(n: usize, k: usize) -> Result<Vec<Partition>> {
    if k == 0 || k > n {
        return Err(param_err(
            "k",
            format!("need 1 <= k <= N, got k={k}, N={n}"),
        ));
    }
    fn rec(
        remaining: usize,
        slots: usize,
        max_part: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Partition>,
    ) {
        if slots == 0 {
            if remaining == 0 {
                out.push(Partition(prefix.clone()));
            }
            return;
        }
        // the remaining slots each need at least one
        let hi = max_part.min(remaining + 1 - slots);
        let lo = remaining.div_ceil(slots);
        for part in (lo..=hi).rev() {
            prefix.push(part);
            rec(remaining - part, slots - 1, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, n, &mut Vec::with_capacity(k), &mut out);
    Ok(out)
}

/// `C_k(N) = (k − 1) δ₁ + δ_{N−k+1}`.
pub fn cluster_band(p: &ModelParams, k: usize) -> Result<Band> {
    let n = p.n();
    if k == 0 || k > n {
        return Err(param_err(
            "k",
            format!("need 1 <= k <= N, got k={k}, N={n}"),
        ));
    }
    let single = droplet_band(&p.with_n(1)?);
    let big = droplet_band(&p.with_n(n - k + 1)?);
    Ok(single.scale((k - 1) as f64).add(&big))
}

/// Union over all `k`-part partitions of the Minkowski sums of droplet bands.
pub fn partition_union(p: &ModelParams, k: usize) -> Result<BandSet> {
    let mut bands = Vec::new();
    for part in partitions(p.n(), k)? {
        let mut sum = Band::point(0.0);
        for &size in part.parts() {
            sum = sum.add(&droplet_band(&p.with_n(size)?));
        }
        bands.push(sum);
    }
    Ok(BandSet::from_bands(bands))
}

/// `C(N) = ∪_k C_k(N)`.
pub fn total_cluster_spectrum(p: &ModelParams) -> Result<BandSet> {
    let bands = (1..=p.n())
        .map(|k| cluster_band(p, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(BandSet::from_bands(bands))
}

/// `{0} ∪ C(1) ∪ … ∪ C(n_max)`.
pub fn xxz_cluster_union(p: &ModelParams, n_max: usize) -> Result<BandSet> {
    if n_max == 0 {
        return Err(param_err("nmax", "must be at least 1"));
    }
    let mut set = BandSet::from_bands(vec![Band::point(0.0)]);
    for n in 1..=n_max {
        set = set.union(&total_cluster_spectrum(&p.with_n(n)?)?);
    }
    Ok(set)
}

/// `{0} ∪ ∪_{k ≤ n_max} [k(1 − 1/Δ), k(1 + 1/Δ)]`.
pub fn xxz_union_closed_form(delta: f64, n_max: usize) -> BandSet {
    let mut bands = vec![Band::point(0.0)];
    bands.extend((1..=n_max).map(|k| {
        let k = k as f64;
        Band {
            lo: k * (1.0 - 1.0 / delta),
            hi: k * (1.0 + 1.0 / delta),
        }
    }));
    BandSet::from_bands(bands)
}

/// `[k − N/Δ, k + N/Δ]` for `k = 1..N`.
pub fn enclosure_bands(p: &ModelParams) -> Vec<Band> {
    let n = p.n() as f64;
    let r = n / p.delta();
    (1..=p.n())
        .map(|k| Band {
            lo: k as f64 - r,
            hi: k as f64 + r,
        })
        .collect()
}

/// Open interval `(lo, hi)`; empty when `lo >= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub lo: f64,
    pub hi: f64,
    pub nonempty: bool,
}

impl Gap {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            nonempty: lo < hi,
        }
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub delta: f64,
    pub n: usize,
    pub droplet_band: Band,
    pub enclosure: Vec<Band>,
    /// `Δ > 2N`: the enclosure intervals are pairwise disjoint.
    pub enclosure_disjoint: bool,
    /// `(max δ_N, 2 − 2/Δ)`; absent for `N = 1`.
    pub droplet_gap: Option<Gap>,
    /// `(1, 2 − 2/Δ)`, which bounds every droplet band from above for `N ≥ 2`.
    pub uniform_gap: Option<Gap>,
    /// `(1 + 1/Δ, 2 − 2/Δ)`: the gap above `δ₁` in the whole chain, of width `1 − 3/Δ`.
    pub chain_gap: Gap,
}

pub fn analytic_gap_report(p: &ModelParams) -> GapReport {
    let delta = p.delta();
    let n = p.n();
    let droplet = droplet_band(p);
    let threshold = 2.0 - 2.0 / delta;
    let enclosure = enclosure_bands(p);
    GapReport {
        delta,
        n,
        droplet_band: droplet,
        enclosure_disjoint: delta > 2.0 * n as f64,
        enclosure,
        droplet_gap: (n >= 2).then(|| Gap::new(droplet.hi, threshold)),
        uniform_gap: (n >= 2).then(|| Gap::new(1.0, threshold)),
        chain_gap: Gap::new(1.0 + 1.0 / delta, threshold),
    }
}

/// One CSV row of a band table; `k = 0` marks the droplet band `δ_N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub lo: f64,
    pub hi: f64,
}

/// Cluster bands `C_k(N)` for all `N ≤ n_max`, `k ≤ N`.
pub fn band_table(p: &ModelParams, n_max: usize) -> Result<Vec<BandRow>> {
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let pn = p.with_n(n)?;
        for k in 1..=n {
            let b = cluster_band(&pn, k)?;
            rows.push(BandRow {
                n,
                k,
                lo: b.lo,
                hi: b.hi,
            });
        }
    }
    Ok(rows)
}

pub fn write_band_csv<W: Write>(rows: &[BandRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
