//! Configuration spaces and index maps.
//!
//! Three finite bases are used for matrix assembly:
//!
//! - [`BasisIndex`]: strictly ordered particle positions `x₁ < … < x_N` inside a
//!   window, in lexicographic order. This is the working basis of the lattice
//!   and spin-sector builders.
//! - [`GapBox`]: gap tuples `(n₁, …, n_m)` with `1 ≤ n_i ≤ cap`, indexed in
//!   mixed radix (lexicographic). Used by the relative-coordinate and fiber
//!   builders.
//! - [`TensorBasis`]: the full product `window^N`, only materialized for small
//!   symmetrizer checks.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param_err, Error, Result};

/// Inclusive integer interval `[lo, hi]` of lattice sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(param_err(
                "window",
                format!("upper end {hi} is below lower end {lo}"),
            ));
        }
        Ok(Self { lo, hi })
    }

    /// The window `[1, len]`.
    pub fn of_len(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(param_err("window", "length must be positive"));
        }
        Ok(Self {
            lo: 1,
            hi: len as i64,
        })
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn contains(&self, site: i64) -> bool {
        self.lo <= site && site <= self.hi
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// Strictly increasing particle positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderedConfig(Vec<i64>);

impl OrderedConfig {
    pub fn new(sites: Vec<i64>) -> Result<Self> {
        if sites.is_empty() {
            return Err(param_err("config", "at least one particle is required"));
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(param_err(
                "config",
                format!("{sites:?} is not strictly increasing"),
            ));
        }
        Ok(Self(sites))
    }

    pub fn sites(&self) -> &[i64] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Number of `j` with `x_{j+1} = x_j + 1`.
    pub fn adjacent_pairs(&self) -> usize {
        self.0.windows(2).filter(|w| w[1] == w[0] + 1).count()
    }

    pub fn to_relative(&self) -> RelativeConfig {
        to_relative(self)
    }
}

/// First-particle position plus the gaps between consecutive particles.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelativeConfig {
    pub anchor: i64,
    pub gaps: Vec<u32>,
}

impl RelativeConfig {
    pub fn new(anchor: i64, gaps: Vec<u32>) -> Result<Self> {
        if gaps.contains(&0) {
            return Err(param_err("gaps", "all gaps must be at least 1"));
        }
        Ok(Self { anchor, gaps })
    }

    pub fn to_ordered(&self) -> OrderedConfig {
        from_relative(self)
    }
}

/// `(x₁, …, x_N) ↦ (x₁; x₂ − x₁, …, x_N − x_{N−1})`.
pub fn to_relative(c: &OrderedConfig) -> RelativeConfig {
    RelativeConfig {
        anchor: c.0[0],
        gaps: c.0.windows(2).map(|w| (w[1] - w[0]) as u32).collect(),
    }
}

pub fn from_relative(r: &RelativeConfig) -> OrderedConfig {
    let mut sites = Vec::with_capacity(r.gaps.len() + 1);
    let mut x = r.anchor;
    sites.push(x);
    for &g in &r.gaps {
        x += i64::from(g);
        sites.push(x);
    }
    OrderedConfig(sites)
}

/// Lexicographically ordered `N`-particle configurations inside a window,
/// with a reverse lookup.
#[derive(Debug, Clone)]
pub struct BasisIndex {
    window: Window,
    n: usize,
    configs: Vec<OrderedConfig>,
    lookup: HashMap<OrderedConfig, usize>,
}

impl BasisIndex {
    pub fn window(&self) -> Window {
        self.window
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn configs(&self) -> &[OrderedConfig] {
        &self.configs
    }

    pub fn config(&self, index: usize) -> &OrderedConfig {
        &self.configs[index]
    }

    pub fn index_of(&self, config: &OrderedConfig) -> Option<usize> {
        self.lookup.get(config).copied()
    }

    /// Index of a raw site tuple, if it is an ordered configuration in the window.
    pub fn index_of_sites(&self, sites: &[i64]) -> Option<usize> {
        // The map is keyed by OrderedConfig; build the key without validation
        // since a non-ordered tuple simply misses.
        self.lookup.get(&OrderedConfig(sites.to_vec())).copied()
    }
}

/// All ordered `N`-tuples inside `window`, lexicographically.
pub fn enumerate_window_basis(n: usize, window: Window) -> Result<BasisIndex> {
    if n == 0 {
        return Err(param_err("n", "particle number must be at least 1"));
    }
    let len = window.len();
    if len < n {
        return Err(Error::EmptyBasis { n, window_len: len });
    }
    let mut configs = Vec::with_capacity(binomial(len, n));
    let mut current: Vec<i64> = (0..n as i64).map(|i| window.lo + i).collect();
    loop {
        configs.push(OrderedConfig(current.clone()));
        // advance to the next combination in lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                let lookup = configs
                    .iter()
                    .cloned()
                    .enumerate()
                    .map(|(k, c)| (c, k))
                    .collect();
                return Ok(BasisIndex {
                    window,
                    n,
                    configs,
                    lookup,
                });
            }
            i -= 1;
            let max_here = window.hi - (n - 1 - i) as i64;
            if current[i] < max_here {
                current[i] += 1;
                for j in i + 1..n {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Gap tuples `(n₁, …, n_m)` with `1 ≤ n_i ≤ cap`, in lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapBox {
    m: usize,
    cap: u32,
}

impl GapBox {
    pub fn new(m: usize, cap: u32) -> Result<Self> {
        if cap == 0 {
            return Err(param_err("gap_cap", "gap cap must be at least 1"));
        }
        let len = (cap as u128).checked_pow(m as u32);
        if len.is_none_or(|l| l > u32::MAX as u128) {
            return Err(param_err(
                "gap_cap",
                format!("gap box {cap}^{m} is too large"),
            ));
        }
        Ok(Self { m, cap })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn len(&self) -> usize {
        (self.cap as usize).pow(self.m as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, gaps: &[u32]) -> bool {
        gaps.len() == self.m && gaps.iter().all(|&g| g >= 1 && g <= self.cap)
    }

    pub fn index(&self, gaps: &[u32]) -> usize {
        debug_assert!(self.contains(gaps));
        gaps.iter()
            .fold(0usize, |acc, &g| acc * self.cap as usize + (g - 1) as usize)
    }

    pub fn gaps(&self, mut index: usize, out: &mut [u32]) {
        let cap = self.cap as usize;
        for slot in out.iter_mut().rev() {
            *slot = (index % cap) as u32 + 1;
            index /= cap;
        }
    }

    /// Index of the all-gaps-one (droplet) configuration.
    pub fn droplet_index(&self) -> usize {
        0
    }
}

/// The full product basis `window^N`, lexicographic in `(x₁, …, x_N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TensorBasis {
    window: Window,
    n: usize,
}

impl TensorBasis {
    pub const MAX_N: usize = 4;
    pub const MAX_WINDOW: usize = 12;

    pub fn new(n: usize, window: Window) -> Result<Self> {
        if n == 0 || n > Self::MAX_N || window.len() > Self::MAX_WINDOW {
            return Err(param_err(
                "tensor basis",
                format!(
                    "only materialized for 1 <= N <= {} and window <= {}",
                    Self::MAX_N,
                    Self::MAX_WINDOW
                ),
            ));
        }
        Ok(Self { window, n })
    }

    pub fn len(&self) -> usize {
        self.window.len().pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn index(&self, sites: &[i64]) -> usize {
        let w = self.window.len();
        sites
            .iter()
            .fold(0, |acc, &x| acc * w + (x - self.window.lo) as usize)
    }

    pub fn sites(&self, mut index: usize) -> Vec<i64> {
        let w = self.window.len();
        let mut out = vec![0; self.n];
        for slot in out.iter_mut().rev() {
            *slot = self.window.lo + (index % w) as i64;
            index /= w;
        }
        out
    }

    pub fn unit(&self, sites: &[i64]) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.len()];
        v[self.index(sites)] = Complex64::new(1.0, 0.0);
        v
    }
}

/// All permutations of `0..n` with their signs (Heap's algorithm).
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = vec![(perm.clone(), 1.0)];
    let mut c = vec![0usize; n];
    let mut sign = 1.0;
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = -sign;
            out.push((perm.clone(), sign));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Antisymmetrizer `P_a = (1/N!) Σ_σ sgn(σ) U_σ` on the product basis, where
/// `(U_σ v)(x₁, …, x_N) = v(x_σ(1), …, x_σ(N))`.
pub fn project_antisymmetric(basis: &TensorBasis, v: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(
        v.len(),
        basis.len(),
        "vector length does not match tensor basis"
    );
    let perms = signed_permutations(basis.n());
    let norm = 1.0 / perms.len() as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    let mut permuted = vec![0i64; basis.n()];
    for (idx, slot) in out.iter_mut().enumerate() {
        let sites = basis.sites(idx);
        let mut acc = Complex64::new(0.0, 0.0);
        for (perm, sign) in &perms {
            for (k, &p) in perm.iter().enumerate() {
                permuted[k] = sites[p];
            }
            acc += v[basis.index(&permuted)] * *sign;
        }
        *slot = acc * norm;
    }
    out
}
