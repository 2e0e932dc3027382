//! Sparse Hermitian matrices with upper-triangle storage.
//!
//! Every off-diagonal pair `{i, j}` is stored once as `(i, j, a_ij)` with
//! `i < j`; the lower triangle is supplied as `conj(a_ij)` during products.
//! Hermiticity is therefore structural, and the diagonal is kept as real
//! numbers.

use std::io::{BufRead, Write};

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::Window;
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Which of the four unitarily related pictures a matrix lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    SpinSector,
    LatticeXn,
    Relative,
    Fiber,
}

/// Enough information to rebuild the basis a matrix is written in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BasisInfo {
    /// Ordered configurations of `n` particles on the chain `[1, length]`.
    SpinChain { n: usize, length: usize },
    /// Ordered configurations of `n` particles inside `window`.
    Window { n: usize, window: Window },
    /// Anchor in `anchors` times gap box `[1, gap_cap]^(n-1)`.
    Relative {
        n: usize,
        anchors: Window,
        gap_cap: u32,
    },
    /// Gap box `[1, gap_cap]^(n-1)` at quasimomentum `theta`.
    Fiber { n: usize, theta: f64, gap_cap: u32 },
    /// Anything else, e.g. a matrix read back from a dump without metadata.
    Generic,
}

/// Scalars the solvers can run in: `f64` for real symmetric matrices and
/// `Complex64` for general Hermitian ones.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync {
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(self) -> Complex64;
}

impl Scalar for f64 {
    fn from_c64(z: Complex64) -> Self {
        z.re
    }
    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn to_c64(self) -> Complex64 {
        self
    }
}

/// `e^{iθ}` with exact values where sine or cosine vanish, so that e.g.
/// `1 + e^{-iπ}` is exactly zero.
pub fn phase(theta: f64) -> Complex64 {
    let (mut s, mut c) = theta.sin_cos();
    if s.abs() < 4.0 * f64::EPSILON {
        s = 0.0;
        c = c.signum();
    } else if c.abs() < 4.0 * f64::EPSILON {
        c = 0.0;
        s = s.signum();
    }
    Complex64::new(c, s)
}

#[derive(Debug, Clone)]
pub struct SparseHermitian {
    dim: usize,
    diag: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<Complex64>,
    real: bool,
    basis: BasisInfo,
    repr: Representation,
}

/// Accumulates entries; duplicates are summed in [`HermitianBuilder::finish`].
#[derive(Debug)]
pub struct HermitianBuilder {
    dim: usize,
    diag: Vec<f64>,
    upper: Vec<(u32, u32, Complex64)>,
}

impl HermitianBuilder {
    pub fn new(dim: usize) -> Self {
        assert!(
            dim <= u32::MAX as usize,
            "dimension {dim} does not fit u32 indices"
        );
        Self {
            dim,
            diag: vec![0.0; dim],
            upper: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, offdiag: usize) -> Self {
        let mut b = Self::new(dim);
        b.upper.reserve(offdiag);
        b
    }

    pub fn add_diag(&mut self, i: usize, v: f64) {
        self.diag[i] += v;
    }

    /// Adds `v` at `(i, j)` and implicitly `conj(v)` at `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Less => self.upper.push((i as u32, j as u32, v)),
            Ordering::Greater => self.upper.push((j as u32, i as u32, v.conj())),
            Ordering::Equal => {
                debug_assert!(v.im == 0.0, "diagonal entries must be real");
                self.diag[i] += v.re;
            }
        }
    }

    pub fn finish(mut self, basis: BasisInfo, repr: Representation) -> SparseHermitian {
        self.upper.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut merged: Vec<(u32, u32, Complex64)> = Vec::with_capacity(self.upper.len());
        for (i, j, v) in self.upper {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        merged.retain(|e| e.2 != Complex64::new(0.0, 0.0));

        let mut row_ptr = vec![0usize; self.dim + 1];
        for &(i, _, _) in &merged {
            row_ptr[i as usize + 1] += 1;
        }
        for i in 0..self.dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let real = merged.iter().all(|e| e.2.im == 0.0);
        let (cols, vals) = merged.into_iter().map(|(_, j, v)| (j, v)).unzip();
        SparseHermitian {
            dim: self.dim,
            diag: self.diag,
            row_ptr,
            cols,
            vals,
            real,
            basis,
            repr,
        }
    }
}

impl SparseHermitian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &BasisInfo {
        &self.basis
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    /// True when every stored entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Number of stored off-diagonal pairs.
    pub fn offdiag_len(&self) -> usize {
        self.vals.len()
    }

    /// Stored entries `(row, col, value)` with `row <= col`, diagonal first per row.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            std::iter::once((i, i, Complex64::new(self.diag[i], 0.0))).chain(
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .map(move |k| (i, self.cols[k] as usize, self.vals[k])),
            )
        })
    }

    /// Matrix element `H[i, j]`.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i == j {
            return Complex64::new(self.diag[i], 0.0);
        }
        let (r, c, flip) = if i < j { (i, j, false) } else { (j, i, true) };
        let row = &self.cols[self.row_ptr[r]..self.row_ptr[r + 1]];
        match row.binary_search(&(c as u32)) {
            Ok(k) => {
                let v = self.vals[self.row_ptr[r] + k];
                if flip {
                    v.conj()
                } else {
                    v
                }
            }
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// `y = H x`.
    pub fn apply<T: Scalar>(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for i in 0..self.dim {
            y[i] = x[i].scale(self.diag[i]);
        }
        for i in 0..self.dim {
            let xi = x[i];
            let mut acc = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k] as usize;
                let v = T::from_c64(self.vals[k]);
                acc += v * x[j];
                y[j] += v.conjugate() * xi;
            }
            y[i] += acc;
        }
    }

    pub fn apply_vec<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim];
        self.apply(x, &mut y);
        y
    }

    /// Gershgorin bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        let mut row_sum: Vec<f64> = self.diag.iter().map(|d| d.abs()).collect();
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let a = self.vals[k].norm();
                row_sum[i] += a;
                row_sum[self.cols[k] as usize] += a;
            }
        }
        row_sum.into_iter().fold(0.0, f64::max)
    }

    /// Per-row Gershgorin lower ends `H_ii − Σ_{j≠i} |H_ij|`.
    pub fn gershgorin_lower(&self) -> Vec<f64> {
        let mut out = self.diag.clone();
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let a = self.vals[k].norm();
                out[i] -= a;
                out[self.cols[k] as usize] -= a;
            }
        }
        out
    }

    pub fn to_dense_complex(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.dim, self.dim, Complex64::new(0.0, 0.0));
        for (i, j, v) in self.entries() {
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
        m
    }

    pub fn to_dense_real(&self) -> Result<DMatrix<f64>> {
        if !self.real {
            return Err(Error::Representation("matrix has complex entries".into()));
        }
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.entries() {
            m[(i, j)] = v.re;
            m[(j, i)] = v.re;
        }
        Ok(m)
    }

    /// The same matrix plus a real diagonal shift at selected indices.
    pub fn with_diagonal_added(&self, shifts: &[(usize, f64)]) -> Self {
        let mut out = self.clone();
        for &(i, v) in shifts {
            out.diag[i] += v;
        }
        out
    }

    /// The purely off-diagonal part (for kinetic-norm checks).
    pub fn offdiagonal_part(&self) -> Self {
        let mut out = self.clone();
        out.diag.iter_mut().for_each(|d| *d = 0.0);
        out
    }

    /// Coordinate-list text dump: a `#` header with dimension, representation,
    /// basis and parameters, then one `row col re im` line per stored entry
    /// (0-based, upper triangle including the diagonal).
    pub fn write_coo<W: Write>(&self, mut out: W, params: &ModelParams) -> Result<()> {
        writeln!(out, "# xxz-spectra coo v1")?;
        writeln!(out, "# dimension: {}", self.dim)?;
        writeln!(
            out,
            "# representation: {}",
            serde_json::to_string(&self.repr)?
        )?;
        writeln!(out, "# basis: {}", serde_json::to_string(&self.basis)?)?;
        writeln!(out, "# params: {}", serde_json::to_string(params)?)?;
        for (i, j, v) in self.entries() {
            writeln!(out, "{} {} {:e} {:e}", i, j, v.re, v.im)?;
        }
        Ok(())
    }

    pub fn read_coo<R: BufRead>(input: R) -> Result<Self> {
        let mut dim = None;
        let mut repr = Representation::LatticeXn;
        let mut basis = BasisInfo::Generic;
        let mut builder: Option<HermitianBuilder> = None;
        for line in input.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                let header = header.trim();
                if let Some(d) = header.strip_prefix("dimension:") {
                    let d: usize = d
                        .trim()
                        .parse()
                        .map_err(|e| Error::Parse(format!("dimension: {e}")))?;
                    dim = Some(d);
                    builder = Some(HermitianBuilder::new(d));
                } else if let Some(r) = header.strip_prefix("representation:") {
                    repr = serde_json::from_str(r.trim())?;
                } else if let Some(b) = header.strip_prefix("basis:") {
                    basis = serde_json::from_str(b.trim())?;
                }
                continue;
            }
            let b = builder
                .as_mut()
                .ok_or_else(|| Error::Parse("entry before dimension header".into()))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::Parse(format!(
                    "expected `row col re im`, got `{line}`"
                )));
            }
            let parse_idx = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("{s}: {e}")))
            };
            let parse_f = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{s}: {e}")))
            };
            let (i, j) = (parse_idx(fields[0])?, parse_idx(fields[1])?);
            if i >= b.dim || j >= b.dim {
                return Err(Error::Parse(format!("index ({i}, {j}) out of range")));
            }
            b.add(
                i,
                j,
                Complex64::new(parse_f(fields[2])?, parse_f(fields[3])?),
            );
        }
        dim.ok_or_else(|| Error::Parse("missing dimension header".into()))?;
        Ok(builder
            .expect("builder exists once dimension is set")
            .finish(basis, repr))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SparseHermitian {
        let mut b = HermitianBuilder::new(3);
        b.add_diag(0, 1.0);
        b.add_diag(2, -2.0);
        b.add(0, 1, Complex64::new(0.5, 0.25));
        b.add(2, 1, Complex64::new(-1.0, 0.5));
        b.add(1, 0, Complex64::new(0.5, -0.25));
        b.finish(BasisInfo::Generic, Representation::Fiber)
    }

    #[test]
    fn duplicates_are_summed_and_hermitian_completion_holds() {
        let h = small();
        assert_eq!(h.get(0, 1), Complex64::new(1.0, 0.5));
        assert_eq!(h.get(1, 0), Complex64::new(1.0, -0.5));
        assert_eq!(h.get(1, 2), Complex64::new(-1.0, -0.5));
        assert_eq!(h.get(0, 2), Complex64::new(0.0, 0.0));
        let d = h.to_dense_complex();
        assert_eq!(d.adjoint(), d);
        assert!(!h.is_real());
    }

    #[test]
    fn matvec_matches_dense() {
        let h = small();
        let x = vec![
            Complex64::new(1.0, -1.0),
            Complex64::new(0.5, 2.0),
            Complex64::new(-3.0, 0.0),
        ];
        let y = h.apply_vec(&x);
        let yd = h.to_dense_complex() * nalgebra::DVector::from_vec(x);
        for (a, b) in y.iter().zip(yd.iter()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn cancelling_entries_are_dropped() {
        let mut b = HermitianBuilder::new(2);
        b.add(0, 1, Complex64::new(1.0, 0.0));
        b.add(
            0,
            1,
            Complex64::new(1.0, 0.0) * phase(-std::f64::consts::PI),
        );
        let h = b.finish(BasisInfo::Generic, Representation::Fiber);
        assert_eq!(h.offdiag_len(), 0);
        assert!(h.is_real());
    }

    #[test]
    fn coo_round_trip() {
        let h = small();
        let p = ModelParams::new(2.0, 2).unwrap();
        let mut buf = Vec::new();
        h.write_coo(&mut buf, &p).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("# dimension: 3"));
        let back = SparseHermitian::read_coo(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back.dim(), 3);
        assert_eq!(back.representation(), Representation::Fiber);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(back.get(i, j), h.get(i, j));
            }
        }
    }

    #[test]
    fn phase_is_exact_on_axes() {
        use std::f64::consts::PI;
        assert_eq!(phase(-PI), Complex64::new(-1.0, 0.0));
        assert_eq!(phase(0.0), Complex64::new(1.0, 0.0));
        assert_eq!(phase(PI / 2.0), Complex64::new(0.0, 1.0));
        assert_eq!(phase(-PI / 2.0), Complex64::new(0.0, -1.0));
    }
}
