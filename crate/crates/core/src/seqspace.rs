//! Finitely supported sequences, matrices whose entries are such sequences,
//! and the witness objects `x^n`, `y^n`, `A_n`, `u_n`.
//!
//! A [`MatrixSeq`] of side `n` is stored in component form `Σ_k X_k ⊗ e_k`
//! with each `X_k` an `n x n` complex matrix; sequence indices start at 1.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix};

/// Finitely supported complex sequence. Indices are 1-based; exact zeros are
/// never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FinSeq {
    coords: BTreeMap<usize, Complex64>,
}

impl FinSeq {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, Complex64)>>(pairs: I) -> Result<Self> {
        let mut out = Self::zero();
        for (k, v) in pairs {
            if k == 0 {
                return Err(Error::Parameter("sequence indices start at 1".into()));
            }
            out.add_at(k, v);
        }
        Ok(out)
    }

    /// Sequence with coordinates `values[0], values[1], ...` at indices `1, 2, ...`.
    pub fn from_dense(values: &[Complex64]) -> Self {
        let mut out = Self::zero();
        for (i, v) in values.iter().enumerate() {
            out.add_at(i + 1, *v);
        }
        out
    }

    pub fn basis(k: usize) -> Self {
        assert!(k >= 1, "sequence indices start at 1");
        let mut coords = BTreeMap::new();
        coords.insert(k, c(1.0, 0.0));
        Self { coords }
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.coords.get(&k).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.coords.iter().map(|(k, v)| (*k, *v))
    }

    pub fn support(&self) -> Vec<usize> {
        self.coords.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    fn add_at(&mut self, k: usize, v: Complex64) {
        let slot = self.coords.entry(k).or_insert(Complex64::ZERO);
        *slot += v;
        if *slot == Complex64::ZERO {
            self.coords.remove(&k);
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        if s == Complex64::ZERO {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (k, v) in self.iter() {
            out.add_at(k, v * s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.add_at(k, v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(c(-1.0, 0.0)))
    }

    /// Coordinatewise map; results that are exactly zero are dropped.
    pub fn map_coords(&self, mut f: impl FnMut(usize, Complex64) -> Complex64) -> Self {
        let mut out = Self::zero();
        for (k, v) in self.iter() {
            out.add_at(k, f(k, v));
        }
        out
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm(self, p)
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Parameter(format!("exponent p = {p} must satisfy p >= 1")));
    }
    Ok(())
}

/// ℓ_p norm of a coordinate slice; `p = f64::INFINITY` gives the max modulus.
pub(crate) fn lp_of_slice<I: IntoIterator<Item = f64>>(moduli: I, p: f64) -> f64 {
    if p.is_infinite() {
        return moduli.into_iter().fold(0.0, f64::max);
    }
    let mods: Vec<f64> = moduli.into_iter().collect();
    let scale = mods.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return mods.iter().sum();
    }
    if p == 2.0 {
        return scale * mods.iter().map(|m| (m / scale).powi(2)).sum::<f64>().sqrt();
    }
    scale * mods.iter().map(|m| (m / scale).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// ℓ_p norm of a finitely supported sequence.
pub fn lp_norm(v: &FinSeq, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_of_slice(v.iter().map(|(_, z)| z.norm()), p))
}

/// Hölder conjugate exponent: `1/p + 1/q = 1`, with `1 <-> ∞`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else if p == 2.0 {
        2.0
    } else {
        p / (p - 1.0)
    }
}

/// Square matrix of side `n` with entries in `c_00`, stored by components.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSeq {
    n: usize,
    components: BTreeMap<usize, ComplexMatrix>,
}

impl MatrixSeq {
    pub fn zero(n: usize) -> Self {
        Self { n, components: BTreeMap::new() }
    }

    pub fn from_components<I: IntoIterator<Item = (usize, ComplexMatrix)>>(
        n: usize,
        components: I,
    ) -> Result<Self> {
        let mut out = Self::zero(n);
        for (k, m) in components {
            if k == 0 {
                return Err(Error::Parameter("sequence indices start at 1".into()));
            }
            if m.shape() != (n, n) {
                return Err(Error::Dimension(format!(
                    "component {k} has shape {:?}, expected {n}x{n}",
                    m.shape()
                )));
            }
            out.add_component(k, &m);
        }
        Ok(out)
    }

    /// Builds a matrix from its entry view: `entries[i][j]` is the sequence at (i, j).
    pub fn from_entries(entries: &[Vec<FinSeq>]) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|row| row.len() != n) {
            return Err(Error::Dimension("entry view must be square".into()));
        }
        let mut comps: BTreeMap<usize, ComplexMatrix> = BTreeMap::new();
        for (i, row) in entries.iter().enumerate() {
            for (j, seq) in row.iter().enumerate() {
                for (k, v) in seq.iter() {
                    comps.entry(k).or_insert_with(|| ComplexMatrix::zeros(n, n))[(i, j)] += v;
                }
            }
        }
        Self::from_components(n, comps)
    }

    /// The single-entry element with sequence `v` at position (i, j) (zero-based).
    pub fn single_entry(n: usize, i: usize, j: usize, v: &FinSeq) -> Self {
        let mut out = Self::zero(n);
        for (k, z) in v.iter() {
            let mut m = ComplexMatrix::zeros(n, n);
            m[(i, j)] = z;
            out.add_component(k, &m);
        }
        out
    }

    fn add_component(&mut self, k: usize, m: &ComplexMatrix) {
        let slot = self
            .components
            .entry(k)
            .or_insert_with(|| ComplexMatrix::zeros(self.n, self.n));
        *slot += m;
        if linalg::is_zero(slot) {
            self.components.remove(&k);
        }
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, &ComplexMatrix)> {
        self.components.iter().map(|(k, m)| (*k, m))
    }

    pub fn component(&self, k: usize) -> Option<&ComplexMatrix> {
        self.components.get(&k)
    }

    pub fn support(&self) -> Vec<usize> {
        self.components.keys().copied().collect()
    }

    pub fn support_dim(&self) -> usize {
        self.components.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> FinSeq {
        let mut out = FinSeq::zero();
        for (k, m) in self.components() {
            out.add_at(k, m[(i, j)]);
        }
        out
    }

    pub fn entries(&self) -> Vec<Vec<FinSeq>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.entry(i, j)).collect()).collect()
    }

    /// Matrix of ℓ_p norms of the entries.
    pub fn entry_norms(&self, p: f64) -> Result<Vec<Vec<f64>>> {
        check_exponent(p)?;
        let mut out = vec![vec![0.0; self.n]; self.n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = lp_of_slice(self.components.values().map(|m| m[(i, j)].norm()), p);
            }
        }
        Ok(out)
    }

    pub fn max_entry_norm(&self, p: f64) -> Result<f64> {
        Ok(self.entry_norms(p)?.into_iter().flatten().fold(0.0, f64::max))
    }

    pub fn sum_entry_norms(&self, p: f64) -> Result<f64> {
        Ok(self.entry_norms(p)?.into_iter().flatten().sum())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.n);
        for (k, m) in self.components() {
            out.add_component(k, &(m * s));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("sides {} and {}", self.n, other.n)));
        }
        let mut out = self.clone();
        for (k, m) in other.components() {
            out.add_component(k, m);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(c(-1.0, 0.0)))
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (k, m) in self.components() {
            out.add_component(k, &m.transpose());
        }
        out
    }

    /// Entrywise complex conjugation of every coordinate.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (k, m) in self.components() {
            out.add_component(k, &linalg::conj(m));
        }
        out
    }

    /// Block-diagonal `v ⊕ w`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.n + other.n;
        let mut out = Self::zero(n);
        let blank_a = ComplexMatrix::zeros(self.n, self.n);
        let blank_b = ComplexMatrix::zeros(other.n, other.n);
        let keys: std::collections::BTreeSet<usize> =
            self.components.keys().chain(other.components.keys()).copied().collect();
        for k in keys {
            let a = self.components.get(&k).unwrap_or(&blank_a);
            let b = other.components.get(&k).unwrap_or(&blank_b);
            out.add_component(k, &linalg::direct_sum(a, b));
        }
        out
    }

    /// Scalar compression `α v β` with `α` of shape m x n and `β` of shape n x m.
    pub fn compress(&self, alpha: &ComplexMatrix, beta: &ComplexMatrix) -> Result<Self> {
        let m = alpha.nrows();
        if alpha.ncols() != self.n || beta.nrows() != self.n || beta.ncols() != m {
            return Err(Error::Dimension(format!(
                "compression shapes {:?} and {:?} do not fit side {}",
                alpha.shape(),
                beta.shape(),
                self.n
            )));
        }
        let mut out = Self::zero(m);
        for (k, x) in self.components() {
            out.add_component(k, &(alpha * x * beta));
        }
        Ok(out)
    }

    /// Matrix product where entries multiply coordinatewise as sequences,
    /// so `(xy)_ij = Σ_l x_il · y_lj` and component `k` of the product is `X_k Y_k`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("sides {} and {}", self.n, other.n)));
        }
        let mut out = Self::zero(self.n);
        for (k, x) in self.components() {
            if let Some(y) = other.components.get(&k) {
                out.add_component(k, &(x * y));
            }
        }
        Ok(out)
    }

    /// Applies a map to every entry independently.
    pub fn map_entries(&self, mut f: impl FnMut(&FinSeq) -> FinSeq) -> Result<Self> {
        let entries: Vec<Vec<FinSeq>> = self
            .entries()
            .iter()
            .map(|row| row.iter().map(&mut f).collect())
            .collect();
        Self::from_entries(&entries)
    }

    /// Relabels sequence index `k` as `perm(k)`.
    pub fn permute_indices(&self, perm: impl Fn(usize) -> usize) -> Result<Self> {
        let comps: Vec<(usize, ComplexMatrix)> =
            self.components().map(|(k, m)| (perm(k), m.clone())).collect();
        let targets: std::collections::BTreeSet<usize> = comps.iter().map(|(k, _)| *k).collect();
        if targets.len() != comps.len() {
            return Err(Error::Parameter("index map is not injective on the support".into()));
        }
        Self::from_components(self.n, comps)
    }

    /// Returns `s` with `self = s · other`, when such a scalar exists (up to `tol`).
    pub fn proportional_to(&self, other: &Self, tol: f64) -> Option<Complex64> {
        if self.n != other.n {
            return None;
        }
        if self.is_zero() {
            return Some(Complex64::ZERO);
        }
        if other.is_zero() {
            return None;
        }
        // Largest coordinate of `other` fixes the ratio.
        let mut best = (0usize, 0usize, 0usize, 0.0);
        for (k, m) in other.components() {
            for i in 0..self.n {
                for j in 0..self.n {
                    if m[(i, j)].norm() > best.3 {
                        best = (k, i, j, m[(i, j)].norm());
                    }
                }
            }
        }
        let (k, i, j, _) = best;
        let num = self.components.get(&k).map_or(Complex64::ZERO, |m| m[(i, j)]);
        let s = num / other.components[&k][(i, j)];
        let diff = self.sub(&other.scale(s)).ok()?;
        let scale = self.frobenius().max(other.frobenius() * s.norm());
        (diff.frobenius() <= tol * scale.max(1.0)).then_some(s)
    }

    pub fn frobenius(&self) -> f64 {
        self.components.values().map(|m| m.norm_squared()).sum::<f64>().sqrt()
    }
}

/// Witness kinds exposed through the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    Xn,
    XnTranspose,
    Yn,
    An,
    Un,
}

impl std::str::FromStr for WitnessKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xn" => Ok(Self::Xn),
            "xnt" | "xn_transpose" | "xn-transpose" => Ok(Self::XnTranspose),
            "yn" => Ok(Self::Yn),
            "an" => Ok(Self::An),
            "un" => Ok(Self::Un),
            other => Err(Error::Usage(format!("unknown witness kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Seq(MatrixSeq),
    Matrix(ComplexMatrix),
    Vector(FinSeq),
}

pub const MAX_AN_ORDER: usize = 20;

pub fn witness(kind: WitnessKind, n: usize) -> Result<Witness> {
    if n == 0 {
        return Err(Error::Parameter("witness order must be at least 1".into()));
    }
    Ok(match kind {
        WitnessKind::Xn => Witness::Seq(x_n(n)),
        WitnessKind::XnTranspose => Witness::Seq(x_n(n).transpose()),
        WitnessKind::Yn => Witness::Seq(y_n(n)),
        WitnessKind::An => Witness::Matrix(a_n(n)?),
        WitnessKind::Un => Witness::Vector(u_n(n)),
    })
}

/// `x^n`: first row `(e_1, ..., e_n)`, zero elsewhere.
pub fn x_n(n: usize) -> MatrixSeq {
    let mut out = MatrixSeq::zero(n);
    for k in 1..=n {
        out.add_component(k, &linalg::elementary(n, n, 0, k - 1));
    }
    out
}

/// `y^n`: entry (i, j) is `e_{(i-1)n + j}` (row-major, 1-based).
pub fn y_n(n: usize) -> MatrixSeq {
    let mut out = MatrixSeq::zero(n);
    for i in 0..n {
        for j in 0..n {
            out.add_component(i * n + j + 1, &linalg::elementary(n, n, i, j));
        }
    }
    out
}

/// `u_n = e_1 + ... + e_n`.
pub fn u_n(n: usize) -> FinSeq {
    FinSeq::from_dense(&vec![c(1.0, 0.0); n])
}

/// The `2^{n-1} x n` sign matrix: `A_1 = (1)`, and `A_{n+1}` puts a column of
/// ones beside `A_n` stacked over `-A_n`.
pub fn a_n(n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::Parameter("A_n needs n >= 1".into()));
    }
    if n > MAX_AN_ORDER {
        return Err(Error::Size(format!("A_{n} has 2^{} rows (cap n <= {MAX_AN_ORDER})", n - 1)));
    }
    let mut a = ComplexMatrix::from_element(1, 1, c(1.0, 0.0));
    for _ in 1..n {
        let r = a.nrows();
        let k = a.ncols();
        let mut next = ComplexMatrix::zeros(2 * r, k + 1);
        for i in 0..2 * r {
            next[(i, 0)] = c(1.0, 0.0);
        }
        next.view_mut((0, 1), (r, k)).copy_from(&a);
        next.view_mut((r, 1), (r, k)).copy_from(&(-&a));
        a = next;
    }
    Ok(a)
}

// ---- JSON ----

#[derive(Debug, Serialize, Deserialize)]
struct ComponentJson {
    k: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixSeqJson {
    n: usize,
    components: Vec<ComponentJson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CoordJson {
    k: usize,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct FinSeqJson {
    coords: Vec<CoordJson>,
}

fn split_parts(m: &ComplexMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    // Adding 0.0 turns -0.0 into 0.0.
    let re = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re + 0.0).collect()).collect();
    let im = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].im + 0.0).collect()).collect();
    (re, im)
}

fn join_parts(rows: usize, cols: usize, re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<ComplexMatrix> {
    let ok = re.len() == rows
        && im.len() == rows
        && re.iter().chain(im.iter()).all(|r| r.len() == cols);
    if !ok {
        return Err(Error::Format(format!("expected {rows}x{cols} real and imaginary parts")));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| c(re[i][j], im[i][j])))
}

impl MatrixSeq {
    pub fn to_json(&self) -> String {
        let doc = MatrixSeqJson {
            n: self.n,
            components: self
                .components()
                .map(|(k, m)| {
                    let (re, im) = split_parts(m);
                    ComponentJson { k, re, im }
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MatrixSeqJson = serde_json::from_str(text)?;
        if doc.n == 0 {
            return Err(Error::Format("matrix side n must be positive".into()));
        }
        let mut comps = Vec::with_capacity(doc.components.len());
        for comp in doc.components {
            comps.push((comp.k, join_parts(doc.n, doc.n, &comp.re, &comp.im)?));
        }
        Self::from_components(doc.n, comps).map_err(|e| Error::Format(e.to_string()))
    }
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    let (re, im) = split_parts(m);
    serde_json::to_string(&MatrixJson { rows: m.nrows(), cols: m.ncols(), re, im })
        .expect("plain data serializes")
}

pub fn finseq_to_json(v: &FinSeq) -> String {
    let coords = v.iter().map(|(k, z)| CoordJson { k, re: z.re, im: z.im }).collect();
    serde_json::to_string(&FinSeqJson { coords }).expect("plain data serializes")
}

pub fn finseq_from_json(text: &str) -> Result<FinSeq> {
    let doc: FinSeqJson = serde_json::from_str(text)?;
    FinSeq::from_pairs(doc.coords.into_iter().map(|cj| (cj.k, c(cj.re, cj.im))))
        .map_err(|e| Error::Format(e.to_string()))
}

impl Witness {
    pub fn to_json(&self) -> String {
        match self {
            Witness::Seq(m) => m.to_json(),
            Witness::Matrix(m) => matrix_to_json(m),
            Witness::Vector(v) => finseq_to_json(v),
        }
    }
}
