//! Dense complex matrices, block partitions and elementary block transforms.
//!
//! Everything downstream works on `ComplexDenseMatrix` (row-major, f64
//! complex) partitioned by a `BlockPartition`. Elementary block transforms
//! differ from the identity only in the four blocks at the intersection of
//! one block row/column pair; similarity by such a transform touches only
//! those rows and columns, which is what keeps a sweep cheap.

use crate::error::{Error, Result};

pub type Complex64 = num_complex::Complex<f64>;

/// Integer composition of the matrix dimension into block sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    n: usize,
}

impl BlockPartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::invalid("partition must have at least one block"));
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::invalid("block sizes must be positive"));
        }
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut acc = 0usize;
        for &s in &sizes {
            offsets.push(acc);
            acc += s;
        }
        Ok(BlockPartition { sizes, offsets, n: acc })
    }

    /// Partition with every block of size one.
    pub fn unit(n: usize) -> Self {
        BlockPartition::new(vec![1; n]).expect("n >= 1")
    }

    /// Blocks of size `block_size`, last one possibly smaller.
    pub fn uniform(n: usize, block_size: usize) -> Result<Self> {
        if block_size == 0 || block_size > n {
            return Err(Error::invalid(format!(
                "block size {block_size} invalid for dimension {n}"
            )));
        }
        let mut sizes = vec![block_size; n / block_size];
        if n % block_size != 0 {
            sizes.push(n % block_size);
        }
        BlockPartition::new(sizes)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of blocks.
    pub fn m(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, block: usize) -> usize {
        self.sizes[block]
    }

    pub fn offset(&self, block: usize) -> usize {
        self.offsets[block]
    }

    /// Global index range covered by `block`.
    pub fn range(&self, block: usize) -> std::ops::Range<usize> {
        self.offsets[block]..self.offsets[block] + self.sizes[block]
    }

    /// Global indices of blocks `p` and `q` concatenated in order.
    pub fn strip_indices(&self, p: usize, q: usize) -> Vec<usize> {
        self.range(p).chain(self.range(q)).collect()
    }
}

/// Pivot block pair, `p < q`, zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PivotPair {
    pub p: usize,
    pub q: usize,
}

impl PivotPair {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p >= q {
            return Err(Error::invalid(format!("pivot pair requires p < q, got ({p}, {q})")));
        }
        Ok(PivotPair { p, q })
    }
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexDenseMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexDenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexDenseMatrix {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds from row-major entries; external inputs must be finite.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(ComplexDenseMatrix { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::invalid("matrix rows must all have length equal to the row count"));
            }
            entries.extend_from_slice(row);
        }
        Self::from_entries(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[i * self.dim + j] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexDenseMatrix {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn mul(&self, other: &ComplexDenseMatrix) -> ComplexDenseMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch in mul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row_k = other.row(k);
                let out_row = &mut out.entries[i * n..(i + 1) * n];
                for j in 0..n {
                    out_row[j] += aik * row_k[j];
                }
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> ComplexDenseMatrix {
        ComplexDenseMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn sub(&self, other: &ComplexDenseMatrix) -> ComplexDenseMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch in sub");
        ComplexDenseMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum::<Complex64>()
            })
            .collect()
    }

    /// Submatrix picked out by `indices` (rows and columns alike).
    pub fn submatrix(&self, indices: &[usize]) -> ComplexDenseMatrix {
        let k = indices.len();
        let mut out = Self::zeros(k);
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                out.set(a, b, self.get(i, j));
            }
        }
        out
    }
}

/// Elementary block transform: identity outside the four (p, q) blocks.
#[derive(Debug, Clone)]
pub struct ElementaryBlockTransform<'a> {
    pub pair: PivotPair,
    pub core: ComplexDenseMatrix,
    pub partition: &'a BlockPartition,
}

impl<'a> ElementaryBlockTransform<'a> {
    pub fn new(
        partition: &'a BlockPartition,
        pair: PivotPair,
        core: ComplexDenseMatrix,
    ) -> Result<Self> {
        if pair.q >= partition.m() {
            return Err(Error::invalid(format!(
                "pivot pair ({}, {}) out of range for {} blocks",
                pair.p,
                pair.q,
                partition.m()
            )));
        }
        let expected = partition.size(pair.p) + partition.size(pair.q);
        if core.dim() != expected {
            return Err(Error::invalid(format!(
                "core dimension {} does not match n_p + n_q = {expected}",
                core.dim()
            )));
        }
        Ok(ElementaryBlockTransform { pair, core, partition })
    }
}

/// Embeds the core into the full n-by-n elementary block matrix.
pub fn embed(t: &ElementaryBlockTransform) -> ComplexDenseMatrix {
    let part = t.partition;
    let strip = part.strip_indices(t.pair.p, t.pair.q);
    let mut out = ComplexDenseMatrix::identity(part.n());
    for (a, &i) in strip.iter().enumerate() {
        for (b, &j) in strip.iter().enumerate() {
            out.set(i, j, t.core.get(a, b));
        }
    }
    out
}

/// Similarity transform `T^{-1} A T` where `T = embed(t)`, touching only the
/// pivot rows and columns. `inverse_core` must invert `t.core`.
pub fn apply_elementary_similarity(
    a: &ComplexDenseMatrix,
    t: &ElementaryBlockTransform,
    inverse_core: &ComplexDenseMatrix,
) -> Result<ComplexDenseMatrix> {
    let part = t.partition;
    let n = part.n();
    if a.dim() != n {
        return Err(Error::invalid(format!(
            "matrix dimension {} does not match partition dimension {n}",
            a.dim()
        )));
    }
    if inverse_core.dim() != t.core.dim() {
        return Err(Error::invalid("inverse core dimension mismatch"));
    }
    let strip = part.strip_indices(t.pair.p, t.pair.q);
    let c = strip.len();
    let mut out = a.clone();

    // Rows: out[strip, :] = inverse_core * a[strip, :]
    let mut new_rows = vec![Complex64::new(0.0, 0.0); c * n];
    for (a_loc, row_out) in new_rows.chunks_mut(n).enumerate() {
        for (b_loc, &gi) in strip.iter().enumerate() {
            let w = inverse_core.get(a_loc, b_loc);
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (dst, src) in row_out.iter_mut().zip(a.row(gi)) {
                *dst += w * src;
            }
        }
    }
    for (a_loc, &gi) in strip.iter().enumerate() {
        for j in 0..n {
            out.set(gi, j, new_rows[a_loc * n + j]);
        }
    }

    // Columns: out[:, strip] = out[:, strip] * core
    let mut new_cols = vec![Complex64::new(0.0, 0.0); n * c];
    for i in 0..n {
        for (b_loc, slot) in new_cols[i * c..(i + 1) * c].iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a_loc, &gj) in strip.iter().enumerate() {
                acc += out.get(i, gj) * t.core.get(a_loc, b_loc);
            }
            *slot = acc;
        }
    }
    for i in 0..n {
        for (b_loc, &gj) in strip.iter().enumerate() {
            out.set(i, gj, new_cols[i * c + b_loc]);
        }
    }
    Ok(out)
}

/// Frobenius norm of the off-diagonal part.
pub fn off_norm(a: &ComplexDenseMatrix) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            if i != j {
                acc += a.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Hermitian part `(A + A*)/2`, exactly Hermitian by construction.
pub fn hermitian_part(a: &ComplexDenseMatrix) -> ComplexDenseMatrix {
    let n = a.dim();
    let mut h = ComplexDenseMatrix::zeros(n);
    for i in 0..n {
        h.set(i, i, Complex64::new(a.get(i, i).re, 0.0));
        for j in i + 1..n {
            let hij = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
            h.set(i, j, hij);
            h.set(j, i, hij.conj());
        }
    }
    h
}

/// Skew-Hermitian part `(A - A*)/2`.
pub fn skew_part(a: &ComplexDenseMatrix) -> ComplexDenseMatrix {
    let n = a.dim();
    let mut z = ComplexDenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            z.set(i, j, (a.get(i, j) - a.get(j, i).conj()) * 0.5);
        }
    }
    z
}

/// Commutator `C(A) = A A* - A* A`; zero exactly when A is normal.
pub fn c_operator(a: &ComplexDenseMatrix) -> ComplexDenseMatrix {
    let adj = a.adjoint();
    let c = a.mul(&adj).sub(&adj.mul(a));
    debug_assert!(hermitian_deviation(&c) <= 1e-12 * a.frobenius_norm_sq().max(1.0));
    c
}

/// Largest `|c_ij - conj(c_ji)|` over all entries.
pub fn hermitian_deviation(a: &ComplexDenseMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            worst = worst.max((a.get(i, j) - a.get(j, i).conj()).norm());
        }
    }
    worst
}
