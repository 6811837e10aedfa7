//! Compressed-row complex sparse matrices and the structural kernels built on
//! them.
//!
//! [`SparseComplexMatrix`] is the single storage format used throughout the
//! crate. Column-oriented access (needed by the LU code) goes through an
//! explicit [`SparseComplexMatrix::transpose`]. Entries whose value is exactly
//! zero are never stored, which makes stored-entry counts (and therefore fill
//! factors) well defined.

pub mod mtx;
mod perm;

pub use perm::Permutation;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Sparse matrix in compressed-row layout with sorted, unique column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseComplexMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseComplexMatrix {
    /// Builds a matrix from raw compressed-row arrays after validating every
    /// structural invariant. Explicit zeros are removed.
    pub fn try_from_csr(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if row_ptr.len() != nrows + 1 {
            return Err(Error::InvalidStructure(format!(
                "row_ptr has length {}, expected {}",
                row_ptr.len(),
                nrows + 1
            )));
        }
        if row_ptr[0] != 0 {
            return Err(Error::InvalidStructure("row_ptr[0] must be 0".into()));
        }
        if col_idx.len() != values.len() || row_ptr[nrows] != col_idx.len() {
            return Err(Error::InvalidStructure(
                "row_ptr[nrows], col_idx and values disagree on the entry count".into(),
            ));
        }
        for i in 0..nrows {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::InvalidStructure(format!("row_ptr decreases at row {i}")));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            for w in cols.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidStructure(format!(
                        "column indices of row {i} are not strictly increasing"
                    )));
                }
            }
            if let Some(&last) = cols.last() {
                if last >= ncols {
                    return Err(Error::InvalidStructure(format!("column index {last} out of range in row {i}")));
                }
            }
        }
        let mut m = SparseComplexMatrix { nrows, ncols, row_ptr, col_idx, values };
        m.prune();
        Ok(m)
    }

    /// Internal constructor for arrays already known to be canonical.
    pub(crate) fn from_parts_unchecked(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<Complex64>,
    ) -> Self {
        debug_assert_eq!(row_ptr.len(), nrows + 1);
        debug_assert_eq!(col_idx.len(), values.len());
        SparseComplexMatrix { nrows, ncols, row_ptr, col_idx, values }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed
    /// and exact zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, Complex64)]) -> Result<Self> {
        let mut counts = vec![0usize; nrows + 1];
        for &(i, j, _) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::InvalidArgument(format!("triplet ({i}, {j}) outside a {nrows}x{ncols} matrix")));
            }
            counts[i + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut entries = vec![(0usize, ZERO); triplets.len()];
        for &(i, j, v) in triplets {
            entries[next[i]] = (j, v);
            next[i] += 1;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        for i in 0..nrows {
            let row = &mut entries[counts[i]..counts[i + 1]];
            row.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let col = row[k].0;
                let mut sum = ZERO;
                while k < row.len() && row[k].0 == col {
                    sum += row[k].1;
                    k += 1;
                }
                if sum != ZERO {
                    col_idx.push(col);
                    values.push(sum);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self::from_parts_unchecked(nrows, ncols, row_ptr, col_idx, values))
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_parts_unchecked(nrows, ncols, vec![0; nrows + 1], Vec::new(), Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![ONE; n])
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        row_ptr.push(0);
        for (i, &d) in diag.iter().enumerate() {
            if d != ZERO {
                col_idx.push(i);
                values.push(d);
            }
            row_ptr.push(col_idx.len());
        }
        Self::from_parts_unchecked(n, n, row_ptr, col_idx, values)
    }

    pub fn from_dense(dense: &DMatrix<Complex64>) -> Self {
        let (nrows, ncols) = dense.shape();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..nrows {
            for j in 0..ncols {
                let v = dense[(i, j)];
                if v != ZERO {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self::from_parts_unchecked(nrows, ncols, row_ptr, col_idx, values)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut d = DMatrix::from_element(self.nrows, self.ncols, ZERO);
        for (i, j, v) in self.iter() {
            d[(i, j)] = v;
        }
        d
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Column indices and values stored in row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[Complex64]) {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[s..e], &self.values[s..e])
    }

    /// Iterates over `(row, col, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => ZERO,
        }
    }

    /// Main diagonal, with unstored positions reported as zero.
    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// Number of diagonal positions that have no stored entry.
    pub fn structural_zero_diagonal_count(&self) -> usize {
        (0..self.nrows.min(self.ncols)).filter(|&i| self.row(i).0.binary_search(&i).is_err()).count()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Removes stored entries whose value is exactly zero.
    pub fn prune(&mut self) {
        if self.values.iter().all(|v| *v != ZERO) {
            return;
        }
        let mut w = 0;
        let mut start = 0;
        for i in 0..self.nrows {
            let end = self.row_ptr[i + 1];
            for k in start..end {
                if self.values[k] != ZERO {
                    self.col_idx[w] = self.col_idx[k];
                    self.values[w] = self.values[k];
                    w += 1;
                }
            }
            start = end;
            self.row_ptr[i + 1] = w;
        }
        self.col_idx.truncate(w);
        self.values.truncate(w);
    }

    /// Structural transpose.
    pub fn transpose(&self) -> Self {
        self.transpose_map(|v| v)
    }

    /// Elementwise complex conjugate.
    pub fn conjugate(&self) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v = v.conj();
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose_map(|v| v.conj())
    }

    fn transpose_map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let mut row_ptr = vec![0usize; self.ncols + 1];
        for &j in &self.col_idx {
            row_ptr[j + 1] += 1;
        }
        for j in 0..self.ncols {
            row_ptr[j + 1] += row_ptr[j];
        }
        let mut next = row_ptr.clone();
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![ZERO; self.nnz()];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let dst = next[j];
                col_idx[dst] = i;
                values[dst] = f(v);
                next[j] += 1;
            }
        }
        Self::from_parts_unchecked(self.ncols, self.nrows, row_ptr, col_idx, values)
    }

    /// Returns `alpha * self`. Scaling by zero yields an empty matrix.
    pub fn scale(&self, alpha: Complex64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= alpha;
        }
        out.prune();
        out
    }

    /// Returns `alpha * a + beta * b` with merged sparsity.
    pub fn add(a: &Self, b: &Self, alpha: Complex64, beta: Complex64) -> Result<Self> {
        if a.shape() != b.shape() {
            return Err(Error::ShapeMismatch { expected: a.shape(), found: b.shape() });
        }
        let mut row_ptr = Vec::with_capacity(a.nrows + 1);
        let mut col_idx = Vec::with_capacity(a.nnz() + b.nnz());
        let mut values = Vec::with_capacity(a.nnz() + b.nnz());
        row_ptr.push(0);
        let push = |col_idx: &mut Vec<usize>, values: &mut Vec<Complex64>, j: usize, v: Complex64| {
            if v != ZERO {
                col_idx.push(j);
                values.push(v);
            }
        };
        for i in 0..a.nrows {
            let (ac, av) = a.row(i);
            let (bc, bv) = b.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ac.len() || q < bc.len() {
                if q == bc.len() || (p < ac.len() && ac[p] < bc[q]) {
                    push(&mut col_idx, &mut values, ac[p], alpha * av[p]);
                    p += 1;
                } else if p == ac.len() || bc[q] < ac[p] {
                    push(&mut col_idx, &mut values, bc[q], beta * bv[q]);
                    q += 1;
                } else {
                    push(&mut col_idx, &mut values, ac[p], alpha * av[p] + beta * bv[q]);
                    p += 1;
                    q += 1;
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self::from_parts_unchecked(a.nrows, a.ncols, row_ptr, col_idx, values))
    }

    /// Sparse-sparse product `a * b` (row-wise Gustavson).
    pub fn matmul(a: &Self, b: &Self) -> Result<Self> {
        if a.ncols != b.nrows {
            return Err(Error::ShapeMismatch { expected: (a.ncols, b.ncols), found: (b.nrows, b.ncols) });
        }
        let mut acc = vec![ZERO; b.ncols];
        let mut mark = vec![usize::MAX; b.ncols];
        let mut pattern: Vec<usize> = Vec::new();
        let mut row_ptr = Vec::with_capacity(a.nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..a.nrows {
            pattern.clear();
            let (ac, av) = a.row(i);
            for (&k, &akv) in ac.iter().zip(av) {
                let (bc, bv) = b.row(k);
                for (&j, &bkv) in bc.iter().zip(bv) {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = ZERO;
                        pattern.push(j);
                    }
                    acc[j] += akv * bkv;
                }
            }
            pattern.sort_unstable();
            for &j in &pattern {
                if acc[j] != ZERO {
                    col_idx.push(j);
                    values.push(acc[j]);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self::from_parts_unchecked(a.nrows, b.ncols, row_ptr, col_idx, values))
    }

    /// Kronecker product. Row `i*b.nrows + k`, column `j*b.ncols + l` holds
    /// `a[i,j] * b[k,l]`.
    pub fn kron(a: &Self, b: &Self) -> Result<Self> {
        let overflow =
            || Error::DimensionOverflow(format!("kron of {}x{} and {}x{}", a.nrows, a.ncols, b.nrows, b.ncols));
        let nrows = a.nrows.checked_mul(b.nrows).ok_or_else(overflow)?;
        let ncols = a.ncols.checked_mul(b.ncols).ok_or_else(overflow)?;
        let nnz = a.nnz().checked_mul(b.nnz()).ok_or_else(overflow)?;
        nrows.checked_add(1).ok_or_else(overflow)?;
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for i in 0..a.nrows {
            let (ac, av) = a.row(i);
            for k in 0..b.nrows {
                let (bc, bv) = b.row(k);
                for (&j, &x) in ac.iter().zip(av) {
                    let base = j * b.ncols;
                    for (&l, &y) in bc.iter().zip(bv) {
                        let v = x * y;
                        if v != ZERO {
                            col_idx.push(base + l);
                            values.push(v);
                        }
                    }
                }
                row_ptr.push(col_idx.len());
            }
        }
        Ok(Self::from_parts_unchecked(nrows, ncols, row_ptr, col_idx, values))
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.ncols {
            return Err(Error::LengthMismatch { expected: self.ncols, found: x.len() });
        }
        let mut y = vec![ZERO; self.nrows];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x` into a caller-provided buffer. Lengths must already agree.
    #[inline]
    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut acc = ZERO;
            for k in s..e {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi = acc;
        }
    }

    /// Returns `B` with `B[rows.forward[i], cols.forward[j]] = A[i, j]`.
    pub fn permute(&self, rows: &Permutation, cols: &Permutation) -> Result<Self> {
        if rows.len() != self.nrows {
            return Err(Error::LengthMismatch { expected: self.nrows, found: rows.len() });
        }
        if cols.len() != self.ncols {
            return Err(Error::LengthMismatch { expected: self.ncols, found: cols.len() });
        }
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        let mut scratch: Vec<(usize, Complex64)> = Vec::new();
        row_ptr.push(0);
        let cf = cols.forward();
        for new_i in 0..self.nrows {
            let old_i = rows.inverse()[new_i];
            let (c, v) = self.row(old_i);
            scratch.clear();
            scratch.extend(c.iter().zip(v).map(|(&j, &x)| (cf[j], x)));
            scratch.sort_unstable_by_key(|e| e.0);
            for &(j, x) in &scratch {
                col_idx.push(j);
                values.push(x);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self::from_parts_unchecked(self.nrows, self.ncols, row_ptr, col_idx, values))
    }

    /// Largest elementwise deviation `|A - A^†|`.
    pub fn hermitian_deviation(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NonSquare { nrows: self.nrows, ncols: self.ncols });
        }
        let diff = Self::add(self, &self.adjoint(), ONE, -ONE)?;
        Ok(diff.max_abs())
    }
}

/// Column-stacking vectorization: entry `(row, col)` lands at `col*dim + row`.
pub fn vec(rho: &SparseComplexMatrix) -> Result<Vec<Complex64>> {
    if !rho.is_square() {
        return Err(Error::NonSquare { nrows: rho.nrows(), ncols: rho.ncols() });
    }
    let d = rho.nrows();
    let mut out = vec![ZERO; d * d];
    for (i, j, v) in rho.iter() {
        out[j * d + i] = v;
    }
    Ok(out)
}

/// Column-stacking vectorization of a dense matrix.
pub fn vec_dense(rho: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let (r, c) = rho.shape();
    if r != c {
        return Err(Error::NonSquare { nrows: r, ncols: c });
    }
    // nalgebra storage is column-major, which is exactly column stacking.
    Ok(rho.as_slice().to_vec())
}

/// Inverse of [`vec`]: rebuilds the `dim x dim` dense matrix.
pub fn unvec(v: &[Complex64], dim: usize) -> Result<DMatrix<Complex64>> {
    if dim.checked_mul(dim) != Some(v.len()) {
        return Err(Error::LengthMismatch { expected: dim.saturating_mul(dim), found: v.len() });
    }
    Ok(DMatrix::from_column_slice(dim, dim, v))
}

/// Integer square root for vectors whose length must be a perfect square.
pub fn square_side(len: usize) -> Result<usize> {
    let mut d = (len as f64).sqrt().round() as usize;
    while d * d > len {
        d -= 1;
    }
    while (d + 1) * (d + 1) <= len {
        d += 1;
    }
    if d * d == len {
        Ok(d)
    } else {
        Err(Error::invalid(format!("vector length {len} is not a perfect square")))
    }
}

pub(crate) fn norm2(x: &[Complex64]) -> f64 {
    // Scaled accumulation keeps tiny/huge inverse-iteration vectors finite.
    let scale = x.iter().map(|v| v.re.abs().max(v.im.abs())).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return if scale.is_finite() { 0.0 } else { f64::INFINITY };
    }
    let inv = 1.0 / scale;
    let sum: f64 = x.iter().map(|v| (v * inv).norm_sqr()).sum();
    scale * sum.sqrt()
}

pub(crate) fn norm_inf(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Conjugated inner product `x^H y`.
#[inline]
pub(crate) fn dotc(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dense(rows: &[&[Complex64]]) -> DMatrix<Complex64> {
        let n = rows.len();
        let m = rows[0].len();
        DMatrix::from_fn(n, m, |i, j| rows[i][j])
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = SparseComplexMatrix::identity(2);
        assert_eq!(SparseComplexMatrix::kron(&i2, &i2).unwrap(), SparseComplexMatrix::identity(4));
    }

    #[test]
    fn kron_raising_block() {
        let a = SparseComplexMatrix::from_triplets(2, 2, &[(0, 1, ONE)]).unwrap();
        let k = SparseComplexMatrix::kron(&a, &SparseComplexMatrix::identity(2)).unwrap();
        let expected = SparseComplexMatrix::from_triplets(4, 4, &[(0, 2, ONE), (1, 3, ONE)]).unwrap();
        assert_eq!(k, expected);
    }

    #[test]
    fn kron_overflow_is_reported() {
        let big = SparseComplexMatrix::zeros(1, usize::MAX / 2);
        let two = SparseComplexMatrix::zeros(1, 4);
        assert!(matches!(SparseComplexMatrix::kron(&big, &two), Err(Error::DimensionOverflow(_))));
    }

    #[test]
    fn transpose_and_adjoint_examples() {
        let d = SparseComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(d.transpose(), d);
        let a = SparseComplexMatrix::from_triplets(2, 2, &[(0, 1, c(0.0, 1.0))]).unwrap();
        let expected = SparseComplexMatrix::from_triplets(2, 2, &[(1, 0, c(0.0, -1.0))]).unwrap();
        assert_eq!(a.adjoint(), expected);
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn add_cancels_to_empty() {
        let a = SparseComplexMatrix::from_triplets(3, 3, &[(0, 1, c(1.0, 2.0)), (2, 2, c(-3.0, 0.0))]).unwrap();
        let z = SparseComplexMatrix::add(&a, &a, ONE, -ONE).unwrap();
        assert_eq!(z.nnz(), 0);
        let i = SparseComplexMatrix::identity(3);
        let two_i = SparseComplexMatrix::add(&i, &SparseComplexMatrix::zeros(3, 3), c(2.0, 0.0), ONE).unwrap();
        assert_eq!(two_i, SparseComplexMatrix::identity(3).scale(c(2.0, 0.0)));
    }

    #[test]
    fn add_rejects_shape_mismatch() {
        let a = SparseComplexMatrix::identity(2);
        let b = SparseComplexMatrix::identity(3);
        assert!(matches!(SparseComplexMatrix::add(&a, &b, ONE, ONE), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn matvec_examples() {
        let x = vec![c(1.0, -1.0), c(2.0, 0.5), c(0.0, 3.0)];
        assert_eq!(SparseComplexMatrix::identity(3).matvec(&x).unwrap(), x);
        let d = SparseComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(d.matvec(&[ONE; 3]).unwrap(), vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        assert!(matches!(d.matvec(&[ONE; 2]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn permute_examples() {
        let d = SparseComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let id = Permutation::identity(3);
        assert_eq!(d.permute(&id, &id).unwrap(), d);
        let rev = Permutation::reversal(3);
        let expected = SparseComplexMatrix::from_diagonal(&[c(3.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(d.permute(&rev, &rev).unwrap(), expected);
        assert!(matches!(d.permute(&Permutation::identity(2), &id), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn vec_unvec_examples() {
        let (a, b, cc, d) = (c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0));
        let m = SparseComplexMatrix::from_dense(&dense(&[&[a, cc], &[b, d]]));
        assert_eq!(vec(&m).unwrap(), vec![a, b, cc, d]);
        let id = unvec(&[ONE, ZERO, ZERO, ONE], 2).unwrap();
        assert_eq!(id, DMatrix::identity(2, 2));
        assert!(unvec(&[ONE; 3], 2).is_err());
        assert!(vec(&SparseComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn csr_validation() {
        assert!(SparseComplexMatrix::try_from_csr(2, 2, vec![0, 1, 2], vec![1, 0], vec![ONE, ONE]).is_ok());
        // unsorted row
        assert!(SparseComplexMatrix::try_from_csr(1, 3, vec![0, 2], vec![2, 0], vec![ONE, ONE]).is_err());
        // column out of range
        assert!(SparseComplexMatrix::try_from_csr(1, 2, vec![0, 1], vec![2], vec![ONE]).is_err());
        // explicit zero is pruned
        let m = SparseComplexMatrix::try_from_csr(1, 2, vec![0, 2], vec![0, 1], vec![ZERO, ONE]).unwrap();
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn square_side_detects_non_squares() {
        assert_eq!(square_side(1024).unwrap(), 32);
        assert_eq!(square_side(0).unwrap(), 0);
        assert!(square_side(1023).is_err());
    }
}
