//! Left-looking sparse LU with partial pivoting and its incomplete variant
//! with dual-threshold dropping (iLUTP).
//!
//! Column `k` of `A Q` is computed as a sparse triangular solve against the
//! columns of `L` found so far; the pivot is the largest remaining entry,
//! with the original diagonal preferred on ties. Factors satisfy
//! `P_r A Q = L U` with `P_r[i, row_perm.forward[i]]` and `Q` given by the
//! column permutation.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sparse::{mtx, norm_inf, Permutation, SparseComplexMatrix, ONE, ZERO};

/// Complete or incomplete LU factors.
#[derive(Clone, Debug)]
pub struct LUFactors {
    l: SparseComplexMatrix,
    u: SparseComplexMatrix,
    row_perm: Permutation,
    col_perm: Permutation,
    fill_factor: f64,
    complete: bool,
    drop_tol: f64,
    fill_limit: f64,
}

/// Limits for [`lu_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct LuOptions {
    /// Refuse to continue once `nnz(L) + nnz(U)` would exceed this.
    pub max_nnz: Option<usize>,
}

pub const DEFAULT_DROP_TOL: f64 = 1e-4;
pub const DEFAULT_FILL_LIMIT: f64 = 300.0;

#[derive(Clone, Copy)]
struct Dropping {
    tol: f64,
    fill: f64,
}

const NONE: usize = usize::MAX;

/// Complete LU of `a` with the given column ordering.
pub fn lu(a: &SparseComplexMatrix, col_perm: &Permutation) -> Result<LUFactors> {
    lu_with(a, col_perm, LuOptions::default())
}

pub fn lu_with(a: &SparseComplexMatrix, col_perm: &Permutation, opts: LuOptions) -> Result<LUFactors> {
    factorize(a, col_perm, None, opts.max_nnz)
}

/// Incomplete LU with drop tolerance `d` and fill limit `p`.
///
/// Fill-in entries of each eliminated column smaller than `d` times the
/// infinity norm of the corresponding column of `a` are dropped; positions
/// stored in `a` are kept whatever their size. Then each column of
/// `L` and `U` together keeps at most `max(ceil(p nnz(a) / n), 2)` entries
/// (pivot and unit diagonal included), largest magnitudes first. The pivot
/// is never dropped. `d = 0, p = ∞` gives the complete factorization.
pub fn ilutp(a: &SparseComplexMatrix, d: f64, p: f64, col_perm: &Permutation) -> Result<LUFactors> {
    if !d.is_finite() || d < 0.0 {
        return Err(Error::invalid("drop tolerance must be finite and non-negative"));
    }
    if p.is_nan() || p < 1.0 {
        return Err(Error::invalid("fill limit must be at least 1"));
    }
    factorize(a, col_perm, Some(Dropping { tol: d, fill: p }), None)
}

fn factorize(
    a: &SparseComplexMatrix,
    q: &Permutation,
    dropping: Option<Dropping>,
    max_nnz: Option<usize>,
) -> Result<LUFactors> {
    if !a.is_square() {
        return Err(Error::NonSquare { nrows: a.nrows(), ncols: a.ncols() });
    }
    let n = a.nrows();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if q.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: q.len() });
    }
    let at = a.transpose();
    let budget = dropping.and_then(|dr| {
        if dr.fill.is_finite() {
            Some(((dr.fill * a.nnz() as f64 / n as f64).ceil() as usize).max(2))
        } else {
            None
        }
    });

    // L columns in original row numbering (pivot row first, value 1);
    // U columns in pivot-step numbering (diagonal last).
    let mut lcols: Vec<Vec<(usize, Complex64)>> = Vec::with_capacity(n);
    let mut ucols: Vec<Vec<(usize, Complex64)>> = Vec::with_capacity(n);
    let mut pinv = vec![NONE; n];
    let mut x = vec![ZERO; n];
    let mut mark = vec![0usize; n];
    let mut stamp = 0usize;
    let mut stack: Vec<(usize, usize)> = Vec::new();
    let mut post: Vec<usize> = Vec::with_capacity(n);
    let mut total = 0usize;
    let mut orig = vec![0usize; n];

    for k in 0..n {
        let col = q.inverse()[k];
        let (rows, vals) = at.row(col);

        // Nonzero pattern of L \ A(:, col) in topological order.
        stamp += 1;
        post.clear();
        for &r in rows {
            if mark[r] != stamp {
                dfs(r, &pinv, &lcols, &mut mark, stamp, &mut stack, &mut post);
            }
        }
        for (&r, &v) in rows.iter().zip(vals) {
            x[r] = v;
        }
        for &i in post.iter().rev() {
            let j = pinv[i];
            if j == NONE {
                continue;
            }
            let xi = x[i];
            if xi == ZERO {
                continue;
            }
            for &(r, l) in &lcols[j][1..] {
                x[r] -= l * xi;
            }
        }

        // Pivot among rows not yet pivoted; prefer the original diagonal.
        let mut ipiv = NONE;
        let mut best = -1.0f64;
        for &i in &post {
            if pinv[i] != NONE {
                continue;
            }
            let m = x[i].norm();
            if m > best || (m == best && i < ipiv) {
                best = m;
                ipiv = i;
            }
        }
        if ipiv != NONE && ipiv != col && pinv[col] == NONE && mark[col] == stamp && x[col].norm() >= best {
            ipiv = col;
        }
        if ipiv == NONE || best <= 0.0 || !best.is_finite() {
            for &i in &post {
                x[i] = ZERO;
            }
            return Err(match dropping {
                Some(_) => Error::PreconditionerBreakdown { column: k },
                None => Error::Singular { column: k },
            });
        }
        let pivot = x[ipiv];

        // Candidates other than the pivot: (original row, value, is_upper).
        let mut entries: Vec<(usize, Complex64, bool)> = Vec::with_capacity(post.len());
        for &i in post.iter().rev() {
            if i == ipiv || x[i] == ZERO {
                continue;
            }
            entries.push((i, x[i], pinv[i] != NONE));
        }
        for &i in &post {
            x[i] = ZERO;
        }
        if let Some(dr) = dropping {
            // Only fill-in is subject to the threshold; entries of `a` stay.
            let limit = dr.tol * vals.iter().fold(0.0f64, |m, v| m.max(v.norm()));
            for &r in rows {
                orig[r] = k + 1;
            }
            entries.retain(|e| orig[e.0] == k + 1 || e.1.norm() >= limit);
            if let Some(b) = budget {
                let keep = b - 2;
                if entries.len() > keep {
                    entries.sort_by(|p, q| q.1.norm().total_cmp(&p.1.norm()).then(p.0.cmp(&q.0)));
                    entries.truncate(keep);
                }
            }
        }

        let mut lcol = Vec::with_capacity(entries.len() + 1);
        let mut ucol = Vec::with_capacity(entries.len() + 1);
        lcol.push((ipiv, ONE));
        for (i, v, upper) in entries {
            if upper {
                ucol.push((pinv[i], v));
            } else {
                let l = v / pivot;
                if l != ZERO {
                    lcol.push((i, l));
                }
            }
        }
        ucol.sort_unstable_by_key(|e| e.0);
        ucol.push((k, pivot));
        total += lcol.len() + ucol.len();
        if let Some(limit) = max_nnz {
            if total > limit {
                return Err(Error::MemoryLimit { limit });
            }
        }
        pinv[ipiv] = k;
        lcols.push(lcol);
        ucols.push(ucol);
    }

    // Assemble CSR factors in pivot-step numbering by building the
    // transposes row by row.
    let lt_rows: Vec<Vec<(usize, Complex64)>> = lcols
        .into_iter()
        .map(|c| {
            let mut r: Vec<_> = c.into_iter().map(|(i, v)| (pinv[i], v)).collect();
            r.sort_unstable_by_key(|e| e.0);
            r
        })
        .collect();
    let l = csr_from_rows(n, lt_rows).transpose();
    let u = csr_from_rows(n, ucols).transpose();
    let fill_factor = (l.nnz() + u.nnz()) as f64 / a.nnz() as f64;
    let complete = dropping.is_none_or(|dr| dr.tol == 0.0 && dr.fill.is_infinite());
    Ok(LUFactors {
        l,
        u,
        row_perm: Permutation::from_forward(pinv)?,
        col_perm: q.clone(),
        fill_factor,
        complete,
        drop_tol: dropping.map_or(0.0, |d| d.tol),
        fill_limit: dropping.map_or(f64::INFINITY, |d| d.fill),
    })
}

fn dfs(
    root: usize,
    pinv: &[usize],
    lcols: &[Vec<(usize, Complex64)>],
    mark: &mut [usize],
    stamp: usize,
    stack: &mut Vec<(usize, usize)>,
    post: &mut Vec<usize>,
) {
    mark[root] = stamp;
    stack.push((root, 1));
    while let Some(top) = stack.last_mut() {
        let (node, pos) = *top;
        let j = pinv[node];
        let children: &[(usize, Complex64)] = if j == NONE { &[] } else { &lcols[j] };
        let mut p = pos;
        let mut next = None;
        while p < children.len() {
            let c = children[p].0;
            p += 1;
            if mark[c] != stamp {
                next = Some(c);
                break;
            }
        }
        top.1 = p;
        match next {
            Some(c) => {
                mark[c] = stamp;
                stack.push((c, 1));
            }
            None => {
                stack.pop();
                post.push(node);
            }
        }
    }
}

fn csr_from_rows(n: usize, rows: Vec<Vec<(usize, Complex64)>>) -> SparseComplexMatrix {
    let nnz = rows.iter().map(Vec::len).sum();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    row_ptr.push(0);
    for r in rows {
        for (j, v) in r {
            col_idx.push(j);
            values.push(v);
        }
        row_ptr.push(col_idx.len());
    }
    SparseComplexMatrix::from_parts_unchecked(n, n, row_ptr, col_idx, values)
}

impl LUFactors {
    /// Unit lower-triangular factor.
    pub fn l(&self) -> &SparseComplexMatrix {
        &self.l
    }

    pub fn u(&self) -> &SparseComplexMatrix {
        &self.u
    }

    pub fn row_perm(&self) -> &Permutation {
        &self.row_perm
    }

    pub fn col_perm(&self) -> &Permutation {
        &self.col_perm
    }

    /// `(nnz(L) + nnz(U)) / nnz(A)`, with the unit diagonal of `L` counted.
    pub fn fill_factor(&self) -> f64 {
        self.fill_factor
    }

    pub fn nnz(&self) -> usize {
        self.l.nnz() + self.u.nnz()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn drop_tol(&self) -> f64 {
        self.drop_tol
    }

    pub fn fill_limit(&self) -> f64 {
        self.fill_limit
    }

    pub fn size(&self) -> usize {
        self.l.nrows()
    }

    /// Writes `L.mtx`, `U.mtx`, `row_perm.txt` and `col_perm.txt` into `dir`.
    pub fn export(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        mtx::write_path(&self.l, dir.join("L.mtx"))?;
        mtx::write_path(&self.u, dir.join("U.mtx"))?;
        self.row_perm.write_to(std::fs::File::create(dir.join("row_perm.txt"))?)?;
        self.col_perm.write_to(std::fs::File::create(dir.join("col_perm.txt"))?)?;
        Ok(())
    }
}

/// Solves `A x = b` with the factors of `A` (approximately for incomplete factors).
pub fn solve_lu(f: &LUFactors, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = f.size();
    if b.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: b.len() });
    }
    let mut y = f.row_perm.apply(b);
    solve_in_place(f, &mut y);
    Ok(f.col_perm.apply_inverse(&y))
}

/// Triangular solves on an already row-permuted vector.
fn solve_in_place(f: &LUFactors, y: &mut [Complex64]) {
    let n = y.len();
    for i in 0..n {
        let (cols, vals) = f.l.row(i);
        let mut s = y[i];
        // The unit diagonal is the last entry of each row.
        for (&j, &v) in cols[..cols.len() - 1].iter().zip(vals) {
            s -= v * y[j];
        }
        y[i] = s;
    }
    for i in (0..n).rev() {
        let (cols, vals) = f.u.row(i);
        let mut s = y[i];
        for (&j, &v) in cols[1..].iter().zip(&vals[1..]) {
            s -= v * y[j];
        }
        y[i] = s / vals[0];
    }
}

/// `‖M⁻¹ e‖∞` for the all-ones vector `e`: a cheap lower bound on the
/// infinity norm of the approximate inverse.
pub fn condest(f: &LUFactors) -> f64 {
    let ones = vec![ONE; f.size()];
    solve_lu(f, &ones).map(|x| norm_inf(&x)).unwrap_or(f64::NAN)
}
