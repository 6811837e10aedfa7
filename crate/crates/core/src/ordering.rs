//! Bandwidth/profile metrics and the three orderings compared by the
//! solvers: reverse Cuthill-McKee on the symmetrized structure, a weighted
//! bipartite matching for a zero-free diagonal, and a greedy column
//! minimum-degree ordering.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::sparse::{Permutation, SparseComplexMatrix};

/// Upper/lower bandwidth and profile of a sparse matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BandProfile {
    pub ub: usize,
    pub lb: usize,
    pub bandwidth: usize,
    pub up: usize,
    pub lp: usize,
    pub profile: usize,
}

/// `ub = max(j-i)`, `lb = max(i-j)`, `up = sum_i max_j(j-i)`,
/// `lp = sum_j max_i(i-j)` over stored entries. Rows or columns without an
/// entry on the relevant side of the diagonal contribute zero.
pub fn band_profile(a: &SparseComplexMatrix) -> Result<BandProfile> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut ub = 0usize;
    let mut lb = 0usize;
    let mut up = 0usize;
    let mut col_low = vec![0usize; a.ncols()];
    for i in 0..a.nrows() {
        let (cols, _) = a.row(i);
        if let Some(&last) = cols.last() {
            if last > i {
                up += last - i;
                ub = ub.max(last - i);
            }
        }
        for &j in cols {
            if j >= i {
                break;
            }
            lb = lb.max(i - j);
            col_low[j] = col_low[j].max(i - j);
        }
    }
    let lp = col_low.iter().sum();
    Ok(BandProfile { ub, lb, bandwidth: ub + lb + 1, up, lp, profile: up + lp })
}

fn require_square(a: &SparseComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NonSquare { nrows: a.nrows(), ncols: a.ncols() });
    }
    Ok(())
}

/// Adjacency lists of the structure of `a + a^T` without self loops, plus
/// node degrees: stored entries per row of `a + a^T`, with a stored diagonal
/// counted twice. The double count only matters for tie-breaking, but it
/// decides the start node on matrices whose diagonal is partly empty.
fn symmetric_structure(a: &SparseComplexMatrix) -> (Vec<Vec<usize>>, Vec<usize>) {
    let n = a.nrows();
    let at = a.transpose();
    let mut adj = Vec::with_capacity(n);
    let mut degree = Vec::with_capacity(n);
    for i in 0..n {
        let (r, _) = a.row(i);
        let (c, _) = at.row(i);
        let mut merged = Vec::with_capacity(r.len() + c.len());
        let (mut p, mut q) = (0, 0);
        while p < r.len() || q < c.len() {
            let next = if q == c.len() || (p < r.len() && r[p] < c[q]) {
                p += 1;
                r[p - 1]
            } else if p == r.len() || c[q] < r[p] {
                q += 1;
                c[q - 1]
            } else {
                p += 1;
                q += 1;
                r[p - 1]
            };
            merged.push(next);
        }
        let has_diag = merged.binary_search(&i).is_ok();
        degree.push(merged.len() + usize::from(has_diag));
        merged.retain(|&j| j != i);
        adj.push(merged);
    }
    (adj, degree)
}

/// Reverse Cuthill-McKee ordering of the structure of `a + a^T`.
///
/// Each connected component is searched breadth-first from its lowest-degree
/// node; unvisited neighbours are appended in ascending degree. Ties are
/// broken by ascending index. The returned permutation is meant to be
/// applied to both rows and columns.
pub fn rcm(a: &SparseComplexMatrix) -> Result<Permutation> {
    require_square(a)?;
    let n = a.nrows();
    let (adj, degree) = symmetric_structure(a);

    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    let mut level: Vec<usize> = Vec::new();
    for &start in &by_degree {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            level.clear();
            level.extend(adj[v].iter().copied().filter(|&u| !visited[u]));
            level.sort_by_key(|&u| (degree[u], u));
            for &u in &level {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    Permutation::from_order(order)
}

/// Row permutation giving `a` a zero-free diagonal, preferring large entries.
///
/// Columns are processed in descending order of their largest magnitude
/// entry. From each unmatched column a breadth-first augmenting-path search
/// visits rows in descending magnitude, so the first free row reached is the
/// largest available one. Fails if no perfect matching exists.
pub fn weighted_mbm(a: &SparseComplexMatrix) -> Result<Permutation> {
    require_square(a)?;
    let n = a.nrows();
    let at = a.transpose();

    // Column-wise row lists sorted by descending |value|.
    let mut col_rows: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut col_max = vec![0.0f64; n];
    for (j, cmax) in col_max.iter_mut().enumerate() {
        let (rows, vals) = at.row(j);
        let mut entries: Vec<(usize, f64)> = rows.iter().zip(vals).map(|(&i, v)| (i, v.norm())).collect();
        entries.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        *cmax = entries.first().map_or(0.0, |e| e.1);
        col_rows.push(entries.into_iter().map(|e| e.0).collect());
    }
    let mut col_order: Vec<usize> = (0..n).collect();
    col_order.sort_by(|&x, &y| col_max[y].total_cmp(&col_max[x]).then(x.cmp(&y)));

    const NONE: usize = usize::MAX;
    let mut col_match = vec![NONE; n];
    let mut row_match = vec![NONE; n];
    let mut visited = vec![0usize; n];
    let mut prev = vec![NONE; n];
    let mut queue: Vec<usize> = Vec::with_capacity(n);
    let mut stamp = 0usize;

    for &root in &col_order {
        if col_rows[root].is_empty() {
            return Err(Error::StructurallySingular { column: root });
        }
        stamp += 1;
        queue.clear();
        queue.push(root);
        let mut head = 0;
        let mut free_row = None;
        'search: while head < queue.len() {
            let c = queue[head];
            head += 1;
            for &r in &col_rows[c] {
                if visited[r] == stamp {
                    continue;
                }
                visited[r] = stamp;
                prev[r] = c;
                if row_match[r] == NONE {
                    free_row = Some(r);
                    break 'search;
                }
                queue.push(row_match[r]);
            }
        }
        let Some(mut r) = free_row else {
            return Err(Error::StructurallySingular { column: root });
        };
        loop {
            let c = prev[r];
            let displaced = col_match[c];
            col_match[c] = r;
            row_match[r] = c;
            if c == root {
                break;
            }
            r = displaced;
        }
    }
    // Row col_match[j] moves to position j.
    let mut forward = vec![0usize; n];
    for (j, &r) in col_match.iter().enumerate() {
        forward[r] = j;
    }
    Permutation::from_forward(forward)
}

/// Greedy minimum-degree column ordering on the structure of `a^T a`.
///
/// The column-intersection graph is never formed explicitly: each row of `a`
/// starts out as an element (a clique over its columns) and eliminating a
/// column merges its adjacent elements into a new one. Degrees are exact,
/// ties go to the lowest column index.
pub fn col_min_degree(a: &SparseComplexMatrix) -> Result<Permutation> {
    require_square(a)?;
    let n = a.ncols();
    let nrows = a.nrows();

    // Elements 0..nrows are the rows of `a`; new elements are appended.
    let mut evars: Vec<Vec<usize>> = (0..nrows).map(|i| a.row(i).0.to_vec()).collect();
    let mut alive: Vec<bool> = evars.iter().map(|e| e.len() > 1).collect();
    let mut elems: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, vars) in evars.iter().enumerate() {
        if alive[e] {
            for &v in vars {
                elems[v].push(e);
            }
        }
    }

    let mut eliminated = vec![false; n];
    let mut mark = vec![0usize; n];
    let mut stamp = 0usize;

    let mut degree = vec![0usize; n];
    for (v, dv) in degree.iter_mut().enumerate() {
        stamp += 1;
        *dv = exact_degree(v, &elems, &evars, &alive, &mut mark, stamp);
    }
    let mut heap: BTreeSet<(usize, usize)> = (0..n).map(|v| (degree[v], v)).collect();
    let mut order = Vec::with_capacity(n);

    while let Some(&(deg, v)) = heap.iter().next() {
        let remaining = n - order.len();
        if deg + 1 == remaining {
            // Every remaining column is adjacent to every other one; ties
            // resolve to ascending index from here on.
            let mut rest: Vec<usize> = heap.iter().map(|&(_, u)| u).collect();
            rest.sort_unstable();
            order.extend(rest);
            break;
        }
        heap.remove(&(deg, v));
        eliminated[v] = true;
        order.push(v);

        // New element = union of v's elements minus v; absorb the old ones.
        stamp += 1;
        mark[v] = stamp;
        let mut merged = Vec::new();
        for &e in &elems[v] {
            if !alive[e] {
                continue;
            }
            for &u in &evars[e] {
                if mark[u] != stamp && !eliminated[u] {
                    mark[u] = stamp;
                    merged.push(u);
                }
            }
            alive[e] = false;
            evars[e] = Vec::new();
        }
        elems[v] = Vec::new();
        if merged.is_empty() {
            continue;
        }
        let new_e = evars.len();
        let keep = merged.len() > 1;
        for &u in &merged {
            elems[u].retain(|&e| alive[e]);
            if keep {
                elems[u].push(new_e);
            }
        }
        evars.push(if keep { merged.clone() } else { Vec::new() });
        alive.push(keep);
        for &u in &merged {
            stamp += 1;
            let d = exact_degree(u, &elems, &evars, &alive, &mut mark, stamp);
            if d != degree[u] {
                heap.remove(&(degree[u], u));
                degree[u] = d;
                heap.insert((d, u));
            }
        }
    }
    Permutation::from_order(order)
}

fn exact_degree(
    v: usize,
    elems: &[Vec<usize>],
    evars: &[Vec<usize>],
    alive: &[bool],
    mark: &mut [usize],
    stamp: usize,
) -> usize {
    mark[v] = stamp;
    let mut d = 0;
    for &e in &elems[v] {
        if !alive[e] {
            continue;
        }
        for &u in &evars[e] {
            if mark[u] != stamp {
                mark[u] = stamp;
                d += 1;
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::ONE;
    use num_complex::Complex64;

    fn pattern(n: usize, entries: &[(usize, usize)]) -> SparseComplexMatrix {
        let t: Vec<_> = entries.iter().map(|&(i, j)| (i, j, ONE)).collect();
        SparseComplexMatrix::from_triplets(n, n, &t).unwrap()
    }

    #[test]
    fn diagonal_band_profile() {
        let bp = band_profile(&SparseComplexMatrix::identity(5)).unwrap();
        assert_eq!((bp.ub, bp.lb, bp.bandwidth, bp.profile), (0, 0, 1, 0));
    }

    #[test]
    fn single_upper_entry() {
        let bp = band_profile(&pattern(3, &[(0, 2)])).unwrap();
        assert_eq!(bp.ub, 2);
        assert_eq!(bp.lb, 0);
        assert_eq!(bp.up, 2);
        assert_eq!(bp.bandwidth, 3);
    }

    #[test]
    fn profile_counts_lower_side_per_column() {
        // column 0 reaches row 3, column 1 reaches row 2; row 0 reaches column 1.
        let bp = band_profile(&pattern(4, &[(3, 0), (2, 1), (2, 0), (0, 1)])).unwrap();
        assert_eq!(bp.lp, 3 + 1);
        assert_eq!(bp.up, 1);
        assert_eq!(bp.lb, 3);
    }

    #[test]
    fn empty_matrix_is_an_error() {
        assert!(matches!(band_profile(&SparseComplexMatrix::zeros(0, 0)), Err(Error::EmptyMatrix)));
    }

    #[test]
    fn rcm_keeps_tridiagonal_bandwidth() {
        let n = 7;
        let mut e = Vec::new();
        for i in 0..n {
            e.push((i, i));
            if i + 1 < n {
                e.push((i, i + 1));
                e.push((i + 1, i));
            }
        }
        let a = pattern(n, &e);
        let p = rcm(&a).unwrap();
        let b = a.permute(&p, &p).unwrap();
        assert!(band_profile(&b).unwrap().bandwidth <= band_profile(&a).unwrap().bandwidth);
    }

    #[test]
    fn rcm_handles_disconnected_components() {
        let a = pattern(5, &[(0, 3), (3, 0), (1, 1), (2, 4)]);
        let p = rcm(&a).unwrap();
        assert_eq!(p.len(), 5);
    }

    #[test]
    fn mbm_on_anti_diagonal_is_reversal() {
        let a = pattern(3, &[(0, 2), (1, 1), (2, 0)]);
        let p = weighted_mbm(&a).unwrap();
        assert_eq!(p, Permutation::reversal(3));
    }

    #[test]
    fn mbm_prefers_larger_entries() {
        // Column 0 has a large entry in row 1; the full matching must still exist.
        let t = [
            (0, 0, Complex64::new(0.1, 0.0)),
            (1, 0, Complex64::new(5.0, 0.0)),
            (0, 1, Complex64::new(2.0, 0.0)),
            (1, 1, Complex64::new(0.2, 0.0)),
        ];
        let a = SparseComplexMatrix::from_triplets(2, 2, &t).unwrap();
        let p = weighted_mbm(&a).unwrap();
        let b = a.permute(&p, &Permutation::identity(2)).unwrap();
        assert_eq!(b.get(0, 0), Complex64::new(5.0, 0.0));
        assert_eq!(b.get(1, 1), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn mbm_structurally_singular() {
        let a = pattern(3, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 0)]);
        assert!(matches!(weighted_mbm(&a), Err(Error::StructurallySingular { .. })));
        let empty_col = pattern(2, &[(0, 0), (1, 0)]);
        assert!(matches!(weighted_mbm(&empty_col), Err(Error::StructurallySingular { .. })));
    }

    #[test]
    fn cmd_on_diagonal_is_identity() {
        assert!(col_min_degree(&SparseComplexMatrix::identity(6)).unwrap().is_identity());
    }

    #[test]
    fn cmd_puts_arrow_hub_last() {
        let n = 8;
        let mut e = Vec::new();
        for i in 0..n {
            e.push((i, i));
            e.push((n - 1, i));
            e.push((i, n - 1));
        }
        let p = col_min_degree(&pattern(n, &e)).unwrap();
        assert_eq!(p.forward()[n - 1], n - 1);
    }

    #[test]
    fn cmd_orders_star_hub_after_leaves() {
        // Dense first column only: the column graph is a star around column 0.
        let n = 6;
        let mut e: Vec<_> = (0..n).map(|i| (i, i)).collect();
        e.extend((1..n).map(|i| (i, 0)));
        let p = col_min_degree(&pattern(n, &e)).unwrap();
        assert!(p.forward()[0] >= n - 2);
    }
}
