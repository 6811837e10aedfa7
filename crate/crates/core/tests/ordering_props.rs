use num_complex::Complex64;
use proptest::prelude::*;

use steady_core::{band_profile, col_min_degree, lu, rcm, weighted_mbm, Error, Permutation, SparseComplexMatrix};

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn pattern(n: usize, entries: &[(usize, usize)]) -> SparseComplexMatrix {
    let t: Vec<_> = entries.iter().map(|&(i, j)| (i, j, Complex64::new(1.0 + (i * n + j) as f64, 0.5))).collect();
    SparseComplexMatrix::from_triplets(n, n, &t).unwrap()
}

fn bandwidth_under(edges: &[(usize, usize)], pos: &[usize]) -> usize {
    edges.iter().map(|&(i, j)| pos[i].abs_diff(pos[j])).max().unwrap_or(0)
}

/// Minimum bandwidth over all n! labelings.
fn brute_force_bandwidth(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut pos: Vec<usize> = (0..n).collect();
    let mut best = usize::MAX;
    permute_all(&mut pos, 0, &mut |p| best = best.min(bandwidth_under(edges, p)));
    best
}

fn permute_all(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute_all(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Kuhn's augmenting-path matching: size of a maximum matching of rows to columns.
fn matching_size(n: usize, entries: &[(usize, usize)]) -> usize {
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in entries {
        adj[j].push(i);
    }
    let mut row_of = vec![usize::MAX; n];
    fn augment(j: usize, adj: &[Vec<usize>], seen: &mut [bool], row_of: &mut [usize], col_of: &mut [usize]) -> bool {
        for &i in &adj[j] {
            if seen[i] {
                continue;
            }
            seen[i] = true;
            if col_of[i] == usize::MAX || augment(col_of[i], adj, seen, row_of, col_of) {
                col_of[i] = j;
                row_of[j] = i;
                return true;
            }
        }
        false
    }
    let mut col_of = vec![usize::MAX; n];
    (0..n).filter(|&j| augment(j, &adj, &mut vec![false; n], &mut row_of, &mut col_of)).count()
}

fn shuffled(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn rcm_recovers_a_scrambled_path((n, labels) in (2usize..9).prop_flat_map(|n| (Just(n), shuffled(n)))) {
        let mut entries: Vec<(usize, usize)> = (0..n).map(|i| (labels[i], labels[i])).collect();
        for i in 0..n - 1 {
            entries.push((labels[i], labels[i + 1]));
            entries.push((labels[i + 1], labels[i]));
        }
        let a = pattern(n, &entries);
        let p = rcm(&a).unwrap();
        let b = a.permute(&p, &p).unwrap();
        let bp = band_profile(&b).unwrap();
        prop_assert_eq!((bp.lb, bp.ub, bp.bandwidth), (1, 1, 3));
        let edges: Vec<_> = (0..n - 1).map(|i| (labels[i], labels[i + 1])).collect();
        prop_assert_eq!(brute_force_bandwidth(n, &edges), 1);
    }

    #[test]
    fn rcm_never_beats_the_optimum(
        (n, edges) in (2usize..7).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 1..12)))
    ) {
        let edges: Vec<_> = edges.into_iter().filter(|(i, j)| i != j).collect();
        let mut entries: Vec<_> = (0..n).map(|i| (i, i)).collect();
        for &(i, j) in &edges {
            entries.push((i, j));
            entries.push((j, i));
        }
        let a = pattern(n, &entries);
        let p = rcm(&a).unwrap();
        let got = band_profile(&a.permute(&p, &p).unwrap()).unwrap();
        prop_assert!(got.ub.max(got.lb) >= brute_force_bandwidth(n, &edges));
    }

    #[test]
    fn mbm_agrees_with_augmenting_paths(
        (n, entries) in (1usize..8).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..30)))
    ) {
        let a = pattern(n, &entries);
        let a_entries: Vec<_> = a.iter().map(|(i, j, _)| (i, j)).collect();
        let perfect = matching_size(n, &a_entries) == n;
        match weighted_mbm(&a) {
            Ok(p) => {
                prop_assert!(perfect);
                let b = a.permute(&p, &Permutation::identity(n)).unwrap();
                prop_assert_eq!(b.structural_zero_diagonal_count(), 0);
            }
            Err(Error::StructurallySingular { .. }) => prop_assert!(!perfect),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn column_ordering_is_a_permutation(
        (n, entries) in (1usize..12).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..40)))
    ) {
        let q = col_min_degree(&pattern(n, &entries)).unwrap();
        let mut f = q.forward().to_vec();
        f.sort_unstable();
        prop_assert_eq!(f, (0..n).collect::<Vec<_>>());
    }
}

fn arrow(n: usize, hub: usize, dense_row: bool) -> SparseComplexMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, Complex64::new(n as f64 + 1.0, 0.0)));
        if i != hub {
            t.push((i, hub, one()));
            if dense_row {
                t.push((hub, i, one()));
            }
        }
    }
    SparseComplexMatrix::from_triplets(n, n, &t).unwrap()
}

#[test]
fn arrow_hub_column_stays_last() {
    let n = 12;
    let q = col_min_degree(&arrow(n, n - 1, true)).unwrap();
    assert_eq!(q.forward()[n - 1], n - 1);
    let f = lu(&arrow(n, n - 1, true), &q).unwrap();
    assert_eq!(f.nnz(), 3 * n - 2 + n);
}

#[test]
fn dense_column_is_ordered_late_and_fill_does_not_grow() {
    let n = 12;
    let a = arrow(n, 0, false);
    let q = col_min_degree(&a).unwrap();
    assert!(q.forward()[0] >= n - 2, "{:?}", q.forward());
    let plain = lu(&a, &Permutation::identity(n)).unwrap();
    let ordered = lu(&a, &q).unwrap();
    assert!(ordered.nnz() <= plain.nnz());
}

#[test]
fn dense_row_and_column_leave_no_preference() {
    // Every pair of columns shares the hub row, so all degrees tie and the
    // lowest index goes first.
    let q = col_min_degree(&arrow(8, 0, true)).unwrap();
    assert!(q.is_identity());
}
