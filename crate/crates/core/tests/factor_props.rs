use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

use steady_core::{bicgstab, gmres, ilutp, lu, solve_lu, IterOptions, Permutation, SparseComplexMatrix};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Sparse random matrices made nonsingular by a dominant diagonal.
fn dominant(n: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
    prop::collection::vec(prop::option::weighted(0.3, (-1.0..1.0f64, -1.0..1.0f64)), n * n).prop_map(move |v| {
        let mut m = DMatrix::from_iterator(n, n, v.into_iter().map(|e| e.map_or(c(0.0, 0.0), |(a, b)| c(a, b))));
        for i in 0..n {
            m[(i, i)] += c(n as f64 + 1.0, 0.5);
        }
        m
    })
}

/// Sparse random matrices with a random (often zero) diagonal; pivoting must cope.
fn general(n: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
    (prop::collection::vec(prop::option::weighted(0.4, (-1.0..1.0f64, -1.0..1.0f64)), n * n), Just(n)).prop_map(
        |(v, n)| {
            let mut m = DMatrix::from_iterator(n, n, v.into_iter().map(|e| e.map_or(c(0.0, 0.0), |(a, b)| c(a, b))));
            // An anti-diagonal keeps the matrix nonsingular in almost every draw.
            for i in 0..n {
                m[(i, n - 1 - i)] += c(3.0, 0.0);
            }
            m
        },
    )
}

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_map(|f| Permutation::from_forward(f).unwrap())
}

fn rhs(n: usize) -> Vec<Complex64> {
    (0..n).map(|i| c(1.0 + i as f64, (i % 3) as f64 - 1.0)).collect()
}

fn residual(a: &DMatrix<Complex64>, x: &[Complex64], b: &[Complex64]) -> f64 {
    let r = a * DVector::from_column_slice(x) - DVector::from_column_slice(b);
    r.norm() / DVector::from_column_slice(b).norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lu_reconstructs_the_permuted_matrix((a, q) in (1usize..12).prop_flat_map(|n| (general(n), perm(n)))) {
        let s = SparseComplexMatrix::from_dense(&a);
        let f = match lu(&s, &q) {
            Ok(f) => f,
            // Rare singular draw.
            Err(_) => return Ok(()),
        };
        prop_assert!(f.is_complete());
        let lu_dense = f.l().to_dense() * f.u().to_dense();
        let pa = s.permute(f.row_perm(), f.col_perm()).unwrap().to_dense();
        let err = (&lu_dense - &pa).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-11 * a.iter().map(|z| z.norm()).fold(1.0, f64::max), "reconstruction error {err}");
        // Partial pivoting keeps |L| bounded by one.
        prop_assert!(f.l().values().iter().all(|v| v.norm() <= 1.0 + 1e-12));
        let b = rhs(a.nrows());
        let x = solve_lu(&f, &b).unwrap();
        prop_assert!(residual(&a, &x, &b) < 1e-9);
    }

    #[test]
    fn unlimited_ilutp_is_the_complete_lu((a, q) in (1usize..12).prop_flat_map(|n| (general(n), perm(n)))) {
        let s = SparseComplexMatrix::from_dense(&a);
        let Ok(full) = lu(&s, &q) else { return Ok(()) };
        let inc = ilutp(&s, 0.0, f64::INFINITY, &q).unwrap();
        prop_assert_eq!(inc.nnz(), full.nnz());
        prop_assert_eq!(inc.l(), full.l());
        prop_assert_eq!(inc.u(), full.u());
        prop_assert_eq!(inc.row_perm(), full.row_perm());
    }

    #[test]
    fn ilutp_never_stores_more_than_lu(
        (a, d, p) in (2usize..12).prop_flat_map(|n| (dominant(n), 0.0..0.5f64, 1.0..5.0f64))
    ) {
        let s = SparseComplexMatrix::from_dense(&a);
        let id = Permutation::identity(a.nrows());
        let full = lu(&s, &id).unwrap();
        let inc = ilutp(&s, d, p, &id).unwrap();
        prop_assert!(inc.fill_factor() <= full.fill_factor());
    }

    #[test]
    fn krylov_solvers_converge_on_dominant_systems(a in (1usize..16).prop_flat_map(dominant)) {
        let s = SparseComplexMatrix::from_dense(&a);
        let b = rhs(a.nrows());
        let opts = IterOptions { tol: 1e-12, ..IterOptions::default() };
        for r in [gmres(&s, &b, &opts).unwrap(), bicgstab(&s, &b, &opts).unwrap()] {
            prop_assert!(r.converged, "{:?}", r);
            prop_assert!(residual(&a, &r.x, &b) < 1e-10);
        }
    }

    #[test]
    fn preconditioning_with_incomplete_factors_still_converges(
        (a, d) in (2usize..16).prop_flat_map(|n| (dominant(n), 1e-3..1e-1f64))
    ) {
        let s = SparseComplexMatrix::from_dense(&a);
        let f = ilutp(&s, d, 2.0, &Permutation::identity(a.nrows())).unwrap();
        let b = rhs(a.nrows());
        let opts = IterOptions { tol: 1e-12, preconditioner: Some(&f), ..IterOptions::default() };
        for r in [gmres(&s, &b, &opts).unwrap(), bicgstab(&s, &b, &opts).unwrap()] {
            prop_assert!(r.converged);
            prop_assert!(residual(&a, &r.x, &b) < 1e-10);
        }
    }
}

#[test]
fn gmres_is_exact_after_n_steps_without_restart() {
    // Full GMRES on an n×n system terminates in at most n iterations.
    let n = 9;
    let t: Vec<_> = (0..n)
        .flat_map(|i| {
            let mut v = vec![(i, i, c(1.0 + i as f64, 0.0))];
            if i + 1 < n {
                v.push((i, i + 1, c(0.0, 2.0)));
            }
            v
        })
        .collect();
    let s = SparseComplexMatrix::from_triplets(n, n, &t).unwrap();
    let b = rhs(n);
    let r = gmres(&s, &b, &IterOptions { tol: 1e-13, restart: n, ..IterOptions::default() }).unwrap();
    assert!(r.converged);
    assert!(r.iterations <= n);
}
