use nalgebra::DMatrix;
use num_complex::Complex64;

use steady_core::steady::dense_null_space;
use steady_core::{
    build_liouvillian, dense_oracle, solve, validate, Error, LiouvillianSystem, Method, ModelSpec, Ordering,
    QuantumOperator, SolverOptions, SparseComplexMatrix, System, ValidationOptions,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn op(rows: usize, entries: &[(usize, usize, f64)]) -> QuantumOperator {
    let t: Vec<_> = entries.iter().map(|&(i, j, v)| (i, j, c(v, 0.0))).collect();
    QuantumOperator::new(SparseComplexMatrix::from_triplets(rows, rows, &t).unwrap(), vec![rows]).unwrap()
}

/// Resonantly driven two-level atom: H = (Ω/2)σx, collapse √γ σ₋, with the
/// excited state at index 0.
fn driven_qubit(omega: f64, gamma: f64) -> LiouvillianSystem {
    let h = op(2, &[(0, 1, omega / 2.0), (1, 0, omega / 2.0)]);
    let lower = op(2, &[(1, 0, gamma.sqrt())]);
    build_liouvillian(&h, &[lower]).unwrap()
}

fn max_abs(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn model(system: System, size: usize) -> LiouvillianSystem {
    ModelSpec::new(system, size).build().unwrap().liouvillian().unwrap()
}

#[test]
fn driven_qubit_matches_optical_bloch_solution() {
    for &(omega, gamma) in &[(1.0, 1.0), (0.3, 2.0), (5.0, 0.1)] {
        let l = driven_qubit(omega, gamma);
        let denom = gamma * gamma + 2.0 * omega * omega;
        let p_e = omega * omega / denom;
        let coh = omega * gamma / denom;
        let oracle = dense_oracle(&l).unwrap();
        for rho in std::iter::once(oracle)
            .chain(Method::ALL.iter().map(|&m| solve(&l, m, &SolverOptions::default()).unwrap().rho))
        {
            assert!((rho[(0, 0)].re - p_e).abs() < 1e-10, "excited population {} vs {p_e}", rho[(0, 0)]);
            assert!((rho[(1, 1)].re - (1.0 - p_e)).abs() < 1e-10);
            assert!((rho[(0, 1)].norm() - coh).abs() < 1e-10, "coherence {} vs {coh}", rho[(0, 1)].norm());
        }
    }
}

#[test]
fn uncoupled_blocks_give_a_degenerate_null_space() {
    // Two independent decaying qubits on levels {0,1} and {2,3}. The ground
    // levels 1 and 3 differ in energy so their coherence is not stationary.
    let h = op(4, &[(0, 0, 1.0), (2, 2, 0.5), (3, 3, 0.2)]);
    let c1 = op(4, &[(1, 0, 0.3)]);
    let c2 = op(4, &[(3, 2, 0.7)]);
    let l = build_liouvillian(&h, &[c1, c2]).unwrap();
    let ns = dense_null_space(&l).unwrap();
    assert_eq!(ns.null_dim, 2);
    assert!(matches!(dense_oracle(&l), Err(Error::DegenerateNullSpace { dim: 2 })));

    // Any mixture of the two ground states is stationary; the report flags it.
    let mut rho = DMatrix::zeros(4, 4);
    rho[(1, 1)] = c(0.5, 0.0);
    rho[(3, 3)] = c(0.5, 0.0);
    let report = validate(&rho, &l, &ValidationOptions::default()).unwrap();
    assert!(report.check("residual").unwrap().passed);
    assert!(!report.check("unique").unwrap().passed);
    assert!(!report.passed());
}

#[test]
fn oracle_residual_is_tiny_on_small_models() {
    for (system, size) in [(System::JaynesCummings, 5), (System::SpinChain, 3), (System::Optomechanical, 2)] {
        let l = model(system, size);
        let rho = dense_oracle(&l).unwrap();
        let v = steady_core::sparse::vec_dense(&rho).unwrap();
        let r: f64 = l.matrix().matvec(&v).unwrap().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(r <= 1e-12, "{system}: {r}");
    }
}

#[test]
fn converged_methods_agree_up_to_dimension_24() {
    for (system, size) in [(System::JaynesCummings, 12), (System::SpinChain, 4), (System::Optomechanical, 6)] {
        let l = model(system, size);
        assert!(l.hilbert_dim() <= 24);
        let mut sols = Vec::new();
        for m in Method::ALL {
            for o in Ordering::ALL {
                let opts = SolverOptions { ordering: o, ..SolverOptions::default() };
                if let Ok(r) = solve(&l, m, &opts) {
                    if r.converged {
                        sols.push((m, o, r.rho));
                    }
                }
            }
        }
        assert!(sols.len() >= 9, "{system}: only {} converged", sols.len());
        for (m, o, rho) in &sols {
            let d = max_abs(rho, &sols[0].2);
            assert!(d <= 1e-9, "{system} {m}/{o}: {d}");
        }
    }
}

#[test]
fn spin_chain_gmres_matches_direct() {
    let l = model(System::SpinChain, 4);
    let direct = solve(&l, Method::Direct, &SolverOptions::default()).unwrap();
    let it = solve(&l, Method::Gmres, &SolverOptions::default()).unwrap();
    assert!(it.converged);
    assert!(max_abs(&direct.rho, &it.rho) <= 1e-10);
}

#[test]
fn jc_gmres_with_rcm_reaches_tight_tolerance() {
    let l = model(System::JaynesCummings, 8);
    let r = solve(&l, Method::Gmres, &SolverOptions::default()).unwrap();
    assert!(r.converged, "{} iterations, residual {}", r.iterations, r.residual);
    assert!(r.residual <= 1e-12);
}

#[test]
fn tighter_tolerance_never_raises_the_residual() {
    let l = model(System::JaynesCummings, 4);
    for m in [Method::Gmres, Method::Bicgstab] {
        let res: Vec<f64> = [1e-8, 1e-11, 1e-14]
            .iter()
            .map(|&tol| solve(&l, m, &SolverOptions { tol, ..SolverOptions::default() }).unwrap().residual)
            .collect();
        assert!(res[1] <= res[0] && res[2] <= res[1], "{m}: {res:?}");
    }
}

#[test]
fn rcm_preconditioner_is_better_conditioned_than_column_ordering() {
    let l = model(System::SpinChain, 6);
    let est = |o| {
        solve(&l, Method::Gmres, &SolverOptions { ordering: o, max_iter: 1, ..SolverOptions::default() })
            .unwrap()
            .condest
            .unwrap()
    };
    let (rcm, cmd) = (est(Ordering::Rcm), est(Ordering::Cmd));
    assert!(rcm.is_finite() && rcm < cmd, "rcm {rcm:e}, cmd {cmd:e}");
}

#[test]
fn every_model_result_passes_validation() {
    for (system, size) in [(System::JaynesCummings, 4), (System::SpinChain, 3), (System::Optomechanical, 2)] {
        let l = model(system, size);
        let r = solve(&l, Method::Direct, &SolverOptions::default()).unwrap();
        let report = validate(&r.rho, &l, &ValidationOptions::default()).unwrap();
        assert!(report.passed(), "{system}\n{report}");
    }
}
