//! Steady-state solvers built on the Liouvillian variants, plus a dense
//! reference solution and a physicality report.
//!
//! Every solver returns a density matrix normalized to unit trace and made
//! exactly Hermitian, with the residual measured against the plain
//! Liouvillian.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{condest, ilutp, lu_with, solve_lu, LUFactors, LuOptions, DEFAULT_DROP_TOL, DEFAULT_FILL_LIMIT};
use crate::krylov::{bicgstab, gmres, IterOptions, IterResult, DEFAULT_MAX_ITER, DEFAULT_RESTART};
use crate::liouvillian::{LiouvillianSystem, Variant, WeightRule, DEFAULT_SIGMA};
use crate::ordering::{band_profile, col_min_degree, rcm, weighted_mbm, BandProfile};
use crate::sparse::{norm2, unvec, vec_dense, Permutation, SparseComplexMatrix, ZERO};

/// Largest Hilbert dimension accepted by the dense reference solver.
pub const DENSE_ORACLE_MAX_DIM: usize = 12;
/// Largest Hilbert dimension for the dense eigenvalue check in [`validate`].
pub const EIGEN_CHECK_MAX_DIM: usize = 64;
/// Singular values below this fraction of the largest count as zero.
pub const NULL_SPACE_RTOL: f64 = 1e-10;

macro_rules! token_enum {
    ($name:ident { $($variant:ident => $tok:literal),+ $(,)? }) => {
        impl $name {
            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $tok),+ }
            }
        }
        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
        impl FromStr for $name {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim() {
                    $($tok => Ok($name::$variant),)+
                    other => Err(Error::invalid(format!(concat!("unknown ", stringify!($name), " '{}'"), other))),
                }
            }
        }
    };
}

/// Reordering applied before factorization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ordering {
    Natural,
    /// Reverse Cuthill-McKee, applied symmetrically.
    Rcm,
    /// Column minimum degree, preceded by a matching when the diagonal has
    /// structural zeros.
    Cmd,
}

token_enum!(Ordering { Natural => "natural", Rcm => "rcm", Cmd => "cmd" });

impl Ordering {
    pub const ALL: [Ordering; 3] = [Ordering::Natural, Ordering::Rcm, Ordering::Cmd];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// LU of the trace-modified Liouvillian.
    Direct,
    /// GMRES on the trace-modified Liouvillian with an iLUTP preconditioner.
    Gmres,
    /// BiCGSTAB on the trace-modified Liouvillian with an iLUTP preconditioner.
    Bicgstab,
    /// Inverse power iteration with LU of the shifted Liouvillian.
    Power,
    /// Inverse power iteration with inner preconditioned GMRES solves.
    PowerGmres,
    /// Inverse power iteration with inner preconditioned BiCGSTAB solves.
    PowerBicgstab,
}

token_enum!(Method {
    Direct => "direct",
    Gmres => "gmres",
    Bicgstab => "bicgstab",
    Power => "power",
    PowerGmres => "power-gmres",
    PowerBicgstab => "power-bicgstab",
});

impl Method {
    pub const ALL: [Method; 6] =
        [Method::Direct, Method::Gmres, Method::Bicgstab, Method::Power, Method::PowerGmres, Method::PowerBicgstab];

    /// True for the inverse-power methods, which use the shifted Liouvillian.
    pub fn is_power(self) -> bool {
        matches!(self, Method::Power | Method::PowerGmres | Method::PowerBicgstab)
    }

    /// Krylov solver used, if any.
    pub fn krylov(self) -> Option<KrylovSolver> {
        match self {
            Method::Gmres | Method::PowerGmres => Some(KrylovSolver::Gmres),
            Method::Bicgstab | Method::PowerBicgstab => Some(KrylovSolver::Bicgstab),
            Method::Direct | Method::Power => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KrylovSolver {
    Gmres,
    Bicgstab,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub ordering: Ordering,
    /// Linear-solve tolerance, or outer tolerance for inverse power.
    pub tol: f64,
    /// iLUTP drop tolerance.
    pub drop_tol: f64,
    /// iLUTP fill limit.
    pub fill: f64,
    pub restart: usize,
    pub max_iter: usize,
    pub sigma: f64,
    /// Trace weight; derived from the diagonal when `None`.
    pub weight: Option<f64>,
    pub weight_rule: WeightRule,
    pub seed: u64,
    pub max_outer: usize,
    /// Refuse complete factorizations with more stored entries than this.
    pub max_factor_nnz: Option<usize>,
    pub trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            ordering: Ordering::Rcm,
            tol: 1e-14,
            drop_tol: DEFAULT_DROP_TOL,
            fill: DEFAULT_FILL_LIMIT,
            restart: DEFAULT_RESTART,
            max_iter: DEFAULT_MAX_ITER,
            sigma: DEFAULT_SIGMA,
            weight: None,
            weight_rule: WeightRule::default(),
            seed: 12345,
            max_outer: 50,
            max_factor_nnz: Some(40_000_000),
            trace: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SteadyStateResult {
    pub rho: DMatrix<Complex64>,
    pub method: Method,
    pub ordering: Ordering,
    /// `‖L vec(rho)‖₂` with the plain Liouvillian.
    pub residual: f64,
    /// Krylov iterations (summed over outer steps for inverse power).
    pub iterations: usize,
    /// Outer inverse-power iterations; zero for linear solves.
    pub outer_iterations: usize,
    pub converged: bool,
    pub breakdown: bool,
    pub fill_factor: f64,
    /// Stored entries of `L` and `U`.
    pub factor_nnz: usize,
    pub condest: Option<f64>,
    pub weight: Option<f64>,
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
    /// Band/profile of the system matrix before and after reordering.
    pub band_before: BandProfile,
    pub band_after: BandProfile,
    /// Seconds spent forming the solver's system and ordering it.
    pub build_time: f64,
    pub factor_time: f64,
    pub solve_time: f64,
    pub trace: Option<Vec<(usize, f64)>>,
}

/// A system matrix reordered for factorization. `matrix` has rows permuted
/// by `rows` and columns by `cols`; `col_order` is applied during
/// factorization.
#[derive(Clone, Debug)]
pub struct Reordered {
    pub rows: Permutation,
    pub cols: Permutation,
    pub matrix: SparseComplexMatrix,
    pub col_order: Permutation,
    pub before: BandProfile,
    pub after: BandProfile,
}

/// Applies `ordering` to `a` the way the solvers do.
pub fn reorder(a: &SparseComplexMatrix, ordering: Ordering) -> Result<Reordered> {
    let n = a.nrows();
    let before = band_profile(a)?;
    let id = Permutation::identity(n);
    let (rows, cols, matrix, col_order) = match ordering {
        Ordering::Natural => (id.clone(), id.clone(), a.clone(), id),
        Ordering::Rcm => {
            let p = rcm(a)?;
            let m = a.permute(&p, &p)?;
            (p.clone(), p, m, id)
        }
        Ordering::Cmd => {
            let r = if a.structural_zero_diagonal_count() > 0 { weighted_mbm(a)? } else { id.clone() };
            let m = a.permute(&r, &id)?;
            let q = col_min_degree(&m)?;
            (r, id, m, q)
        }
    };
    let after = if col_order.is_identity() {
        band_profile(&matrix)?
    } else {
        band_profile(&matrix.permute(&Permutation::identity(n), &col_order)?)?
    };
    Ok(Reordered { rows, cols, matrix, col_order, before, after })
}

impl Reordered {
    /// Maps a right-hand side into the reordered system.
    pub fn to_inner(&self, b: &[Complex64]) -> Vec<Complex64> {
        self.rows.apply(b)
    }

    /// Maps a solution of the reordered system back.
    pub fn from_inner(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.cols.apply_inverse(y)
    }
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn require_plain(l: &LiouvillianSystem) -> Result<()> {
    if l.variant() != Variant::Plain {
        return Err(Error::invalid("steady-state solvers take the plain Liouvillian"));
    }
    Ok(())
}

fn check_opts(opts: &SolverOptions) -> Result<()> {
    if !opts.tol.is_finite() || opts.tol <= 0.0 {
        return Err(Error::invalid("tolerance must be positive and finite"));
    }
    if opts.max_outer == 0 {
        return Err(Error::invalid("max_outer must be at least 1"));
    }
    Ok(())
}

/// Unit trace, then exact Hermiticity, then the residual against `l`.
fn finalize(x: &[Complex64], l: &LiouvillianSystem) -> Result<(DMatrix<Complex64>, f64)> {
    let rho = normalize_state(unvec(x, l.hilbert_dim())?);
    let residual = norm2(&l.matrix().matvec(&vec_dense(&rho)?)?);
    Ok((rho, residual))
}

fn normalize_state(mut rho: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let tr = rho.trace();
    if tr.norm() > 0.0 && tr.is_finite() {
        rho /= tr;
    }
    rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let tr = rho.trace().re;
    if tr != 0.0 && tr.is_finite() {
        rho /= Complex64::new(tr, 0.0);
    }
    rho
}

fn weight_for(l: &LiouvillianSystem, opts: &SolverOptions) -> f64 {
    opts.weight.unwrap_or_else(|| l.default_weight(opts.weight_rule))
}

/// Runs `method` on the plain Liouvillian `l`.
pub fn solve(l: &LiouvillianSystem, method: Method, opts: &SolverOptions) -> Result<SteadyStateResult> {
    match method {
        Method::Direct => solve_direct(l, opts),
        Method::Gmres => solve_iterative(l, KrylovSolver::Gmres, opts),
        Method::Bicgstab => solve_iterative(l, KrylovSolver::Bicgstab, opts),
        Method::Power => inverse_power(l, None, opts),
        Method::PowerGmres => inverse_power(l, Some(KrylovSolver::Gmres), opts),
        Method::PowerBicgstab => inverse_power(l, Some(KrylovSolver::Bicgstab), opts),
    }
}

/// Complete LU of the trace-modified Liouvillian and a single solve.
pub fn solve_direct(l: &LiouvillianSystem, opts: &SolverOptions) -> Result<SteadyStateResult> {
    require_plain(l)?;
    check_opts(opts)?;
    let t = Instant::now();
    let w = weight_for(l, opts);
    let m = l.modified(w)?;
    let sys = reorder(m.matrix(), opts.ordering)?;
    let build_time = secs(t);

    let t = Instant::now();
    let f = lu_with(&sys.matrix, &sys.col_order, LuOptions { max_nnz: opts.max_factor_nnz })?;
    let factor_time = secs(t);

    let t = Instant::now();
    let rhs = m.rhs().expect("modified system has a right-hand side");
    let x = sys.from_inner(&solve_lu(&f, &sys.to_inner(rhs))?);
    let (rho, residual) = finalize(&x, l)?;
    let solve_time = secs(t);

    Ok(SteadyStateResult {
        rho,
        method: Method::Direct,
        ordering: opts.ordering,
        residual,
        iterations: 0,
        outer_iterations: 0,
        converged: residual.is_finite(),
        breakdown: false,
        fill_factor: f.fill_factor(),
        factor_nnz: f.nnz(),
        condest: None,
        weight: Some(w),
        sigma: None,
        seed: None,
        band_before: sys.before,
        band_after: sys.after,
        build_time,
        factor_time,
        solve_time,
        trace: None,
    })
}

fn krylov_solve(
    solver: KrylovSolver,
    a: &SparseComplexMatrix,
    b: &[Complex64],
    opts: &IterOptions,
) -> Result<IterResult> {
    match solver {
        KrylovSolver::Gmres => gmres(a, b, opts),
        KrylovSolver::Bicgstab => bicgstab(a, b, opts),
    }
}

/// Preconditioned Krylov solve of the trace-modified Liouvillian.
/// Non-convergence and breakdown are reported in the result, not as errors.
pub fn solve_iterative(l: &LiouvillianSystem, solver: KrylovSolver, opts: &SolverOptions) -> Result<SteadyStateResult> {
    require_plain(l)?;
    check_opts(opts)?;
    let t = Instant::now();
    let w = weight_for(l, opts);
    let m = l.modified(w)?;
    let sys = reorder(m.matrix(), opts.ordering)?;
    let build_time = secs(t);

    let t = Instant::now();
    let f = ilutp(&sys.matrix, opts.drop_tol, opts.fill, &sys.col_order)?;
    let cond = condest(&f);
    let factor_time = secs(t);

    let t = Instant::now();
    let rhs = m.rhs().expect("modified system has a right-hand side");
    let iter_opts = IterOptions {
        tol: opts.tol,
        max_iter: opts.max_iter,
        restart: opts.restart,
        preconditioner: Some(&f),
        trace: opts.trace,
    };
    let r = krylov_solve(solver, &sys.matrix, &sys.to_inner(rhs), &iter_opts)?;
    let x = sys.from_inner(&r.x);
    let (rho, residual) = finalize(&x, l)?;
    let solve_time = secs(t);

    Ok(SteadyStateResult {
        rho,
        method: match solver {
            KrylovSolver::Gmres => Method::Gmres,
            KrylovSolver::Bicgstab => Method::Bicgstab,
        },
        ordering: opts.ordering,
        residual,
        iterations: r.iterations,
        outer_iterations: 0,
        converged: r.converged,
        breakdown: r.breakdown,
        fill_factor: f.fill_factor(),
        factor_nnz: f.nnz(),
        condest: Some(cond),
        weight: Some(w),
        sigma: None,
        seed: None,
        band_before: sys.before,
        band_after: sys.after,
        build_time,
        factor_time,
        solve_time,
        trace: r.trace,
    })
}

/// Deterministic complex start vector with unit 2-norm.
pub fn start_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let s = norm2(&x);
    for v in &mut x {
        *v /= s;
    }
    x
}

/// Shifted inverse power iteration on `L - sigma I`.
///
/// With `inner = None` the shifted matrix is factored once and every step is
/// a pair of triangular solves. Otherwise each step is a Krylov solve to a
/// tenth of the outer tolerance, preconditioned by iLUTP. Iteration stops
/// when consecutive iterates agree up to a global phase or the plain
/// residual of the iterate drops below `tol`.
pub fn inverse_power(
    l: &LiouvillianSystem,
    inner: Option<KrylovSolver>,
    opts: &SolverOptions,
) -> Result<SteadyStateResult> {
    require_plain(l)?;
    check_opts(opts)?;
    let t = Instant::now();
    let sigma = Complex64::new(opts.sigma, 0.0);
    let shifted = l.shift(sigma)?;
    let sys = reorder(shifted.matrix(), opts.ordering)?;
    let build_time = secs(t);

    let t = Instant::now();
    let f: LUFactors = match inner {
        None => lu_with(&sys.matrix, &sys.col_order, LuOptions { max_nnz: opts.max_factor_nnz })?,
        Some(_) => ilutp(&sys.matrix, opts.drop_tol, opts.fill, &sys.col_order)?,
    };
    let cond = inner.map(|_| condest(&f));
    let factor_time = secs(t);

    let t = Instant::now();
    let n = l.size();
    let iter_opts = IterOptions {
        tol: opts.tol / 10.0,
        max_iter: opts.max_iter,
        restart: opts.restart,
        preconditioner: Some(&f),
        trace: opts.trace,
    };
    let mut x = start_vector(n, opts.seed);
    let mut ax = vec![ZERO; n];
    let mut inner_iterations = 0;
    let mut trace: Option<Vec<(usize, f64)>> = opts.trace.then(Vec::new);
    let mut outer = 0;
    loop {
        outer += 1;
        let y = match inner {
            None => solve_lu(&f, &sys.to_inner(&x))?,
            Some(solver) => {
                let r = krylov_solve(solver, &sys.matrix, &sys.to_inner(&x), &iter_opts)?;
                inner_iterations += r.iterations;
                if let (Some(all), Some(step)) = (trace.as_mut(), r.trace) {
                    all.extend(step.into_iter().map(|(i, v)| (inner_iterations - r.iterations + i, v)));
                }
                if r.breakdown {
                    return Err(Error::InnerSolverFailure(format!(
                        "{solver:?} broke down in outer iteration {outer} after {} iterations",
                        r.iterations
                    )));
                }
                r.x
            }
        };
        let mut v = sys.from_inner(&y);
        let s = norm2(&v);
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InnerSolverFailure(format!("non-finite iterate in outer iteration {outer}")));
        }
        // Align the global phase with the previous iterate.
        let overlap = crate::sparse::dotc(&x, &v);
        let phase = if overlap.norm() > 0.0 { overlap.conj() / overlap.norm() } else { Complex64::new(1.0, 0.0) };
        for e in &mut v {
            *e *= phase / s;
        }
        let diff = norm2(&v.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>());
        l.matrix().matvec_into(&v, &mut ax);
        let res = norm2(&ax);
        x = v;
        if diff <= opts.tol || res <= opts.tol {
            break;
        }
        if outer >= opts.max_outer {
            return Err(Error::OuterIterationLimit { iterations: outer });
        }
    }
    let (rho, residual) = finalize(&x, l)?;
    let solve_time = secs(t);

    Ok(SteadyStateResult {
        rho,
        method: match inner {
            None => Method::Power,
            Some(KrylovSolver::Gmres) => Method::PowerGmres,
            Some(KrylovSolver::Bicgstab) => Method::PowerBicgstab,
        },
        ordering: opts.ordering,
        residual,
        iterations: inner_iterations,
        outer_iterations: outer,
        converged: true,
        breakdown: false,
        fill_factor: f.fill_factor(),
        factor_nnz: f.nnz(),
        condest: cond,
        weight: None,
        sigma: Some(opts.sigma),
        seed: Some(opts.seed),
        band_before: sys.before,
        band_after: sys.after,
        build_time,
        factor_time,
        solve_time,
        trace,
    })
}

/// Dense null-space computation of the plain Liouvillian.
#[derive(Clone, Debug)]
pub struct DenseNullSpace {
    /// Singular values in ascending order.
    pub singular_values: Vec<f64>,
    /// Number of singular values at or below `NULL_SPACE_RTOL` times the largest.
    pub null_dim: usize,
    /// Unit-trace Hermitian state from the smallest singular vector.
    pub rho: DMatrix<Complex64>,
}

pub fn dense_null_space(l: &LiouvillianSystem) -> Result<DenseNullSpace> {
    let d = l.hilbert_dim();
    if d > DENSE_ORACLE_MAX_DIM {
        return Err(Error::DimensionTooLarge { dim: d, limit: DENSE_ORACLE_MAX_DIM });
    }
    let svd = l.matrix().to_dense().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let sv = svd.singular_values;
    let (imin, _) = sv.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let null_dim = sv.iter().filter(|&&s| s <= NULL_SPACE_RTOL * smax).count();
    let x: Vec<Complex64> = v_t.row(imin).iter().map(|z| z.conj()).collect();
    let rho = normalize_state(unvec(&x, d)?);
    let mut singular_values: Vec<f64> = sv.iter().cloned().collect();
    singular_values.sort_by(f64::total_cmp);
    Ok(DenseNullSpace { singular_values, null_dim, rho })
}

/// Dense reference steady state. Fails when the null space is degenerate.
pub fn dense_oracle(l: &LiouvillianSystem) -> Result<DMatrix<Complex64>> {
    require_plain(l)?;
    let ns = dense_null_space(l)?;
    if ns.null_dim > 1 {
        return Err(Error::DegenerateNullSpace { dim: ns.null_dim });
    }
    Ok(ns.rho)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationOptions {
    pub trace_tol: f64,
    pub hermitian_tol: f64,
    pub min_eigenvalue: f64,
    pub residual_tol: f64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions { trace_tol: 1e-12, hermitian_tol: 1e-10, min_eigenvalue: -1e-8, residual_tol: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Measured quantity; `None` when the check was skipped.
    pub value: Option<f64>,
    pub limit: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = match (c.value, c.passed) {
                (None, _) => "skip",
                (Some(_), true) => "pass",
                (Some(_), false) => "FAIL",
            };
            match c.value {
                Some(v) => writeln!(f, "{status:4}  {:<12} {v:.3e} (limit {:.1e})", c.name, c.limit)?,
                None => writeln!(f, "{status:4}  {:<12} -", c.name)?,
            }
        }
        Ok(())
    }
}

/// Checks unit trace, Hermiticity, positivity (dense, small dimensions
/// only), the plain-Liouvillian residual and, at small dimensions, that the
/// steady state is unique.
pub fn validate(rho: &DMatrix<Complex64>, l: &LiouvillianSystem, opts: &ValidationOptions) -> Result<ValidationReport> {
    require_plain(l)?;
    let d = l.hilbert_dim();
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::ShapeMismatch { expected: (d, d), found: rho.shape() });
    }
    let mut checks = Vec::new();

    let tr_err = (rho.trace() - Complex64::new(1.0, 0.0)).norm();
    checks.push(Check { name: "trace", passed: tr_err <= opts.trace_tol, value: Some(tr_err), limit: opts.trace_tol });

    let herm = (rho - rho.adjoint()).iter().fold(0.0f64, |m, v| m.max(v.norm()));
    checks.push(Check {
        name: "hermitian",
        passed: herm <= opts.hermitian_tol,
        value: Some(herm),
        limit: opts.hermitian_tol,
    });

    if d <= EIGEN_CHECK_MAX_DIM && herm.is_finite() {
        let h = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        let ev = h.symmetric_eigenvalues();
        let min = ev.iter().cloned().fold(f64::INFINITY, f64::min);
        checks.push(Check {
            name: "positivity",
            passed: min >= opts.min_eigenvalue,
            value: Some(min),
            limit: opts.min_eigenvalue,
        });
    } else {
        checks.push(Check { name: "positivity", passed: true, value: None, limit: opts.min_eigenvalue });
    }

    let res = norm2(&l.matrix().matvec(&vec_dense(rho)?)?);
    checks.push(Check {
        name: "residual",
        passed: res <= opts.residual_tol,
        value: Some(res),
        limit: opts.residual_tol,
    });

    if d <= DENSE_ORACLE_MAX_DIM {
        let ns = dense_null_space(l)?;
        checks.push(Check { name: "unique", passed: ns.null_dim == 1, value: Some(ns.null_dim as f64), limit: 1.0 });
    } else {
        checks.push(Check { name: "unique", passed: true, value: None, limit: 1.0 });
    }
    Ok(ValidationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::build_liouvillian;
    use crate::quantum::{spin_ops, QuantumOperator};

    fn decay(gamma: f64) -> LiouvillianSystem {
        let s = spin_ops();
        let h = QuantumOperator::zero(&[2]).unwrap();
        build_liouvillian(&h, &[s.sigma_minus.scaled(gamma.sqrt())]).unwrap()
    }

    fn ground() -> DMatrix<Complex64> {
        let mut g = DMatrix::zeros(2, 2);
        g[(1, 1)] = Complex64::new(1.0, 0.0);
        g
    }

    fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    #[test]
    fn tokens_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        for o in Ordering::ALL {
            assert_eq!(o.to_string().parse::<Ordering>().unwrap(), o);
        }
        assert!("lu".parse::<Method>().is_err());
    }

    #[test]
    fn every_method_finds_the_ground_state() {
        let l = decay(0.5);
        for method in Method::ALL {
            for ordering in Ordering::ALL {
                let opts = SolverOptions { ordering, ..Default::default() };
                let r = solve(&l, method, &opts).unwrap();
                assert!(r.converged, "{method} {ordering}");
                assert!(max_diff(&r.rho, &ground()) < 1e-12, "{method} {ordering}");
            }
        }
    }

    #[test]
    fn power_on_decay_takes_one_step() {
        let r = inverse_power(&decay(1.0), None, &SolverOptions::default()).unwrap();
        assert_eq!(r.outer_iterations, 1);
        assert_eq!(r.seed, Some(12345));
    }

    #[test]
    fn oracle_on_decay() {
        let rho = dense_oracle(&decay(0.3)).unwrap();
        assert!(max_diff(&rho, &ground()) < 1e-12);
    }

    #[test]
    fn oracle_size_limit() {
        let l = LiouvillianSystem::from_matrix(SparseComplexMatrix::identity(169), 13).unwrap();
        assert!(matches!(dense_oracle(&l), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn validation_flags_bad_trace() {
        let l = decay(0.3);
        let ok = validate(&ground(), &l, &ValidationOptions::default()).unwrap();
        assert!(ok.passed(), "{ok}");
        let bad = validate(&(ground() * Complex64::new(2.0, 0.0)), &l, &ValidationOptions::default()).unwrap();
        assert!(!bad.check("trace").unwrap().passed);
        assert!(bad.check("hermitian").unwrap().passed);
    }

    #[test]
    fn rejects_non_plain_input() {
        let l = decay(0.3).modified(1.0).unwrap();
        assert!(solve_direct(&l, &SolverOptions::default()).is_err());
    }

    #[test]
    fn start_vector_is_reproducible() {
        assert_eq!(start_vector(8, 7), start_vector(8, 7));
        assert_ne!(start_vector(8, 7), start_vector(8, 8));
        assert!((norm2(&start_vector(8, 7)) - 1.0).abs() < 1e-15);
    }
}
