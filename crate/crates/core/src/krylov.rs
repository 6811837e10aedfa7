//! Restarted GMRES and BiCGSTAB with optional left preconditioning by LU
//! factors: both solve `M⁻¹ A x = M⁻¹ b` starting from `x = 0`.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::factor::{solve_lu, LUFactors};
use crate::sparse::{dotc, norm2, SparseComplexMatrix, ZERO};

pub const DEFAULT_MAX_ITER: usize = 1000;
pub const DEFAULT_RESTART: usize = 20;

#[derive(Clone, Copy, Debug)]
pub struct IterOptions<'a> {
    /// Relative tolerance on the preconditioned residual (2-norm).
    pub tol: f64,
    pub max_iter: usize,
    /// GMRES restart length; ignored by BiCGSTAB.
    pub restart: usize,
    pub preconditioner: Option<&'a LUFactors>,
    /// Record `(iteration, residual)` pairs.
    pub trace: bool,
}

impl Default for IterOptions<'_> {
    fn default() -> Self {
        IterOptions {
            tol: 1e-10,
            max_iter: DEFAULT_MAX_ITER,
            restart: DEFAULT_RESTART,
            preconditioner: None,
            trace: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IterResult {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    /// Relative preconditioned residual that drove the stopping test.
    pub residual_estimate: f64,
    /// Recomputed `‖b - A x‖₂ / ‖b‖₂`.
    pub final_residual: f64,
    /// Stopping test met and the true residual is within ten times `tol`.
    pub converged: bool,
    pub breakdown: bool,
    pub trace: Option<Vec<(usize, f64)>>,
}

/// Factor allowed between the requested tolerance and the true residual of
/// a converged solve.
pub const TRUE_RESIDUAL_SLACK: f64 = 10.0;

struct Problem<'a> {
    a: &'a SparseComplexMatrix,
    m: Option<&'a LUFactors>,
}

impl Problem<'_> {
    fn precondition(&self, v: Vec<Complex64>) -> Result<Vec<Complex64>> {
        match self.m {
            Some(f) => solve_lu(f, &v),
            None => Ok(v),
        }
    }

    /// `M⁻¹ A v`.
    fn apply(&self, v: &[Complex64], buf: &mut Vec<Complex64>) -> Result<Vec<Complex64>> {
        buf.resize(v.len(), ZERO);
        self.a.matvec_into(v, buf);
        self.precondition(buf.clone())
    }

    fn residual(&self, b: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
        let mut r = vec![ZERO; b.len()];
        self.a.matvec_into(x, &mut r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        r
    }
}

fn check(a: &SparseComplexMatrix, b: &[Complex64], opts: &IterOptions) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NonSquare { nrows: a.nrows(), ncols: a.ncols() });
    }
    if b.len() != a.nrows() {
        return Err(Error::LengthMismatch { expected: a.nrows(), found: b.len() });
    }
    if let Some(m) = opts.preconditioner {
        if m.size() != a.nrows() {
            return Err(Error::LengthMismatch { expected: a.nrows(), found: m.size() });
        }
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 || opts.max_iter == 0 || opts.restart == 0 {
        return Err(Error::invalid("need tol > 0, max_iter >= 1 and restart >= 1"));
    }
    Ok(())
}

fn zero_rhs(n: usize, trace: bool) -> IterResult {
    IterResult {
        x: vec![ZERO; n],
        iterations: 0,
        residual_estimate: 0.0,
        final_residual: 0.0,
        converged: true,
        breakdown: false,
        trace: trace.then(Vec::new),
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    p: &Problem,
    b: &[Complex64],
    x: Vec<Complex64>,
    iterations: usize,
    estimate: f64,
    breakdown: bool,
    tol: f64,
    trace: Option<Vec<(usize, f64)>>,
) -> IterResult {
    let final_residual = norm2(&p.residual(b, &x)) / norm2(b);
    let converged = estimate <= tol && final_residual <= TRUE_RESIDUAL_SLACK * tol;
    IterResult { x, iterations, residual_estimate: estimate, final_residual, converged, breakdown, trace }
}

fn axpy(y: &mut [Complex64], alpha: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Restarted GMRES(m) with modified Gram-Schmidt Arnoldi and complex Givens
/// rotations. Each cycle restarts from the current iterate.
pub fn gmres(a: &SparseComplexMatrix, b: &[Complex64], opts: &IterOptions) -> Result<IterResult> {
    check(a, b, opts)?;
    let n = b.len();
    if norm2(b) == 0.0 {
        return Ok(zero_rhs(n, opts.trace));
    }
    let p = Problem { a, m: opts.preconditioner };
    let bnorm = norm2(&p.precondition(b.to_vec())?);
    let m = opts.restart.min(n.max(1));
    let mut x = vec![ZERO; n];
    let mut buf = Vec::new();
    let mut trace = opts.trace.then(Vec::new);
    let mut iterations = 0;
    let mut estimate;
    let mut breakdown = false;

    loop {
        let r = p.precondition(p.residual(b, &x))?;
        let beta = norm2(&r);
        estimate = beta / bnorm;
        if !estimate.is_finite() {
            breakdown = true;
            break;
        }
        if estimate <= opts.tol || iterations >= opts.max_iter {
            break;
        }

        let mut v: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
        v.push(r.iter().map(|z| z / beta).collect());
        let mut h = vec![vec![ZERO; m]; m + 1];
        let mut cs = vec![0.0f64; m];
        let mut sn = vec![ZERO; m];
        let mut g = vec![ZERO; m + 1];
        g[0] = Complex64::new(beta, 0.0);
        let mut k = 0;
        let mut happy = false;

        for j in 0..m {
            iterations += 1;
            let mut w = p.apply(&v[j], &mut buf)?;
            let w0 = norm2(&w);
            for i in 0..=j {
                let hij = dotc(&v[i], &w);
                h[i][j] = hij;
                axpy(&mut w, -hij, &v[i]);
            }
            let hnext = norm2(&w);
            h[j + 1][j] = Complex64::new(hnext, 0.0);

            for i in 0..j {
                let (c, s) = (cs[i], sn[i]);
                let t = c * h[i][j] + s * h[i + 1][j];
                h[i + 1][j] = -s.conj() * h[i][j] + c * h[i + 1][j];
                h[i][j] = t;
            }
            let (c, s, rr) = givens(h[j][j], h[j + 1][j]);
            cs[j] = c;
            sn[j] = s;
            h[j][j] = rr;
            h[j + 1][j] = ZERO;
            g[j + 1] = -s.conj() * g[j];
            g[j] = c * g[j];

            k = j + 1;
            estimate = g[j + 1].norm() / bnorm;
            if let Some(t) = trace.as_mut() {
                t.push((iterations, estimate));
            }
            if !estimate.is_finite() || !hnext.is_finite() {
                breakdown = true;
                break;
            }
            if hnext <= f64::EPSILON * w0 {
                happy = true;
                break;
            }
            if estimate <= opts.tol || iterations >= opts.max_iter {
                break;
            }
            v.push(w.iter().map(|z| z / hnext).collect());
        }

        // Back substitution on the rotated Hessenberg system.
        let mut y = vec![ZERO; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for l in i + 1..k {
                s -= h[i][l] * y[l];
            }
            y[i] = s / h[i][i];
        }
        for (i, yi) in y.iter().enumerate() {
            axpy(&mut x, *yi, &v[i]);
        }
        if breakdown || happy {
            if !breakdown {
                estimate = norm2(&p.precondition(p.residual(b, &x))?) / bnorm;
            }
            break;
        }
    }
    Ok(finish(&p, b, x, iterations, estimate, breakdown, opts.tol, trace))
}

/// Rotation `[c, s; -conj(s), c]` zeroing `b` against `a`; returns `(c, s, r)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64, Complex64) {
    let an = a.norm();
    let r = an.hypot(b.norm());
    if an == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0), b);
    }
    let phase = a / an;
    (an / r, phase * b.conj() / r, phase * r)
}

/// BiCGSTAB on the left-preconditioned system. A vanishing shadow inner
/// product or stabilization step sets `breakdown` and stops.
pub fn bicgstab(a: &SparseComplexMatrix, b: &[Complex64], opts: &IterOptions) -> Result<IterResult> {
    check(a, b, opts)?;
    let n = b.len();
    if norm2(b) == 0.0 {
        return Ok(zero_rhs(n, opts.trace));
    }
    let p = Problem { a, m: opts.preconditioner };
    let mut r = p.precondition(b.to_vec())?;
    let bnorm = norm2(&r);
    let r_hat = r.clone();
    let r_hat_norm = bnorm;
    let mut x = vec![ZERO; n];
    let mut dir = vec![ZERO; n];
    let mut v = vec![ZERO; n];
    let mut buf = Vec::new();
    let (mut rho, mut alpha, mut omega) =
        (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    let mut trace = opts.trace.then(Vec::new);
    let mut estimate = 1.0;
    let mut breakdown = false;
    let mut iterations = 0;
    let eps = f64::EPSILON;

    while iterations < opts.max_iter {
        iterations += 1;
        let rho_new = dotc(&r_hat, &r);
        if rho_new.norm() <= eps * r_hat_norm * norm2(&r) {
            breakdown = true;
            break;
        }
        if iterations == 1 {
            dir.copy_from_slice(&r);
        } else {
            let beta = (rho_new / rho) * (alpha / omega);
            for ((d, ri), vi) in dir.iter_mut().zip(&r).zip(&v) {
                *d = ri + beta * (*d - omega * vi);
            }
        }
        v = p.apply(&dir, &mut buf)?;
        let rv = dotc(&r_hat, &v);
        if rv.norm() <= eps * r_hat_norm * norm2(&v) {
            breakdown = true;
            break;
        }
        alpha = rho_new / rv;
        let mut s = r.clone();
        axpy(&mut s, -alpha, &v);
        let snorm = norm2(&s) / bnorm;
        if snorm <= opts.tol {
            axpy(&mut x, alpha, &dir);
            estimate = snorm;
            if let Some(t) = trace.as_mut() {
                t.push((iterations, estimate));
            }
            break;
        }
        let t = p.apply(&s, &mut buf)?;
        let tt = dotc(&t, &t).re;
        if tt == 0.0 {
            breakdown = true;
            break;
        }
        omega = dotc(&t, &s) / tt;
        axpy(&mut x, alpha, &dir);
        axpy(&mut x, omega, &s);
        r = s;
        axpy(&mut r, -omega, &t);
        estimate = norm2(&r) / bnorm;
        if let Some(tr) = trace.as_mut() {
            tr.push((iterations, estimate));
        }
        if !estimate.is_finite() {
            breakdown = true;
            break;
        }
        if estimate <= opts.tol {
            break;
        }
        if omega == ZERO {
            breakdown = true;
            break;
        }
        rho = rho_new;
    }
    Ok(finish(&p, b, x, iterations, estimate, breakdown, opts.tol, trace))
}

/// Writes a residual trace as CSV with header `iteration,residual`.
pub fn write_trace<W: Write>(trace: &[(usize, f64)], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["iteration", "residual"])?;
    for (i, r) in trace {
        out.write_record([i.to_string(), format!("{r:.16e}")])?;
    }
    out.flush()?;
    Ok(())
}
