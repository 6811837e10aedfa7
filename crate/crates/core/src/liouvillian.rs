//! Vectorized Lindblad superoperators and their solver-ready variants.
//!
//! With column stacking, `vec(A X B) = (B^T ⊗ A) vec(X)`, so left
//! multiplication by `A` is `I ⊗ A` and right multiplication by `B` is
//! `B^T ⊗ I`. The Lindblad generator (hbar = 1)
//!
//! ```text
//! L[rho] = -i[H, rho] + sum_k ( C_k rho C_k^† - 1/2 {C_k^† C_k, rho} )
//! ```
//!
//! therefore has the matrix
//!
//! ```text
//! -i (I⊗H - H^T⊗I) + sum_k [ conj(C_k)⊗C_k - 1/2 I⊗(C_k^†C_k) - 1/2 (C_k^†C_k)^T⊗I ]
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::QuantumOperator;
use crate::sparse::{SparseComplexMatrix, ONE};

/// Tolerance on `max |H - H^†|` accepted by [`build_liouvillian`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalue shift used by the inverse-power method.
pub const DEFAULT_SIGMA: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Variant {
    /// The bare generator `L`.
    Plain,
    /// `L - sigma I`.
    Shifted { sigma: Complex64 },
    /// `L + w T`, with `T` enforcing unit trace from row 0.
    Modified { weight: f64 },
}

/// How the default trace weight `w` is derived from the diagonal of `L`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WeightRule {
    /// Mean of `|L_ii|`.
    #[default]
    MeanAbsDiagonal,
    /// `|mean(L_ii)|`.
    MeanSignedDiagonal,
}

#[derive(Clone, Debug)]
pub struct LiouvillianSystem {
    matrix: SparseComplexMatrix,
    hilbert_dim: usize,
    variant: Variant,
    rhs: Option<Vec<Complex64>>,
}

/// Builds the plain Lindblad superoperator for `h` and the collapse operators.
pub fn build_liouvillian(h: &QuantumOperator, c_ops: &[QuantumOperator]) -> Result<LiouvillianSystem> {
    let deviation = h.matrix().hermitian_deviation()?;
    if deviation > HERMITIAN_TOL {
        return Err(Error::NonHermitian { deviation });
    }
    for c in c_ops {
        if c.dims() != h.dims() {
            return Err(Error::invalid(format!(
                "collapse operator dims {:?} differ from Hamiltonian dims {:?}",
                c.dims(),
                h.dims()
            )));
        }
    }
    let d = h.dim();
    let id = SparseComplexMatrix::identity(d);
    let hm = h.matrix();
    let minus_i = Complex64::new(0.0, -1.0);

    let left = SparseComplexMatrix::kron(&id, hm)?;
    let right = SparseComplexMatrix::kron(&hm.transpose(), &id)?;
    let mut l = SparseComplexMatrix::add(&left, &right, minus_i, -minus_i)?;

    for c in c_ops {
        let cm = c.matrix();
        let cdc = SparseComplexMatrix::matmul(&cm.adjoint(), cm)?;
        let jump = SparseComplexMatrix::kron(&cm.conjugate(), cm)?;
        let anti_left = SparseComplexMatrix::kron(&id, &cdc)?;
        let anti_right = SparseComplexMatrix::kron(&cdc.transpose(), &id)?;
        let anti = SparseComplexMatrix::add(&anti_left, &anti_right, ONE, ONE)?;
        let dissipator = SparseComplexMatrix::add(&jump, &anti, ONE, Complex64::new(-0.5, 0.0))?;
        l = SparseComplexMatrix::add(&l, &dissipator, ONE, ONE)?;
    }
    Ok(LiouvillianSystem { matrix: l, hilbert_dim: d, variant: Variant::Plain, rhs: None })
}

impl LiouvillianSystem {
    /// Wraps a prebuilt generator matrix acting on vectorized `D x D` operators.
    pub fn from_matrix(matrix: SparseComplexMatrix, hilbert_dim: usize) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NonSquare { nrows: matrix.nrows(), ncols: matrix.ncols() });
        }
        if hilbert_dim.checked_mul(hilbert_dim) != Some(matrix.nrows()) {
            return Err(Error::invalid(format!("superoperator side {} is not {hilbert_dim}^2", matrix.nrows())));
        }
        Ok(LiouvillianSystem { matrix, hilbert_dim, variant: Variant::Plain, rhs: None })
    }

    pub fn matrix(&self) -> &SparseComplexMatrix {
        &self.matrix
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    /// Side of the superoperator matrix, `D^2`.
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Right-hand side `(w, 0, ..., 0)` of the modified variant.
    pub fn rhs(&self) -> Option<&[Complex64]> {
        self.rhs.as_deref()
    }

    fn require_plain(&self, what: &str) -> Result<()> {
        if self.variant != Variant::Plain {
            return Err(Error::invalid(format!("{what} requires a plain Liouvillian")));
        }
        Ok(())
    }

    /// `L - sigma I`, with every diagonal position stored.
    pub fn shift(&self, sigma: Complex64) -> Result<Self> {
        self.require_plain("shift")?;
        if sigma == Complex64::new(0.0, 0.0) || !sigma.is_finite() {
            return Err(Error::invalid("shift sigma must be finite and nonzero"));
        }
        let n = self.size();
        let id = SparseComplexMatrix::identity(n);
        let matrix = SparseComplexMatrix::add(&self.matrix, &id, ONE, -sigma)?;
        Ok(LiouvillianSystem { matrix, hilbert_dim: self.hilbert_dim, variant: Variant::Shifted { sigma }, rhs: None })
    }

    /// Column indices of the diagonal elements of `vec(rho)`.
    pub fn trace_columns(&self) -> impl Iterator<Item = usize> {
        let d = self.hilbert_dim;
        (0..d).map(move |k| k * (d + 1))
    }

    /// `L + w T`, where `T` has ones in row 0 at the trace columns, together
    /// with the right-hand side `(w, 0, ..., 0)`.
    pub fn modified(&self, weight: f64) -> Result<Self> {
        self.require_plain("modified")?;
        if !weight.is_finite() || weight <= 0.0 {
            return Err(Error::invalid("trace weight must be positive and finite"));
        }
        let n = self.size();
        let triplets: Vec<_> = self.trace_columns().map(|j| (0, j, ONE)).collect();
        let t = SparseComplexMatrix::from_triplets(n, n, &triplets)?;
        let matrix = SparseComplexMatrix::add(&self.matrix, &t, ONE, Complex64::new(weight, 0.0))?;
        let mut rhs = vec![Complex64::new(0.0, 0.0); n];
        if n > 0 {
            rhs[0] = Complex64::new(weight, 0.0);
        }
        Ok(LiouvillianSystem {
            matrix,
            hilbert_dim: self.hilbert_dim,
            variant: Variant::Modified { weight },
            rhs: Some(rhs),
        })
    }

    /// Trace weight derived from the diagonal of the plain generator.
    pub fn default_weight(&self, rule: WeightRule) -> f64 {
        let diag = self.matrix.diagonal();
        if diag.is_empty() {
            return 1.0;
        }
        let n = diag.len() as f64;
        let w = match rule {
            WeightRule::MeanAbsDiagonal => diag.iter().map(|v| v.norm()).sum::<f64>() / n,
            WeightRule::MeanSignedDiagonal => (diag.iter().sum::<Complex64>() / n).norm(),
        };
        if w > 0.0 && w.is_finite() {
            w
        } else {
            1.0
        }
    }
}
