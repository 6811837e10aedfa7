//! Elementary quantum operators in the Fock and spin-z bases, and their
//! embedding into tensor-product spaces.
//!
//! Spin-1/2 convention: basis index 0 is the excited state (`sigma_z = +1`),
//! index 1 the ground state, so `sigma_minus` has its single entry at `(1, 0)`.
//! Tensor factors follow the order of the `dims` list, leftmost slowest.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sparse::{SparseComplexMatrix, ONE};

/// Square sparse operator tagged with its subsystem dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumOperator {
    matrix: SparseComplexMatrix,
    dims: Vec<usize>,
}

impl QuantumOperator {
    pub fn new(matrix: SparseComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NonSquare { nrows: matrix.nrows(), ncols: matrix.ncols() });
        }
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::invalid("subsystem dimensions must be non-empty and positive"));
        }
        let side = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::DimensionOverflow(format!("{dims:?}")))?;
        if side != matrix.nrows() {
            return Err(Error::invalid(format!(
                "matrix side {} does not match product of dims {dims:?}",
                matrix.nrows()
            )));
        }
        Ok(QuantumOperator { matrix, dims })
    }

    pub fn identity(dims: &[usize]) -> Result<Self> {
        let side = dims.iter().product();
        Self::new(SparseComplexMatrix::identity(side), dims.to_vec())
    }

    pub fn zero(dims: &[usize]) -> Result<Self> {
        let side = dims.iter().product();
        Self::new(SparseComplexMatrix::zeros(side, side), dims.to_vec())
    }

    pub fn matrix(&self) -> &SparseComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SparseComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Hilbert-space dimension (matrix side).
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dag(&self) -> Self {
        QuantumOperator { matrix: self.matrix.adjoint(), dims: self.dims.clone() }
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::invalid(format!("operator dims differ: {:?} vs {:?}", self.dims, other.dims)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let m = SparseComplexMatrix::add(&self.matrix, &other.matrix, ONE, ONE)?;
        Ok(QuantumOperator { matrix: m, dims: self.dims.clone() })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let m = SparseComplexMatrix::add(&self.matrix, &other.matrix, ONE, -ONE)?;
        Ok(QuantumOperator { matrix: m, dims: self.dims.clone() })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let m = SparseComplexMatrix::matmul(&self.matrix, &other.matrix)?;
        Ok(QuantumOperator { matrix: m, dims: self.dims.clone() })
    }

    pub fn scaled(&self, alpha: impl Into<Complex64>) -> Self {
        QuantumOperator { matrix: self.matrix.scale(alpha.into()), dims: self.dims.clone() }
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }
}

// Operator arithmetic panics on mismatched dims, like nalgebra's shape checks.
// The fallible `try_*` methods are available when dims are not known statically.
impl Add for &QuantumOperator {
    type Output = QuantumOperator;
    fn add(self, rhs: Self) -> QuantumOperator {
        self.try_add(rhs).expect("operator dims must match")
    }
}

impl Sub for &QuantumOperator {
    type Output = QuantumOperator;
    fn sub(self, rhs: Self) -> QuantumOperator {
        self.try_sub(rhs).expect("operator dims must match")
    }
}

impl Mul for &QuantumOperator {
    type Output = QuantumOperator;
    fn mul(self, rhs: Self) -> QuantumOperator {
        self.try_mul(rhs).expect("operator dims must match")
    }
}

impl Mul<f64> for &QuantumOperator {
    type Output = QuantumOperator;
    fn mul(self, rhs: f64) -> QuantumOperator {
        self.scaled(rhs)
    }
}

impl Mul<Complex64> for &QuantumOperator {
    type Output = QuantumOperator;
    fn mul(self, rhs: Complex64) -> QuantumOperator {
        self.scaled(rhs)
    }
}

impl Mul<&QuantumOperator> for f64 {
    type Output = QuantumOperator;
    fn mul(self, rhs: &QuantumOperator) -> QuantumOperator {
        rhs.scaled(self)
    }
}

impl Neg for &QuantumOperator {
    type Output = QuantumOperator;
    fn neg(self) -> QuantumOperator {
        self.scaled(-1.0)
    }
}

/// Truncated bosonic annihilation operator: `a[k-1, k] = sqrt(k)`.
pub fn destroy(n: usize) -> Result<QuantumOperator> {
    if n == 0 {
        return Err(Error::invalid("destroy requires at least one Fock state"));
    }
    let triplets: Vec<_> = (1..n).map(|k| (k - 1, k, Complex64::new((k as f64).sqrt(), 0.0))).collect();
    QuantumOperator::new(SparseComplexMatrix::from_triplets(n, n, &triplets)?, vec![n])
}

/// Truncated bosonic creation operator.
pub fn create(n: usize) -> Result<QuantumOperator> {
    Ok(destroy(n)?.dag())
}

/// Number operator `a^† a`.
pub fn number(n: usize) -> Result<QuantumOperator> {
    let a = destroy(n)?;
    a.dag().try_mul(&a)
}

#[derive(Clone, Debug)]
pub struct SpinOps {
    pub sigma_x: QuantumOperator,
    pub sigma_y: QuantumOperator,
    pub sigma_z: QuantumOperator,
    pub sigma_minus: QuantumOperator,
    pub sigma_plus: QuantumOperator,
}

/// Pauli operators for a single spin-1/2 in the z basis.
pub fn spin_ops() -> SpinOps {
    let i = Complex64::new(0.0, 1.0);
    let op = |t: &[(usize, usize, Complex64)]| {
        QuantumOperator::new(SparseComplexMatrix::from_triplets(2, 2, t).unwrap(), vec![2]).unwrap()
    };
    let sigma_minus = op(&[(1, 0, ONE)]);
    let sigma_plus = sigma_minus.dag();
    let sigma_x = &sigma_minus + &sigma_plus;
    let sigma_y = op(&[(0, 1, -i), (1, 0, i)]);
    let sigma_z = op(&[(0, 0, ONE), (1, 1, -ONE)]);
    SpinOps { sigma_x, sigma_y, sigma_z, sigma_minus, sigma_plus }
}

/// Places `op` at `position` of the tensor product described by `dims`,
/// padding every other factor with the identity.
pub fn embed(op: &QuantumOperator, dims: &[usize], position: usize) -> Result<QuantumOperator> {
    if position >= dims.len() {
        return Err(Error::invalid(format!("position {position} out of range for {} subsystems", dims.len())));
    }
    if op.dims() != [dims[position]] {
        return Err(Error::invalid(format!(
            "operator dims {:?} do not match subsystem {position} of {dims:?}",
            op.dims()
        )));
    }
    let left: usize = dims[..position].iter().product();
    let right: usize = dims[position + 1..].iter().product();
    let mut m = op.matrix().clone();
    if left > 1 {
        m = SparseComplexMatrix::kron(&SparseComplexMatrix::identity(left), &m)?;
    }
    if right > 1 {
        m = SparseComplexMatrix::kron(&m, &SparseComplexMatrix::identity(right))?;
    }
    QuantumOperator::new(m, dims.to_vec())
}
