//! Dense complex linear algebra on small Hilbert spaces (n <= 14 qubits).
//!
//! Everything here is a pure function of immutable inputs: tensor products,
//! Hermitian matrix exponentials, and expectation values over statevectors.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex<f64>;

pub const ZERO: C64 = Complex::new(0.0, 0.0);
pub const ONE: C64 = Complex::new(1.0, 0.0);
pub const I: C64 = Complex::new(0.0, 1.0);

fn qubits_of_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    let n = dim.trailing_zeros() as usize;
    if n > tol::MAX_QUBITS {
        return Err(Error::TooManyQubits(n, tol::MAX_QUBITS));
    }
    Ok(n)
}

/// Pure state on `n_qubits` qubits, stored as a dense amplitude vector of
/// length `2^n`. Qubit 0 is the most significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<C64>,
    n_qubits: usize,
}

impl StateVector {
    /// |0...0> on `n_qubits` qubits.
    pub fn zero_state(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        let mut amps = DVector::from_element(dim, ZERO);
        amps[0] = ONE;
        StateVector { amps, n_qubits }
    }

    /// Build from raw amplitudes; the length must be a power of two and the
    /// norm must already be 1 within the structural tolerance.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_of_dim(amps.len())?;
        let amps = DVector::from_vec(amps);
        let norm = amps.norm();
        if (norm - 1.0).abs() > tol::STRUCTURAL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { amps, n_qubits })
    }

    /// Tensor product of normalized single-qubit factors.
    pub fn product_state(factors: &[[C64; 2]]) -> Result<Self> {
        let n = factors.len();
        if n > tol::MAX_QUBITS {
            return Err(Error::TooManyQubits(n, tol::MAX_QUBITS));
        }
        let mut amps = vec![ONE];
        for f in factors {
            let mut next = Vec::with_capacity(amps.len() * 2);
            for a in &amps {
                next.push(a * f[0]);
                next.push(a * f[1]);
            }
            amps = next;
        }
        Self::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amps.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// <self|other>.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub(crate) fn vector(&self) -> &DVector<C64> {
        &self.amps
    }

    pub(crate) fn from_vector_unchecked(amps: DVector<C64>, n_qubits: usize) -> Self {
        StateVector { amps, n_qubits }
    }
}

/// Dense `2^n x 2^n` complex operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    mat: DMatrix<C64>,
    n_qubits: usize,
}

impl DenseOperator {
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(mat.nrows(), mat.ncols()));
        }
        let n_qubits = qubits_of_dim(mat.nrows())?;
        Ok(DenseOperator { mat, n_qubits })
    }

    pub fn identity(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        DenseOperator {
            mat: DMatrix::identity(dim, dim),
            n_qubits,
        }
    }

    pub fn zeros(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        DenseOperator {
            mat: DMatrix::from_element(dim, dim, ZERO),
            n_qubits,
        }
    }

    /// Rank-1 projector |psi><psi|.
    pub fn outer(state: &StateVector) -> Self {
        DenseOperator {
            mat: state.vector() * state.vector().adjoint(),
            n_qubits: state.n_qubits(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn dagger(&self) -> Self {
        DenseOperator {
            mat: self.mat.adjoint(),
            n_qubits: self.n_qubits,
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn scale(&self, c: C64) -> Self {
        DenseOperator {
            mat: &self.mat * c,
            n_qubits: self.n_qubits,
        }
    }

    /// Largest entrywise absolute value.
    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise absolute difference to `other`.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        (&self.mat - &other.mat)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        self.max_abs_diff(&self.dagger()) <= tolerance
    }

    pub fn is_unitary(&self, tolerance: f64) -> bool {
        let prod = self.mat.adjoint() * &self.mat;
        let id = DMatrix::<C64>::identity(self.dim(), self.dim());
        (prod - id).iter().map(|c| c.norm()).fold(0.0, f64::max) <= tolerance
    }

    pub fn is_projector(&self, tolerance: f64) -> bool {
        let sq = &self.mat * &self.mat;
        (sq - &self.mat).iter().map(|c| c.norm()).fold(0.0, f64::max) <= tolerance
    }

    /// Apply to a state: |out> = M |psi>. Panics on dimension mismatch;
    /// callers validate dimensions at construction time.
    pub fn apply(&self, state: &StateVector) -> StateVector {
        assert_eq!(self.dim(), state.dim(), "operator/state dimension mismatch");
        StateVector::from_vector_unchecked(&self.mat * state.vector(), state.n_qubits())
    }
}

impl std::ops::Add for &DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim(), rhs.dim());
        DenseOperator {
            mat: &self.mat + &rhs.mat,
            n_qubits: self.n_qubits,
        }
    }
}

impl std::ops::Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim(), rhs.dim());
        DenseOperator {
            mat: &self.mat - &rhs.mat,
            n_qubits: self.n_qubits,
        }
    }
}

impl std::ops::Mul for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim(), rhs.dim());
        DenseOperator {
            mat: &self.mat * &rhs.mat,
            n_qubits: self.n_qubits,
        }
    }
}

/// Single-qubit Pauli and identity matrices.
pub mod pauli {
    use super::{C64, DenseOperator, I, ONE, ZERO};
    use nalgebra::DMatrix;

    fn op(entries: [C64; 4]) -> DenseOperator {
        DenseOperator::from_matrix(DMatrix::from_row_slice(2, 2, &entries)).unwrap()
    }

    pub fn i2() -> DenseOperator {
        op([ONE, ZERO, ZERO, ONE])
    }

    pub fn x() -> DenseOperator {
        op([ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> DenseOperator {
        op([ZERO, -I, I, ZERO])
    }

    pub fn z() -> DenseOperator {
        op([ONE, ZERO, ZERO, -ONE])
    }
}

/// Tensor product a (x) b.
pub fn kron(a: &DenseOperator, b: &DenseOperator) -> Result<DenseOperator> {
    let n = a.n_qubits() + b.n_qubits();
    if n > tol::MAX_QUBITS {
        return Err(Error::TooManyQubits(n, tol::MAX_QUBITS));
    }
    Ok(DenseOperator {
        mat: a.matrix().kronecker(b.matrix()),
        n_qubits: n,
    })
}

/// Embed a single-qubit operator at `site` of an `n_total`-qubit space,
/// identity elsewhere. Site 0 is the leftmost factor.
pub fn embed_single(op: &DenseOperator, site: usize, n_total: usize) -> Result<DenseOperator> {
    if op.n_qubits() != 1 {
        return Err(Error::DimensionMismatch(op.dim(), 2));
    }
    if site >= n_total {
        return Err(Error::QubitOutOfRange(site, n_total));
    }
    let mut out = if site == 0 {
        op.clone()
    } else {
        DenseOperator::identity(site)
    };
    if site > 0 {
        out = kron(&out, op)?;
    }
    if n_total > site + 1 {
        out = kron(&out, &DenseOperator::identity(n_total - site - 1))?;
    }
    Ok(out)
}

/// Hermitian eigendecomposition, shared by the matrix exponential and the
/// sweep hot path (which reuses one decomposition across many times).
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<C64>,
    n_qubits: usize,
}

impl HermitianEigen {
    pub fn new(h: &DenseOperator) -> Result<Self> {
        let dev = h.max_abs_diff(&h.dagger());
        if dev > tol::STRUCTURAL {
            return Err(Error::NotHermitian(dev));
        }
        let eig = h.matrix().clone().symmetric_eigen();
        Ok(HermitianEigen {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
            n_qubits: h.n_qubits(),
        })
    }

    /// e^{i H t} from the stored decomposition.
    pub fn exp_i(&self, t: f64) -> DenseOperator {
        let phases = DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&w| C64::from_polar(1.0, w * t)),
        );
        let mat = &self.vectors * DMatrix::from_diagonal(&phases) * self.vectors.adjoint();
        DenseOperator {
            mat,
            n_qubits: self.n_qubits,
        }
    }
}

/// e^{i h t} for Hermitian `h`, via eigendecomposition. Unitary to machine
/// precision by construction.
pub fn matexp_i(h: &DenseOperator, t: f64) -> Result<DenseOperator> {
    Ok(HermitianEigen::new(h)?.exp_i(t))
}

/// <psi| op |psi>.
pub fn expectation(state: &StateVector, op: &DenseOperator) -> Result<C64> {
    if state.dim() != op.dim() {
        return Err(Error::DimensionMismatch(state.dim(), op.dim()));
    }
    Ok(state.vector().dotc(&(op.matrix() * state.vector())))
}
