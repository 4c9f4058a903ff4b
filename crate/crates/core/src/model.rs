//! System-environment Hamiltonian, exact propagators, and the Darwinism
//! predicate.
//!
//! The model is one system qubit S (qubit 0) coupled to `N_E` environment
//! qubits:
//!
//!   H = (delta/2) X_S + (omega/2) Z_S + sum_i J_i X_S X_{E_i}
//!
//! With `omega = 0` every term commutes, the X_S eigenbasis is a pointer
//! basis, and the model supports Quantum Darwinism (at this finite size,
//! subject to the usual large-environment caveats). Any `omega > 0`
//! destroys the pointer structure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{DenseOperator, HermitianEigen, embed_single, pauli};
use crate::tol;

/// Parameters of the system-environment Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// System X-field strength (delta).
    pub delta: f64,
    /// Transverse Z-field strength (omega), >= 0.
    pub omega: f64,
    /// Couplings J_i, one per environment qubit.
    pub couplings: Vec<f64>,
}

impl ModelParams {
    pub fn new(delta: f64, omega: f64, couplings: Vec<f64>) -> Result<Self> {
        if couplings.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one environment qubit required".into(),
            ));
        }
        if 1 + couplings.len() > tol::MAX_QUBITS {
            return Err(Error::TooManyQubits(1 + couplings.len(), tol::MAX_QUBITS));
        }
        Ok(ModelParams {
            delta,
            omega,
            couplings,
        })
    }

    /// The parameter set used in the experiments: delta = J = 1, two
    /// environment qubits, omega free (default 1.5 here).
    pub fn reference() -> Self {
        ModelParams {
            delta: 1.0,
            omega: 1.5,
            couplings: vec![1.0, 1.0],
        }
    }

    pub fn with_omega(&self, omega: f64) -> Self {
        ModelParams {
            omega,
            ..self.clone()
        }
    }

    pub fn n_env(&self) -> usize {
        self.couplings.len()
    }

    pub fn n_qubits(&self) -> usize {
        1 + self.couplings.len()
    }
}

/// Assemble the full Hamiltonian as a dense Hermitian operator.
pub fn build_hamiltonian(params: &ModelParams) -> DenseOperator {
    let n = params.n_qubits();
    let xs = embed_single(&pauli::x(), 0, n).expect("system embed");
    let zs = embed_single(&pauli::z(), 0, n).expect("system embed");
    let mut h = &xs.scale((params.delta / 2.0).into()) + &zs.scale((params.omega / 2.0).into());
    for (i, &j) in params.couplings.iter().enumerate() {
        let xe = embed_single(&pauli::x(), 1 + i, n).expect("env embed");
        h = &h + &(&xs * &xe).scale(j.into());
    }
    h
}

/// Eigendecomposition of the model Hamiltonian, reusable across times.
pub fn hamiltonian_eigen(params: &ModelParams) -> HermitianEigen {
    HermitianEigen::new(&build_hamiltonian(params)).expect("model Hamiltonian is Hermitian")
}

/// Exact propagator e^{-i H t}.
pub fn propagator(params: &ModelParams, t: f64) -> DenseOperator {
    hamiltonian_eigen(params).exp_i(-t)
}

/// Heisenberg-evolve a projector: P(t) = e^{iHt} P e^{-iHt}.
pub fn heisenberg_project(proj: &DenseOperator, params: &ModelParams, t: f64) -> Result<DenseOperator> {
    if !proj.is_projector(tol::COMPOSITIONAL) {
        let sq = proj * proj;
        return Err(Error::NotProjector(sq.max_abs_diff(proj)));
    }
    if proj.n_qubits() != params.n_qubits() {
        return Err(Error::DimensionMismatch(proj.dim(), 1 << params.n_qubits()));
    }
    if t == 0.0 {
        return Ok(proj.clone());
    }
    let u = hamiltonian_eigen(params).exp_i(t);
    Ok(&(&u * proj) * &u.dagger())
}

/// True iff the model supports a pointer basis, i.e. omega is exactly zero.
///
/// The comparison is exact on purpose: the predicate reflects the structure
/// of the Hamiltonian, not numerical accuracy. Degenerate couplings are
/// accepted; the continuous-random-coupling condition only matters for
/// asymptotic (large environment, late time) claims.
pub fn is_darwinistic(params: &ModelParams) -> bool {
    params.omega == 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::numerics::{C64, DenseOperator, embed_single, kron, matexp_i, pauli};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn commutator(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
        &(a * b) - &(b * a)
    }

    #[test]
    fn zero_params_give_zero_hamiltonian() {
        let params = ModelParams::new(0.0, 0.0, vec![0.0, 0.0]).unwrap();
        assert!(build_hamiltonian(&params).max_abs() < 1e-15);
    }

    #[test]
    fn reference_hamiltonian_entries() {
        let h = build_hamiltonian(&ModelParams::reference());
        // <000|H|000> = omega/2 = 0.75, <000|H|100> = delta/2 = 0.5
        assert!((h.matrix()[(0, 0)] - c(0.75, 0.0)).norm() < 1e-14);
        assert!((h.matrix()[(0, 0b100)] - c(0.5, 0.0)).norm() < 1e-14);
        assert!(h.is_hermitian(1e-14));
    }

    #[test]
    fn hamiltonian_terms_commute_when_omega_zero() {
        let params = ModelParams::new(1.0, 0.0, vec![1.0, 1.0]).unwrap();
        let n = params.n_qubits();
        let drive = embed_single(&pauli::x().scale(c(0.5, 0.0)), 0, n).unwrap();
        let mut terms = vec![drive];
        for (i, &j) in params.couplings.iter().enumerate() {
            let xs = embed_single(&pauli::x(), 0, n).unwrap();
            let xe = embed_single(&pauli::x(), i + 1, n).unwrap();
            terms.push((&xs * &xe).scale(c(j, 0.0)));
        }
        let mut sum = DenseOperator::zeros(n);
        for a in &terms {
            sum = &sum + a;
        }
        assert!(sum.max_abs_diff(&build_hamiltonian(&params)) < 1e-14);
        for a in &terms {
            for b in &terms {
                assert!(commutator(a, b).max_abs() < 1e-14);
            }
        }
    }

    #[test]
    fn interaction_part_factorizes() {
        // H - (delta/2) X_S - (omega/2) Z_S = X_S (x) sum_i J_i X_{E_i}
        let params = ModelParams::new(0.7, 1.3, vec![0.4, 0.9]).unwrap();
        let n = params.n_qubits();
        let h = build_hamiltonian(&params);
        let drive = &embed_single(&pauli::x().scale(c(0.35, 0.0)), 0, n).unwrap()
            + &embed_single(&pauli::z().scale(c(0.65, 0.0)), 0, n).unwrap();
        let interaction = &h - &drive;
        let env = &kron(&pauli::x().scale(c(0.4, 0.0)), &pauli::i2()).unwrap()
            + &kron(&pauli::i2(), &pauli::x().scale(c(0.9, 0.0))).unwrap();
        let expect = kron(&pauli::x(), &env).unwrap();
        assert!(interaction.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn propagator_identity_at_zero_time() {
        let u = propagator(&ModelParams::reference(), 0.0);
        assert!(u.max_abs_diff(&DenseOperator::identity(3)) < 1e-13);
    }

    #[test]
    fn propagator_is_unitary_group_element() {
        let params = ModelParams::reference();
        let u1 = propagator(&params, 1.3);
        let u2 = propagator(&params, 2.36);
        let u12 = propagator(&params, 3.66);
        assert!(u1.is_unitary(1e-12));
        assert!((&u1 * &u2).max_abs_diff(&u12) < 1e-12);
    }

    #[test]
    fn darwinistic_propagator_factorizes() {
        // With omega = 0 all terms commute, so the propagator is the product
        // of the per-term exponentials in any order.
        let params = ModelParams::new(1.0, 0.0, vec![1.0, 1.0]).unwrap();
        let n = params.n_qubits();
        let t = 2.21;
        let drive = embed_single(&pauli::x().scale(c(0.5, 0.0)), 0, n).unwrap();
        let mut u = matexp_i(&drive, -t).unwrap();
        for (i, &j) in params.couplings.iter().enumerate() {
            let xs = embed_single(&pauli::x(), 0, n).unwrap();
            let xe = embed_single(&pauli::x(), i + 1, n).unwrap();
            let term = (&xs * &xe).scale(c(j, 0.0));
            u = &u * &matexp_i(&term, -t).unwrap();
        }
        assert!(u.max_abs_diff(&propagator(&params, t)) < 1e-12);
    }

    #[test]
    fn heisenberg_projection_preserves_structure() {
        let params = ModelParams::reference();
        let proj = crate::kdq::embed_projector(
            &crate::kdq::ProjectorPair::z_basis().outcome(0),
            1,
            params.n_qubits(),
        )
        .unwrap();
        let evolved = heisenberg_project(&proj, &params, 2.21).unwrap();
        // Unitary conjugation preserves projector-ness, rank, and trace.
        assert!(evolved.is_projector(1e-12));
        assert!(evolved.is_hermitian(1e-12));
        assert!((evolved.trace() - c(4.0, 0.0)).norm() < 1e-12);
        // t = 0 leaves the operator untouched.
        let same = heisenberg_project(&proj, &params, 0.0).unwrap();
        assert!(same.max_abs_diff(&proj) < 1e-14);
    }

    #[test]
    fn heisenberg_rejects_non_projector() {
        let n = 3;
        let not_proj = embed_single(&pauli::x(), 1, n).unwrap().scale(c(0.5, 0.0));
        assert!(matches!(
            heisenberg_project(&not_proj, &ModelParams::reference(), 1.0),
            Err(Error::NotProjector(_))
        ));
    }

    #[test]
    fn darwinism_predicate_is_exact() {
        assert!(is_darwinistic(&ModelParams::new(1.0, 0.0, vec![1.0, 1.0]).unwrap()));
        assert!(!is_darwinistic(&ModelParams::reference()));
        assert!(!is_darwinistic(&ModelParams::new(1.0, 1e-15, vec![1.0]).unwrap()));
        assert!(!is_darwinistic(&ModelParams::new(1.0, -1e-300, vec![1.0]).unwrap()));
    }

    #[test]
    fn eigen_reconstructs_hamiltonian() {
        let params = ModelParams::reference();
        let h = build_hamiltonian(&params);
        let eig = hamiltonian_eigen(&params);
        assert!(eig.exp_i(1.7).max_abs_diff(&matexp_i(&h, 1.7).unwrap()) < 1e-12);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(matches!(
            ModelParams::new(1.0, 0.0, vec![]),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            ModelParams::new(1.0, 0.0, vec![1.0; 14]),
            Err(Error::TooManyQubits(15, _))
        ));
    }
}
