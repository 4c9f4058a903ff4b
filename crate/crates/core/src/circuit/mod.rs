//! Gate-level emulation of the cycle-test measurement protocol.
//!
//! The full circuit runs on 14 qubits: a test ancilla, three 3-qubit
//! registers holding |A>, |psi_0>, |B>, and four Bell ancillas that purify
//! the maximally mixed factors of the |A> and |B> registers. The ancilla's
//! ground-state probability encodes the quasiprobability scaled by 1/16
//! (a factor of 4 per unmeasured model qubit).
//!
//! Decode conventions, calibrated once against the exact pipeline in
//! [`crate::kdq`] and then frozen:
//!
//! * The |A> register is propagated with e^{+iH tau_a}, realizing the
//!   Heisenberg evolution of Alice's projector.
//! * The literal encoding "Re q = (1 + P_0(0))/2" cannot represent
//!   Re q < 1/2; the implemented relation is the affine test statistic
//!   v = scale * (2 P(0) - 1) applied to v = q (scale 16).
//! * The imaginary part uses a plain S gate on the ancilla and decodes
//!   with positive sign: Im q = scale * (2 P_{pi/2}(0) - 1).

pub mod noise;
pub mod sim;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kdq::MeasurementSetting;
use crate::model::ModelParams;
use crate::numerics::C64;
use crate::sweep::stream_rng;

pub use noise::{DeviceParams, NoiseModel, PauliRates, IBM_TORINO, IONQ_ARIA1};
pub use sim::simulate;

/// Bell-pair marginalization scale factor for the 3-qubit model: a factor
/// of 4 for each of the two unmeasured qubits per register.
pub const CYCLE_SCALE: f64 = 16.0;

/// One gate on indexed qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    X(usize),
    S(usize),
    SDagger(usize),
    Rx(usize, f64),
    Rz(usize, f64),
    Rxx(usize, usize, f64),
    Cnot(usize, usize),
    Cswap(usize, usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::S(q) | Gate::SDagger(q) | Gate::Rx(q, _)
            | Gate::Rz(q, _) => vec![q],
            Gate::Rxx(a, b, _) | Gate::Cnot(a, b) => vec![a, b],
            Gate::Cswap(c, a, b) => vec![c, a, b],
        }
    }

    pub fn theta(&self) -> Option<f64> {
        match *self {
            Gate::Rx(_, t) | Gate::Rz(_, t) | Gate::Rxx(_, _, t) => Some(t),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::X(_) => "X",
            Gate::S(_) => "S",
            Gate::SDagger(_) => "SDG",
            Gate::Rx(..) => "RX",
            Gate::Rz(..) => "RZ",
            Gate::Rxx(..) => "RXX",
            Gate::Cnot(..) => "CNOT",
            Gate::Cswap(..) => "CSWAP",
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange(q, n_qubits));
            }
        }
        for (i, &a) in qs.iter().enumerate() {
            if qs[i + 1..].contains(&a) {
                return Err(Error::InvalidConfig(format!(
                    "gate {} uses qubit {a} twice",
                    self.name()
                )));
            }
        }
        if let Some(t) = self.theta() {
            if !t.is_finite() {
                return Err(Error::InvalidConfig("non-finite gate angle".into()));
            }
        }
        Ok(())
    }
}

/// Ordered gate list with a designated measured qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    measured_qubit: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize, measured_qubit: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::tol::MAX_QUBITS {
            return Err(Error::TooManyQubits(n_qubits, crate::tol::MAX_QUBITS));
        }
        if measured_qubit >= n_qubits {
            return Err(Error::QubitOutOfRange(measured_qubit, n_qubits));
        }
        Ok(Circuit {
            n_qubits,
            gates: Vec::new(),
            measured_qubit,
        })
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn measured_qubit(&self) -> usize {
        self.measured_qubit
    }

    /// Plain-text gate list, one gate per line: KIND q0 [q1 [q2]] [theta].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(g.name());
            for q in g.qubits() {
                out.push_str(&format!(" {q}"));
            }
            if let Some(t) = g.theta() {
                out.push_str(&format!(" {t}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Real or imaginary part of the quasiprobability (S gate absent/present).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Real,
    Imag,
}

/// Sampled ancilla statistics for one circuit configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShotRecord {
    pub n_shots: u64,
    pub count_zero: u64,
    pub part: Part,
    pub outcome: (usize, usize),
}

/// First-order Trotter gate sequence approximating e^{-iHt} on the given
/// register qubits (`qubits[0]` is the system qubit). Per step: RX(delta
/// dt) on S, RZ(omega dt) on S, RXX(2 J_i dt) on (S, E_i). The cycle test
/// passes t = -tau_a to realize e^{+iH tau_a}.
pub fn trotterized_propagator(
    params: &ModelParams,
    t: f64,
    n_steps: usize,
    qubits: &[usize],
) -> Result<Vec<Gate>> {
    if n_steps == 0 {
        return Err(Error::InvalidConfig("n_steps must be >= 1".into()));
    }
    if qubits.len() != params.n_qubits() {
        return Err(Error::DimensionMismatch(qubits.len(), params.n_qubits()));
    }
    if t == 0.0 {
        return Ok(Vec::new());
    }
    let dt = t / n_steps as f64;
    let sys = qubits[0];
    let mut gates = Vec::with_capacity(n_steps * (2 + params.n_env()));
    for _ in 0..n_steps {
        gates.push(Gate::Rx(sys, params.delta * dt));
        gates.push(Gate::Rz(sys, params.omega * dt));
        for (i, &j) in params.couplings.iter().enumerate() {
            gates.push(Gate::Rxx(sys, qubits[1 + i], 2.0 * j * dt));
        }
    }
    Ok(gates)
}

/// Qubit layout of the full protocol circuit.
pub mod layout {
    pub const TEST_ANCILLA: usize = 0;
    pub const A_REG: [usize; 3] = [1, 2, 3];
    pub const A_BELL: [usize; 2] = [4, 5];
    pub const PSI_REG: [usize; 3] = [6, 7, 8];
    pub const B_REG: [usize; 3] = [9, 10, 11];
    pub const B_BELL: [usize; 2] = [12, 13];
    pub const N_QUBITS: usize = 14;
}

/// Gate sequence preparing a single-qubit state from |0>, restricted to
/// the protocol's preparation family: optional X (outcome selection), then
/// optional H, then optional S.
fn prepare_from_zero(target: [C64; 2], qubit: usize) -> Result<Vec<Gate>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let candidates: [([C64; 2], &[Gate]); 6] = [
        ([C64::new(1.0, 0.0), C64::new(0.0, 0.0)], &[]),
        ([C64::new(0.0, 0.0), C64::new(1.0, 0.0)], &[Gate::X(qubit)]),
        ([C64::new(s, 0.0), C64::new(s, 0.0)], &[Gate::H(qubit)]),
        (
            [C64::new(s, 0.0), C64::new(-s, 0.0)],
            &[Gate::X(qubit), Gate::H(qubit)],
        ),
        (
            [C64::new(s, 0.0), C64::new(0.0, s)],
            &[Gate::H(qubit), Gate::S(qubit)],
        ),
        (
            [C64::new(s, 0.0), C64::new(0.0, -s)],
            &[Gate::X(qubit), Gate::H(qubit), Gate::S(qubit)],
        ),
    ];
    for (state, gates) in candidates {
        let overlap = (state[0].conj() * target[0] + state[1].conj() * target[1]).norm();
        if (overlap - 1.0).abs() <= 1e-10 {
            return Ok(gates.to_vec());
        }
    }
    Err(Error::UnsupportedPreparation(format!(
        "state [{:.4}{:+.4}i, {:.4}{:+.4}i] is not reachable with X/H/S from |0>",
        target[0].re, target[0].im, target[1].re, target[1].im
    )))
}

/// Build the full protocol circuit for one outcome pair and part.
pub fn build_cycle_test(
    setting: &MeasurementSetting,
    params: &ModelParams,
    outcome: (usize, usize),
    part: Part,
    n_trotter: usize,
) -> Result<Circuit> {
    if params.n_env() != 2 || setting.n_qubits() != 3 {
        return Err(Error::UnsupportedPreparation(
            "the protocol circuit supports exactly two environment qubits".into(),
        ));
    }
    if outcome.0 > 1 || outcome.1 > 1 {
        return Err(Error::InvalidConfig("outcomes are 0 or 1".into()));
    }
    let mut circuit = Circuit::new(layout::N_QUBITS, layout::TEST_ANCILLA)?;

    // |A> register: Alice's projector state on her measured qubit, Bell
    // pairs purifying the other two register qubits.
    let a_state = setting.projectors_a().outcome_state(outcome.0);
    circuit.extend(prepare_from_zero(
        a_state,
        layout::A_REG[setting.site_a()],
    )?)?;
    let mut bell = layout::A_BELL.iter();
    for (k, &reg) in layout::A_REG.iter().enumerate() {
        if k != setting.site_a() {
            let &anc = bell.next().expect("two unmeasured qubits");
            circuit.push(Gate::H(anc))?;
            circuit.push(Gate::Cnot(anc, reg))?;
        }
    }

    // |psi_0> register.
    for (k, &f) in setting.initial_factors().iter().enumerate() {
        circuit.extend(prepare_from_zero(f, layout::PSI_REG[k])?)?;
    }

    // |B> register.
    let b_state = setting.projectors_b().outcome_state(outcome.1);
    circuit.extend(prepare_from_zero(
        b_state,
        layout::B_REG[setting.site_b()],
    )?)?;
    let mut bell = layout::B_BELL.iter();
    for (k, &reg) in layout::B_REG.iter().enumerate() {
        if k != setting.site_b() {
            let &anc = bell.next().expect("two unmeasured qubits");
            circuit.push(Gate::H(anc))?;
            circuit.push(Gate::Cnot(anc, reg))?;
        }
    }

    // Propagation: e^{+iH tau_a} on the |A> register. Omitted entirely at
    // tau_a = 0, matching the protocol's "propagation removed" variant.
    circuit.extend(trotterized_propagator(
        params,
        -setting.time_a(),
        n_trotter,
        &layout::A_REG,
    )?)?;

    // Cycle test: |A>|psi>|B> -> |B>|A>|psi> under control.
    circuit.push(Gate::H(layout::TEST_ANCILLA))?;
    for k in 0..3 {
        circuit.push(Gate::Cswap(
            layout::TEST_ANCILLA,
            layout::PSI_REG[k],
            layout::B_REG[k],
        ))?;
    }
    for k in 0..3 {
        circuit.push(Gate::Cswap(
            layout::TEST_ANCILLA,
            layout::A_REG[k],
            layout::PSI_REG[k],
        ))?;
    }
    if part == Part::Imag {
        circuit.push(Gate::S(layout::TEST_ANCILLA))?;
    }
    circuit.push(Gate::H(layout::TEST_ANCILLA))?;
    Ok(circuit)
}

/// Exact probability of measuring |0> on the designated qubit.
pub fn ancilla_p0_exact(circuit: &Circuit) -> Result<f64> {
    let state = sim::simulate_noiseless(circuit);
    Ok(sim::prob_zero(&state, circuit.measured_qubit()))
}

/// Trajectory-averaged probability of reading |0>, readout error folded in.
pub fn ancilla_p0_noisy(
    circuit: &Circuit,
    n_trajectories: usize,
    noise: &NoiseModel,
    seed: u64,
) -> Result<f64> {
    if n_trajectories == 0 {
        return Err(Error::NoShots);
    }
    let total: f64 = (0..n_trajectories)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64);
            let state = sim::simulate_trajectory(circuit, noise, &mut rng);
            let p0 = sim::prob_zero(&state, circuit.measured_qubit());
            p0 * (1.0 - noise.p_readout) + (1.0 - p0) * noise.p_readout
        })
        .sum();
    Ok(total / n_trajectories as f64)
}

/// Ancilla ground-state probability; exact when no noise model is given.
pub fn ancilla_p0(
    circuit: &Circuit,
    n_trajectories: usize,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<f64> {
    match noise {
        None => ancilla_p0_exact(circuit),
        Some(nm) => ancilla_p0_noisy(circuit, n_trajectories, nm, seed),
    }
}

/// Decode ancilla probabilities into a complex quasiprobability.
pub fn decode_quasiprobability(p0_real: f64, p0_imag: f64, scale: f64) -> C64 {
    C64::new(
        scale * (2.0 * p0_real - 1.0),
        scale * (2.0 * p0_imag - 1.0),
    )
}

/// How ancilla probabilities are turned into estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShotPlan {
    /// Use exact probabilities (infinite-shot limit); noiseless only.
    Exact,
    /// Sample this many shots per circuit part. With a noise model, the
    /// count is the number of Monte-Carlo trajectories averaged instead.
    Sampled(u64),
}

/// Estimated KD distribution with per-entry standard errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KdEstimate {
    pub q: [[crate::kdq::ComplexEntry; 2]; 2],
    pub std_err_re: [[f64; 2]; 2],
    pub std_err_im: [[f64; 2]; 2],
    pub records: Vec<ShotRecord>,
}

impl KdEstimate {
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.q[i][j].into()
    }

    /// Root mean square error of the four entries against a reference.
    pub fn rmse(&self, reference: &crate::kdq::KDDistribution) -> f64 {
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                s += (self.entry(i, j) - reference.q[i][j]).norm_sqr();
            }
        }
        (s / 4.0).sqrt()
    }
}

/// Run all eight circuit configurations and decode the KD estimate.
pub fn estimate_kd(
    setting: &MeasurementSetting,
    params: &ModelParams,
    shots: ShotPlan,
    noise: Option<&NoiseModel>,
    n_trotter: usize,
    seed: u64,
) -> Result<KdEstimate> {
    if noise.is_some() && shots == ShotPlan::Exact {
        return Err(Error::NoShots);
    }
    if let ShotPlan::Sampled(0) = shots {
        return Err(Error::NoShots);
    }
    let mut q = [[crate::kdq::ComplexEntry { re: 0.0, im: 0.0 }; 2]; 2];
    let mut std_err_re = [[0.0; 2]; 2];
    let mut std_err_im = [[0.0; 2]; 2];
    let mut records = Vec::new();
    let mut rng = stream_rng(seed, u64::MAX);
    for i in 0..2 {
        for j in 0..2 {
            let mut p0 = [0.0; 2];
            let mut se = [0.0; 2];
            for (pi, part) in [Part::Real, Part::Imag].into_iter().enumerate() {
                let circuit = build_cycle_test(setting, params, (i, j), part, n_trotter)?;
                let part_seed = rng.gen::<u64>();
                let p = match (shots, noise) {
                    (ShotPlan::Exact, None) => ancilla_p0_exact(&circuit)?,
                    (ShotPlan::Sampled(n), None) => {
                        let exact = ancilla_p0_exact(&circuit)?;
                        let count = Binomial::new(n, exact.clamp(0.0, 1.0))
                            .expect("probability in range")
                            .sample(&mut rng);
                        records.push(ShotRecord {
                            n_shots: n,
                            count_zero: count,
                            part,
                            outcome: (i, j),
                        });
                        count as f64 / n as f64
                    }
                    (ShotPlan::Sampled(n), Some(nm)) => {
                        let p = ancilla_p0_noisy(&circuit, n as usize, nm, part_seed)?;
                        records.push(ShotRecord {
                            n_shots: n,
                            count_zero: (p * n as f64).round() as u64,
                            part,
                            outcome: (i, j),
                        });
                        p
                    }
                    (ShotPlan::Exact, Some(_)) => unreachable!("rejected above"),
                };
                p0[pi] = p;
                if let ShotPlan::Sampled(n) = shots {
                    se[pi] = CYCLE_SCALE * 2.0 * (p * (1.0 - p) / n as f64).sqrt();
                }
            }
            let dec = decode_quasiprobability(p0[0], p0[1], CYCLE_SCALE);
            q[i][j] = dec.into();
            std_err_re[i][j] = se[0];
            std_err_im[i][j] = se[1];
        }
    }
    Ok(KdEstimate {
        q,
        std_err_re,
        std_err_im,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kdq::{self, MeasurementSetting};
    use crate::numerics::ONE;
    use crate::sweep;

    fn count<F: Fn(&Gate) -> bool>(c: &Circuit, f: F) -> usize {
        c.gates().iter().filter(|g| f(g)).count()
    }

    #[test]
    fn circuit_validates_qubits() {
        assert!(Circuit::new(15, 0).is_err());
        assert!(Circuit::new(3, 3).is_err());
        let mut c = Circuit::new(2, 0).unwrap();
        assert!(c.push(Gate::H(2)).is_err());
        assert!(c.push(Gate::Cswap(0, 1, 1)).is_err());
        assert!(c.push(Gate::H(1)).is_ok());
    }

    #[test]
    fn trotter_gate_budget() {
        let params = ModelParams::reference();
        let gates = trotterized_propagator(&params, 1.0, 7, &[0, 1, 2]).unwrap();
        // Per step: RX + RZ on the system plus one RXX per coupling.
        assert_eq!(gates.len(), 7 * 4);
        assert!(trotterized_propagator(&params, 1.0, 0, &[0, 1, 2]).is_err());
        assert!(trotterized_propagator(&params, 1.0, 2, &[0, 1]).is_err());
        assert!(trotterized_propagator(&params, 0.0, 5, &[0, 1, 2])
            .unwrap()
            .is_empty());
    }

    #[test]
    fn cycle_test_structure() {
        let setting = MeasurementSetting::reference(2.21);
        let params = ModelParams::reference();
        let circuit = build_cycle_test(&setting, &params, (0, 0), Part::Real, 5).unwrap();
        assert_eq!(circuit.n_qubits(), layout::N_QUBITS);
        assert_eq!(circuit.measured_qubit(), layout::TEST_ANCILLA);
        // Three register swaps per half of the cycle permutation.
        assert_eq!(count(&circuit, |g| matches!(g, Gate::Cswap(..))), 6);
        // Two Bell pairs per purified register.
        assert_eq!(count(&circuit, |g| matches!(g, Gate::Cnot(..))), 4);
        // Real part carries no phase gate on the ancilla.
        assert_eq!(
            count(&circuit, |g| matches!(g, Gate::S(q) if *q == layout::TEST_ANCILLA)),
            0
        );
        let imag = build_cycle_test(&setting, &params, (0, 0), Part::Imag, 5).unwrap();
        assert_eq!(
            count(&imag, |g| matches!(g, Gate::S(q) if *q == layout::TEST_ANCILLA)),
            1
        );
        // Removing the propagation removes every rotation gate.
        let frozen = build_cycle_test(&setting.with_time(0.0), &params, (0, 0), Part::Real, 5)
            .unwrap();
        assert_eq!(
            count(&frozen, |g| matches!(
                g,
                Gate::Rx(..) | Gate::Rz(..) | Gate::Rxx(..)
            )),
            0
        );
    }

    #[test]
    fn cycle_test_rejects_unreachable_preparations() {
        let mut rng = sweep::stream_rng(0, 0);
        let setting = sweep::random_setting(&mut rng, &ModelParams::reference());
        assert!(matches!(
            build_cycle_test(&setting, &ModelParams::reference(), (0, 0), Part::Real, 5),
            Err(Error::UnsupportedPreparation(_))
        ));
    }

    #[test]
    fn decode_examples() {
        assert!((decode_quasiprobability(0.5, 0.5, CYCLE_SCALE)).norm() < 1e-15);
        let q = decode_quasiprobability(0.53125, 0.5, CYCLE_SCALE);
        assert!((q.re - 1.0).abs() < 1e-12 && q.im.abs() < 1e-15);
        let q = decode_quasiprobability(0.5, 0.46875, CYCLE_SCALE);
        assert!((q.im + 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_circuit_reproduces_kd_without_propagation() {
        // At tau_a = 0 no Trotter gates are present, so the circuit value
        // is exact up to floating-point error.
        let setting = MeasurementSetting::reference(0.0);
        let params = ModelParams::reference();
        let est = estimate_kd(&setting, &params, ShotPlan::Exact, None, 1, 0).unwrap();
        let kd = kdq::kd_distribution(&setting, &params).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((est.entry(i, j) - kd.q[i][j]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn exact_circuit_tracks_kd_with_propagation() {
        let params = ModelParams::reference();
        let setting = MeasurementSetting::reference(2.21);
        let kd = kdq::kd_distribution(&setting, &params).unwrap();
        let est = estimate_kd(&setting, &params, ShotPlan::Exact, None, 5, 0).unwrap();
        // Residual Trotter error at 5 steps, frozen from an independent
        // reference implementation: max entry deviation 6.3e-3.
        assert!(est.rmse(&kd) < 1e-2);
        // Marginals survive the encoding: rows sum to real probabilities.
        let row0 = est.entry(0, 0) + est.entry(0, 1);
        assert!(row0.im.abs() < 1e-2);
        let total = row0 + est.entry(1, 0) + est.entry(1, 1);
        assert!((total - ONE).norm() < 2e-2);
    }

    #[test]
    fn shot_sampling_is_consistent_and_reproducible() {
        let params = ModelParams::reference();
        let setting = MeasurementSetting::reference(2.21);
        let exact = estimate_kd(&setting, &params, ShotPlan::Exact, None, 5, 0).unwrap();
        let n = 200_000;
        let est = estimate_kd(&setting, &params, ShotPlan::Sampled(n), None, 5, 7).unwrap();
        assert_eq!(est.records.len(), 8);
        for i in 0..2 {
            for j in 0..2 {
                let d = est.entry(i, j) - exact.entry(i, j);
                assert!(est.std_err_re[i][j] > 0.0);
                assert!(d.re.abs() < 5.0 * est.std_err_re[i][j], "re entry ({i},{j})");
                assert!(d.im.abs() < 5.0 * est.std_err_im[i][j], "im entry ({i},{j})");
            }
        }
        let again = estimate_kd(&setting, &params, ShotPlan::Sampled(n), None, 5, 7).unwrap();
        assert_eq!(est.q, again.q);
    }

    #[test]
    fn zero_noise_sampling_collapses_to_exact_probabilities() {
        let params = ModelParams::reference();
        let setting = MeasurementSetting::reference(0.0);
        let noiseless = NoiseModel::noiseless();
        let est = estimate_kd(
            &setting,
            &params,
            ShotPlan::Sampled(3),
            Some(&noiseless),
            1,
            0,
        )
        .unwrap();
        let kd = kdq::kd_distribution(&setting, &params).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((est.entry(i, j) - kd.q[i][j]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn noise_degrades_the_estimate() {
        let params = ModelParams::reference();
        let setting = MeasurementSetting::reference(2.21);
        let kd = kdq::kd_distribution(&setting, &params).unwrap();
        let clean = estimate_kd(&setting, &params, ShotPlan::Exact, None, 5, 0).unwrap();
        let noisy = estimate_kd(
            &setting,
            &params,
            ShotPlan::Sampled(24),
            Some(&NoiseModel::table4_ibm()),
            5,
            3,
        )
        .unwrap();
        assert!(noisy.rmse(&kd) > clean.rmse(&kd));
        assert!(noisy.rmse(&kd).is_finite());
    }

    #[test]
    fn invalid_shot_plans_rejected() {
        let params = ModelParams::reference();
        let setting = MeasurementSetting::reference(0.0);
        assert!(matches!(
            estimate_kd(&setting, &params, ShotPlan::Sampled(0), None, 1, 0),
            Err(Error::NoShots)
        ));
        let nm = NoiseModel::table4_ibm();
        assert!(matches!(
            estimate_kd(&setting, &params, ShotPlan::Exact, Some(&nm), 1, 0),
            Err(Error::NoShots)
        ));
    }

    #[test]
    fn circuit_text_rendering() {
        let setting = MeasurementSetting::reference(0.0);
        let circuit =
            build_cycle_test(&setting, &ModelParams::reference(), (1, 0), Part::Imag, 1).unwrap();
        let text = circuit.to_text();
        assert!(text.contains("CSWAP"));
        assert!(text.contains("H"));
    }

    #[test]
    fn y_projector_outcomes_are_circuit_preparable() {
        // Both outcomes of the inferred Z and Y measurements must sit in
        // the X/H/S preparation family, for every outcome pair.
        let setting = MeasurementSetting::reference(3.66);
        for i in 0..2 {
            for j in 0..2 {
                for part in [Part::Real, Part::Imag] {
                    build_cycle_test(&setting, &ModelParams::reference(), (i, j), part, 3).unwrap();
                }
            }
        }
    }
}
