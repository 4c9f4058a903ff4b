//! Statevector gate application and Monte-Carlo trajectory sampling.
//!
//! Amplitudes are indexed with qubit 0 as the most significant bit, the
//! same convention as the dense-operator modules.

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{C64, ONE, StateVector, ZERO};

use super::noise::{NoiseModel, PauliRates};
use super::{Circuit, Gate};

#[inline]
fn mask(n: usize, qubit: usize) -> usize {
    1 << (n - 1 - qubit)
}

/// Apply one gate in place.
#[allow(clippy::needless_range_loop)]
pub fn apply_gate(amps: &mut [C64], n: usize, gate: &Gate) {
    let dim = amps.len();
    match *gate {
        Gate::H(q) => {
            let m = mask(n, q);
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..dim {
                if i & m == 0 {
                    let (a, b) = (amps[i], amps[i | m]);
                    amps[i] = (a + b) * s;
                    amps[i | m] = (a - b) * s;
                }
            }
        }
        Gate::X(q) => {
            let m = mask(n, q);
            for i in 0..dim {
                if i & m == 0 {
                    amps.swap(i, i | m);
                }
            }
        }
        Gate::S(q) => {
            let m = mask(n, q);
            let ph = C64::new(0.0, 1.0);
            for i in 0..dim {
                if i & m != 0 {
                    amps[i] *= ph;
                }
            }
        }
        Gate::SDagger(q) => {
            let m = mask(n, q);
            let ph = C64::new(0.0, -1.0);
            for i in 0..dim {
                if i & m != 0 {
                    amps[i] *= ph;
                }
            }
        }
        Gate::Rx(q, theta) => {
            let m = mask(n, q);
            let c = (theta / 2.0).cos();
            let s = C64::new(0.0, -(theta / 2.0).sin());
            for i in 0..dim {
                if i & m == 0 {
                    let (a, b) = (amps[i], amps[i | m]);
                    amps[i] = a * c + b * s;
                    amps[i | m] = a * s + b * c;
                }
            }
        }
        Gate::Rz(q, theta) => {
            let m = mask(n, q);
            let ph0 = C64::from_polar(1.0, -theta / 2.0);
            let ph1 = C64::from_polar(1.0, theta / 2.0);
            for (i, a) in amps.iter_mut().enumerate() {
                *a *= if i & m == 0 { ph0 } else { ph1 };
            }
        }
        Gate::Rxx(q1, q2, theta) => {
            let m1 = mask(n, q1);
            let m2 = mask(n, q2);
            let c = (theta / 2.0).cos();
            let s = C64::new(0.0, -(theta / 2.0).sin());
            for i in 0..dim {
                if i & m1 == 0 {
                    let j = i ^ m1 ^ m2;
                    let (a, b) = (amps[i], amps[j]);
                    amps[i] = a * c + b * s;
                    amps[j] = a * s + b * c;
                }
            }
        }
        Gate::Cnot(ctrl, tgt) => {
            let mc = mask(n, ctrl);
            let mt = mask(n, tgt);
            for i in 0..dim {
                if i & mc != 0 && i & mt == 0 {
                    amps.swap(i, i | mt);
                }
            }
        }
        Gate::Cswap(ctrl, a, b) => {
            let mc = mask(n, ctrl);
            let ma = mask(n, a);
            let mb = mask(n, b);
            for i in 0..dim {
                if i & mc != 0 && i & ma != 0 && i & mb == 0 {
                    amps.swap(i, i ^ ma ^ mb);
                }
            }
        }
    }
}

/// Apply a Pauli error (1 = X, 2 = Y, 3 = Z) to one qubit.
fn apply_pauli(amps: &mut [C64], n: usize, qubit: usize, pauli: u8) {
    let m = mask(n, qubit);
    match pauli {
        1 => apply_gate(amps, n, &Gate::X(qubit)),
        2 => {
            let pi = C64::new(0.0, 1.0);
            for i in 0..amps.len() {
                if i & m == 0 {
                    let (a, b) = (amps[i], amps[i | m]);
                    amps[i] = -pi * b;
                    amps[i | m] = pi * a;
                }
            }
        }
        3 => {
            for (i, a) in amps.iter_mut().enumerate() {
                if i & m != 0 {
                    *a = -*a;
                }
            }
        }
        _ => {}
    }
}

fn sample_idle<R: Rng + ?Sized>(amps: &mut [C64], n: usize, q: usize, rates: &PauliRates, rng: &mut R) {
    let r: f64 = rng.gen();
    if r < rates.px {
        apply_pauli(amps, n, q, 1);
    } else if r < rates.px + rates.py {
        apply_pauli(amps, n, q, 2);
    } else if r < rates.px + rates.py + rates.pz {
        apply_pauli(amps, n, q, 3);
    }
}

fn insert_gate_noise<R: Rng + ?Sized>(
    amps: &mut [C64],
    n: usize,
    gate: &Gate,
    noise: &NoiseModel,
    rng: &mut R,
) {
    let qs = gate.qubits();
    let (p_depol, idle) = if qs.len() == 1 {
        (noise.p1, &noise.idle_1q)
    } else {
        (noise.p2, &noise.idle_2q)
    };
    if rng.gen::<f64>() < p_depol {
        // uniform non-identity Pauli word on the gate's qubits
        let n_words = 4u32.pow(qs.len() as u32);
        let word = rng.gen_range(1..n_words);
        let mut w = word;
        for &q in &qs {
            apply_pauli(amps, n, q, (w % 4) as u8);
            w /= 4;
        }
    }
    for &q in &qs {
        sample_idle(amps, n, q, idle, rng);
    }
}

/// Deterministic noiseless simulation from |0...0>.
pub fn simulate_noiseless(circuit: &Circuit) -> StateVector {
    let n = circuit.n_qubits();
    let mut amps = vec![ZERO; 1 << n];
    amps[0] = ONE;
    for gate in circuit.gates() {
        apply_gate(&mut amps, n, gate);
    }
    StateVector::from_amplitudes(amps).expect("unitary evolution preserves the norm")
}

/// One Monte-Carlo noise trajectory: after each gate, stochastic Pauli
/// errors are inserted per the model. Readout error is not applied here;
/// it is folded in where the ancilla is sampled.
pub fn simulate_trajectory<R: Rng + ?Sized>(
    circuit: &Circuit,
    noise: &NoiseModel,
    rng: &mut R,
) -> StateVector {
    let n = circuit.n_qubits();
    let mut amps = vec![ZERO; 1 << n];
    amps[0] = ONE;
    for gate in circuit.gates() {
        apply_gate(&mut amps, n, gate);
        insert_gate_noise(&mut amps, n, gate, noise, rng);
    }
    StateVector::from_amplitudes(amps).expect("Pauli errors preserve the norm")
}

/// Simulate a circuit; with a noise model this is a single trajectory and
/// an rng is required.
pub fn simulate<R: Rng + ?Sized>(
    circuit: &Circuit,
    noise: Option<&NoiseModel>,
    rng: Option<&mut R>,
) -> Result<StateVector> {
    match noise {
        None => Ok(simulate_noiseless(circuit)),
        Some(nm) => {
            let rng = rng.ok_or(Error::MissingRng)?;
            Ok(simulate_trajectory(circuit, nm, rng))
        }
    }
}

/// Marginal probability of |0> on one qubit.
pub fn prob_zero(state: &StateVector, qubit: usize) -> f64 {
    let n = state.n_qubits();
    let m = mask(n, qubit);
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| i & m == 0)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}
