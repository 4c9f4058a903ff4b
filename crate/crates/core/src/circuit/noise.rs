//! Stochastic-Pauli noise model with device presets.
//!
//! Per gate: a depolarizing event (uniform non-identity Pauli word on the
//! gate's qubits) with probability `p1`/`p2`, plus per-qubit idle decay
//! folded into a Pauli twirl of amplitude damping and dephasing over the
//! gate duration, p = 1 - exp(-t_gate / T). Readout error is a classical
//! bit flip at sampling time. SPAM error (the trapped-ion preset) is
//! modeled as readout flip only; the device table does not separate state
//! preparation from measurement error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-qubit Pauli error probabilities applied after a gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliRates {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl PauliRates {
    pub const ZERO: PauliRates = PauliRates {
        px: 0.0,
        py: 0.0,
        pz: 0.0,
    };

    /// Pauli twirl of T1/T2 decay over one gate duration:
    /// px = py = (1 - e^{-t/T1})/4, pz = (1 - e^{-t/T2})/2 - px.
    pub fn from_decay(t_gate: f64, t1: f64, t2: f64) -> Self {
        let p_damp = 1.0 - (-t_gate / t1).exp();
        let p_phase = 1.0 - (-t_gate / t2).exp();
        let px = p_damp / 4.0;
        PauliRates {
            px,
            py: px,
            pz: (p_phase / 2.0 - px).max(0.0),
        }
    }

    pub fn total(&self) -> f64 {
        self.px + self.py + self.pz
    }

    fn scaled(&self, factor: f64) -> Self {
        let r = PauliRates {
            px: self.px * factor,
            py: self.py * factor,
            pz: self.pz * factor,
        };
        // keep a valid distribution when scaling up
        let t = r.total();
        if t > 1.0 {
            PauliRates {
                px: r.px / t,
                py: r.py / t,
                pz: r.pz / t,
            }
        } else {
            r
        }
    }
}

/// Raw device characterization: decoherence times, gate durations, and
/// error rates (probabilities, not percent).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub t1: f64,
    pub t2: f64,
    pub t_gate_1q: f64,
    pub t_gate_2q: f64,
    pub t_readout: f64,
    pub p_gate_1q: f64,
    pub p_gate_2q: f64,
    pub p_readout: f64,
}

/// Median superconducting-device parameters (133-qubit heavy-hexagon).
pub const IBM_TORINO: DeviceParams = DeviceParams {
    t1: 183.29e-6,
    t2: 141.73e-6,
    t_gate_1q: 32e-9,
    t_gate_2q: 68e-9,
    t_readout: 1560e-9,
    p_gate_1q: 0.037e-2,
    p_gate_2q: 0.286e-2,
    p_readout: 2.539e-2,
};

/// Median trapped-ion device parameters (25-qubit, all-to-all). The SPAM
/// rate is carried in `p_readout`.
pub const IONQ_ARIA1: DeviceParams = DeviceParams {
    t1: 100.0,
    t2: 1.0,
    t_gate_1q: 135e-6,
    t_gate_2q: 600e-6,
    t_readout: 300e-6,
    p_gate_1q: 0.010e-2,
    p_gate_2q: 1.240e-2,
    p_readout: 0.370e-2,
};

/// Stochastic-Pauli noise description consumed by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Depolarizing probability per single-qubit gate.
    pub p1: f64,
    /// Depolarizing probability per multi-qubit gate.
    pub p2: f64,
    /// Classical bit-flip probability at measurement.
    pub p_readout: f64,
    /// Idle decay per qubit per single-qubit gate.
    pub idle_1q: PauliRates,
    /// Idle decay per qubit per multi-qubit gate.
    pub idle_2q: PauliRates,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel {
            p1: 0.0,
            p2: 0.0,
            p_readout: 0.0,
            idle_1q: PauliRates::ZERO,
            idle_2q: PauliRates::ZERO,
        }
    }

    pub fn from_device(dev: &DeviceParams) -> Self {
        NoiseModel {
            p1: dev.p_gate_1q,
            p2: dev.p_gate_2q,
            p_readout: dev.p_readout,
            idle_1q: PauliRates::from_decay(dev.t_gate_1q, dev.t1, dev.t2),
            idle_2q: PauliRates::from_decay(dev.t_gate_2q, dev.t1, dev.t2),
        }
    }

    pub fn table4_ibm() -> Self {
        Self::from_device(&IBM_TORINO)
    }

    pub fn table4_ionq() -> Self {
        Self::from_device(&IONQ_ARIA1)
    }

    /// All error rates multiplied by `factor`, clamped to valid range.
    pub fn scaled(&self, factor: f64) -> Self {
        NoiseModel {
            p1: (self.p1 * factor).min(1.0),
            p2: (self.p2 * factor).min(1.0),
            p_readout: (self.p_readout * factor).min(0.5),
            idle_1q: self.idle_1q.scaled(factor),
            idle_2q: self.idle_2q.scaled(factor),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p1", self.p1),
            ("p2", self.p2),
            ("p_readout", self.p_readout),
            ("idle_1q", self.idle_1q.total()),
            ("idle_2q", self.idle_2q.total()),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!(
                    "noise probability {name} = {p} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}
