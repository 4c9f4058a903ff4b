//! Haar-random measurement settings and tau/omega grid sweeps.
//!
//! Random-setting methodology behind the heatmap and CDF datasets: draw
//! `n_settings` Haar-random settings (projector axes and
//! initial product state), evaluate a non-classicality measure over a tau
//! grid for each transverse-field strength, and aggregate into histogram
//! and CDF datasets.
//!
//! Determinism: every setting index owns a dedicated ChaCha stream derived
//! from the sweep seed, so results are bit-identical regardless of how the
//! data-parallel evaluation is scheduled.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kdq::{self, MeasureKind, MeasurementSetting, ProjectorPair};
use crate::model::{self, ModelParams};
use crate::numerics::C64;

/// Configuration for heatmap/CDF sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub omega_grid: Vec<f64>,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_steps: usize,
    pub n_settings: usize,
    pub seed: u64,
    pub measure: MeasureKind,
    /// If true, settings are redrawn at every tau grid point instead of
    /// being held fixed across the sweep.
    pub resample_per_tau: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            omega_grid: vec![0.0, 0.5, 1.0, 1.5],
            tau_min: 0.0,
            tau_max: 20.0,
            tau_steps: 401,
            n_settings: 5000,
            seed: 0,
            measure: MeasureKind::NAs,
            resample_per_tau: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tau_min < 0.0 {
            return Err(Error::InvalidConfig("tau_min must be >= 0".into()));
        }
        if self.tau_max <= self.tau_min {
            return Err(Error::InvalidConfig("tau_max must exceed tau_min".into()));
        }
        if self.tau_steps < 2 {
            return Err(Error::InvalidConfig("tau_steps must be >= 2".into()));
        }
        if self.n_settings < 1 {
            return Err(Error::InvalidConfig("n_settings must be >= 1".into()));
        }
        if self.omega_grid.is_empty() {
            return Err(Error::InvalidConfig("omega_grid must be nonempty".into()));
        }
        Ok(())
    }

    pub fn tau_grid(&self) -> Vec<f64> {
        let step = (self.tau_max - self.tau_min) / (self.tau_steps - 1) as f64;
        (0..self.tau_steps)
            .map(|i| self.tau_min + i as f64 * step)
            .collect()
    }
}

/// Independent rng stream for one (seed, index) pair.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Haar-random single-qubit pure state: two independent standard complex
/// Gaussians, normalized.
pub fn haar_random_qubit_state<R: Rng + ?Sized>(rng: &mut R) -> [C64; 2] {
    loop {
        let a = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let b = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if norm > 1e-12 {
            return [a / norm, b / norm];
        }
    }
}

/// Haar-random measurement setting: random projector axes on (E1, E2) and
/// a random product initial state, with tau_a left at 0 (sweeps supply the
/// evolution time externally).
pub fn random_setting<R: Rng + ?Sized>(rng: &mut R, params: &ModelParams) -> MeasurementSetting {
    let a_axis = haar_random_qubit_state(rng);
    let b_axis = haar_random_qubit_state(rng);
    let factors: Vec<[C64; 2]> = (0..params.n_qubits())
        .map(|_| haar_random_qubit_state(rng))
        .collect();
    MeasurementSetting::new(
        1,
        ProjectorPair::from_state(a_axis).expect("haar state is normalized"),
        0.0,
        2,
        ProjectorPair::from_state(b_axis).expect("haar state is normalized"),
        factors,
    )
    .expect("generated setting is valid")
}

/// Histogram bin edges: one underflow bin [0, 1e-6), then `n_log` bins
/// log-spaced on [1e-6, 10]. Values above the top edge land in the last bin.
pub fn histogram_edges(n_log: usize) -> Vec<f64> {
    let lo = 1e-6f64;
    let hi = 10.0f64;
    let mut edges = Vec::with_capacity(n_log + 2);
    edges.push(0.0);
    for k in 0..=n_log {
        edges.push(lo * (hi / lo).powf(k as f64 / n_log as f64));
    }
    edges
}

fn bin_index(edges: &[f64], value: f64) -> usize {
    let n_bins = edges.len() - 1;
    match edges[1..].iter().position(|&e| value < e) {
        Some(idx) => idx,
        None => n_bins - 1,
    }
}

/// Per-omega histograms of the measure over (setting, tau), plus the
/// per-tau trace of the reference setting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeatmapDataset {
    pub omega: Vec<f64>,
    pub tau: Vec<f64>,
    /// Bin edges, length `n_bins + 1`; bin 0 is the underflow bin.
    pub bin_edges: Vec<f64>,
    /// counts[omega][tau][bin]
    pub counts: Vec<Vec<Vec<u32>>>,
    /// reference_trace[omega][tau]: measure of the reference setting.
    pub reference_trace: Vec<Vec<f64>>,
    pub measure: MeasureKind,
}

/// Sorted measure values with cumulative fractions, per omega, at fixed tau.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CdfDataset {
    pub omega: Vec<f64>,
    pub tau_a: f64,
    /// values[omega]: sorted ascending.
    pub values: Vec<Vec<f64>>,
    /// cum_frac[omega][k] = (k + 1) / n.
    pub cum_frac: Vec<Vec<f64>>,
    pub measure: MeasureKind,
}

/// Measure values of the sweep's random settings at one (omega, tau) point.
pub fn measure_values_at(
    params: &ModelParams,
    measure: MeasureKind,
    n_settings: usize,
    seed: u64,
    tau: f64,
) -> Vec<f64> {
    let u = model::hamiltonian_eigen(params).exp_i(tau);
    (0..n_settings)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let setting = random_setting(&mut rng, params);
            let psi = setting.initial_state();
            let a0_t = kdq::evolve_op(&setting.a_embedded(0), &u);
            kdq::measure_from_ops(&psi, &a0_t, &setting.b_embedded(0), measure)
        })
        .collect()
}

/// Per-setting measure traces over the tau grid for one omega value.
/// traces[setting][tau_index]; deterministic given the seed.
pub fn setting_traces(config: &SweepConfig, params: &ModelParams) -> Vec<Vec<f64>> {
    let taus = config.tau_grid();
    let eigen = model::hamiltonian_eigen(params);
    let us: Vec<_> = taus.iter().map(|&t| eigen.exp_i(t)).collect();
    (0..config.n_settings)
        .into_par_iter()
        .map(|k| {
            if config.resample_per_tau {
                us.iter()
                    .enumerate()
                    .map(|(ti, u)| {
                        let stream = ((ti as u64 + 1) << 32) | k as u64;
                        let mut rng = stream_rng(config.seed, stream);
                        let setting = random_setting(&mut rng, params);
                        let psi = setting.initial_state();
                        let a0_t = kdq::evolve_op(&setting.a_embedded(0), u);
                        kdq::measure_from_ops(&psi, &a0_t, &setting.b_embedded(0), config.measure)
                    })
                    .collect()
            } else {
                let mut rng = stream_rng(config.seed, k as u64);
                let setting = random_setting(&mut rng, params);
                let psi = setting.initial_state();
                let a0 = setting.a_embedded(0);
                let b0 = setting.b_embedded(0);
                us.iter()
                    .map(|u| {
                        let a0_t = kdq::evolve_op(&a0, u);
                        kdq::measure_from_ops(&psi, &a0_t, &b0, config.measure)
                    })
                    .collect()
            }
        })
        .collect()
}

/// Full heatmap sweep over the omega grid.
pub fn sweep_heatmap(config: &SweepConfig, base: &ModelParams) -> Result<HeatmapDataset> {
    config.validate()?;
    let taus = config.tau_grid();
    let edges = histogram_edges(100);
    let n_bins = edges.len() - 1;
    let mut counts = Vec::with_capacity(config.omega_grid.len());
    let mut reference_trace = Vec::with_capacity(config.omega_grid.len());
    for &omega in &config.omega_grid {
        let params = base.with_omega(omega);
        let traces = setting_traces(config, &params);
        let mut hist = vec![vec![0u32; n_bins]; taus.len()];
        for trace in &traces {
            for (ti, &v) in trace.iter().enumerate() {
                hist[ti][bin_index(&edges, v)] += 1;
            }
        }
        counts.push(hist);

        let eigen = model::hamiltonian_eigen(&params);
        let reference = MeasurementSetting::reference(0.0);
        let psi = reference.initial_state();
        let a0 = reference.a_embedded(0);
        let b0 = reference.b_embedded(0);
        reference_trace.push(
            taus.iter()
                .map(|&t| {
                    let a0_t = kdq::evolve_op(&a0, &eigen.exp_i(t));
                    kdq::measure_from_ops(&psi, &a0_t, &b0, config.measure)
                })
                .collect(),
        );
    }
    Ok(HeatmapDataset {
        omega: config.omega_grid.clone(),
        tau: taus,
        bin_edges: edges,
        counts,
        reference_trace,
        measure: config.measure,
    })
}

/// CDF sweep at a fixed tau_a.
pub fn sweep_cdf(config: &SweepConfig, base: &ModelParams, tau_a: f64) -> Result<CdfDataset> {
    config.validate()?;
    let mut values = Vec::with_capacity(config.omega_grid.len());
    let mut cum_frac = Vec::with_capacity(config.omega_grid.len());
    for &omega in &config.omega_grid {
        let params = base.with_omega(omega);
        let mut vals =
            measure_values_at(&params, config.measure, config.n_settings, config.seed, tau_a);
        vals.sort_by(|a, b| a.partial_cmp(b).expect("measure values are finite"));
        let n = vals.len() as f64;
        cum_frac.push((0..vals.len()).map(|k| (k + 1) as f64 / n).collect());
        values.push(vals);
    }
    Ok(CdfDataset {
        omega: config.omega_grid.clone(),
        tau_a,
        values,
        cum_frac,
        measure: config.measure,
    })
}

impl HeatmapDataset {
    /// CSV with columns: omega, tau, bin_lo, bin_hi, count.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "omega,tau,bin_lo,bin_hi,count")?;
        for (oi, &omega) in self.omega.iter().enumerate() {
            for (ti, &tau) in self.tau.iter().enumerate() {
                for (bi, &count) in self.counts[oi][ti].iter().enumerate() {
                    writeln!(
                        w,
                        "{omega},{tau},{},{},{count}",
                        self.bin_edges[bi],
                        self.bin_edges[bi + 1]
                    )?;
                }
            }
        }
        Ok(())
    }

    /// CSV of the designated setting's trace: omega, tau, value.
    pub fn write_trace_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "omega,tau,value")?;
        for (oi, &omega) in self.omega.iter().enumerate() {
            for (ti, &tau) in self.tau.iter().enumerate() {
                writeln!(w, "{omega},{tau},{}", self.reference_trace[oi][ti])?;
            }
        }
        Ok(())
    }
}

impl CdfDataset {
    /// CSV with columns: omega, value, cum_frac.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "omega,value,cum_frac")?;
        for (oi, &omega) in self.omega.iter().enumerate() {
            for (vi, &v) in self.values[oi].iter().enumerate() {
                writeln!(w, "{omega},{v},{}", self.cum_frac[oi][vi])?;
            }
        }
        Ok(())
    }
}
