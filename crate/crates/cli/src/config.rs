//! Run configuration: JSON schema, flag overrides, and resolution into
//! library types.

use anyhow::{Context, Result, bail};
use serde::{Deserialize, Serialize};

use kdlab::circuit::noise::NoiseModel;
use kdlab::kdq::{MeasurementSetting, ProjectorPair};
use kdlab::model::ModelParams;
use kdlab::numerics::C64;
use kdlab::sweep::SweepConfig;

/// Output serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Noise preset selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[clap(rename_all = "kebab-case")]
pub enum NoisePreset {
    None,
    Table4Ibm,
    Table4Ionq,
}

impl NoisePreset {
    pub fn model(self) -> Option<NoiseModel> {
        match self {
            NoisePreset::None => None,
            NoisePreset::Table4Ibm => Some(NoiseModel::table4_ibm()),
            NoisePreset::Table4Ionq => Some(NoiseModel::table4_ionq()),
        }
    }
}

/// One single-qubit direction: a named basis/state or a Bloch vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    Named(String),
    Bloch([f64; 3]),
}

impl AxisSpec {
    /// The qubit state pointing along this axis.
    pub fn state(&self) -> Result<[C64; 2]> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bloch = match self {
            AxisSpec::Named(name) => match name.as_str() {
                "z" | "0" => return Ok([C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
                "1" => return Ok([C64::new(0.0, 0.0), C64::new(1.0, 0.0)]),
                "x" | "+" => return Ok([C64::new(s, 0.0), C64::new(s, 0.0)]),
                "-" => return Ok([C64::new(s, 0.0), C64::new(-s, 0.0)]),
                "y" | "+i" => return Ok([C64::new(s, 0.0), C64::new(0.0, s)]),
                "-i" => return Ok([C64::new(s, 0.0), C64::new(0.0, -s)]),
                other => bail!(
                    "unknown axis name {other:?} (expected x/y/z, 0/1, +/-, +i/-i, or a Bloch vector)"
                ),
            },
            AxisSpec::Bloch(v) => *v,
        };
        let norm = (bloch[0] * bloch[0] + bloch[1] * bloch[1] + bloch[2] * bloch[2]).sqrt();
        if norm < 1e-12 {
            bail!("Bloch vector must be nonzero");
        }
        let (x, y, z) = (bloch[0] / norm, bloch[1] / norm, bloch[2] / norm);
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = y.atan2(x);
        Ok([
            C64::new((theta / 2.0).cos(), 0.0),
            C64::from_polar((theta / 2.0).sin(), phi),
        ])
    }
}

/// Measurement setting: the inferred reference configuration or an
/// explicit description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SettingSpec {
    Named(String),
    Explicit {
        site_a: usize,
        basis_a: AxisSpec,
        site_b: usize,
        basis_b: AxisSpec,
        /// One entry per qubit, system first.
        initial: Vec<AxisSpec>,
    },
}

impl Default for SettingSpec {
    fn default() -> Self {
        SettingSpec::Named("reference".into())
    }
}

impl SettingSpec {
    pub fn resolve(&self, tau_a: f64) -> Result<MeasurementSetting> {
        match self {
            SettingSpec::Named(name) => {
                if name == "reference" {
                    Ok(MeasurementSetting::reference(tau_a))
                } else {
                    bail!("unknown setting name {name:?} (expected \"reference\")")
                }
            }
            SettingSpec::Explicit {
                site_a,
                basis_a,
                site_b,
                basis_b,
                initial,
            } => {
                let factors: Vec<[C64; 2]> = initial
                    .iter()
                    .map(|a| a.state())
                    .collect::<Result<_>>()
                    .context("field \"initial\"")?;
                let setting = MeasurementSetting::new(
                    *site_a,
                    ProjectorPair::from_state(basis_a.state().context("field \"basis_a\"")?)?,
                    tau_a,
                    *site_b,
                    ProjectorPair::from_state(basis_b.state().context("field \"basis_b\"")?)?,
                    factors,
                )?;
                Ok(setting)
            }
        }
    }
}

fn default_tau() -> Vec<f64> {
    vec![0.0, 2.21, 3.66]
}

fn default_trotter() -> usize {
    5
}

fn default_trajectories() -> u64 {
    48
}

/// Full resolved run configuration. Loaded from `--config` JSON; every
/// command-line flag overrides its file value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    pub setting: SettingSpec,
    pub sweep: SweepConfig,
    /// Evolution times for the exact / circuit / bench workflows.
    pub tau: Vec<f64>,
    /// Shots per circuit part; absent means exact probabilities.
    pub shots: Option<u64>,
    /// Monte-Carlo trajectories per noisy circuit evaluation.
    pub trajectories: u64,
    pub n_trotter: usize,
    pub noise: NoisePreset,
    pub seed: u64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelParams::reference(),
            setting: SettingSpec::default(),
            sweep: SweepConfig::default(),
            tau: default_tau(),
            shots: None,
            trajectories: default_trajectories(),
            n_trotter: default_trotter(),
            noise: NoisePreset::None,
            seed: 0,
            format: Format::Json,
        }
    }
}

/// Flags shared by every subcommand; `None` means "keep the config value".
#[derive(Debug, Clone, clap::Args)]
pub struct CommonFlags {
    /// JSON run-configuration file.
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    /// RNG seed (overrides the config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Transverse-field strength omega.
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    /// Evolution time(s) tau_a, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub tau: Option<Vec<f64>>,
    /// Shots per circuit part (trajectories when a noise preset is active).
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    /// Trotter steps for the circuit propagation.
    #[arg(long, global = true)]
    pub trotter: Option<usize>,
    /// Noise preset.
    #[arg(long, global = true, value_enum)]
    pub noise: Option<NoisePreset>,
    /// Output file (directory for `sweep`); stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

impl CommonFlags {
    /// Load the config file (if any) and apply flag overrides.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            None => RunConfig::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", path.display()))?
            }
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
            config.sweep.seed = seed;
        }
        if let Some(omega) = self.omega {
            config.model = config.model.with_omega(omega);
        }
        if let Some(tau) = &self.tau {
            config.tau.clone_from(tau);
        }
        if let Some(shots) = self.shots {
            config.shots = Some(shots);
            config.trajectories = shots;
        }
        if let Some(trotter) = self.trotter {
            config.n_trotter = trotter;
        }
        if let Some(noise) = self.noise {
            config.noise = noise;
        }
        if let Some(format) = self.format {
            config.format = format;
        }
        config.sweep.validate()?;
        if config.tau.iter().any(|t| !t.is_finite() || *t < 0.0) {
            bail!("field \"tau\": times must be finite and >= 0");
        }
        Ok(config)
    }
}
