//! JSON run configuration. Every section is optional; `{}` is the
//! attenuated 16-branch HRHT setup.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dendrite::{DendriteBank, DendriteParams};
use crate::device::{DeviceModel, DeviceParams};
use crate::error::{Error, Result};
use crate::montecarlo::{InitPolicy, WindowConfig, WindowParams};
use crate::pairing::{PairingGeometry, PairingParams};
use crate::waveform::{SpikeWaveform, WaveformParams};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationParams {
    pub dt_step: f64,
    pub pair_only: bool,
    pub amp_noise_sigma: f64,
    pub delta_t_min: f64,
    pub delta_t_max: f64,
    pub delta_t_step: f64,
    pub epochs: usize,
    pub seed: u64,
    pub init_policy: InitPolicy,
}

impl Default for SimulationParams {
    fn default() -> Self {
        let p = PairingParams::default();
        let w = WindowParams::default();
        Self {
            dt_step: p.dt_step,
            pair_only: p.pair_only,
            amp_noise_sigma: p.amp_noise_sigma,
            delta_t_min: w.delta_t_min,
            delta_t_max: w.delta_t_max,
            delta_t_step: w.delta_t_step,
            epochs: w.epochs,
            seed: w.seed,
            init_policy: w.init_policy,
        }
    }
}

impl SimulationParams {
    pub fn pairing(&self) -> PairingParams {
        PairingParams {
            dt_step: self.dt_step,
            pair_only: self.pair_only,
            amp_noise_sigma: self.amp_noise_sigma,
        }
    }

    pub fn window(&self) -> WindowParams {
        WindowParams {
            delta_t_min: self.delta_t_min,
            delta_t_max: self.delta_t_max,
            delta_t_step: self.delta_t_step,
            epochs: self.epochs,
            seed: self.seed,
            init_policy: self.init_policy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputParams {
    pub svg: bool,
    /// Height of a dot bin on the ΔG axis of the scatter plot.
    pub svg_level_bin: f64,
}

impl Default for OutputParams {
    fn default() -> Self {
        Self {
            svg: true,
            svg_level_bin: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub waveform: WaveformParams,
    /// Post-synaptic waveform; the pre waveform is reused when absent.
    pub post_waveform: Option<WaveformParams>,
    pub dendrites: DendriteParams,
    pub device: DeviceParams,
    pub simulation: SimulationParams,
    pub output: OutputParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            waveform: WaveformParams::default(),
            post_waveform: None,
            dendrites: DendriteParams::default(),
            device: DeviceParams::default(),
            simulation: SimulationParams::default(),
            output: OutputParams::default(),
        }
    }
}

impl RunConfig {
    /// Parse and validate; `origin` only labels error messages.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let message = if path == "." {
                e.inner().to_string()
            } else {
                format!("{path}: {}", e.inner())
            };
            Error::Config {
                path: origin.to_path_buf(),
                message,
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.build().map(|_| ())
    }

    /// Geometry and window parameters ready for [`crate::run_window`].
    pub fn build(&self) -> Result<WindowConfig> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(
                "schema_version",
                format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        let pre = SpikeWaveform::new(self.waveform).map_err(|e| e.in_section("waveform"))?;
        let post = match self.post_waveform {
            Some(p) => SpikeWaveform::new(p).map_err(|e| e.in_section("post_waveform"))?,
            None => pre,
        };
        let bank =
            DendriteBank::from_params(&self.dendrites).map_err(|e| e.in_section("dendrites"))?;
        let device = DeviceModel::new(self.device).map_err(|e| e.in_section("device"))?;
        let geometry = PairingGeometry::new(pre, post, bank, device, self.simulation.pairing())
            .map_err(|e| e.in_section("simulation"))?;
        let window = self.simulation.window();
        window.validate().map_err(|e| e.in_section("simulation"))?;
        if !(self.output.svg_level_bin.is_finite() && self.output.svg_level_bin > 0.0) {
            return Err(Error::invalid("output.svg_level_bin", "must be positive"));
        }
        Ok(WindowConfig { geometry, window })
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    RunConfig::from_json(&text, path)
}
