//! Configuration: the pipeline knobs and the sectioned `key = value` file
//! that carries them.
//!
//! ```toml
//! [pipeline]
//! fusion_scale = 4
//! hue_decouple_threshold = 0.1
//! downsample_kernel = [1.0, 4.0, 6.0, 4.0, 1.0]
//!
//! [pipeline.gabor]
//! kernel_size = 9
//! wavelength = 7.0
//!
//! [localizer]
//! blur_sigma_frac = 0.01
//!
//! [camera]
//! short_hfov_deg = 100.0
//!
//! [control]
//! parallax_range_m = 20.0
//! ```
//!
//! Every section and key is optional; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::gimbal::{CameraGeometry, ControlConfig};
use crate::localizer::LocalizerConfig;
use crate::saliency::{GaborParams, LEVELS};
use crate::{Error, Result};

/// Environment variable consulted when no `--config` is given.
pub const CONFIG_ENV: &str = "EAGLE_EYE_CONFIG";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Pyramid level at which conspicuity and saliency maps live.
    pub fusion_scale: u32,
    /// Channels are divided by intensity only above this fraction of the
    /// maximum intensity.
    pub hue_decouple_threshold: f64,
    /// 1-D low-pass kernel applied separably before each decimation.
    /// Normalized to unit sum before use.
    pub downsample_kernel: Vec<f64>,
    pub gabor: GaborParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            fusion_scale: 4,
            hue_decouple_threshold: 0.1,
            downsample_kernel: vec![1.0, 4.0, 6.0, 4.0, 1.0],
            gabor: GaborParams::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(2..LEVELS as u32).contains(&self.fusion_scale) {
            return bad(format!(
                "pipeline.fusion_scale = {} is outside 2..={}",
                self.fusion_scale,
                LEVELS - 1
            ));
        }
        let t = self.hue_decouple_threshold;
        if !(t > 0.0 && t < 1.0) {
            return bad(format!(
                "pipeline.hue_decouple_threshold = {t} is outside (0, 1)"
            ));
        }
        let k = &self.downsample_kernel;
        if k.len() % 2 == 0
            || k.iter().any(|v| !v.is_finite() || *v < 0.0)
            || k.iter().sum::<f64>() <= 0.0
        {
            return bad("pipeline.downsample_kernel needs an odd number of non-negative taps with positive sum".into());
        }
        let g = &self.gabor;
        if g.kernel_size < 3 || g.kernel_size % 2 == 0 {
            return bad(format!(
                "pipeline.gabor.kernel_size = {} must be odd and at least 3",
                g.kernel_size
            ));
        }
        for (name, v) in [
            ("wavelength", g.wavelength),
            ("sigma", g.sigma),
            ("aspect", g.aspect),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("pipeline.gabor.{name} = {v} must be positive"));
            }
        }
        if !g.phase_deg.is_finite() {
            return bad("pipeline.gabor.phase_deg must be finite".into());
        }
        Ok(())
    }
}

/// Contents of a configuration file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub pipeline: PipelineConfig,
    pub localizer: LocalizerConfig,
    pub camera: CameraGeometry,
    pub control: ControlConfig,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline.validate()?;
        self.localizer.validate()?;
        self.camera.validate()?;
        self.control.validate()
    }
}

/// Everything a command needs: the merged configuration plus the paths and
/// seed given on the command line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub settings: ConfigFile,
    pub config_path: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// Overrides the scene seed when set.
    pub seed: Option<u64>,
}

impl RunConfig {
    /// Resolves the configuration file: explicit path first, then
    /// [`CONFIG_ENV`], then built-in defaults.
    pub fn resolve(explicit: Option<&Path>, out_dir: PathBuf, seed: Option<u64>) -> Result<Self> {
        let from_env = std::env::var_os(CONFIG_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from);
        let config_path = explicit.map(Path::to_path_buf).or(from_env);
        let settings = match &config_path {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        Ok(Self {
            settings,
            config_path,
            out_dir,
            seed,
        })
    }
}
