use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::channel::ChannelConfig;
use crate::fec::{BpAlgorithm, DecoderConfig, DEFAULT_MAX_ITERS, DEFAULT_MIN_SUM_OFFSET};
use crate::metrics::Mode;
use crate::phy::PhyConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FecAlgorithm {
    SumProduct,
    MinSum,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FecConfig {
    /// Parity-check construction seed.
    pub seed: u64,
    pub max_iters: usize,
    pub algorithm: FecAlgorithm,
    pub min_sum_offset: f64,
}

impl Default for FecConfig {
    fn default() -> Self {
        FecConfig {
            seed: 7,
            max_iters: DEFAULT_MAX_ITERS,
            algorithm: FecAlgorithm::SumProduct,
            min_sum_offset: DEFAULT_MIN_SUM_OFFSET,
        }
    }
}

impl FecConfig {
    pub fn decoder(&self) -> DecoderConfig {
        DecoderConfig {
            max_iters: self.max_iters,
            algorithm: match self.algorithm {
                FecAlgorithm::SumProduct => BpAlgorithm::SumProduct,
                FecAlgorithm::MinSum => BpAlgorithm::MinSum {
                    offset: self.min_sum_offset,
                },
            },
        }
    }
}

/// How delivered bits `B_s` are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuccessAccounting {
    /// `B_s = (1 - BER) · B_t` over payload bits.
    #[default]
    Bit,
    /// A frame counts only if its whole payload is error-free.
    Frame,
}

fn default_modes() -> Vec<Mode> {
    vec![Mode::Semantic, Mode::Conventional]
}

fn default_trials() -> usize {
    200
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_modes")]
    pub modes: Vec<Mode>,
    /// Es/N0 per receive antenna.
    pub snr_db: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials_per_point: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Directory of `<name>.png` + `<name>.txt` pairs.
    pub corpus: Option<PathBuf>,
    /// Corpus entries to transmit, cycled by trial index. Empty means all.
    #[serde(default)]
    pub images: Vec<String>,
    /// Use the model gateway instead of the fixture codec.
    pub gateway_url: Option<String>,
    #[serde(default = "yes")]
    pub bleu: bool,
    #[serde(default = "yes")]
    pub ssim: bool,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub success: SuccessAccounting,
    /// Leading `# generated_at=` line in the trial CSV.
    #[serde(default = "yes")]
    pub timestamp: bool,
    /// Equalize with the true channel and noise variance.
    #[serde(default)]
    pub perfect_csi: bool,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub phy: PhyConfig,
    #[serde(default)]
    pub fec: FecConfig,
}

impl SweepConfig {
    /// Parses TOML. Relative `corpus` and `output` paths are resolved
    /// against `base_dir`.
    pub fn from_toml_str(src: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut cfg: SweepConfig = toml::from_str(src).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(base) = base_dir {
            for p in [&mut cfg.corpus, &mut cfg.output].into_iter().flatten() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SweepConfig::from_toml_str(&src, path.parent())
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes.is_empty() {
            return Err(Error::Config("`modes` is empty".into()));
        }
        if self.snr_db.is_empty() {
            return Err(Error::Config("`snr_db` is empty".into()));
        }
        if self.snr_db.iter().any(|s| s.is_nan()) {
            return Err(Error::Config("`snr_db` contains NaN".into()));
        }
        if self.trials_per_point < 1 {
            return Err(Error::Config("`trials_per_point` must be >= 1".into()));
        }
        if self.corpus.is_none() {
            return Err(Error::Config("`corpus` is required".into()));
        }
        if self.fec.max_iters < 1 {
            return Err(Error::Config("`fec.max_iters` must be >= 1".into()));
        }
        if !(self.fec.min_sum_offset >= 0.0) {
            return Err(Error::Config("`fec.min_sum_offset` must be >= 0".into()));
        }
        self.channel.validate()?;
        self.phy
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}
