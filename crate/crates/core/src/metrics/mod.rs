//! Link and quality metrics.

mod bleu;
mod rate;
mod ssim;

pub use bleu::{bleu, BLEU_EPSILON};
pub use rate::{compression_ratio, effective_data_rate, RateBreakdown};
pub use ssim::{luma, ssim, ssim_luma, SSIM_K1, SSIM_K2, SSIM_SIGMA, SSIM_WINDOW};

use crate::{Bit, Error, Result};

/// Fraction of positions where the two bit sequences differ.
pub fn ber(tx: &[Bit], rx: &[Bit]) -> Result<f64> {
    if tx.len() != rx.len() {
        return Err(Error::DimensionMismatch(format!(
            "bit sequences of length {} and {}",
            tx.len(),
            rx.len()
        )));
    }
    if tx.is_empty() {
        return Ok(0.0);
    }
    Ok(bit_errors(tx, rx) as f64 / tx.len() as f64)
}

/// Hamming distance over the common prefix.
pub fn bit_errors(tx: &[Bit], rx: &[Bit]) -> usize {
    tx.iter()
        .zip(rx)
        .filter(|(a, b)| (*a & 1) != (*b & 1))
        .count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Semantic,
    Conventional,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Semantic => "semantic",
            Mode::Conventional => "conventional",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "semantic" => Ok(Mode::Semantic),
            "conventional" => Ok(Mode::Conventional),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

/// Outcome of one end-to-end transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub mode: Mode,
    pub snr_db: f64,
    pub trial: usize,
    pub seed: u64,
    /// Payload bits sent (B_t).
    pub bits_total: u64,
    /// Payload bits delivered correctly (B_s).
    pub bits_success: u64,
    pub num_ofdm_symbols: u64,
    pub total_time_s: f64,
    pub ber: f64,
    /// Text modes only.
    pub bleu: Option<f64>,
    pub ssim: Option<f64>,
    pub effective_rate_bps: f64,
    pub frames: usize,
    pub frames_decoded: usize,
    pub received_text: Option<String>,
    /// Set when the trial could not run to completion.
    pub error: Option<String>,
}

impl TrialReport {
    pub fn failed(mode: Mode, snr_db: f64, trial: usize, seed: u64, error: String) -> Self {
        TrialReport {
            mode,
            snr_db,
            trial,
            seed,
            bits_total: 0,
            bits_success: 0,
            num_ofdm_symbols: 0,
            total_time_s: 0.0,
            ber: f64::NAN,
            bleu: None,
            ssim: None,
            effective_rate_bps: f64::NAN,
            frames: 0,
            frames_decoded: 0,
            received_text: None,
            error: Some(error),
        }
    }

    pub fn is_failed(&self) -> bool {
        self.error.is_some()
    }
}
