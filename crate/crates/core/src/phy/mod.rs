//! OFDM physical layer: 4-QAM mapping, the resource grid with full pilot
//! symbols, OFDM (de)modulation, pilot-based channel estimation and MMSE
//! receive combining.

mod equalize;
mod estimate;
mod grid;
mod ofdm;
mod qam;

pub use equalize::{demap_equalized, equalize_combine, Equalized};
pub use estimate::{estimate_channel, ChannelEstimate, MIN_NOISE_VARIANCE};
pub use grid::{build_grid, extract_data, pilot_sequence, write_grid_csv, Grid, ResourceGrid};
pub use ofdm::{ofdm_demodulate, ofdm_modulate};
pub use qam::{qam_demap_llr, qam_demap_llr_per_cell, qam_map};

use serde::Deserialize;

use crate::{Error, Result};

pub use num_complex::Complex64;

/// Numerology and antenna setup of the link. Defaults: 128 subcarriers at
/// 240 kHz, 14 OFDM symbols with pilots on symbols 2 and 11, 1 Tx / 2 Rx,
/// 28 GHz carrier, 16-sample cyclic prefix.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhyConfig {
    pub num_subcarriers: usize,
    pub num_symbols: usize,
    pub subcarrier_spacing_hz: f64,
    pub pilot_symbols: Vec<usize>,
    pub num_rx_antennas: usize,
    pub num_tx_antennas: usize,
    pub carrier_hz: f64,
    pub cp_length: usize,
    pub pilot_seed: u64,
}

impl Default for PhyConfig {
    fn default() -> Self {
        PhyConfig {
            num_subcarriers: 128,
            num_symbols: 14,
            subcarrier_spacing_hz: 240e3,
            pilot_symbols: vec![2, 11],
            num_rx_antennas: 2,
            num_tx_antennas: 1,
            carrier_hz: 28e9,
            cp_length: 16,
            pilot_seed: 0x9e37_79b9,
        }
    }
}

pub const BITS_PER_SYMBOL: usize = 2;

impl PhyConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.num_subcarriers == 0 || self.num_symbols == 0 {
            return bad("grid dimensions must be positive".into());
        }
        if self.num_rx_antennas == 0 {
            return bad("need at least one receive antenna".into());
        }
        if self.num_tx_antennas != 1 {
            return bad(format!(
                "only a single transmit antenna is supported, got {}",
                self.num_tx_antennas
            ));
        }
        if !(self.subcarrier_spacing_hz > 0.0) || !(self.carrier_hz > 0.0) {
            return bad("subcarrier spacing and carrier frequency must be positive".into());
        }
        if self.pilot_symbols.is_empty() {
            return bad("at least one pilot symbol is required".into());
        }
        let mut sorted = self.pilot_symbols.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.pilot_symbols.len() || sorted != self.pilot_symbols {
            return bad("pilot symbol indices must be strictly increasing".into());
        }
        if *sorted.last().unwrap() >= self.num_symbols {
            return bad(format!(
                "pilot symbol indices must be < {}",
                self.num_symbols
            ));
        }
        if sorted.len() == self.num_symbols {
            return bad("no data symbols left after pilots".into());
        }
        Ok(())
    }

    pub fn is_pilot_symbol(&self, symbol: usize) -> bool {
        self.pilot_symbols.contains(&symbol)
    }

    pub fn num_data_symbols(&self) -> usize {
        self.num_symbols - self.pilot_symbols.len()
    }

    pub fn num_data_cells(&self) -> usize {
        self.num_data_symbols() * self.num_subcarriers
    }

    /// Coded bits one resource grid carries.
    pub fn coded_bits_per_frame(&self) -> usize {
        self.num_data_cells() * BITS_PER_SYMBOL
    }

    /// Samples per second of the time-domain signal.
    pub fn sample_rate_hz(&self) -> f64 {
        self.num_subcarriers as f64 * self.subcarrier_spacing_hz
    }

    /// Duration of one OFDM symbol including its cyclic prefix.
    pub fn symbol_duration_s(&self) -> f64 {
        (self.num_subcarriers + self.cp_length) as f64 / self.sample_rate_hz()
    }

    pub fn cp_duration_s(&self) -> f64 {
        self.cp_length as f64 / self.sample_rate_hz()
    }

    pub fn samples_per_frame(&self) -> usize {
        self.num_symbols * (self.num_subcarriers + self.cp_length)
    }
}
