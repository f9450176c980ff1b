use crate::channel::{apply_channel, noise_variance_for_snr, realize, ChannelConfig};
use crate::fec::{build_code, DecoderConfig, LdpcCode};
use crate::phy::{
    build_grid, demap_equalized, equalize_combine, estimate_channel, extract_data, ofdm_demodulate,
    ofdm_modulate, ChannelEstimate, PhyConfig, MIN_NOISE_VARIANCE,
};
use crate::{Bit, Error, Result};

use super::{sub_seed, FecConfig};

/// Information bits recovered from one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkOutput {
    pub info: Vec<Bit>,
    pub converged: bool,
    pub iterations: usize,
}

/// LDPC + 4-QAM OFDM link over one channel model. One call to
/// [`Link::transmit`] carries `capacity_bits()` information bits in one
/// resource grid.
#[derive(Debug, Clone)]
pub struct Link {
    phy: PhyConfig,
    channel: ChannelConfig,
    code: LdpcCode,
    decoder: DecoderConfig,
    perfect_csi: bool,
}

impl Link {
    pub fn new(
        phy: &PhyConfig,
        channel: &ChannelConfig,
        fec: &FecConfig,
        perfect_csi: bool,
    ) -> Result<Self> {
        phy.validate()?;
        channel.validate()?;
        let code = build_code(phy.coded_bits_per_frame(), fec.seed)?;
        Ok(Link {
            phy: phy.clone(),
            channel: channel.clone(),
            code,
            decoder: fec.decoder(),
            perfect_csi,
        })
    }

    pub fn capacity_bits(&self) -> usize {
        self.code.k()
    }

    pub fn code(&self) -> &LdpcCode {
        &self.code
    }

    pub fn phy(&self) -> &PhyConfig {
        &self.phy
    }

    /// Encode, map, OFDM, channel, estimate, combine, demap and decode one
    /// frame. Channel draw and noise are functions of `seed` alone.
    pub fn transmit(&self, info: &[Bit], snr_db: f64, seed: u64) -> Result<LinkOutput> {
        if info.len() != self.capacity_bits() {
            return Err(Error::CapacityMismatch {
                expected: self.capacity_bits(),
                actual: info.len(),
            });
        }
        let codeword = self.code.encode(info)?;
        let grid = build_grid(&codeword, &self.phy)?;
        let samples = ofdm_modulate(&grid.symbols, &self.phy)?;
        // taps lie inside the CP, so the channel acts per subcarrier after the FFT
        let tx = ofdm_demodulate(&samples, &self.phy)?;

        let mut ch = self.channel.clone();
        ch.seed = sub_seed(seed, "channel", 0);
        let real = realize(&ch, &self.phy)?;
        let rx = apply_channel(&tx, &real, snr_db, sub_seed(seed, "noise", 0))?;

        let est = if self.perfect_csi {
            ChannelEstimate {
                gains: real.responses,
                noise_variance: noise_variance_for_snr(snr_db).max(MIN_NOISE_VARIANCE),
            }
        } else {
            estimate_channel(&rx, &self.phy)?
        };
        let eq = equalize_combine(&rx, &est)?;
        let symbols = extract_data(eq.symbols.cells(), &self.phy);
        let post_snr = extract_data(&eq.post_snr, &self.phy);
        let llrs = demap_equalized(&symbols, &post_snr)?;
        let out = self.code.decode(&llrs, &self.decoder)?;
        Ok(LinkOutput {
            info: out.info,
            converged: out.converged,
            iterations: out.iterations,
        })
    }
}
