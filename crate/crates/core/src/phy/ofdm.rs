use rustfft::FftPlanner;

use super::{Complex64, Grid, PhyConfig};
use crate::{Error, Result};

/// Orthonormal inverse DFT of every OFDM symbol with the last `cp_length`
/// samples prepended as cyclic prefix. Subcarrier `k` maps to DFT bin `k`.
pub fn ofdm_modulate(grid: &Grid, cfg: &PhyConfig) -> Result<Vec<Complex64>> {
    let n = cfg.num_subcarriers;
    if grid.shape() != (cfg.num_symbols, n) {
        return Err(Error::DimensionMismatch(format!(
            "grid is {:?}, config expects ({}, {n})",
            grid.shape(),
            cfg.num_symbols
        )));
    }
    if cfg.cp_length > n {
        return Err(Error::Config("cyclic prefix longer than the symbol".into()));
    }
    let ifft = FftPlanner::new().plan_fft_inverse(n);
    let scale = 1.0 / (n as f64).sqrt();
    let mut out = Vec::with_capacity(cfg.samples_per_frame());
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for s in 0..cfg.num_symbols {
        buf.copy_from_slice(grid.row(s));
        ifft.process(&mut buf);
        for x in &mut buf {
            *x *= scale;
        }
        out.extend_from_slice(&buf[n - cfg.cp_length..]);
        out.extend_from_slice(&buf);
    }
    Ok(out)
}

/// Drops each cyclic prefix and applies the orthonormal forward DFT.
pub fn ofdm_demodulate(samples: &[Complex64], cfg: &PhyConfig) -> Result<Grid> {
    let n = cfg.num_subcarriers;
    if samples.len() != cfg.samples_per_frame() {
        return Err(Error::DimensionMismatch(format!(
            "expected {} samples, got {}",
            cfg.samples_per_frame(),
            samples.len()
        )));
    }
    let fft = FftPlanner::new().plan_fft_forward(n);
    let scale = 1.0 / (n as f64).sqrt();
    let mut grid = Grid::zeros(cfg.num_symbols, n);
    let step = n + cfg.cp_length;
    for s in 0..cfg.num_symbols {
        let row = grid.row_mut(s);
        row.copy_from_slice(&samples[s * step + cfg.cp_length..(s + 1) * step]);
        fft.process(row);
        for x in row.iter_mut() {
            *x *= scale;
        }
    }
    Ok(grid)
}
