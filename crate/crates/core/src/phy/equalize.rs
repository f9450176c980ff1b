use super::{qam_demap_llr_per_cell, ChannelEstimate, Complex64, Grid};
use crate::fec::LlrVector;
use crate::{Error, Result};

/// MMSE-combined symbols and the post-combining SNR of every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Equalized {
    pub symbols: Grid,
    pub post_snr: Vec<f64>,
}

/// Per-cell MMSE combining over the receive antennas:
/// `x̂ = Σ conj(h_i) y_i / (Σ |h_i|² + σ²)` with post-combining SNR
/// `Σ |h_i|² / σ²`. A cell whose estimated gains are all zero is an erasure
/// (output 0, SNR 0).
pub fn equalize_combine(rx_grids: &[Grid], est: &ChannelEstimate) -> Result<Equalized> {
    if rx_grids.len() != est.gains.len() || rx_grids.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "{} receive grids but {} channel estimates",
            rx_grids.len(),
            est.gains.len()
        )));
    }
    let shape = rx_grids[0].shape();
    if rx_grids
        .iter()
        .chain(&est.gains)
        .any(|g| g.shape() != shape)
    {
        return Err(Error::DimensionMismatch("grid shapes differ".into()));
    }
    let nv = est.noise_variance;
    if !(nv > 0.0) || !nv.is_finite() {
        return Err(Error::InvalidInput(format!("noise variance {nv}")));
    }
    let cells = shape.0 * shape.1;
    let mut out = Vec::with_capacity(cells);
    let mut post_snr = Vec::with_capacity(cells);
    for c in 0..cells {
        let mut num = Complex64::new(0.0, 0.0);
        let mut gain = 0.0;
        for (y, h) in rx_grids.iter().zip(&est.gains) {
            let h = h.cells()[c];
            num += h.conj() * y.cells()[c];
            gain += h.norm_sqr();
        }
        if gain == 0.0 {
            out.push(Complex64::new(0.0, 0.0));
            post_snr.push(0.0);
        } else {
            out.push(num / (gain + nv));
            post_snr.push(gain / nv);
        }
    }
    Ok(Equalized {
        symbols: Grid::from_vec(shape.0, shape.1, out)?,
        post_snr,
    })
}

/// LLRs for MMSE outputs. The MMSE estimate is biased by
/// `snr / (1 + snr)`; removing the bias leaves noise variance `1 / snr`.
pub fn demap_equalized(symbols: &[Complex64], post_snr: &[f64]) -> Result<LlrVector> {
    if symbols.len() != post_snr.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} symbols but {} SNR values",
            symbols.len(),
            post_snr.len()
        )));
    }
    let mut unbiased = Vec::with_capacity(symbols.len());
    let mut vars = Vec::with_capacity(symbols.len());
    for (&x, &snr) in symbols.iter().zip(post_snr) {
        if snr > 0.0 {
            unbiased.push(x * (1.0 + 1.0 / snr));
            vars.push(1.0 / snr);
        } else {
            unbiased.push(Complex64::new(0.0, 0.0));
            vars.push(f64::INFINITY);
        }
    }
    qam_demap_llr_per_cell(&unbiased, &vars)
}
