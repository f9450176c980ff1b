use std::f64::consts::FRAC_1_SQRT_2;

use super::Complex64;
use crate::fec::LlrVector;
use crate::{Bit, Error, Result};

/// Gray 4-QAM with unit average energy: `(b0, b1)` maps to
/// `((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)`.
pub fn qam_map(bits: &[Bit]) -> Result<Vec<Complex64>> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "4-QAM needs an even number of bits, got {}",
            bits.len()
        )));
    }
    Ok(bits
        .chunks_exact(2)
        .map(|p| {
            Complex64::new(
                (1.0 - 2.0 * (p[0] & 1) as f64) * FRAC_1_SQRT_2,
                (1.0 - 2.0 * (p[1] & 1) as f64) * FRAC_1_SQRT_2,
            )
        })
        .collect())
}

/// Max-log LLRs for symbols with a common noise variance. For Gray 4-QAM the
/// max-log value is exact per axis: `2 sqrt(2) Re(y) / σ²` and
/// `2 sqrt(2) Im(y) / σ²`.
pub fn qam_demap_llr(symbols: &[Complex64], noise_variance: f64) -> Result<LlrVector> {
    if !(noise_variance > 0.0) || !noise_variance.is_finite() {
        return Err(Error::InvalidInput(format!(
            "noise variance must be positive and finite, got {noise_variance}"
        )));
    }
    let vars = vec![noise_variance; symbols.len()];
    qam_demap_llr_per_cell(symbols, &vars)
}

/// As [`qam_demap_llr`] with one noise variance per symbol. An infinite
/// variance marks an erased symbol and yields zero LLRs.
pub fn qam_demap_llr_per_cell(symbols: &[Complex64], noise_vars: &[f64]) -> Result<LlrVector> {
    if symbols.len() != noise_vars.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} symbols but {} noise variances",
            symbols.len(),
            noise_vars.len()
        )));
    }
    let scale = 2.0 * std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(symbols.len() * 2);
    for (i, (y, &nv)) in symbols.iter().zip(noise_vars).enumerate() {
        if !y.re.is_finite() || !y.im.is_finite() {
            return Err(Error::NonFinite(format!("symbol {i} is {y}")));
        }
        if nv.is_infinite() {
            out.extend([0.0, 0.0]);
            continue;
        }
        if !(nv > 0.0) {
            return Err(Error::InvalidInput(format!(
                "noise variance {nv} at symbol {i}"
            )));
        }
        out.push(scale * y.re / nv);
        out.push(scale * y.im / nv);
    }
    LlrVector::new(out)
}
