use crate::{Error, Result};

/// Intermediate quantities of the effective data rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBreakdown {
    /// `1 / f_s`
    pub symbol_time_s: f64,
    /// `N * T_symbol`
    pub total_time_s: f64,
    /// `R = B_t / T`
    pub data_rate_bps: f64,
    /// `S = B_s / B_t`
    pub success_rate: f64,
    /// `R * S`
    pub effective_rate_bps: f64,
}

/// Effective data rate `R × S` with `R = B_t / T`, `S = B_s / B_t`,
/// `T = N / f_s`. Bit counts are real-valued so fractional success rates can
/// be evaluated directly.
pub fn effective_data_rate(
    bits_total: f64,
    bits_success: f64,
    num_ofdm_symbols: f64,
    subcarrier_spacing_hz: f64,
) -> Result<RateBreakdown> {
    if !(bits_total > 0.0) || !bits_total.is_finite() {
        return Err(Error::InvalidInput(format!("B_t = {bits_total}")));
    }
    if !(0.0..=bits_total).contains(&bits_success) {
        return Err(Error::InvalidInput(format!(
            "B_s = {bits_success} outside [0, {bits_total}]"
        )));
    }
    if !(subcarrier_spacing_hz > 0.0) || !subcarrier_spacing_hz.is_finite() {
        return Err(Error::InvalidInput(format!(
            "f_s = {subcarrier_spacing_hz}"
        )));
    }
    let symbol_time_s = 1.0 / subcarrier_spacing_hz;
    let total_time_s = num_ofdm_symbols * symbol_time_s;
    if !(total_time_s > 0.0) {
        return Err(Error::InvalidInput(
            "total transmission time is zero".into(),
        ));
    }
    let data_rate_bps = bits_total / total_time_s;
    let success_rate = bits_success / bits_total;
    Ok(RateBreakdown {
        symbol_time_s,
        total_time_s,
        data_rate_bps,
        success_rate,
        effective_rate_bps: data_rate_bps * success_rate,
    })
}

/// `conventional_bits / semantic_bits`.
pub fn compression_ratio(conventional_bits: f64, semantic_bits: f64) -> Result<f64> {
    if !(semantic_bits > 0.0) {
        return Err(Error::InvalidInput(format!(
            "semantic payload of {semantic_bits} bits"
        )));
    }
    if !(conventional_bits >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "conventional payload of {conventional_bits} bits"
        )));
    }
    Ok(conventional_bits / semantic_bits)
}
