//! Channel models for one transmit and several receive antennas.
//!
//! [`ChannelKind::TdlFading`] approximates an urban macro-cell link with a
//! tapped delay line: an exponential power-delay profile, taps on the sample
//! grid and inside the cyclic prefix, and per-tap Rayleigh gains whose time
//! evolution follows a Jakes-like Doppler spectrum. Each tap gain is a
//! Gaussian-weighted sum of sinusoids,
//!
//! ```text
//! g(t) = 1/sqrt(M) * Σ_n A_n exp(j (2π f_d cos(α_n) t + φ_n)),   A_n ~ CN(0, 1)
//! ```
//!
//! which is exactly complex Gaussian at every instant. The channel is
//! constant over one OFDM symbol and applied per cell in the frequency
//! domain.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Deserialize;

use crate::phy::{Complex64, Grid, PhyConfig};
use crate::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 2.998e8;
const NUM_SINUSOIDS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Awgn,
    #[serde(rename = "tdl", alias = "tdl_fading")]
    TdlFading,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    /// Es/N0 per receive antenna.
    pub snr_db: f64,
    pub speed_kmh: f64,
    pub carrier_hz: f64,
    pub delay_spread_ns: f64,
    pub num_taps: usize,
    pub seed: u64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            kind: ChannelKind::TdlFading,
            snr_db: 10.0,
            speed_kmh: 90.0,
            carrier_hz: 28e9,
            delay_spread_ns: 300.0,
            num_taps: 8,
            seed: 0,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_nan() {
            return Err(Error::Config("snr_db must be a number".into()));
        }
        if !(self.speed_kmh >= 0.0) || !self.speed_kmh.is_finite() {
            return Err(Error::Config(format!("speed {} km/h", self.speed_kmh)));
        }
        if !(self.delay_spread_ns > 0.0) || !self.delay_spread_ns.is_finite() {
            return Err(Error::Config(format!(
                "delay spread {} ns",
                self.delay_spread_ns
            )));
        }
        if !(self.carrier_hz > 0.0) {
            return Err(Error::Config(format!("carrier {} Hz", self.carrier_hz)));
        }
        if self.num_taps < 1 {
            return Err(Error::Config("num_taps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Maximum Doppler shift `v fc / c` in Hz for a speed in km/h.
pub fn max_doppler(speed_kmh: f64, carrier_hz: f64) -> f64 {
    speed_kmh / 3.6 * carrier_hz / SPEED_OF_LIGHT
}

/// Complex noise variance per receive antenna for an Es/N0 in dB with unit
/// signal and channel power. `+inf` dB gives zero noise.
pub fn noise_variance_for_snr(snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        0.0
    } else {
        10f64.powf(-snr_db / 10.0)
    }
}

/// One frame's channel: per-antenna frequency responses on the grid, plus the
/// underlying taps.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `[antenna]` grids of shape `[OFDM symbol × subcarrier]`.
    pub responses: Vec<Grid>,
    /// Tap delays in samples of the OFDM sample clock.
    pub tap_delays_samples: Vec<usize>,
    /// Normalized tap powers (sum 1).
    pub tap_powers: Vec<f64>,
    /// `[antenna][symbol][tap]` unit-variance tap gains before power scaling.
    pub tap_gains: Vec<Vec<Vec<Complex64>>>,
    pub max_doppler_hz: f64,
}

impl ChannelRealization {
    /// Unit gain on every cell and antenna.
    pub fn identity(phy: &PhyConfig) -> Self {
        ChannelRealization {
            responses: vec![
                Grid::filled(
                    phy.num_symbols,
                    phy.num_subcarriers,
                    Complex64::new(1.0, 0.0)
                );
                phy.num_rx_antennas
            ],
            tap_delays_samples: vec![0],
            tap_powers: vec![1.0],
            tap_gains: vec![
                vec![vec![Complex64::new(1.0, 0.0)]; phy.num_symbols];
                phy.num_rx_antennas
            ],
            max_doppler_hz: 0.0,
        }
    }

    pub fn num_antennas(&self) -> usize {
        self.responses.len()
    }

    /// CSV dump: `antenna,symbol,subcarrier,re,im`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::from("antenna,symbol,subcarrier,re,im\n");
        for (a, g) in self.responses.iter().enumerate() {
            let (ns, nk) = g.shape();
            for s in 0..ns {
                for k in 0..nk {
                    let h = g.get(s, k);
                    out.push_str(&format!("{a},{s},{k},{},{}\n", h.re, h.im));
                }
            }
        }
        std::fs::File::create(path)
            .and_then(|mut f| f.write_all(out.as_bytes()))
            .map_err(|e| Error::io(path, e))
    }
}

/// Tap delays (in samples) and normalized powers of the exponential
/// power-delay profile. Taps are spaced evenly over three delay spreads but
/// never beyond the cyclic prefix.
pub fn power_delay_profile(cfg: &ChannelConfig, phy: &PhyConfig) -> Result<(Vec<usize>, Vec<f64>)> {
    cfg.validate()?;
    let fs = phy.sample_rate_hz();
    let ds = cfg.delay_spread_ns * 1e-9;
    let spacing = if cfg.num_taps == 1 {
        0
    } else {
        let by_spread = 3.0 * ds * fs / (cfg.num_taps - 1) as f64;
        let by_cp = phy.cp_length as f64 / (cfg.num_taps - 1) as f64;
        (by_spread.min(by_cp).floor() as usize).max(1)
    };
    let delays: Vec<usize> = (0..cfg.num_taps).map(|l| l * spacing).collect();
    if *delays.last().unwrap() > phy.cp_length {
        return Err(Error::Config(format!(
            "{} taps do not fit in a {}-sample cyclic prefix",
            cfg.num_taps, phy.cp_length
        )));
    }
    let raw: Vec<f64> = delays
        .iter()
        .map(|&d| (-(d as f64 / fs) / ds).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    Ok((delays, raw.into_iter().map(|p| p / total).collect()))
}

struct SosTap {
    amps: [Complex64; NUM_SINUSOIDS],
    freqs: [f64; NUM_SINUSOIDS],
    phases: [f64; NUM_SINUSOIDS],
}

impl SosTap {
    fn new(doppler_hz: f64, rng: &mut ChaCha8Rng) -> Self {
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = [Complex64::new(0.0, 0.0); NUM_SINUSOIDS];
        let mut freqs = [0.0; NUM_SINUSOIDS];
        let mut phases = [0.0; NUM_SINUSOIDS];
        for n in 0..NUM_SINUSOIDS {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            amps[n] = Complex64::new(re * half, im * half);
            let alpha = rng.random::<f64>() * 2.0 * PI;
            freqs[n] = doppler_hz * alpha.cos();
            phases[n] = rng.random::<f64>() * 2.0 * PI;
        }
        SosTap {
            amps,
            freqs,
            phases,
        }
    }

    fn at(&self, t: f64) -> Complex64 {
        let sum: Complex64 = (0..NUM_SINUSOIDS)
            .map(|n| {
                self.amps[n]
                    * Complex64::from_polar(1.0, 2.0 * PI * self.freqs[n] * t + self.phases[n])
            })
            .sum();
        sum / (NUM_SINUSOIDS as f64).sqrt()
    }
}

/// Draws one frame of the fading channel, deterministic in `cfg.seed`.
/// Antennas fade independently.
pub fn realize_tdl(cfg: &ChannelConfig, phy: &PhyConfig) -> Result<ChannelRealization> {
    phy.validate()?;
    let (delays, powers) = power_delay_profile(cfg, phy)?;
    let fd = max_doppler(cfg.speed_kmh, cfg.carrier_hz);
    let t_sym = phy.symbol_duration_s();
    let nk = phy.num_subcarriers;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // e^{-j 2π k d / N} per tap and subcarrier
    let steering: Vec<Vec<Complex64>> = delays
        .iter()
        .map(|&d| {
            (0..nk)
                .map(|k| Complex64::from_polar(1.0, -2.0 * PI * (k * d) as f64 / nk as f64))
                .collect()
        })
        .collect();
    let amp: Vec<f64> = powers.iter().map(|p| p.sqrt()).collect();

    let mut responses = Vec::with_capacity(phy.num_rx_antennas);
    let mut tap_gains = Vec::with_capacity(phy.num_rx_antennas);
    for _ in 0..phy.num_rx_antennas {
        let taps: Vec<SosTap> = (0..delays.len())
            .map(|_| SosTap::new(fd, &mut rng))
            .collect();
        let mut grid = Grid::zeros(phy.num_symbols, nk);
        let mut per_symbol = Vec::with_capacity(phy.num_symbols);
        for s in 0..phy.num_symbols {
            let t = s as f64 * t_sym;
            let g: Vec<Complex64> = taps.iter().map(|tap| tap.at(t)).collect();
            let row = grid.row_mut(s);
            for (l, gl) in g.iter().enumerate() {
                let w = gl * amp[l];
                for (cell, st) in row.iter_mut().zip(&steering[l]) {
                    *cell += w * st;
                }
            }
            per_symbol.push(g);
        }
        responses.push(grid);
        tap_gains.push(per_symbol);
    }
    Ok(ChannelRealization {
        responses,
        tap_delays_samples: delays,
        tap_powers: powers,
        tap_gains,
        max_doppler_hz: fd,
    })
}

/// Identity for AWGN, a fresh TDL draw otherwise.
pub fn realize(cfg: &ChannelConfig, phy: &PhyConfig) -> Result<ChannelRealization> {
    match cfg.kind {
        ChannelKind::Awgn => {
            cfg.validate()?;
            phy.validate()?;
            Ok(ChannelRealization::identity(phy))
        }
        ChannelKind::TdlFading => realize_tdl(cfg, phy),
    }
}

/// `y = h x + n` on every cell of every antenna, with complex noise of
/// variance `10^(-snr_db/10)` drawn from `seed`.
pub fn apply_channel(
    tx: &Grid,
    real: &ChannelRealization,
    snr_db: f64,
    seed: u64,
) -> Result<Vec<Grid>> {
    if snr_db.is_nan() {
        return Err(Error::InvalidInput("snr_db is NaN".into()));
    }
    let sigma = (noise_variance_for_snr(snr_db) / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    real.responses
        .iter()
        .map(|h| {
            if h.shape() != tx.shape() {
                return Err(Error::DimensionMismatch(format!(
                    "channel is {:?}, grid is {:?}",
                    h.shape(),
                    tx.shape()
                )));
            }
            let (ns, nk) = tx.shape();
            let cells = tx
                .cells()
                .iter()
                .zip(h.cells())
                .map(|(x, h)| {
                    let n = if sigma > 0.0 {
                        Complex64::new(
                            sigma * rng.sample::<f64, _>(StandardNormal),
                            sigma * rng.sample::<f64, _>(StandardNormal),
                        )
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    h * x + n
                })
                .collect();
            Grid::from_vec(ns, nk, cells)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doppler_values() {
        // 25 m/s * 28e9 / 2.998e8 = 2334.89 Hz
        let fd = max_doppler(90.0, 28e9);
        assert!((fd - 2334.9).abs() / 2334.9 < 1e-3, "{fd}");
        assert_eq!(max_doppler(0.0, 28e9), 0.0);
        let fd = max_doppler(120.0, 28e9);
        assert!((fd - 3113.2).abs() / 3113.2 < 1e-3, "{fd}");
    }

    #[test]
    fn default_profile_fits_cyclic_prefix() {
        let (d, p) = power_delay_profile(&ChannelConfig::default(), &PhyConfig::default()).unwrap();
        assert_eq!(d, vec![0, 2, 4, 6, 8, 10, 12, 14]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn too_many_taps_rejected() {
        let cfg = ChannelConfig {
            num_taps: 40,
            ..ChannelConfig::default()
        };
        assert!(power_delay_profile(&cfg, &PhyConfig::default()).is_err());
        let cfg = ChannelConfig {
            num_taps: 0,
            ..ChannelConfig::default()
        };
        assert!(realize_tdl(&cfg, &PhyConfig::default()).is_err());
    }

    #[test]
    fn static_single_tap_is_flat_and_constant() {
        let cfg = ChannelConfig {
            num_taps: 1,
            speed_kmh: 0.0,
            seed: 5,
            ..ChannelConfig::default()
        };
        let r = realize_tdl(&cfg, &PhyConfig::default()).unwrap();
        for g in &r.responses {
            let h0 = g.get(0, 0);
            assert!(g.cells().iter().all(|h| (h - h0).norm() < 1e-12));
        }
    }

    #[test]
    fn same_seed_same_realization() {
        let cfg = ChannelConfig {
            seed: 42,
            ..ChannelConfig::default()
        };
        let phy = PhyConfig::default();
        assert_eq!(
            realize_tdl(&cfg, &phy).unwrap(),
            realize_tdl(&cfg, &phy).unwrap()
        );
    }

    #[test]
    fn noiseless_identity() {
        let phy = PhyConfig::default();
        let x = Grid::filled(14, 128, Complex64::new(0.3, -0.4));
        let y = apply_channel(&x, &ChannelRealization::identity(&phy), f64::INFINITY, 1).unwrap();
        assert_eq!(y.len(), 2);
        assert!(y.iter().all(|g| g == &x));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let phy = PhyConfig::default();
        let x = Grid::zeros(13, 128);
        assert!(apply_channel(&x, &ChannelRealization::identity(&phy), 0.0, 1).is_err());
    }

    #[test]
    fn config_parses_kind_names() {
        let c: ChannelConfig = toml::from_str("kind = \"awgn\"").unwrap();
        assert_eq!(c.kind, ChannelKind::Awgn);
        let c: ChannelConfig = toml::from_str("kind = \"tdl\"\nspeed_kmh = 60").unwrap();
        assert_eq!(c.kind, ChannelKind::TdlFading);
        assert!(toml::from_str::<ChannelConfig>("knid = \"tdl\"").is_err());
    }
}
