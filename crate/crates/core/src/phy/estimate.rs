use super::{pilot_sequence, Complex64, Grid, PhyConfig};
use crate::{Error, Result};

/// Floor for the estimated noise variance.
pub const MIN_NOISE_VARIANCE: f64 = 1e-12;

/// Per-antenna channel gains on every cell plus the noise variance.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub gains: Vec<Grid>,
    pub noise_variance: f64,
}

/// Least-squares estimates `y / p` on the pilot symbols, linearly
/// interpolated across OFDM symbols per subcarrier and held constant before
/// the first and after the last pilot symbol.
///
/// The noise variance comes from the second difference of the LS estimates
/// across neighbouring subcarriers, which cancels any channel component that
/// is linear in frequency.
pub fn estimate_channel(rx_grids: &[Grid], cfg: &PhyConfig) -> Result<ChannelEstimate> {
    cfg.validate()?;
    let pilots = pilot_sequence(cfg);
    estimate_with_pilots(rx_grids, &pilots, cfg)
}

pub(crate) fn estimate_with_pilots(
    rx_grids: &[Grid],
    pilots: &Grid,
    cfg: &PhyConfig,
) -> Result<ChannelEstimate> {
    let (ns, nk) = (cfg.num_symbols, cfg.num_subcarriers);
    if rx_grids.is_empty() {
        return Err(Error::InvalidInput("no receive grids".into()));
    }
    if pilots.shape() != (cfg.pilot_symbols.len(), nk) {
        return Err(Error::DimensionMismatch("pilot grid shape".into()));
    }
    if pilots.cells().iter().any(|p| p.norm_sqr() == 0.0) {
        return Err(Error::InvalidInput("pilot symbol with zero value".into()));
    }
    let mut resid_energy = 0.0;
    let mut resid_weight = 0.0;
    let mut gains = Vec::with_capacity(rx_grids.len());
    for rx in rx_grids {
        if rx.shape() != (ns, nk) {
            return Err(Error::DimensionMismatch(format!(
                "receive grid is {:?}, expected ({ns}, {nk})",
                rx.shape()
            )));
        }
        let ls: Vec<Vec<Complex64>> = cfg
            .pilot_symbols
            .iter()
            .enumerate()
            .map(|(pi, &s)| (0..nk).map(|k| rx.get(s, k) / pilots.get(pi, k)).collect())
            .collect();

        for (pi, row) in ls.iter().enumerate() {
            for k in 1..nk.saturating_sub(1) {
                let d = row[k - 1] - row[k] * 2.0 + row[k + 1];
                resid_energy += d.norm_sqr();
                resid_weight += 1.0 / pilots.get(pi, k - 1).norm_sqr()
                    + 4.0 / pilots.get(pi, k).norm_sqr()
                    + 1.0 / pilots.get(pi, k + 1).norm_sqr();
            }
        }

        let mut g = Grid::zeros(ns, nk);
        let ps = &cfg.pilot_symbols;
        for s in 0..ns {
            // bracketing pilot rows
            let upper = ps.iter().position(|&p| p >= s);
            let (lo, hi, a) = match upper {
                None => (ps.len() - 1, ps.len() - 1, 0.0),
                Some(0) => (0, 0, 0.0),
                Some(j) if ps[j] == s => (j, j, 0.0),
                Some(j) => {
                    let a = (s - ps[j - 1]) as f64 / (ps[j] - ps[j - 1]) as f64;
                    (j - 1, j, a)
                }
            };
            for (k, (l, h)) in ls[lo].iter().zip(&ls[hi]).enumerate() {
                g.set(s, k, l * (1.0 - a) + h * a);
            }
        }
        gains.push(g);
    }
    let noise_variance = if resid_weight > 0.0 {
        (resid_energy / resid_weight).max(MIN_NOISE_VARIANCE)
    } else {
        MIN_NOISE_VARIANCE
    };
    Ok(ChannelEstimate {
        gains,
        noise_variance,
    })
}
