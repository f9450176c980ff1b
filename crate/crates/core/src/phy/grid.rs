use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{qam_map, Complex64, PhyConfig};
use crate::{Bit, Error, Result};

/// Complex matrix indexed `[OFDM symbol][subcarrier]`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    symbols: usize,
    subcarriers: usize,
    data: Vec<Complex64>,
}

impl Grid {
    pub fn zeros(symbols: usize, subcarriers: usize) -> Self {
        Grid {
            symbols,
            subcarriers,
            data: vec![Complex64::new(0.0, 0.0); symbols * subcarriers],
        }
    }

    pub fn filled(symbols: usize, subcarriers: usize, value: Complex64) -> Self {
        Grid {
            symbols,
            subcarriers,
            data: vec![value; symbols * subcarriers],
        }
    }

    pub fn from_vec(symbols: usize, subcarriers: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != symbols * subcarriers {
            return Err(Error::DimensionMismatch(format!(
                "{symbols}x{subcarriers} grid needs {} cells, got {}",
                symbols * subcarriers,
                data.len()
            )));
        }
        Ok(Grid {
            symbols,
            subcarriers,
            data,
        })
    }

    pub fn num_symbols(&self) -> usize {
        self.symbols
    }

    pub fn num_subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.symbols, self.subcarriers)
    }

    pub fn get(&self, symbol: usize, subcarrier: usize) -> Complex64 {
        self.data[symbol * self.subcarriers + subcarrier]
    }

    pub fn set(&mut self, symbol: usize, subcarrier: usize, v: Complex64) {
        self.data[symbol * self.subcarriers + subcarrier] = v;
    }

    pub fn row(&self, symbol: usize) -> &[Complex64] {
        &self.data[symbol * self.subcarriers..(symbol + 1) * self.subcarriers]
    }

    pub fn row_mut(&mut self, symbol: usize) -> &mut [Complex64] {
        &mut self.data[symbol * self.subcarriers..(symbol + 1) * self.subcarriers]
    }

    pub fn cells(&self) -> &[Complex64] {
        &self.data
    }

    pub fn cells_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Multiplies every cell by `c`.
    pub fn scaled(&self, c: f64) -> Grid {
        Grid {
            symbols: self.symbols,
            subcarriers: self.subcarriers,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }
}

/// A transmitted frame: data and pilot symbols on the time/frequency plane.
/// Pilot cells occupy entire OFDM symbols (a time mask times an all-ones
/// frequency mask).
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid {
    pub symbols: Grid,
    pub pilot_mask: Vec<bool>,
    pub pilot_seed: u64,
}

impl ResourceGrid {
    pub fn is_pilot(&self, symbol: usize, subcarrier: usize) -> bool {
        self.pilot_mask[symbol * self.symbols.num_subcarriers() + subcarrier]
    }
}

/// Unit-modulus QPSK pilot values, one row per pilot symbol, derived from the
/// configured pilot seed. Transmitter and receiver regenerate the same values.
pub fn pilot_sequence(cfg: &PhyConfig) -> Grid {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.pilot_seed);
    let n = cfg.pilot_symbols.len() * cfg.num_subcarriers;
    let bits: Vec<Bit> = (0..2 * n).map(|_| rng.random_range(0..2u8)).collect();
    let values = qam_map(&bits).expect("even bit count");
    Grid::from_vec(cfg.pilot_symbols.len(), cfg.num_subcarriers, values).expect("shape")
}

/// Places pilots on the pilot symbols and fills the remaining cells row by
/// row with the 4-QAM mapping of `coded_bits`.
pub fn build_grid(coded_bits: &[Bit], cfg: &PhyConfig) -> Result<ResourceGrid> {
    cfg.validate()?;
    let expected = cfg.coded_bits_per_frame();
    if coded_bits.len() != expected {
        return Err(Error::DimensionMismatch(format!(
            "resource grid carries {expected} coded bits, got {}",
            coded_bits.len()
        )));
    }
    let data = qam_map(coded_bits)?;
    let pilots = pilot_sequence(cfg);
    let mut grid = Grid::zeros(cfg.num_symbols, cfg.num_subcarriers);
    let mut mask = vec![false; cfg.num_symbols * cfg.num_subcarriers];
    let mut data_iter = data.into_iter();
    let mut pilot_row = 0;
    for s in 0..cfg.num_symbols {
        if cfg.is_pilot_symbol(s) {
            grid.row_mut(s).copy_from_slice(pilots.row(pilot_row));
            pilot_row += 1;
            mask[s * cfg.num_subcarriers..(s + 1) * cfg.num_subcarriers].fill(true);
        } else {
            for cell in grid.row_mut(s) {
                *cell = data_iter.next().expect("bit count checked");
            }
        }
    }
    Ok(ResourceGrid {
        symbols: grid,
        pilot_mask: mask,
        pilot_seed: cfg.pilot_seed,
    })
}

/// Data cells of a grid-shaped matrix in transmission order.
pub fn extract_data<T: Copy>(cells: &[T], cfg: &PhyConfig) -> Vec<T> {
    let mut out = Vec::with_capacity(cfg.num_data_cells());
    for s in 0..cfg.num_symbols {
        if !cfg.is_pilot_symbol(s) {
            out.extend_from_slice(&cells[s * cfg.num_subcarriers..(s + 1) * cfg.num_subcarriers]);
        }
    }
    out
}

/// CSV dump: `symbol,subcarrier,re,im,is_pilot`.
pub fn write_grid_csv(grid: &ResourceGrid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("symbol,subcarrier,re,im,is_pilot\n");
    let (ns, nk) = grid.symbols.shape();
    for s in 0..ns {
        for k in 0..nk {
            let v = grid.symbols.get(s, k);
            out.push_str(&format!(
                "{s},{k},{},{},{}\n",
                v.re,
                v.im,
                grid.is_pilot(s, k) as u8
            ));
        }
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(out.as_bytes()))
        .map_err(|e| Error::io(path, e))
}
