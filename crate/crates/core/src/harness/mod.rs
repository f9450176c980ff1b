//! Monte-Carlo driver: configuration, the end-to-end link, seeded SNR sweeps
//! and report files.
//!
//! Every trial owns a seed derived from `(master_seed, mode, snr index, trial
//! index)`, so trials can run in any order or in parallel and still produce
//! the same rows.

mod config;
mod link;
mod plot;
mod report;
mod sweep;

pub use config::{FecAlgorithm, FecConfig, SuccessAccounting, SweepConfig};
pub use link::{Link, LinkOutput};
pub use plot::{line_plot_svg, Series};
pub use report::{emit_report, write_summary_csv, write_trials_csv, ReportFormat, CSV_HEADER};
pub use sweep::{run_sweep, run_trial, Aggregate, Simulator, SweepResult};

pub use crate::metrics::{Mode, TrialReport};

use sha2::{Digest, Sha256};

fn hash_u64(parts: &[&[u8]]) -> u64 {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest is 32 bytes"))
}

/// Seed of one trial. Depends only on its position in the sweep.
pub fn trial_seed(master_seed: u64, mode: Mode, snr_index: usize, trial: usize) -> u64 {
    hash_u64(&[
        b"trial",
        &master_seed.to_le_bytes(),
        mode.as_str().as_bytes(),
        &(snr_index as u64).to_le_bytes(),
        &(trial as u64).to_le_bytes(),
    ])
}

/// Independent stream seed for a labelled sub-task of a trial.
pub fn sub_seed(seed: u64, label: &str, index: u64) -> u64 {
    hash_u64(&[label.as_bytes(), &seed.to_le_bytes(), &index.to_le_bytes()])
}
