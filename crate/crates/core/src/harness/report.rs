use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::metrics::Mode;
use crate::{Error, Result};

use super::plot::{line_plot_svg, Series};
use super::{Aggregate, SweepResult};

pub const CSV_HEADER: &str = "mode,snr_db,trial,seed,ber,bleu,ssim,edr_bps,bits_tx,bits_ok";
const SUMMARY_HEADER: &str = "mode,snr_db,trials,failed,ber_mean,ber_median,bleu_mean,bleu_median,\
ssim_mean,ssim_median,edr_mean_bps,edr_median_bps";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    SvgPlot,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "svg" | "svg-plot" => Ok(ReportFormat::SvgPlot),
            other => Err(Error::InvalidInput(format!(
                "unknown report format `{other}`"
            ))),
        }
    }
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Per-trial CSV. LF line endings; missing values are empty fields.
pub fn write_trials_csv(result: &SweepResult, mut out: impl Write) -> io::Result<()> {
    if result.timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        writeln!(out, "# generated_at={secs}")?;
    }
    writeln!(out, "{CSV_HEADER}")?;
    for r in &result.reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.mode,
            num(r.snr_db),
            r.trial,
            r.seed,
            num(r.ber),
            opt(r.bleu),
            opt(r.ssim),
            num(r.effective_rate_bps),
            r.bits_total,
            r.bits_success
        )?;
    }
    out.flush()
}

/// Per-point aggregates.
pub fn write_summary_csv(aggs: &[Aggregate], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for a in aggs {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            a.mode,
            num(a.snr_db),
            a.trials,
            a.failed,
            opt(a.ber_mean),
            opt(a.ber_median),
            opt(a.bleu_mean),
            opt(a.bleu_median),
            opt(a.ssim_mean),
            opt(a.ssim_median),
            opt(a.edr_mean_bps),
            opt(a.edr_median_bps)
        )?;
    }
    out.flush()
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

type Metric = (
    &'static str,
    &'static str,
    fn(&Aggregate) -> Option<f64>,
    bool,
);

const METRICS: [Metric; 4] = [
    ("ber", "median BER", |a| a.ber_median, true),
    ("bleu", "median BLEU", |a| a.bleu_median, false),
    ("ssim", "median SSIM", |a| a.ssim_median, false),
    (
        "edr_bps",
        "median effective data rate (bit/s)",
        |a| a.edr_median_bps,
        false,
    ),
];

/// Writes `trials.csv` and `summary.csv` (CSV) or one `<metric>.svg` per
/// metric with data (SVG) into `dir`. Returns the files written.
pub fn emit_report(
    result: &SweepResult,
    format: ReportFormat,
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    if result.aggregates.is_empty() || result.reports.is_empty() {
        return Err(Error::InvalidInput("sweep result is empty".into()));
    }
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    match format {
        ReportFormat::Csv => {
            let path = dir.join("trials.csv");
            write_trials_csv(result, create(&path)?).map_err(|e| Error::io(&path, e))?;
            written.push(path);
            let path = dir.join("summary.csv");
            write_summary_csv(&result.aggregates, create(&path)?)
                .map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        ReportFormat::SvgPlot => {
            let mut modes: Vec<Mode> = result.aggregates.iter().map(|a| a.mode).collect();
            modes.dedup();
            for (name, label, get, log_y) in METRICS {
                let series: Vec<Series> = modes
                    .iter()
                    .map(|&m| Series {
                        name: m.to_string(),
                        points: result
                            .aggregates
                            .iter()
                            .filter(|a| a.mode == m)
                            .filter_map(|a| get(a).map(|v| (a.snr_db, v)))
                            .collect(),
                    })
                    .filter(|s| !s.points.is_empty())
                    .collect();
                if series.is_empty() {
                    continue;
                }
                let svg = line_plot_svg(label, "SNR (dB)", label, &series, log_y);
                let path = dir.join(format!("{name}.svg"));
                std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
                written.push(path);
            }
        }
    }
    Ok(written)
}
