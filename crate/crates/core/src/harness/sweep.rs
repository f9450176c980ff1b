use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;

use rayon::prelude::*;

use crate::codec::{ImageRaster, MockCodec, RemoteCodec, SemanticCodec, TextKnowledge};
use crate::framing::{
    deframe_text, frame_image, frame_text, reassemble_image, BitFrame, PayloadKind,
};
use crate::metrics::{self, bit_errors, effective_data_rate, Mode, TrialReport};
use crate::{Bit, Error, Result};

use super::report::{write_summary_csv, write_trials_csv};
use super::{sub_seed, trial_seed, Link, SuccessAccounting, SweepConfig};

/// Statistics of one `(mode, snr)` point over its non-failed trials.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub mode: Mode,
    pub snr_db: f64,
    pub trials: usize,
    pub failed: usize,
    pub ber_mean: Option<f64>,
    pub ber_median: Option<f64>,
    pub bleu_mean: Option<f64>,
    pub bleu_median: Option<f64>,
    pub ssim_mean: Option<f64>,
    pub ssim_median: Option<f64>,
    pub edr_mean_bps: Option<f64>,
    pub edr_median_bps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Ordered by mode, SNR index, trial.
    pub reports: Vec<TrialReport>,
    /// One per `(mode, snr)` in the same order.
    pub aggregates: Vec<Aggregate>,
    pub timestamp: bool,
}

impl SweepResult {
    pub fn aggregate(&self, mode: Mode, snr_db: f64) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.mode == mode && a.snr_db == snr_db)
    }
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    Some(if s.len() % 2 == 1 {
        s[m]
    } else {
        (s[m - 1] + s[m]) / 2.0
    })
}

fn aggregate(mode: Mode, snr_db: f64, rows: &[TrialReport]) -> Aggregate {
    let ok: Vec<&TrialReport> = rows.iter().filter(|r| !r.is_failed()).collect();
    let ber: Vec<f64> = ok.iter().map(|r| r.ber).collect();
    let bleu: Vec<f64> = ok.iter().filter_map(|r| r.bleu).collect();
    let ssim: Vec<f64> = ok.iter().filter_map(|r| r.ssim).collect();
    let edr: Vec<f64> = ok.iter().map(|r| r.effective_rate_bps).collect();
    Aggregate {
        mode,
        snr_db,
        trials: rows.len(),
        failed: rows.len() - ok.len(),
        ber_mean: mean(&ber),
        ber_median: median(&ber),
        bleu_mean: mean(&bleu),
        bleu_median: median(&bleu),
        ssim_mean: mean(&ssim),
        ssim_median: median(&ssim),
        edr_mean_bps: mean(&edr),
        edr_median_bps: median(&edr),
    }
}

/// Loaded corpus, codec and link for one configuration.
pub struct Simulator {
    cfg: SweepConfig,
    link: Link,
    corpus: MockCodec,
    codec: Box<dyn SemanticCodec>,
    // corpus indices cycled by trial number
    sources: Vec<usize>,
}

impl std::fmt::Debug for Simulator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Simulator")
            .field("cfg", &self.cfg)
            .field("sources", &self.sources)
            .finish_non_exhaustive()
    }
}

impl Simulator {
    pub fn new(cfg: SweepConfig) -> Result<Self> {
        cfg.validate()?;
        let dir = cfg.corpus.as_ref().expect("validated");
        let corpus = MockCodec::load(dir)?;
        let sources = if cfg.images.is_empty() {
            (0..corpus.entries().len()).collect()
        } else {
            cfg.images
                .iter()
                .map(|name| {
                    corpus
                        .entries()
                        .iter()
                        .position(|e| &e.name == name)
                        .ok_or_else(|| Error::Config(format!("image `{name}` not in corpus")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        let codec: Box<dyn SemanticCodec> = match &cfg.gateway_url {
            Some(url) => Box::new(RemoteCodec::new(url.clone())),
            None => Box::new(corpus.clone()),
        };
        let link = Link::new(&cfg.phy, &cfg.channel, &cfg.fec, cfg.perfect_csi)?;
        Ok(Simulator {
            cfg,
            link,
            corpus,
            codec,
            sources,
        })
    }

    pub fn config(&self) -> &SweepConfig {
        &self.cfg
    }

    pub fn link(&self) -> &Link {
        &self.link
    }

    pub fn corpus(&self) -> &MockCodec {
        &self.corpus
    }

    /// Source image for a trial index.
    pub fn source(&self, trial: usize) -> &ImageRaster {
        &self.corpus.entries()[self.sources[trial % self.sources.len()]].image
    }

    /// One trial on the corpus image selected by `trial`.
    pub fn run_trial(&self, mode: Mode, snr_db: f64, trial: usize, seed: u64) -> TrialReport {
        self.run_trial_on(mode, snr_db, trial, seed, self.source(trial))
    }

    /// One trial on an arbitrary image. Failures become a failed row.
    pub fn run_trial_on(
        &self,
        mode: Mode,
        snr_db: f64,
        trial: usize,
        seed: u64,
        image: &ImageRaster,
    ) -> TrialReport {
        let outcome = match mode {
            Mode::Semantic => self.semantic(snr_db, trial, seed, image),
            Mode::Conventional => self.conventional(snr_db, trial, seed, image),
        };
        outcome.unwrap_or_else(|e| TrialReport::failed(mode, snr_db, trial, seed, e.to_string()))
    }

    // each frame gets its own channel draw and noise
    fn send_frames(&self, frames: &[BitFrame], snr_db: f64, seed: u64) -> Result<Vec<Vec<Bit>>> {
        frames
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let s = sub_seed(seed, "frame", i as u64);
                Ok(self.link.transmit(f.bits(), snr_db, s)?.info)
            })
            .collect()
    }

    fn tally(
        &self,
        mode: Mode,
        snr_db: f64,
        trial: usize,
        seed: u64,
        sent: &[BitFrame],
        received: &[Vec<Bit>],
    ) -> Result<TrialReport> {
        let mut bits_total = 0u64;
        let mut errors = 0u64;
        let mut frames_ok = 0usize;
        let mut frame_bits_ok = 0u64;
        for (f, rx) in sent.iter().zip(received) {
            let r = f.payload_range();
            let e = bit_errors(&f.bits()[r.clone()], &rx[r]) as u64;
            bits_total += f.payload_bits() as u64;
            errors += e;
            if e == 0 {
                frames_ok += 1;
                frame_bits_ok += f.payload_bits() as u64;
            }
        }
        let bits_success = match self.cfg.success {
            SuccessAccounting::Bit => bits_total - errors,
            SuccessAccounting::Frame => frame_bits_ok,
        };
        let num_ofdm_symbols = (sent.len() * self.cfg.phy.num_symbols) as u64;
        let rate = effective_data_rate(
            bits_total as f64,
            bits_success as f64,
            num_ofdm_symbols as f64,
            self.cfg.phy.subcarrier_spacing_hz,
        )?;
        Ok(TrialReport {
            mode,
            snr_db,
            trial,
            seed,
            bits_total,
            bits_success,
            num_ofdm_symbols,
            total_time_s: rate.total_time_s,
            ber: errors as f64 / bits_total as f64,
            bleu: None,
            ssim: None,
            effective_rate_bps: rate.effective_rate_bps,
            frames: sent.len(),
            frames_decoded: frames_ok,
            received_text: None,
            error: None,
        })
    }

    fn semantic(
        &self,
        snr_db: f64,
        trial: usize,
        seed: u64,
        image: &ImageRaster,
    ) -> Result<TrialReport> {
        let cap = self.link.capacity_bits();
        let text = self.codec.semantic_encode(image, None)?;
        let frame = frame_text(&text, cap)?;
        let sent = [frame];
        let received = self.send_frames(&sent, snr_db, seed)?;
        let mut report = self.tally(Mode::Semantic, snr_db, trial, seed, &sent, &received)?;

        let rx_frame = BitFrame::from_received(
            received.into_iter().next().expect("one frame"),
            PayloadKind::Text,
        );
        let rx_text = deframe_text(&rx_frame, cap)?;
        if self.cfg.bleu {
            report.bleu = Some(metrics::bleu(&text.text, &rx_text.text, 4)?);
        }
        if self.cfg.ssim {
            report.ssim = Some(self.regenerate_ssim(image, &rx_text, seed)?);
        }
        report.received_text = Some(rx_text.text);
        Ok(report)
    }

    // an empty received caption leaves nothing to generate from and scores 0
    fn regenerate_ssim(&self, image: &ImageRaster, text: &TextKnowledge, seed: u64) -> Result<f64> {
        if text.text.trim().is_empty() {
            return Ok(0.0);
        }
        let mut out = self.codec.semantic_decode(text, seed)?;
        if out.dimensions() != image.dimensions() {
            out = out.resized(image.width(), image.height());
        }
        metrics::ssim(image, &out)
    }

    fn conventional(
        &self,
        snr_db: f64,
        trial: usize,
        seed: u64,
        image: &ImageRaster,
    ) -> Result<TrialReport> {
        let frames = frame_image(image, self.link.capacity_bits())?;
        let received = self.send_frames(&frames, snr_db, seed)?;
        let mut report = self.tally(Mode::Conventional, snr_db, trial, seed, &frames, &received)?;
        if self.cfg.ssim {
            let rx_frames: Vec<BitFrame> = received
                .into_iter()
                .map(|b| BitFrame::from_received(b, PayloadKind::ImageChunk))
                .collect();
            let out = reassemble_image(&rx_frames, image.width(), image.height())?;
            report.ssim = Some(metrics::ssim(image, &out)?);
        }
        Ok(report)
    }

    /// Every `(mode, snr, trial)` of the configuration, in parallel, ordered
    /// by key.
    pub fn run_all(&self) -> SweepResult {
        let keys: Vec<(usize, usize, usize)> = (0..self.cfg.modes.len())
            .flat_map(|m| {
                (0..self.cfg.snr_db.len())
                    .flat_map(move |s| (0..self.cfg.trials_per_point).map(move |t| (m, s, t)))
            })
            .collect();
        let rows: BTreeMap<(usize, usize, usize), TrialReport> = keys
            .par_iter()
            .map(|&(m, s, t)| {
                let mode = self.cfg.modes[m];
                let seed = trial_seed(self.cfg.master_seed, mode, s, t);
                ((m, s, t), self.run_trial(mode, self.cfg.snr_db[s], t, seed))
            })
            .collect();

        let mut aggregates = Vec::new();
        for (m, &mode) in self.cfg.modes.iter().enumerate() {
            for (s, &snr) in self.cfg.snr_db.iter().enumerate() {
                let point: Vec<TrialReport> = rows
                    .range((m, s, 0)..(m, s + 1, 0))
                    .map(|(_, r)| r.clone())
                    .collect();
                aggregates.push(aggregate(mode, snr, &point));
            }
        }
        SweepResult {
            reports: rows.into_values().collect(),
            aggregates,
            timestamp: self.cfg.timestamp,
        }
    }
}

/// Single trial of `mode` at `snr_db` on the first configured source image.
pub fn run_trial(
    cfg: &SweepConfig,
    mode: Mode,
    snr_db: f64,
    trial_seed: u64,
) -> Result<TrialReport> {
    let sim = Simulator::new(cfg.clone())?;
    Ok(sim.run_trial(mode, snr_db, 0, trial_seed))
}

/// Runs the whole sweep. With an `output` directory, `trials.csv` and
/// `summary.csv` are created before any trial runs and written once all
/// trials finish.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let sinks = match &cfg.output {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            let open = |name: &str| {
                let path = dir.join(name);
                File::create(&path)
                    .map(|f| (path.clone(), BufWriter::new(f)))
                    .map_err(|e| Error::io(&path, e))
            };
            Some((open("trials.csv")?, open("summary.csv")?))
        }
        None => None,
    };
    let sim = Simulator::new(cfg.clone())?;
    let result = sim.run_all();
    if let Some(((tp, tf), (sp, sf))) = sinks {
        write_trials_csv(&result, tf).map_err(|e| Error::io(&tp, e))?;
        write_summary_csv(&result.aggregates, sf).map_err(|e| Error::io(&sp, e))?;
    }
    Ok(result)
}
