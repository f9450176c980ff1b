use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use semlink::channel::ChannelKind;
use semlink::codec::ImageRaster;
use semlink::harness::{
    emit_report, run_sweep, trial_seed, Mode, ReportFormat, Simulator, SweepConfig,
};
use semlink::semantic_theory::{logical_probability, semantic_entropy, MessageId, WorldModel};
use semlink::Error;

#[derive(Parser)]
#[command(
    name = "semlink",
    version,
    about = "Semantic image transmission link simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an SNR sweep and write trials.csv and summary.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write one SVG line plot per metric.
        #[arg(long)]
        plot: bool,
        /// Omit the `# generated_at=` line from trials.csv.
        #[arg(long)]
        no_timestamp: bool,
        /// Override `trials_per_point`.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Send one image through the link and print the trial report.
    Trial {
        #[arg(long, default_value = "semantic")]
        mode: Mode,
        #[arg(long, allow_negative_numbers = true)]
        snr: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Image to send. Captions for the fixture codec come from the
        /// corpus, which defaults to the image's directory.
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Sweep config supplying channel, PHY and FEC settings.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_parser = ["awgn", "tdl"])]
        channel: Option<String>,
        #[arg(long)]
        gateway: Option<String>,
    },
    /// Print logical probability and semantic entropy of a message.
    Theory {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        msg: String,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn config_err(e: Error) -> Failure {
    Failure::Config(e.to_string())
}

fn sweep(
    config: PathBuf,
    out: PathBuf,
    plot: bool,
    no_timestamp: bool,
    trials: Option<usize>,
) -> Result<(), Failure> {
    let mut cfg = SweepConfig::load(&config).map_err(config_err)?;
    cfg.output = Some(out.clone());
    if no_timestamp {
        cfg.timestamp = false;
    }
    if let Some(t) = trials {
        cfg.trials_per_point = t;
    }
    cfg.validate().map_err(config_err)?;
    let result = run_sweep(&cfg)?;
    if plot {
        emit_report(&result, ReportFormat::SvgPlot, &out)?;
    }
    for a in &result.aggregates {
        let show = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
        println!(
            "{:<12} snr={:>6.2} dB  ber={}  bleu={}  ssim={}  edr={} bit/s  failed={}/{}",
            a.mode,
            a.snr_db,
            show(a.ber_median),
            show(a.bleu_median),
            show(a.ssim_median),
            a.edr_median_bps
                .map(|x| format!("{x:.0}"))
                .unwrap_or_else(|| "-".into()),
            a.failed,
            a.trials
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn trial(
    mode: Mode,
    snr: f64,
    seed: u64,
    image: PathBuf,
    corpus: Option<PathBuf>,
    config: Option<PathBuf>,
    channel: Option<String>,
    gateway: Option<String>,
) -> Result<(), Failure> {
    let mut cfg = match &config {
        Some(p) => SweepConfig::load(p).map_err(config_err)?,
        None => SweepConfig::from_toml_str("snr_db = [0]\ncorpus = \".\"\n", None)
            .map_err(config_err)?,
    };
    let corpus = corpus.or_else(|| {
        config
            .is_none()
            .then(|| image.parent().map(PathBuf::from).unwrap_or_default())
    });
    if let Some(c) = corpus {
        cfg.corpus = Some(if c.as_os_str().is_empty() {
            PathBuf::from(".")
        } else {
            c
        });
    }
    match channel.as_deref() {
        Some("awgn") => cfg.channel.kind = ChannelKind::Awgn,
        Some("tdl") => cfg.channel.kind = ChannelKind::TdlFading,
        _ => {}
    }
    if gateway.is_some() {
        cfg.gateway_url = gateway;
    }
    cfg.snr_db = vec![snr];
    cfg.validate().map_err(config_err)?;
    let img = ImageRaster::load_png(&image)?;
    let sim = Simulator::new(cfg)?;
    let r = sim.run_trial_on(mode, snr, 0, trial_seed(seed, mode, 0, 0), &img);
    println!("mode={}", r.mode);
    println!("snr_db={}", r.snr_db);
    println!("seed={}", r.seed);
    if let Some(e) = &r.error {
        return Err(Failure::Runtime(e.clone()));
    }
    println!("ber={}", r.ber);
    if let Some(b) = r.bleu {
        println!("bleu={b}");
    }
    if let Some(s) = r.ssim {
        println!("ssim={s}");
    }
    println!("edr_bps={}", r.effective_rate_bps);
    println!("bits_tx={}", r.bits_total);
    println!("bits_ok={}", r.bits_success);
    println!("frames={}/{}", r.frames_decoded, r.frames);
    if let Some(t) = &r.received_text {
        println!("received_text={t:?}");
    }
    Ok(())
}

fn theory(model: PathBuf, msg: String) -> Result<(), Failure> {
    let model = WorldModel::load(&model).map_err(config_err)?;
    let id = MessageId(msg);
    let lp = logical_probability(&model, &id)?;
    println!("L_p={lp}");
    match semantic_entropy(&model, &id) {
        Ok(h) => println!("H_se={h} bits"),
        Err(Error::ContradictoryMessage(_)) => println!("H_se=inf bits"),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep {
            config,
            out,
            plot,
            no_timestamp,
            trials,
        } => sweep(config, out, plot, no_timestamp, trials),
        Command::Trial {
            mode,
            snr,
            seed,
            image,
            corpus,
            config,
            channel,
            gateway,
        } => trial(mode, snr, seed, image, corpus, config, channel, gateway),
        Command::Theory { model, msg } => theory(model, msg),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
