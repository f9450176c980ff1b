use semlink::channel::*;
use semlink::phy::{Complex64, Grid, PhyConfig};

const ENSEMBLE: u64 = 10_000;

fn tdl(seed: u64) -> ChannelConfig {
    ChannelConfig {
        seed,
        ..Default::default()
    }
}

/// Two-sided Kolmogorov distribution tail, `P(K > lambda)`.
fn kolmogorov_tail(lambda: f64) -> f64 {
    let mut p = 0.0;
    for k in 1..=100 {
        let term = 2.0 * (-1f64).powi(k - 1) * (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

fn ks_pvalue(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let d = samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let sn = n.sqrt();
    kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d)
}

#[test]
fn ks_helper_accepts_exact_quantiles() {
    let n = 1000;
    let u: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    assert!(ks_pvalue(u.clone(), |x| x) > 0.99);
    assert!(ks_pvalue(u, |x| x * x) < 1e-6);
}

#[test]
fn ensemble_power_and_rayleigh_taps() {
    let phy = PhyConfig::default();
    let mut power = Grid::zeros(phy.num_symbols, phy.num_subcarriers);
    let mut mags = Vec::with_capacity(ENSEMBLE as usize);
    for seed in 0..ENSEMBLE {
        let r = realize(&tdl(seed), &phy).unwrap();
        for (acc, h) in power.cells_mut().iter_mut().zip(r.responses[0].cells()) {
            acc.re += h.norm_sqr();
        }
        mags.push(r.tap_gains[0][0][0].norm());
    }
    let cells = power.cells();
    let worst = cells
        .iter()
        .map(|p| (p.re / ENSEMBLE as f64 - 1.0).abs())
        .fold(0.0, f64::max);
    let mean = cells.iter().map(|p| p.re).sum::<f64>() / (ENSEMBLE as f64 * cells.len() as f64);
    assert!((mean - 1.0).abs() < 0.02, "mean power {mean}");
    // single cells carry Monte-Carlo spread of about 1/sqrt(ENSEMBLE)
    assert!(worst < 0.06, "worst cell deviation {worst}");
    let p = ks_pvalue(mags, |r| 1.0 - (-r * r).exp());
    assert!(p > 0.01, "KS p = {p}");
}

#[test]
fn static_single_tap_is_flat() {
    let phy = PhyConfig::default();
    let cfg = ChannelConfig {
        num_taps: 1,
        speed_kmh: 0.0,
        seed: 3,
        ..Default::default()
    };
    let r = realize(&cfg, &phy).unwrap();
    for g in &r.responses {
        let h0 = g.cells()[0];
        assert!(g.cells().iter().all(|h| (h - h0).norm() < 1e-12));
    }
    let mean: f64 = (0..ENSEMBLE)
        .map(|s| {
            realize(
                &ChannelConfig {
                    seed: s,
                    ..cfg.clone()
                },
                &phy,
            )
            .unwrap()
            .responses[0]
                .cells()[0]
                .norm_sqr()
        })
        .sum::<f64>()
        / ENSEMBLE as f64;
    assert!((mean - 1.0).abs() < 0.03, "{mean}");
}

#[test]
fn determinism_and_decorrelation() {
    let phy = PhyConfig::default();
    assert_eq!(
        realize(&tdl(9), &phy).unwrap(),
        realize(&tdl(9), &phy).unwrap()
    );

    let corr = |a: &[Complex64], b: &[Complex64]| {
        let num: Complex64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
        let ea: f64 = a.iter().map(|x| x.norm_sqr()).sum();
        let eb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
        num.norm() / (ea * eb).sqrt()
    };
    // one fixed cell across many realizations
    let n = 2000;
    let draws: Vec<ChannelRealization> = (0..2 * n)
        .map(|s| realize(&tdl(s), &phy).unwrap())
        .collect();
    let cell =
        |r: &ChannelRealization, ant: usize| r.responses[ant].cells()[5 * phy.num_subcarriers + 17];
    let a: Vec<Complex64> = draws[..n as usize].iter().map(|r| cell(r, 0)).collect();
    let b: Vec<Complex64> = draws[n as usize..].iter().map(|r| cell(r, 0)).collect();
    assert!(corr(&a, &b) < 0.2, "seeds {}", corr(&a, &b));
    let other: Vec<Complex64> = draws[..n as usize].iter().map(|r| cell(r, 1)).collect();
    assert!(corr(&a, &other) < 0.2, "antennas {}", corr(&a, &other));
}

#[test]
fn frequency_correlation_follows_the_delay_profile() {
    let phy = PhyConfig::default();
    let (delays, powers) = power_delay_profile(&tdl(0), &phy).unwrap();
    assert!((powers.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(*delays.last().unwrap() <= phy.cp_length);
    let nk = phy.num_subcarriers;
    let expected = |lag: usize| -> Complex64 {
        delays
            .iter()
            .zip(&powers)
            .map(|(&d, &p)| {
                Complex64::from_polar(p, 2.0 * std::f64::consts::PI * (lag * d) as f64 / nk as f64)
            })
            .sum()
    };
    let lags = [0usize, 1, 2, 4, 8];
    let mut acc = vec![Complex64::new(0.0, 0.0); lags.len()];
    let n = 3000;
    for seed in 0..n {
        let r = realize(&tdl(seed), &phy).unwrap();
        let row = r.responses[0].row(0);
        for (a, &lag) in acc.iter_mut().zip(&lags) {
            *a += (0..nk - lag)
                .map(|k| row[k] * row[k + lag].conj())
                .sum::<Complex64>()
                / (nk - lag) as f64;
        }
    }
    let mut prev = f64::INFINITY;
    for (a, &lag) in acc.iter().zip(&lags) {
        let got = a / n as f64;
        let want = expected(lag);
        assert!((got - want).norm() < 0.05, "lag {lag}: {got} vs {want}");
        assert!(got.norm() < prev, "lag {lag} not decreasing");
        prev = got.norm();
    }
}

fn time_decorrelation(speed_kmh: f64) -> f64 {
    let phy = PhyConfig::default();
    let n = 2000;
    let last = phy.num_symbols - 1;
    (0..n)
        .map(|seed| {
            let cfg = ChannelConfig {
                speed_kmh,
                seed,
                ..Default::default()
            };
            let r = realize(&cfg, &phy).unwrap();
            let g = &r.responses[0];
            g.row(0)
                .iter()
                .zip(g.row(last))
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
        })
        .sum::<f64>()
        / (n as f64 * phy.num_subcarriers as f64)
}

#[test]
fn faster_terminals_see_faster_fading() {
    let still = time_decorrelation(0.0);
    let slow = time_decorrelation(60.0);
    let fast = time_decorrelation(120.0);
    assert!(still < 1e-20, "{still}");
    assert!(fast > 1.5 * slow, "60 km/h {slow}, 120 km/h {fast}");
}

#[test]
fn noise_calibration_and_noiseless_identity() {
    let phy = PhyConfig::default();
    let id = ChannelRealization::identity(&phy);
    let x = Grid::from_vec(
        phy.num_symbols,
        phy.num_subcarriers,
        (0..phy.num_symbols * phy.num_subcarriers)
            .map(|i| Complex64::from_polar(1.0, i as f64 * 0.37))
            .collect(),
    )
    .unwrap();
    for y in apply_channel(&x, &id, f64::INFINITY, 1).unwrap() {
        assert_eq!(y, x);
    }
    // >= 10^5 noise cells at 0 dB and 6 dB
    for (snr, nv) in [(0.0, 1.0), (6.0, 10f64.powf(-0.6))] {
        let mut sum = 0.0;
        let mut count = 0usize;
        let mut cross = Complex64::new(0.0, 0.0);
        for seed in 0..30 {
            let y = apply_channel(&x, &id, snr, seed).unwrap();
            let n0: Vec<Complex64> = y[0]
                .cells()
                .iter()
                .zip(x.cells())
                .map(|(a, b)| a - b)
                .collect();
            let n1: Vec<Complex64> = y[1]
                .cells()
                .iter()
                .zip(x.cells())
                .map(|(a, b)| a - b)
                .collect();
            sum += n0.iter().chain(&n1).map(|n| n.norm_sqr()).sum::<f64>();
            cross += n0
                .iter()
                .zip(&n1)
                .map(|(a, b)| a * b.conj())
                .sum::<Complex64>();
            count += 2 * n0.len();
        }
        assert!(count >= 100_000);
        let emp = sum / count as f64;
        assert!((emp / nv - 1.0).abs() < 0.02, "snr {snr}: {emp} vs {nv}");
        let snr_emp = -10.0 * emp.log10();
        assert!((snr_emp - snr).abs() < 0.1, "{snr_emp} dB vs {snr} dB");
        assert!(
            (cross / (count as f64 / 2.0)).norm() / nv < 0.02,
            "antenna noise correlated"
        );
    }
}

#[test]
fn config_validation() {
    let phy = PhyConfig::default();
    for cfg in [
        ChannelConfig {
            num_taps: 0,
            ..Default::default()
        },
        ChannelConfig {
            speed_kmh: -1.0,
            ..Default::default()
        },
        ChannelConfig {
            delay_spread_ns: 0.0,
            ..Default::default()
        },
        ChannelConfig {
            snr_db: f64::NAN,
            ..Default::default()
        },
        ChannelConfig {
            num_taps: 40,
            ..Default::default()
        },
    ] {
        assert!(realize(&cfg, &phy).is_err(), "{cfg:?}");
    }
    let x = Grid::zeros(2, 2);
    assert!(apply_channel(&x, &ChannelRealization::identity(&phy), 0.0, 0).is_err());
}
