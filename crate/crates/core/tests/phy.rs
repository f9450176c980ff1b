use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semlink::channel::{apply_channel, realize, ChannelConfig, ChannelKind};
use semlink::phy::*;
use semlink::Bit;

fn random_bits(n: usize, rng: &mut ChaCha8Rng) -> Vec<Bit> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

fn awgn() -> ChannelConfig {
    ChannelConfig {
        kind: ChannelKind::Awgn,
        ..Default::default()
    }
}

fn receive(rx: &[Grid], est: &ChannelEstimate, phy: &PhyConfig) -> Vec<f64> {
    let eq = equalize_combine(rx, est).unwrap();
    demap_equalized(
        &extract_data(eq.symbols.cells(), phy),
        &extract_data(&eq.post_snr, phy),
    )
    .unwrap()
    .values()
    .to_vec()
}

#[test]
fn noiseless_payloads_survive_the_uncoded_chain() {
    let phy = PhyConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let gains = [
        Complex64::from_polar(0.4, 2.0),
        Complex64::from_polar(1.7, -0.3),
    ];
    for _ in 0..1000 {
        let bits = random_bits(phy.coded_bits_per_frame(), &mut rng);
        let grid = build_grid(&bits, &phy).unwrap();
        let samples = ofdm_modulate(&grid.symbols, &phy).unwrap();
        let rx: Vec<Grid> = gains
            .iter()
            .map(|g| {
                ofdm_demodulate(&samples.iter().map(|s| s * g).collect::<Vec<_>>(), &phy).unwrap()
            })
            .collect();
        let est = estimate_channel(&rx, &phy).unwrap();
        let llrs = receive(&rx, &est, &phy);
        let hard: Vec<Bit> = llrs.iter().map(|l| (*l < 0.0) as Bit).collect();
        assert_eq!(hard, bits);
    }
}

#[test]
fn mmse_post_snr_and_llr_scale() {
    // known flat channel, known noise: post-SNR is sum |h|^2 / sigma^2 and the
    // combined LLR equals the sum of per-antenna matched LLRs
    let phy = PhyConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let bits = random_bits(phy.coded_bits_per_frame(), &mut rng);
    let grid = build_grid(&bits, &phy).unwrap();
    let h = [Complex64::new(0.6, 0.2), Complex64::new(-0.3, 0.9)];
    let nv = 0.25;
    let rx: Vec<Grid> = h
        .iter()
        .map(|g| {
            let cells = grid
                .symbols
                .cells()
                .iter()
                .map(|x| {
                    g * x + Complex64::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3))
                })
                .collect();
            Grid::from_vec(phy.num_symbols, phy.num_subcarriers, cells).unwrap()
        })
        .collect();
    let est = ChannelEstimate {
        gains: h
            .iter()
            .map(|g| Grid::filled(phy.num_symbols, phy.num_subcarriers, *g))
            .collect(),
        noise_variance: nv,
    };
    let eq = equalize_combine(&rx, &est).unwrap();
    let gain: f64 = h.iter().map(|g| g.norm_sqr()).sum();
    assert!(eq.post_snr.iter().all(|s| (s - gain / nv).abs() < 1e-12));
    let llrs = receive(&rx, &est, &phy);
    let data: Vec<Vec<Complex64>> = rx.iter().map(|g| extract_data(g.cells(), &phy)).collect();
    for (i, l) in llrs.iter().enumerate() {
        let cell = i / 2;
        let mf: Complex64 = h.iter().zip(&data).map(|(g, d)| g.conj() * d[cell]).sum();
        let v = if i % 2 == 0 { mf.re } else { mf.im };
        let want = 2.0 * std::f64::consts::SQRT_2 * v / nv;
        assert!(
            (l - want).abs() < 1e-9 * want.abs().max(1.0),
            "{l} vs {want}"
        );
    }
}

// Per-cell error variance of pilot interpolation with unit pilots:
// ((1-a)^2 + a^2) sigma^2 between pilots, sigma^2 on held rows.
fn interpolation_error_factor(phy: &PhyConfig, s: usize) -> f64 {
    let (p0, p1) = (phy.pilot_symbols[0], phy.pilot_symbols[1]);
    if s <= p0 || s >= p1 {
        return 1.0;
    }
    let a = (s - p0) as f64 / (p1 - p0) as f64;
    (1.0 - a).powi(2) + a * a
}

#[test]
fn estimation_error_matches_interpolation_analysis() {
    let phy = PhyConfig::default();
    let real = realize(&awgn(), &phy).unwrap();
    let nv = 0.1;
    let frames = 300;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut per_row = vec![0.0; phy.num_symbols];
    let mut nv_sum = 0.0;
    for f in 0..frames {
        let grid = build_grid(&random_bits(phy.coded_bits_per_frame(), &mut rng), &phy).unwrap();
        let rx = apply_channel(&grid.symbols, &real, 10.0, f).unwrap();
        let est = estimate_channel(&rx, &phy).unwrap();
        nv_sum += est.noise_variance;
        for g in &est.gains {
            for (s, row) in per_row.iter_mut().enumerate() {
                *row += g.row(s).iter().map(|h| (h - 1.0).norm_sqr()).sum::<f64>();
            }
        }
    }
    let cells_per_row = (frames as usize * phy.num_rx_antennas * phy.num_subcarriers) as f64;
    let measured: Vec<f64> = per_row.iter().map(|e| e / cells_per_row / nv).collect();
    for (s, m) in measured.iter().enumerate() {
        let want = interpolation_error_factor(&phy, s);
        assert!((m - want).abs() < 0.05 * want, "row {s}: {m} vs {want}");
    }
    let all: f64 = measured.iter().sum::<f64>() / phy.num_symbols as f64;
    let want_all: f64 = (0..phy.num_symbols)
        .map(|s| interpolation_error_factor(&phy, s))
        .sum::<f64>()
        / phy.num_symbols as f64;
    assert!(
        (all - want_all).abs() < 0.02 * want_all,
        "{all} vs {want_all}"
    );
    // between the pilot symbols the error stays under 0.75 sigma^2
    let (p0, p1) = (phy.pilot_symbols[0], phy.pilot_symbols[1]);
    let span: f64 = measured[p0..=p1].iter().sum::<f64>() / (p1 - p0 + 1) as f64;
    assert!(span <= 0.75, "{span}");
    let nv_ratio = nv_sum / frames as f64 / nv;
    assert!((nv_ratio - 1.0).abs() < 0.03, "{nv_ratio}");
}

#[test]
fn noise_estimate_under_fading_is_close_at_moderate_snr() {
    let phy = PhyConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let frames = 200;
    let mut sum = 0.0;
    for f in 0..frames {
        let grid = build_grid(&random_bits(phy.coded_bits_per_frame(), &mut rng), &phy).unwrap();
        let cfg = ChannelConfig {
            seed: f,
            ..Default::default()
        };
        let real = realize(&cfg, &phy).unwrap();
        let rx = apply_channel(&grid.symbols, &real, 10.0, 500 + f).unwrap();
        sum += estimate_channel(&rx, &phy).unwrap().noise_variance;
    }
    let ratio = sum / frames as f64 / 0.1;
    assert!((0.95..1.10).contains(&ratio), "{ratio}");
}

#[test]
fn qam_has_unit_energy_and_gray_labels() {
    let pts = qam_map(&[0, 0, 0, 1, 1, 0, 1, 1]).unwrap();
    for p in &pts {
        assert!((p.norm_sqr() - 1.0).abs() < 1e-15);
    }
    // neighbours along each axis differ in exactly one bit
    assert_eq!(pts[0].re, pts[1].re);
    assert_eq!(pts[0].im, pts[2].im);
    assert!(pts[3].re < 0.0 && pts[3].im < 0.0);
}
