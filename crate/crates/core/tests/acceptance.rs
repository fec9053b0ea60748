//! Acceptance suite: one test per release criterion, each printing a
//! single PASS/FAIL line (visible with `cargo test --test acceptance --
//! --nocapture`) and enforcing its runtime budget.

use std::time::{Duration, Instant};

use aqm_core::adapt::{adapt_fwm, DisplayGeometry, ExponentField};
use aqm_core::csf::{build_fwm, CsfParams};
use aqm_core::qm::scaling_list::ScalingListDocument;
use aqm_core::qm::{derive_inter, derive_qm, replicate, InterModelParams, QuantizationMatrix};
use aqm_core::simulate::dct::Dct2d;
use aqm_core::simulate::image::{Component, ImagePlane};
use aqm_core::simulate::{bd_rate, code_image, psnr, ssim, QuantConfig, RdPoint};
use aqm_core::QM_SCALE;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Golden 8x8 weighting matrix, printed to four decimals.
const GOLDEN_FWM: [[f64; 8]; 8] = [
    [1.0000, 1.0000, 1.0000, 1.0000, 0.9599, 0.8746, 0.7684, 0.6571],
    [1.0000, 1.0000, 1.0000, 1.0000, 0.9283, 0.8404, 0.7371, 0.6306],
    [1.0000, 1.0000, 0.9571, 0.8898, 0.8192, 0.7371, 0.6471, 0.5558],
    [1.0000, 1.0000, 0.8898, 0.7617, 0.6669, 0.5912, 0.5196, 0.4495],
    [0.9599, 0.9283, 0.8192, 0.6669, 0.5419, 0.4564, 0.3930, 0.3393],
    [0.8746, 0.8404, 0.7371, 0.5912, 0.4564, 0.3598, 0.2948, 0.2480],
    [0.7684, 0.7371, 0.6471, 0.5196, 0.3930, 0.2948, 0.2278, 0.1828],
    [0.6571, 0.6306, 0.5558, 0.4495, 0.3393, 0.2480, 0.1828, 0.1391],
];

// Golden 8x8 default intra quantization matrix.
const GOLDEN_QM: [[u32; 8]; 8] = [
    [16, 16, 16, 16, 17, 18, 21, 24],
    [16, 16, 16, 16, 17, 19, 22, 25],
    [16, 16, 17, 18, 20, 22, 25, 29],
    [16, 16, 18, 21, 24, 27, 31, 36],
    [17, 17, 20, 24, 30, 35, 41, 47],
    [18, 19, 22, 27, 35, 44, 54, 65],
    [21, 22, 25, 31, 41, 54, 70, 88],
    [24, 25, 29, 36, 47, 65, 88, 115],
];

// Golden 8x8 adaptive intra matrix for a 3840x2160 display.
const GOLDEN_AQM_4K: [[u32; 8]; 8] = [
    [16, 16, 16, 16, 16, 17, 18, 18],
    [16, 16, 16, 16, 17, 17, 18, 18],
    [16, 16, 16, 17, 18, 18, 18, 19],
    [16, 16, 17, 18, 19, 19, 20, 20],
    [16, 17, 18, 19, 20, 21, 21, 21],
    [17, 17, 18, 19, 21, 22, 22, 22],
    [18, 18, 18, 20, 21, 22, 22, 23],
    [18, 18, 19, 20, 21, 22, 23, 23],
];

const RESOLUTION_GRID: [(u32, u32); 7] = [
    (416, 240),
    (832, 480),
    (1280, 720),
    (1920, 1080),
    (2560, 1600),
    (3840, 2160),
    (7680, 4320),
];

fn default_fwm() -> aqm_core::FrequencyWeightingMatrix {
    build_fwm(&CsfParams::default()).unwrap()
}

fn adaptive_qm(width: u32, height: u32) -> QuantizationMatrix {
    let geometry = DisplayGeometry::new(width, height).unwrap();
    let adapted = adapt_fwm(&default_fwm(), &ExponentField::new(geometry, 8)).unwrap();
    derive_qm(&adapted, QM_SCALE).unwrap()
}

fn check_budget(name: &str, start: Instant, budget: Duration) -> Duration {
    let elapsed = start.elapsed();
    assert!(
        elapsed < budget,
        "{name} exceeded its runtime budget: {elapsed:?} >= {budget:?}"
    );
    elapsed
}

#[test]
fn criterion_1_golden_fwm() {
    let start = Instant::now();
    let fwm = default_fwm();
    for i in 0..8 {
        for j in 0..8 {
            let (got, want) = (fwm.get(i, j), GOLDEN_FWM[i][j]);
            assert!(
                (got - want).abs() < 5e-5,
                "criterion 1: FWM entry ({i},{j}) = {got}, want {want}"
            );
        }
    }
    let elapsed = check_budget("criterion 1", start, Duration::from_secs(1));
    println!("criterion 1 (golden FWM, 64/64 within 5e-5): PASS in {elapsed:?}");
}

#[test]
fn criterion_2_golden_default_qm() {
    let start = Instant::now();
    let qm = derive_qm(&default_fwm(), QM_SCALE).unwrap();
    for i in 0..8 {
        for j in 0..8 {
            assert_eq!(
                qm.get(i, j),
                GOLDEN_QM[i][j],
                "criterion 2: QM entry ({i},{j})"
            );
        }
    }
    assert_eq!(qm.get(7, 7), 115);
    let elapsed = check_budget("criterion 2", start, Duration::from_secs(1));
    println!("criterion 2 (golden default QM, 64/64 exact): PASS in {elapsed:?}");
}

#[test]
fn criterion_3_golden_adaptive_qm() {
    let start = Instant::now();
    let aqm = adaptive_qm(3840, 2160);
    for i in 0..8 {
        for j in 0..8 {
            assert_eq!(
                aqm.get(i, j),
                GOLDEN_AQM_4K[i][j],
                "criterion 3: AQM entry ({i},{j})"
            );
        }
    }
    assert_eq!(aqm.get(0, 7), 18);
    assert_eq!(aqm.get(7, 7), 23);
    let elapsed = check_budget("criterion 3", start, Duration::from_secs(1));
    println!("criterion 3 (golden 4K adaptive QM, 64/64 exact): PASS in {elapsed:?}");
}

#[test]
fn criterion_4_geometry_constants() {
    let start = Instant::now();
    // Independent straight-line evaluation of the geometry chain.
    let h_a = (3840.0f64.powi(2) + 2160.0f64.powi(2)).sqrt();
    let h_t = (65535.0f64.powi(2) + 65535.0f64.powi(2)).sqrt();
    let oracle_p = h_a / h_t;
    let oracle_w = h_t.powf(-oracle_p);

    let g = DisplayGeometry::new(3840, 2160).unwrap();
    assert!((g.normalized_hypotenuse() - oracle_p).abs() < 1e-12);
    assert!((g.resolution_parameter() - oracle_w).abs() < 1e-12);
    assert!(
        (g.normalized_hypotenuse() - 0.04754).abs() < 1e-4,
        "p = {}",
        g.normalized_hypotenuse()
    );
    assert!(
        (g.resolution_parameter() - 0.5806).abs() < 1e-3,
        "w = {}",
        g.resolution_parameter()
    );
    let elapsed = check_budget("criterion 4", start, Duration::from_secs(1));
    println!("criterion 4 (4K geometry constants vs oracle): PASS in {elapsed:?}");
}

#[test]
fn criterion_5_dominance_suite() {
    let start = Instant::now();
    let default_qm = derive_qm(&default_fwm(), QM_SCALE).unwrap();
    let mut violations: Vec<String> = Vec::new();

    for &(w, h) in &RESOLUTION_GRID {
        let aqm = adaptive_qm(w, h);
        for i in 0..8 {
            for j in 0..8 {
                if aqm.get(i, j) > default_qm.get(i, j) {
                    violations.push(format!("{w}x{h}: ({i},{j}) exceeds default"));
                }
                if aqm.get(i, j) < 16 {
                    violations.push(format!("{w}x{h}: ({i},{j}) below 16"));
                }
                if aqm.get(i, j) != aqm.get(j, i) {
                    violations.push(format!("{w}x{h}: asymmetric at ({i},{j})"));
                }
            }
        }
        if aqm.get(0, 0) != 16 {
            violations.push(format!("{w}x{h}: DC entry {}", aqm.get(0, 0)));
        }
        for i in 0..8 {
            for j in 1..8 {
                if aqm.get(i, j) < aqm.get(i, j - 1) {
                    violations.push(format!(
                        "{w}x{h}: row {i} decreases {} -> {} at col {j}",
                        aqm.get(i, j - 1),
                        aqm.get(i, j)
                    ));
                }
                if aqm.get(j, i) < aqm.get(j - 1, i) {
                    violations.push(format!(
                        "{w}x{h}: col {i} decreases {} -> {} at row {j}",
                        aqm.get(j - 1, i),
                        aqm.get(j, i)
                    ));
                }
            }
        }
    }

    let elapsed = check_budget("criterion 5", start, Duration::from_secs(1));
    if violations.is_empty() {
        println!("criterion 5 (dominance property suite): PASS in {elapsed:?}");
    } else {
        println!(
            "criterion 5 (dominance property suite): FAIL in {elapsed:?} — {} violation(s): {}",
            violations.len(),
            violations.join("; ")
        );
        // Known model behavior: at 7680x4320 the distance exponent decays
        // fast enough that the unrounded entries 16/H' themselves dip
        // along row/column 3 (17.534 -> 17.468), so strict row/column
        // monotonicity cannot hold over the full grid.
        panic!(
            "criterion 5 fails as stated: {} violation(s), all at 7680x4320 monotonicity: {}",
            violations.len(),
            violations.join("; ")
        );
    }
}

// Deterministic high-frequency texture: energy concentrated near the
// Nyquist corner, where the default matrix quantizes ~5x coarser than
// the 4K adaptive matrix.
fn high_frequency_texture(size: usize) -> ImagePlane {
    ImagePlane::from_fn(size, size, Component::Luma, |x, y| {
        let (xf, yf) = (x as f64, y as f64);
        let v = 128.0
            + 48.0 * (2.7 * xf + 2.9 * yf).sin()
            + 36.0 * (3.0 * xf - 2.5 * yf).cos()
            + 20.0 * (2.1 * xf).sin() * (1.9 * yf).cos();
        v.round().clamp(0.0, 255.0) as u8
    })
}

#[test]
fn criterion_6_codec_direction() {
    let start = Instant::now();
    let img = high_frequency_texture(256);
    let default_qm = derive_qm(&default_fwm(), QM_SCALE).unwrap();
    let aqm = adaptive_qm(3840, 2160);

    let (recon_default, rd_default) =
        code_image(&img, &QuantConfig::new(30, default_qm).unwrap());
    let (recon_aqm, rd_aqm) = code_image(&img, &QuantConfig::new(30, aqm).unwrap());

    let ssim_default = ssim(&img, &recon_default).unwrap();
    let ssim_aqm = ssim(&img, &recon_aqm).unwrap();
    assert!(
        ssim_aqm >= ssim_default,
        "criterion 6: SSIM {ssim_aqm} (adaptive) < {ssim_default} (default)"
    );
    assert!(
        rd_aqm.rate >= rd_default.rate,
        "criterion 6: rate {} (adaptive) < {} (default)",
        rd_aqm.rate,
        rd_default.rate
    );
    let elapsed = check_budget("criterion 6", start, Duration::from_secs(10));
    println!(
        "criterion 6 (qp30 direction: SSIM {ssim_aqm:.4} >= {ssim_default:.4}, rate {} >= {}): PASS in {elapsed:?}",
        rd_aqm.rate, rd_default.rate
    );
}

// Brute-force PSNR straight from the definition.
fn oracle_psnr(a: &ImagePlane, b: &ImagePlane) -> f64 {
    let mut sse = 0.0f64;
    for y in 0..a.height() {
        for x in 0..a.width() {
            let d = f64::from(a.get(x, y)) - f64::from(b.get(x, y));
            sse += d * d;
        }
    }
    if sse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0f64 * 255.0 / (sse / (a.width() * a.height()) as f64)).log10()
    }
}

// Brute-force SSIM: per-window double loops over the definition.
fn oracle_ssim(a: &ImagePlane, b: &ImagePlane) -> f64 {
    const WINDOW: usize = 11;
    const SIGMA: f64 = 1.5;
    let mut weights = [[0.0f64; WINDOW]; WINDOW];
    let mut total = 0.0;
    for (r, row) in weights.iter_mut().enumerate() {
        for (c, wgt) in row.iter_mut().enumerate() {
            let (dr, dc) = (r as f64 - 5.0, c as f64 - 5.0);
            *wgt = (-(dr * dr + dc * dc) / (2.0 * SIGMA * SIGMA)).exp();
            total += *wgt;
        }
    }
    for row in &mut weights {
        for wgt in row {
            *wgt /= total;
        }
    }
    let c1 = (0.01f64 * 255.0).powi(2);
    let c2 = (0.03f64 * 255.0).powi(2);
    let (mut sum, mut count) = (0.0f64, 0usize);
    for top in 0..=(a.height() - WINDOW) {
        for left in 0..=(a.width() - WINDOW) {
            let (mut mx, mut my) = (0.0f64, 0.0f64);
            for r in 0..WINDOW {
                for c in 0..WINDOW {
                    mx += weights[r][c] * f64::from(a.get(left + c, top + r));
                    my += weights[r][c] * f64::from(b.get(left + c, top + r));
                }
            }
            let (mut vx, mut vy, mut cov) = (0.0f64, 0.0f64, 0.0f64);
            for r in 0..WINDOW {
                for c in 0..WINDOW {
                    let dx = f64::from(a.get(left + c, top + r)) - mx;
                    let dy = f64::from(b.get(left + c, top + r)) - my;
                    vx += weights[r][c] * dx * dx;
                    vy += weights[r][c] * dy * dy;
                    cov += weights[r][c] * dx * dy;
                }
            }
            sum += ((2.0 * mx * my + c1) * (2.0 * cov + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1;
        }
    }
    sum / count as f64
}

#[test]
fn criterion_7_metric_oracles() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for round in 0..10 {
        let (w, h) = (32 + (round % 3) * 8, 24 + (round % 4) * 6);
        let a = ImagePlane::new(
            w,
            h,
            Component::Luma,
            (0..w * h).map(|_| rng.random()).collect(),
        )
        .unwrap();
        let b = ImagePlane::new(
            w,
            h,
            Component::Luma,
            (0..w * h).map(|_| rng.random()).collect(),
        )
        .unwrap();
        let dp = (psnr(&a, &b).unwrap() - oracle_psnr(&a, &b)).abs();
        assert!(dp < 1e-9, "criterion 7: psnr oracle deviation {dp}");
        let ds = (ssim(&a, &b).unwrap() - oracle_ssim(&a, &b)).abs();
        assert!(ds < 1e-6, "criterion 7: ssim oracle deviation {ds}");
    }

    let curve: Vec<RdPoint> = [(1200.0, 31.7), (2600.0, 34.9), (5400.0, 38.2), (11000.0, 41.6)]
        .iter()
        .map(|&(rate, quality)| RdPoint { rate, quality })
        .collect();
    let identical = bd_rate(&curve, &curve).unwrap();
    assert!(identical.abs() < 1e-9, "criterion 7: bd_rate(c, c) = {identical}");

    let doubled: Vec<RdPoint> = curve
        .iter()
        .map(|p| RdPoint {
            rate: p.rate * 2.0,
            quality: p.quality,
        })
        .collect();
    let plus_hundred = bd_rate(&curve, &doubled).unwrap();
    assert!(
        (plus_hundred - 100.0).abs() < 1e-4,
        "criterion 7: doubled-rate bd_rate = {plus_hundred}"
    );

    let elapsed = check_budget("criterion 7", start, Duration::from_secs(5));
    println!("criterion 7 (metric oracles): PASS in {elapsed:?}");
}

#[test]
fn criterion_8_round_trips() {
    let start = Instant::now();

    // Scaling-list round trip over the full resolution grid.
    let model = InterModelParams::hevc_fit();
    let mut doc = ScalingListDocument::default();
    for (layer, &(w, h)) in RESOLUTION_GRID.iter().enumerate() {
        let intra8 = adaptive_qm(w, h);
        let inter8 = derive_inter(&intra8, &model).unwrap();
        let matrices = vec![
            intra8.clone(),
            inter8.clone(),
            replicate(&intra8, 16).unwrap(),
            replicate(&inter8, 16).unwrap(),
            replicate(&intra8, 32).unwrap(),
            replicate(&inter8, 32).unwrap(),
        ];
        doc.append_layer(&matrices, layer as u32).unwrap();
    }
    let from_text = ScalingListDocument::from_text(&doc.to_text()).unwrap();
    let from_json = ScalingListDocument::from_json_str(&doc.to_json_string()).unwrap();
    assert_eq!(doc.entries().len(), from_text.entries().len());
    for (a, b) in doc.entries().iter().zip(from_text.entries()) {
        assert_eq!(a.layer_id, b.layer_id);
        assert!(a.matrix.same_matrix(&b.matrix), "criterion 8: text round trip");
    }
    for (a, b) in doc.entries().iter().zip(from_json.entries()) {
        assert!(a.matrix.same_matrix(&b.matrix), "criterion 8: json round trip");
    }

    // DCT forward -> inverse identity, 100 random blocks per size.
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0C7);
    for &n in &[4usize, 8, 16, 32] {
        let dct = Dct2d::new(n).unwrap();
        for _ in 0..100 {
            let block: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.0..255.0)).collect();
            let back = dct.inverse(&dct.forward(&block));
            for (x, y) in block.iter().zip(&back) {
                assert!(
                    (x - y).abs() < 1e-9,
                    "criterion 8: dct round trip error at n={n}"
                );
            }
        }
    }

    let elapsed = check_budget("criterion 8", start, Duration::from_secs(5));
    println!("criterion 8 (serialization and transform round trips): PASS in {elapsed:?}");
}
