mod common;

use std::f64::consts::{PI, TAU};

use common::{add_noise, cn, sigma2_for};
use rand::Rng;
use sgcs::detect_noiseless::{classify_noiseless, ratio_test_index, NoiselessTolerance};
use sgcs::detect_noisy::{
    dft_singleton_search, kay_estimate, kay_estimate_centered, ml_singleton_search,
    robust_bin_detect, verify_singleton, zero_ton_test, DetectorConfig, SearchFlavor,
};
use sgcs::rng::rng_from_seed;
use sgcs::{Alphabet, BinDetectionMatrix, BinHypothesis, C64};

fn cfg(flavor: SearchFlavor, sigma2: f64) -> DetectorConfig {
    DetectorConfig::new(0.2, sigma2, Alphabet::bpsk(), flavor).unwrap()
}

fn bpsk(rng: &mut impl Rng) -> C64 {
    if rng.random::<bool>() {
        C64::new(1.0, 0.0)
    } else {
        C64::new(-1.0, 0.0)
    }
}

fn combine(s: &BinDetectionMatrix, terms: &[(usize, C64)]) -> Vec<C64> {
    let mut y = vec![C64::new(0.0, 0.0); s.rows()];
    for &(k, v) in terms {
        for (a, b) in y.iter_mut().zip(s.column_vec(k)) {
            *a += v * b;
        }
    }
    y
}

/// `P(χ²_{2P} / 2P <= 1.2)` for `P = 64`, from the regularized incomplete
/// gamma function.
const NOISE_ACCEPT_P64: f64 = 0.938_863_5;

fn assert_rate_near(rate: f64, p: f64, trials: usize) {
    let sd = (p * (1.0 - p) / trials as f64).sqrt();
    assert!((rate - p).abs() < 4.0 * sd, "rate {rate}, expected {p} ± {}", 4.0 * sd);
}

// ---- noiseless ratio test ----

#[test]
fn ratio_test_completeness_and_round_trip() {
    let tol = NoiselessTolerance::default();
    let mut rng = rng_from_seed(1);
    let s = BinDetectionMatrix::noiseless(997, 2).unwrap();
    let scale = s.scale().unwrap();
    for k in 0..997 {
        let x = C64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let y = combine(&s, &[(k, x)]);
        let (kk, v) = classify_noiseless(&y, scale, 997, &tol).pair().unwrap();
        assert_eq!(kk, k);
        assert!((v - x).norm() <= 1e-10 * x.norm());
    }
}

#[test]
fn ratio_test_index_round_trip_large_n() {
    let tol = NoiselessTolerance::default();
    let n = 1_000_000;
    let scale = vec![1.0; n];
    for k in 0..n {
        let y = [C64::new(1.0, 0.0), C64::from_polar(1.0, TAU * k as f64 / n as f64)];
        assert_eq!(classify_noiseless(&y, &scale, n, &tol).pair().map(|p| p.0), Some(k));
    }
}

#[test]
fn ratio_test_soundness_on_multi_tons() {
    let tol = NoiselessTolerance::default();
    let mut rng = rng_from_seed(3);
    let n = 1024;
    let s = BinDetectionMatrix::noiseless(n, 4).unwrap();
    let scale = s.scale().unwrap();
    let mut false_single = 0;
    for _ in 0..10_000 {
        let count = rng.random_range(2..=4);
        let terms: Vec<(usize, C64)> = rand::seq::index::sample(&mut rng, n, count)
            .into_iter()
            .map(|k| (k, C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))))
            .collect();
        let y = combine(&s, &terms);
        if classify_noiseless(&y, scale, n, &tol).is_single_ton() {
            false_single += 1;
        }
    }
    assert_eq!(false_single, 0);
}

#[test]
fn worked_example_ratio_tests() {
    let w = |e: usize| C64::from_polar(1.0, TAU * e as f64 / 20.0);
    let y = [C64::new(10.0, 0.0), w(1) + 2.0 * w(5) + 7.0 * w(13)];
    assert!((ratio_test_index(&y, 20) - 12.59).abs() < 5e-3);
    let y = [C64::new(3.0, 0.0), 3.0 * w(10)];
    assert_eq!(ratio_test_index(&y, 20).round(), 10.0);
}

// ---- zero-ton test ----

#[test]
fn zero_ton_accepts_pure_noise_at_chi_square_rate() {
    let mut rng = rng_from_seed(10);
    let c = cfg(SearchFlavor::Ml, 0.5);
    let trials = 10_000;
    let ok = (0..trials)
        .filter(|_| {
            let y: Vec<C64> = (0..64).map(|_| cn(&mut rng, 0.5)).collect();
            zero_ton_test(&y, &c)
        })
        .count();
    assert_rate_near(ok as f64 / trials as f64, NOISE_ACCEPT_P64, trials);
}

#[test]
fn zero_ton_rejects_single_tons() {
    let mut rng = rng_from_seed(11);
    let s = BinDetectionMatrix::random(100, 64, 12).unwrap();
    let c = cfg(SearchFlavor::Ml, 0.1);
    let trials = 10_000;
    let accepted = (0..trials)
        .filter(|_| {
            let k = rng.random_range(0..100);
            let mut y = combine(&s, &[(k, bpsk(&mut rng))]);
            add_noise(&mut y, &mut rng, 0.1);
            zero_ton_test(&y, &c)
        })
        .count();
    assert!(accepted as f64 / trials as f64 <= 0.01, "{accepted}");
}

// ---- single-ton search and verification ----

#[test]
fn ml_search_small_dimension() {
    let mut rng = rng_from_seed(20);
    let sigma2 = sigma2_for(20.0);
    let c = cfg(SearchFlavor::Ml, sigma2);
    let all: Vec<usize> = (0..32).collect();
    let trials = 10_000;
    let mut hits = 0;
    for t in 0..trials {
        let s = BinDetectionMatrix::random(32, 16, 1_000 + t as u64).unwrap();
        let k = rng.random_range(0..32);
        let mut y = combine(&s, &[(k, bpsk(&mut rng))]);
        add_noise(&mut y, &mut rng, sigma2);
        if ml_singleton_search(&y, &s, &all, &c).unwrap().0 == k {
            hits += 1;
        }
    }
    assert!(hits as f64 / trials as f64 >= 0.99, "{hits}");
}

#[test]
fn ml_search_on_orthogonal_bin() {
    // P = 6 > N = 3: take a vector orthogonal to every column.
    let s = BinDetectionMatrix::random(3, 6, 21).unwrap();
    let cols: Vec<Vec<C64>> = (0..3).map(|k| s.column_vec(k)).collect();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for c in &cols {
        let mut v = c.clone();
        for b in &basis {
            let dot: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= dot * bi;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        basis.push(v.iter().map(|x| x / norm).collect());
    }
    let mut y: Vec<C64> = (0..6).map(|i| C64::new(1.0 + i as f64, -(i as f64))).collect();
    for b in &basis {
        let dot: C64 = b.iter().zip(&y).map(|(x, yy)| x.conj() * yy).sum();
        for (yi, bi) in y.iter_mut().zip(b) {
            *yi -= dot * bi;
        }
    }
    for c in &cols {
        let dot: C64 = c.iter().zip(&y).map(|(a, b)| a.conj() * b).sum();
        assert!(dot.norm() < 1e-12);
    }
    let cf = cfg(SearchFlavor::Ml, 0.01);
    let (k, x) = ml_singleton_search(&y, &s, &[0, 1, 2], &cf).unwrap();
    assert_eq!(x, C64::new(1.0, 0.0));
    assert!(!verify_singleton(&y, &cols[k], x, &cf));
    assert_eq!(robust_bin_detect(&y, &s, &[0, 1, 2], &cf), BinHypothesis::MultiTon);
}

#[test]
fn verification_pass_rate_for_true_single_tons() {
    let mut rng = rng_from_seed(30);
    let sigma2 = sigma2_for(15.0);
    let c = cfg(SearchFlavor::Ml, sigma2);
    let s = BinDetectionMatrix::random(200, 64, 31).unwrap();
    let trials = 10_000;
    let mut pass = 0;
    for _ in 0..trials {
        let k = rng.random_range(0..200);
        let x = bpsk(&mut rng);
        let mut y = combine(&s, &[(k, x)]);
        add_noise(&mut y, &mut rng, sigma2);
        if verify_singleton(&y, &s.column_vec(k), x, &c) {
            pass += 1;
        }
    }
    assert_rate_near(pass as f64 / trials as f64, NOISE_ACCEPT_P64, trials);
}

#[test]
fn verification_rejects_two_coefficient_bins() {
    let mut rng = rng_from_seed(40);
    let sigma2 = sigma2_for(15.0);
    let c = cfg(SearchFlavor::Ml, sigma2);
    let s = BinDetectionMatrix::random(200, 64, 41).unwrap();
    let all: Vec<usize> = (0..200).collect();
    let trials = 10_000;
    let mut false_pass = 0;
    for _ in 0..trials {
        let ks = rand::seq::index::sample(&mut rng, 200, 2);
        let terms: Vec<(usize, C64)> = ks.iter().map(|k| (k, bpsk(&mut rng))).collect();
        let mut y = combine(&s, &terms);
        add_noise(&mut y, &mut rng, sigma2);
        let (k, x) = ml_singleton_search(&y, &s, &all, &c).unwrap();
        if verify_singleton(&y, &s.column_vec(k), x, &c) {
            false_pass += 1;
        }
    }
    assert!(false_pass as f64 / trials as f64 <= 0.02, "{false_pass}");
}

#[test]
fn three_coefficient_bins_are_multi_tons() {
    let mut rng = rng_from_seed(50);
    let sigma2 = sigma2_for(15.0);
    let c = cfg(SearchFlavor::Ml, sigma2);
    let s = BinDetectionMatrix::random(256, 32, 51).unwrap();
    let all: Vec<usize> = (0..256).collect();
    let trials = 1_000;
    let multi = (0..trials)
        .filter(|_| {
            let terms: Vec<(usize, C64)> = rand::seq::index::sample(&mut rng, 256, 3)
                .iter()
                .map(|k| (k, bpsk(&mut rng)))
                .collect();
            let mut y = combine(&s, &terms);
            add_noise(&mut y, &mut rng, sigma2);
            robust_bin_detect(&y, &s, &all, &c) == BinHypothesis::MultiTon
        })
        .count();
    assert!(multi as f64 / trials as f64 >= 0.95, "{multi}");
}

#[test]
fn noiseless_single_tons_either_flavor() {
    let all: Vec<usize> = (0..63).collect();
    let sr = BinDetectionMatrix::random(63, 12, 60).unwrap();
    let sc = BinDetectionMatrix::clustered(63, 6, 4, 61).unwrap();
    for k in 0..63 {
        for x in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)] {
            let expect = BinHypothesis::SingleTon { index: k, value: x };
            let y = combine(&sr, &[(k, x)]);
            assert_eq!(robust_bin_detect(&y, &sr, &all, &cfg(SearchFlavor::Ml, 0.0)), expect);
            let y = combine(&sc, &[(k, x)]);
            assert_eq!(robust_bin_detect(&y, &sc, &all, &cfg(SearchFlavor::Clustered, 0.0)), expect);
        }
    }
}

// ---- clustered search ----

#[test]
fn clustered_search_brute_force_small() {
    let all: Vec<usize> = (0..15).collect();
    let c = cfg(SearchFlavor::Clustered, 0.0);
    for seed in 0..20 {
        let s = BinDetectionMatrix::clustered(15, 3, 4, seed).unwrap();
        for k in 0..15 {
            for x in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)] {
                let y = combine(&s, &[(k, x)]);
                assert_eq!(dft_singleton_search(&y, &s, &all, &c).unwrap(), (k, x));
            }
        }
    }
}

#[test]
fn clustered_search_at_15_db() {
    let mut rng = rng_from_seed(70);
    let n = 4095;
    let sigma2 = sigma2_for(15.0);
    let c = cfg(SearchFlavor::Clustered, sigma2);
    let all: Vec<usize> = (0..n).collect();
    let trials = 1_000;
    let mut hits = 0;
    for t in 0..trials {
        let s = BinDetectionMatrix::clustered(n, 12, 12, 5_000 + t as u64).unwrap();
        let k = rng.random_range(0..n);
        let mut y = combine(&s, &[(k, bpsk(&mut rng))]);
        add_noise(&mut y, &mut rng, sigma2);
        if matches!(dft_singleton_search(&y, &s, &all, &c), Ok((kk, _)) if kk == k) {
            hits += 1;
        }
    }
    assert!(hits as f64 / trials as f64 >= 0.95, "{hits}");
}

#[test]
fn flavors_agree_on_noiseless_bins() {
    let mut rng = rng_from_seed(80);
    let n = 511;
    let all: Vec<usize> = (0..n).collect();
    let trials = 2_000;
    let mut agree = 0;
    for t in 0..trials {
        let s = BinDetectionMatrix::clustered(n, 9, 4, 9_000 + t as u64).unwrap();
        let k = rng.random_range(0..n);
        let y = combine(&s, &[(k, bpsk(&mut rng))]);
        let a = ml_singleton_search(&y, &s, &all, &cfg(SearchFlavor::Ml, 0.0)).unwrap();
        let b = dft_singleton_search(&y, &s, &all, &cfg(SearchFlavor::Clustered, 0.0)).unwrap();
        if a.0 == b.0 {
            agree += 1;
        }
    }
    assert!(agree as f64 / trials as f64 >= 0.99, "{agree}");
}

// ---- frequency estimation ----

fn wrapped(d: f64) -> f64 {
    let r = d.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[test]
fn kay_variance_near_bound() {
    let mut rng = rng_from_seed(90);
    let q = 16;
    let sigma2 = sigma2_for(10.0);
    let omega = TAU * 0.1;
    let trials = 10_000;
    let errs: Vec<f64> = (0..trials)
        .map(|_| {
            let y: Vec<C64> = (0..q)
                .map(|m| C64::from_polar(1.0, omega * m as f64) + cn(&mut rng, sigma2))
                .collect();
            wrapped(kay_estimate(&y).unwrap() - omega)
        })
        .collect();
    let mean = errs.iter().sum::<f64>() / trials as f64;
    let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
    let bound = 6.0 * sigma2 / (q as f64 * (q * q - 1) as f64);
    assert!(mean.abs() < 3.0 * (var / trials as f64).sqrt(), "bias {mean}");
    assert!((var / bound - 1.0).abs() < 0.25, "var {var} vs {bound}");
}

#[test]
fn large_error_rate_falls_with_q() {
    let sigma2 = sigma2_for(-5.0);
    let trials = 10_000;
    let rates: Vec<f64> = [4usize, 8, 16, 32]
        .iter()
        .map(|&q| {
            let mut rng = rng_from_seed(100 + q as u64);
            let big = (0..trials)
                .filter(|_| {
                    let omega = rng.random_range(0.0..TAU);
                    let y: Vec<C64> = (0..q)
                        .map(|m| C64::from_polar(1.0, omega * m as f64) + cn(&mut rng, sigma2))
                        .collect();
                    wrapped(kay_estimate_centered(&y).unwrap() - omega).abs() > PI / 2.0
                })
                .count();
            big as f64 / trials as f64
        })
        .collect();
    assert!(rates.windows(2).all(|w| w[1] < w[0]), "{rates:?}");
    assert!(rates[0] > 0.0);
}
