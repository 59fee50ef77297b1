use std::f64::consts::PI;

use concurrence::signal::{
    active_count, dichotomize, dichotomize_fourier, dichotomize_time, drop_low_variability,
    periodogram, DichotomizeConfig, Domain,
};
use concurrence::SeriesMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn noise(seed: u64, t: usize, v: usize) -> SeriesMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let rows = (0..t)
        .map(|_| (0..v).map(|_| 10.0 + normal.sample(&mut rng)).collect())
        .collect();
    SeriesMatrix::new((0..v).map(|i| format!("r{i:02}")).collect(), rows).unwrap()
}

fn direct_dft_power(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (1..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, &v) in x.iter().enumerate() {
                let w = 2.0 * PI * (k * t) as f64 / n as f64;
                re += v * w.cos();
                im -= v * w.sin();
            }
            (re * re + im * im) / n as f64
        })
        .collect()
}

#[test]
fn periodogram_matches_direct_transform() {
    for seed in 0..5 {
        let x = noise(seed, 64, 1).column(0);
        let fast = periodogram(&x).unwrap();
        let slow = direct_dft_power(&x);
        assert_eq!(fast.len(), 32);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn odd_length_periodogram() {
    let x = noise(9, 33, 1).column(0);
    let fast = periodogram(&x).unwrap();
    assert_eq!(fast.len(), 16);
    for (a, b) in fast.iter().zip(direct_dft_power(&x)) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn fourier_column_sums_at_scan_length() {
    let bm = dichotomize_fourier(&noise(3, 192, 8), 0.9).unwrap();
    assert_eq!(bm.n_obs(), 96);
    // 95 · 0.9 = 85.5, so the threshold falls between the 86th and 87th powers
    for v in 0..8 {
        assert_eq!(bm.column_sum(v), 10);
    }
}

#[test]
fn default_pipeline_shapes() {
    let sm = noise(4, 192, 40);
    let time = dichotomize(&sm, &DichotomizeConfig::default()).unwrap();
    assert_eq!((time.matrix.n_obs(), time.matrix.n_vars()), (192, 32));
    assert_eq!(time.dropped.len(), 8);
    assert!((0..32).all(|v| time.matrix.column_sum(v) == 39));

    let cfg = DichotomizeConfig {
        domain: Domain::Fourier,
        ..DichotomizeConfig::default()
    };
    let fourier = dichotomize(&sm, &cfg).unwrap();
    assert_eq!((fourier.matrix.n_obs(), fourier.matrix.n_vars()), (96, 32));
    assert_eq!(fourier.dropped, time.dropped);
}

#[test]
fn zero_drop_fraction_keeps_clean_columns() {
    let sm = noise(5, 50, 6);
    let (kept, dropped) = drop_low_variability(&sm, 0.0).unwrap();
    assert!(dropped.is_empty());
    assert_eq!(kept.n_vars(), 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn time_column_sums_are_exact(seed in any::<u64>(), t in 5usize..120, frac in 0.05f64..0.95) {
        let bm = dichotomize_time(&noise(seed, t, 3), frac).unwrap();
        let k = active_count(t, frac);
        prop_assert_eq!(k, (frac * t as f64 - 1e-9).ceil() as usize);
        for v in 0..3 {
            prop_assert_eq!(bm.column_sum(v), k);
        }
    }

    #[test]
    fn periodogram_ignores_constant_shift(seed in any::<u64>(), t in 4usize..80, c in -50.0f64..50.0) {
        let x = noise(seed, t, 1).column(0);
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        let a = periodogram(&x).unwrap();
        let b = periodogram(&shifted).unwrap();
        for (i, (p, q)) in a.iter().zip(&b).enumerate() {
            prop_assert!((p - q).abs() < 1e-7 * (1.0 + p.abs()), "bin {}", i + 1);
        }
    }

    #[test]
    fn fourier_column_sum_formula(seed in any::<u64>(), t in 8usize..200, q in 0.5f64..0.97) {
        let n = t / 2;
        let h = (n - 1) as f64 * q;
        prop_assume!((h - h.round()).abs() > 1e-6);
        let bm = dichotomize_fourier(&noise(seed, t, 2), q).unwrap();
        for v in 0..2 {
            prop_assert_eq!(bm.column_sum(v), n - 1 - h.floor() as usize);
        }
    }

    #[test]
    fn drop_is_column_order_equivariant(seed in any::<u64>(), perm in Just((0..9).collect::<Vec<usize>>()).prop_shuffle()) {
        let sm = noise(seed, 30, 9);
        let shuffled = sm.select(&perm);
        let (_, a) = drop_low_variability(&sm, 0.34).unwrap();
        let (_, b) = drop_low_variability(&shuffled, 0.34).unwrap();
        prop_assert_eq!(a.len(), 3);
        prop_assert_eq!(a, b);
    }
}
