use nalgebra::{Complex as NaComplex, DMatrix};
use proptest::prelude::*;

use seqforge::majorizer::{build_operator, compute_bound, dense_matrix, BoundStrategy};
use seqforge::metrics::{autocorrelation_direct, autocorrelation_fft, isl, isl_frequency};
use seqforge::{random_sequence, Sequence, Sequence32, Sequence64};

fn dense_lambda_max(z: &Sequence64) -> f64 {
    let rows = dense_matrix(&autocorrelation_direct(z));
    let p = z.len();
    let m = DMatrix::from_fn(p, p, |i, j| NaComplex::new(rows[i][j].re, rows[i][j].im));
    m.symmetric_eigen().eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fft_autocorrelation_matches_direct_sum(len in 1usize..80, seed in any::<u64>()) {
        let z: Sequence64 = random_sequence(len, seed).unwrap();
        let fast = autocorrelation_fft(&z);
        let slow = autocorrelation_direct(&z);
        for (a, b) in fast.values().iter().zip(slow.values()) {
            prop_assert!((a - b).norm() <= 1e-10 * len as f64);
        }
        prop_assert!((fast.values()[0].re - len as f64).abs() <= 1e-9 * len as f64);
        prop_assert_eq!(fast.values()[0].im, 0.0);
    }

    #[test]
    fn lag_and_frequency_isl_agree(len in 2usize..80, seed in any::<u64>()) {
        let z: Sequence64 = random_sequence(len, seed).unwrap();
        let lag = isl(&autocorrelation_direct(&z));
        let freq = isl_frequency(&z);
        prop_assert!((lag - freq).abs() <= 1e-8 * lag.max(1e-300));
    }

    #[test]
    fn every_bound_dominates_the_hessian(len in 1usize..40, seed in any::<u64>()) {
        let z: Sequence64 = random_sequence(len, seed).unwrap();
        let op = build_operator(&autocorrelation_fft(&z));
        let exact = 8.0 * dense_lambda_max(&z);
        let tr = compute_bound(&op, BoundStrategy::Tr).unwrap().m_scalar;
        for strategy in BoundStrategy::ALL {
            let m = compute_bound(&op, strategy).unwrap().m_scalar;
            prop_assert!(m >= exact - 1e-6 * m, "{} {} < {}", strategy, m, exact);
            prop_assert!(tr >= m - 1e-9 * tr);
        }
    }

    #[test]
    fn toeplitz_apply_matches_dense_product(len in 1usize..40, seed in any::<u64>(), x_seed in any::<u64>()) {
        let z: Sequence64 = random_sequence(len, seed).unwrap();
        let x: Sequence64 = random_sequence(len, x_seed).unwrap();
        let r = autocorrelation_fft(&z);
        let fast = build_operator(&r).apply(x.samples()).unwrap();
        let rows = dense_matrix(&r);
        for (i, row) in rows.iter().enumerate() {
            let slow: num_complex::Complex<f64> = row.iter().zip(x.samples()).map(|(a, b)| a * b).sum();
            prop_assert!((fast[i] - slow).norm() <= 1e-9 * len as f64);
        }
    }

    #[test]
    fn single_precision_tracks_double(len in 1usize..64, seed in any::<u64>()) {
        let z64: Sequence64 = random_sequence(len, seed).unwrap();
        let z32: Sequence32 = random_sequence(len, seed).unwrap();
        let a = isl(&autocorrelation_fft(&z64));
        let b = isl(&autocorrelation_fft(&z32)) as f64;
        prop_assert!((a - b).abs() <= 1e-3 * a.max(1.0));
    }
}

#[test]
fn casting_preserves_samples_to_single_precision() {
    let z: Sequence64 = random_sequence(12, 3).unwrap();
    let narrow: Sequence<f32> = z.cast();
    for (a, b) in z.samples().iter().zip(narrow.samples()) {
        assert!((a.re - b.re as f64).abs() < 1e-6 && (a.im - b.im as f64).abs() < 1e-6);
    }
}
