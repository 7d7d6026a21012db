//! Zero-padded length-2P transforms.
//!
//! Bins are indexed `k = 0..2P-1`. The forward kernel is `e^{-j2πkn/(2P)}`
//! with no normalization; the inverse carries the `1/(2P)` factor, so
//! `inverse(forward(ẑ)) = ẑ`.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::num::Real;
use crate::sequence::Sequence;

/// Frequency-domain image of a zero-padded sequence; `2P` bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    bins: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn from_bins(bins: Vec<Complex<T>>) -> Result<Self> {
        check_even(bins.len())?;
        Ok(Self { bins })
    }

    pub fn bins(&self) -> &[Complex<T>] {
        &self.bins
    }

    pub fn into_bins(self) -> Vec<Complex<T>> {
        self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Length of the sequence this spectrum was taken from.
    pub fn sequence_len(&self) -> usize {
        self.bins.len() / 2
    }

    /// Elementwise `|s_k|²`.
    pub fn power(&self) -> Vec<T> {
        self.bins.iter().map(|b| b.norm_sqr()).collect()
    }
}

fn check_even(len: usize) -> Result<()> {
    if len < 2 || !len.is_multiple_of(2) {
        Err(Error::InvalidLength {
            len,
            reason: "spectrum length must be even and at least 2",
        })
    } else {
        Ok(())
    }
}

/// Snapshot of how many transforms a [`SpectralPlan`] has executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TransformCounts {
    pub forward: usize,
    pub inverse: usize,
}

/// Planned forward/inverse transforms of length `2P` for one sequence length.
///
/// Every execution bumps a counter so callers can audit the per-iteration
/// transform budget. The plan is `Send + Sync`; concurrent solves may share
/// one, though the counters then mix their tallies.
pub struct SpectralPlan<T: Real> {
    len: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    scale: T,
    n_forward: AtomicUsize,
    n_inverse: AtomicUsize,
}

impl<T: Real> std::fmt::Debug for SpectralPlan<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan")
            .field("len", &self.len)
            .field("counts", &self.counts())
            .finish()
    }
}

impl<T: Real> SpectralPlan<T> {
    /// Plans transforms for sequences of length `len` (transform size `2·len`).
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidLength {
                len,
                reason: "sequence length must be at least 1",
            });
        }
        let n = 2 * len;
        let mut planner = FftPlanner::new();
        Ok(Self {
            len,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            scale: T::one() / T::from_usize_lossy(n),
            n_forward: AtomicUsize::new(0),
            n_inverse: AtomicUsize::new(0),
        })
    }

    /// Sequence length `P` the plan serves.
    pub fn sequence_len(&self) -> usize {
        self.len
    }

    pub fn counts(&self) -> TransformCounts {
        TransformCounts {
            forward: self.n_forward.load(Ordering::Relaxed),
            inverse: self.n_inverse.load(Ordering::Relaxed),
        }
    }

    pub fn reset_counts(&self) {
        self.n_forward.store(0, Ordering::Relaxed);
        self.n_inverse.store(0, Ordering::Relaxed);
    }

    /// Forward transform of `x` zero-padded to `2P`.
    pub fn forward_padded(&self, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if x.len() != self.len {
            return Err(Error::Dimension {
                expected: self.len,
                got: x.len(),
            });
        }
        let mut buf = Vec::with_capacity(2 * self.len);
        buf.extend_from_slice(x);
        buf.resize(2 * self.len, Complex::new(T::zero(), T::zero()));
        self.forward_in_place(&mut buf)?;
        Ok(buf)
    }

    /// In-place forward transform of a full `2P` buffer.
    pub fn forward_in_place(&self, buf: &mut [Complex<T>]) -> Result<()> {
        self.check_full(buf.len())?;
        self.forward.process(buf);
        self.n_forward.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }

    /// In-place inverse transform of a full `2P` buffer, including `1/(2P)`.
    pub fn inverse_in_place(&self, buf: &mut [Complex<T>]) -> Result<()> {
        self.check_full(buf.len())?;
        self.inverse.process(buf);
        for b in buf.iter_mut() {
            *b = *b * self.scale;
        }
        self.n_inverse.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }

    fn check_full(&self, got: usize) -> Result<()> {
        if got != 2 * self.len {
            Err(Error::Dimension {
                expected: 2 * self.len,
                got,
            })
        } else {
            Ok(())
        }
    }
}

/// Unnormalized forward transform of `z` zero-padded to length `2P`.
pub fn forward_transform_2p<T: Real>(z: &Sequence<T>) -> Spectrum<T> {
    let plan = SpectralPlan::new(z.len()).expect("sequence is non-empty");
    let bins = plan
        .forward_padded(z.samples())
        .expect("plan length matches sequence");
    Spectrum { bins }
}

/// Inverse of [`forward_transform_2p`]; returns the full length-`2P` vector.
pub fn inverse_transform_2p<T: Real>(bins: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    check_even(bins.len())?;
    let plan = SpectralPlan::new(bins.len() / 2)?;
    let mut buf = bins.to_vec();
    plan.inverse_in_place(&mut buf)?;
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::random_sequence;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn assert_close(got: &[Complex<f64>], want: &[Complex<f64>], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).norm() <= tol, "{got:?} vs {want:?}");
        }
    }

    /// Literal O(N²) DFT used as the oracle for the planned transforms.
    fn naive_dft(x: &[Complex<f64>]) -> Vec<Complex<f64>> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        v * Complex::from_polar(1.0, -std::f64::consts::TAU * (k * i) as f64 / n as f64)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn forward_hand_values() {
        let z = Sequence::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let s = forward_transform_2p(&z);
        assert_close(s.bins(), &[c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.0), c(1.0, 1.0)], 1e-12);

        // P = 1: ẑ = [1, 0], so both bins equal 1.
        let z1 = Sequence::new(vec![c(1.0, 0.0)]).unwrap();
        assert_close(forward_transform_2p(&z1).bins(), &[c(1.0, 0.0), c(1.0, 0.0)], 1e-12);
    }

    #[test]
    fn forward_matches_naive_dft() {
        let z = random_sequence::<f64>(13, 5).unwrap();
        let mut padded = z.samples().to_vec();
        padded.resize(26, c(0.0, 0.0));
        assert_close(forward_transform_2p(&z).bins(), &naive_dft(&padded), 1e-11);
    }

    #[test]
    fn inverse_hand_values() {
        let out = inverse_transform_2p(&[c(2.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_close(&out, &[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)], 1e-12);

        let z = Sequence::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let back = inverse_transform_2p(forward_transform_2p(&z).bins()).unwrap();
        assert_close(&back, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 1e-12);

        let zeros = inverse_transform_2p(&[c(0.0, 0.0); 4]).unwrap();
        assert_close(&zeros, &[c(0.0, 0.0); 4], 0.0);
    }

    #[test]
    fn inverse_rejects_odd_length() {
        assert!(matches!(
            inverse_transform_2p(&[c(1.0, 0.0); 3]),
            Err(Error::InvalidLength { len: 3, .. })
        ));
        assert!(inverse_transform_2p::<f64>(&[]).is_err());
        assert!(Spectrum::from_bins(vec![c(0.0, 0.0); 5]).is_err());
    }

    #[test]
    fn plan_counts_and_dimension_checks() {
        let plan = SpectralPlan::<f64>::new(4).unwrap();
        let mut buf = plan.forward_padded(&[c(1.0, 0.0); 4]).unwrap();
        plan.inverse_in_place(&mut buf).unwrap();
        plan.forward_in_place(&mut buf).unwrap();
        assert_eq!(plan.counts(), TransformCounts { forward: 2, inverse: 1 });
        assert!(plan.forward_padded(&[c(1.0, 0.0); 3]).is_err());
        assert!(plan.inverse_in_place(&mut [c(1.0, 0.0); 6]).is_err());
        plan.reset_counts();
        assert_eq!(plan.counts(), TransformCounts::default());
    }

    #[test]
    fn transform_round_trip_corpus() {
        for i in 0..1000u64 {
            let len = 1 + (i % 64) as usize;
            let z = random_sequence::<f64>(len, i).unwrap();
            let back = inverse_transform_2p(forward_transform_2p(&z).bins()).unwrap();
            let err = back
                .iter()
                .enumerate()
                .map(|(n, b)| {
                    let want = if n < len { z.samples()[n] } else { c(0.0, 0.0) };
                    (b - want).norm()
                })
                .fold(0.0, f64::max);
            assert!(err <= 1e-12 * len as f64, "len {len} seed {i}: {err}");
        }
    }

    proptest! {
        #[test]
        fn parseval(len in 1usize..200, seed in any::<u64>()) {
            let z = random_sequence::<f64>(len, seed).unwrap();
            let energy: f64 = forward_transform_2p(&z).power().iter().sum();
            let p = len as f64;
            prop_assert!((energy - 2.0 * p * p).abs() <= 1e-9 * 2.0 * p * p);
        }
    }
}
