//! Unimodular sequences, phase vectors and the deterministic initializers.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::num::Real;

/// A phase-only sequence: every sample has modulus one.
///
/// The length is fixed at construction. Samples are only reachable through
/// shared slices, so the invariant cannot be broken after the fact.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence<T> {
    samples: Vec<Complex<T>>,
}

impl<T: Real> Sequence<T> {
    /// Validates that `samples` is non-empty and unit-modulus.
    pub fn new(samples: Vec<Complex<T>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidLength {
                len: 0,
                reason: "a sequence needs at least one sample",
            });
        }
        let tol = T::unit_tolerance();
        for (index, s) in samples.iter().enumerate() {
            let modulus = s.norm();
            let err = (modulus - T::one()).abs();
            if err.is_nan() || err > tol {
                return Err(Error::NotUnimodular {
                    index,
                    modulus: modulus.to_f64_lossy(),
                });
            }
        }
        Ok(Self { samples })
    }

    /// Builds `e^{jφ}` for every phase.
    pub fn from_phases(phases: &[T]) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::InvalidLength {
                len: 0,
                reason: "a sequence needs at least one sample",
            });
        }
        Ok(Self {
            samples: phases.iter().map(|&p| Complex::from_polar(T::one(), p)).collect(),
        })
    }

    /// Elementwise phase projection `a_n / |a_n|`.
    ///
    /// Entries of `a` with zero modulus keep the phase of `fallback`. Returns
    /// the projected sequence together with the number of such entries.
    pub fn project(a: &[Complex<T>], fallback: &Sequence<T>) -> (Self, usize) {
        debug_assert_eq!(a.len(), fallback.len());
        let mut degenerate = 0;
        let samples = a
            .iter()
            .zip(&fallback.samples)
            .map(|(&x, &prev)| {
                let m = x.norm();
                if m > T::zero() && m.is_finite() {
                    x / m
                } else {
                    degenerate += 1;
                    prev
                }
            })
            .collect();
        (Self { samples }, degenerate)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.samples
    }

    /// Largest `||z_n| - 1|` over the sequence.
    pub fn max_modulus_error(&self) -> T {
        self.samples
            .iter()
            .map(|s| (s.norm() - T::one()).abs())
            .fold(T::zero(), T::max)
    }

    pub fn phases(&self) -> PhaseVector<T> {
        PhaseVector::from_sequence(self)
    }

    /// Re-expresses the sequence in another precision, renormalizing each
    /// sample so the result is unit-modulus in the target type.
    pub fn cast<U: Real>(&self) -> Sequence<U> {
        Sequence {
            samples: self
                .samples
                .iter()
                .map(|s| {
                    let c = Complex::new(U::from_f64_lossy(s.re.to_f64_lossy()), U::from_f64_lossy(s.im.to_f64_lossy()));
                    c / c.norm()
                })
                .collect(),
        }
    }
}

/// Phase angles in radians, each reduced to `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector<T> {
    phases: Vec<T>,
}

impl<T: Real> PhaseVector<T> {
    /// Wraps arbitrary angles into `[0, 2π)`.
    pub fn new(phases: Vec<T>) -> Self {
        Self {
            phases: phases.into_iter().map(wrap_phase).collect(),
        }
    }

    pub fn from_sequence(z: &Sequence<T>) -> Self {
        Self::new(z.samples.iter().map(|s| s.arg()).collect())
    }

    pub fn to_sequence(&self) -> Result<Sequence<T>> {
        Sequence::from_phases(&self.phases)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

fn wrap_phase<T: Real>(p: T) -> T {
    let two_pi = T::TAU();
    let w = p % two_pi;
    let w = if w < T::zero() { w + two_pi } else { w };
    // `-tiny + 2π` rounds to exactly 2π.
    if w >= two_pi {
        T::zero()
    } else {
        w
    }
}

fn check_len(len: usize) -> Result<()> {
    if len == 0 {
        Err(Error::InvalidLength {
            len,
            reason: "sequence length must be at least 1",
        })
    } else {
        Ok(())
    }
}

/// Seeds the generator behind [`random_sequence`].
///
/// The stream is ChaCha8 (`rand_chacha::ChaCha8Rng`) keyed through
/// `SeedableRng::seed_from_u64`, which is portable across platforms.
pub fn sequence_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random initialization `z_n = e^{j2πθ_n}` with `θ_n ~ U[0, 1)` i.i.d.
///
/// The draws are taken in `f64` and then converted, so a given seed produces
/// the same phases in every precision.
pub fn random_sequence<T: Real>(len: usize, seed: u64) -> Result<Sequence<T>> {
    check_len(len)?;
    let mut rng = sequence_rng(seed);
    let phases: Vec<T> = (0..len)
        .map(|_| {
            let theta: f64 = rng.random();
            T::from_f64_lossy(std::f64::consts::TAU * theta)
        })
        .collect();
    Sequence::from_phases(&phases)
}

/// Golomb polyphase sequence, `z_n = e^{jπ(n-1)n/P}` for `n = 1..P`.
pub fn golomb_sequence<T: Real>(len: usize) -> Result<Sequence<T>> {
    check_len(len)?;
    // Reduce (n-1)n modulo 2P in integers before scaling by π/P.
    let modulus = 2 * len as u128;
    let phases: Vec<T> = (1..=len as u128)
        .map(|n| {
            let k = ((n - 1) * n) % modulus;
            T::from_f64_lossy(std::f64::consts::PI * k as f64 / len as f64)
        })
        .collect();
    Sequence::from_phases(&phases)
}

/// Frank polyphase sequence for `P = M²`: element `(p-1)M + q` has phase
/// `(2π/M)(p-1)(q-1)`.
pub fn frank_sequence<T: Real>(len: usize) -> Result<Sequence<T>> {
    check_len(len)?;
    let m = perfect_square_root(len).ok_or(Error::UnsupportedLength {
        len,
        constraint: "Frank sequences require a perfect-square length",
    })?;
    let mut phases = Vec::with_capacity(len);
    for p in 0..m {
        for q in 0..m {
            let k = (p * q) % m;
            phases.push(T::from_f64_lossy(std::f64::consts::TAU * k as f64 / m as f64));
        }
    }
    Sequence::from_phases(&phases)
}

/// Integer square root when `n` is a perfect square.
pub fn perfect_square_root(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r.saturating_sub(1)..=r + 1).find(|&c| c * c == n)
}
