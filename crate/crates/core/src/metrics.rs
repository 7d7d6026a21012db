//! Aperiodic autocorrelation and the sidelobe metrics built on it.

use std::fmt::Write as _;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::sequence::Sequence;
use crate::spectral::SpectralPlan;

/// dB value reported for a lag whose correlation is exactly zero.
pub const DB_FLOOR: f64 = -320.0;

/// Aperiodic autocorrelation `r(0..P-1)`.
///
/// Negative lags follow from `r(-l) = conj(r(l))` and are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationProfile<T> {
    values: Vec<Complex<T>>,
}

impl<T: Real> CorrelationProfile<T> {
    pub fn new(values: Vec<Complex<T>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidProfile("a profile needs at least lag 0"));
        }
        Ok(Self { values })
    }

    /// Profile from real-valued lags, e.g. `[4, 1, 0, -1]`.
    pub fn from_real(values: &[T]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex::new(v, T::zero())).collect())
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    /// Number of stored lags, equal to the sequence length.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn zero_lag(&self) -> T {
        self.values[0].re
    }

    /// All `2P-1` lags ordered from `-(P-1)` to `P-1`.
    pub fn full_lag_axis(&self) -> Vec<Complex<T>> {
        let mut out: Vec<_> = self.values[1..].iter().rev().map(|v| v.conj()).collect();
        out.extend_from_slice(&self.values);
        out
    }
}

/// Literal double sum `r(l) = Σ_{n} z_{n+l} conj(z_n)`, `O(P²)`.
pub fn autocorrelation_direct<T: Real>(z: &Sequence<T>) -> CorrelationProfile<T> {
    let x = z.samples();
    let p = x.len();
    let mut values: Vec<Complex<T>> = (0..p)
        .map(|l| {
            (0..p - l).fold(Complex::new(T::zero(), T::zero()), |acc, n| {
                acc + x[n + l] * x[n].conj()
            })
        })
        .collect();
    values[0].im = T::zero();
    CorrelationProfile { values }
}

/// Autocorrelation through the `2P` transform: `r = inverse(|forward(ẑ)|²)`.
pub fn autocorrelation_fft<T: Real>(z: &Sequence<T>) -> CorrelationProfile<T> {
    let plan = SpectralPlan::new(z.len()).expect("sequence is non-empty");
    autocorrelation_with(&plan, z)
}

/// [`autocorrelation_fft`] on a caller-owned plan (one forward, one inverse).
pub fn autocorrelation_with<T: Real>(plan: &SpectralPlan<T>, z: &Sequence<T>) -> CorrelationProfile<T> {
    let spectrum = plan
        .forward_padded(z.samples())
        .expect("plan length matches sequence");
    profile_from_spectrum(plan, &spectrum)
}

/// Recovers the profile from an existing forward spectrum (one inverse).
pub fn profile_from_spectrum<T: Real>(plan: &SpectralPlan<T>, spectrum: &[Complex<T>]) -> CorrelationProfile<T> {
    let mut buf: Vec<Complex<T>> = spectrum
        .iter()
        .map(|b| Complex::new(b.norm_sqr(), T::zero()))
        .collect();
    plan.inverse_in_place(&mut buf)
        .expect("spectrum length matches plan");
    buf.truncate(plan.sequence_len());
    buf[0].im = T::zero();
    CorrelationProfile { values: buf }
}

/// Integrated sidelobe level, `Σ_{l=1}^{P-1} |r(l)|²`.
pub fn isl<T: Real>(r: &CorrelationProfile<T>) -> T {
    r.values[1..].iter().fold(T::zero(), |acc, v| acc + v.norm_sqr())
}

/// Peak sidelobe level, `max_{l≥1} |r(l)|`.
pub fn psl<T: Real>(r: &CorrelationProfile<T>) -> Result<T> {
    if r.len() < 2 {
        return Err(Error::UndefinedMetric {
            metric: "PSL",
            len: r.len(),
        });
    }
    Ok(r.values[1..].iter().map(|v| v.norm()).fold(T::zero(), T::max))
}

/// ISL evaluated on the `2P`-point frequency grid:
/// `(1/4P) Σ_a (|Z(ω_a)|² - P)²`.
pub fn isl_frequency<T: Real>(z: &Sequence<T>) -> T {
    let plan = SpectralPlan::new(z.len()).expect("sequence is non-empty");
    let spectrum = plan
        .forward_padded(z.samples())
        .expect("plan length matches sequence");
    isl_from_spectrum(&spectrum)
}

/// Frequency-grid ISL from a precomputed `2P` spectrum of a unimodular sequence.
pub fn isl_from_spectrum<T: Real>(spectrum: &[Complex<T>]) -> T {
    let p = T::from_usize_lossy(spectrum.len() / 2);
    let sum = spectrum.iter().fold(T::zero(), |acc, b| {
        let d = b.norm_sqr() - p;
        acc + d * d
    });
    sum / (T::from_f64_lossy(4.0) * p)
}

/// Two-sided objective `g(z) = Σ_{l=-(P-1)}^{P-1} |r(l)|² = 2·ISL + |r(0)|²`.
pub fn two_sided_objective<T: Real>(r: &CorrelationProfile<T>) -> T {
    let two = T::one() + T::one();
    two * isl(r) + r.values[0].norm_sqr()
}

/// Normalized magnitude `20·log10(|r(l)| / |r(0)|)`; exact zeros map to [`DB_FLOOR`].
pub fn autocorrelation_db<T: Real>(r: &CorrelationProfile<T>) -> Result<Vec<T>> {
    let peak = r.values[0].norm();
    if peak == T::zero() {
        return Err(Error::InvalidProfile("zero-lag value is zero"));
    }
    let twenty = T::from_f64_lossy(20.0);
    let floor = T::from_f64_lossy(DB_FLOOR);
    Ok(r.values
        .iter()
        .map(|v| {
            let m = v.norm();
            if m == T::zero() {
                floor
            } else {
                (twenty * (m / peak).log10()).max(floor)
            }
        })
        .collect())
}

/// CSV export with header `lag,re,im,abs,db`, one row per lag `0..P-1`.
pub fn profile_csv<T: Real>(r: &CorrelationProfile<T>) -> Result<String> {
    let db = autocorrelation_db(r)?;
    let mut out = String::from("lag,re,im,abs,db\n");
    for (lag, (v, d)) in r.values.iter().zip(db).enumerate() {
        writeln!(
            out,
            "{lag},{:.16e},{:.16e},{:.16e},{:.6}",
            v.re,
            v.im,
            v.norm(),
            d
        )
        .expect("writing to a String cannot fail");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{frank_sequence, random_sequence};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn seq(values: &[Complex<f64>]) -> Sequence<f64> {
        Sequence::new(values.to_vec()).unwrap()
    }

    fn profile(values: &[f64]) -> CorrelationProfile<f64> {
        CorrelationProfile::from_real(values).unwrap()
    }

    fn max_diff(a: &CorrelationProfile<f64>, b: &CorrelationProfile<f64>) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn direct_hand_values() {
        let r = autocorrelation_direct(&seq(&[c(1.0, 0.0), c(1.0, 0.0)]));
        assert_eq!(r.values(), &[c(2.0, 0.0), c(1.0, 0.0)]);
        let r = autocorrelation_direct(&seq(&[c(1.0, 0.0), c(0.0, 1.0)]));
        assert_eq!(r.values(), &[c(2.0, 0.0), c(0.0, 1.0)]);
        let r = autocorrelation_direct(&seq(&[c(1.0, 0.0); 4]));
        assert_eq!(r.values(), &[c(4.0, 0.0), c(3.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn fft_matches_hand_and_oracle() {
        let r = autocorrelation_fft(&seq(&[c(1.0, 0.0), c(1.0, 0.0)]));
        assert!(max_diff(&r, &profile(&[2.0, 1.0])) <= 1e-12);

        let frank = frank_sequence::<f64>(4).unwrap();
        let r = autocorrelation_fft(&frank);
        assert!(max_diff(&r, &profile(&[4.0, 1.0, 0.0, -1.0])) <= 1e-12);

        let z = random_sequence::<f64>(225, 3).unwrap();
        let fast = autocorrelation_fft(&z);
        let slow = autocorrelation_direct(&z);
        let scale = slow.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(max_diff(&fast, &slow) <= 1e-10 * scale);
        assert!((fast.zero_lag() - 225.0).abs() <= 1e-9 * 225.0);
    }

    #[test]
    fn isl_and_psl() {
        assert_eq!(isl(&profile(&[2.0, 1.0])), 1.0);
        assert_eq!(isl(&profile(&[4.0, 3.0, 2.0, 1.0])), 14.0);
        assert_eq!(isl(&profile(&[4.0, 1.0, 0.0, -1.0])), 2.0);

        assert_eq!(psl(&profile(&[4.0, 3.0, 2.0, 1.0])).unwrap(), 3.0);
        assert_eq!(psl(&profile(&[4.0, 1.0, 0.0, -1.0])).unwrap(), 1.0);
        assert!(matches!(
            psl(&profile(&[1.0])),
            Err(Error::UndefinedMetric { len: 1, .. })
        ));
    }

    #[test]
    fn frequency_isl() {
        assert!((isl_frequency(&seq(&[c(1.0, 0.0), c(1.0, 0.0)])) - 1.0).abs() <= 1e-12);
        assert!(isl_frequency(&seq(&[c(1.0, 0.0)])).abs() <= 1e-12);
        let z = random_sequence::<f64>(100, 9).unwrap();
        let lag = isl(&autocorrelation_direct(&z));
        assert!((isl_frequency(&z) - lag).abs() <= 1e-8 * lag.max(1.0));
    }

    #[test]
    fn two_sided() {
        assert_eq!(two_sided_objective(&profile(&[2.0, 1.0])), 6.0);
        assert_eq!(two_sided_objective(&profile(&[4.0, 1.0, 0.0, -1.0])), 20.0);
        assert_eq!(two_sided_objective(&profile(&[1.0])), 1.0);
    }

    #[test]
    fn full_axis_reproduces_two_sided_objective() {
        let z = random_sequence::<f64>(37, 1).unwrap();
        let r = autocorrelation_fft(&z);
        let axis = r.full_lag_axis();
        assert_eq!(axis.len(), 2 * 37 - 1);
        assert_eq!(axis[36], r.values()[0]);
        assert_eq!(axis[35], r.values()[1].conj());
        let sum: f64 = axis.iter().map(|v| v.norm_sqr()).sum();
        assert!((sum - two_sided_objective(&r)).abs() <= 1e-12 * sum);
    }

    #[test]
    fn db_values() {
        let db = autocorrelation_db(&profile(&[4.0, 1.0, 0.0, -1.0])).unwrap();
        let want = [0.0, -12.0412, -320.0, -12.0412];
        for (g, w) in db.iter().zip(want) {
            assert!((g - w).abs() < 1e-4, "{db:?}");
        }
        assert_eq!(autocorrelation_db(&profile(&[7.0])).unwrap(), vec![0.0]);
        assert_eq!(autocorrelation_db(&profile(&[2.0, 2.0])).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(
            autocorrelation_db(&profile(&[0.0, 1.0])),
            Err(Error::InvalidProfile(_))
        ));
    }

    #[test]
    fn csv_layout() {
        let csv = profile_csv(&profile(&[4.0, 1.0, 0.0, -1.0])).unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "lag,re,im,abs,db");
        assert_eq!(lines.len(), 5);
        assert!(lines[3].starts_with("2,"));
        assert!(lines[3].ends_with(",-320.000000"));
    }
}
