//! CAN, MISL and ISL-NEW. Each carries the forward spectrum of its current
//! iterate, so one iteration is one forward plus one inverse transform and
//! the ISL comes from the frequency-grid identity at no extra cost.

use std::sync::Arc;

use num_complex::Complex;

use super::Stepper;
use crate::error::Result;
use crate::metrics::isl_from_spectrum;
use crate::num::Real;
use crate::sequence::Sequence;
use crate::spectral::SpectralPlan;

/// Weight on `b_max + P²` in the MISL update.
pub const MISL_WEIGHT: f64 = 1.0;
/// ISL-NEW halves the `b_max` and `P²` terms.
pub const ISL_NEW_WEIGHT: f64 = 0.5;

/// CAN update from the spectrum `v` of `z`:
/// `y = phase(v)`, `b = inverse(y)`, `z' = phase(b[..P])`.
fn can_from_spectrum<T: Real>(plan: &SpectralPlan<T>, z: &Sequence<T>, v: &[Complex<T>]) -> Result<(Sequence<T>, usize)> {
    let one = Complex::new(T::one(), T::zero());
    let mut buf: Vec<Complex<T>> = v
        .iter()
        .map(|&x| {
            let m = x.norm();
            if m > T::zero() {
                x / m
            } else {
                one
            }
        })
        .collect();
    plan.inverse_in_place(&mut buf)?;
    buf.truncate(z.len());
    Ok(Sequence::project(&buf, z))
}

/// MISL-family update from the spectrum `v` of `z`:
/// `d = -inverse((|v|² - w·(max|v|² + P²)) ⊙ v)[..P]`, `z' = phase(d)`.
fn misl_from_spectrum<T: Real>(
    plan: &SpectralPlan<T>,
    z: &Sequence<T>,
    v: &[Complex<T>],
    weight: T,
) -> Result<(Sequence<T>, usize)> {
    let p = T::from_usize_lossy(z.len());
    let power_max = v.iter().map(|x| x.norm_sqr()).fold(T::zero(), T::max);
    let shift = weight * (power_max + p * p);
    let mut buf: Vec<Complex<T>> = v.iter().map(|&x| x * (shift - x.norm_sqr())).collect();
    plan.inverse_in_place(&mut buf)?;
    buf.truncate(z.len());
    Ok(Sequence::project(&buf, z))
}

/// One CAN iteration (two forward transforms when called standalone).
pub fn can_step<T: Real>(plan: &SpectralPlan<T>, z: &Sequence<T>) -> Result<(Sequence<T>, usize)> {
    let v = plan.forward_padded(z.samples())?;
    can_from_spectrum(plan, z, &v)
}

/// One MISL (`weight = 1`) or ISL-NEW (`weight = 0.5`) iteration.
pub fn misl_step<T: Real>(plan: &SpectralPlan<T>, z: &Sequence<T>, weight: f64) -> Result<(Sequence<T>, usize)> {
    let v = plan.forward_padded(z.samples())?;
    misl_from_spectrum(plan, z, &v, T::from_f64_lossy(weight))
}

pub struct CanStepper<T: Real> {
    plan: Arc<SpectralPlan<T>>,
    z: Sequence<T>,
    spectrum: Vec<Complex<T>>,
    degenerate: usize,
}

impl<T: Real> CanStepper<T> {
    pub fn new(plan: Arc<SpectralPlan<T>>, z0: Sequence<T>) -> Self {
        let spectrum = plan
            .forward_padded(z0.samples())
            .expect("plan length matches sequence");
        Self {
            plan,
            z: z0,
            spectrum,
            degenerate: 0,
        }
    }
}

impl<T: Real> Stepper<T> for CanStepper<T> {
    fn advance(&mut self) -> Result<Option<T>> {
        let (next, degenerate) = can_from_spectrum(&self.plan, &self.z, &self.spectrum)?;
        self.degenerate += degenerate;
        self.spectrum = self.plan.forward_padded(next.samples())?;
        self.z = next;
        Ok(None)
    }

    fn current(&self) -> &Sequence<T> {
        &self.z
    }

    fn current_isl(&self) -> T {
        isl_from_spectrum(&self.spectrum)
    }

    fn degenerate_projections(&self) -> usize {
        self.degenerate
    }
}

pub struct MislStepper<T: Real> {
    plan: Arc<SpectralPlan<T>>,
    z: Sequence<T>,
    spectrum: Vec<Complex<T>>,
    weight: T,
    degenerate: usize,
}

impl<T: Real> MislStepper<T> {
    pub fn new(plan: Arc<SpectralPlan<T>>, z0: Sequence<T>, weight: f64) -> Self {
        let spectrum = plan
            .forward_padded(z0.samples())
            .expect("plan length matches sequence");
        Self {
            plan,
            z: z0,
            spectrum,
            weight: T::from_f64_lossy(weight),
            degenerate: 0,
        }
    }
}

impl<T: Real> Stepper<T> for MislStepper<T> {
    fn advance(&mut self) -> Result<Option<T>> {
        let (next, degenerate) = misl_from_spectrum(&self.plan, &self.z, &self.spectrum, self.weight)?;
        self.degenerate += degenerate;
        self.spectrum = self.plan.forward_padded(next.samples())?;
        self.z = next;
        Ok(None)
    }

    fn current(&self) -> &Sequence<T> {
        &self.z
    }

    fn current_isl(&self) -> T {
        isl_from_spectrum(&self.spectrum)
    }

    fn degenerate_projections(&self) -> usize {
        self.degenerate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{autocorrelation_fft, isl};
    use crate::sequence::random_sequence;
    use crate::solvers::{solve, Algorithm, SolverConfig, StopReason};

    fn dense_misl_oracle(z: &Sequence<f64>, weight: f64) -> Vec<Complex<f64>> {
        // phase of w·(b_max + P²)·z - R(z)·z with R built densely from r(z).
        let r = crate::metrics::autocorrelation_direct(z);
        let m = crate::majorizer::dense_matrix(&r);
        let p = z.len();
        let b_max = crate::spectral::forward_transform_2p(z)
            .power()
            .into_iter()
            .fold(0.0, f64::max);
        (0..p)
            .map(|i| {
                let rz: Complex<f64> = (0..p).map(|j| m[i][j] * z.samples()[j]).sum();
                let d = z.samples()[i] * (weight * (b_max + (p * p) as f64)) - rz;
                d / d.norm()
            })
            .collect()
    }

    #[test]
    fn misl_matches_dense_form() {
        let z = random_sequence::<f64>(12, 4).unwrap();
        let plan = SpectralPlan::new(12).unwrap();
        for weight in [MISL_WEIGHT, ISL_NEW_WEIGHT] {
            let (next, _) = misl_step(&plan, &z, weight).unwrap();
            for (a, b) in next.samples().iter().zip(dense_misl_oracle(&z, weight)) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn single_sample_fixed_points() {
        let z = Sequence::from_phases(&[1.3]).unwrap();
        let plan = SpectralPlan::new(1).unwrap();
        for weight in [MISL_WEIGHT, ISL_NEW_WEIGHT] {
            let (next, _) = misl_step(&plan, &z, weight).unwrap();
            assert!((next.samples()[0] - z.samples()[0]).norm() < 1e-12);
        }
        // A single sample has the flat spectrum |Z|² = 1 on both bins.
        let (next, _) = can_step(&plan, &z).unwrap();
        assert!((next.samples()[0] - z.samples()[0]).norm() < 1e-12);
        let res = solve(&z, &SolverConfig::baseline(Algorithm::Can, false)).unwrap();
        assert_eq!(res.trace.iterations(), 1);
    }

    #[test]
    fn misl_family_descends() {
        for seed in 0..3 {
            let z0 = random_sequence::<f64>(16, seed).unwrap();
            for algo in [Algorithm::Misl, Algorithm::IslNew] {
                let res = solve(&z0, &SolverConfig::baseline(algo, false)).unwrap();
                let isl: Vec<f64> = res.trace.isl_values().collect();
                for w in isl.windows(2) {
                    assert!(w[1] <= w[0] + 1e-9 * w[0].max(1.0), "{algo}");
                }
            }
        }
    }

    #[test]
    fn can_terminates_unimodular() {
        let z0 = random_sequence::<f64>(100, 5).unwrap();
        let res = solve(&z0, &SolverConfig::baseline(Algorithm::Can, false)).unwrap();
        assert_eq!(res.trace.stop_reason, StopReason::Converged);
        assert!(res.sequence.max_modulus_error() <= 1e-12);
        assert!(res.final_isl < isl(&autocorrelation_fft(&z0)));
    }

    #[test]
    fn frequency_isl_tracks_lag_isl() {
        let z0 = random_sequence::<f64>(40, 6).unwrap();
        let plan = Arc::new(SpectralPlan::new(40).unwrap());
        let mut s = MislStepper::new(plan, z0, MISL_WEIGHT);
        for _ in 0..5 {
            s.advance().unwrap();
            let lag = isl(&autocorrelation_fft(s.current()));
            assert!((s.current_isl() - lag).abs() <= 1e-9 * lag);
        }
    }
}
