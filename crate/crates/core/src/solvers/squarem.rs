//! SQUAREM extrapolation for unimodular fixed-point maps.
//!
//! One cycle: `z1 = F(z)`, `z2 = F(z1)`, `q = z1 - z`, `v = z2 - z1 - q`,
//! `α = min(-‖q‖/‖v‖, -1)`, candidate `F(phase(z - 2αq + α²v))`. The
//! candidate is kept only if its objective does not exceed that of `z2`,
//! so the cycle never does worse than two plain steps.

use std::sync::Arc;

use num_complex::Complex;

use super::{baselines::misl_step, Stepper};
use crate::error::Result;
use crate::metrics::{autocorrelation_fft, isl_from_spectrum, two_sided_objective};
use crate::num::Real;
use crate::sequence::Sequence;
use crate::spectral::SpectralPlan;

#[derive(Debug, Clone)]
pub struct SquaremOutcome<T> {
    pub sequence: Sequence<T>,
    pub objective: T,
    /// Whether the extrapolated candidate was accepted.
    pub extrapolated: bool,
    pub degenerate: usize,
}

fn l2_norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr()).sqrt()
}

/// One SQUAREM cycle of `base_step`, guarded by `objective`.
///
/// `base_step` returns the next iterate and the number of degenerate
/// projection entries it hit.
pub fn squarem_cycle<T, F, G>(mut base_step: F, z: &Sequence<T>, objective: G) -> Result<SquaremOutcome<T>>
where
    T: Real,
    F: FnMut(&Sequence<T>) -> Result<(Sequence<T>, usize)>,
    G: Fn(&Sequence<T>) -> T,
{
    let (z1, d1) = base_step(z)?;
    let (z2, d2) = base_step(&z1)?;
    let mut degenerate = d1 + d2;

    let q: Vec<Complex<T>> = z1.samples().iter().zip(z.samples()).map(|(a, b)| a - b).collect();
    let v: Vec<Complex<T>> = z2
        .samples()
        .iter()
        .zip(z1.samples())
        .zip(&q)
        .map(|((b, a), qn)| b - a - qn)
        .collect();
    let v_norm = l2_norm(&v);
    if v_norm == T::zero() {
        return Ok(SquaremOutcome {
            objective: objective(&z2),
            sequence: z2,
            extrapolated: false,
            degenerate,
        });
    }

    let alpha = (-l2_norm(&q) / v_norm).min(-T::one());
    let two = T::one() + T::one();
    let raw: Vec<Complex<T>> = z
        .samples()
        .iter()
        .zip(&q)
        .zip(&v)
        .map(|((zn, qn), vn)| zn - qn * (two * alpha) + vn * (alpha * alpha))
        .collect();
    let (projected, d3) = Sequence::project(&raw, &z2);
    let (candidate, d4) = base_step(&projected)?;
    degenerate += d3 + d4;

    let plain = objective(&z2);
    let accelerated = objective(&candidate);
    if accelerated > plain || !accelerated.is_finite() {
        Ok(SquaremOutcome {
            sequence: z2,
            objective: plain,
            extrapolated: false,
            degenerate,
        })
    } else {
        Ok(SquaremOutcome {
            sequence: candidate,
            objective: accelerated,
            extrapolated: true,
            degenerate,
        })
    }
}

/// One SQUAREM cycle guarded by the two-sided objective `g(z)`.
pub fn squarem_wrap<T, F>(base_step: F, z: &Sequence<T>) -> Result<Sequence<T>>
where
    T: Real,
    F: FnMut(&Sequence<T>) -> Result<(Sequence<T>, usize)>,
{
    let out = squarem_cycle(base_step, z, |x| two_sided_objective(&autocorrelation_fft(x)))?;
    Ok(out.sequence)
}

/// SQUAREM-accelerated MISL / ISL-NEW. One trace iteration is one cycle
/// (three base steps).
pub struct SquaremStepper<T: Real> {
    plan: Arc<SpectralPlan<T>>,
    z: Sequence<T>,
    isl: T,
    weight: f64,
    degenerate: usize,
}

impl<T: Real> SquaremStepper<T> {
    pub fn new(plan: Arc<SpectralPlan<T>>, z0: Sequence<T>, weight: f64) -> Self {
        let isl = frequency_isl(&plan, &z0);
        Self {
            plan,
            z: z0,
            isl,
            weight,
            degenerate: 0,
        }
    }
}

fn frequency_isl<T: Real>(plan: &SpectralPlan<T>, z: &Sequence<T>) -> T {
    let v = plan
        .forward_padded(z.samples())
        .expect("plan length matches sequence");
    isl_from_spectrum(&v)
}

impl<T: Real> Stepper<T> for SquaremStepper<T> {
    fn advance(&mut self) -> Result<Option<T>> {
        let plan = &self.plan;
        let weight = self.weight;
        let out = squarem_cycle(|x| misl_step(plan, x, weight), &self.z, |x| frequency_isl(plan, x))?;
        self.degenerate += out.degenerate;
        self.isl = out.objective;
        self.z = out.sequence;
        Ok(None)
    }

    fn current(&self) -> &Sequence<T> {
        &self.z
    }

    fn current_isl(&self) -> T {
        self.isl
    }

    fn degenerate_projections(&self) -> usize {
        self.degenerate
    }
}
