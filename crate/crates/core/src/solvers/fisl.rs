use std::sync::Arc;

use num_complex::Complex;

use super::Stepper;
use crate::error::Result;
use crate::majorizer::{
    bound_bei, bound_befft, bound_ei_from, bound_tr, build_operator_with, default_start_vector,
    ei_max_iterations, BoundStrategy, BoundValue, EI_TOLERANCE,
};
use crate::metrics::{autocorrelation_with, isl, CorrelationProfile};
use crate::num::Real;
use crate::sequence::Sequence;
use crate::spectral::SpectralPlan;

/// Output of one FISL update.
#[derive(Debug, Clone)]
pub struct FislStep<T> {
    pub sequence: Sequence<T>,
    pub bound: BoundValue<T>,
    /// Entries of `ã` with zero magnitude (kept their previous phase).
    pub degenerate: usize,
}

/// One FISL iteration from `z`: autocorrelation, operator, bound, then
/// `z' = phase(0.25·M·z - R(z)·z)`.
///
/// Costs three forward and two inverse transforms on `plan` for every
/// strategy except EI, whose eigenvalue iteration applies `R` repeatedly.
pub fn fisl_step<T: Real>(
    plan: &Arc<SpectralPlan<T>>,
    z: &Sequence<T>,
    strategy: BoundStrategy,
) -> Result<FislStep<T>> {
    let r = autocorrelation_with(plan, z);
    let mut start = None;
    fisl_update(plan, z, &r, strategy, &mut start)
}

/// The update half of [`fisl_step`] when `r = r(z)` is already known
/// (two forward, one inverse transform).
///
/// `ei_start` seeds the EI eigenvalue iteration and receives its Ritz
/// vector, so consecutive calls warm-start.
pub fn fisl_update<T: Real>(
    plan: &Arc<SpectralPlan<T>>,
    z: &Sequence<T>,
    r: &CorrelationProfile<T>,
    strategy: BoundStrategy,
    ei_start: &mut Option<Vec<Complex<T>>>,
) -> Result<FislStep<T>> {
    let op = build_operator_with(plan.clone(), r);
    let bound = match strategy {
        BoundStrategy::Tr => bound_tr(z.len()),
        BoundStrategy::Ei => {
            let start = ei_start
                .take()
                .unwrap_or_else(|| default_start_vector(z.len()));
            let (bound, est) = bound_ei_from(
                &op,
                &start,
                T::from_f64_lossy(EI_TOLERANCE),
                ei_max_iterations(z.len()),
            );
            *ei_start = Some(est.ritz_vector);
            bound
        }
        BoundStrategy::Bei => bound_bei(&op),
        BoundStrategy::Befft => bound_befft(&op)?,
    };

    let quarter_m = bound.m_scalar * T::from_f64_lossy(0.25);
    let rz = op.apply(z.samples())?;
    let target: Vec<Complex<T>> = z
        .samples()
        .iter()
        .zip(&rz)
        .map(|(&zn, &rn)| zn * quarter_m - rn)
        .collect();
    let (sequence, degenerate) = Sequence::project(&target, z);
    if degenerate > 0 {
        log::warn!("FISL projection hit {degenerate} zero-magnitude entries");
    }
    Ok(FislStep {
        sequence,
        bound,
        degenerate,
    })
}

/// FISL iteration state; carries `r(z)` so each iteration costs exactly
/// one [`fisl_update`] plus one autocorrelation.
pub struct FislStepper<T: Real> {
    plan: Arc<SpectralPlan<T>>,
    z: Sequence<T>,
    profile: CorrelationProfile<T>,
    strategy: BoundStrategy,
    ei_start: Option<Vec<Complex<T>>>,
    degenerate: usize,
}

impl<T: Real> FislStepper<T> {
    pub fn new(plan: Arc<SpectralPlan<T>>, z0: Sequence<T>, strategy: BoundStrategy) -> Self {
        let profile = autocorrelation_with(&plan, &z0);
        Self {
            plan,
            z: z0,
            profile,
            strategy,
            ei_start: None,
            degenerate: 0,
        }
    }
}

impl<T: Real> Stepper<T> for FislStepper<T> {
    fn advance(&mut self) -> Result<Option<T>> {
        let step = fisl_update(&self.plan, &self.z, &self.profile, self.strategy, &mut self.ei_start)?;
        self.degenerate += step.degenerate;
        self.profile = autocorrelation_with(&self.plan, &step.sequence);
        self.z = step.sequence;
        Ok(Some(step.bound.m_scalar))
    }

    fn current(&self) -> &Sequence<T> {
        &self.z
    }

    fn current_isl(&self) -> T {
        isl(&self.profile)
    }

    fn degenerate_projections(&self) -> usize {
        self.degenerate
    }
}
