//! Unimodular sequence design by minimizing the integrated sidelobe level.
//!
//! The FISL solver majorizes the quartic ISL objective with a scalar bound
//! on the autocorrelation Toeplitz matrix and applies every matrix through
//! a `2P`-point FFT. CAN, MISL and ISL-NEW are provided as baselines, with
//! SQUAREM acceleration for the MISL family.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! cover the common case.

pub mod error;
pub mod io;
pub mod majorizer;
pub mod metrics;
pub mod num;
pub mod sequence;
pub mod solvers;
pub mod spectral;

pub use error::{Error, Result};
pub use majorizer::{
    bound_bei, bound_befft, bound_ei, bound_tr, build_operator, compute_bound, BoundStatus,
    BoundStrategy, BoundValue, ToeplitzOperator,
};
pub use metrics::{
    autocorrelation_db, autocorrelation_direct, autocorrelation_fft, isl, isl_frequency, psl,
    CorrelationProfile,
};
pub use num::Real;
pub use sequence::{frank_sequence, golomb_sequence, random_sequence, PhaseVector, Sequence};
pub use solvers::{
    solve, Algorithm, IterationTrace, SolverConfig, SolverResult, StopReason, TraceRecord,
};
pub use spectral::{forward_transform_2p, inverse_transform_2p, SpectralPlan, Spectrum};

pub type Complex64 = num_complex::Complex<f64>;
pub type Sequence64 = Sequence<f64>;
pub type Sequence32 = Sequence<f32>;
pub type PhaseVector64 = PhaseVector<f64>;
pub type CorrelationProfile64 = CorrelationProfile<f64>;
pub type Spectrum64 = Spectrum<f64>;
pub type ToeplitzOperator64 = ToeplitzOperator<f64>;
pub type BoundValue64 = BoundValue<f64>;
pub type SolverResult64 = SolverResult<f64>;
pub type SolverResult32 = SolverResult<f32>;
