//! Matrix-free Hermitian Toeplitz operator `R(z)` and the diagonal
//! majorizer constants dominating the Hessian `8R(z)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::CorrelationProfile;
use crate::num::Real;
use crate::spectral::SpectralPlan;

/// How the majorizer constant `M` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundStrategy {
    /// `Tr(8R) = 8P²`.
    Tr,
    /// Largest eigenvalue of `8R`, estimated iteratively.
    Ei,
    /// Trace/variance bound on the largest eigenvalue.
    Bei,
    /// Bound from the even and odd bins of the `2P` spectrum.
    Befft,
}

impl BoundStrategy {
    pub const ALL: [BoundStrategy; 4] = [
        BoundStrategy::Tr,
        BoundStrategy::Ei,
        BoundStrategy::Bei,
        BoundStrategy::Befft,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundStrategy::Tr => "TR",
            BoundStrategy::Ei => "EI",
            BoundStrategy::Bei => "BEI",
            BoundStrategy::Befft => "BEFFT",
        }
    }
}

impl fmt::Display for BoundStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tr" => Ok(BoundStrategy::Tr),
            "ei" => Ok(BoundStrategy::Ei),
            "bei" => Ok(BoundStrategy::Bei),
            "befft" => Ok(BoundStrategy::Befft),
            other => Err(Error::Config(format!("unknown bound strategy `{other}`"))),
        }
    }
}

/// Anything noteworthy that happened while computing a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStatus {
    Ok,
    /// The eigenvalue iteration hit its step cap; the value carries the
    /// residual inflation of the last iterate.
    NotConverged,
    /// Rounding made the BEI variance negative; it was clamped to zero.
    VarianceClamped,
}

/// Scalar `m` such that `m·I ⪰ 8R(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundValue<T> {
    pub m_scalar: T,
    pub strategy: BoundStrategy,
    pub status: BoundStatus,
}

impl<T> BoundValue<T> {
    fn ok(m_scalar: T, strategy: BoundStrategy) -> Self {
        Self {
            m_scalar,
            strategy,
            status: BoundStatus::Ok,
        }
    }
}

/// `R(z)` applied through the `2P` circulant embedding.
///
/// The embedding vector `d = [r(0), …, r(P-1), 0, r*(P-1), …, r*(1)]` is
/// transformed once; its spectrum `s` is real (it is the power spectrum of
/// `z`) and multiplies the zero-padded input in the frequency domain.
#[derive(Debug, Clone)]
pub struct ToeplitzOperator<T: Real> {
    profile: CorrelationProfile<T>,
    spectrum: Vec<Complex<T>>,
    plan: Arc<SpectralPlan<T>>,
}

/// Builds the operator on a fresh plan.
pub fn build_operator<T: Real>(r: &CorrelationProfile<T>) -> ToeplitzOperator<T> {
    let plan = Arc::new(SpectralPlan::new(r.len()).expect("profile is non-empty"));
    build_operator_with(plan, r)
}

/// Builds the operator on a shared plan (one forward transform).
pub fn build_operator_with<T: Real>(
    plan: Arc<SpectralPlan<T>>,
    r: &CorrelationProfile<T>,
) -> ToeplitzOperator<T> {
    assert_eq!(plan.sequence_len(), r.len(), "plan/profile length mismatch");
    let mut spectrum = embedding(r);
    plan.forward_in_place(&mut spectrum)
        .expect("embedding has length 2P");
    ToeplitzOperator {
        profile: r.clone(),
        spectrum,
        plan,
    }
}

/// Circulant embedding vector `d` of length `2P`.
pub fn embedding<T: Real>(r: &CorrelationProfile<T>) -> Vec<Complex<T>> {
    let p = r.len();
    let mut d = Vec::with_capacity(2 * p);
    d.extend_from_slice(r.values());
    d.push(Complex::new(T::zero(), T::zero()));
    d.extend(r.values()[1..].iter().rev().map(|v| v.conj()));
    d
}

impl<T: Real> ToeplitzOperator<T> {
    pub fn len(&self) -> usize {
        self.profile.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profile.is_empty()
    }

    pub fn profile(&self) -> &CorrelationProfile<T> {
        &self.profile
    }

    /// Cached spectrum of the embedding vector, complex as computed.
    pub fn spectrum(&self) -> &[Complex<T>] {
        &self.spectrum
    }

    pub fn plan(&self) -> &Arc<SpectralPlan<T>> {
        &self.plan
    }

    /// Largest `|Im s_k|`; zero in exact arithmetic.
    pub fn max_spectrum_imag(&self) -> T {
        self.spectrum
            .iter()
            .map(|s| s.im.abs())
            .fold(T::zero(), T::max)
    }

    /// `R(z)·x` in `O(P log P)`: one forward and one inverse transform.
    pub fn apply(&self, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let mut buf = self.plan.forward_padded(x)?;
        for (b, s) in buf.iter_mut().zip(&self.spectrum) {
            *b = *b * s.re;
        }
        self.plan.inverse_in_place(&mut buf)?;
        buf.truncate(self.len());
        Ok(buf)
    }

    /// `Tr(R²) = P·r(0)² + 2·Σ_{l≥1} (P-l)·|r(l)|²`, valid for Hermitian Toeplitz `R`.
    pub fn trace_of_square(&self) -> T {
        let p = self.len();
        let r = self.profile.values();
        let two = T::one() + T::one();
        let tail = (1..p).fold(T::zero(), |acc, l| {
            acc + T::from_usize_lossy(p - l) * r[l].norm_sqr()
        });
        T::from_usize_lossy(p) * r[0].norm_sqr() + two * tail
    }
}

/// Dense `P×P` Hermitian Toeplitz matrix with first column `r` (row-major).
///
/// Diagnostics only; the solvers never call this.
pub fn dense_matrix<T: Real>(r: &CorrelationProfile<T>) -> Vec<Vec<Complex<T>>> {
    let v = r.values();
    let p = v.len();
    (0..p)
        .map(|i| {
            (0..p)
                .map(|j| if i >= j { v[i - j] } else { v[j - i].conj() })
                .collect()
        })
        .collect()
}

/// `M = 8P²`, independent of `z`.
pub fn bound_tr<T: Real>(len: usize) -> BoundValue<T> {
    let p = T::from_usize_lossy(len);
    BoundValue::ok(T::from_f64_lossy(8.0) * p * p, BoundStrategy::Tr)
}

/// Default stopping tolerance for [`bound_ei`].
pub const EI_TOLERANCE: f64 = 1e-8;

/// Default step cap for [`bound_ei`]: `10·P`.
pub fn ei_max_iterations(len: usize) -> usize {
    10 * len
}

/// Result of the Lanczos estimate of `λ_max(R)`.
#[derive(Debug, Clone)]
pub struct EigenEstimate<T> {
    /// Largest Ritz value; never above `λ_max` in exact arithmetic.
    pub ritz_value: T,
    /// Residual norm `‖Rx - θx‖` of the unit Ritz vector.
    pub residual: T,
    pub ritz_vector: Vec<Complex<T>>,
    pub steps: usize,
    pub converged: bool,
}

impl<T: Real> EigenEstimate<T> {
    /// `θ + ‖Rx - θx‖`: an eigenvalue of `R` lies within the residual of `θ`.
    pub fn upper_estimate(&self) -> T {
        self.ritz_value + self.residual
    }
}

/// `M = 8·λ̂` with `λ̂` a Lanczos estimate of `λ_max(R)` inflated by the
/// Ritz residual.
///
/// The start vector is the normalized all-ones vector plus a small seeded
/// perturbation. Iteration stops once the residual is at most
/// `tol·θ`, the Krylov space becomes invariant, or `max_iters` operator
/// applications have run.
pub fn bound_ei<T: Real>(op: &ToeplitzOperator<T>, tol: T, max_iters: usize) -> BoundValue<T> {
    let start = default_start_vector(op.len());
    bound_ei_from(op, &start, tol, max_iters).0
}

/// [`bound_ei`] from a caller-supplied start vector, also returning the
/// estimate so the Ritz vector can seed the next call.
pub fn bound_ei_from<T: Real>(
    op: &ToeplitzOperator<T>,
    start: &[Complex<T>],
    tol: T,
    max_iters: usize,
) -> (BoundValue<T>, EigenEstimate<T>) {
    let est = lanczos_max(op, start, tol, max_iters);
    let bound = BoundValue {
        m_scalar: T::from_f64_lossy(8.0) * est.upper_estimate(),
        strategy: BoundStrategy::Ei,
        status: if est.converged {
            BoundStatus::Ok
        } else {
            BoundStatus::NotConverged
        },
    };
    (bound, est)
}

/// Normalized all-ones vector plus a seeded `1e-3` perturbation.
pub fn default_start_vector<T: Real>(len: usize) -> Vec<Complex<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ede1);
    let mut v: Vec<Complex<T>> = (0..len)
        .map(|_| {
            let a: f64 = rng.random::<f64>() - 0.5;
            let b: f64 = rng.random::<f64>() - 0.5;
            Complex::new(T::from_f64_lossy(1.0 + 1e-3 * a), T::from_f64_lossy(1e-3 * b))
        })
        .collect();
    normalize(&mut v);
    v
}

fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr()).sqrt()
}

fn normalize<T: Real>(v: &mut [Complex<T>]) -> T {
    let n = norm(v);
    if n > T::zero() {
        for x in v.iter_mut() {
            *x = *x / n;
        }
    }
    n
}

fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

/// Krylov basis size before an explicit restart, so memory stays `O(P)`.
pub const LANCZOS_BASIS_CAP: usize = 32;

/// Restarted Lanczos for the top eigenpair of `R`: cycles of at most
/// [`LANCZOS_BASIS_CAP`] steps, each restarted from the previous Ritz vector,
/// until converged or `max_iters` operator applications in total.
fn lanczos_max<T: Real>(
    op: &ToeplitzOperator<T>,
    start: &[Complex<T>],
    tol: T,
    max_iters: usize,
) -> EigenEstimate<T> {
    let budget = max_iters.max(1);
    let mut est = lanczos_cycle(op, start, tol, budget.min(LANCZOS_BASIS_CAP));
    let mut steps = est.steps;
    while !est.converged && steps < budget {
        let next = lanczos_cycle(op, &est.ritz_vector, tol, (budget - steps).min(LANCZOS_BASIS_CAP));
        steps += next.steps;
        // Ritz values only improve in exact arithmetic; keep the better pair.
        if next.ritz_value >= est.ritz_value || next.converged {
            est = next;
        }
    }
    est.steps = steps;
    est
}

/// One Lanczos cycle with full reorthogonalization.
fn lanczos_cycle<T: Real>(
    op: &ToeplitzOperator<T>,
    start: &[Complex<T>],
    tol: T,
    max_steps: usize,
) -> EigenEstimate<T> {
    let p = op.len();
    let cap = max_steps.clamp(1, p);
    let mut q = start.to_vec();
    if normalize(&mut q) == T::zero() {
        q = default_start_vector(p);
    }

    let mut basis: Vec<Vec<Complex<T>>> = Vec::new();
    let mut alpha: Vec<T> = Vec::new();
    let mut beta: Vec<T> = Vec::new();
    let breakdown = T::epsilon() * T::from_f64_lossy(64.0);

    let mut theta;
    let mut coeffs: Vec<T>;
    let mut residual;
    let mut converged = false;

    loop {
        let mut w = op.apply(&q).expect("vector length matches operator");
        let a = dot(&q, &w).re;
        alpha.push(a);
        if let (Some(prev), Some(&b)) = (basis.last(), beta.last()) {
            for (wi, pi) in w.iter_mut().zip(prev.iter()) {
                *wi = *wi - *pi * b;
            }
        }
        for (wi, qi) in w.iter_mut().zip(&q) {
            *wi = *wi - *qi * a;
        }
        basis.push(q);
        // Two passes of classical Gram-Schmidt keep the basis orthogonal.
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi = *wi - *vi * c;
                }
            }
        }
        let b = norm(&w);

        let (t, y) = tridiagonal_top_eigenpair(&alpha, &beta);
        theta = t;
        coeffs = y;
        let scale = theta.abs().max(T::min_positive_value());
        let invariant = b <= breakdown * scale || basis.len() == p;
        residual = if invariant {
            T::zero()
        } else {
            b * coeffs.last().copied().unwrap_or(T::one()).abs()
        };
        if invariant || residual <= tol * scale {
            converged = true;
            break;
        }
        if basis.len() >= cap {
            break;
        }
        beta.push(b);
        q = w.into_iter().map(|x| x / b).collect();
    }

    let mut ritz_vector = vec![Complex::new(T::zero(), T::zero()); p];
    for (v, &c) in basis.iter().zip(&coeffs) {
        for (r, x) in ritz_vector.iter_mut().zip(v) {
            *r = *r + *x * c;
        }
    }
    normalize(&mut ritz_vector);

    EigenEstimate {
        ritz_value: theta,
        residual,
        ritz_vector,
        steps: basis.len(),
        converged,
    }
}

/// Number of eigenvalues of the symmetric tridiagonal `(alpha, beta)` below `x`.
fn sturm_count<T: Real>(alpha: &[T], beta: &[T], x: T) -> usize {
    let tiny = T::min_positive_value().sqrt();
    let mut count = 0;
    let mut d = T::one();
    for (i, &a) in alpha.iter().enumerate() {
        let off = if i == 0 { T::zero() } else { beta[i - 1] * beta[i - 1] };
        d = a - x - if i == 0 { T::zero() } else { off / d };
        if d.abs() < tiny {
            d = -tiny;
        }
        if d < T::zero() {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue (bisection) and its unit eigenvector (inverse
/// iteration) of a symmetric tridiagonal matrix.
fn tridiagonal_top_eigenpair<T: Real>(alpha: &[T], beta: &[T]) -> (T, Vec<T>) {
    let k = alpha.len();
    if k == 1 {
        return (alpha[0], vec![T::one()]);
    }
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for i in 0..k {
        let left = if i > 0 { beta[i - 1].abs() } else { T::zero() };
        let right = if i + 1 < k { beta[i].abs() } else { T::zero() };
        lo = lo.min(alpha[i] - left - right);
        hi = hi.max(alpha[i] + left + right);
    }
    for _ in 0..200 {
        let mid = lo + (hi - lo) / (T::one() + T::one());
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(alpha, beta, mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = hi;

    let shift = theta + (theta.abs().max(T::one())) * T::epsilon() * T::from_f64_lossy(16.0);
    let mut y = vec![T::one(); k];
    for _ in 0..3 {
        y = solve_shifted_tridiagonal(alpha, beta, shift, &y);
        let n = y.iter().fold(T::zero(), |acc, v| acc + *v * *v).sqrt();
        if n > T::zero() && n.is_finite() {
            for v in y.iter_mut() {
                *v = *v / n;
            }
        } else {
            y = vec![T::one() / T::from_usize_lossy(k).sqrt(); k];
        }
    }
    (theta, y)
}

/// Solves `(T - shift·I) y = rhs` by Gaussian elimination with partial
/// pivoting on the tridiagonal band.
fn solve_shifted_tridiagonal<T: Real>(alpha: &[T], beta: &[T], shift: T, rhs: &[T]) -> Vec<T> {
    let n = alpha.len();
    let tiny = T::min_positive_value().sqrt();
    // Row i holds columns i, i+1, i+2 after pivoting.
    let mut d: Vec<T> = alpha.iter().map(|&a| a - shift).collect();
    let mut du: Vec<T> = beta.to_vec();
    let mut dl: Vec<T> = beta.to_vec();
    let mut du2 = vec![T::zero(); n];
    let mut b = rhs.to_vec();
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i].abs() < tiny {
                d[i] = tiny;
            }
            let f = dl[i] / d[i];
            d[i + 1] = d[i + 1] - f * du[i];
            b[i + 1] = b[i + 1] - f * b[i];
            dl[i] = T::zero();
        } else {
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            if i + 1 < n - 1 {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du2[i];
            }
            du[i] = tmp;
            b.swap(i, i + 1);
            b[i + 1] = b[i + 1] - f * b[i];
        }
    }
    if d[n - 1].abs() < tiny {
        d[n - 1] = tiny;
    }
    let mut y = vec![T::zero(); n];
    y[n - 1] = b[n - 1] / d[n - 1];
    if n > 1 {
        y[n - 2] = (b[n - 2] - du[n - 2] * y[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        y[i] = (b[i] - du[i] * y[i + 1] - du2[i] * y[i + 2]) / d[i];
    }
    y
}

/// `M = m + s·√(P-1)` with `m = 8·r(0)` and `s² = (64/P)·Tr(R²) - m²`.
///
/// For `P = 1` the matrix is the scalar `r(0)` and `M = 8·r(0)`.
pub fn bound_bei<T: Real>(op: &ToeplitzOperator<T>) -> BoundValue<T> {
    let p = op.len();
    let eight = T::from_f64_lossy(8.0);
    let m = eight * op.profile().zero_lag();
    if p == 1 {
        return BoundValue::ok(m, BoundStrategy::Bei);
    }
    let pf = T::from_usize_lossy(p);
    let s2 = T::from_f64_lossy(64.0) / pf * op.trace_of_square() - m * m;
    let (s2, status) = if s2 < T::zero() {
        log::warn!("BEI variance {s2} is negative after rounding; clamped to zero");
        (T::zero(), BoundStatus::VarianceClamped)
    } else {
        (s2, BoundStatus::Ok)
    };
    BoundValue {
        m_scalar: m + s2.sqrt() * (pf - T::one()).sqrt(),
        strategy: BoundStrategy::Bei,
        status,
    }
}

/// `M = 4·(max over even bins of s + max over odd bins of s)`.
///
/// Fails if the cached spectrum is not real to `reality_tolerance·P`, which
/// would mean the transform conventions are out of step.
pub fn bound_befft<T: Real>(op: &ToeplitzOperator<T>) -> Result<BoundValue<T>> {
    let limit = T::reality_tolerance() * T::from_usize_lossy(op.len());
    let imag = op.max_spectrum_imag();
    if imag.is_nan() || imag > limit {
        return Err(Error::Internal(format!(
            "embedding spectrum has imaginary part {imag}, limit {limit}"
        )));
    }
    let mut even = T::neg_infinity();
    let mut odd = T::neg_infinity();
    for (k, s) in op.spectrum().iter().enumerate() {
        if k % 2 == 0 {
            even = even.max(s.re);
        } else {
            odd = odd.max(s.re);
        }
    }
    Ok(BoundValue::ok(
        T::from_f64_lossy(4.0) * (even + odd),
        BoundStrategy::Befft,
    ))
}

/// Dispatches to the strategy's bound with the default EI settings.
pub fn compute_bound<T: Real>(op: &ToeplitzOperator<T>, strategy: BoundStrategy) -> Result<BoundValue<T>> {
    Ok(match strategy {
        BoundStrategy::Tr => bound_tr(op.len()),
        BoundStrategy::Ei => bound_ei(
            op,
            T::from_f64_lossy(EI_TOLERANCE),
            ei_max_iterations(op.len()),
        ),
        BoundStrategy::Bei => bound_bei(op),
        BoundStrategy::Befft => bound_befft(op)?,
    })
}
