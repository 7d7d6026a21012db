use std::fmt::Write as _;

use nalgebra::{Complex, DMatrix};

use seqforge::majorizer::{build_operator, compute_bound, dense_matrix, BoundStrategy};
use seqforge::metrics::autocorrelation_fft;
use seqforge::Sequence64;

use crate::error::Result;

pub const BOUNDS_CSV_HEADER: &str = "strategy,m_scalar,lambda_max_8R,ratio";

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub strategy: BoundStrategy,
    pub m_scalar: f64,
    /// `8·λ_max(R)` from a dense Hermitian eigensolver.
    pub lambda_max_8r: f64,
    /// `m_scalar / lambda_max_8r`; at least 1 for a valid majorizer.
    pub ratio: f64,
}

/// `λ_max(R(z))` from the dense Toeplitz matrix.
pub fn dense_lambda_max(z: &Sequence64) -> f64 {
    let rows = dense_matrix(&autocorrelation_fft(z));
    let p = z.len();
    let m = DMatrix::from_fn(p, p, |i, j| Complex::new(rows[i][j].re, rows[i][j].im));
    m.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Every strategy's majorizer constant next to the exact `8·λ_max(R)`.
pub fn bounds_report(z: &Sequence64) -> Result<Vec<BoundRow>> {
    let op = build_operator(&autocorrelation_fft(z));
    let exact = 8.0 * dense_lambda_max(z);
    BoundStrategy::ALL
        .into_iter()
        .map(|strategy| {
            let m = compute_bound(&op, strategy)?.m_scalar;
            Ok(BoundRow {
                strategy,
                m_scalar: m,
                lambda_max_8r: exact,
                ratio: m / exact,
            })
        })
        .collect()
}

pub fn bounds_csv(rows: &[BoundRow]) -> String {
    let mut out = format!("{BOUNDS_CSV_HEADER}\n");
    for r in rows {
        writeln!(out, "{},{:e},{:e},{:.12}", r.strategy, r.m_scalar, r.lambda_max_8r, r.ratio)
            .expect("writing to a String cannot fail");
    }
    out
}
