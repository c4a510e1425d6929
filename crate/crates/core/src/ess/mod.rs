//! Effective sample size under full likelihood (`1ᵀR⁻¹1`) and block
//! likelihood (`(Σλ_uu)² / ΣΣλ_uv`).
//!
//! The dense path in [`dense`] evaluates the definition directly and is the
//! reference for every structured path: [`stationary`] offsets,
//! [`closed`] AR(1) formulas and the [`kronecker`] product rule.
//! [`auto`] picks the cheapest path that applies.

use std::fmt;
use std::time::Instant;

use crate::error::{EssError, Result};

pub mod auto;
pub mod closed;
pub mod dense;
pub mod kronecker;
pub mod stationary;

pub use auto::{ess_block_auto, ess_full_auto};
pub use closed::{
    ess_b1_b2_ar1_closed, ess_col_ar1_closed, ess_full_ar1_closed, ess_row_ar1_closed,
    one_r_one_ar1, y_vector,
};
pub use dense::{ess_block_dense, ess_block_generic_weighted, ess_full, lambda_dense, Limits};
pub use kronecker::ess_kronecker;
pub use stationary::{
    ess_b2_stationary, ess_block_stationary_1d, ess_block_stationary_2d, lambda_stationary_1d,
    lambda_stationary_2d, one_r_one_stationary,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EssMethod {
    DenseFull,
    DenseBlock,
    Stationary1d,
    Stationary2d,
    ClosedAr1Full,
    ClosedAr1Row,
    ClosedAr1Col,
    Kronecker,
    B2Stationary,
}

impl fmt::Display for EssMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EssMethod::DenseFull => "dense-full",
            EssMethod::DenseBlock => "dense-block",
            EssMethod::Stationary1d => "stationary-1d",
            EssMethod::Stationary2d => "stationary-2d",
            EssMethod::ClosedAr1Full => "closed-ar1-full",
            EssMethod::ClosedAr1Row => "closed-ar1-row",
            EssMethod::ClosedAr1Col => "closed-ar1-col",
            EssMethod::Kronecker => "kronecker",
            EssMethod::B2Stationary => "b2-stationary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssReport {
    pub value: f64,
    pub method: EssMethod,
    /// Seconds spent computing `value`.
    pub wall_time: f64,
}

impl EssReport {
    pub(crate) fn timed(method: EssMethod, f: impl FnOnce() -> Result<f64>) -> Result<Self> {
        let start = Instant::now();
        let value = f()?;
        Ok(EssReport {
            value,
            method,
            wall_time: start.elapsed().as_secs_f64(),
        })
    }
}

/// Block-pair quadratic forms `λ_uv = z_uᵀ R_uu⁻¹ R_uv R_vv⁻¹ z_v`.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaTable {
    /// Full symmetric `m x m` table, row-major.
    DenseByPair { m: usize, values: Vec<f64> },
    /// `λ(d)` for block offsets `d = 0..m` of a shift-invariant blocking.
    Offset1d(Vec<f64>),
    /// `λ(Δ1, Δ2)` for `Δ1 ∈ 0..m1`, `Δ2 ∈ -(m2-1)..m2`, stored row-major
    /// over `(Δ1, Δ2 + m2 - 1)`. The `Δ1 = 0, Δ2 < 0` half is filled from
    /// `λ(Δ) = λ(-Δ)` rather than computed.
    Offset2d {
        m1: usize,
        m2: usize,
        values: Vec<f64>,
    },
}

impl LambdaTable {
    /// Number of blocks `m`.
    pub fn blocks(&self) -> usize {
        match self {
            LambdaTable::DenseByPair { m, .. } => *m,
            LambdaTable::Offset1d(v) => v.len(),
            LambdaTable::Offset2d { m1, m2, .. } => m1 * m2,
        }
    }

    /// `λ(Δ1, Δ2)` from an offset table, for any signs.
    pub fn offset_2d(&self, d1: i64, d2: i64) -> Option<f64> {
        let LambdaTable::Offset2d { m1, m2, values } = self else {
            return None;
        };
        let (d1, d2) = if d1 < 0 { (-d1, -d2) } else { (d1, d2) };
        let (m1, m2) = (*m1 as i64, *m2 as i64);
        if d1 >= m1 || d2.abs() >= m2 {
            return None;
        }
        Some(values[(d1 * (2 * m2 - 1) + d2 + m2 - 1) as usize])
    }

    /// `(Σ_u λ_uu, Σ_u Σ_v λ_uv)`, summed in a fixed order.
    pub fn sums(&self) -> (f64, f64) {
        match self {
            LambdaTable::DenseByPair { m, values } => {
                let m = *m;
                let diag: f64 = (0..m).map(|u| values[u * m + u]).sum();
                let mut off = 0.0;
                for u in 0..m {
                    for v in u + 1..m {
                        off += values[u * m + v];
                    }
                }
                (diag, diag + 2.0 * off)
            }
            LambdaTable::Offset1d(v) => {
                let m = v.len();
                let diag = m as f64 * v[0];
                let off: f64 = (1..m).map(|d| (m - d) as f64 * v[d]).sum();
                (diag, diag + 2.0 * off)
            }
            LambdaTable::Offset2d { m1, m2, values } => {
                let (m1, m2) = (*m1, *m2);
                let w = 2 * m2 - 1;
                let diag = (m1 * m2) as f64 * values[m2 - 1];
                let mut off = 0.0;
                let reach = m2 as i64 - 1;
                for d1 in 0..m1 {
                    let start = if d1 == 0 { 1 } else { -reach };
                    for d2 in start..=reach {
                        let count = ((m1 - d1) * (m2 - d2.unsigned_abs() as usize)) as f64;
                        off += count * values[d1 * w + (d2 + reach) as usize];
                    }
                }
                (diag, diag + 2.0 * off)
            }
        }
    }

    /// `ESS_B = (Σλ_uu)² / ΣΣλ_uv`.
    pub fn ess_b(&self) -> Result<f64> {
        let (diag, total) = self.sums();
        if !(total > 0.0) || !diag.is_finite() {
            return Err(EssError::Numerical(format!(
                "non-positive block information total {total}"
            )));
        }
        Ok(diag * diag / total)
    }
}
