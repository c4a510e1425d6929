//! Separable models: `R = R1 ⊗ R2` with product blockings gives products of
//! the 1D values, for the full likelihood and for RW/CW blocking alike.

use super::closed::{ess_col_ar1_closed, ess_full_ar1_closed, ess_row_ar1_closed};
use super::dense::{ess_block_dense, ess_full};
use super::stationary::ess_block_stationary_1d;
use super::{EssMethod, EssReport};
use crate::blocking::{equal_1d, Arrangement, Layout1d, Layout2d};
use crate::corrmodel::{CorrelationModel, PointGeometry, AR1_CLOSED_RHO_MAX};
use crate::error::{EssError, Result};

fn closed_ok(model: &CorrelationModel) -> bool {
    model.is_ar1() && model.rho() <= AR1_CLOSED_RHO_MAX
}

fn factor_full(model: &CorrelationModel, n: usize) -> Result<f64> {
    if closed_ok(model) {
        return ess_full_ar1_closed(n, model.rho());
    }
    Ok(ess_full(model, &PointGeometry::Line(n), None)?.value)
}

fn factor_block(model: &CorrelationModel, arr: Arrangement, l: Layout1d) -> Result<f64> {
    let n = l.n();
    if closed_ok(model) {
        return match arr {
            Arrangement::Row => ess_row_ar1_closed(n, l.b, l.m, model.rho()),
            Arrangement::Col => ess_col_ar1_closed(n, l.b, l.m, model.rho()),
        };
    }
    if model.is_stationary_1d() {
        return Ok(ess_block_stationary_1d(model, n, l.m, l.b, arr)?.value);
    }
    let blocking = equal_1d(arr, n, l.m, l.b)?;
    Ok(
        ess_block_dense(model, &PointGeometry::Line(n), &blocking, None)?
            .0
            .value,
    )
}

/// ESS (when `blocking` is `None`) or ESS_B of an `n1 x n2` grid under a
/// separable model, as the product of the per-axis values.
pub fn ess_kronecker(
    model: &CorrelationModel,
    n1: usize,
    n2: usize,
    blocking: Option<(Arrangement, Layout2d)>,
) -> Result<EssReport> {
    let Some((a, b)) = model.as_kronecker() else {
        return Err(EssError::Unsupported(format!(
            "{} does not factor as a Kronecker product",
            model.family_name()
        )));
    };
    model.validate(&PointGeometry::grid(n1, n2)?)?;
    if let Some((_, l)) = blocking {
        if l.n1() != n1 || l.n2() != n2 {
            return Err(EssError::dims(format!(
                "layout covers {}x{}, grid is {n1}x{n2}",
                l.n1(),
                l.n2()
            )));
        }
    }
    EssReport::timed(EssMethod::Kronecker, || match blocking {
        None => Ok(factor_full(&a, n1)? * factor_full(&b, n2)?),
        Some((arr, l)) => {
            Ok(factor_block(&a, arr, l.first())? * factor_block(&b, arr, l.second())?)
        }
    })
}
