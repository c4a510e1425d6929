//! Path selection: the cheapest evaluation that applies to the inputs.

use super::closed::{ess_col_ar1_closed, ess_full_ar1_closed, ess_row_ar1_closed};
use super::dense::{ess_block_dense, ess_full};
use super::kronecker::ess_kronecker;
use super::stationary::{ess_b2_stationary, ess_block_stationary_1d, ess_block_stationary_2d};
use super::{EssMethod, EssReport};
use crate::blocking::{Arrangement, Blocking};
use crate::corrmodel::{CorrelationModel, PointGeometry, AR1_CLOSED_RHO_MAX};
use crate::error::{EssError, Result};

fn closed_ok(model: &CorrelationModel) -> bool {
    model.is_ar1() && model.rho() <= AR1_CLOSED_RHO_MAX
}

/// ESS by closed form, Kronecker product or dense solve.
pub fn ess_full_auto(
    model: &CorrelationModel,
    geom: &PointGeometry,
    weights: Option<&[f64]>,
) -> Result<EssReport> {
    if weights.is_some() {
        return ess_full(model, geom, weights);
    }
    match *geom {
        PointGeometry::Line(n) if closed_ok(model) => {
            model.validate(geom)?;
            EssReport::timed(EssMethod::ClosedAr1Full, || {
                ess_full_ar1_closed(n, model.rho())
            })
        }
        PointGeometry::Grid { n1, n2 } if model.as_kronecker().is_some() => {
            ess_kronecker(model, n1, n2, None)
        }
        _ => ess_full(model, geom, None),
    }
}

/// ESS_B by the cheapest applicable path; falls back to the dense definition.
pub fn ess_block_auto(
    model: &CorrelationModel,
    geom: &PointGeometry,
    blocking: &Blocking,
    weights: Option<&[f64]>,
) -> Result<EssReport> {
    if blocking.n() != geom.len() {
        return Err(EssError::dims(format!(
            "blocking covers {} points, geometry has {}",
            blocking.n(),
            geom.len()
        )));
    }
    if weights.is_none() {
        match *geom {
            PointGeometry::Line(n) => {
                if let Some((arr, l)) = blocking.layout_1d() {
                    if closed_ok(model) {
                        model.validate(geom)?;
                        let rho = model.rho();
                        return match arr {
                            Arrangement::Row => EssReport::timed(EssMethod::ClosedAr1Row, || {
                                ess_row_ar1_closed(n, l.b, l.m, rho)
                            }),
                            Arrangement::Col => EssReport::timed(EssMethod::ClosedAr1Col, || {
                                ess_col_ar1_closed(n, l.b, l.m, rho)
                            }),
                        };
                    }
                    if model.is_stationary_1d() {
                        if l.b <= 2 {
                            return ess_b2_stationary(model, n);
                        }
                        return ess_block_stationary_1d(model, n, l.m, l.b, arr);
                    }
                }
            }
            PointGeometry::Grid { n1, n2 } => {
                if let Some((arr, l)) = blocking.layout_2d() {
                    if model.as_kronecker().is_some() {
                        return ess_kronecker(model, n1, n2, Some((arr, l)));
                    }
                    if model.is_stationary_2d() {
                        return ess_block_stationary_2d(model, l, arr);
                    }
                }
            }
        }
    }
    Ok(ess_block_dense(model, geom, blocking, weights)?.0)
}
