//! Fast paths for stationary models under equal RW/CW blockings.
//!
//! Every diagonal block is a translate of the first one, so a single solve
//! gives the shared weight vector `w = R₁₁⁻¹1`. With the autocorrelation
//! `A(δ) = Σ_i w_i w_{i+δ}`, each `λ` only needs one kernel sum over lags:
//!
//! ```text
//! λ(d) = Σ_δ A(δ) r(d·s + δ·t)
//! ```
//!
//! where `(s, t) = (b, 1)` for RW and `(1, m)` for CW, per axis.

use rayon::prelude::*;

use super::{EssMethod, EssReport, LambdaTable};
use crate::blocking::{Arrangement, Layout1d, Layout2d};
use crate::corrmodel::{CorrelationModel, Kernel, PointGeometry};
use crate::error::{EssError, Result};
use crate::spdkernel::{factor_points, solve_spd};

/// Point indices of the first block of an equal 1D blocking.
fn first_block_1d(arr: Arrangement, l: Layout1d) -> Vec<usize> {
    match arr {
        Arrangement::Row => (0..l.b).collect(),
        Arrangement::Col => (0..l.b).map(|j| j * l.m).collect(),
    }
}

/// `(block stride, within-block stride)` along one axis.
fn strides(arr: Arrangement, l: Layout1d) -> (i64, i64) {
    match arr {
        Arrangement::Row => (l.b as i64, 1),
        Arrangement::Col => (1, l.m as i64),
    }
}

fn shared_weights(kernel: &Kernel<'_>, points: &[usize]) -> Result<Vec<f64>> {
    let factor = factor_points(kernel, points).map_err(|e| match e {
        EssError::NotPositiveDefinite { pivot, .. } => EssError::NotPositiveDefinite {
            pivot,
            block: Some(0),
        },
        other => other,
    })?;
    solve_spd(&factor, &vec![1.0; points.len()])
}

fn require_1d(model: &CorrelationModel) -> Result<()> {
    if !model.is_stationary_1d() {
        return Err(EssError::NonStationary(format!(
            "{} is not a stationary 1D model",
            model.family_name()
        )));
    }
    Ok(())
}

/// `λ(d)` for `d = 0..m` of an equal RW/CW blocking of `n = m·b` points.
pub fn lambda_stationary_1d(
    model: &CorrelationModel,
    n: usize,
    layout: Layout1d,
    arr: Arrangement,
) -> Result<LambdaTable> {
    require_1d(model)?;
    if layout.n() != n {
        return Err(EssError::dims(format!(
            "n = {n} is not m*b = {}*{}",
            layout.m, layout.b
        )));
    }
    let kernel = model.kernel(&PointGeometry::Line(n))?;
    let w = shared_weights(&kernel, &first_block_1d(arr, layout))?;
    let b = layout.b;
    // A(δ) for δ = 0..b
    let auto: Vec<f64> = (0..b)
        .map(|d| w[..b - d].iter().zip(&w[d..]).map(|(x, y)| x * y).sum())
        .collect();
    let (s, t) = strides(arr, layout);
    let reach = b as i64 - 1;
    let values = (0..layout.m)
        .into_par_iter()
        .map(|d| {
            let base = d as i64 * s;
            (-reach..=reach)
                .map(|dl| {
                    auto[dl.unsigned_abs() as usize]
                        * kernel.lag((base + dl * t).unsigned_abs() as usize)
                })
                .sum()
        })
        .collect();
    Ok(LambdaTable::Offset1d(values))
}

/// ESS_B for RW/CW blocking of a stationary 1D model.
pub fn ess_block_stationary_1d(
    model: &CorrelationModel,
    n: usize,
    m: usize,
    b: usize,
    arr: Arrangement,
) -> Result<EssReport> {
    let layout = Layout1d::new(n, m, b)?;
    EssReport::timed(EssMethod::Stationary1d, || {
        lambda_stationary_1d(model, n, layout, arr)?.ess_b()
    })
}

/// `1ᵀR1 = n + 2 Σ_k (n - k) r_k` for a stationary 1D model.
pub fn one_r_one_stationary(model: &CorrelationModel, n: usize) -> Result<f64> {
    require_1d(model)?;
    let kernel = model.kernel(&PointGeometry::Line(n))?;
    let off: f64 = (1..n).map(|k| (n - k) as f64 * kernel.lag(k)).sum();
    Ok(n as f64 + 2.0 * off)
}

/// Common RW/CW value `n² / 1ᵀR1` for block size `b <= 2` under a
/// stationary 1D model. Any size-2 block has `w ∝ 1`, which collapses the
/// block information to that of the singleton blocking.
pub fn ess_b2_stationary(model: &CorrelationModel, n: usize) -> Result<EssReport> {
    EssReport::timed(EssMethod::B2Stationary, || {
        let s = one_r_one_stationary(model, n)?;
        let nf = n as f64;
        Ok(nf * nf / s)
    })
}

/// `λ(Δ1, Δ2)` table of an equal RW2D/CW2D blocking of a stationary 2D model.
pub fn lambda_stationary_2d(
    model: &CorrelationModel,
    layout: Layout2d,
    arr: Arrangement,
) -> Result<LambdaTable> {
    if !model.is_stationary_2d() {
        return Err(EssError::NonStationary(format!(
            "{} is not a stationary 2D model",
            model.family_name()
        )));
    }
    let geom = PointGeometry::grid(layout.n1(), layout.n2())?;
    let kernel = model.kernel(&geom)?;
    let (l1, l2) = (layout.first(), layout.second());
    let (rows, cols) = (first_block_1d(arr, l1), first_block_1d(arr, l2));
    let points: Vec<usize> = rows
        .iter()
        .flat_map(|&i1| cols.iter().map(move |&i2| geom.linear_index(i1, i2)))
        .collect();
    let w = shared_weights(&kernel, &points)?;

    let (b1, b2) = (l1.b, l2.b);
    let (r1, r2) = (b1 as i64 - 1, b2 as i64 - 1);
    let aw = 2 * b2 - 1;
    // A(δ1, δ2) over the full lag box, row-major in (δ1 + r1, δ2 + r2)
    let auto: Vec<f64> = (-r1..=r1)
        .into_par_iter()
        .flat_map_iter(|d1| {
            let w = &w;
            (-r2..=r2).map(move |d2| {
                let mut acc = 0.0;
                for i1 in 0..b1 as i64 {
                    let j1 = i1 + d1;
                    if j1 < 0 || j1 >= b1 as i64 {
                        continue;
                    }
                    for i2 in 0..b2 as i64 {
                        let j2 = i2 + d2;
                        if j2 < 0 || j2 >= b2 as i64 {
                            continue;
                        }
                        acc +=
                            w[(i1 * b2 as i64 + i2) as usize] * w[(j1 * b2 as i64 + j2) as usize];
                    }
                }
                acc
            })
        })
        .collect();
    // drop negligible lags once, so the per-offset loop skips them
    let lags: Vec<(i64, i64, f64)> = (-r1..=r1)
        .flat_map(|d1| (-r2..=r2).map(move |d2| (d1, d2)))
        .map(|(d1, d2)| (d1, d2, auto[((d1 + r1) as usize) * aw + (d2 + r2) as usize]))
        .filter(|&(_, _, a)| a != 0.0)
        .collect();

    let (s1, t1) = strides(arr, l1);
    let (s2, t2) = strides(arr, l2);
    let (m1, m2) = (layout.m1, layout.m2);
    let reach = m2 as i64 - 1;
    let width = 2 * m2 - 1;
    let offsets: Vec<(i64, i64)> = (0..m1 as i64)
        .flat_map(|d1| {
            let start = if d1 == 0 { 0 } else { -reach };
            (start..=reach).map(move |d2| (d1, d2))
        })
        .collect();
    let lambda: Vec<f64> = offsets
        .par_iter()
        .map(|&(d1, d2)| {
            let (x, y) = (d1 * s1, d2 * s2);
            lags.iter()
                .map(|&(l1, l2, a)| a * kernel.offset(x + l1 * t1, y + l2 * t2))
                .sum()
        })
        .collect();

    let mut values = vec![0.0; m1 * width];
    for (&(d1, d2), &v) in offsets.iter().zip(&lambda) {
        values[d1 as usize * width + (d2 + reach) as usize] = v;
        if d1 == 0 {
            values[(reach - d2) as usize] = v;
        }
    }
    Ok(LambdaTable::Offset2d { m1, m2, values })
}

/// ESS_B for RW2D/CW2D blocking of a stationary 2D model.
pub fn ess_block_stationary_2d(
    model: &CorrelationModel,
    layout: Layout2d,
    arr: Arrangement,
) -> Result<EssReport> {
    EssReport::timed(EssMethod::Stationary2d, || {
        lambda_stationary_2d(model, layout, arr)?.ess_b()
    })
}
