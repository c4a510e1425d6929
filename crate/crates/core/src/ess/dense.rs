//! Direct evaluation of the ESS definitions with Cholesky solves.

use rayon::prelude::*;

use super::{EssMethod, EssReport, LambdaTable};
use crate::blocking::Blocking;
use crate::corrmodel::{CorrelationModel, Kernel, PointGeometry};
use crate::error::{EssError, Result};
use crate::spdkernel::{dot, factor_points, solve_spd};

/// Size caps for the dense paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` for which the full `R` is factored.
    pub full_cap: usize,
    /// Largest single block factored by the dense block path.
    pub block_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            full_cap: 20_000,
            block_cap: 5_000,
        }
    }
}

fn check_weights(weights: Option<&[f64]>, n: usize) -> Result<()> {
    if let Some(z) = weights {
        if z.len() != n {
            return Err(EssError::dims(format!(
                "{} weights for {n} points",
                z.len()
            )));
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(EssError::param("weights must be finite"));
        }
        if z.iter().all(|&v| v == 0.0) {
            return Err(EssError::param("weight vector must be non-zero"));
        }
    }
    Ok(())
}

/// `zᵀR⁻¹z` (default `z = 1`) from one factorization of the full `R`.
pub fn ess_full(
    model: &CorrelationModel,
    geom: &PointGeometry,
    weights: Option<&[f64]>,
) -> Result<EssReport> {
    ess_full_with(model, geom, weights, &Limits::default())
}

pub fn ess_full_with(
    model: &CorrelationModel,
    geom: &PointGeometry,
    weights: Option<&[f64]>,
    limits: &Limits,
) -> Result<EssReport> {
    let n = geom.len();
    check_weights(weights, n)?;
    let kernel = model.kernel(geom)?;
    if n > limits.full_cap {
        return Err(EssError::CapExceeded(format!(
            "n = {n} exceeds the dense cap of {} points; use a structured path",
            limits.full_cap
        )));
    }
    EssReport::timed(EssMethod::DenseFull, || {
        let points: Vec<usize> = (0..n).collect();
        let factor = factor_points(&kernel, &points)?;
        let ones;
        let z = match weights {
            Some(z) => z,
            None => {
                ones = vec![1.0; n];
                &ones
            }
        };
        let x = solve_spd(&factor, z)?;
        Ok(dot(z, &x))
    })
}

fn block_weights(block: &[usize], weights: Option<&[f64]>) -> Vec<f64> {
    match weights {
        Some(z) => block.iter().map(|&i| z[i]).collect(),
        None => vec![1.0; block.len()],
    }
}

/// `Σ_a Σ_b w_u[a] r(p_a, q_b) w_v[b]` without materializing `R_uv`.
fn cross_form(kernel: &Kernel<'_>, pu: &[usize], wu: &[f64], pv: &[usize], wv: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&p, &wp) in pu.iter().zip(wu) {
        let mut row = 0.0;
        for (&q, &wq) in pv.iter().zip(wv) {
            row += kernel.at(p, q) * wq;
        }
        acc += wp * row;
    }
    acc
}

/// Dense `λ_uv` table for an arbitrary blocking.
pub fn lambda_dense(
    model: &CorrelationModel,
    geom: &PointGeometry,
    blocking: &Blocking,
    weights: Option<&[f64]>,
    limits: &Limits,
) -> Result<LambdaTable> {
    let n = geom.len();
    if blocking.n() != n {
        return Err(EssError::dims(format!(
            "blocking covers {} points, geometry has {n}",
            blocking.n()
        )));
    }
    check_weights(weights, n)?;
    let kernel = model.kernel(geom)?;
    if let Some(big) = blocking.blocks().iter().map(Vec::len).max() {
        if big > limits.block_cap {
            return Err(EssError::CapExceeded(format!(
                "block of {big} points exceeds the dense block cap of {}",
                limits.block_cap
            )));
        }
    }
    let m = blocking.len();

    // w_u = R_uu⁻¹ z_u, λ_uu = z_uᵀ w_u
    let solved: Vec<(Vec<f64>, f64)> = blocking
        .blocks()
        .par_iter()
        .enumerate()
        .map(|(u, block)| {
            let z = block_weights(block, weights);
            let factor = factor_points(&kernel, block).map_err(|e| match e {
                EssError::NotPositiveDefinite { pivot, .. } => EssError::NotPositiveDefinite {
                    pivot,
                    block: Some(u),
                },
                other => other,
            })?;
            let w = solve_spd(&factor, &z)?;
            let diag = dot(&z, &w);
            Ok((w, diag))
        })
        .collect::<Result<_>>()?;

    let rows: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|u| {
            let (wu, _) = &solved[u];
            (u + 1..m)
                .map(|v| {
                    cross_form(
                        &kernel,
                        blocking.block(u),
                        wu,
                        blocking.block(v),
                        &solved[v].0,
                    )
                })
                .collect()
        })
        .collect();

    let mut values = vec![0.0; m * m];
    for u in 0..m {
        values[u * m + u] = solved[u].1;
        for (k, &lam) in rows[u].iter().enumerate() {
            let v = u + 1 + k;
            values[u * m + v] = lam;
            values[v * m + u] = lam;
        }
    }
    Ok(LambdaTable::DenseByPair { m, values })
}

/// ESS_B for any blocking from the dense `λ` table.
pub fn ess_block_dense(
    model: &CorrelationModel,
    geom: &PointGeometry,
    blocking: &Blocking,
    weights: Option<&[f64]>,
) -> Result<(EssReport, LambdaTable)> {
    ess_block_dense_with(model, geom, blocking, weights, &Limits::default())
}

pub fn ess_block_dense_with(
    model: &CorrelationModel,
    geom: &PointGeometry,
    blocking: &Blocking,
    weights: Option<&[f64]>,
    limits: &Limits,
) -> Result<(EssReport, LambdaTable)> {
    let mut table = None;
    let report = EssReport::timed(EssMethod::DenseBlock, || {
        let t = lambda_dense(model, geom, blocking, weights, limits)?;
        let v = t.ess_b()?;
        table = Some(t);
        Ok(v)
    })?;
    Ok((report, table.expect("table set on success")))
}

/// Block ESS with a predictor vector `z` in place of the vector of ones.
pub fn ess_block_generic_weighted(
    model: &CorrelationModel,
    geom: &PointGeometry,
    blocking: &Blocking,
    z: &[f64],
) -> Result<EssReport> {
    Ok(ess_block_dense(model, geom, blocking, Some(z))?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocking::{cw_1d, rw_1d};

    #[test]
    fn identity_gives_n() {
        let r = ess_full(&CorrelationModel::ar1(0.0), &PointGeometry::Line(37), None).unwrap();
        assert_eq!(r.value, 37.0);
        assert_eq!(r.method, EssMethod::DenseFull);
    }

    #[test]
    fn ar1_full_matches_hand_value() {
        // (100 * 0.4 + 1.2) / 1.6
        let r = ess_full(&CorrelationModel::ar1(0.6), &PointGeometry::Line(100), None).unwrap();
        assert!((r.value - 25.75).abs() < 1e-10);
    }

    #[test]
    fn single_point() {
        let r = ess_full(&CorrelationModel::ar1(0.9), &PointGeometry::Line(1), None).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn cap_is_enforced() {
        let limits = Limits {
            full_cap: 10,
            block_cap: 5,
        };
        let e = ess_full_with(
            &CorrelationModel::ar1(0.5),
            &PointGeometry::Line(11),
            None,
            &limits,
        );
        assert!(matches!(e, Err(EssError::CapExceeded(_))));
        let b = rw_1d(12, 2, 6).unwrap();
        let e = ess_block_dense_with(
            &CorrelationModel::ar1(0.5),
            &PointGeometry::Line(12),
            &b,
            None,
            &limits,
        );
        assert!(matches!(e, Err(EssError::CapExceeded(_))));
    }

    #[test]
    fn brute_force_two_by_two_blocks() {
        // AR(1) ρ = 0.5, blocks {1,2},{3,4}; explicit 2x2 inverses
        let rho: f64 = 0.5;
        let r = |i: usize, j: usize| rho.powi((i as i32 - j as i32).abs());
        let inv2 = |a: usize, b: usize| {
            let (p, q, s) = (r(a, a), r(a, b), r(b, b));
            let det = p * s - q * q;
            [[s / det, -q / det], [-q / det, p / det]]
        };
        let blocks = [[0usize, 1], [2, 3]];
        let w: Vec<[f64; 2]> = blocks
            .iter()
            .map(|b| {
                let inv = inv2(b[0], b[1]);
                [inv[0][0] + inv[0][1], inv[1][0] + inv[1][1]]
            })
            .collect();
        let mut lam = [[0.0; 2]; 2];
        for u in 0..2 {
            for v in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        lam[u][v] += w[u][a] * r(blocks[u][a], blocks[v][b]) * w[v][b];
                    }
                }
            }
        }
        let diag = lam[0][0] + lam[1][1];
        let total = lam[0][0] + lam[0][1] + lam[1][0] + lam[1][1];
        let want = diag * diag / total;

        let b = rw_1d(4, 2, 2).unwrap();
        let (rep, table) = ess_block_dense(
            &CorrelationModel::ar1(rho),
            &PointGeometry::Line(4),
            &b,
            None,
        )
        .unwrap();
        assert!((rep.value - want).abs() < 1e-13, "{} vs {want}", rep.value);
        assert!(matches!(table, LambdaTable::DenseByPair { m: 2, .. }));
    }

    #[test]
    fn one_block_equals_full() {
        let m = CorrelationModel::inverse_linear(0.8);
        let g = PointGeometry::Line(25);
        let full = ess_full(&m, &g, None).unwrap().value;
        let one = ess_block_dense(&m, &g, &rw_1d(25, 1, 25).unwrap(), None)
            .unwrap()
            .0
            .value;
        assert!((full - one).abs() < 1e-10 * full);
    }

    #[test]
    fn singletons_give_n_squared_over_sum() {
        let m = CorrelationModel::linear(0.02);
        let n = 30;
        let g = PointGeometry::Line(n);
        let k = m.kernel(&g).unwrap();
        let sum: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| k.at(i, j))
            .sum();
        let v = ess_block_dense(&m, &g, &cw_1d(n, n, 1).unwrap(), None)
            .unwrap()
            .0
            .value;
        assert!((v - (n * n) as f64 / sum).abs() < 1e-10);
    }

    #[test]
    fn weights_of_ones_reduce_to_plain() {
        let m = CorrelationModel::ar1(0.7);
        let g = PointGeometry::Line(20);
        let b = cw_1d(20, 4, 5).unwrap();
        let plain = ess_block_dense(&m, &g, &b, None).unwrap().0.value;
        let w = ess_block_generic_weighted(&m, &g, &b, &[1.0; 20])
            .unwrap()
            .value;
        assert_eq!(plain, w);
    }

    #[test]
    fn bad_weights() {
        let m = CorrelationModel::ar1(0.7);
        let g = PointGeometry::Line(4);
        assert!(ess_full(&m, &g, Some(&[1.0, 2.0])).is_err());
        assert!(ess_full(&m, &g, Some(&[0.0; 4])).is_err());
    }

    #[test]
    fn non_pd_block_is_reported() {
        // second pivot is 1 - ρ² ≈ 2e-13
        let m = CorrelationModel::ar1(1.0 - 1e-13);
        let g = PointGeometry::Line(4);
        assert!(matches!(
            ess_full(&m, &g, None),
            Err(EssError::NotPositiveDefinite {
                pivot: 1,
                block: None
            })
        ));
        let b = rw_1d(4, 2, 2).unwrap();
        assert!(matches!(
            ess_block_dense(&m, &g, &b, None),
            Err(EssError::NotPositiveDefinite {
                pivot: 1,
                block: Some(0)
            })
        ));
    }
}
