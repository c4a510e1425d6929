//! The two-dimensional efficiency tables: small grids with full and block
//! ESS, and the large forest-sized grid where only the RW/CW gain is feasible.

use rayon::prelude::*;

use super::percent_gain;
use crate::blocking::{equal_2d, Arrangement, Layout2d};
use crate::corrmodel::{CorrelationModel, PointGeometry};
use crate::error::Result;
use crate::ess::{ess_block_auto, ess_block_stationary_2d, ess_full_auto, ess_kronecker};

/// Grid models of both tables, in row order.
pub const TABLE_MODELS: [fn(f64) -> CorrelationModel; 3] = [
    CorrelationModel::matern_l1,
    CorrelationModel::matern_l2_half,
    CorrelationModel::matern_l2_three_half,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Case {
    pub layout: Layout2d,
    pub rhos: [f64; 4],
}

/// `(b1, b2, m1, m2)` = (6,4,3,3), (8,6,7,5), (5,8,6,10) at ρ = 0.6..0.9.
pub fn table1_cases() -> Vec<Table1Case> {
    [(6, 4, 3, 3), (8, 6, 7, 5), (5, 8, 6, 10)]
        .into_iter()
        .map(|(b1, b2, m1, m2)| Table1Case {
            layout: Layout2d { m1, b1, m2, b2 },
            rhos: [0.6, 0.7, 0.8, 0.9],
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub n: usize,
    pub layout: Layout2d,
    pub model: String,
    pub rho: f64,
    pub ess_full: f64,
    pub ess_row: f64,
    pub ess_col: f64,
    pub eff_row: f64,
    pub eff_col: f64,
}

/// Efficiency pairs for every case, model and ρ; rows ordered case, model, ρ.
pub fn table1() -> Result<Vec<Table1Row>> {
    let jobs: Vec<(Layout2d, usize, f64)> = table1_cases()
        .iter()
        .flat_map(|c| {
            (0..TABLE_MODELS.len()).flat_map(move |k| c.rhos.iter().map(move |&r| (c.layout, k, r)))
        })
        .collect();
    jobs.par_iter()
        .map(|&(l, k, rho)| {
            let model = TABLE_MODELS[k](rho);
            let geom = PointGeometry::grid(l.n1(), l.n2())?;
            let full = ess_full_auto(&model, &geom, None)?.value;
            let row = ess_block_auto(&model, &geom, &equal_2d(Arrangement::Row, l)?, None)?.value;
            let col = ess_block_auto(&model, &geom, &equal_2d(Arrangement::Col, l)?, None)?.value;
            Ok(Table1Row {
                n: geom.len(),
                layout: l,
                model: model.family_name(),
                rho,
                ess_full: full,
                ess_row: row,
                ess_col: col,
                eff_row: row / full,
                eff_col: col / full,
            })
        })
        .collect()
}

/// `(b1, b2) = (54, 36)` with `m1 = m2 = 104` shrunk to `max(2, round(104 / scale))`.
pub fn table2_layout(scale: f64) -> Layout2d {
    let m = if scale <= 1.0 {
        104
    } else {
        ((104.0 / scale).round() as usize).max(2)
    };
    Layout2d {
        m1: m,
        b1: 54,
        m2: m,
        b2: 36,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table2Row {
    pub model: String,
    pub rho: f64,
    pub layout: Layout2d,
    pub ess_row: f64,
    pub ess_col: f64,
    /// `100 (ESS_col - ESS_row) / ESS_row`.
    pub gain: f64,
    /// Seconds for both blockings.
    pub wall_time: f64,
}

/// Percentage gains of CW over RW blocking for every model at ρ = 0.1..0.9.
/// The separable model goes through the per-axis product, the others
/// through the offset path. `progress` sees each row as it completes.
pub fn table2(layout: Layout2d, mut progress: impl FnMut(&Table2Row)) -> Result<Vec<Table2Row>> {
    let mut out = Vec::with_capacity(27);
    for make in TABLE_MODELS {
        for k in 1..=9 {
            let rho = k as f64 / 10.0;
            let model = make(rho);
            let eval = |arr| match model.as_kronecker() {
                Some(_) => ess_kronecker(&model, layout.n1(), layout.n2(), Some((arr, layout))),
                None => ess_block_stationary_2d(&model, layout, arr),
            };
            let row = eval(Arrangement::Row)?;
            let col = eval(Arrangement::Col)?;
            let r = Table2Row {
                model: model.family_name(),
                rho,
                layout,
                ess_row: row.value,
                ess_col: col.value,
                gain: percent_gain(col.value, row.value)?,
                wall_time: row.wall_time + col.wall_time,
            };
            progress(&r);
            out.push(r);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layouts() {
        let full = table2_layout(1.0);
        assert_eq!(full.n1() * full.n2(), 21_026_304);
        assert_eq!(table2_layout(8.0).m1, 13);
        assert_eq!(table2_layout(1000.0).m2, 2);
        let c = table1_cases();
        assert_eq!(
            c.iter()
                .map(|c| c.layout.n1() * c.layout.n2())
                .collect::<Vec<_>>(),
            [216, 1680, 2400]
        );
    }

    #[test]
    fn scaled_table2_matches_dense() {
        let l = Layout2d {
            m1: 2,
            b1: 3,
            m2: 2,
            b2: 2,
        };
        let rows = table2(l, |_| {}).unwrap();
        assert_eq!(rows.len(), 27);
        let g = PointGeometry::grid(6, 4).unwrap();
        for r in rows.iter().step_by(4) {
            let model = TABLE_MODELS[rows.iter().position(|x| x == r).unwrap() / 9](r.rho);
            let d = |arr| {
                crate::ess::ess_block_dense(&model, &g, &equal_2d(arr, l).unwrap(), None)
                    .unwrap()
                    .0
                    .value
            };
            assert!((r.ess_row - d(Arrangement::Row)).abs() < 1e-9 * r.ess_row);
            assert!((r.ess_col - d(Arrangement::Col)).abs() < 1e-9 * r.ess_col);
        }
    }
}
