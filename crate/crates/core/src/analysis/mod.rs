//! Efficiency ratios, parameter sweeps, worst-case scans and table runs.

use rayon::prelude::*;

use crate::blocking::Blocking;
use crate::corrmodel::{CorrelationModel, PointGeometry};
use crate::error::{EssError, Result};
use crate::ess::{ess_block_auto, ess_full_auto};

mod grid;
mod oracle;
mod output;
mod tables;

pub use grid::RhoGrid;
pub use oracle::{oracle_check, OracleSummary};
pub use output::{write_csv, CSV_HEADER};
pub use tables::{
    table1, table1_cases, table2, table2_layout, Table1Case, Table1Row, Table2Row, TABLE_MODELS,
};

/// `ESS_B / ESS`.
pub fn efficiency(ess_block: f64, ess_full: f64) -> Result<f64> {
    if !(ess_block > 0.0) || !(ess_full > 0.0) {
        return Err(EssError::param(format!(
            "efficiency needs positive inputs, got {ess_block} / {ess_full}"
        )));
    }
    Ok(ess_block / ess_full)
}

/// `100 (ESS_col - ESS_row) / ESS_row`.
pub fn percent_gain(ess_col: f64, ess_row: f64) -> Result<f64> {
    if !(ess_row > 0.0) {
        return Err(EssError::param(format!(
            "percent gain needs ESS_row > 0, got {ess_row}"
        )));
    }
    Ok(100.0 * (ess_col - ess_row) / ess_row)
}

/// Runs `f` on a pool of `workers` threads; `None` uses the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| EssError::Unsupported(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// One `(ρ, blocking)` evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub model: String,
    pub rho: f64,
    pub n: usize,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    /// Common block size, or `b1 b2` on a grid; `None` for unequal blocks.
    pub b: Option<usize>,
    pub m: usize,
    pub b1: Option<usize>,
    pub m1: Option<usize>,
    pub b2: Option<usize>,
    pub m2: Option<usize>,
    pub blocking: String,
    pub ess_full: f64,
    pub ess_block: f64,
    pub eff: f64,
}

impl SweepRow {
    fn new(
        model: &CorrelationModel,
        geom: &PointGeometry,
        blocking: &Blocking,
        full: f64,
        block: f64,
    ) -> Result<Self> {
        let (n1, n2) = match *geom {
            PointGeometry::Grid { n1, n2 } => (Some(n1), Some(n2)),
            PointGeometry::Line(_) => (None, None),
        };
        let l2 = blocking.layout_2d().map(|(_, l)| l);
        Ok(SweepRow {
            model: model.family_name(),
            rho: model.rho(),
            n: geom.len(),
            n1,
            n2,
            b: blocking.uniform_block_size(),
            m: blocking.len(),
            b1: l2.map(|l| l.b1),
            m1: l2.map(|l| l.m1),
            b2: l2.map(|l| l.b2),
            m2: l2.map(|l| l.m2),
            blocking: blocking.tag().to_string(),
            ess_full: full,
            ess_block: block,
            eff: efficiency(block, full)?,
        })
    }
}

/// One row per `(ρ, blocking)`, grid-major. `family` supplies everything but ρ.
pub fn sweep(
    family: &CorrelationModel,
    grid: &RhoGrid,
    geom: &PointGeometry,
    blockings: &[Blocking],
    weights: Option<&[f64]>,
) -> Result<Vec<SweepRow>> {
    let per_rho: Vec<Vec<SweepRow>> = grid
        .values()
        .par_iter()
        .map(|&rho| {
            let model = family.with_rho(rho);
            let full = ess_full_auto(&model, geom, weights)?.value;
            blockings
                .iter()
                .map(|b| {
                    let block = ess_block_auto(&model, geom, b, weights)?.value;
                    SweepRow::new(&model, geom, b, full, block)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per_rho.into_iter().flatten().collect())
}

/// Grid point with the smallest `key`; ties go to the smaller ρ.
fn arg_min(rows: &[SweepRow], key: impl Fn(&SweepRow) -> f64) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for r in rows {
        let k = key(r);
        if best.is_none_or(|(_, v)| k < v) {
            best = Some((r.rho, k));
        }
    }
    best.ok_or_else(|| EssError::param("empty rho grid"))
}

/// `(ρ*, min Eff_B)` over the grid.
pub fn min_eff(
    family: &CorrelationModel,
    geom: &PointGeometry,
    blocking: &Blocking,
    grid: &RhoGrid,
) -> Result<(f64, f64)> {
    let rows = sweep(family, grid, geom, std::slice::from_ref(blocking), None)?;
    arg_min(&rows, |r| r.eff)
}

/// `(ρ*, max (ESS - ESS_B))` over the grid.
pub fn max_diff(
    family: &CorrelationModel,
    geom: &PointGeometry,
    blocking: &Blocking,
    grid: &RhoGrid,
) -> Result<(f64, f64)> {
    let rows = sweep(family, grid, geom, std::slice::from_ref(blocking), None)?;
    let (rho, neg) = arg_min(&rows, |r| -(r.ess_full - r.ess_block))?;
    Ok((rho, -neg))
}

/// A drop `ESS_B(b) > ESS_B(b')` between consecutive divisors `b < b'`.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub b: usize,
    pub b_next: usize,
    pub ess: f64,
    pub ess_next: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityRow {
    pub rho: f64,
    /// `(b, ESS_B)` for every divisor `b` of `n`, ascending.
    pub values: Vec<(usize, f64)>,
    pub violations: Vec<Violation>,
}

impl MonotonicityRow {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Largest `n` accepted by [`monotonicity_report`] by default.
pub const MONOTONICITY_CAP: usize = 100_000;

/// Checks whether ESS_B is nondecreasing in the block size over the divisors
/// of `n`, for RW or CW blocking.
pub fn monotonicity_report(
    family: &CorrelationModel,
    n: usize,
    grid: &RhoGrid,
    arr: crate::blocking::Arrangement,
    cap: usize,
) -> Result<Vec<MonotonicityRow>> {
    if n == 0 || n > cap {
        return Err(EssError::CapExceeded(format!(
            "monotonicity scan needs 1 <= n <= {cap}, got {n}"
        )));
    }
    let geom = PointGeometry::Line(n);
    let divisors: Vec<usize> = (1..=n).filter(|b| n.is_multiple_of(*b)).collect();
    let blockings: Vec<Blocking> = divisors
        .iter()
        .map(|&b| crate::blocking::equal_1d(arr, n, n / b, b))
        .collect::<Result<_>>()?;
    grid.values()
        .par_iter()
        .map(|&rho| {
            let model = family.with_rho(rho);
            let values = divisors
                .iter()
                .zip(&blockings)
                .map(|(&b, blk)| Ok((b, ess_block_auto(&model, &geom, blk, None)?.value)))
                .collect::<Result<Vec<_>>>()?;
            let violations = values
                .windows(2)
                .filter(|w| w[1].1 < w[0].1 * (1.0 - 1e-9))
                .map(|w| Violation {
                    b: w[0].0,
                    b_next: w[1].0,
                    ess: w[0].1,
                    ess_next: w[1].1,
                })
                .collect();
            Ok(MonotonicityRow {
                rho,
                values,
                violations,
            })
        })
        .collect()
}
