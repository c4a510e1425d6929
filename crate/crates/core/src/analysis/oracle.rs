//! Seeded randomized comparison of every fast path against the dense definition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blocking::{equal_1d, equal_2d, Arrangement, Layout2d};
use crate::corrmodel::{CorrelationModel, PointGeometry};
use crate::error::Result;
use crate::ess::{
    ess_block_auto, ess_block_dense, ess_block_stationary_1d, ess_col_ar1_closed, ess_full,
    ess_full_auto, ess_row_ar1_closed,
};

const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSummary {
    pub passed: usize,
    pub total: usize,
    pub failures: Vec<String>,
}

fn random_1d(rng: &mut ChaCha8Rng, n: usize) -> CorrelationModel {
    let u: f64 = rng.random();
    match rng.random_range(0..3) {
        0 => CorrelationModel::ar1(0.99 * u),
        1 => CorrelationModel::linear(u / (n - 1) as f64),
        _ => CorrelationModel::inverse_linear(2.0 * u),
    }
}

fn pick_divisor(rng: &mut ChaCha8Rng, n: usize) -> usize {
    let divs: Vec<usize> = (1..=n).filter(|b| n.is_multiple_of(*b)).collect();
    divs[rng.random_range(0..divs.len())]
}

fn pick_arr(rng: &mut ChaCha8Rng) -> Arrangement {
    if rng.random() {
        Arrangement::Row
    } else {
        Arrangement::Col
    }
}

/// `(label, fast, oracle)` for one random case.
fn one_case(rng: &mut ChaCha8Rng) -> Result<(String, f64, f64)> {
    const SIZES: [usize; 6] = [12, 24, 30, 36, 48, 60];
    match rng.random_range(0..4) {
        0 => {
            let n = SIZES[rng.random_range(0..SIZES.len())];
            let model = random_1d(rng, n);
            let b = pick_divisor(rng, n);
            let arr = pick_arr(rng);
            let g = PointGeometry::Line(n);
            let blk = equal_1d(arr, n, n / b, b)?;
            let fast = ess_block_auto(&model, &g, &blk, None)?;
            let slow = ess_block_dense(&model, &g, &blk, None)?.0.value;
            Ok((
                format!("{model} n={n} b={b} {arr} via {}", fast.method),
                fast.value,
                slow,
            ))
        }
        1 => {
            let n = SIZES[rng.random_range(0..SIZES.len())];
            let rho = 0.99 * rng.random::<f64>();
            let b = pick_divisor(rng, n);
            let arr = pick_arr(rng);
            let closed = match arr {
                Arrangement::Row => ess_row_ar1_closed(n, b, n / b, rho)?,
                Arrangement::Col => ess_col_ar1_closed(n, b, n / b, rho)?,
            };
            let offsets =
                ess_block_stationary_1d(&CorrelationModel::ar1(rho), n, n / b, b, arr)?.value;
            Ok((
                format!("closed vs offsets ar1:rho={rho} n={n} b={b} {arr}"),
                closed,
                offsets,
            ))
        }
        2 => {
            let l = Layout2d {
                m1: rng.random_range(2..=4),
                b1: rng.random_range(1..=4),
                m2: rng.random_range(2..=4),
                b2: rng.random_range(1..=4),
            };
            let rho = 0.95 * rng.random::<f64>();
            let model = match rng.random_range(0..3) {
                0 => CorrelationModel::matern_l1(rho),
                1 => CorrelationModel::matern_l2_half(rho),
                _ => CorrelationModel::matern_l2_three_half(rho),
            };
            let arr = pick_arr(rng);
            let g = PointGeometry::grid(l.n1(), l.n2())?;
            let blk = equal_2d(arr, l)?;
            let fast = ess_block_auto(&model, &g, &blk, None)?;
            let slow = ess_block_dense(&model, &g, &blk, None)?.0.value;
            Ok((
                format!("{model} {l:?} {arr} via {}", fast.method),
                fast.value,
                slow,
            ))
        }
        _ => {
            let (n1, n2) = (rng.random_range(2..=8), rng.random_range(2..=8));
            let model = CorrelationModel::kronecker(random_1d(rng, n1), random_1d(rng, n2));
            let g = PointGeometry::grid(n1, n2)?;
            let fast = ess_full_auto(&model, &g, None)?;
            let slow = ess_full(&model, &g, None)?.value;
            Ok((
                format!("{model} full {n1}x{n2} via {}", fast.method),
                fast.value,
                slow,
            ))
        }
    }
}

/// Runs `cases` random comparisons; reproducible for a given `seed`.
pub fn oracle_check(seed: u64, cases: usize) -> Result<OracleSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..cases {
        let (label, fast, slow) = one_case(&mut rng)?;
        let err = (fast - slow).abs() / slow.abs();
        if !(err <= TOLERANCE) {
            failures.push(format!("{label}: {fast} vs {slow} (rel {err:.2e})"));
        }
    }
    Ok(OracleSummary {
        passed: cases - failures.len(),
        total: cases,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_run_passes_and_repeats() {
        let a = oracle_check(7, 60).unwrap();
        assert_eq!(a.passed, 60, "{:?}", a.failures);
        assert_eq!(a, oracle_check(7, 60).unwrap());
    }
}
