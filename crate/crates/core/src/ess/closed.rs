//! Closed forms under the AR(1) model `r_ij = ρ^|i-j|`.
//!
//! `ρ = 0` short-circuits to `n` before any formula is evaluated. Powers
//! enter as `1 - ρ^k = -expm1(k ln ρ)` to limit cancellation as `ρ → 1`.

use crate::corrmodel::AR1_CLOSED_RHO_MAX;
use crate::error::{EssError, Result};

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=AR1_CLOSED_RHO_MAX).contains(&rho) {
        return Err(EssError::param(format!(
            "AR(1) closed forms need 0 <= rho <= {AR1_CLOSED_RHO_MAX}, got {rho}"
        )));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(EssError::param("n must be positive"));
    }
    Ok(())
}

fn check_layout(n: usize, b: usize, m: usize) -> Result<()> {
    check_n(n)?;
    if b == 0 || m == 0 || m * b != n {
        return Err(EssError::dims(format!("n = {n} is not m*b = {m}*{b}")));
    }
    Ok(())
}

/// `1 - ρ^k` for `ρ > 0`.
#[inline]
fn one_minus_pow(rho: f64, k: f64) -> f64 {
    -(k * rho.ln()).exp_m1()
}

/// `y_a(h) = ((1-h) 1_a + h ψ_a) / (1+h)`, where `ψ_a` marks the two endpoints.
pub fn y_vector(a: usize, h: f64) -> Result<Vec<f64>> {
    if a < 2 {
        return Err(EssError::param(format!("y_a needs a >= 2, got {a}")));
    }
    if !(h >= 0.0) || !h.is_finite() {
        return Err(EssError::param(format!("y_a needs h >= 0, got {h}")));
    }
    let interior = (1.0 - h) / (1.0 + h);
    let end = 1.0 / (1.0 + h);
    let mut y = vec![interior; a];
    y[0] = end;
    y[a - 1] = end;
    Ok(y)
}

/// `ESS = (n(1-ρ) + 2ρ) / (1+ρ)`.
pub fn ess_full_ar1_closed(n: usize, rho: f64) -> Result<f64> {
    check_n(n)?;
    check_rho(rho)?;
    if rho == 0.0 {
        return Ok(n as f64);
    }
    let n = n as f64;
    Ok((n * (1.0 - rho) + 2.0 * rho) / (1.0 + rho))
}

/// `1ᵀR1 = (n(1-ρ²) - 2ρ(1-ρⁿ)) / (1-ρ)²`.
pub fn one_r_one_ar1(n: usize, rho: f64) -> Result<f64> {
    check_n(n)?;
    check_rho(rho)?;
    if rho == 0.0 {
        return Ok(n as f64);
    }
    let nf = n as f64;
    let q = 1.0 - rho;
    Ok((nf * (1.0 - rho * rho) - 2.0 * rho * one_minus_pow(rho, nf)) / (q * q))
}

/// Common RW/CW value for `b ∈ {1, 2}`: `n²(1-ρ)² / (n(1-ρ²) - 2ρ(1-ρⁿ))`.
pub fn ess_b1_b2_ar1_closed(n: usize, rho: f64) -> Result<f64> {
    check_n(n)?;
    check_rho(rho)?;
    if rho == 0.0 {
        return Ok(n as f64);
    }
    let nf = n as f64;
    let q = 1.0 - rho;
    Ok(nf * nf * q * q / (nf * (1.0 - rho * rho) - 2.0 * rho * one_minus_pow(rho, nf)))
}

/// Row-wise expression, valid for every `1 <= b <= n`.
pub(crate) fn row_expression(n: usize, b: usize, m: usize, rho: f64) -> f64 {
    let (nf, bf, mf) = (n as f64, b as f64, m as f64);
    let top = nf * (1.0 - rho) + 2.0 * mf * rho;
    let omb = one_minus_pow(rho, bf);
    let inner = mf - one_minus_pow(rho, nf) / omb;
    top * top / ((1.0 + rho) * (top + 2.0 * rho * (1.0 + rho) / omb * inner))
}

/// Column-wise expression, valid for `b >= 2`.
pub(crate) fn col_expression(n: usize, m: usize, rho: f64) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let omm = one_minus_pow(rho, mf);
    let rho_m = 1.0 - omm;
    let top = nf * omm + 2.0 * mf * rho_m;
    let q = 1.0 - rho;
    let den = (1.0 - rho * rho) * ((nf - 2.0 * mf) * omm * omm + 2.0 * mf)
        - 2.0 * rho * one_minus_pow(rho, 2.0 * mf);
    top * top * q * q / den
}

/// ESS_B of row-wise blocking into `m` consecutive blocks of size `b`.
pub fn ess_row_ar1_closed(n: usize, b: usize, m: usize, rho: f64) -> Result<f64> {
    check_layout(n, b, m)?;
    check_rho(rho)?;
    if rho == 0.0 {
        return Ok(n as f64);
    }
    if b == 1 {
        return ess_b1_b2_ar1_closed(n, rho);
    }
    Ok(row_expression(n, b, m, rho))
}

/// ESS_B of column-wise blocking into `m` strided blocks of size `b`.
/// `b = 1` is outside the column expression's domain and uses the `b ∈ {1,2}` form.
pub fn ess_col_ar1_closed(n: usize, b: usize, m: usize, rho: f64) -> Result<f64> {
    check_layout(n, b, m)?;
    check_rho(rho)?;
    if rho == 0.0 {
        return Ok(n as f64);
    }
    if b == 1 {
        return ess_b1_b2_ar1_closed(n, rho);
    }
    Ok(col_expression(n, m, rho))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn y_vector_examples() {
        assert_eq!(y_vector(3, 0.0).unwrap(), vec![1.0, 1.0, 1.0]);
        let y = y_vector(2, 0.5).unwrap();
        assert!(y.iter().all(|v| (v - 2.0 / 3.0).abs() < 1e-15));
        let y = y_vector(4, 0.6).unwrap();
        let want = [0.625, 0.25, 0.25, 0.625];
        for (a, b) in y.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(y_vector(1, 0.5).is_err());
        assert!(y_vector(3, -0.1).is_err());
    }

    #[test]
    fn full_examples() {
        assert_eq!(ess_full_ar1_closed(17, 0.0).unwrap(), 17.0);
        assert!((ess_full_ar1_closed(900, 0.6).unwrap() - 225.75).abs() < 1e-12);
        assert!((ess_full_ar1_closed(100, 0.6).unwrap() - 25.75).abs() < 1e-12);
        assert!(ess_full_ar1_closed(10, 1.0).is_err());
        assert!(ess_full_ar1_closed(10, -0.5).is_err());
    }

    #[test]
    fn one_r_one_examples() {
        assert_eq!(one_r_one_ar1(9, 0.0).unwrap(), 9.0);
        assert!((one_r_one_ar1(2, 0.5).unwrap() - 3.0).abs() < 1e-14);
        // brute-force sum of the 4x4 matrix entries
        let brute: f64 = (0..4i32)
            .flat_map(|i| (0..4i32).map(move |j| 0.5f64.powi((i - j).abs())))
            .sum();
        assert!((one_r_one_ar1(4, 0.5).unwrap() - brute).abs() < 1e-14);
        assert!((ess_b1_b2_ar1_closed(4, 0.5).unwrap() - 16.0 / brute).abs() < 1e-14);
    }

    #[test]
    fn rho_zero_everywhere() {
        assert_eq!(ess_row_ar1_closed(12, 3, 4, 0.0).unwrap(), 12.0);
        assert_eq!(ess_col_ar1_closed(12, 3, 4, 0.0).unwrap(), 12.0);
        assert_eq!(ess_b1_b2_ar1_closed(12, 0.0).unwrap(), 12.0);
    }

    #[test]
    fn non_monotone_row_values() {
        let want = [(4, 24.977), (5, 24.763), (10, 24.361)];
        for (b, v) in want {
            let got = ess_row_ar1_closed(100, b, 100 / b, 0.6).unwrap();
            assert!((got - v).abs() < 5e-4, "b = {b}: {got}");
        }
    }

    #[test]
    fn efficiency_pair_at_n900() {
        let full = ess_full_ar1_closed(900, 0.6).unwrap();
        let row = ess_row_ar1_closed(900, 30, 30, 0.6).unwrap() / full;
        let col = ess_col_ar1_closed(900, 30, 30, 0.6).unwrap() / full;
        assert_eq!(format!("{row:.3}"), "0.961");
        assert_eq!(format!("{col:.3}"), "0.999");
    }

    #[test]
    fn edge_block_sizes_reduce() {
        for &rho in &[0.05, 0.3, 0.6, 0.9, 0.99] {
            for n in [6usize, 12, 40] {
                let p3 = ess_b1_b2_ar1_closed(n, rho).unwrap();
                // b = n, m = 1 reduces to full ESS
                assert!(
                    rel(
                        row_expression(n, n, 1, rho),
                        ess_full_ar1_closed(n, rho).unwrap()
                    ) < 1e-10
                );
                assert!(
                    rel(
                        col_expression(n, 1, rho),
                        ess_full_ar1_closed(n, rho).unwrap()
                    ) < 1e-10
                );
                // b = 2 reduces to the b ∈ {1,2} form, both arrangements
                assert!(rel(row_expression(n, 2, n / 2, rho), p3) < 1e-10);
                assert!(rel(col_expression(n, n / 2, rho), p3) < 1e-10);
                // b = 1: row expression still matches, col expression does not apply
                assert!(rel(row_expression(n, 1, n, rho), p3) < 1e-10);
                assert_eq!(ess_col_ar1_closed(n, 1, n, rho).unwrap(), p3);
            }
        }
    }

    #[test]
    fn layout_errors() {
        assert!(ess_row_ar1_closed(10, 3, 3, 0.5).is_err());
        assert!(ess_col_ar1_closed(10, 0, 10, 0.5).is_err());
    }
}
