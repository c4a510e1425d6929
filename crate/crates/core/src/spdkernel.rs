//! Dense symmetric positive definite linear algebra.
//!
//! Factors are stored as packed lower triangles (row `i` holds `i + 1`
//! entries starting at `i(i+1)/2`). All reductions run in a fixed order so
//! identical inputs give bitwise-identical results.

use crate::corrmodel::{CorrelationModel, Kernel, PointGeometry};
use crate::error::{EssError, Result};

/// Pivots at or below this value are treated as a loss of positive definiteness.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Row-major dense matrix; square and symmetric when it holds a diagonal block.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(EssError::dims(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(EssError::dims(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }
}

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = A`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    order: usize,
    packed: Vec<f64>,
}

#[inline]
fn row_offset(i: usize) -> usize {
    i * (i + 1) / 2
}

impl CholeskyFactor {
    pub fn order(&self) -> usize {
        self.order
    }

    /// `L[i][j]`, zero above the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.packed[row_offset(i) + j]
        }
    }

    fn row(&self, i: usize) -> &[f64] {
        let o = row_offset(i);
        &self.packed[o..o + i + 1]
    }

    /// `ln det A = 2 Σ ln L_ii`.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.order).map(|i| self.row(i)[i].ln()).sum::<f64>()
    }
}

/// Fixed-order dot product with four interleaved accumulators.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

/// Factors a packed lower triangle of `A` in place.
pub(crate) fn cholesky_packed(order: usize, mut packed: Vec<f64>) -> Result<CholeskyFactor> {
    debug_assert_eq!(packed.len(), row_offset(order));
    for i in 0..order {
        let (head, tail) = packed.split_at_mut(row_offset(i));
        let row_i = &mut tail[..i + 1];
        for j in 0..i {
            let row_j = &head[row_offset(j)..row_offset(j) + j + 1];
            let (done, rest) = row_i.split_at_mut(j);
            let s = rest[0] - dot(done, &row_j[..j]);
            rest[0] = s / row_j[j];
        }
        let (done, diag) = row_i.split_at_mut(i);
        let s = diag[0] - dot(done, done);
        if !s.is_finite() || s <= PIVOT_TOLERANCE {
            return Err(EssError::NotPositiveDefinite {
                pivot: i,
                block: None,
            });
        }
        diag[0] = s.sqrt();
    }
    Ok(CholeskyFactor { order, packed })
}

/// Cholesky factorization of a symmetric matrix.
pub fn cholesky(a: &DenseMatrix) -> Result<CholeskyFactor> {
    if a.rows != a.cols {
        return Err(EssError::dims(format!(
            "{}x{} matrix is not square",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let mut packed = Vec::with_capacity(row_offset(n));
    for i in 0..n {
        for j in 0..=i {
            let (x, y) = (a.get(i, j), a.get(j, i));
            if (x - y).abs() > 1e-14 * x.abs().max(1.0) {
                return Err(EssError::NotSymmetric { i, j });
            }
            packed.push(x);
        }
    }
    cholesky_packed(n, packed)
}

/// Factors the correlation submatrix on `points` directly from the kernel,
/// without forming the full square block.
pub fn factor_points(kernel: &Kernel<'_>, points: &[usize]) -> Result<CholeskyFactor> {
    let n = points.len();
    let mut packed = Vec::with_capacity(row_offset(n));
    for (a, &p) in points.iter().enumerate() {
        for &q in &points[..=a] {
            packed.push(kernel.at(p, q));
        }
    }
    cholesky_packed(n, packed)
}

/// Solves `A x = rhs` given `A = L Lᵀ`.
pub fn solve_spd(f: &CholeskyFactor, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = f.order;
    if rhs.len() != n {
        return Err(EssError::dims(format!(
            "right-hand side of length {} for order {n}",
            rhs.len()
        )));
    }
    let mut x = Vec::with_capacity(n);
    for i in 0..n {
        let row = f.row(i);
        let v = (rhs[i] - dot(&row[..i], &x[..i])) / row[i];
        x.push(v);
    }
    for i in (0..n).rev() {
        let row = f.row(i);
        x[i] /= row[i];
        let xi = x[i];
        for (xk, lik) in x[..i].iter_mut().zip(&row[..i]) {
            *xk -= lik * xi;
        }
    }
    Ok(x)
}

/// `w_leftᵀ · block · w_right`, accumulated row by row.
pub fn quad_form(w_left: &[f64], block: &DenseMatrix, w_right: &[f64]) -> Result<f64> {
    if w_left.len() != block.rows || w_right.len() != block.cols {
        return Err(EssError::dims(format!(
            "vectors of length {} and {} for a {}x{} block",
            w_left.len(),
            w_right.len(),
            block.rows,
            block.cols
        )));
    }
    Ok(w_left
        .iter()
        .enumerate()
        .fold(0.0, |acc, (i, wi)| acc + wi * dot(block.row(i), w_right)))
}

pub fn materialize_with(kernel: &Kernel<'_>, rows: &[usize], cols: &[usize]) -> DenseMatrix {
    DenseMatrix::from_fn(rows.len(), cols.len(), |a, b| kernel.at(rows[a], cols[b]))
}

/// Correlation submatrix on 0-based `rows x cols`.
pub fn materialize_block(
    model: &CorrelationModel,
    geom: &PointGeometry,
    rows: &[usize],
    cols: &[usize],
) -> Result<DenseMatrix> {
    let kernel = model.kernel(geom)?;
    let n = geom.len();
    if let Some(&bad) = rows.iter().chain(cols).find(|&&i| i >= n) {
        return Err(EssError::IndexOutOfRange { i: bad, j: bad, n });
    }
    Ok(materialize_with(&kernel, rows, cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn materialize_examples() {
        let m = CorrelationModel::ar1(0.5);
        let g = PointGeometry::Line(6);
        let a = materialize_block(&m, &g, &[0, 1], &[0, 1]).unwrap();
        assert_eq!(a.as_slice(), &[1.0, 0.5, 0.5, 1.0]);
        let a = materialize_block(&m, &g, &[0], &[0]).unwrap();
        assert_eq!(a.as_slice(), &[1.0]);
        // 1-based rows {1,3}, cols {2,4}
        let a = materialize_block(&m, &g, &[0, 2], &[1, 3]).unwrap();
        let want = [0.5, 0.125, 0.5, 0.5];
        for (x, y) in a.as_slice().iter().zip(want) {
            assert!(close(*x, y, 1e-15));
        }
        assert!(materialize_block(&m, &g, &[6], &[0]).is_err());
    }

    #[test]
    fn cholesky_examples() {
        let f = cholesky(&DenseMatrix::identity(3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(f.get(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
        let a = DenseMatrix::from_row_major(2, 2, vec![1.0, 0.5, 0.5, 1.0]).unwrap();
        let f = cholesky(&a).unwrap();
        assert_eq!(f.get(0, 0), 1.0);
        assert!(close(f.get(1, 0), 0.5, 1e-15));
        assert!(close(f.get(1, 1), 0.75f64.sqrt(), 1e-15));
        assert_eq!(f.get(0, 1), 0.0);

        let ones = DenseMatrix::from_row_major(2, 2, vec![1.0; 4]).unwrap();
        assert!(matches!(
            cholesky(&ones),
            Err(EssError::NotPositiveDefinite { pivot: 1, .. })
        ));
        let asym = DenseMatrix::from_row_major(2, 2, vec![1.0, 0.5, 0.4, 1.0]).unwrap();
        assert!(matches!(
            cholesky(&asym),
            Err(EssError::NotSymmetric { .. })
        ));
        let rect = DenseMatrix::from_row_major(1, 2, vec![1.0, 0.0]).unwrap();
        assert!(cholesky(&rect).is_err());
    }

    #[test]
    fn solve_examples() {
        let f = cholesky(&DenseMatrix::identity(4)).unwrap();
        assert_eq!(solve_spd(&f, &[1.0; 4]).unwrap(), vec![1.0; 4]);

        let rho = 0.3;
        let a = DenseMatrix::from_row_major(2, 2, vec![1.0, rho, rho, 1.0]).unwrap();
        let x = solve_spd(&cholesky(&a).unwrap(), &[1.0, 1.0]).unwrap();
        for v in x {
            assert!(close(v, 1.0 / (1.0 + rho), 1e-15));
        }
        assert!(solve_spd(&cholesky(&a).unwrap(), &[1.0]).is_err());
    }

    #[test]
    fn quad_form_examples() {
        let id = DenseMatrix::identity(2);
        assert_eq!(quad_form(&[1.0, 1.0], &id, &[1.0, 1.0]).unwrap(), 2.0);
        let b = DenseMatrix::from_row_major(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(quad_form(&[1.0, 0.0], &b, &[0.0, 1.0]).unwrap(), 2.0);
        assert!(quad_form(&[1.0], &b, &[0.0, 1.0]).is_err());

        // y_3(0.5) = (2/3, 1/3, 2/3) solves R y = 1 for AR(1) with ρ = 0.5
        let y = [2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0];
        let r = materialize_block(
            &CorrelationModel::ar1(0.5),
            &PointGeometry::Line(3),
            &[0, 1, 2],
            &[0, 1, 2],
        )
        .unwrap();
        assert!(close(quad_form(&y, &r, &y).unwrap(), 5.0 / 3.0, 1e-14));
    }

    #[test]
    fn factor_points_matches_dense() {
        let m = CorrelationModel::matern_l2_three_half(0.6);
        let g = PointGeometry::grid(5, 4).unwrap();
        let k = m.kernel(&g).unwrap();
        let pts = [0, 3, 7, 8, 13, 19];
        let f1 = factor_points(&k, &pts).unwrap();
        let f2 = cholesky(&materialize_with(&k, &pts, &pts)).unwrap();
        assert_eq!(f1, f2);
    }

    #[test]
    fn log_det_of_2x2() {
        let a = DenseMatrix::from_row_major(2, 2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        assert!(close(cholesky(&a).unwrap().log_det(), 3f64.ln(), 1e-14));
    }
}
