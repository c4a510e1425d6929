//! Python bindings for `blockess`.

use blockess::analysis::{self, RhoGrid};
use blockess::ess;
use blockess::{
    Blocking as CoreBlocking, BlockingSpec, CorrelationModel as CoreModel, EssError, PointGeometry,
};
use pyo3::exceptions::{PyArithmeticError, PyNotImplementedError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: EssError) -> PyErr {
    let msg = e.to_string();
    match e {
        EssError::NotPositiveDefinite { .. }
        | EssError::NotSymmetric { .. }
        | EssError::Numerical(_) => PyArithmeticError::new_err(msg),
        EssError::Unsupported(_) | EssError::NonStationary(_) => {
            PyNotImplementedError::new_err(msg)
        }
        EssError::Io(_) => PyOSError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

fn geometry(n: Option<usize>, grid: Option<(usize, usize)>) -> PyResult<PointGeometry> {
    match (n, grid) {
        (Some(n), None) => Ok(PointGeometry::Line(n)),
        (None, Some((n1, n2))) => PointGeometry::grid(n1, n2).map_err(to_py),
        _ => Err(PyValueError::new_err(
            "give exactly one of n= or grid=(n1, n2)",
        )),
    }
}

/// A correlation model with its parameter, e.g. `CorrelationModel("ar1:rho=0.6")`.
#[pyclass(name = "CorrelationModel", frozen)]
struct PyModel(CoreModel);

#[pymethods]
impl PyModel {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        CoreModel::parse(spec).map(PyModel).map_err(to_py)
    }

    #[staticmethod]
    fn ar1(rho: f64) -> Self {
        PyModel(CoreModel::ar1(rho))
    }

    #[staticmethod]
    fn linear(rho: f64) -> Self {
        PyModel(CoreModel::linear(rho))
    }

    #[staticmethod]
    fn inverse_linear(rho: f64) -> Self {
        PyModel(CoreModel::inverse_linear(rho))
    }

    /// AR(1) on points separated by `gaps`.
    #[staticmethod]
    fn ar1_gaps(rho: f64, gaps: Vec<f64>) -> Self {
        PyModel(CoreModel::ar1_gaps(rho, &gaps))
    }

    #[staticmethod]
    fn matern_l1(rho: f64) -> Self {
        PyModel(CoreModel::matern_l1(rho))
    }

    #[staticmethod]
    fn matern_l2_half(rho: f64) -> Self {
        PyModel(CoreModel::matern_l2_half(rho))
    }

    #[staticmethod]
    fn matern_l2_three_half(rho: f64) -> Self {
        PyModel(CoreModel::matern_l2_three_half(rho))
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.0.rho()
    }

    #[getter]
    fn family(&self) -> String {
        self.0.family_name()
    }

    fn with_rho(&self, rho: f64) -> Self {
        PyModel(self.0.with_rho(rho))
    }

    /// Correlation between 0-based points `i` and `j`.
    #[pyo3(signature = (i, j, *, n=None, grid=None))]
    fn entry(
        &self,
        i: usize,
        j: usize,
        n: Option<usize>,
        grid: Option<(usize, usize)>,
    ) -> PyResult<f64> {
        blockess::entry(&self.0, &geometry(n, grid)?, i, j).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("CorrelationModel('{}')", self.0)
    }
}

/// A partition of the points into blocks, with 0-based indices.
#[pyclass(name = "Blocking", frozen)]
struct PyBlocking(CoreBlocking);

#[pymethods]
impl PyBlocking {
    /// `Blocking("cw:m=30", n=900)` or `Blocking("rw2d:m1=3,m2=3", grid=(18, 12))`.
    #[new]
    #[pyo3(signature = (spec, *, n=None, grid=None))]
    fn new(spec: &str, n: Option<usize>, grid: Option<(usize, usize)>) -> PyResult<Self> {
        let geom = geometry(n, grid)?;
        BlockingSpec::parse(spec)
            .and_then(|s| s.build(&geom))
            .map(PyBlocking)
            .map_err(to_py)
    }

    #[staticmethod]
    fn custom(n: usize, blocks: Vec<Vec<usize>>) -> PyResult<Self> {
        CoreBlocking::custom(n, blocks)
            .map(PyBlocking)
            .map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn tag(&self) -> String {
        self.0.tag().to_string()
    }

    fn blocks(&self) -> Vec<Vec<usize>> {
        self.0.blocks().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Blocking('{}', n={}, blocks={})",
            self.0.tag(),
            self.0.n(),
            self.0.len()
        )
    }
}

/// Full-likelihood ESS `1ᵀR⁻¹1`, or the weighted form when `weights` is given.
#[pyfunction]
#[pyo3(signature = (model, *, n=None, grid=None, weights=None))]
fn ess_full(
    model: &PyModel,
    n: Option<usize>,
    grid: Option<(usize, usize)>,
    weights: Option<Vec<f64>>,
) -> PyResult<f64> {
    let geom = geometry(n, grid)?;
    ess::ess_full_auto(&model.0, &geom, weights.as_deref())
        .map(|r| r.value)
        .map_err(to_py)
}

/// Block-likelihood ESS for `blocking`.
#[pyfunction]
#[pyo3(signature = (model, blocking, *, grid=None, weights=None))]
fn ess_block(
    model: &PyModel,
    blocking: &PyBlocking,
    grid: Option<(usize, usize)>,
    weights: Option<Vec<f64>>,
) -> PyResult<f64> {
    let geom = match grid {
        Some(_) => geometry(None, grid)?,
        None => PointGeometry::Line(blocking.0.n()),
    };
    ess::ess_block_auto(&model.0, &geom, &blocking.0, weights.as_deref())
        .map(|r| r.value)
        .map_err(to_py)
}

/// `ESS_B / ESS`.
#[pyfunction]
#[pyo3(signature = (model, blocking, *, grid=None, weights=None))]
fn efficiency(
    model: &PyModel,
    blocking: &PyBlocking,
    grid: Option<(usize, usize)>,
    weights: Option<Vec<f64>>,
) -> PyResult<f64> {
    let n = grid.is_none().then(|| blocking.0.n());
    let full = ess_full(model, n, grid, weights.clone())?;
    let block = ess_block(model, blocking, grid, weights)?;
    analysis::efficiency(block, full).map_err(to_py)
}

#[pyfunction]
fn ess_full_ar1(n: usize, rho: f64) -> PyResult<f64> {
    ess::ess_full_ar1_closed(n, rho).map_err(to_py)
}

#[pyfunction]
fn ess_row_ar1(n: usize, b: usize, m: usize, rho: f64) -> PyResult<f64> {
    ess::ess_row_ar1_closed(n, b, m, rho).map_err(to_py)
}

#[pyfunction]
fn ess_col_ar1(n: usize, b: usize, m: usize, rho: f64) -> PyResult<f64> {
    ess::ess_col_ar1_closed(n, b, m, rho).map_err(to_py)
}

/// Solution of `R x = 1` for AR(1) on `n` equispaced points.
#[pyfunction]
fn y_vector(n: usize, rho: f64) -> PyResult<Vec<f64>> {
    ess::y_vector(n, rho).map_err(to_py)
}

fn rho_grid(rhos: Option<Vec<f64>>) -> PyResult<RhoGrid> {
    match rhos {
        Some(v) => RhoGrid::new(v).map_err(to_py),
        None => Ok(RhoGrid::fine()),
    }
}

/// `(rho, smallest efficiency)` over `rhos` (default 0.001..0.999).
#[pyfunction]
#[pyo3(signature = (model, blocking, rhos=None))]
fn min_eff(model: &PyModel, blocking: &PyBlocking, rhos: Option<Vec<f64>>) -> PyResult<(f64, f64)> {
    let geom = PointGeometry::Line(blocking.0.n());
    analysis::min_eff(&model.0, &geom, &blocking.0, &rho_grid(rhos)?).map_err(to_py)
}

/// `(rho, largest ESS - ESS_B)` over `rhos` (default 0.001..0.999).
#[pyfunction]
#[pyo3(signature = (model, blocking, rhos=None))]
fn max_diff(
    model: &PyModel,
    blocking: &PyBlocking,
    rhos: Option<Vec<f64>>,
) -> PyResult<(f64, f64)> {
    let geom = PointGeometry::Line(blocking.0.n());
    analysis::max_diff(&model.0, &geom, &blocking.0, &rho_grid(rhos)?).map_err(to_py)
}

/// Rows of the small-grid efficiency table as dicts.
#[pyfunction]
fn table1(py: Python<'_>) -> PyResult<Vec<Bound<'_, PyDict>>> {
    let rows = analysis::table1().map_err(to_py)?;
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("n", r.n)?;
            d.set_item(
                "layout",
                (r.layout.b1, r.layout.b2, r.layout.m1, r.layout.m2),
            )?;
            d.set_item("model", &r.model)?;
            d.set_item("rho", r.rho)?;
            d.set_item("ess_full", r.ess_full)?;
            d.set_item("ess_row", r.ess_row)?;
            d.set_item("ess_col", r.ess_col)?;
            d.set_item("eff_row", r.eff_row)?;
            d.set_item("eff_col", r.eff_col)?;
            Ok(d)
        })
        .collect()
}

/// Percentage gains of CW over RW on the large grid, `m` shrunk by `scale`.
#[pyfunction]
#[pyo3(signature = (scale=1.0))]
fn table2(py: Python<'_>, scale: f64) -> PyResult<Vec<Bound<'_, PyDict>>> {
    let rows = analysis::table2(analysis::table2_layout(scale), |_| {}).map_err(to_py)?;
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("model", &r.model)?;
            d.set_item("rho", r.rho)?;
            d.set_item(
                "layout",
                (r.layout.b1, r.layout.b2, r.layout.m1, r.layout.m2),
            )?;
            d.set_item("ess_row", r.ess_row)?;
            d.set_item("ess_col", r.ess_col)?;
            d.set_item("gain", r.gain)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn blockess_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyBlocking>()?;
    m.add_function(wrap_pyfunction!(ess_full, m)?)?;
    m.add_function(wrap_pyfunction!(ess_block, m)?)?;
    m.add_function(wrap_pyfunction!(efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(ess_full_ar1, m)?)?;
    m.add_function(wrap_pyfunction!(ess_row_ar1, m)?)?;
    m.add_function(wrap_pyfunction!(ess_col_ar1, m)?)?;
    m.add_function(wrap_pyfunction!(y_vector, m)?)?;
    m.add_function(wrap_pyfunction!(min_eff, m)?)?;
    m.add_function(wrap_pyfunction!(max_diff, m)?)?;
    m.add_function(wrap_pyfunction!(table1, m)?)?;
    m.add_function(wrap_pyfunction!(table2, m)?)?;
    Ok(())
}
