//! Correlation models and point geometries.
//!
//! A [`CorrelationModel`] never materializes the correlation matrix. Entries
//! are produced on demand through a [`Kernel`], which is the validated pairing
//! of a model with a [`PointGeometry`] and caches `ln ρ`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{EssError, Result};

/// Index set of the spatial points.
///
/// Points are addressed by 0-based linear indices. On a grid, point
/// `(i1, i2)` (0-based) has linear index `i1 * n2 + i2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointGeometry {
    /// `n` points on a line. Equispaced unless the model carries positions.
    Line(usize),
    Grid {
        n1: usize,
        n2: usize,
    },
}

impl PointGeometry {
    pub fn grid(n1: usize, n2: usize) -> Result<Self> {
        if n1 < 2 || n2 < 2 {
            return Err(EssError::param(format!(
                "grid dimensions must be at least 2, got {n1}x{n2}"
            )));
        }
        Ok(PointGeometry::Grid { n1, n2 })
    }

    pub fn len(&self) -> usize {
        match *self {
            PointGeometry::Line(n) => n,
            PointGeometry::Grid { n1, n2 } => n1 * n2,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid coordinates of a linear index.
    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        match *self {
            PointGeometry::Line(_) => (idx, 0),
            PointGeometry::Grid { n2, .. } => (idx / n2, idx % n2),
        }
    }

    #[inline]
    pub fn linear_index(&self, i1: usize, i2: usize) -> usize {
        match *self {
            PointGeometry::Line(_) => i1,
            PointGeometry::Grid { n2, .. } => i1 * n2 + i2,
        }
    }
}

/// A correlation family together with its parameters.
///
/// For the Matérn kinds `rho = exp(-1/φ)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CorrelationModel {
    /// `ρ^|i-j|`
    Ar1 { rho: f64 },
    /// `1 - ρ|i-j|`
    Linear { rho: f64 },
    /// `1 / (1 + ρ|i-j|)`
    InverseLinear { rho: f64 },
    /// `ρ^|s_i - s_j|` on strictly increasing positions.
    Ar1Positions { rho: f64, positions: Arc<[f64]> },
    /// `ρ^d1` with L1 grid distance.
    MaternL1 { rho: f64 },
    /// `ρ^d2` with Euclidean grid distance.
    MaternL2Half { rho: f64 },
    /// `(1 - d2 ln ρ) ρ^d2`.
    MaternL2ThreeHalf { rho: f64 },
    /// `R = R1 ⊗ R2` of two 1D models on the grid axes.
    Kronecker(Box<CorrelationModel>, Box<CorrelationModel>),
}

/// Largest ρ accepted by the AR(1) closed forms.
pub const AR1_CLOSED_RHO_MAX: f64 = 0.999_999;

impl CorrelationModel {
    pub fn ar1(rho: f64) -> Self {
        CorrelationModel::Ar1 { rho }
    }

    pub fn linear(rho: f64) -> Self {
        CorrelationModel::Linear { rho }
    }

    pub fn inverse_linear(rho: f64) -> Self {
        CorrelationModel::InverseLinear { rho }
    }

    pub fn ar1_positions(rho: f64, positions: impl Into<Arc<[f64]>>) -> Self {
        CorrelationModel::Ar1Positions {
            rho,
            positions: positions.into(),
        }
    }

    /// Positions from consecutive gaps, starting at 0.
    pub fn ar1_gaps(rho: f64, gaps: &[f64]) -> Self {
        let mut positions = Vec::with_capacity(gaps.len() + 1);
        let mut s = 0.0;
        positions.push(s);
        for g in gaps {
            s += g;
            positions.push(s);
        }
        Self::ar1_positions(rho, positions)
    }

    pub fn matern_l1(rho: f64) -> Self {
        CorrelationModel::MaternL1 { rho }
    }

    pub fn matern_l2_half(rho: f64) -> Self {
        CorrelationModel::MaternL2Half { rho }
    }

    pub fn matern_l2_three_half(rho: f64) -> Self {
        CorrelationModel::MaternL2ThreeHalf { rho }
    }

    pub fn kronecker(a: CorrelationModel, b: CorrelationModel) -> Self {
        CorrelationModel::Kronecker(Box::new(a), Box::new(b))
    }

    /// `ρ = exp(-1/φ)` for a Matérn range parameter φ.
    pub fn rho_from_phi(phi: f64) -> f64 {
        (-1.0 / phi).exp()
    }

    /// `φ = -1 / ln ρ`. Only meaningful for `0 < ρ < 1`.
    pub fn phi(&self) -> Option<f64> {
        match self {
            CorrelationModel::MaternL1 { rho }
            | CorrelationModel::MaternL2Half { rho }
            | CorrelationModel::MaternL2ThreeHalf { rho } => Some(-1.0 / rho.ln()),
            _ => None,
        }
    }

    /// The correlation parameter; for a Kronecker model, that of the first factor.
    pub fn rho(&self) -> f64 {
        match self {
            CorrelationModel::Ar1 { rho }
            | CorrelationModel::Linear { rho }
            | CorrelationModel::InverseLinear { rho }
            | CorrelationModel::Ar1Positions { rho, .. }
            | CorrelationModel::MaternL1 { rho }
            | CorrelationModel::MaternL2Half { rho }
            | CorrelationModel::MaternL2ThreeHalf { rho } => *rho,
            CorrelationModel::Kronecker(a, _) => a.rho(),
        }
    }

    /// Same family with a new ρ. Kronecker models set ρ on both factors.
    pub fn with_rho(&self, rho: f64) -> Self {
        match self {
            CorrelationModel::Ar1 { .. } => Self::ar1(rho),
            CorrelationModel::Linear { .. } => Self::linear(rho),
            CorrelationModel::InverseLinear { .. } => Self::inverse_linear(rho),
            CorrelationModel::Ar1Positions { positions, .. } => CorrelationModel::Ar1Positions {
                rho,
                positions: positions.clone(),
            },
            CorrelationModel::MaternL1 { .. } => Self::matern_l1(rho),
            CorrelationModel::MaternL2Half { .. } => Self::matern_l2_half(rho),
            CorrelationModel::MaternL2ThreeHalf { .. } => Self::matern_l2_three_half(rho),
            CorrelationModel::Kronecker(a, b) => Self::kronecker(a.with_rho(rho), b.with_rho(rho)),
        }
    }

    pub fn is_one_dimensional(&self) -> bool {
        matches!(
            self,
            CorrelationModel::Ar1 { .. }
                | CorrelationModel::Linear { .. }
                | CorrelationModel::InverseLinear { .. }
                | CorrelationModel::Ar1Positions { .. }
        )
    }

    /// `r_ij` depends on `|i - j|` only.
    ///
    /// Positions count as stationary only when every gap is exactly 1; equal
    /// gaps of another length are not rescaled into ρ.
    pub fn is_stationary_1d(&self) -> bool {
        match self {
            CorrelationModel::Ar1 { .. }
            | CorrelationModel::Linear { .. }
            | CorrelationModel::InverseLinear { .. } => true,
            CorrelationModel::Ar1Positions { positions, .. } => {
                positions.windows(2).all(|w| w[1] - w[0] == 1.0)
            }
            _ => false,
        }
    }

    /// Entries depend on the two grid coordinate differences only.
    pub fn is_stationary_2d(&self) -> bool {
        match self {
            CorrelationModel::MaternL1 { .. }
            | CorrelationModel::MaternL2Half { .. }
            | CorrelationModel::MaternL2ThreeHalf { .. } => true,
            CorrelationModel::Kronecker(a, b) => a.is_stationary_1d() && b.is_stationary_1d(),
            _ => false,
        }
    }

    /// The two 1D factors when `R = R1 ⊗ R2`.
    pub fn as_kronecker(&self) -> Option<(CorrelationModel, CorrelationModel)> {
        match self {
            CorrelationModel::MaternL1 { rho } => Some((Self::ar1(*rho), Self::ar1(*rho))),
            CorrelationModel::Kronecker(a, b) => Some(((**a).clone(), (**b).clone())),
            _ => None,
        }
    }

    pub fn is_ar1(&self) -> bool {
        matches!(self, CorrelationModel::Ar1 { .. })
    }

    /// Checks parameter ranges and model/geometry compatibility.
    pub fn validate(&self, geom: &PointGeometry) -> Result<()> {
        match (self, geom) {
            (CorrelationModel::Kronecker(a, b), PointGeometry::Grid { n1, n2 }) => {
                if !a.is_one_dimensional() || !b.is_one_dimensional() {
                    return Err(EssError::param("Kronecker factors must be 1D models"));
                }
                a.validate(&PointGeometry::Line(*n1))?;
                b.validate(&PointGeometry::Line(*n2))
            }
            (m, PointGeometry::Line(n)) if m.is_one_dimensional() => {
                if *n == 0 {
                    return Err(EssError::param("at least one point is required"));
                }
                m.validate_rho(*n)?;
                if let CorrelationModel::Ar1Positions { positions, .. } = m {
                    if positions.len() != *n {
                        return Err(EssError::dims(format!(
                            "{} positions for {n} points",
                            positions.len()
                        )));
                    }
                    if positions.iter().any(|s| !s.is_finite()) {
                        return Err(EssError::param("positions must be finite"));
                    }
                    if positions.windows(2).any(|w| w[1] <= w[0]) {
                        return Err(EssError::param("positions must be strictly increasing"));
                    }
                }
                Ok(())
            }
            (m, PointGeometry::Grid { n1, n2 }) if !m.is_one_dimensional() => {
                if *n1 < 2 || *n2 < 2 {
                    return Err(EssError::param("grid dimensions must be at least 2"));
                }
                m.validate_rho(n1 * n2)
            }
            (m, g) => Err(EssError::param(format!(
                "model {} does not apply to geometry {g:?}",
                m.family_name()
            ))),
        }
    }

    /// ρ range check alone; `n` matters only for the linear model.
    pub fn validate_rho(&self, n: usize) -> Result<()> {
        let rho = self.rho();
        if !rho.is_finite() {
            return Err(EssError::param(format!("rho must be finite, got {rho}")));
        }
        match self {
            CorrelationModel::Ar1 { .. }
            | CorrelationModel::Ar1Positions { .. }
            | CorrelationModel::MaternL1 { .. }
            | CorrelationModel::MaternL2Half { .. }
            | CorrelationModel::MaternL2ThreeHalf { .. } => {
                if !(0.0..1.0).contains(&rho) {
                    return Err(EssError::param(format!(
                        "{} requires 0 <= rho < 1, got {rho}",
                        self.family_name()
                    )));
                }
            }
            CorrelationModel::Linear { .. } => {
                if rho < 0.0 {
                    return Err(EssError::param(format!(
                        "linear requires rho >= 0, got {rho}"
                    )));
                }
                if n > 1 {
                    let max = 1.0 / (n - 1) as f64;
                    if rho > max * (1.0 + 1e-12) {
                        return Err(EssError::param(format!(
                            "linear requires rho <= 1/(n-1) = {max} for n = {n}, got {rho}"
                        )));
                    }
                }
            }
            CorrelationModel::InverseLinear { .. } => {
                if rho < 0.0 {
                    return Err(EssError::param(format!(
                        "inverse linear requires rho >= 0, got {rho}"
                    )));
                }
            }
            CorrelationModel::Kronecker(a, b) => {
                a.validate_rho(n)?;
                b.validate_rho(n)?;
            }
        }
        Ok(())
    }

    /// Validated evaluator for this model on `geom`.
    pub fn kernel(&self, geom: &PointGeometry) -> Result<Kernel<'_>> {
        self.validate(geom)?;
        Ok(Kernel {
            form: KernelForm::of(self),
            geom: *geom,
        })
    }

    /// Family name as used in model spec strings (without parameters).
    pub fn family_name(&self) -> String {
        match self {
            CorrelationModel::Ar1 { .. } => "ar1".into(),
            CorrelationModel::Linear { .. } => "linear".into(),
            CorrelationModel::InverseLinear { .. } => "invlin".into(),
            CorrelationModel::Ar1Positions { .. } => "ar1pos".into(),
            CorrelationModel::MaternL1 { .. } => "matern-l1".into(),
            CorrelationModel::MaternL2Half { .. } => "matern-l2-0.5".into(),
            CorrelationModel::MaternL2ThreeHalf { .. } => "matern-l2-1.5".into(),
            CorrelationModel::Kronecker(a, b) => {
                format!("kron:({})x({})", a.family_name(), b.family_name())
            }
        }
    }

    /// Parses a model spec string such as `ar1:rho=0.6` or
    /// `kron:(ar1:rho=0.5)x(linear:rho=0.1)`.
    pub fn parse(spec: &str) -> Result<Self> {
        parse_spec(spec.trim(), true)
    }

    /// Like [`parse`](Self::parse) but `rho` may be omitted (defaults to 0);
    /// used where ρ comes from a grid.
    pub fn parse_family(spec: &str) -> Result<Self> {
        parse_spec(spec.trim(), false)
    }
}

impl fmt::Display for CorrelationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorrelationModel::Kronecker(a, b) => write!(f, "kron:({a})x({b})"),
            CorrelationModel::Ar1Positions { rho, positions } => {
                write!(f, "ar1pos:rho={rho},positions=<{} points>", positions.len())
            }
            m => write!(f, "{}:rho={}", m.family_name(), m.rho()),
        }
    }
}

fn parse_spec(spec: &str, require_rho: bool) -> Result<CorrelationModel> {
    let (family, params) = match spec.split_once(':') {
        Some((f, p)) => (f.trim(), p.trim()),
        None => (spec, ""),
    };
    if family == "kron" {
        let (a, rest) = take_parenthesized(params)?;
        let rest = rest.trim_start().strip_prefix('x').ok_or_else(|| {
            EssError::Parse(format!("expected 'x' between kron factors in {spec:?}"))
        })?;
        let (b, rest) = take_parenthesized(rest.trim_start())?;
        if !rest.trim().is_empty() {
            return Err(EssError::Parse(format!(
                "trailing input after kron factors: {rest:?}"
            )));
        }
        let a = parse_spec(a.trim(), require_rho)?;
        let b = parse_spec(b.trim(), require_rho)?;
        if !a.is_one_dimensional() || !b.is_one_dimensional() {
            return Err(EssError::Parse("kron factors must be 1D models".into()));
        }
        return Ok(CorrelationModel::kronecker(a, b));
    }

    let mut rho = None;
    let mut positions_file = None;
    for kv in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| EssError::Parse(format!("expected key=value, got {kv:?}")))?;
        match k.trim() {
            "rho" => {
                let r: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| EssError::Parse(format!("invalid rho {v:?}")))?;
                rho = Some(r);
            }
            "positions" => positions_file = Some(v.trim().to_string()),
            other => {
                return Err(EssError::Parse(format!(
                    "unknown model parameter {other:?}"
                )))
            }
        }
    }
    let rho = match rho {
        Some(r) => r,
        None if require_rho => {
            return Err(EssError::Parse(format!(
                "model spec {spec:?} is missing rho"
            )))
        }
        None => 0.0,
    };
    if positions_file.is_some() && family != "ar1pos" {
        return Err(EssError::Parse(format!("positions given for {family}")));
    }
    let model = match family {
        "ar1" => CorrelationModel::ar1(rho),
        "linear" => CorrelationModel::linear(rho),
        "invlin" => CorrelationModel::inverse_linear(rho),
        "matern-l1" => CorrelationModel::matern_l1(rho),
        "matern-l2-0.5" => CorrelationModel::matern_l2_half(rho),
        "matern-l2-1.5" => CorrelationModel::matern_l2_three_half(rho),
        "ar1pos" => {
            let file = positions_file
                .ok_or_else(|| EssError::Parse("ar1pos requires positions=FILE".into()))?;
            CorrelationModel::ar1_positions(rho, read_positions(file)?)
        }
        other => return Err(EssError::Parse(format!("unknown model family {other:?}"))),
    };
    // n-independent range checks happen here; linear's upper bound needs n.
    model.validate_rho(1)?;
    Ok(model)
}

fn take_parenthesized(s: &str) -> Result<(&str, &str)> {
    let body = s
        .strip_prefix('(')
        .ok_or_else(|| EssError::Parse(format!("expected '(' in {s:?}")))?;
    let mut depth = 1usize;
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Ok((&body[..i], &body[i + 1..]));
                }
            }
            _ => {}
        }
    }
    Err(EssError::Parse(format!("unbalanced parentheses in {s:?}")))
}

/// Reads one ascending float per line; blank lines are skipped.
pub fn read_positions(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            EssError::Parse(format!("line {}: invalid number {line:?}", lineno + 1))
        })?;
        out.push(v);
    }
    if out.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EssError::Parse(
            "positions must be strictly increasing".into(),
        ));
    }
    Ok(out)
}

/// `ρ^d` as `exp(d ln ρ)` with `0^0 = 1`.
#[inline]
fn pow_rho(log_rho: f64, d: f64) -> f64 {
    if d == 0.0 {
        1.0
    } else {
        (d * log_rho).exp()
    }
}

#[derive(Debug, Clone)]
enum KernelForm<'a> {
    Ar1 { log_rho: f64 },
    Linear { rho: f64 },
    InverseLinear { rho: f64 },
    Ar1Positions { log_rho: f64, positions: &'a [f64] },
    MaternL1 { log_rho: f64 },
    MaternL2Half { log_rho: f64 },
    MaternL2ThreeHalf { log_rho: f64 },
    Kronecker(Box<KernelForm<'a>>, Box<KernelForm<'a>>),
}

impl<'a> KernelForm<'a> {
    fn of(model: &'a CorrelationModel) -> Self {
        match model {
            CorrelationModel::Ar1 { rho } => KernelForm::Ar1 { log_rho: rho.ln() },
            CorrelationModel::Linear { rho } => KernelForm::Linear { rho: *rho },
            CorrelationModel::InverseLinear { rho } => KernelForm::InverseLinear { rho: *rho },
            CorrelationModel::Ar1Positions { rho, positions } => KernelForm::Ar1Positions {
                log_rho: rho.ln(),
                positions,
            },
            CorrelationModel::MaternL1 { rho } => KernelForm::MaternL1 { log_rho: rho.ln() },
            CorrelationModel::MaternL2Half { rho } => {
                KernelForm::MaternL2Half { log_rho: rho.ln() }
            }
            CorrelationModel::MaternL2ThreeHalf { rho } => {
                KernelForm::MaternL2ThreeHalf { log_rho: rho.ln() }
            }
            CorrelationModel::Kronecker(a, b) => {
                KernelForm::Kronecker(Box::new(Self::of(a)), Box::new(Self::of(b)))
            }
        }
    }

    #[inline]
    fn lag(&self, k: usize) -> f64 {
        let d = k as f64;
        match *self {
            KernelForm::Ar1 { log_rho } | KernelForm::Ar1Positions { log_rho, .. } => {
                pow_rho(log_rho, d)
            }
            KernelForm::Linear { rho } => 1.0 - rho * d,
            KernelForm::InverseLinear { rho } => 1.0 / (1.0 + rho * d),
            _ => unreachable!("lag() on a 2D kernel"),
        }
    }

    #[inline]
    fn pair_1d(&self, i: usize, j: usize) -> f64 {
        match *self {
            KernelForm::Ar1Positions { log_rho, positions } => {
                if i == j {
                    1.0
                } else {
                    pow_rho(log_rho, (positions[i] - positions[j]).abs())
                }
            }
            _ => self.lag(i.abs_diff(j)),
        }
    }

    #[inline]
    fn offset(&self, d1: i64, d2: i64) -> f64 {
        let (a1, a2) = (d1.unsigned_abs() as usize, d2.unsigned_abs() as usize);
        match self {
            KernelForm::MaternL1 { log_rho } => pow_rho(*log_rho, (a1 + a2) as f64),
            KernelForm::MaternL2Half { log_rho } => {
                pow_rho(*log_rho, ((a1 * a1 + a2 * a2) as f64).sqrt())
            }
            KernelForm::MaternL2ThreeHalf { log_rho } => {
                if a1 == 0 && a2 == 0 {
                    1.0
                } else if *log_rho == f64::NEG_INFINITY {
                    0.0
                } else {
                    let d = ((a1 * a1 + a2 * a2) as f64).sqrt();
                    (1.0 - d * log_rho) * (d * log_rho).exp()
                }
            }
            KernelForm::Kronecker(a, b) => a.lag(a1) * b.lag(a2),
            _ => unreachable!("offset() on a 1D kernel"),
        }
    }
}

/// Validated entry evaluator. Index arguments are 0-based and unchecked
/// beyond debug assertions; use [`entry`] for checked access.
#[derive(Debug, Clone)]
pub struct Kernel<'a> {
    form: KernelForm<'a>,
    geom: PointGeometry,
}

impl Kernel<'_> {
    pub fn geometry(&self) -> PointGeometry {
        self.geom
    }

    pub fn len(&self) -> usize {
        self.geom.len()
    }

    pub fn is_empty(&self) -> bool {
        self.geom.is_empty()
    }

    /// `r_ij`.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.len() && j < self.len());
        match self.geom {
            PointGeometry::Line(_) => self.form.pair_1d(i, j),
            PointGeometry::Grid { n2, .. } => {
                let (i1, i2) = (i / n2, i % n2);
                let (j1, j2) = (j / n2, j % n2);
                match &self.form {
                    KernelForm::Kronecker(a, b) => a.pair_1d(i1, j1) * b.pair_1d(i2, j2),
                    f => f.offset(i1 as i64 - j1 as i64, i2 as i64 - j2 as i64),
                }
            }
        }
    }

    /// `r_k` for a stationary 1D kernel.
    #[inline]
    pub fn lag(&self, k: usize) -> f64 {
        self.form.lag(k)
    }

    /// Entry at coordinate difference `(d1, d2)` for a stationary 2D kernel.
    #[inline]
    pub fn offset(&self, d1: i64, d2: i64) -> f64 {
        self.form.offset(d1, d2)
    }
}

/// Checked `r_ij` with 0-based indices.
pub fn entry(model: &CorrelationModel, geom: &PointGeometry, i: usize, j: usize) -> Result<f64> {
    let n = geom.len();
    if i >= n || j >= n {
        return Err(EssError::IndexOutOfRange { i, j, n });
    }
    Ok(model.kernel(geom)?.at(i, j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ar1_power() {
        let r = entry(&CorrelationModel::ar1(0.5), &PointGeometry::Line(5), 1, 3).unwrap();
        assert!((r - 0.25).abs() < 1e-15);
    }

    #[test]
    fn linear_endpoint_vanishes_at_max_rho() {
        let n = 30;
        let m = CorrelationModel::linear(1.0 / (n - 1) as f64);
        let r = entry(&m, &PointGeometry::Line(n), 0, n - 1).unwrap();
        assert!(r.abs() < 1e-15);
    }

    #[test]
    fn matern_three_half_diagonal() {
        let g = PointGeometry::grid(4, 4).unwrap();
        let m = CorrelationModel::matern_l2_three_half(0.5);
        assert_eq!(entry(&m, &g, 5, 5).unwrap(), 1.0);
    }

    #[test]
    fn matern_l1_grid_distance() {
        // (1,1) and (2,3) in 1-based coordinates: d1 = 1 + 2 = 3
        let g = PointGeometry::grid(4, 4).unwrap();
        let i = g.linear_index(0, 0);
        let j = g.linear_index(1, 2);
        let r = entry(&CorrelationModel::matern_l1(0.6), &g, i, j).unwrap();
        assert!((r - 0.216).abs() < 1e-14);
    }

    #[test]
    fn rho_zero_gives_identity() {
        let g = PointGeometry::grid(3, 3).unwrap();
        for m in [
            CorrelationModel::matern_l1(0.0),
            CorrelationModel::matern_l2_half(0.0),
            CorrelationModel::matern_l2_three_half(0.0),
        ] {
            let k = m.kernel(&g).unwrap();
            for i in 0..9 {
                for j in 0..9 {
                    assert_eq!(k.at(i, j), if i == j { 1.0 } else { 0.0 });
                }
            }
        }
        let m = CorrelationModel::ar1(0.0);
        let k = m.kernel(&PointGeometry::Line(4)).unwrap();
        assert_eq!(k.at(2, 2), 1.0);
        assert_eq!(k.at(1, 2), 0.0);
    }

    #[test]
    fn stationarity_flags() {
        assert!(CorrelationModel::ar1(0.3).is_stationary_1d());
        assert!(CorrelationModel::linear(0.01).is_stationary_1d());
        let mut gaps = vec![0.8; 30];
        gaps.extend(vec![1.0; 10]);
        assert!(!CorrelationModel::ar1_gaps(0.5, &gaps).is_stationary_1d());
        assert!(CorrelationModel::ar1_gaps(0.5, &[1.0; 9]).is_stationary_1d());
        assert!(!CorrelationModel::ar1_gaps(0.5, &[2.0; 9]).is_stationary_1d());

        assert!(CorrelationModel::matern_l2_half(0.7).is_stationary_2d());
        assert!(CorrelationModel::matern_l1(0.7).is_stationary_2d());
        let k = CorrelationModel::kronecker(CorrelationModel::ar1(0.2), CorrelationModel::ar1(0.3));
        assert!(k.is_stationary_2d());
        assert!(!CorrelationModel::ar1(0.3).is_stationary_2d());
    }

    #[test]
    fn kronecker_factors() {
        let (a, b) = CorrelationModel::matern_l1(0.7).as_kronecker().unwrap();
        assert_eq!(a, CorrelationModel::ar1(0.7));
        assert_eq!(b, CorrelationModel::ar1(0.7));
        assert!(CorrelationModel::matern_l2_half(0.7)
            .as_kronecker()
            .is_none());
        let k = CorrelationModel::kronecker(
            CorrelationModel::linear(0.1),
            CorrelationModel::inverse_linear(0.4),
        );
        let (a, b) = k.as_kronecker().unwrap();
        assert_eq!(a, CorrelationModel::linear(0.1));
        assert_eq!(b, CorrelationModel::inverse_linear(0.4));
    }

    #[test]
    fn range_errors() {
        let line = PointGeometry::Line(10);
        assert!(CorrelationModel::ar1(1.0).validate(&line).is_err());
        assert!(CorrelationModel::ar1(-0.1).validate(&line).is_err());
        assert!(CorrelationModel::linear(0.2).validate(&line).is_err());
        assert!(CorrelationModel::linear(1.0 / 9.0).validate(&line).is_ok());
        assert!(CorrelationModel::inverse_linear(-1.0)
            .validate(&line)
            .is_err());
        assert!(CorrelationModel::matern_l1(0.5).validate(&line).is_err());
        assert!(CorrelationModel::ar1(0.5)
            .validate(&PointGeometry::Grid { n1: 3, n2: 3 })
            .is_err());
        assert!(matches!(
            entry(&CorrelationModel::ar1(0.5), &line, 10, 0),
            Err(EssError::IndexOutOfRange { .. })
        ));
        let bad = CorrelationModel::ar1_positions(0.5, vec![0.0, 1.0, 1.0]);
        assert!(bad.validate(&PointGeometry::Line(3)).is_err());
        let short = CorrelationModel::ar1_positions(0.5, vec![0.0, 1.0]);
        assert!(short.validate(&PointGeometry::Line(3)).is_err());
    }

    #[test]
    fn phi_roundtrip() {
        let rho = CorrelationModel::rho_from_phi(2.5);
        let m = CorrelationModel::matern_l2_half(rho);
        assert!((m.phi().unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn parse_specs() {
        assert_eq!(
            CorrelationModel::parse("ar1:rho=0.6").unwrap(),
            CorrelationModel::ar1(0.6)
        );
        assert_eq!(
            CorrelationModel::parse("matern-l2-1.5:rho=0.3").unwrap(),
            CorrelationModel::matern_l2_three_half(0.3)
        );
        assert_eq!(
            CorrelationModel::parse("kron:(ar1:rho=0.5)x(invlin:rho=2)").unwrap(),
            CorrelationModel::kronecker(
                CorrelationModel::ar1(0.5),
                CorrelationModel::inverse_linear(2.0)
            )
        );
        assert!(CorrelationModel::parse("ar1:rho=1.5").is_err());
        assert!(CorrelationModel::parse("ar1").is_err());
        assert_eq!(
            CorrelationModel::parse_family("linear").unwrap(),
            CorrelationModel::linear(0.0)
        );
        assert!(CorrelationModel::parse("bogus:rho=0.1").is_err());
        assert!(CorrelationModel::parse("kron:(matern-l1:rho=0.5)x(ar1:rho=0.5)").is_err());
        assert!(CorrelationModel::parse("kron:(ar1:rho=0.5)(ar1:rho=0.5)").is_err());
    }

    #[test]
    fn parse_positions_file() {
        let dir = std::env::temp_dir().join(format!("blockess-pos-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("pos.txt");
        std::fs::write(&path, "0\n0.5\n\n1.7\n").unwrap();
        let m = CorrelationModel::parse(&format!("ar1pos:rho=0.5,positions={}", path.display()))
            .unwrap();
        match &m {
            CorrelationModel::Ar1Positions { positions, .. } => {
                assert_eq!(&positions[..], &[0.0, 0.5, 1.7])
            }
            _ => panic!("wrong kind"),
        }
        let r = entry(&m, &PointGeometry::Line(3), 0, 2).unwrap();
        assert!((r - 0.5f64.powf(1.7)).abs() < 1e-14);
    }
}
