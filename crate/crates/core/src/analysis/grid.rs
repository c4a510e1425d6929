use crate::corrmodel::CorrelationModel;
use crate::error::{EssError, Result};

/// Strictly increasing list of correlation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoGrid(Vec<f64>);

/// Rounds away accumulated step error, e.g. `0.1 + 2*0.1`.
fn tidy(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

impl RhoGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(EssError::param("rho grid values must be finite"));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(EssError::param("rho grid must be strictly increasing"));
        }
        Ok(RhoGrid(values))
    }

    /// `0.001, 0.002, ..., 0.999`.
    pub fn fine() -> Self {
        RhoGrid((1..=999).map(|k| k as f64 / 1000.0).collect())
    }

    /// `0.1, 0.2, ..., 0.9`.
    pub fn deciles() -> Self {
        RhoGrid((1..=9).map(|k| k as f64 / 10.0).collect())
    }

    /// `ρ = x / (n - 1)` for each `x`, the parametrization of the linear model.
    pub fn linear_scaled(n: usize, xs: &[f64]) -> Result<Self> {
        if n < 2 {
            return Err(EssError::param("scaled linear grid needs n >= 2"));
        }
        Self::new(xs.iter().map(|x| x / (n - 1) as f64).collect())
    }

    /// Parses `a:b:step`, inclusive of `b` up to rounding.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
        let [a, b, step] = parts.as_slice() else {
            return Err(EssError::Parse(format!(
                "rho grid {spec:?} is not a:b:step"
            )));
        };
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| EssError::Parse(format!("invalid number {s:?} in rho grid")))
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !(step > 0.0) || b < a {
            return Err(EssError::Parse(format!(
                "rho grid {spec:?} needs step > 0 and a <= b"
            )));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize;
        Self::new((0..=count).map(|k| tidy(a + k as f64 * step)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks every value against the model's parameter range for `n` points.
    pub fn validate_for(&self, family: &CorrelationModel, n: usize) -> Result<()> {
        self.0
            .iter()
            .try_for_each(|&rho| family.with_rho(rho).validate_rho(n))
    }
}
