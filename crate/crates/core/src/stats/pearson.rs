use serde::Serialize;
use statrs::function::beta::beta_reg;

use crate::encoding::Condition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum PearsonError {
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 pairs, got {0}")]
    TooFew(usize),
    #[error("{0} has zero variance")]
    ZeroVariance(Side),
    #[error("non-finite value in input")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    X,
    Y,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::X => "x",
            Side::Y => "y",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation {
    pub r: f64,
    /// Two-tailed.
    pub p: f64,
    pub n: usize,
}

/// Product-moment correlation with a two-tailed t-test p-value.
///
/// With `ν = n − 2` and `t² = ν r² / (1 − r²)`, the two-tailed tail mass is
/// `I_{ν/(ν+t²)}(ν/2, 1/2) = I_{1−r²}(ν/2, 1/2)`.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation, PearsonError> {
    if x.len() != y.len() {
        return Err(PearsonError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(PearsonError::TooFew(n));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(PearsonError::NonFinite);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(PearsonError::ZeroVariance(Side::X));
    }
    if syy == 0.0 {
        return Err(PearsonError::ZeroVariance(Side::Y));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    Ok(Correlation { r, p: t_test_p(r, n), n })
}

/// Two-tailed p for correlation `r` on `n` pairs.
pub fn t_test_p(r: f64, n: usize) -> f64 {
    let one_minus_r2 = (1.0 - r) * (1.0 + r);
    if one_minus_r2 <= 0.0 {
        return 0.0;
    }
    let nu = (n - 2) as f64;
    beta_reg(nu / 2.0, 0.5, one_minus_r2.min(1.0)).clamp(0.0, 1.0)
}

/// One stage-1 cell. `r` and `p` are absent when the correlation is
/// undefined (a constant column, or fewer than three usable rows).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub condition: Condition,
    pub r: Option<f64>,
    pub p: Option<f64>,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CorrelationResult {
    pub fn compute(condition: Condition, x: &[f64], y: &[f64]) -> Self {
        match pearson(x, y) {
            Ok(c) => CorrelationResult { condition, r: Some(c.r), p: Some(c.p), n: c.n, note: None },
            Err(e) => {
                let note = match e {
                    PearsonError::ZeroVariance(Side::X) => "condition is constant".to_string(),
                    PearsonError::ZeroVariance(Side::Y) => "response is constant".to_string(),
                    e => e.to_string(),
                };
                CorrelationResult { condition, r: None, p: None, n: x.len(), note: Some(note) }
            }
        }
    }

    /// A fixture cell with a known coefficient.
    pub fn from_r(condition: Condition, r: f64, n: usize) -> Self {
        CorrelationResult { condition, r: Some(r), p: (n >= 3).then(|| t_test_p(r, n)), n, note: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Screening {
    pub threshold: f64,
    pub retained: Vec<CorrelationResult>,
    /// Includes conditions whose correlation is undefined.
    pub eliminated: Vec<CorrelationResult>,
}

impl Screening {
    pub fn retained_conditions(&self) -> Vec<Condition> {
        self.retained.iter().map(|c| c.condition).collect()
    }

    pub fn eliminated_conditions(&self) -> Vec<Condition> {
        self.eliminated.iter().map(|c| c.condition).collect()
    }
}

/// Keeps conditions with `|r| >= threshold`, in input order.
pub fn screen_conditions(results: &[CorrelationResult], threshold: f64) -> Screening {
    let (retained, eliminated) =
        results.iter().cloned().partition(|c| c.r.is_some_and(|r| r.abs() >= threshold));
    Screening { threshold, retained, eliminated }
}
