//! Negative binomial (NB2) regression with a log link.
//!
//! Variance is `μ + αμ²`. β is updated by Newton steps on the observed
//! information with step halving; α by golden-section search over `log α`
//! with β held fixed. Both updates are only taken when the log-likelihood
//! does not drop, so the recorded history is monotone.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::encoding::DesignMatrix;

pub const INTERCEPT: &str = "(intercept)";

const RANK_TOL: f64 = 1e-9;
const MAX_HALVINGS: usize = 50;
const GOLDEN_TOL: f64 = 1e-9;
/// Relative difference below which two log-likelihoods count as equal.
pub const LL_ROUNDING: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "alpha")]
pub enum Dispersion {
    Estimate,
    /// `Fixed(0.0)` is a Poisson GLM.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NbrOptions {
    pub dispersion: Dispersion,
    pub max_iter: usize,
    pub ll_tol: f64,
    pub grad_tol: f64,
    pub alpha_start: f64,
    pub alpha_bounds: (f64, f64),
}

impl Default for NbrOptions {
    fn default() -> Self {
        NbrOptions {
            dispersion: Dispersion::Estimate,
            max_iter: 100,
            ll_tol: 1e-10,
            grad_tol: 1e-8,
            alpha_start: 1.0,
            alpha_bounds: (1e-8, 1e4),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NbrError {
    #[error("{what} has {found} rows, expected {expected}")]
    LengthMismatch { what: &'static str, expected: usize, found: usize },
    #[error("no observations")]
    Empty,
    #[error("row {row}: non-finite value")]
    NonFinite { row: usize },
    #[error("row {row}: exposure must be positive")]
    NonPositiveExposure { row: usize },
    #[error("row {row}: count {count} exceeds exposure {exposure}")]
    CountExceedsExposure { row: usize, count: u64, exposure: f64 },
    #[error("design is rank deficient; collinear columns: {}", .0.join(", "))]
    RankDeficient(Vec<String>),
    #[error("every response is zero, so the intercept diverges")]
    AllZeroResponse,
    #[error("fixed dispersion must be finite and non-negative")]
    InvalidAlpha,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub beta: Option<f64>,
    pub se: Option<f64>,
    pub z: Option<f64>,
    /// Two-tailed Wald p.
    pub p: Option<f64>,
    pub exp_beta: Option<f64>,
    /// Collapsed coefficient: no estimate is reported.
    pub near_zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Coefficient {
    fn collapsed(name: String, note: impl Into<String>) -> Self {
        Coefficient {
            name,
            beta: None,
            se: None,
            z: None,
            p: None,
            exp_beta: None,
            near_zero: true,
            note: Some(note.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NbrFit {
    /// Intercept first, then predictors in input order.
    pub coefficients: Vec<Coefficient>,
    pub alpha: f64,
    pub log_likelihood: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Log-likelihood after the start and after every iteration.
    pub ll_history: Vec<f64>,
    /// Norm of the β score at the returned estimate.
    pub gradient_norm: f64,
    pub n_obs: usize,
}

impl NbrFit {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    /// Estimates from a fit that did not converge are advisory only.
    pub fn advisory(&self) -> bool {
        !self.converged
    }
}

/// Fits counts on a design matrix. With `exposure`, `log(exposure)` enters
/// as an offset so the fitted mean is a rate per unit of exposure.
pub fn fit_nbr(
    design: &DesignMatrix,
    counts: &[u64],
    exposure: Option<&[f64]>,
    options: &NbrOptions,
) -> Result<NbrFit, NbrError> {
    let n = design.n_rows();
    let offset = match exposure {
        None => None,
        Some(e) => {
            if e.len() != n {
                return Err(NbrError::LengthMismatch { what: "exposure", expected: n, found: e.len() });
            }
            for (row, (&ex, &y)) in e.iter().zip(counts).enumerate() {
                if !ex.is_finite() {
                    return Err(NbrError::NonFinite { row });
                }
                if ex <= 0.0 {
                    return Err(NbrError::NonPositiveExposure { row });
                }
                if y as f64 > ex {
                    return Err(NbrError::CountExceedsExposure { row, count: y, exposure: ex });
                }
            }
            Some(e.iter().map(|v| v.ln()).collect::<Vec<_>>())
        }
    };
    let names: Vec<String> = design.columns.iter().map(|c| c.to_string()).collect();
    fit_nbr_raw(&names, &design.values, counts, offset.as_deref(), options)
}

/// Fits on raw rows. An intercept is always added; `offset` is added to the
/// linear predictor as is.
pub fn fit_nbr_raw(
    names: &[String],
    rows: &[Vec<f64>],
    y: &[u64],
    offset: Option<&[f64]>,
    options: &NbrOptions,
) -> Result<NbrFit, NbrError> {
    let n = rows.len();
    if n == 0 {
        return Err(NbrError::Empty);
    }
    if y.len() != n {
        return Err(NbrError::LengthMismatch { what: "response", expected: n, found: y.len() });
    }
    if let Some(o) = offset {
        if o.len() != n {
            return Err(NbrError::LengthMismatch { what: "offset", expected: n, found: o.len() });
        }
    }
    for (row, r) in rows.iter().enumerate() {
        if r.len() != names.len() {
            return Err(NbrError::LengthMismatch { what: "design row", expected: names.len(), found: r.len() });
        }
        if r.iter().any(|v| !v.is_finite()) || offset.is_some_and(|o| !o[row].is_finite()) {
            return Err(NbrError::NonFinite { row });
        }
    }
    if let Dispersion::Fixed(a) = options.dispersion {
        if !a.is_finite() || a < 0.0 {
            return Err(NbrError::InvalidAlpha);
        }
    }
    if y.iter().all(|&v| v == 0) {
        return Err(NbrError::AllZeroResponse);
    }

    // Columns that cannot be estimated are reported, not fitted.
    let mut slots: Vec<Result<usize, String>> = Vec::with_capacity(names.len());
    let mut kept = Vec::new();
    for j in 0..names.len() {
        match collapse_reason(rows, y, j) {
            Some(reason) => slots.push(Err(reason)),
            None => {
                slots.push(Ok(kept.len() + 1));
                kept.push(j);
            }
        }
    }

    let p = kept.len() + 1;
    let x = DMatrix::from_fn(n, p, |i, j| if j == 0 { 1.0 } else { rows[i][kept[j - 1]] });
    let mut col_names = vec![INTERCEPT.to_string()];
    col_names.extend(kept.iter().map(|&j| names[j].clone()));
    let dependent = dependent_columns(&x);
    if !dependent.is_empty() {
        return Err(NbrError::RankDeficient(dependent.into_iter().map(|j| col_names[j].clone()).collect()));
    }

    let problem = Problem::new(x, y, offset.map(|o| o.to_vec()).unwrap_or_else(|| vec![0.0; n]));
    let state = problem.fit(options);

    let info = problem.information(&state.beta, state.alpha);
    let cov = info.clone().cholesky().map(|c| c.inverse()).or_else(|| info.try_inverse());
    let coef = |k: usize, name: String| {
        let beta = state.beta[k];
        let se = cov.as_ref().map(|c| c[(k, k)].sqrt()).filter(|s| s.is_finite() && *s > 0.0);
        match se {
            Some(se) if beta.is_finite() => {
                let z = beta / se;
                Coefficient {
                    name,
                    beta: Some(beta),
                    se: Some(se),
                    z: Some(z),
                    p: Some(erfc(z.abs() / std::f64::consts::SQRT_2)),
                    exp_beta: Some(beta.exp()),
                    near_zero: false,
                    note: None,
                }
            }
            _ => Coefficient::collapsed(name, "standard error is not finite"),
        }
    };
    let mut coefficients = vec![coef(0, INTERCEPT.to_string())];
    for (j, slot) in slots.into_iter().enumerate() {
        coefficients.push(match slot {
            Ok(k) => coef(k, names[j].clone()),
            Err(reason) => Coefficient::collapsed(names[j].clone(), reason),
        });
    }
    Ok(NbrFit {
        coefficients,
        alpha: state.alpha,
        log_likelihood: state.ll,
        converged: state.converged,
        iterations: state.iterations,
        ll_history: state.history,
        gradient_norm: state.grad_norm,
        n_obs: n,
    })
}

/// Constant columns and two-level columns with no events at one level have
/// no finite maximum likelihood estimate.
fn collapse_reason(rows: &[Vec<f64>], y: &[u64], j: usize) -> Option<String> {
    let first = rows[0][j];
    let Some(other) = rows.iter().map(|r| r[j]).find(|&v| v != first) else {
        return Some(format!("constant column ({first})"));
    };
    if rows.iter().any(|r| r[j] != first && r[j] != other) {
        return None;
    }
    for level in [first, other] {
        let events: u64 = rows.iter().zip(y).filter(|(r, _)| r[j] == level).map(|(_, &c)| c).sum();
        if events == 0 {
            return Some(format!("no events where the column equals {level}"));
        }
    }
    None
}

/// Indices of columns that lie in the span of earlier columns.
fn dependent_columns(x: &DMatrix<f64>) -> Vec<usize> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut out = Vec::new();
    for j in 0..x.ncols() {
        let col = x.column(j).into_owned();
        let norm = col.norm();
        if norm == 0.0 {
            out.push(j);
            continue;
        }
        let mut v = col / norm;
        for b in &basis {
            let d = b.dot(&v);
            v -= b * d;
        }
        let r = v.norm();
        if r < RANK_TOL {
            out.push(j);
        } else {
            basis.push(v / r);
        }
    }
    out
}

struct Problem {
    x: DMatrix<f64>,
    y: DVector<f64>,
    offset: DVector<f64>,
    /// `exceed[k]` = number of responses greater than `k`.
    exceed: Vec<u32>,
    ln_y_factorial: f64,
}

struct State {
    beta: DVector<f64>,
    alpha: f64,
    ll: f64,
    history: Vec<f64>,
    iterations: usize,
    converged: bool,
    grad_norm: f64,
}

impl Problem {
    fn new(x: DMatrix<f64>, y: &[u64], offset: Vec<f64>) -> Self {
        let max = y.iter().copied().max().unwrap_or(0) as usize;
        let mut hist = vec![0u32; max + 1];
        for &v in y {
            hist[v as usize] += 1;
        }
        let mut exceed = vec![0u32; max];
        let mut above = y.len() as u32;
        for (k, slot) in exceed.iter_mut().enumerate() {
            above -= hist[k];
            *slot = above;
        }
        Problem {
            x,
            y: DVector::from_iterator(y.len(), y.iter().map(|&v| v as f64)),
            offset: DVector::from_vec(offset),
            exceed,
            ln_y_factorial: y.iter().map(|&v| ln_gamma(v as f64 + 1.0)).sum(),
        }
    }

    fn eta(&self, beta: &DVector<f64>) -> DVector<f64> {
        &self.x * beta + &self.offset
    }

    /// `Σ_i Σ_{k<y_i} ln(1 + αk)`, the α-dependent part of
    /// `lnΓ(y + 1/α) − lnΓ(1/α) − y ln α`.
    fn count_term(&self, alpha: f64) -> f64 {
        if alpha == 0.0 {
            return 0.0;
        }
        self.exceed.iter().enumerate().skip(1).map(|(k, &c)| c as f64 * (alpha * k as f64).ln_1p()).sum()
    }

    fn log_likelihood(&self, beta: &DVector<f64>, alpha: f64) -> f64 {
        let eta = self.eta(beta);
        let mut ll = self.count_term(alpha) - self.ln_y_factorial;
        for (e, y) in eta.iter().zip(self.y.iter()) {
            let mu = e.exp();
            ll += if alpha == 0.0 { y * e - mu } else { y * e - (y + 1.0 / alpha) * (alpha * mu).ln_1p() };
        }
        if ll.is_nan() {
            f64::NEG_INFINITY
        } else {
            ll
        }
    }

    fn score(&self, beta: &DVector<f64>, alpha: f64) -> DVector<f64> {
        let eta = self.eta(beta);
        let s = DVector::from_iterator(
            eta.len(),
            eta.iter().zip(self.y.iter()).map(|(e, y)| {
                let mu = e.exp();
                (y - mu) / (1.0 + alpha * mu)
            }),
        );
        self.x.tr_mul(&s)
    }

    /// Observed information for β at fixed α.
    fn information(&self, beta: &DVector<f64>, alpha: f64) -> DMatrix<f64> {
        let eta = self.eta(beta);
        let w = eta.iter().zip(self.y.iter()).map(|(e, y)| {
            let mu = e.exp();
            mu * (1.0 + alpha * y) / (1.0 + alpha * mu).powi(2)
        });
        let mut xw = self.x.clone();
        for (i, wi) in w.enumerate() {
            xw.row_mut(i).scale_mut(wi);
        }
        self.x.tr_mul(&xw)
    }

    /// One damped Newton step on β. Returns the new log-likelihood.
    fn newton_step(&self, beta: &mut DVector<f64>, alpha: f64, ll: f64) -> f64 {
        let g = self.score(beta, alpha);
        let g_norm = g.norm();
        let h = self.information(beta, alpha);
        let delta = match h.clone().cholesky() {
            Some(c) => c.solve(&g),
            None => match h.lu().solve(&g) {
                Some(d) => d,
                None => g * 1e-3,
            },
        };
        let mut t = 1.0;
        for _ in 0..MAX_HALVINGS {
            let cand = &*beta + &delta * t;
            let cand_ll = self.log_likelihood(&cand, alpha);
            if cand_ll >= ll {
                *beta = cand;
                return cand_ll;
            }
            // Close to the optimum the gain is below the resolution of ll, so
            // a full step that ties ll and shrinks the score is still taken.
            if t == 1.0 && ll - cand_ll <= LL_ROUNDING * ll.abs().max(1.0) && self.score(&cand, alpha).norm() < g_norm {
                *beta = cand;
                return cand_ll;
            }
            t *= 0.5;
        }
        ll
    }

    /// Golden-section maximisation of the log-likelihood over `log α`.
    fn best_alpha(&self, beta: &DVector<f64>, (lo, hi): (f64, f64)) -> (f64, f64) {
        let f = |u: f64| self.log_likelihood(beta, u.exp());
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo.ln(), hi.ln());
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        while b - a > GOLDEN_TOL {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = f(d);
            }
        }
        let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
        for u in [lo.ln(), hi.ln()] {
            let v = f(u);
            if v > best.1 {
                best = (u, v);
            }
        }
        (best.0.exp(), best.1)
    }

    fn poisson_start(&self, options: &NbrOptions) -> DVector<f64> {
        let mean_rate = self.y.sum() / self.offset.iter().map(|o| o.exp()).sum::<f64>();
        let mut beta = DVector::zeros(self.x.ncols());
        beta[0] = mean_rate.ln();
        let mut ll = self.log_likelihood(&beta, 0.0);
        for _ in 0..options.max_iter {
            let next = self.newton_step(&mut beta, 0.0, ll);
            let done = (next - ll).abs() < options.ll_tol && self.score(&beta, 0.0).norm() < options.grad_tol;
            ll = next;
            if done {
                break;
            }
        }
        beta
    }

    fn fit(&self, options: &NbrOptions) -> State {
        let mut beta = self.poisson_start(options);
        let (mut alpha, estimate) = match options.dispersion {
            Dispersion::Estimate => (options.alpha_start.clamp(options.alpha_bounds.0, options.alpha_bounds.1), true),
            Dispersion::Fixed(a) => (a, false),
        };
        let mut ll = self.log_likelihood(&beta, alpha);
        let mut history = vec![ll];
        let mut converged = false;
        let mut iterations = 0;
        let mut grad_norm = self.score(&beta, alpha).norm();
        while iterations < options.max_iter {
            iterations += 1;
            let before = ll;
            ll = self.newton_step(&mut beta, alpha, ll);
            if estimate {
                let (a, a_ll) = self.best_alpha(&beta, options.alpha_bounds);
                // A negligible gain would only make α jitter near the optimum.
                if a_ll > ll + 1e-13 * ll.abs().max(1.0) {
                    alpha = a;
                    ll = a_ll;
                }
            }
            history.push(ll);
            grad_norm = self.score(&beta, alpha).norm();
            if (ll - before).abs() < options.ll_tol && grad_norm < options.grad_tol {
                converged = true;
                break;
            }
        }
        State { beta, alpha, ll, history, iterations, converged, grad_norm }
    }
}
