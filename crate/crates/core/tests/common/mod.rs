//! Independent reference implementations and fixture builders shared by the
//! integration tests. Nothing here calls into the library's numerics.

#![allow(dead_code)]

use chrono::NaiveDate;
use oapl::corpus::{AccessState, ArticleRecord};
use oapl::dates::PolicyDate;
use oapl::registry::PolicyRecord;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};

pub fn date(s: &str) -> NaiveDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
}

/// Pearson r from the definitional centered sums.
pub fn pearson_r(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sx = (x.iter().map(|v| (v - mx).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let sy = (y.iter().map(|v| (v - my).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    x.iter().zip(y).map(|(a, b)| (a - mx) / sx * ((b - my) / sy)).sum::<f64>() / (n - 1.0)
}

#[allow(clippy::too_many_arguments)]
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Two-tailed t-test p for correlation `r` on `n` pairs, by quadrature of
/// the t density. With `s = √ν·tan θ` the density is proportional to
/// `cos^(ν−1) θ` and `|t| = √ν·tan θ₀` puts `θ₀ = asin |r|`, so
/// `p = ∫_{θ₀}^{π/2} cos^(ν−1) / ∫_0^{π/2} cos^(ν−1)`.
pub fn t_tail_by_quadrature(r: f64, n: usize) -> f64 {
    let nu = (n - 2) as f64;
    let f = move |th: f64| th.cos().max(0.0).powf(nu - 1.0);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let theta0 = r.abs().min(1.0).asin();
    // Split at the peak width so the quadrature sees the bulk of the mass.
    let split = (3.0 / nu.sqrt()).min(half_pi);
    let total = integrate(&f, 0.0, split, 1e-15) + integrate(&f, split, half_pi, 1e-15);
    let tail = if theta0 >= split {
        integrate(&f, theta0, half_pi, 1e-15)
    } else {
        integrate(&f, theta0, split, 1e-15) + integrate(&f, split, half_pi, 1e-15)
    };
    tail / total
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let pivot = a[col].clone();
            for (x, p) in a[row][col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Poisson log-link GLM by iteratively reweighted least squares. `rows`
/// exclude the intercept; the returned β has the intercept first.
pub fn poisson_irls(rows: &[Vec<f64>], y: &[u64], offset: &[f64]) -> Vec<f64> {
    let p = rows[0].len() + 1;
    let design: Vec<Vec<f64>> = rows.iter().map(|r| std::iter::once(1.0).chain(r.iter().copied()).collect()).collect();
    let ybar = y.iter().sum::<u64>() as f64 / y.len() as f64;
    let mut beta = vec![0.0; p];
    beta[0] = ybar.ln() - offset.iter().sum::<f64>() / offset.len() as f64;
    for _ in 0..200 {
        let mut xtwx = vec![vec![0.0; p]; p];
        let mut xtwz = vec![0.0; p];
        for ((x, &yi), &o) in design.iter().zip(y).zip(offset) {
            let eta: f64 = x.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>() + o;
            let mu = eta.exp();
            let z = eta - o + (yi as f64 - mu) / mu;
            for j in 0..p {
                xtwz[j] += x[j] * mu * z;
                for k in 0..p {
                    xtwx[j][k] += x[j] * mu * x[k];
                }
            }
        }
        let next = solve(xtwx, xtwz);
        let change = next.iter().zip(&beta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        beta = next;
        if change < 1e-14 {
            break;
        }
    }
    beta
}

/// One NB2 draw with mean `mu` and dispersion `alpha` (variance μ + αμ²),
/// as a gamma-mixed Poisson.
pub fn nb2_draw<R: Rng>(rng: &mut R, mu: f64, alpha: f64) -> u64 {
    let lambda: f64 = Gamma::new(1.0 / alpha, alpha * mu).unwrap().sample(rng);
    if lambda <= 0.0 {
        return 0;
    }
    let v: f64 = Poisson::new(lambda).unwrap().sample(rng);
    v as u64
}

/// A policy record that is a deposit mandate with the given locus and
/// adoption date.
pub fn mandate(id: &str, locus: oapl::registry::LocusOfDeposit, adopted: Option<&str>) -> PolicyRecord {
    let mut r = PolicyRecord::unspecified(id);
    r.policymaker_type = oapl::registry::PolicymakerType::ResearchOrg;
    r.deposit_of_item = oapl::registry::DepositOfItem::Required;
    r.locus_of_deposit = locus;
    r.adoption_date = adopted.map(|d| PolicyDate::day(date(d)));
    r
}

/// An article published on `published` with a deposit `latency_days` later.
pub fn article(id: String, inst: &str, state: AccessState, published: NaiveDate, latency_days: Option<i64>) -> ArticleRecord {
    ArticleRecord {
        article_id: id,
        institution_id: inst.to_string(),
        discipline: "physics".to_string(),
        wok_date: None,
        altmetric_date: Some(published),
        deposit_date: latency_days.map(|d| published + chrono::Duration::days(d)),
        access_state: state,
        oa_conversion_date: None,
    }
}

/// `oa`, `ra`, `mo` and `nd` articles of one institution, all published on
/// the same day and deposited on publication.
pub fn institution_articles(inst: &str, oa: usize, ra: usize, mo: usize, nd: usize) -> Vec<ArticleRecord> {
    let published = date("2012-06-01");
    let mut out = Vec::with_capacity(oa + ra + mo + nd);
    for (state, n) in [
        (AccessState::OpenAccess, oa),
        (AccessState::RestrictedAccess, ra),
        (AccessState::MetadataOnly, mo),
        (AccessState::NotDeposited, nd),
    ] {
        for k in 0..n {
            let deposit = (state != AccessState::NotDeposited).then_some(0);
            out.push(article(format!("{inst}/{state}/{k}"), inst, state, published, deposit));
        }
    }
    out
}
