use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{fold_groups, Accumulator, GroupBy, GroupKey, Grouping, MetricsError};
use crate::corpus::{deposit_latency_months, latency_period, AccessState, DepositCorpus, LatencyPeriod};
use crate::par::Execution;

/// Full-text deposit category. FT is the union of OA and RA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Oa,
    Ra,
    Ft,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Oa, Category::Ra, Category::Ft];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Oa => "oa",
            Category::Ra => "ra",
            Category::Ft => "ft",
        }
    }

    pub fn includes(self, state: AccessState) -> bool {
        match self {
            Category::Oa => state == AccessState::OpenAccess,
            Category::Ra => state == AccessState::RestrictedAccess,
            Category::Ft => state.is_full_text(),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| MetricsError::UnknownCategory(s.to_string()))
    }
}

#[derive(Default)]
struct LatencyAcc {
    oa_sum: f64,
    oa_n: u64,
    ra_sum: f64,
    ra_n: u64,
}

impl Accumulator for LatencyAcc {
    fn merge(&mut self, o: Self) {
        self.oa_sum += o.oa_sum;
        self.oa_n += o.oa_n;
        self.ra_sum += o.ra_sum;
        self.ra_n += o.ra_n;
    }
}

/// Mean deposit latency in months per category. A mean is absent when the
/// category has no article with a computable latency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatencySummary {
    pub group: GroupKey,
    pub oa_mean: Option<f64>,
    pub ra_mean: Option<f64>,
    pub ft_mean: Option<f64>,
    pub oa_count: u64,
    pub ra_count: u64,
    pub ft_count: u64,
}

pub fn latency_summary(corpus: &DepositCorpus, grouping: &Grouping<'_>) -> Vec<LatencySummary> {
    latency_summary_with(corpus, grouping, Execution::default())
}

pub fn latency_summary_with(corpus: &DepositCorpus, grouping: &Grouping<'_>, exec: Execution) -> Vec<LatencySummary> {
    let groups = fold_groups(
        exec,
        corpus,
        grouping,
        |_, _| true,
        |acc: &mut LatencyAcc, _, a| {
            let Some(m) = deposit_latency_months(a) else { return };
            match a.access_state {
                AccessState::OpenAccess => {
                    acc.oa_sum += m;
                    acc.oa_n += 1;
                }
                AccessState::RestrictedAccess => {
                    acc.ra_sum += m;
                    acc.ra_n += 1;
                }
                _ => {}
            }
        },
    );
    let mean = |s: f64, n: u64| (n > 0).then(|| s / n as f64);
    groups
        .into_iter()
        .map(|(group, a)| LatencySummary {
            group,
            oa_mean: mean(a.oa_sum, a.oa_n),
            ra_mean: mean(a.ra_sum, a.ra_n),
            ft_mean: mean(a.oa_sum + a.ra_sum, a.oa_n + a.ra_n),
            oa_count: a.oa_n,
            ra_count: a.ra_n,
            ft_count: a.oa_n + a.ra_n,
        })
        .collect()
}

#[derive(Default)]
struct PeriodAcc([u64; 5]);

impl Accumulator for PeriodAcc {
    fn merge(&mut self, o: Self) {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a += b;
        }
    }
}

fn period_counts(
    corpus: &DepositCorpus,
    grouping: &Grouping<'_>,
    year: Option<i32>,
    category: Category,
    exec: Execution,
) -> BTreeMap<GroupKey, [u64; 5]> {
    fold_groups(
        exec,
        corpus,
        grouping,
        |i, a| category.includes(a.access_state) && year.is_none_or(|y| corpus.publication_year(i) == Some(y)),
        |acc: &mut PeriodAcc, _, a| {
            if let Some(m) = deposit_latency_months(a) {
                acc.0[latency_period(m).index()] += 1;
            }
        },
    )
    .into_iter()
    .filter(|(_, acc)| acc.0.iter().sum::<u64>() > 0)
    .map(|(k, acc)| (k, acc.0))
    .collect()
}

/// Share of deposits falling in each latency period, in
/// [`LatencyPeriod::ALL`] order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodDistribution {
    pub group: GroupKey,
    pub year: Option<i32>,
    pub category: Category,
    pub n_deposits: u64,
    pub counts: [u64; 5],
    pub proportions: [f64; 5],
}

impl PeriodDistribution {
    fn new(group: GroupKey, year: Option<i32>, category: Category, counts: [u64; 5]) -> Self {
        let n: u64 = counts.iter().sum();
        PeriodDistribution {
            group,
            year,
            category,
            n_deposits: n,
            counts,
            proportions: counts.map(|c| c as f64 / n as f64),
        }
    }

    pub fn proportion(&self, period: LatencyPeriod) -> f64 {
        self.proportions[period.index()]
    }
}

/// Period distribution over the whole corpus. `year` filters on estimated
/// publication year; `None` pools every year.
pub fn period_distribution(
    corpus: &DepositCorpus,
    year: Option<i32>,
    category: Category,
) -> Result<PeriodDistribution, MetricsError> {
    let all = Grouping::new(GroupBy::All, None)?;
    period_distributions(corpus, &all, year, category)
        .pop()
        .ok_or(MetricsError::NoQualifyingArticles { category, year })
}

pub fn period_distributions(
    corpus: &DepositCorpus,
    grouping: &Grouping<'_>,
    year: Option<i32>,
    category: Category,
) -> Vec<PeriodDistribution> {
    period_counts(corpus, grouping, year, category, Execution::default())
        .into_iter()
        .map(|(k, c)| PeriodDistribution::new(k, year, category, c))
        .collect()
}

/// First-year latency score: deposits before publication weigh 1, within
/// six months 2/3, within twelve months 1/3, later deposits 0. The
/// denominator is every deposit of the category with a computable latency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Y1Score {
    pub group: GroupKey,
    pub year: Option<i32>,
    pub category: Category,
    pub score: f64,
    pub p_before: f64,
    pub p_0_6: f64,
    pub p_6_12: f64,
    pub denominator: u64,
}

impl Y1Score {
    fn from_counts(group: GroupKey, year: Option<i32>, category: Category, c: [u64; 5]) -> Self {
        let n: u64 = c.iter().sum();
        let [before, early, late, ..] = c;
        let nf = n as f64;
        Y1Score {
            group,
            year,
            category,
            // Exact rational before the single division.
            score: (3 * before + 2 * early + late) as f64 / (3.0 * nf),
            p_before: before as f64 / nf,
            p_0_6: early as f64 / nf,
            p_6_12: late as f64 / nf,
            denominator: n,
        }
    }
}

pub fn first_year_latency_score(
    corpus: &DepositCorpus,
    grouping: &Grouping<'_>,
    group: &GroupKey,
    year: Option<i32>,
    category: Category,
) -> Result<Y1Score, MetricsError> {
    first_year_latency_scores(corpus, grouping, year, category)
        .into_iter()
        .find(|s| &s.group == group)
        .ok_or(MetricsError::NoQualifyingArticles { category, year })
}

/// Scores of every group that has at least one qualifying deposit.
pub fn first_year_latency_scores(
    corpus: &DepositCorpus,
    grouping: &Grouping<'_>,
    year: Option<i32>,
    category: Category,
) -> Vec<Y1Score> {
    first_year_latency_scores_with(corpus, grouping, year, category, Execution::default())
}

pub fn first_year_latency_scores_with(
    corpus: &DepositCorpus,
    grouping: &Grouping<'_>,
    year: Option<i32>,
    category: Category,
    exec: Execution,
) -> Vec<Y1Score> {
    period_counts(corpus, grouping, year, category, exec)
        .into_iter()
        .map(|(k, c)| Y1Score::from_counts(k, year, category, c))
        .collect()
}
