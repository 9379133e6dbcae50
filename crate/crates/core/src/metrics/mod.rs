//! Deposit-rate, latency and registry aggregations.
//!
//! Every metric is a pure fold over articles (or records) into per-group
//! accumulators. Articles are folded in fixed-size chunks that are merged in
//! chunk order, so sequential and parallel runs give identical results.

mod latency;
mod summary;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::corpus::{AccessState, ArticleRecord, DepositCorpus};
use crate::par::{self, Execution};
use crate::registry::RegistrySnapshot;

pub use latency::{
    first_year_latency_score, first_year_latency_scores, first_year_latency_scores_with, latency_summary,
    latency_summary_with, period_distribution, period_distributions, Category, LatencySummary, PeriodDistribution,
    Y1Score,
};
pub use summary::{summarize_registry, CountRow, CriteriaCounts, RegistrySummary, TimepointRow};

const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("unknown group-by key `{0}` (expected institution, discipline, year, mandated or all)")]
    UnknownGroupBy(String),
    #[error("unknown rate key `{0}` (expected oa, ra, ft, mo or nd)")]
    UnknownRateKey(String),
    #[error("unknown category `{0}` (expected oa, ra or ft)")]
    UnknownCategory(String),
    #[error("grouping by mandate status needs a policy registry")]
    MissingRegistry,
    #[error("no articles to aggregate")]
    EmptyCorpus,
    #[error("ranking needs institution groups, found a `{0}` group")]
    NotInstitutionGroups(String),
    #[error("no {category} deposits with a computable latency{}", year.map(|y| format!(" published in {y}")).unwrap_or_default())]
    NoQualifyingArticles { category: Category, year: Option<i32> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupBy {
    Institution,
    Discipline,
    Year,
    Mandated,
    All,
}

impl GroupBy {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupBy::Institution => "institution",
            GroupBy::Discipline => "discipline",
            GroupBy::Year => "year",
            GroupBy::Mandated => "mandated",
            GroupBy::All => "all",
        }
    }
}

impl FromStr for GroupBy {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "institution" => GroupBy::Institution,
            "discipline" => GroupBy::Discipline,
            "year" => GroupBy::Year,
            "mandated" => GroupBy::Mandated,
            "all" => GroupBy::All,
            _ => return Err(MetricsError::UnknownGroupBy(s.to_string())),
        })
    }
}

impl fmt::Display for GroupBy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKey {
    Institution(String),
    Discipline(String),
    Year(i32),
    Mandated(bool),
    All,
}

impl GroupKey {
    pub fn kind(&self) -> GroupBy {
        match self {
            GroupKey::Institution(_) => GroupBy::Institution,
            GroupKey::Discipline(_) => GroupBy::Discipline,
            GroupKey::Year(_) => GroupBy::Year,
            GroupKey::Mandated(_) => GroupBy::Mandated,
            GroupKey::All => GroupBy::All,
        }
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKey::Institution(s) | GroupKey::Discipline(s) => f.write_str(s),
            GroupKey::Year(y) => write!(f, "{y}"),
            GroupKey::Mandated(true) => f.write_str("mandated"),
            GroupKey::Mandated(false) => f.write_str("non_mandated"),
            GroupKey::All => f.write_str("all"),
        }
    }
}

impl Serialize for GroupKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Assigns articles to groups. Mandate status comes from the registry;
/// institutions without a record count as non-mandated.
#[derive(Debug, Clone)]
pub struct Grouping<'a> {
    by: GroupBy,
    mandated: HashSet<&'a str>,
}

impl<'a> Grouping<'a> {
    pub fn new(by: GroupBy, snapshot: Option<&'a RegistrySnapshot>) -> Result<Self, MetricsError> {
        let mandated = match (by, snapshot) {
            (GroupBy::Mandated, None) => return Err(MetricsError::MissingRegistry),
            (GroupBy::Mandated, Some(s)) => {
                s.records().iter().filter(|r| r.is_mandate()).map(|r| r.id.as_str()).collect()
            }
            _ => HashSet::new(),
        };
        Ok(Grouping { by, mandated })
    }

    pub fn by(&self) -> GroupBy {
        self.by
    }

    /// `None` when grouping by year and the article has no publication date.
    pub fn key(&self, corpus: &DepositCorpus, i: usize) -> Option<GroupKey> {
        let a = &corpus.articles()[i];
        Some(match self.by {
            GroupBy::Institution => GroupKey::Institution(a.institution_id.clone()),
            GroupBy::Discipline => GroupKey::Discipline(a.discipline.clone()),
            GroupBy::Year => GroupKey::Year(corpus.publication_year(i)?),
            GroupBy::Mandated => GroupKey::Mandated(self.mandated.contains(a.institution_id.as_str())),
            GroupBy::All => GroupKey::All,
        })
    }
}

pub(crate) trait Accumulator: Default + Send {
    fn merge(&mut self, other: Self);
}

/// Folds every article accepted by `keep` into its group's accumulator.
pub(crate) fn fold_groups<T, K, F>(
    exec: Execution,
    corpus: &DepositCorpus,
    grouping: &Grouping<'_>,
    keep: K,
    fold: F,
) -> BTreeMap<GroupKey, T>
where
    T: Accumulator,
    K: Fn(usize, &ArticleRecord) -> bool + Sync,
    F: Fn(&mut T, usize, &ArticleRecord) + Sync,
{
    let n = corpus.len();
    let chunks = par::map_range(exec, n.div_ceil(CHUNK), |c| {
        let mut groups: BTreeMap<GroupKey, T> = BTreeMap::new();
        for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
            let a = &corpus.articles()[i];
            if !keep(i, a) {
                continue;
            }
            if let Some(key) = grouping.key(corpus, i) {
                fold(groups.entry(key).or_default(), i, a);
            }
        }
        groups
    });
    let mut out: BTreeMap<GroupKey, T> = BTreeMap::new();
    for groups in chunks {
        for (k, v) in groups {
            match out.get_mut(&k) {
                Some(acc) => acc.merge(v),
                None => {
                    out.insert(k, v);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct StateCounts {
    pub oa: u64,
    pub ra: u64,
    pub mo: u64,
    pub nd: u64,
}

impl StateCounts {
    pub fn total(&self) -> u64 {
        self.oa + self.ra + self.mo + self.nd
    }

    pub fn ft(&self) -> u64 {
        self.oa + self.ra
    }

    pub fn add(&mut self, state: AccessState) {
        match state {
            AccessState::OpenAccess => self.oa += 1,
            AccessState::RestrictedAccess => self.ra += 1,
            AccessState::MetadataOnly => self.mo += 1,
            AccessState::NotDeposited => self.nd += 1,
        }
    }

    pub fn get(&self, key: RateKey) -> u64 {
        match key {
            RateKey::Oa => self.oa,
            RateKey::Ra => self.ra,
            RateKey::Ft => self.ft(),
            RateKey::Mo => self.mo,
            RateKey::Nd => self.nd,
        }
    }
}

impl Accumulator for StateCounts {
    fn merge(&mut self, o: Self) {
        self.oa += o.oa;
        self.ra += o.ra;
        self.mo += o.mo;
        self.nd += o.nd;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateKey {
    Oa,
    Ra,
    Ft,
    Mo,
    Nd,
}

impl RateKey {
    pub const ALL: [RateKey; 5] = [RateKey::Oa, RateKey::Ra, RateKey::Ft, RateKey::Mo, RateKey::Nd];

    pub fn as_str(self) -> &'static str {
        match self {
            RateKey::Oa => "oa",
            RateKey::Ra => "ra",
            RateKey::Ft => "ft",
            RateKey::Mo => "mo",
            RateKey::Nd => "nd",
        }
    }
}

impl FromStr for RateKey {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RateKey::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| MetricsError::UnknownRateKey(s.to_string()))
    }
}

/// Deposit-state counts and rates of one group. Rates are fractions in
/// [0, 1] computed from the counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepositRates {
    pub group: GroupKey,
    pub n_articles: u64,
    pub counts: StateCounts,
    pub oa_rate: f64,
    pub ra_rate: f64,
    pub ft_rate: f64,
    pub mo_rate: f64,
    pub nd_rate: f64,
}

impl DepositRates {
    pub fn from_counts(group: GroupKey, counts: StateCounts) -> Self {
        let n = counts.total();
        let rate = |c: u64| if n == 0 { 0.0 } else { c as f64 / n as f64 };
        DepositRates {
            group,
            n_articles: n,
            counts,
            oa_rate: rate(counts.oa),
            ra_rate: rate(counts.ra),
            ft_rate: rate(counts.ft()),
            mo_rate: rate(counts.mo),
            nd_rate: rate(counts.nd),
        }
    }

    pub fn rate(&self, key: RateKey) -> f64 {
        match key {
            RateKey::Oa => self.oa_rate,
            RateKey::Ra => self.ra_rate,
            RateKey::Ft => self.ft_rate,
            RateKey::Mo => self.mo_rate,
            RateKey::Nd => self.nd_rate,
        }
    }
}

pub fn deposit_rates(corpus: &DepositCorpus, grouping: &Grouping<'_>) -> Result<Vec<DepositRates>, MetricsError> {
    deposit_rates_with(corpus, grouping, Execution::default())
}

pub fn deposit_rates_with(
    corpus: &DepositCorpus,
    grouping: &Grouping<'_>,
    exec: Execution,
) -> Result<Vec<DepositRates>, MetricsError> {
    let groups = fold_groups(exec, corpus, grouping, |_, _| true, |acc: &mut StateCounts, _, a| acc.add(a.access_state));
    if groups.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    Ok(groups.into_iter().map(|(k, c)| DepositRates::from_counts(k, c)).collect())
}

/// Unweighted means of per-group rates, one vote per group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateMeans {
    pub groups: usize,
    pub oa_rate: f64,
    pub ra_rate: f64,
    pub ft_rate: f64,
    pub mo_rate: f64,
    pub nd_rate: f64,
}

pub fn mean_group_rates(rates: &[DepositRates]) -> Option<RateMeans> {
    if rates.is_empty() {
        return None;
    }
    let n = rates.len() as f64;
    let mean = |k: RateKey| rates.iter().map(|r| r.rate(k)).sum::<f64>() / n;
    Some(RateMeans {
        groups: rates.len(),
        oa_rate: mean(RateKey::Oa),
        ra_rate: mean(RateKey::Ra),
        ft_rate: mean(RateKey::Ft),
        mo_rate: mean(RateKey::Mo),
        nd_rate: mean(RateKey::Nd),
    })
}

/// Institutions with at least `min_articles` articles, by descending rate.
/// Rates are compared exactly on counts; ties go to the larger institution,
/// then to the smaller id.
pub fn rank_institutions(
    rates: &[DepositRates],
    key: RateKey,
    min_articles: u64,
) -> Result<Vec<DepositRates>, MetricsError> {
    if let Some(r) = rates.iter().find(|r| r.group.kind() != GroupBy::Institution) {
        return Err(MetricsError::NotInstitutionGroups(r.group.kind().to_string()));
    }
    let mut out: Vec<DepositRates> = rates.iter().filter(|r| r.n_articles >= min_articles).cloned().collect();
    out.sort_by(|a, b| {
        let lhs = a.counts.get(key) as u128 * b.n_articles as u128;
        let rhs = b.counts.get(key) as u128 * a.n_articles as u128;
        rhs.cmp(&lhs).then(b.n_articles.cmp(&a.n_articles)).then_with(|| a.group.cmp(&b.group))
    });
    Ok(out)
}
