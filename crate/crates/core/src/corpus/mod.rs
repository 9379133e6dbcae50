//! Per-article deposit records and the derivations built on them.

mod exclusions;
mod synthetic;
pub mod world;

use std::collections::HashSet;
use std::fmt;

use chrono::{Datelike, Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::dates::{self, days_between, DAYS_PER_MONTH};

pub use exclusions::{
    apply_exclusions, Exclusion, ExclusionOutcome, ExclusionParams, ExclusionReport, ExclusionRule,
    RetainedInstitution, YearWindow,
};
pub use synthetic::{
    generate_synthetic, generate_synthetic_with, InstitutionProfile, LatencyModel, StateProbabilities,
    SyntheticConfig,
};

/// Offset applied to index (WoK) dates when no altmetric date is known:
/// 5.26 months at 30.4375 days per month, rounded to whole days.
pub const WOK_OFFSET_DAYS: i64 = 160;

/// Exact CSV header of corpus files.
pub const CORPUS_HEADER: [&str; 8] = [
    "article_id",
    "institution_id",
    "discipline",
    "wok_date",
    "altmetric_date",
    "deposit_date",
    "access_state",
    "oa_conversion_date",
];

schema_enum! {
    /// Repository state of an article.
    pub enum AccessState {
        NotDeposited => "not_deposited",
        MetadataOnly => "metadata_only",
        RestrictedAccess => "restricted",
        OpenAccess => "open",
    }
}

impl AccessState {
    /// Full text is deposited (open or restricted).
    pub fn is_full_text(self) -> bool {
        matches!(self, AccessState::OpenAccess | AccessState::RestrictedAccess)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub article_id: String,
    pub institution_id: String,
    pub discipline: String,
    pub wok_date: Option<NaiveDate>,
    pub altmetric_date: Option<NaiveDate>,
    pub deposit_date: Option<NaiveDate>,
    pub access_state: AccessState,
    /// Date a restricted deposit was opened, when known.
    pub oa_conversion_date: Option<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArticleInvariant {
    #[error("article_id is empty")]
    EmptyArticleId,
    #[error("institution_id is empty")]
    EmptyInstitution,
    #[error("not_deposited article has a deposit_date")]
    DepositDateOnUndeposited,
    #[error("{0} article has no deposit_date")]
    MissingDepositDate(AccessState),
    #[error("oa_conversion_date on a `{0}` article (only open articles can have been converted)")]
    ConversionNotOpen(AccessState),
    #[error("oa_conversion_date {conversion} precedes deposit_date {deposit}")]
    ConversionBeforeDeposit { conversion: NaiveDate, deposit: NaiveDate },
    #[error("deposited article has neither wok_date nor altmetric_date")]
    Undated,
}

impl ArticleRecord {
    pub fn check(&self) -> Result<(), ArticleInvariant> {
        if self.article_id.is_empty() {
            return Err(ArticleInvariant::EmptyArticleId);
        }
        if self.institution_id.is_empty() {
            return Err(ArticleInvariant::EmptyInstitution);
        }
        match (self.access_state, self.deposit_date) {
            (AccessState::NotDeposited, Some(_)) => return Err(ArticleInvariant::DepositDateOnUndeposited),
            (state, None) if state != AccessState::NotDeposited => {
                return Err(ArticleInvariant::MissingDepositDate(state))
            }
            _ => {}
        }
        if let Some(conversion) = self.oa_conversion_date {
            if self.access_state != AccessState::OpenAccess {
                return Err(ArticleInvariant::ConversionNotOpen(self.access_state));
            }
            let deposit = self.deposit_date.expect("open articles carry a deposit date");
            if conversion < deposit {
                return Err(ArticleInvariant::ConversionBeforeDeposit { conversion, deposit });
            }
        }
        if self.access_state != AccessState::NotDeposited && self.wok_date.is_none() && self.altmetric_date.is_none() {
            return Err(ArticleInvariant::Undated);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("article `{0}` has neither an altmetric date nor a WoK date")]
pub struct NoPublicationDate(pub String);

/// Altmetric date when present, otherwise the WoK date minus 160 days.
pub fn estimated_publication_date(article: &ArticleRecord) -> Result<NaiveDate, NoPublicationDate> {
    match (article.altmetric_date, article.wok_date) {
        (Some(alt), _) => Ok(alt),
        (None, Some(wok)) => Ok(wok - Duration::days(WOK_OFFSET_DAYS)),
        (None, None) => Err(NoPublicationDate(article.article_id.clone())),
    }
}

/// Signed months from estimated publication to deposit, for full-text
/// deposits. Negative when deposited before publication; `None` for
/// metadata-only or undeposited articles and when no publication date can be
/// estimated. Converted restricted deposits keep their original deposit date.
pub fn deposit_latency_months(article: &ArticleRecord) -> Option<f64> {
    if !article.access_state.is_full_text() {
        return None;
    }
    let deposit = article.deposit_date?;
    let published = estimated_publication_date(article).ok()?;
    Some(days_between(published, deposit) as f64 / DAYS_PER_MONTH)
}

/// Deposit timing relative to publication. Bins are half-open, so every
/// finite latency lands in exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatencyPeriod {
    /// latency < 0
    BeforePublication,
    /// [0, 6)
    Within6Months,
    /// [6, 12)
    Between6And12,
    /// [12, 24)
    Between12And24,
    /// ≥ 24
    After24Months,
}

impl LatencyPeriod {
    pub const ALL: [LatencyPeriod; 5] = [
        LatencyPeriod::BeforePublication,
        LatencyPeriod::Within6Months,
        LatencyPeriod::Between6And12,
        LatencyPeriod::Between12And24,
        LatencyPeriod::After24Months,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LatencyPeriod::BeforePublication => "before_publication",
            LatencyPeriod::Within6Months => "within_6_months",
            LatencyPeriod::Between6And12 => "between_6_and_12",
            LatencyPeriod::Between12And24 => "between_12_and_24",
            LatencyPeriod::After24Months => "after_24_months",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for LatencyPeriod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn latency_period(latency_months: f64) -> LatencyPeriod {
    debug_assert!(!latency_months.is_nan(), "latency must be a number");
    if latency_months < 0.0 {
        LatencyPeriod::BeforePublication
    } else if latency_months < 6.0 {
        LatencyPeriod::Within6Months
    } else if latency_months < 12.0 {
        LatencyPeriod::Between6And12
    } else if latency_months < 24.0 {
        LatencyPeriod::Between12And24
    } else {
        LatencyPeriod::After24Months
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    /// 1-based line in the source file (the header is line 1).
    pub line: u64,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CorpusError {
    #[error("corpus CSV: {0}")]
    Csv(String),
    #[error("corpus CSV is missing column `{0}`")]
    MissingColumn(&'static str),
    #[error("corpus CSV header must be exactly `{expected}`, found `{found}`")]
    HeaderMismatch { expected: String, found: String },
    #[error("{} invalid corpus row(s): {}", .0.len(), .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidRows(Vec<RowError>),
    #[error("article `{id}`: {invariant}")]
    Invariant { id: String, invariant: ArticleInvariant },
    #[error("duplicate article id `{0}`")]
    DuplicateArticle(String),
    #[error("year window {0}-{1} is empty")]
    EmptyWindow(i32, i32),
    #[error("synthetic config: {0}")]
    Config(String),
}

/// A validated collection of articles with cached publication dates.
#[derive(Debug, Clone, PartialEq)]
pub struct DepositCorpus {
    articles: Vec<ArticleRecord>,
    publication_dates: Vec<Option<NaiveDate>>,
}

impl DepositCorpus {
    pub fn new(articles: Vec<ArticleRecord>) -> Result<Self, CorpusError> {
        let mut ids = HashSet::with_capacity(articles.len());
        for a in &articles {
            a.check().map_err(|invariant| CorpusError::Invariant { id: a.article_id.clone(), invariant })?;
            if !ids.insert(a.article_id.as_str()) {
                return Err(CorpusError::DuplicateArticle(a.article_id.clone()));
            }
        }
        Ok(Self::new_unchecked(articles))
    }

    fn new_unchecked(articles: Vec<ArticleRecord>) -> Self {
        let publication_dates = articles.iter().map(|a| estimated_publication_date(a).ok()).collect();
        DepositCorpus { articles, publication_dates }
    }

    pub fn articles(&self) -> &[ArticleRecord] {
        &self.articles
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }

    pub fn publication_date(&self, i: usize) -> Option<NaiveDate> {
        self.publication_dates[i]
    }

    pub fn publication_year(&self, i: usize) -> Option<i32> {
        self.publication_dates[i].map(|d| d.year())
    }

    /// Distinct institution ids, sorted.
    pub fn institutions(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.articles.iter().map(|a| a.institution_id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Keeps the articles at indices for which `keep` is true.
    pub fn filter_indexed(&self, mut keep: impl FnMut(usize, &ArticleRecord) -> bool) -> DepositCorpus {
        let mut articles = Vec::new();
        let mut publication_dates = Vec::new();
        for (i, a) in self.articles.iter().enumerate() {
            if keep(i, a) {
                articles.push(a.clone());
                publication_dates.push(self.publication_dates[i]);
            }
        }
        DepositCorpus { articles, publication_dates }
    }

    pub fn to_csv(&self) -> String {
        write_corpus(&self.articles)
    }
}

/// Parses a corpus CSV. All row-level problems are collected and reported
/// together with their line numbers.
pub fn parse_corpus(text: &str) -> Result<DepositCorpus, CorpusError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CorpusError::Csv(e.to_string()))?.clone();
    for col in CORPUS_HEADER {
        if !headers.iter().any(|h| h == col) {
            return Err(CorpusError::MissingColumn(col));
        }
    }
    if headers.iter().ne(CORPUS_HEADER) {
        return Err(CorpusError::HeaderMismatch {
            expected: CORPUS_HEADER.join(","),
            found: headers.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut articles = Vec::new();
    let mut errors = Vec::new();
    let mut ids = HashSet::new();
    for row in reader.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                errors.push(RowError { line, message: e.to_string() });
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        match parse_row(&row) {
            Ok(article) => {
                if !ids.insert(article.article_id.clone()) {
                    errors.push(RowError { line, message: format!("duplicate article id `{}`", article.article_id) });
                } else {
                    articles.push(article);
                }
            }
            Err(message) => errors.push(RowError { line, message }),
        }
    }
    if !errors.is_empty() {
        return Err(CorpusError::InvalidRows(errors));
    }
    Ok(DepositCorpus::new_unchecked(articles))
}

fn parse_row(row: &csv::StringRecord) -> Result<ArticleRecord, String> {
    let field = |i: usize| row.get(i).unwrap_or("").trim();
    let date = |i: usize| -> Result<Option<NaiveDate>, String> {
        let s = field(i);
        if s.is_empty() {
            return Ok(None);
        }
        dates::parse_iso_date(s).map(Some).map_err(|e| format!("{}: {e}", CORPUS_HEADER[i]))
    };
    let article = ArticleRecord {
        article_id: field(0).to_string(),
        institution_id: field(1).to_string(),
        discipline: field(2).to_lowercase(),
        wok_date: date(3)?,
        altmetric_date: date(4)?,
        deposit_date: date(5)?,
        access_state: field(6).parse().map_err(|e| format!("access_state: {e}"))?,
        oa_conversion_date: date(7)?,
    };
    article.check().map_err(|e| e.to_string())?;
    Ok(article)
}

/// Serializes articles with the exact corpus header.
pub fn write_corpus(articles: &[ArticleRecord]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CORPUS_HEADER).expect("write to memory");
    let d = |x: Option<NaiveDate>| x.map(|d| d.format("%Y-%m-%d").to_string()).unwrap_or_default();
    for a in articles {
        w.write_record([
            a.article_id.as_str(),
            a.institution_id.as_str(),
            a.discipline.as_str(),
            &d(a.wok_date),
            &d(a.altmetric_date),
            &d(a.deposit_date),
            a.access_state.as_str(),
            &d(a.oa_conversion_date),
        ])
        .expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is utf-8")
}
