use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::Serialize;

use super::nbr::{fit_nbr_raw, NbrFit, NbrOptions};
use super::pearson::{screen_conditions, CorrelationResult};
use crate::corpus::{apply_exclusions, CorpusError, DepositCorpus, ExclusionParams, ExclusionReport};
use crate::encoding::{encode_policy, Condition, EncodedPolicy, EncodingError, WeightScheme};
use crate::metrics::{
    deposit_rates_with, first_year_latency_scores_with, Category, GroupBy, GroupKey, Grouping, StateCounts,
};
use crate::par::{self, Execution};
use crate::registry::RegistrySnapshot;

/// Stage-1 conditions: the weighted conditions without the two embargo
/// lengths and the locus of deposit (constant once non-IR mandates are
/// excluded), plus mandate age.
pub const STAGE1_CONDITIONS: [Condition; 11] = [
    Condition::CannotWaiveDeposit,
    Condition::ResearchEvaluation,
    Condition::CannotWaiveRightsRetention,
    Condition::MustMakeOa,
    Condition::MustDeposit,
    Condition::CannotWaiveOa,
    Condition::DepositImmediately,
    Condition::MakeOaImmediately,
    Condition::MustRetainRights,
    Condition::MandateAge,
    Condition::OpenLicensing,
];

pub const MIN_INSTITUTIONS: usize = 3;
pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Response {
    FtRate,
    OaRate,
    RaRate,
    FtY1,
    OaY1,
    RaY1,
}

impl Response {
    pub const RATES: [Response; 3] = [Response::FtRate, Response::OaRate, Response::RaRate];
    pub const LATENCY: [Response; 3] = [Response::FtY1, Response::OaY1, Response::RaY1];

    pub fn as_str(self) -> &'static str {
        match self {
            Response::FtRate => "ft_rate",
            Response::OaRate => "oa_rate",
            Response::RaRate => "ra_rate",
            Response::FtY1 => "ft_y1",
            Response::OaY1 => "oa_y1",
            Response::RaY1 => "ra_y1",
        }
    }

    pub fn category(self) -> Category {
        match self {
            Response::FtRate | Response::FtY1 => Category::Ft,
            Response::OaRate | Response::OaY1 => Category::Oa,
            Response::RaRate | Response::RaY1 => Category::Ra,
        }
    }

    pub fn is_latency(self) -> bool {
        matches!(self, Response::FtY1 | Response::OaY1 | Response::RaY1)
    }

    fn family(latency: bool) -> [Response; 3] {
        if latency {
            Response::LATENCY
        } else {
            Response::RATES
        }
    }

    fn of(category: Category, latency: bool) -> Response {
        Response::family(latency).into_iter().find(|r| r.category() == category).expect("every category")
    }
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ResponseSet {
    Rates,
    Latency,
    #[default]
    Both,
}

impl ResponseSet {
    fn families(self) -> Vec<bool> {
        match self {
            ResponseSet::Rates => vec![false],
            ResponseSet::Latency => vec![true],
            ResponseSet::Both => vec![false, true],
        }
    }
}

impl FromStr for ResponseSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rates" => Ok(ResponseSet::Rates),
            "latency" => Ok(ResponseSet::Latency),
            "both" => Ok(ResponseSet::Both),
            _ => Err(format!("unknown response set `{s}` (expected rates, latency or both)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisConfig {
    /// Stage-2 weights; stage 1 always uses scheme I.
    pub stage2_scheme: WeightScheme,
    pub threshold: f64,
    pub responses: ResponseSet,
    /// Screening uses this category's response within each family.
    pub screen_on: Category,
    pub exclusions: ExclusionParams,
    /// Mandate ages are measured to this date; defaults to the snapshot date.
    pub reference_date: Option<NaiveDate>,
    pub nbr: NbrOptions,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            stage2_scheme: WeightScheme::II,
            threshold: 0.1,
            responses: ResponseSet::Both,
            screen_on: Category::Ft,
            exclusions: ExclusionParams::default(),
            reference_date: None,
            nbr: NbrOptions::default(),
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("{found} institution(s) with a policy record remain after exclusions; at least {MIN_INSTITUTIONS} are needed")]
    TooFewInstitutions { found: usize },
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("screening threshold must be a finite non-negative number")]
    InvalidThreshold,
}

/// Per-institution inputs to both stages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstitutionData {
    pub id: String,
    pub mandated: bool,
    pub n_articles: u64,
    pub counts: StateCounts,
    pub ft_y1: Option<f64>,
    pub oa_y1: Option<f64>,
    pub ra_y1: Option<f64>,
    pub mandate_age: Option<f64>,
}

impl InstitutionData {
    /// The response value correlated in the pairwise tests.
    fn value(&self, r: Response) -> Option<f64> {
        let rate = |c: u64| c as f64 / self.n_articles as f64;
        match r {
            Response::FtRate => Some(rate(self.counts.ft())),
            Response::OaRate => Some(rate(self.counts.oa)),
            Response::RaRate => Some(rate(self.counts.ra)),
            Response::FtY1 => self.ft_y1,
            Response::OaY1 => self.oa_y1,
            Response::RaY1 => self.ra_y1,
        }
    }

    /// The count modelled by the regression: deposits for rates, score×100
    /// rounded for latency scores.
    fn count(&self, r: Response) -> Option<u64> {
        match r {
            Response::FtRate => Some(self.counts.ft()),
            Response::OaRate => Some(self.counts.oa),
            Response::RaRate => Some(self.counts.ra),
            _ => self.value(r).map(|s| (s * 100.0).round() as u64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage1Cell {
    pub response: Response,
    #[serde(flatten)]
    pub result: CorrelationResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreeningOutcome {
    pub screened_on: Response,
    pub threshold: f64,
    pub retained: Vec<Condition>,
    pub eliminated: Vec<Condition>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage2Result {
    pub response: Response,
    pub scheme: WeightScheme,
    pub conditions: Vec<Condition>,
    pub n_rows: usize,
    /// Institutions left out for a missing response or condition value.
    pub dropped_rows: usize,
    /// Pairwise correlations under the stage-2 weights.
    pub pairwise: Vec<CorrelationResult>,
    pub fit: Option<NbrFit>,
    pub error: Option<String>,
    /// Whether the modelled count is the rounded score×100 pseudo-count.
    pub pseudo_counts: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Positive,
    Negative,
    NearZero,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Positive => "positive",
            Direction::Negative => "negative",
            Direction::NearZero => "near_zero",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub condition: Condition,
    pub response: Response,
    pub direction: Direction,
    pub significant_nbr: bool,
    pub significant_pairwise: bool,
}

impl SummaryRow {
    pub fn significant(&self) -> bool {
        self.significant_nbr || self.significant_pairwise
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub reference_date: NaiveDate,
    pub stage1_scheme: WeightScheme,
    pub stage2_scheme: WeightScheme,
    pub threshold: f64,
    pub exclusions: ExclusionReport,
    /// Retained institutions without a policy record; not analysed.
    pub comparison_institutions: usize,
    pub institutions: Vec<InstitutionData>,
    /// Institutions left out of latency-score analyses for lacking an
    /// adoption date.
    pub latency_rows_without_mandate_age: usize,
    pub stage1: Vec<Stage1Cell>,
    pub screening: Vec<ScreeningOutcome>,
    pub stage2: Vec<Stage2Result>,
    pub summary: Vec<SummaryRow>,
    pub notes: Vec<String>,
}

impl AnalysisReport {
    pub fn stage1_cell(&self, response: Response, condition: Condition) -> Option<&CorrelationResult> {
        self.stage1.iter().find(|c| c.response == response && c.result.condition == condition).map(|c| &c.result)
    }

    pub fn stage2_for(&self, response: Response) -> Option<&Stage2Result> {
        self.stage2.iter().find(|s| s.response == response)
    }
}

struct Row<'a> {
    data: &'a InstitutionData,
    stage1: EncodedPolicy,
    stage2: EncodedPolicy,
}

pub fn run_effectiveness_analysis(
    snapshot: &RegistrySnapshot,
    corpus: &DepositCorpus,
    config: &AnalysisConfig,
) -> Result<AnalysisReport, AnalysisError> {
    if !config.threshold.is_finite() || config.threshold < 0.0 {
        return Err(AnalysisError::InvalidThreshold);
    }
    let exec = config.execution;
    let reference_date = config.reference_date.unwrap_or(snapshot.snapshot_date);
    let outcome = apply_exclusions(corpus, snapshot, &config.exclusions)?;
    let policies = snapshot.index();

    let by_inst = Grouping::new(GroupBy::Institution, None).expect("institution grouping needs no registry");
    let counts: BTreeMap<GroupKey, StateCounts> = deposit_rates_with(&outcome.corpus, &by_inst, exec)
        .map(|rates| rates.into_iter().map(|r| (r.group, r.counts)).collect())
        .unwrap_or_default();
    let mut y1: BTreeMap<(GroupKey, Category), f64> = BTreeMap::new();
    for cat in Category::ALL {
        for s in first_year_latency_scores_with(&outcome.corpus, &by_inst, None, cat, exec) {
            y1.insert((s.group, cat), s.score);
        }
    }

    let analysed: Vec<_> = outcome.institutions.iter().filter(|i| i.has_policy).collect();
    if analysed.len() < MIN_INSTITUTIONS {
        return Err(AnalysisError::TooFewInstitutions { found: analysed.len() });
    }
    let encoded = par::try_map(exec, &analysed, |inst| -> Result<_, EncodingError> {
        let record = policies[inst.id.as_str()];
        Ok((
            encode_policy(record, WeightScheme::I, reference_date)?,
            encode_policy(record, config.stage2_scheme, reference_date)?,
        ))
    })?;
    let data: Vec<InstitutionData> = analysed
        .iter()
        .zip(&encoded)
        .map(|(inst, (enc, _))| {
            let key = GroupKey::Institution(inst.id.clone());
            let score = |cat| y1.get(&(key.clone(), cat)).copied();
            InstitutionData {
                id: inst.id.clone(),
                mandated: inst.mandated,
                n_articles: inst.n_articles as u64,
                counts: counts.get(&key).copied().unwrap_or_default(),
                ft_y1: score(Category::Ft),
                oa_y1: score(Category::Oa),
                ra_y1: score(Category::Ra),
                mandate_age: enc.mandate_age,
            }
        })
        .collect();
    let rows: Vec<Row> = data
        .iter()
        .zip(encoded)
        .map(|(data, (stage1, stage2))| Row { data, stage1, stage2 })
        .collect();
    let latency_rows_without_mandate_age = rows.iter().filter(|r| r.data.mandate_age.is_none()).count();

    // Latency-score rows need a mandate age for every condition; rate rows
    // drop a missing value pairwise only.
    let usable = |row: &Row, r: Response| !r.is_latency() || row.data.mandate_age.is_some();
    let correlate = |response: Response, condition: Condition, scheme_two: bool| {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for row in rows.iter().filter(|row| usable(row, response)) {
            let enc = if scheme_two { &row.stage2 } else { &row.stage1 };
            if let (Some(x), Some(y)) = (enc.get(condition), row.data.value(response)) {
                xs.push(x);
                ys.push(y);
            }
        }
        CorrelationResult::compute(condition, &xs, &ys)
    };

    let families = config.responses.families();
    let cells: Vec<(Response, Condition)> = families
        .iter()
        .flat_map(|&lat| Response::family(lat))
        .flat_map(|r| STAGE1_CONDITIONS.map(|c| (r, c)))
        .collect();
    let stage1: Vec<Stage1Cell> = par::map(exec, &cells, |&(response, condition)| Stage1Cell {
        response,
        result: correlate(response, condition, false),
    });

    let mut notes = Vec::new();
    let mut screening = Vec::new();
    let mut jobs: Vec<(Response, Vec<Condition>)> = Vec::new();
    for &lat in &families {
        let screened_on = Response::of(config.screen_on, lat);
        let results: Vec<CorrelationResult> =
            stage1.iter().filter(|c| c.response == screened_on).map(|c| c.result.clone()).collect();
        let s = screen_conditions(&results, config.threshold);
        if s.retained.is_empty() {
            notes.push(format!("no condition reached |r| >= {} on {screened_on}; stage 2 is empty", config.threshold));
        } else {
            jobs.extend(Response::family(lat).map(|r| (r, s.retained_conditions())));
        }
        screening.push(ScreeningOutcome {
            screened_on,
            threshold: config.threshold,
            retained: s.retained_conditions(),
            eliminated: s.eliminated_conditions(),
        });
    }
    if families.contains(&true) {
        notes.push(
            "latency-score regressions model round(score x 100) as a count with no offset".to_string(),
        );
    }

    let stage2: Vec<Stage2Result> = par::map(exec, &jobs, |(response, conditions)| {
        let response = *response;
        let pairwise = conditions.iter().map(|&c| correlate(response, c, true)).collect();
        let mut design = Vec::new();
        let mut ys = Vec::new();
        let mut offsets = Vec::new();
        for row in rows.iter().filter(|row| usable(row, response)) {
            let xs: Option<Vec<f64>> = conditions.iter().map(|&c| row.stage2.get(c)).collect();
            if let (Some(xs), Some(y)) = (xs, row.data.count(response)) {
                design.push(xs);
                ys.push(y);
                offsets.push((row.data.n_articles as f64).ln());
            }
        }
        let names: Vec<String> = conditions.iter().map(|c| c.to_string()).collect();
        let offset = (!response.is_latency()).then_some(offsets.as_slice());
        let (fit, error) = match fit_nbr_raw(&names, &design, &ys, offset, &config.nbr) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Stage2Result {
            response,
            scheme: config.stage2_scheme,
            conditions: conditions.clone(),
            n_rows: design.len(),
            dropped_rows: rows.len() - design.len(),
            pairwise,
            fit,
            error,
            pseudo_counts: response.is_latency(),
        }
    });

    let summary = stage2.iter().flat_map(summarize).collect();
    Ok(AnalysisReport {
        reference_date,
        stage1_scheme: WeightScheme::I,
        stage2_scheme: config.stage2_scheme,
        threshold: config.threshold,
        exclusions: outcome.report,
        comparison_institutions: outcome.institutions.len() - analysed.len(),
        institutions: data.clone(),
        latency_rows_without_mandate_age,
        stage1,
        screening,
        stage2,
        summary,
        notes,
    })
}

fn summarize(s: &Stage2Result) -> Vec<SummaryRow> {
    s.conditions
        .iter()
        .zip(&s.pairwise)
        .map(|(&condition, pair)| {
            let coef = s.fit.as_ref().and_then(|f| f.coefficient(condition.as_str()));
            let pairwise_direction = match pair.r {
                Some(r) if r > 0.0 => Direction::Positive,
                Some(r) if r < 0.0 => Direction::Negative,
                _ => Direction::NearZero,
            };
            let direction = match coef {
                Some(c) if c.near_zero => Direction::NearZero,
                Some(c) => match c.exp_beta {
                    Some(e) if e > 1.0 => Direction::Positive,
                    Some(e) if e < 1.0 => Direction::Negative,
                    _ => Direction::NearZero,
                },
                None => pairwise_direction,
            };
            SummaryRow {
                condition,
                response: s.response,
                direction,
                significant_nbr: coef.and_then(|c| c.p).is_some_and(|p| p < SIGNIFICANCE),
                significant_pairwise: pair.p.is_some_and(|p| p < SIGNIFICANCE),
            }
        })
        .collect()
}
