//! Seeded synthetic deposit corpora.
//!
//! Each institution draws from its own ChaCha stream (`seed`, institution
//! index), so output does not depend on execution order and parallel
//! generation is byte-identical to sequential generation.

use std::collections::HashSet;

use chrono::{Duration, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{AccessState, ArticleRecord, CorpusError, DepositCorpus, YearWindow, WOK_OFFSET_DAYS};
use crate::dates::DAYS_PER_MONTH;
use crate::par::{self, Execution};

const PROBABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateProbabilities {
    pub not_deposited: f64,
    pub metadata_only: f64,
    pub restricted: f64,
    pub open: f64,
}

impl StateProbabilities {
    pub fn sum(&self) -> f64 {
        self.not_deposited + self.metadata_only + self.restricted + self.open
    }

    fn check(&self, who: &str) -> Result<(), CorpusError> {
        let all = [self.not_deposited, self.metadata_only, self.restricted, self.open];
        if all.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(CorpusError::Config(format!("{who}: state probabilities must be non-negative")));
        }
        let sum = self.sum();
        if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(CorpusError::Config(format!("{who}: state probabilities sum to {sum}, not 1")));
        }
        Ok(())
    }

    fn draw(&self, u: f64) -> AccessState {
        let mut acc = self.open;
        if u < acc {
            return AccessState::OpenAccess;
        }
        acc += self.restricted;
        if u < acc {
            return AccessState::RestrictedAccess;
        }
        acc += self.metadata_only;
        if u < acc {
            return AccessState::MetadataOnly;
        }
        AccessState::NotDeposited
    }
}

/// Normal deposit latency in months.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatencyModel {
    pub mean_months: f64,
    pub sd_months: f64,
}

impl Default for LatencyModel {
    fn default() -> Self {
        LatencyModel { mean_months: 6.0, sd_months: 9.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstitutionProfile {
    pub id: String,
    pub articles: usize,
    pub states: StateProbabilities,
    #[serde(default)]
    pub latency: LatencyModel,
    /// Share of open deposits that started out restricted and were opened later.
    #[serde(default)]
    pub ra_conversion_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    #[serde(default)]
    pub window: YearWindow,
    pub disciplines: Vec<String>,
    /// Probability that an article has an altmetric date.
    #[serde(default = "default_altmetric_coverage")]
    pub altmetric_coverage: f64,
    pub institutions: Vec<InstitutionProfile>,
}

fn default_altmetric_coverage() -> f64 {
    0.7
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<(), CorpusError> {
        YearWindow::new(self.window.start, self.window.end)?;
        if self.disciplines.is_empty() || self.disciplines.iter().any(|d| d.trim().is_empty()) {
            return Err(CorpusError::Config("at least one non-empty discipline is required".into()));
        }
        if !(0.0..=1.0).contains(&self.altmetric_coverage) {
            return Err(CorpusError::Config("altmetric_coverage must lie in [0, 1]".into()));
        }
        let mut ids = HashSet::new();
        for inst in &self.institutions {
            if inst.id.is_empty() {
                return Err(CorpusError::Config("institution id must be non-empty".into()));
            }
            if !ids.insert(inst.id.as_str()) {
                return Err(CorpusError::Config(format!("duplicate institution `{}`", inst.id)));
            }
            inst.states.check(&inst.id)?;
            let l = inst.latency;
            if !l.mean_months.is_finite() || !l.sd_months.is_finite() || l.sd_months < 0.0 {
                return Err(CorpusError::Config(format!("{}: invalid latency model", inst.id)));
            }
            if !(0.0..=1.0).contains(&inst.ra_conversion_rate) {
                return Err(CorpusError::Config(format!("{}: ra_conversion_rate must lie in [0, 1]", inst.id)));
            }
        }
        Ok(())
    }
}

pub fn generate_synthetic(config: &SyntheticConfig, seed: u64) -> Result<DepositCorpus, CorpusError> {
    generate_synthetic_with(config, seed, Execution::default())
}

pub fn generate_synthetic_with(
    config: &SyntheticConfig,
    seed: u64,
    exec: Execution,
) -> Result<DepositCorpus, CorpusError> {
    config.validate()?;
    let first = NaiveDate::from_ymd_opt(config.window.start, 1, 1).expect("valid year");
    let last = NaiveDate::from_ymd_opt(config.window.end, 12, 31).expect("valid year");
    let span = (last - first).num_days();
    let disciplines: Vec<String> = config.disciplines.iter().map(|d| d.trim().to_lowercase()).collect();

    let per_institution = par::map_range(exec, config.institutions.len(), |idx| {
        let inst = &config.institutions[idx];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(idx as u64);
        let latency = Normal::new(inst.latency.mean_months, inst.latency.sd_months).expect("validated");
        (0..inst.articles)
            .map(|k| {
                let published = first + Duration::days(rng.random_range(0..=span));
                let discipline = disciplines[rng.random_range(0..disciplines.len())].clone();
                let has_altmetric = rng.random::<f64>() < config.altmetric_coverage;
                let state = inst.states.draw(rng.random::<f64>());
                let deposit_date = (state != AccessState::NotDeposited).then(|| {
                    let months: f64 = latency.sample(&mut rng);
                    published + Duration::days((months * DAYS_PER_MONTH).round() as i64)
                });
                let converted = state == AccessState::OpenAccess && rng.random::<f64>() < inst.ra_conversion_rate;
                let oa_conversion_date = match (converted, deposit_date) {
                    (true, Some(d)) => Some(d + Duration::days(rng.random_range(30..=730))),
                    _ => None,
                };
                ArticleRecord {
                    article_id: format!("{}-{:06}", inst.id, k),
                    institution_id: inst.id.clone(),
                    discipline,
                    wok_date: Some(published + Duration::days(WOK_OFFSET_DAYS)),
                    altmetric_date: has_altmetric.then_some(published),
                    deposit_date,
                    access_state: state,
                    oa_conversion_date,
                }
            })
            .collect::<Vec<_>>()
    });
    DepositCorpus::new(per_institution.into_iter().flatten().collect())
}
