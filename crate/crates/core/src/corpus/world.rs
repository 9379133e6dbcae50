//! Synthetic registry + corpus pairs with planted policy effects.
//!
//! Policy records are drawn so that every record passes validation and every
//! condition is encodable. Open Access deposit probability is log-linear in
//! the scheme II weights of the configured conditions, and mean deposit
//! latency falls linearly with mandate age. Everything else is noise.

use std::collections::BTreeMap;

use chrono::{Datelike, Duration, NaiveDate};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    generate_synthetic_with, CorpusError, DepositCorpus, InstitutionProfile, LatencyModel, StateProbabilities,
    SyntheticConfig, YearWindow,
};
use crate::dates::PolicyDate;
use crate::encoding::{encode_policy, Condition, WeightScheme};
use crate::par::Execution;
use crate::registry::*;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WorldConfig {
    /// Institutions with a policy record that pass every exclusion rule.
    pub policy_institutions: usize,
    /// Comparison institutions with no registry record.
    pub comparison_institutions: usize,
    /// Mandates adopted after the cutoff year.
    pub late_mandates: usize,
    /// Mandates whose locus of deposit is not the institutional repository.
    pub non_ir_mandates: usize,
    /// Institutions below the article threshold.
    pub small_institutions: usize,
    /// Share of policy records that require deposit.
    pub required_share: f64,
    pub min_articles: usize,
    pub max_articles: usize,
    pub window: YearWindow,
    pub disciplines: Vec<String>,
    pub reference_date: NaiveDate,
    /// Open deposit probability of an institution whose driving conditions
    /// are all zero.
    pub base_open: f64,
    pub restricted: f64,
    pub metadata_only: f64,
    /// Upper bound on the open deposit probability.
    pub max_open: f64,
    /// Log-scale effect of each condition's scheme II weight on the open
    /// deposit probability.
    pub open_effects: BTreeMap<Condition, f64>,
    pub latency_intercept_months: f64,
    /// Months of latency removed per year of mandate age.
    pub latency_per_mandate_year: f64,
    pub latency_sd_months: f64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            policy_institutions: 120,
            comparison_institutions: 10,
            late_mandates: 6,
            non_ir_mandates: 4,
            small_institutions: 4,
            required_share: 0.7,
            min_articles: 150,
            max_articles: 600,
            window: YearWindow::default(),
            disciplines: ["clinical medicine", "biology", "physics", "engineering", "humanities", "social sciences"]
                .map(String::from)
                .to_vec(),
            reference_date: NaiveDate::from_ymd_opt(2014, 11, 1).expect("valid date"),
            base_open: 0.04,
            restricted: 0.03,
            metadata_only: 0.06,
            max_open: 0.85,
            open_effects: BTreeMap::from([(Condition::MustDeposit, 0.9), (Condition::CannotWaiveDeposit, 0.7)]),
            latency_intercept_months: 16.0,
            latency_per_mandate_year: 1.6,
            latency_sd_months: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticWorld {
    pub registry: RegistrySnapshot,
    pub corpus_config: SyntheticConfig,
    pub corpus: DepositCorpus,
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, options: &[T]) -> T {
    *options.choose(rng).expect("non-empty option list")
}

fn random_date(rng: &mut ChaCha8Rng, from_year: i32, to_year: i32) -> NaiveDate {
    let first = NaiveDate::from_ymd_opt(from_year, 1, 1).expect("valid year");
    let last = NaiveDate::from_ymd_opt(to_year, 12, 31).expect("valid year");
    first + Duration::days(rng.random_range(0..=(last - first).num_days()))
}

/// A random record that validates cleanly and encodes under both schemes.
fn random_policy(rng: &mut ChaCha8Rng, id: String, required: bool, adopted: NaiveDate) -> PolicyRecord {
    let mut r = PolicyRecord::unspecified(id);
    r.region = pick(rng, Region::ALL);
    r.country = format!("{:?}", r.region);
    r.policymaker_type = pick(rng, &[PolicymakerType::ResearchOrg, PolicymakerType::SubUnit]);
    r.source_of_policy = pick(rng, SourceOfPolicy::ALL);
    r.adoption_date = Some(PolicyDate::day(adopted));
    r.deposit_of_item = if required {
        DepositOfItem::Required
    } else {
        pick(rng, &[DepositOfItem::Requested, DepositOfItem::Unspecified])
    };
    r.deposit_waivable = if required {
        pick(rng, &[Waivable::Yes, Waivable::No, Waivable::NotSpecified])
    } else {
        Waivable::NotApplicable
    };
    r.locus_of_deposit = LocusOfDeposit::InstitutionalRepository;
    r.date_of_deposit = pick(rng, DateOfDeposit::ALL);
    r.make_item_oa = pick(rng, &[MakeItemOa::Required, MakeItemOa::RequestedOrRecommended]);
    r.oa_waivable = pick(rng, &[Waivable::Yes, Waivable::No, Waivable::NotSpecified]);
    r.date_make_oa = pick(
        rng,
        &[
            DateMakeOa::AcceptanceDate,
            DateMakeOa::PublicationDate,
            DateMakeOa::EndOfPolicyEmbargo,
            DateMakeOa::WhenPublisherPermits,
            DateMakeOa::UponDeposit,
            DateMakeOa::NotMentioned,
            DateMakeOa::Other,
        ],
    );
    r.research_evaluation_condition = if rng.random::<f64>() < 0.15 {
        ResearchEvaluation::Yes
    } else {
        pick(rng, &[ResearchEvaluation::No, ResearchEvaluation::NotSpecified])
    };
    r.rights_holding = pick(
        rng,
        &[
            RightsHolding::AuthorRetains,
            RightsHolding::AuthorGrantsToInstitution,
            RightsHolding::InstitutionOrFunderRetains,
            RightsHolding::NoneOfThese,
            RightsHolding::NotMentioned,
        ],
    );
    r.rights_retention_waivable = match r.rights_holding {
        RightsHolding::AuthorGrantsToInstitution | RightsHolding::InstitutionOrFunderRetains => {
            pick(rng, &[Waivable::Yes, Waivable::No, Waivable::NotSpecified])
        }
        _ => Waivable::NotApplicable,
    };
    r.rights_grant_waivable = pick(rng, Waivable::ALL);
    r.open_licensing = pick(
        rng,
        &[
            OpenLicensing::NoReuseLicenceRequired,
            OpenLicensing::OpenLicenceUnspecified,
            OpenLicensing::CcBy,
            OpenLicensing::CcByNc,
            OpenLicensing::Other,
            OpenLicensing::NotSpecified,
        ],
    );
    if rng.random::<f64>() < 0.2 {
        r.embargo_stem = pick(rng, &[EmbargoLength::Zero, EmbargoLength::Six, EmbargoLength::Twelve]);
        r.embargo_hass = pick(rng, &[EmbargoLength::Zero, EmbargoLength::Six, EmbargoLength::Twelve]);
        r.embargo_waivable = pick(rng, &[Waivable::Yes, Waivable::No, Waivable::NotSpecified]);
    }
    r.gold_option = pick(
        rng,
        &[
            GoldOption::RecommendedAlternative,
            GoldOption::PermittedAlternative,
            GoldOption::NotSpecified,
            GoldOption::Other,
        ],
    );
    r.apc_funding = pick(rng, ApcFunding::ALL);
    r
}

pub fn generate_world(config: &WorldConfig, seed: u64) -> Result<SyntheticWorld, CorpusError> {
    generate_world_with(config, seed, Execution::default())
}

pub fn generate_world_with(config: &WorldConfig, seed: u64, exec: Execution) -> Result<SyntheticWorld, CorpusError> {
    if config.min_articles > config.max_articles {
        return Err(CorpusError::Config("min_articles exceeds max_articles".into()));
    }
    let fixed = config.restricted + config.metadata_only;
    if fixed + config.max_open > 1.0 || config.base_open < 0.0 || config.max_open < config.base_open {
        return Err(CorpusError::Config("open/restricted/metadata-only probabilities do not fit in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);

    let cutoff_year = 2011;
    let mut records = Vec::new();
    let mut profiles = Vec::new();
    let mut next_id = 0usize;
    let mut id = |prefix: &str| {
        next_id += 1;
        format!("{prefix}-{next_id:04}")
    };

    let mut add_institution =
        |record: Option<PolicyRecord>, id: String, articles: usize, rng: &mut ChaCha8Rng| -> Result<(), CorpusError> {
            let (open, mean) = match &record {
                Some(r) => {
                    let enc = encode_policy(r, WeightScheme::II, config.reference_date)
                        .map_err(|e| CorpusError::Config(e.to_string()))?;
                    let lin: f64 =
                        config.open_effects.iter().map(|(c, beta)| beta * enc.get(*c).unwrap_or(0.0)).sum();
                    let age = enc.mandate_age.unwrap_or(0.0);
                    (
                        (config.base_open * lin.exp()).min(config.max_open),
                        config.latency_intercept_months - config.latency_per_mandate_year * age,
                    )
                }
                None => (config.base_open, config.latency_intercept_months),
            };
            profiles.push(InstitutionProfile {
                id,
                articles,
                states: StateProbabilities {
                    not_deposited: 1.0 - open - fixed,
                    metadata_only: config.metadata_only,
                    restricted: config.restricted,
                    open,
                },
                latency: LatencyModel { mean_months: mean, sd_months: config.latency_sd_months },
                ra_conversion_rate: rng.random_range(0.0..0.3),
            });
            if let Some(r) = record {
                records.push(r);
            }
            Ok(())
        };

    let articles = |rng: &mut ChaCha8Rng| rng.random_range(config.min_articles..=config.max_articles);

    for _ in 0..config.policy_institutions {
        let inst = id("inst");
        let required = rng.random::<f64>() < config.required_share;
        let adopted = random_date(&mut rng, 2003, cutoff_year);
        let record = random_policy(&mut rng, inst.clone(), required, adopted);
        let n = articles(&mut rng);
        add_institution(Some(record), inst, n, &mut rng)?;
    }
    for _ in 0..config.late_mandates {
        let inst = id("late");
        let adopted = random_date(&mut rng, cutoff_year + 1, config.reference_date.year());
        let adopted = adopted.min(config.reference_date);
        let record = random_policy(&mut rng, inst.clone(), true, adopted);
        let n = articles(&mut rng);
        add_institution(Some(record), inst, n, &mut rng)?;
    }
    for _ in 0..config.non_ir_mandates {
        let inst = id("nonir");
        let adopted = random_date(&mut rng, 2003, cutoff_year);
        let mut record = random_policy(&mut rng, inst.clone(), true, adopted);
        record.locus_of_deposit = LocusOfDeposit::AnySuitable;
        let n = articles(&mut rng);
        add_institution(Some(record), inst, n, &mut rng)?;
    }
    for _ in 0..config.small_institutions {
        let inst = id("small");
        let adopted = random_date(&mut rng, 2003, cutoff_year);
        let record = random_policy(&mut rng, inst.clone(), true, adopted);
        let n = rng.random_range(5..50);
        add_institution(Some(record), inst, n, &mut rng)?;
    }
    for _ in 0..config.comparison_institutions {
        let inst = id("comp");
        let n = articles(&mut rng);
        add_institution(None, inst, n, &mut rng)?;
    }

    let registry = RegistrySnapshot::new(config.reference_date, records)
        .map_err(|e| CorpusError::Config(e.to_string()))?;
    let corpus_config = SyntheticConfig {
        window: config.window,
        disciplines: config.disciplines.clone(),
        altmetric_coverage: 0.7,
        institutions: profiles,
    };
    let corpus = generate_synthetic_with(&corpus_config, seed, exec)?;
    Ok(SyntheticWorld { registry, corpus_config, corpus })
}
