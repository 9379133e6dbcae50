//! Policy registry: schema, snapshot I/O, validation and mandate queries.

mod schema;
mod validate;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dates::{self, days_between, PolicyDate, DAYS_PER_YEAR};

pub use schema::*;
pub use validate::{validate_policy, validate_snapshot, Violation, ViolationRule};

/// A string that is not one of an enum's listed options.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownVariant {
    pub kind: &'static str,
    pub value: String,
    pub expected: &'static [&'static str],
}

impl fmt::Display for UnknownVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown {} value `{}` (expected one of: {})",
            self.kind,
            self.value,
            self.expected.join(", ")
        )
    }
}

impl std::error::Error for UnknownVariant {}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegistryError {
    #[error("malformed registry JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("registry document: {0}")]
    Document(String),
    #[error("record `{record}`: field `{field}` has unknown value `{value}`; {expected}")]
    UnknownValue { record: String, field: String, value: String, expected: String },
    #[error("record `{record}`: field `{field}`: {message}")]
    Field { record: String, field: String, message: String },
    #[error("duplicate record id `{0}`")]
    DuplicateId(String),
    #[error("record `{0}` has no adoption date")]
    MissingAdoptionDate(String),
    #[error("record `{record}`: reference date {reference} precedes adoption date {adoption}")]
    ReferenceBeforeAdoption { record: String, reference: NaiveDate, adoption: NaiveDate },
}

/// One policy classified under the registry schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyRecord {
    pub id: String,
    pub policymaker_name: String,
    #[serde(default)]
    pub policymaker_url: Option<String>,
    #[serde(default)]
    pub policy_url: Option<String>,
    #[serde(default)]
    pub repository_url: Option<String>,
    pub region: Region,
    pub country: String,
    pub policymaker_type: PolicymakerType,
    pub source_of_policy: SourceOfPolicy,
    #[serde(default)]
    pub adoption_date: Option<PolicyDate>,
    #[serde(default)]
    pub effective_date: Option<PolicyDate>,
    #[serde(default)]
    pub last_revision_date: Option<PolicyDate>,
    pub deposit_of_item: DepositOfItem,
    pub locus_of_deposit: LocusOfDeposit,
    pub date_of_deposit: DateOfDeposit,
    pub deposit_waivable: Waivable,
    pub make_item_oa: MakeItemOa,
    pub oa_waivable: Waivable,
    pub date_make_oa: DateMakeOa,
    pub research_evaluation_condition: ResearchEvaluation,
    pub rights_retention_waivable: Waivable,
    pub open_licensing: OpenLicensing,
    pub rights_holding: RightsHolding,
    pub rights_grant_waivable: Waivable,
    pub embargo_stem: EmbargoLength,
    pub embargo_hass: EmbargoLength,
    pub embargo_waivable: Waivable,
    pub gold_option: GoldOption,
    pub apc_funding: ApcFunding,
    #[serde(default)]
    pub apc_fund_url: Option<String>,
}

impl PolicyRecord {
    /// A record with every criterion at its least committal option.
    /// Handy as a base for fixtures.
    pub fn unspecified(id: impl Into<String>) -> Self {
        let id = id.into();
        PolicyRecord {
            policymaker_name: id.clone(),
            id,
            policymaker_url: None,
            policy_url: None,
            repository_url: None,
            region: Region::Europe,
            country: String::new(),
            policymaker_type: PolicymakerType::Unspecified,
            source_of_policy: SourceOfPolicy::NotMentioned,
            adoption_date: None,
            effective_date: None,
            last_revision_date: None,
            deposit_of_item: DepositOfItem::Unspecified,
            locus_of_deposit: LocusOfDeposit::NotSpecified,
            date_of_deposit: DateOfDeposit::NotSpecified,
            deposit_waivable: Waivable::NotApplicable,
            make_item_oa: MakeItemOa::NotMentioned,
            oa_waivable: Waivable::NotApplicable,
            date_make_oa: DateMakeOa::NotMentioned,
            research_evaluation_condition: ResearchEvaluation::NotSpecified,
            rights_retention_waivable: Waivable::NotApplicable,
            open_licensing: OpenLicensing::NotSpecified,
            rights_holding: RightsHolding::NotMentioned,
            rights_grant_waivable: Waivable::NotApplicable,
            embargo_stem: EmbargoLength::NotSpecified,
            embargo_hass: EmbargoLength::NotSpecified,
            embargo_waivable: Waivable::NotApplicable,
            gold_option: GoldOption::NotSpecified,
            apc_funding: ApcFunding::NotMentioned,
            apc_fund_url: None,
        }
    }

    /// A mandate requires repository deposit or requires Open Access
    /// publishing.
    pub fn is_mandate(&self) -> bool {
        is_mandate(self)
    }
}

/// True iff deposit is required or Gold OA publishing is required.
pub fn is_mandate(record: &PolicyRecord) -> bool {
    record.deposit_of_item == DepositOfItem::Required || record.gold_option == GoldOption::Required
}

/// Years elapsed from adoption to `reference`, at day resolution
/// (days / 365.25).
pub fn mandate_age(record: &PolicyRecord, reference: NaiveDate) -> Result<f64, RegistryError> {
    let adoption = record
        .adoption_date
        .ok_or_else(|| RegistryError::MissingAdoptionDate(record.id.clone()))?
        .date;
    let days = days_between(adoption, reference);
    if days < 0 {
        return Err(RegistryError::ReferenceBeforeAdoption {
            record: record.id.clone(),
            reference,
            adoption,
        });
    }
    Ok(days as f64 / DAYS_PER_YEAR)
}

/// An ordered set of policy records exported on one date.
#[derive(Debug, Clone, PartialEq)]
pub struct RegistrySnapshot {
    pub snapshot_date: NaiveDate,
    records: Vec<PolicyRecord>,
}

impl RegistrySnapshot {
    pub fn new(snapshot_date: NaiveDate, records: Vec<PolicyRecord>) -> Result<Self, RegistryError> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if !seen.insert(r.id.as_str()) {
                return Err(RegistryError::DuplicateId(r.id.clone()));
            }
        }
        Ok(RegistrySnapshot { snapshot_date, records })
    }

    pub fn records(&self) -> &[PolicyRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&PolicyRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Id-keyed view for repeated lookups.
    pub fn index(&self) -> BTreeMap<&str, &PolicyRecord> {
        self.records.iter().map(|r| (r.id.as_str(), r)).collect()
    }

    /// Keeps only the records `keep` accepts.
    pub fn filtered(&self, mut keep: impl FnMut(&PolicyRecord) -> bool) -> RegistrySnapshot {
        RegistrySnapshot {
            snapshot_date: self.snapshot_date,
            records: self.records.iter().filter(|r| keep(r)).cloned().collect(),
        }
    }
}

#[derive(Serialize)]
struct DocumentOut<'a> {
    #[serde(with = "dates::iso")]
    snapshot_date: NaiveDate,
    records: &'a [PolicyRecord],
}

/// Parses a registry document `{snapshot_date, records: [...]}`.
pub fn parse_registry(text: &str) -> Result<RegistrySnapshot, RegistryError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| RegistryError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Value::Object(mut obj) = doc else {
        return Err(RegistryError::Document("top level must be an object".into()));
    };
    if let Some(key) = obj.keys().find(|k| *k != "snapshot_date" && *k != "records") {
        return Err(RegistryError::Document(format!("unknown key `{key}`")));
    }
    let snapshot_date = match obj.remove("snapshot_date") {
        Some(Value::String(s)) => {
            dates::parse_iso_date(&s).map_err(|e| RegistryError::Document(format!("snapshot_date: {e}")))?
        }
        Some(_) => return Err(RegistryError::Document("snapshot_date must be a string".into())),
        None => return Err(RegistryError::Document("missing snapshot_date".into())),
    };
    let records = match obj.remove("records") {
        Some(Value::Array(items)) => items,
        Some(_) => return Err(RegistryError::Document("records must be an array".into())),
        None => return Err(RegistryError::Document("missing records".into())),
    };
    let records = records
        .into_iter()
        .enumerate()
        .map(|(i, v)| parse_record(i, v))
        .collect::<Result<Vec<_>, _>>()?;
    RegistrySnapshot::new(snapshot_date, records)
}

fn parse_record(index: usize, value: Value) -> Result<PolicyRecord, RegistryError> {
    let label = value
        .get("id")
        .and_then(Value::as_str)
        .map(str::to_string)
        .unwrap_or_else(|| format!("#{index}"));
    let raw = value.clone();
    serde_path_to_error::deserialize::<_, PolicyRecord>(value).map_err(|err| {
        let field = err.path().to_string();
        let message = err.inner().to_string();
        if let (Some(bad), true) = (
            raw.get(&field).and_then(Value::as_str),
            message.starts_with("unknown variant"),
        ) {
            let expected = message
                .split_once(", ")
                .map(|(_, rest)| rest.to_string())
                .unwrap_or_default();
            return RegistryError::UnknownValue {
                record: label.clone(),
                field: field.clone(),
                value: bad.to_string(),
                expected,
            };
        }
        RegistryError::Field { record: label.clone(), field, message }
    })
}

/// Canonical JSON form: two-space indentation, schema field order, absent
/// optional values written as `null`, trailing newline.
pub fn serialize_registry(snapshot: &RegistrySnapshot) -> String {
    let doc = DocumentOut { snapshot_date: snapshot.snapshot_date, records: &snapshot.records };
    let mut out = serde_json::to_string_pretty(&doc).expect("registry serialization is infallible");
    out.push('\n');
    out
}
