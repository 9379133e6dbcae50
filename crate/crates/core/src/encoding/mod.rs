//! Numeric encoding of policy conditions.
//!
//! Thirteen conditions are read from policy records and mapped through an
//! option-weight table (scheme I graded, scheme II mostly all-or-none). The
//! continuous covariate [`Condition::MandateAge`] is computed from the
//! adoption date instead of being looked up.

mod table;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::par::{self, Execution};
use crate::registry::{mandate_age, PolicyRecord, RegistryError, RegistrySnapshot};

schema_enum! {
    /// A policy condition used as an independent variable.
    pub enum Condition {
        ResearchEvaluation => "research_evaluation",
        MustDeposit => "must_deposit",
        MustMakeOa => "must_make_oa",
        CannotWaiveDeposit => "cannot_waive_deposit",
        CannotWaiveOa => "cannot_waive_oa",
        CannotWaiveRightsRetention => "cannot_waive_rights_retention",
        DepositImmediately => "deposit_immediately",
        MakeOaImmediately => "make_oa_immediately",
        EmbargoStem => "embargo_stem",
        EmbargoHass => "embargo_hass",
        DepositInIr => "deposit_in_ir",
        MustRetainRights => "must_retain_rights",
        OpenLicensing => "open_licensing",
        /// Years since adoption; continuous, never looked up in a table.
        MandateAge => "mandate_age",
    }
}

impl Condition {
    /// The thirteen table-weighted conditions, in table order.
    pub const WEIGHTED: [Condition; 13] = [
        Condition::ResearchEvaluation,
        Condition::MustDeposit,
        Condition::MustMakeOa,
        Condition::CannotWaiveDeposit,
        Condition::CannotWaiveOa,
        Condition::CannotWaiveRightsRetention,
        Condition::DepositImmediately,
        Condition::MakeOaImmediately,
        Condition::EmbargoStem,
        Condition::EmbargoHass,
        Condition::DepositInIr,
        Condition::MustRetainRights,
        Condition::OpenLicensing,
    ];

    pub fn is_continuous(self) -> bool {
        self == Condition::MandateAge
    }

    /// Human-readable label used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            Condition::ResearchEvaluation => "Research evaluation",
            Condition::MustDeposit => "Must deposit",
            Condition::MustMakeOa => "Must make OA",
            Condition::CannotWaiveDeposit => "Cannot waive deposit",
            Condition::CannotWaiveOa => "Cannot waive OA",
            Condition::CannotWaiveRightsRetention => "Cannot waive rights retention",
            Condition::DepositImmediately => "Deposit immediately",
            Condition::MakeOaImmediately => "Make OA immediately",
            Condition::EmbargoStem => "Embargo permitted: STEM",
            Condition::EmbargoHass => "Embargo permitted: HaSS",
            Condition::DepositInIr => "Deposit in institutional repository",
            Condition::MustRetainRights => "Must retain rights",
            Condition::OpenLicensing => "Open licensing",
            Condition::MandateAge => "Mandate age",
        }
    }

    fn table_index(self) -> Option<usize> {
        Condition::WEIGHTED.iter().position(|&c| c == self)
    }

    /// The registry option string this condition reads from `record`, or
    /// `None` for the continuous covariate.
    pub fn option_of(self, record: &PolicyRecord) -> Option<&'static str> {
        Some(match self {
            Condition::ResearchEvaluation => record.research_evaluation_condition.as_str(),
            Condition::MustDeposit => record.deposit_of_item.as_str(),
            Condition::MustMakeOa => record.make_item_oa.as_str(),
            Condition::CannotWaiveDeposit => record.deposit_waivable.as_str(),
            Condition::CannotWaiveOa => record.oa_waivable.as_str(),
            Condition::CannotWaiveRightsRetention => record.rights_retention_waivable.as_str(),
            Condition::DepositImmediately => record.date_of_deposit.as_str(),
            Condition::MakeOaImmediately => record.date_make_oa.as_str(),
            Condition::EmbargoStem => record.embargo_stem.as_str(),
            Condition::EmbargoHass => record.embargo_hass.as_str(),
            Condition::DepositInIr => record.locus_of_deposit.as_str(),
            Condition::MustRetainRights => record.rights_holding.as_str(),
            Condition::OpenLicensing => record.open_licensing.as_str(),
            Condition::MandateAge => return None,
        })
    }
}

/// Option-weight scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum WeightScheme {
    /// Graded a priori weights.
    #[default]
    I,
    /// Dichotomised weights.
    II,
}

impl WeightScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightScheme::I => "I",
            WeightScheme::II => "II",
        }
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightScheme {
    type Err = EncodingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "I" | "i" | "1" => Ok(WeightScheme::I),
            "II" | "ii" | "2" => Ok(WeightScheme::II),
            other => Err(EncodingError::UnknownScheme(other.to_string())),
        }
    }
}

impl Serialize for WeightScheme {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for WeightScheme {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EncodingError {
    #[error("record `{record}`: option `{option}` has no weight for condition `{condition}`")]
    UnlistedOption { record: String, condition: Condition, option: String },
    #[error("no weight for option `{option}` of condition `{condition}`")]
    UnknownPair { condition: Condition, option: String },
    #[error("at least one condition is required")]
    EmptyConditions,
    #[error("condition `{0}` requested twice")]
    DuplicateCondition(Condition),
    #[error("institution `{0}` has no policy record")]
    UnresolvedInstitution(String),
    #[error("institution `{0}` requested twice")]
    DuplicateInstitution(String),
    #[error("institution `{0}` has no adoption date, so mandate age is undefined")]
    MissingMandateAge(String),
    #[error("unknown weight scheme `{0}` (expected I or II)")]
    UnknownScheme(String),
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

/// Weights of every listed (condition, option) pair under one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct OptionWeightTable {
    pub scheme: WeightScheme,
    weights: BTreeMap<(Condition, &'static str), f64>,
}

impl OptionWeightTable {
    fn from_builtin(scheme: WeightScheme) -> Self {
        let weights = table::WEIGHTS
            .iter()
            .map(|&(c, opt, w1, w2)| {
                let w = match scheme {
                    WeightScheme::I => w1,
                    WeightScheme::II => w2,
                };
                ((c, opt), w)
            })
            .collect();
        OptionWeightTable { scheme, weights }
    }

    /// The shared built-in table for `scheme`.
    pub fn builtin(scheme: WeightScheme) -> &'static OptionWeightTable {
        static TABLES: OnceLock<(OptionWeightTable, OptionWeightTable)> = OnceLock::new();
        let (one, two) = TABLES.get_or_init(|| {
            (
                OptionWeightTable::from_builtin(WeightScheme::I),
                OptionWeightTable::from_builtin(WeightScheme::II),
            )
        });
        match scheme {
            WeightScheme::I => one,
            WeightScheme::II => two,
        }
    }

    /// Weight of `option` under `condition`. Twenty-four-month embargoes
    /// take the "longer" weight; any other unlisted pair is an error.
    pub fn weight(&self, condition: Condition, option: &str) -> Result<f64, EncodingError> {
        let key = match (condition, option) {
            (Condition::EmbargoStem | Condition::EmbargoHass, "twenty_four") => "longer",
            _ => option,
        };
        self.weights.get(&(condition, key)).copied().ok_or_else(|| EncodingError::UnknownPair {
            condition,
            option: option.to_string(),
        })
    }

    /// All listed entries, ordered by condition then option.
    pub fn entries(&self) -> impl Iterator<Item = (Condition, &'static str, f64)> + '_ {
        self.weights.iter().map(|(&(c, o), &w)| (c, o, w))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// The scheme I and scheme II tables.
pub fn builtin_weight_tables() -> (OptionWeightTable, OptionWeightTable) {
    (
        OptionWeightTable::builtin(WeightScheme::I).clone(),
        OptionWeightTable::builtin(WeightScheme::II).clone(),
    )
}

/// The thirteen weighted conditions plus mandate age for one policy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EncodedPolicy {
    pub scheme: WeightScheme,
    pub values: [f64; 13],
    /// `None` when the record has no adoption date.
    pub mandate_age: Option<f64>,
}

impl EncodedPolicy {
    pub fn get(&self, condition: Condition) -> Option<f64> {
        match condition.table_index() {
            Some(i) => Some(self.values[i]),
            None => self.mandate_age,
        }
    }
}

pub fn encode_policy(
    record: &PolicyRecord,
    scheme: WeightScheme,
    reference_date: NaiveDate,
) -> Result<EncodedPolicy, EncodingError> {
    let table = OptionWeightTable::builtin(scheme);
    let mut values = [0.0; 13];
    for (slot, condition) in values.iter_mut().zip(Condition::WEIGHTED) {
        let option = condition.option_of(record).expect("weighted conditions read an option");
        *slot = table.weight(condition, option).map_err(|_| EncodingError::UnlistedOption {
            record: record.id.clone(),
            condition,
            option: option.to_string(),
        })?;
    }
    let mandate_age = match record.adoption_date {
        Some(_) => Some(mandate_age(record, reference_date)?),
        None => None,
    };
    Ok(EncodedPolicy { scheme, values, mandate_age })
}

/// Per-institution condition values, one row per institution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignMatrix {
    pub scheme: WeightScheme,
    pub institutions: Vec<String>,
    pub columns: Vec<Condition>,
    /// Row-major; `values[i][j]` is institution `i`, column `j`.
    pub values: Vec<Vec<f64>>,
}

impl DesignMatrix {
    pub fn n_rows(&self) -> usize {
        self.institutions.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[j]).collect()
    }

    pub fn column_of(&self, condition: Condition) -> Option<Vec<f64>> {
        self.columns.iter().position(|&c| c == condition).map(|j| self.column(j))
    }

    /// CSV with header `institution_id,<condition>...` and four decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("institution_id");
        for c in &self.columns {
            out.push(',');
            out.push_str(c.as_str());
        }
        out.push('\n');
        for (id, row) in self.institutions.iter().zip(&self.values) {
            out.push_str(&csv_field(id));
            for v in row {
                out.push_str(&format!(",{v:.4}"));
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn build_design_matrix<S: AsRef<str> + Sync>(
    snapshot: &RegistrySnapshot,
    institutions: &[S],
    scheme: WeightScheme,
    conditions: &[Condition],
    reference_date: NaiveDate,
) -> Result<DesignMatrix, EncodingError> {
    build_design_matrix_with(snapshot, institutions, scheme, conditions, reference_date, Execution::default())
}

/// [`build_design_matrix`] with explicit execution; rows are encoded
/// independently and assembled in request order.
pub fn build_design_matrix_with<S: AsRef<str> + Sync>(
    snapshot: &RegistrySnapshot,
    institutions: &[S],
    scheme: WeightScheme,
    conditions: &[Condition],
    reference_date: NaiveDate,
    exec: Execution,
) -> Result<DesignMatrix, EncodingError> {
    if conditions.is_empty() {
        return Err(EncodingError::EmptyConditions);
    }
    let mut seen = HashSet::new();
    for &c in conditions {
        if !seen.insert(c) {
            return Err(EncodingError::DuplicateCondition(c));
        }
    }
    let index = snapshot.index();
    let mut seen = HashSet::new();
    let mut records = Vec::with_capacity(institutions.len());
    for id in institutions {
        let id = id.as_ref();
        if !seen.insert(id) {
            return Err(EncodingError::DuplicateInstitution(id.to_string()));
        }
        let record = index.get(id).ok_or_else(|| EncodingError::UnresolvedInstitution(id.to_string()))?;
        records.push(*record);
    }
    let values = par::try_map(exec, &records, |record| {
        let enc = encode_policy(record, scheme, reference_date)?;
        conditions
            .iter()
            .map(|&c| enc.get(c).ok_or_else(|| EncodingError::MissingMandateAge(record.id.clone())))
            .collect::<Result<Vec<f64>, _>>()
    })?;
    Ok(DesignMatrix {
        scheme,
        institutions: records.iter().map(|r| r.id.clone()).collect(),
        columns: conditions.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::*;

    fn date(s: &str) -> NaiveDate {
        crate::dates::parse_iso_date(s).unwrap()
    }

    #[test]
    fn spot_weights() {
        let (one, two) = builtin_weight_tables();
        assert_eq!(one.weight(Condition::ResearchEvaluation, "yes"), Ok(1.0));
        assert_eq!(two.weight(Condition::ResearchEvaluation, "yes"), Ok(1.0));
        assert_eq!(one.weight(Condition::CannotWaiveDeposit, "not_applicable"), Ok(0.50));
        assert_eq!(two.weight(Condition::CannotWaiveDeposit, "not_applicable"), Ok(0.0));
        assert_eq!(one.weight(Condition::MakeOaImmediately, "publication_date"), Ok(0.75));
        assert_eq!(two.weight(Condition::MakeOaImmediately, "publication_date"), Ok(1.0));
        assert_eq!(one.len(), 57);
    }

    #[test]
    fn twenty_four_month_embargo_takes_longer_weight() {
        let t = OptionWeightTable::builtin(WeightScheme::I);
        assert_eq!(t.weight(Condition::EmbargoStem, "twenty_four"), Ok(0.0));
        // no "longer" row exists for HaSS, so both stay unlisted
        assert!(t.weight(Condition::EmbargoHass, "longer").is_err());
        assert!(t.weight(Condition::EmbargoHass, "twenty_four").is_err());
    }

    #[test]
    fn mandate_age_is_never_in_a_table() {
        let (one, two) = builtin_weight_tables();
        assert!(one.entries().chain(two.entries()).all(|(c, _, _)| !c.is_continuous()));
        assert!(Condition::MandateAge.option_of(&PolicyRecord::unspecified("u")).is_none());
    }

    fn consistent_record(id: &str) -> PolicyRecord {
        let mut r = PolicyRecord::unspecified(id);
        r.deposit_of_item = DepositOfItem::Required;
        r.deposit_waivable = Waivable::No;
        r.make_item_oa = MakeItemOa::Required;
        r.oa_waivable = Waivable::NotSpecified;
        r.locus_of_deposit = LocusOfDeposit::InstitutionalRepository;
        r.adoption_date = Some("2008-01-01".parse().unwrap());
        r
    }

    #[test]
    fn encode_examples() {
        let mut r = consistent_record("u");
        r.deposit_of_item = DepositOfItem::Requested;
        r.date_of_deposit = DateOfDeposit::AtAcceptance;
        r.rights_retention_waivable = Waivable::NotApplicable;
        let ref_date = date("2014-01-01");
        let one = encode_policy(&r, WeightScheme::I, ref_date).unwrap();
        let two = encode_policy(&r, WeightScheme::II, ref_date).unwrap();
        assert_eq!(one.get(Condition::MustDeposit), Some(0.10));
        assert_eq!(two.get(Condition::MustDeposit), Some(0.0));
        assert_eq!(one.get(Condition::DepositImmediately), Some(1.0));
        assert_eq!(two.get(Condition::DepositImmediately), Some(1.0));
        assert_eq!(one.get(Condition::CannotWaiveRightsRetention), Some(1.0));
        assert_eq!(two.get(Condition::CannotWaiveRightsRetention), Some(1.0));
        assert_eq!(one.get(Condition::MandateAge), Some(2192.0 / 365.25));
    }

    #[test]
    fn unlisted_option_names_the_pair() {
        let mut r = consistent_record("u");
        r.locus_of_deposit = LocusOfDeposit::SubjectRepository;
        let err = encode_policy(&r, WeightScheme::I, date("2014-01-01")).unwrap_err();
        assert_eq!(
            err,
            EncodingError::UnlistedOption {
                record: "u".into(),
                condition: Condition::DepositInIr,
                option: "subject_repository".into()
            }
        );
    }

    #[test]
    fn missing_adoption_date_marks_mandate_age_absent() {
        let mut r = consistent_record("u");
        r.adoption_date = None;
        let enc = encode_policy(&r, WeightScheme::I, date("2014-01-01")).unwrap();
        assert_eq!(enc.get(Condition::MandateAge), None);
    }

    #[test]
    fn design_matrix_composes_encodings() {
        let mut a = consistent_record("a");
        a.research_evaluation_condition = ResearchEvaluation::Yes;
        let mut b = consistent_record("b");
        b.deposit_of_item = DepositOfItem::Requested;
        b.deposit_waivable = Waivable::NotApplicable;
        let snap = RegistrySnapshot::new(date("2015-01-01"), vec![a, b]).unwrap();
        let cols = [Condition::MustDeposit, Condition::ResearchEvaluation];
        let m = build_design_matrix(&snap, &["b", "a"], WeightScheme::I, &cols, date("2014-01-01")).unwrap();
        assert_eq!(m.institutions, vec!["b", "a"]);
        assert_eq!(m.values, vec![vec![0.10, 0.0], vec![1.0, 1.0]]);
        assert_eq!(m.to_csv(), "institution_id,must_deposit,research_evaluation\nb,0.1000,0.0000\na,1.0000,1.0000\n");
    }

    #[test]
    fn design_matrix_errors() {
        let snap = RegistrySnapshot::new(date("2015-01-01"), vec![consistent_record("a")]).unwrap();
        let d = date("2014-01-01");
        assert_eq!(
            build_design_matrix(&snap, &["a"], WeightScheme::I, &[], d),
            Err(EncodingError::EmptyConditions)
        );
        assert_eq!(
            build_design_matrix(&snap, &["zz"], WeightScheme::I, &[Condition::MustDeposit], d),
            Err(EncodingError::UnresolvedInstitution("zz".into()))
        );
        assert_eq!(
            build_design_matrix(&snap, &["a", "a"], WeightScheme::I, &[Condition::MustDeposit], d),
            Err(EncodingError::DuplicateInstitution("a".into()))
        );
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("I".parse::<WeightScheme>().unwrap(), WeightScheme::I);
        assert_eq!("II".parse::<WeightScheme>().unwrap(), WeightScheme::II);
        assert!("III".parse::<WeightScheme>().is_err());
        assert_eq!("mandate_age".parse::<Condition>().unwrap(), Condition::MandateAge);
    }
}
