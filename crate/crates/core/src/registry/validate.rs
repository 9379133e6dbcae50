//! Contradiction and ordering checks for classified policy records.
//!
//! A waiver option only makes sense when the condition it waives is active.
//! Each rule below pairs a waiver criterion with its parent condition; when
//! the parent is inactive the waiver must be `not_applicable`.
//!
//! | rule | parent condition active when                           | waiver field                |
//! |------|---------------------------------------------------------|-----------------------------|
//! | V1   | `deposit_of_item = required`                            | `deposit_waivable`          |
//! | V2   | `make_item_oa ∈ {required, requested_or_recommended}`   | `oa_waivable`               |
//! | V3   | `rights_holding` grants or retains rights institutionally | `rights_retention_waivable` |
//! | V4   | either embargo length is specified                      | `embargo_waivable`          |
//!
//! Dates must satisfy adoption ≤ effective ≤ last revision for every pair
//! that is present.

use serde::Serialize;

use super::{
    DepositOfItem, EmbargoLength, MakeItemOa, PolicyRecord, RegistrySnapshot, RightsHolding, Waivable,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationRule {
    /// V1
    DepositWaiverWithoutRequirement,
    /// V2
    OaWaiverWithoutRequirement,
    /// V3
    RightsRetentionWaiverWithoutGrant,
    /// V4
    EmbargoWaiverWithoutEmbargo,
    DateOrder,
}

impl ViolationRule {
    pub fn code(self) -> &'static str {
        match self {
            ViolationRule::DepositWaiverWithoutRequirement => "V1",
            ViolationRule::OaWaiverWithoutRequirement => "V2",
            ViolationRule::RightsRetentionWaiverWithoutGrant => "V3",
            ViolationRule::EmbargoWaiverWithoutEmbargo => "V4",
            ViolationRule::DateOrder => "date_order",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub rule: ViolationRule,
    pub message: String,
}

/// Every rule `record` breaks. An empty list means the record is internally
/// consistent.
pub fn validate_policy(record: &PolicyRecord) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut waiver = |active: bool, value: Waivable, field: &'static str, rule: ViolationRule, parent: String| {
        if !active && value != Waivable::NotApplicable {
            out.push(Violation {
                field,
                rule,
                message: format!("{field} is `{value}` but {parent}; expected `not_applicable`"),
            });
        }
    };

    waiver(
        record.deposit_of_item == DepositOfItem::Required,
        record.deposit_waivable,
        "deposit_waivable",
        ViolationRule::DepositWaiverWithoutRequirement,
        format!("deposit_of_item is `{}`", record.deposit_of_item),
    );
    waiver(
        matches!(record.make_item_oa, MakeItemOa::Required | MakeItemOa::RequestedOrRecommended),
        record.oa_waivable,
        "oa_waivable",
        ViolationRule::OaWaiverWithoutRequirement,
        format!("make_item_oa is `{}`", record.make_item_oa),
    );
    waiver(
        matches!(
            record.rights_holding,
            RightsHolding::AuthorGrantsToInstitution | RightsHolding::InstitutionOrFunderRetains
        ),
        record.rights_retention_waivable,
        "rights_retention_waivable",
        ViolationRule::RightsRetentionWaiverWithoutGrant,
        format!("rights_holding is `{}`", record.rights_holding),
    );
    waiver(
        record.embargo_stem != EmbargoLength::NotSpecified || record.embargo_hass != EmbargoLength::NotSpecified,
        record.embargo_waivable,
        "embargo_waivable",
        ViolationRule::EmbargoWaiverWithoutEmbargo,
        "no embargo length is specified".to_string(),
    );

    let dates = [
        ("adoption_date", record.adoption_date),
        ("effective_date", record.effective_date),
        ("last_revision_date", record.last_revision_date),
    ];
    for (i, (earlier_name, earlier)) in dates.iter().enumerate() {
        for (later_name, later) in &dates[i + 1..] {
            if let (Some(a), Some(b)) = (earlier, later) {
                if a.date > b.date {
                    out.push(Violation {
                        field: later_name,
                        rule: ViolationRule::DateOrder,
                        message: format!("{later_name} {b} precedes {earlier_name} {a}"),
                    });
                }
            }
        }
    }
    out
}

/// Violations for every record in the snapshot, keyed by record id, in
/// snapshot order. Records without violations are omitted.
pub fn validate_snapshot(snapshot: &RegistrySnapshot) -> Vec<(String, Vec<Violation>)> {
    snapshot
        .records()
        .iter()
        .filter_map(|r| {
            let v = validate_policy(r);
            (!v.is_empty()).then(|| (r.id.clone(), v))
        })
        .collect()
}
