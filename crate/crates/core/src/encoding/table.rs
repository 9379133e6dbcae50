//! Built-in option weights for the thirteen policy conditions.
//!
//! Each row is `(condition, option, weight under scheme I, weight under
//! scheme II)`; options are the registry wire strings of the field the
//! condition reads. Options that do not appear here have no weight.

use super::Condition::{self, *};

pub(super) const WEIGHTS: &[(Condition, &str, f64, f64)] = &[
    (ResearchEvaluation, "yes", 1.00, 1.00),
    (ResearchEvaluation, "not_specified", 0.00, 0.00),
    (ResearchEvaluation, "no", 0.00, 0.00),
    (MustDeposit, "required", 1.00, 1.00),
    (MustDeposit, "requested", 0.10, 0.00),
    (MustDeposit, "unspecified", 0.00, 0.00),
    (MustMakeOa, "required", 1.00, 1.00),
    (MustMakeOa, "requested_or_recommended", 0.10, 0.00),
    (MustMakeOa, "not_mentioned", 0.00, 0.00),
    (MustMakeOa, "other", 0.00, 0.00),
    (CannotWaiveDeposit, "no", 1.00, 1.00),
    (CannotWaiveDeposit, "not_specified", 0.10, 0.00),
    (CannotWaiveDeposit, "yes", 0.00, 0.00),
    (CannotWaiveDeposit, "not_applicable", 0.50, 0.00),
    (CannotWaiveOa, "no", 1.00, 1.00),
    (CannotWaiveOa, "not_specified", 0.10, 0.00),
    (CannotWaiveOa, "yes", 0.00, 0.00),
    (CannotWaiveRightsRetention, "not_applicable", 1.00, 1.00),
    (CannotWaiveRightsRetention, "no", 1.00, 1.00),
    (CannotWaiveRightsRetention, "yes", 0.00, 0.00),
    (CannotWaiveRightsRetention, "not_specified", 0.10, 0.00),
    (DepositImmediately, "at_acceptance", 1.00, 1.00),
    (DepositImmediately, "at_publication", 0.20, 0.00),
    (DepositImmediately, "end_of_policy_embargo", 0.10, 0.00),
    (DepositImmediately, "when_publisher_permits", 0.05, 0.00),
    (DepositImmediately, "not_specified", 0.00, 0.00),
    (DepositImmediately, "other", 0.00, 0.00),
    (MakeOaImmediately, "acceptance_date", 1.00, 1.00),
    (MakeOaImmediately, "publication_date", 0.75, 1.00),
    (MakeOaImmediately, "end_of_policy_embargo", 0.50, 0.00),
    (MakeOaImmediately, "upon_deposit", 0.05, 0.00),
    (MakeOaImmediately, "when_publisher_permits", 0.05, 0.00),
    (MakeOaImmediately, "not_mentioned", 0.00, 0.00),
    (MakeOaImmediately, "other", 0.00, 0.00),
    (EmbargoStem, "not_specified", 1.00, 1.00),
    (EmbargoStem, "zero", 1.00, 1.00),
    (EmbargoStem, "six", 0.50, 0.50),
    (EmbargoStem, "twelve", 0.05, 0.05),
    (EmbargoStem, "longer", 0.00, 0.00),
    (EmbargoHass, "not_specified", 1.00, 1.00),
    (EmbargoHass, "zero", 1.00, 1.00),
    (EmbargoHass, "six", 0.50, 0.50),
    (EmbargoHass, "twelve", 0.50, 0.50),
    (DepositInIr, "institutional_repository", 1.00, 1.00),
    (DepositInIr, "any_suitable", 0.00, 0.00),
    (DepositInIr, "not_specified", 0.00, 0.00),
    (MustRetainRights, "author_retains", 1.00, 1.00),
    (MustRetainRights, "author_grants_to_institution", 1.00, 1.00),
    (MustRetainRights, "institution_or_funder_retains", 1.00, 1.00),
    (MustRetainRights, "none_of_these", 0.00, 0.00),
    (MustRetainRights, "not_mentioned", 0.00, 0.00),
    (OpenLicensing, "no_reuse_licence_required", 1.00, 1.00),
    (OpenLicensing, "other", 0.50, 0.50),
    (OpenLicensing, "not_specified", 0.50, 0.50),
    (OpenLicensing, "cc_by", 0.00, 0.00),
    (OpenLicensing, "cc_by_nc", 0.00, 0.00),
    (OpenLicensing, "open_licence_unspecified", 0.00, 0.00),
];
