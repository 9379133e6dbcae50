//! Policy classification vocabularies.
//!
//! Every criterion of the policy classification scheme is a closed set of
//! options. Field names and option strings are the wire format of registry
//! files. "Not specified" and "Not mentioned" are kept distinct wherever a
//! criterion lists both.

schema_enum! {
    pub enum Region {
        Europe => "europe",
        NorthAmerica => "north_america",
        CentralSouthAmerica => "central_south_america",
        Africa => "africa",
        Asia => "asia",
        Oceania => "oceania",
    }
}

schema_enum! {
    pub enum PolicymakerType {
        Funder => "funder",
        ResearchOrg => "research_org",
        FunderAndResearchOrg => "funder_and_research_org",
        MultipleResearchOrgs => "multiple_research_orgs",
        SubUnit => "sub_unit",
        Unspecified => "unspecified",
    }
}

schema_enum! {
    pub enum SourceOfPolicy {
        AdminDecision => "admin_decision",
        FacultyVote => "faculty_vote",
        NotMentioned => "not_mentioned",
        Other => "other",
    }
}

schema_enum! {
    pub enum DepositOfItem {
        Required => "required",
        Requested => "requested",
        Unspecified => "unspecified",
    }
}

schema_enum! {
    pub enum LocusOfDeposit {
        InstitutionalRepository => "institutional_repository",
        SubjectRepository => "subject_repository",
        AnySuitable => "any_suitable",
        NotSpecified => "not_specified",
    }
}

schema_enum! {
    pub enum DateOfDeposit {
        AtAcceptance => "at_acceptance",
        AtPublication => "at_publication",
        EndOfPolicyEmbargo => "end_of_policy_embargo",
        WhenPublisherPermits => "when_publisher_permits",
        NotSpecified => "not_specified",
        Other => "other",
    }
}

schema_enum! {
    /// Shared by every "can X be waived?" criterion.
    pub enum Waivable {
        Yes => "yes",
        No => "no",
        NotSpecified => "not_specified",
        NotApplicable => "not_applicable",
    }
}

schema_enum! {
    pub enum MakeItemOa {
        Required => "required",
        RequestedOrRecommended => "requested_or_recommended",
        NotMentioned => "not_mentioned",
        Other => "other",
        NotSpecified => "not_specified",
    }
}

schema_enum! {
    pub enum DateMakeOa {
        AcceptanceDate => "acceptance_date",
        PublicationDate => "publication_date",
        EndOfPolicyEmbargo => "end_of_policy_embargo",
        WhenPublisherPermits => "when_publisher_permits",
        UponDeposit => "upon_deposit",
        NotMentioned => "not_mentioned",
        Other => "other",
        NotSpecified => "not_specified",
    }
}

schema_enum! {
    pub enum ResearchEvaluation {
        Yes => "yes",
        No => "no",
        NotSpecified => "not_specified",
    }
}

schema_enum! {
    pub enum OpenLicensing {
        NoReuseLicenceRequired => "no_reuse_licence_required",
        OpenLicenceUnspecified => "open_licence_unspecified",
        CcBy => "cc_by",
        CcByNc => "cc_by_nc",
        DifferentOpenLicence => "different_open_licence",
        Other => "other",
        NotSpecified => "not_specified",
    }
}

schema_enum! {
    pub enum RightsHolding {
        AuthorGrantsToInstitution => "author_grants_to_institution",
        InstitutionOrFunderRetains => "institution_or_funder_retains",
        AuthorRetains => "author_retains",
        NoneOfThese => "none_of_these",
        NotMentioned => "not_mentioned",
        NotSpecified => "not_specified",
    }
}

schema_enum! {
    /// Permitted embargo length in months.
    pub enum EmbargoLength {
        Zero => "zero",
        Six => "six",
        Twelve => "twelve",
        TwentyFour => "twenty_four",
        Longer => "longer",
        NotSpecified => "not_specified",
    }
}

schema_enum! {
    pub enum GoldOption {
        Required => "required",
        RecommendedAlternative => "recommended_alternative",
        PermittedAlternative => "permitted_alternative",
        NotSpecified => "not_specified",
        Other => "other",
    }
}

schema_enum! {
    pub enum ApcFunding {
        FromGrant => "from_grant",
        SpecificFund => "specific_fund",
        InstitutionFunds => "institution_funds",
        NotMentioned => "not_mentioned",
        Other => "other",
    }
}
