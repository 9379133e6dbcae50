use serde::Serialize;

use crate::registry::{
    DateOfDeposit, DepositOfItem, GoldOption, PolicyRecord, PolicymakerType, Region, RegistrySnapshot,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountRow {
    pub label: &'static str,
    pub count: usize,
}

/// Green (deposit) and Gold (publishing) criterion counts for a population.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriteriaCounts {
    pub population: usize,
    /// required, requested, not specified
    pub green: Vec<CountRow>,
    /// required, recommended, permitted, not specified or other
    pub gold: Vec<CountRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TimepointRow {
    pub timepoint: DateOfDeposit,
    pub mandatory: usize,
    pub non_mandatory: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegistrySummary {
    pub total: usize,
    pub mandates: usize,
    pub by_region: Vec<CountRow>,
    pub by_policymaker_type: Vec<CountRow>,
    pub criteria_all: CriteriaCounts,
    /// Funders only; joint funder/institution policies are left out.
    pub criteria_funders: CriteriaCounts,
    /// Whole institutions, consortia and sub-units.
    pub criteria_institutions: CriteriaCounts,
    pub mandates_by_region: Vec<CountRow>,
    pub deposit_timepoints: Vec<TimepointRow>,
}

impl RegistrySummary {
    /// The summary as named CSV tables.
    pub fn tables(&self) -> Vec<(&'static str, String)> {
        let counts = |header: &str, rows: &[CountRow], total: usize| {
            let mut s = format!("{header},policies\n");
            for r in rows {
                s.push_str(&format!("{},{}\n", r.label, r.count));
            }
            s.push_str(&format!("total,{total}\n"));
            s
        };
        let criteria = |c: &CriteriaCounts| {
            let mut s = String::from("criterion,option,policies\n");
            for (kind, rows) in [("green", &c.green), ("gold", &c.gold)] {
                for r in rows {
                    s.push_str(&format!("{kind},{},{}\n", r.label, r.count));
                }
            }
            s.push_str(&format!("total,,{}\n", c.population));
            s
        };
        let mut timepoints = String::from("timepoint,mandatory,non_mandatory\n");
        for t in &self.deposit_timepoints {
            timepoints.push_str(&format!("{},{},{}\n", t.timepoint, t.mandatory, t.non_mandatory));
        }
        vec![
            ("policies_by_region", counts("region", &self.by_region, self.total)),
            ("policies_by_type", counts("policymaker_type", &self.by_policymaker_type, self.total)),
            ("criteria_all", criteria(&self.criteria_all)),
            ("criteria_funders", criteria(&self.criteria_funders)),
            ("criteria_institutions", criteria(&self.criteria_institutions)),
            ("mandates_by_region", counts("region", &self.mandates_by_region, self.mandates)),
            ("deposit_timepoints", timepoints),
        ]
    }
}

fn by_region<'a>(records: impl Iterator<Item = &'a PolicyRecord> + Clone) -> Vec<CountRow> {
    Region::ALL
        .iter()
        .map(|&r| CountRow { label: r.as_str(), count: records.clone().filter(|p| p.region == r).count() })
        .collect()
}

fn criteria<'a>(records: impl Iterator<Item = &'a PolicyRecord> + Clone) -> CriteriaCounts {
    let count = |f: &dyn Fn(&PolicyRecord) -> bool| records.clone().filter(|p| f(p)).count();
    CriteriaCounts {
        population: records.clone().count(),
        green: vec![
            CountRow { label: "required", count: count(&|p| p.deposit_of_item == DepositOfItem::Required) },
            CountRow { label: "requested", count: count(&|p| p.deposit_of_item == DepositOfItem::Requested) },
            CountRow { label: "not_specified", count: count(&|p| p.deposit_of_item == DepositOfItem::Unspecified) },
        ],
        gold: vec![
            CountRow { label: "required", count: count(&|p| p.gold_option == GoldOption::Required) },
            CountRow {
                label: "recommended_alternative",
                count: count(&|p| p.gold_option == GoldOption::RecommendedAlternative),
            },
            CountRow {
                label: "permitted_alternative",
                count: count(&|p| p.gold_option == GoldOption::PermittedAlternative),
            },
            CountRow {
                label: "not_specified_or_other",
                count: count(&|p| matches!(p.gold_option, GoldOption::NotSpecified | GoldOption::Other)),
            },
        ],
    }
}

pub fn summarize_registry(snapshot: &RegistrySnapshot) -> RegistrySummary {
    let records = snapshot.records();
    let all = records.iter();
    let mandates = records.iter().filter(|p| p.is_mandate());
    let funders = records.iter().filter(|p| p.policymaker_type == PolicymakerType::Funder);
    let institutions = records.iter().filter(|p| {
        matches!(
            p.policymaker_type,
            PolicymakerType::ResearchOrg | PolicymakerType::MultipleResearchOrgs | PolicymakerType::SubUnit
        )
    });
    RegistrySummary {
        total: records.len(),
        mandates: mandates.clone().count(),
        by_region: by_region(all.clone()),
        by_policymaker_type: PolicymakerType::ALL
            .iter()
            .map(|&t| CountRow { label: t.as_str(), count: all.clone().filter(|p| p.policymaker_type == t).count() })
            .collect(),
        criteria_all: criteria(all.clone()),
        criteria_funders: criteria(funders),
        criteria_institutions: criteria(institutions),
        mandates_by_region: by_region(mandates),
        deposit_timepoints: DateOfDeposit::ALL
            .iter()
            .map(|&t| {
                let at = all.clone().filter(|p| p.date_of_deposit == t);
                let mandatory = at.clone().filter(|p| p.is_mandate()).count();
                TimepointRow { timepoint: t, mandatory, non_mandatory: at.count() - mandatory }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dates::parse_iso_date;

    #[test]
    fn empty_snapshot_is_all_zero() {
        let snap = RegistrySnapshot::new(parse_iso_date("2015-01-01").unwrap(), vec![]).unwrap();
        let s = summarize_registry(&snap);
        assert_eq!(s.total, 0);
        assert!(s.by_region.iter().all(|r| r.count == 0));
        assert!(s.deposit_timepoints.iter().all(|t| t.mandatory + t.non_mandatory == 0));
        assert_eq!(s.tables().len(), 7);
    }

    #[test]
    fn breakdowns_sum_to_population() {
        let records = (0..40)
            .map(|i| {
                let mut r = PolicyRecord::unspecified(format!("p{i}"));
                r.region = Region::ALL[i % Region::ALL.len()];
                r.policymaker_type = PolicymakerType::ALL[i % PolicymakerType::ALL.len()];
                r.date_of_deposit = DateOfDeposit::ALL[i % DateOfDeposit::ALL.len()];
                r.gold_option = GoldOption::ALL[i % GoldOption::ALL.len()];
                if i % 3 == 0 {
                    r.deposit_of_item = DepositOfItem::Required;
                }
                r
            })
            .collect();
        let snap = RegistrySnapshot::new(parse_iso_date("2015-01-01").unwrap(), records).unwrap();
        let s = summarize_registry(&snap);
        let sum = |rows: &[CountRow]| rows.iter().map(|r| r.count).sum::<usize>();
        assert_eq!(sum(&s.by_region), 40);
        assert_eq!(sum(&s.by_policymaker_type), 40);
        assert_eq!(sum(&s.criteria_all.green), 40);
        assert_eq!(sum(&s.criteria_all.gold), 40);
        assert_eq!(sum(&s.mandates_by_region), s.mandates);
        assert_eq!(s.deposit_timepoints.iter().map(|t| t.mandatory).sum::<usize>(), s.mandates);
    }
}
