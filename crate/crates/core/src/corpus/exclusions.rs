//! Institution-level exclusion filters applied before effectiveness analysis.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CorpusError, DepositCorpus};
use crate::registry::{is_mandate, LocusOfDeposit, RegistrySnapshot};

/// Inclusive range of publication years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearWindow {
    pub start: i32,
    pub end: i32,
}

impl YearWindow {
    pub fn new(start: i32, end: i32) -> Result<Self, CorpusError> {
        if start > end {
            return Err(CorpusError::EmptyWindow(start, end));
        }
        Ok(YearWindow { start, end })
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }

    pub fn years(&self) -> impl Iterator<Item = i32> {
        self.start..=self.end
    }
}

impl Default for YearWindow {
    fn default() -> Self {
        YearWindow { start: 2011, end: 2013 }
    }
}

impl std::str::FromStr for YearWindow {
    type Err = CorpusError;

    /// `2011-2013` or a single year.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CorpusError::Config(format!("invalid year window `{s}` (expected YYYY-YYYY)"));
        let (a, b) = s.split_once('-').unwrap_or((s, s));
        let a: i32 = a.trim().parse().map_err(|_| bad())?;
        let b: i32 = b.trim().parse().map_err(|_| bad())?;
        YearWindow::new(a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExclusionParams {
    pub min_articles: usize,
    pub adoption_cutoff_year: i32,
    pub require_ir_locus: bool,
    pub window: YearWindow,
}

impl Default for ExclusionParams {
    fn default() -> Self {
        ExclusionParams {
            min_articles: 50,
            adoption_cutoff_year: 2011,
            require_ir_locus: true,
            window: YearWindow::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionRule {
    /// Fewer than `min_articles` articles published in the window.
    MinArticles,
    /// A mandate whose locus of deposit is not the institutional repository.
    NonIrLocus,
    /// A mandate adopted after the cutoff year, or with no adoption date.
    AdoptionCutoff,
}

impl ExclusionRule {
    pub fn as_str(self) -> &'static str {
        match self {
            ExclusionRule::MinArticles => "min_articles",
            ExclusionRule::NonIrLocus => "non_ir_locus",
            ExclusionRule::AdoptionCutoff => "adoption_cutoff",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exclusion {
    pub institution_id: String,
    /// Every rule the institution triggered, in rule order.
    pub rules: Vec<ExclusionRule>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ExclusionReport {
    pub exclusions: Vec<Exclusion>,
    /// Articles dropped because they were published outside the window.
    pub articles_outside_window: usize,
    /// Articles dropped because no publication date could be estimated.
    pub undated_articles: usize,
}

impl ExclusionReport {
    pub fn excluded(&self, rule: ExclusionRule) -> Vec<&str> {
        self.exclusions
            .iter()
            .filter(|e| e.rules.contains(&rule))
            .map(|e| e.institution_id.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetainedInstitution {
    pub id: String,
    /// False for comparison institutions without a registry record.
    pub has_policy: bool,
    pub mandated: bool,
    /// Articles published inside the window.
    pub n_articles: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionOutcome {
    /// In-window articles of retained institutions.
    pub corpus: DepositCorpus,
    /// Sorted by id.
    pub institutions: Vec<RetainedInstitution>,
    pub report: ExclusionReport,
}

/// Drops small institutions, non-IR-locus mandates and late mandates, and
/// restricts the corpus to the publication window. Institutions without a
/// registry record pass the policy rules as non-mandated comparisons.
pub fn apply_exclusions(
    corpus: &DepositCorpus,
    snapshot: &RegistrySnapshot,
    params: &ExclusionParams,
) -> Result<ExclusionOutcome, CorpusError> {
    let window = YearWindow::new(params.window.start, params.window.end)?;
    let policies = snapshot.index();

    let mut in_window: BTreeMap<&str, usize> = BTreeMap::new();
    let mut report = ExclusionReport::default();
    for (i, a) in corpus.articles().iter().enumerate() {
        let count = in_window.entry(a.institution_id.as_str()).or_default();
        match corpus.publication_year(i) {
            Some(y) if window.contains(y) => *count += 1,
            Some(_) => report.articles_outside_window += 1,
            None => report.undated_articles += 1,
        }
    }

    let mut retained = Vec::new();
    for (&id, &n) in &in_window {
        let policy = policies.get(id).copied();
        let mandated = policy.is_some_and(is_mandate);
        let mut rules = Vec::new();
        let mut details = Vec::new();
        if n < params.min_articles {
            rules.push(ExclusionRule::MinArticles);
            details.push(format!("{n} articles in {}-{}", window.start, window.end));
        }
        if let Some(p) = policy.filter(|_| mandated) {
            if params.require_ir_locus && p.locus_of_deposit != LocusOfDeposit::InstitutionalRepository {
                rules.push(ExclusionRule::NonIrLocus);
                details.push(format!("locus_of_deposit is `{}`", p.locus_of_deposit));
            }
            match p.adoption_date {
                Some(d) if d.year() <= params.adoption_cutoff_year => {}
                Some(d) => {
                    rules.push(ExclusionRule::AdoptionCutoff);
                    details.push(format!("adopted {d}, after {}", params.adoption_cutoff_year));
                }
                None => {
                    rules.push(ExclusionRule::AdoptionCutoff);
                    details.push("no adoption date recorded".to_string());
                }
            }
        }
        if rules.is_empty() {
            retained.push(RetainedInstitution {
                id: id.to_string(),
                has_policy: policy.is_some(),
                mandated,
                n_articles: n,
            });
        } else {
            report.exclusions.push(Exclusion { institution_id: id.to_string(), rules, detail: details.join("; ") });
        }
    }

    let keep: std::collections::HashSet<&str> = retained.iter().map(|r| r.id.as_str()).collect();
    let filtered = corpus.filter_indexed(|i, a| {
        keep.contains(a.institution_id.as_str()) && corpus.publication_year(i).is_some_and(|y| window.contains(y))
    });
    Ok(ExclusionOutcome { corpus: filtered, institutions: retained, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AccessState, ArticleRecord};
    use crate::dates::parse_iso_date;
    use crate::registry::{DepositOfItem, PolicyRecord, Waivable};

    fn articles(inst: &str, n: usize, year: i32) -> Vec<ArticleRecord> {
        (0..n)
            .map(|k| ArticleRecord {
                article_id: format!("{inst}-{year}-{k}"),
                institution_id: inst.into(),
                discipline: "physics".into(),
                wok_date: None,
                altmetric_date: Some(parse_iso_date(&format!("{year}-06-01")).unwrap()),
                deposit_date: None,
                access_state: AccessState::NotDeposited,
                oa_conversion_date: None,
            })
            .collect()
    }

    fn mandate(id: &str, adopted: &str, locus: LocusOfDeposit) -> PolicyRecord {
        let mut r = PolicyRecord::unspecified(id);
        r.deposit_of_item = DepositOfItem::Required;
        r.deposit_waivable = Waivable::No;
        r.locus_of_deposit = locus;
        r.adoption_date = Some(adopted.parse().unwrap());
        r
    }

    #[test]
    fn counts_only_window_articles() {
        let mut arts = articles("a", 49, 2012);
        arts.extend(articles("a", 10, 2010));
        arts.extend(articles("b", 50, 2013));
        let corpus = DepositCorpus::new(arts).unwrap();
        let snap = RegistrySnapshot::new(parse_iso_date("2015-01-01").unwrap(), vec![]).unwrap();
        let out = apply_exclusions(&corpus, &snap, &ExclusionParams::default()).unwrap();
        assert_eq!(out.report.excluded(ExclusionRule::MinArticles), vec!["a"]);
        assert_eq!(out.institutions.len(), 1);
        assert_eq!(out.institutions[0].id, "b");
        assert!(!out.institutions[0].has_policy);
        assert_eq!(out.corpus.len(), 50);
        assert_eq!(out.report.articles_outside_window, 10);
    }

    #[test]
    fn policy_rules_only_bind_mandates() {
        let mut arts = articles("late", 60, 2012);
        arts.extend(articles("any", 60, 2012));
        arts.extend(articles("requested", 60, 2012));
        let corpus = DepositCorpus::new(arts).unwrap();
        let mut requested = mandate("requested", "2014-01-01", LocusOfDeposit::AnySuitable);
        requested.deposit_of_item = DepositOfItem::Requested;
        requested.deposit_waivable = Waivable::NotApplicable;
        let snap = RegistrySnapshot::new(
            parse_iso_date("2015-01-01").unwrap(),
            vec![
                mandate("late", "2012-05-01", LocusOfDeposit::InstitutionalRepository),
                mandate("any", "2009", LocusOfDeposit::AnySuitable),
                requested,
            ],
        )
        .unwrap();
        let out = apply_exclusions(&corpus, &snap, &ExclusionParams::default()).unwrap();
        assert_eq!(out.report.excluded(ExclusionRule::AdoptionCutoff), vec!["late"]);
        assert_eq!(out.report.excluded(ExclusionRule::NonIrLocus), vec!["any"]);
        assert_eq!(out.institutions.iter().map(|i| i.id.as_str()).collect::<Vec<_>>(), vec!["requested"]);

        let relaxed = ExclusionParams { require_ir_locus: false, ..Default::default() };
        let out = apply_exclusions(&corpus, &snap, &relaxed).unwrap();
        assert!(out.report.excluded(ExclusionRule::NonIrLocus).is_empty());
    }

    #[test]
    fn zero_min_articles_and_empty_window() {
        let corpus = DepositCorpus::new(articles("a", 1, 2012)).unwrap();
        let snap = RegistrySnapshot::new(parse_iso_date("2015-01-01").unwrap(), vec![]).unwrap();
        let params = ExclusionParams { min_articles: 0, ..Default::default() };
        assert_eq!(apply_exclusions(&corpus, &snap, &params).unwrap().institutions.len(), 1);
        let params = ExclusionParams { window: YearWindow { start: 2013, end: 2011 }, ..Default::default() };
        assert_eq!(apply_exclusions(&corpus, &snap, &params), Err(CorpusError::EmptyWindow(2013, 2011)));
    }

    #[test]
    fn window_parsing() {
        assert_eq!("2011-2013".parse::<YearWindow>().unwrap(), YearWindow { start: 2011, end: 2013 });
        assert_eq!("2012".parse::<YearWindow>().unwrap(), YearWindow { start: 2012, end: 2012 });
        assert!("2013-2011".parse::<YearWindow>().is_err());
    }
}
