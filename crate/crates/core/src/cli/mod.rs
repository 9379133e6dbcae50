//! The `oa-policy-lab` command.
//!
//! Exit codes: 0 success, 1 validation violations under `--strict`, 2 input
//! or parse error, 3 analysis infeasible.

mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus::world::{generate_world_with, WorldConfig};
use crate::corpus::{generate_synthetic_with, parse_corpus, DepositCorpus, ExclusionParams, SyntheticConfig, YearWindow};
use crate::dates::parse_iso_date;
use crate::encoding::{build_design_matrix_with, Condition, WeightScheme};
use crate::metrics::{
    deposit_rates_with, first_year_latency_scores_with, latency_summary_with, mean_group_rates, period_distributions,
    rank_institutions, summarize_registry, Category, GroupBy, Grouping, RateKey,
};
use crate::par::Execution;
use crate::registry::{parse_registry, serialize_registry, validate_policy, validate_snapshot, RegistrySnapshot};
use crate::stats::{run_effectiveness_analysis, AnalysisConfig, AnalysisError, AnalysisReport, ResponseSet};
use output::{fixed2, fixed3, json, pct, OutputDir, Table};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATIONS: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "oa-policy-lab", version, about = "Open Access policy encoding, deposit metrics and effectiveness analysis")]
pub struct Cli {
    /// Run data-parallel stages on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, env = "OAPL_OUTPUT_DIR", default_value = ".")]
    pub out: PathBuf,
    /// Table format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check registry records against the cross-field consistency rules.
    Validate {
        /// Registry JSON file.
        #[arg(long)]
        registry: PathBuf,
        /// Exit with status 1 when any violation is found.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Registry summary tables: policies by region and policymaker type,
    /// Green/Gold criteria, mandates by region and deposit time-points.
    Summarize {
        /// Registry JSON file.
        #[arg(long)]
        registry: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Encode registry records as a design matrix.
    Encode {
        /// Registry JSON file.
        #[arg(long)]
        registry: PathBuf,
        /// Option weight scheme.
        #[arg(long, default_value = "I")]
        weights: WeightScheme,
        /// Comma-separated conditions; defaults to the thirteen weighted ones.
        #[arg(long, value_delimiter = ',')]
        conditions: Vec<Condition>,
        /// Date mandate ages are measured to; defaults to the snapshot date.
        #[arg(long, value_parser = parse_date)]
        reference_date: Option<NaiveDate>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Deposit rates, rankings, latency means, latency periods and
    /// first-year latency scores.
    Metrics {
        /// Corpus CSV file.
        #[arg(long)]
        corpus: PathBuf,
        /// Registry JSON file; required for `--group-by mandated`.
        #[arg(long)]
        registry: Option<PathBuf>,
        /// institution, discipline, year, mandated or all.
        #[arg(long, default_value = "institution")]
        group_by: GroupBy,
        /// Category for latency periods and first-year scores: oa, ra or ft.
        #[arg(long, default_value = "ft")]
        category: Category,
        /// Publication year for latency periods and first-year scores;
        /// all years when omitted.
        #[arg(long)]
        year: Option<i32>,
        /// Drop groups with fewer articles from the institution ranking.
        #[arg(long, default_value_t = 0)]
        min_articles: u64,
        /// Rate used to rank institutions: oa, ra, ft, mo or nd.
        #[arg(long, default_value = "ft")]
        rank_by: RateKey,
        /// Also report unweighted means of the per-group rates.
        #[arg(long)]
        group_means: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Two-stage policy-effectiveness analysis: Pearson screening, then
    /// negative binomial regression on the retained conditions.
    Analyze {
        /// Registry JSON file.
        #[arg(long)]
        registry: PathBuf,
        /// Corpus CSV file.
        #[arg(long)]
        corpus: PathBuf,
        /// Option weight scheme for the regression stage.
        #[arg(long, default_value = "II")]
        weights: WeightScheme,
        /// Conditions with |r| at or above this are retained.
        #[arg(long, default_value_t = 0.1)]
        threshold: f64,
        /// rates, latency or both.
        #[arg(long, default_value = "both")]
        responses: ResponseSet,
        /// Category whose response drives screening: oa, ra or ft.
        #[arg(long, default_value = "ft")]
        screen_on: Category,
        /// Date mandate ages are measured to; defaults to the snapshot date.
        #[arg(long, value_parser = parse_date)]
        reference_date: Option<NaiveDate>,
        /// Publication window, e.g. 2011-2013.
        #[arg(long, default_value = "2011-2013")]
        window: YearWindow,
        /// Minimum articles per institution inside the window.
        #[arg(long, default_value_t = 50)]
        min_articles: usize,
        /// Mandates adopted after this year are excluded.
        #[arg(long, default_value_t = 2011)]
        adoption_cutoff: i32,
        /// Keep mandates whose locus of deposit is not the institutional
        /// repository.
        #[arg(long)]
        any_locus: bool,
        /// Drop registry records that violate a consistency rule.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Generate a seeded synthetic corpus, or with `--world` a registry and
    /// corpus with planted policy effects.
    Simulate {
        /// Random seed.
        #[arg(long)]
        seed: u64,
        /// Synthetic corpus config (JSON). Required unless `--world` is set.
        #[arg(long, required_unless_present = "world")]
        config: Option<PathBuf>,
        /// Generate a registry and a corpus together.
        #[arg(long)]
        world: bool,
        /// World config (JSON); defaults are used when omitted.
        #[arg(long, requires = "world")]
        world_config: Option<PathBuf>,
        /// Output directory.
        #[arg(long, env = "OAPL_OUTPUT_DIR", default_value = ".")]
        out: PathBuf,
    },
}

fn parse_date(s: &str) -> Result<NaiveDate, String> {
    parse_iso_date(s).map_err(|e| e.to_string())
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

trait ExitClass<T> {
    fn class(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> ExitClass<T> for Result<T, E> {
    fn class(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure { code, error: e.into() })
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).class(EXIT_INPUT)
}

fn load_registry(path: &Path) -> Result<RegistrySnapshot, Failure> {
    parse_registry(&read(path)?).with_context(|| path.display().to_string()).class(EXIT_INPUT)
}

fn load_corpus(path: &Path) -> Result<DepositCorpus, Failure> {
    parse_corpus(&read(path)?).with_context(|| path.display().to_string()).class(EXIT_INPUT)
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = read(path)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| anyhow!("{}: field `{}`: {}", path.display(), e.path(), e.inner()))
        .class(EXIT_INPUT)
}

fn dispatch(cli: Cli) -> Result<u8, Failure> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match cli.command {
        Command::Validate { registry, strict, out } => validate(&registry, strict, &out),
        Command::Summarize { registry, out } => summarize(&registry, &out),
        Command::Encode { registry, weights, conditions, reference_date, out } => {
            encode(&registry, weights, conditions, reference_date, &out, exec)
        }
        Command::Metrics { corpus, registry, group_by, category, year, min_articles, rank_by, group_means, out } => {
            let corpus = load_corpus(&corpus)?;
            let registry = registry.as_deref().map(load_registry).transpose()?;
            let grouping = Grouping::new(group_by, registry.as_ref()).class(EXIT_INPUT)?;
            let opts = MetricsOpts { category, year, min_articles, rank_by, group_means };
            metrics(&corpus, &grouping, &opts, &out, exec)
        }
        Command::Analyze {
            registry,
            corpus,
            weights,
            threshold,
            responses,
            screen_on,
            reference_date,
            window,
            min_articles,
            adoption_cutoff,
            any_locus,
            strict,
            out,
        } => {
            let mut snapshot = load_registry(&registry)?;
            let corpus = load_corpus(&corpus)?;
            if strict {
                let before = snapshot.len();
                snapshot = snapshot.filtered(|r| validate_policy(r).is_empty());
                if snapshot.len() < before {
                    eprintln!("--strict: dropped {} record(s) with violations", before - snapshot.len());
                }
            }
            let config = AnalysisConfig {
                stage2_scheme: weights,
                threshold,
                responses,
                screen_on,
                exclusions: ExclusionParams {
                    min_articles,
                    adoption_cutoff_year: adoption_cutoff,
                    require_ir_locus: !any_locus,
                    window,
                },
                reference_date,
                execution: exec,
                ..Default::default()
            };
            let report = run_effectiveness_analysis(&snapshot, &corpus, &config).map_err(|e| {
                let code = match e {
                    AnalysisError::TooFewInstitutions { .. } => EXIT_INFEASIBLE,
                    _ => EXIT_INPUT,
                };
                Failure { code, error: e.into() }
            })?;
            write_analysis(&report, &out.out)
        }
        Command::Simulate { seed, config, world, world_config, out } => {
            let dir = OutputDir::create(&out).class(EXIT_INPUT)?;
            if world {
                let cfg: WorldConfig = match world_config {
                    Some(p) => load_json(&p)?,
                    None => WorldConfig::default(),
                };
                let w = generate_world_with(&cfg, seed, exec).class(EXIT_INPUT)?;
                dir.write("registry.json", &serialize_registry(&w.registry), &format!("{} records", w.registry.len()))
                    .class(EXIT_INPUT)?;
                dir.write("corpus.csv", &w.corpus.to_csv(), &format!("{} articles", w.corpus.len()))
                    .class(EXIT_INPUT)?;
            } else {
                let path = config.expect("clap requires --config without --world");
                let cfg: SyntheticConfig = load_json(&path)?;
                let corpus = generate_synthetic_with(&cfg, seed, exec).class(EXIT_INPUT)?;
                dir.write("corpus.csv", &corpus.to_csv(), &format!("{} articles", corpus.len())).class(EXIT_INPUT)?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn validate(path: &Path, strict: bool, out: &OutArgs) -> Result<u8, Failure> {
    let snapshot = load_registry(path)?;
    let found = validate_snapshot(&snapshot);
    let mut table = Table::new(&["record_id", "field", "rule", "message"]);
    let mut listing = Vec::new();
    for (id, violations) in &found {
        for v in violations {
            println!("{}: record `{id}`: {} [{}]: {}", path.display(), v.field, v.rule.code(), v.message);
            table.row([id.as_str(), v.field, v.rule.code(), v.message.as_str()]);
            listing.push(serde_json::json!({
                "record_id": id, "field": v.field, "rule": v.rule.code(), "message": v.message,
            }));
        }
    }
    let n = table.rows();
    let dir = OutputDir::create(&out.out).class(EXIT_INPUT)?;
    match out.format {
        Format::Csv => dir.write("violations.csv", &table.finish(), &format!("{n} violations")),
        Format::Json => dir.write("violations.json", &json(&listing), &format!("{n} violations")),
    }
    .class(EXIT_INPUT)?;
    println!("{} record(s) checked, {} with violations, {n} violation(s)", snapshot.len(), found.len());
    Ok(if strict && n > 0 { EXIT_VIOLATIONS } else { EXIT_OK })
}

fn summarize(path: &Path, out: &OutArgs) -> Result<u8, Failure> {
    let summary = summarize_registry(&load_registry(path)?);
    let dir = OutputDir::create(&out.out).class(EXIT_INPUT)?;
    match out.format {
        Format::Csv => {
            for (name, csv) in summary.tables() {
                let rows = csv.lines().count() - 1;
                dir.write(&format!("{name}.csv"), &csv, &format!("{rows} rows")).class(EXIT_INPUT)?;
            }
        }
        Format::Json => {
            dir.write("registry_summary.json", &json(&summary), &format!("{} records", summary.total))
                .class(EXIT_INPUT)?;
        }
    }
    Ok(EXIT_OK)
}

fn encode(
    path: &Path,
    scheme: WeightScheme,
    conditions: Vec<Condition>,
    reference_date: Option<NaiveDate>,
    out: &OutArgs,
    exec: Execution,
) -> Result<u8, Failure> {
    let snapshot = load_registry(path)?;
    let conditions = if conditions.is_empty() { Condition::WEIGHTED.to_vec() } else { conditions };
    let ids: Vec<&str> = snapshot.records().iter().map(|r| r.id.as_str()).collect();
    let reference = reference_date.unwrap_or(snapshot.snapshot_date);
    let matrix = build_design_matrix_with(&snapshot, &ids, scheme, &conditions, reference, exec)
        .with_context(|| path.display().to_string())
        .class(EXIT_INPUT)?;
    let dir = OutputDir::create(&out.out).class(EXIT_INPUT)?;
    let what = format!("{} rows x {} conditions, scheme {scheme}", matrix.n_rows(), matrix.n_cols());
    match out.format {
        Format::Csv => dir.write("design_matrix.csv", &matrix.to_csv(), &what),
        Format::Json => dir.write("design_matrix.json", &json(&matrix), &what),
    }
    .class(EXIT_INPUT)?;
    Ok(EXIT_OK)
}

struct MetricsOpts {
    category: Category,
    year: Option<i32>,
    min_articles: u64,
    rank_by: RateKey,
    group_means: bool,
}

fn metrics(
    corpus: &DepositCorpus,
    grouping: &Grouping<'_>,
    opts: &MetricsOpts,
    out: &OutArgs,
    exec: Execution,
) -> Result<u8, Failure> {
    let mut rates = deposit_rates_with(corpus, grouping, exec).class(EXIT_INPUT)?;
    if grouping.by() == GroupBy::Institution {
        rates = rank_institutions(&rates, opts.rank_by, opts.min_articles).class(EXIT_INPUT)?;
    } else {
        rates.retain(|r| r.n_articles >= opts.min_articles);
    }
    let latency = latency_summary_with(corpus, grouping, exec);
    let periods = period_distributions(corpus, grouping, opts.year, opts.category);
    let y1 = first_year_latency_scores_with(corpus, grouping, opts.year, opts.category, exec);
    let means = opts.group_means.then(|| mean_group_rates(&rates)).flatten();

    let by = grouping.by().as_str();
    let dir = OutputDir::create(&out.out).class(EXIT_INPUT)?;
    if out.format == Format::Json {
        let bundle = serde_json::json!({
            "group_by": by,
            "category": opts.category,
            "year": opts.year,
            "deposit_rates": rates,
            "group_means": means,
            "latency": latency,
            "latency_periods": periods,
            "first_year_latency": y1,
        });
        dir.write("metrics.json", &json(&bundle), &format!("{} groups", rates.len())).class(EXIT_INPUT)?;
        return Ok(EXIT_OK);
    }

    let mut t = Table::new(&[by, "n_articles", "ft_pct", "oa_pct", "ra_pct", "mo_pct", "nd_pct"]);
    for r in &rates {
        t.row([
            r.group.to_string(),
            r.n_articles.to_string(),
            pct(r.ft_rate),
            pct(r.oa_rate),
            pct(r.ra_rate),
            pct(r.mo_rate),
            pct(r.nd_rate),
        ]);
    }
    if let Some(m) = &means {
        t.row([
            format!("mean of {} groups", m.groups),
            String::new(),
            pct(m.ft_rate),
            pct(m.oa_rate),
            pct(m.ra_rate),
            pct(m.mo_rate),
            pct(m.nd_rate),
        ]);
    }
    let n = t.rows();
    dir.write("deposit_rates.csv", &t.finish(), &format!("{n} rows")).class(EXIT_INPUT)?;

    let mut t = Table::new(&[by, "oa_months", "ra_months", "ft_months", "oa_n", "ra_n", "ft_n"]);
    for l in &latency {
        t.row([
            l.group.to_string(),
            fixed2(l.oa_mean),
            fixed2(l.ra_mean),
            fixed2(l.ft_mean),
            l.oa_count.to_string(),
            l.ra_count.to_string(),
            l.ft_count.to_string(),
        ]);
    }
    let n = t.rows();
    dir.write("latency.csv", &t.finish(), &format!("{n} rows")).class(EXIT_INPUT)?;

    let mut header = vec![by, "n_deposits"];
    header.extend(crate::corpus::LatencyPeriod::ALL.map(|p| p.as_str()));
    let mut t = Table::new(&header);
    for d in &periods {
        let mut row = vec![d.group.to_string(), d.n_deposits.to_string()];
        row.extend(d.proportions.iter().map(|&p| pct(p)));
        t.row(row);
    }
    let n = t.rows();
    dir.write("latency_periods.csv", &t.finish(), &format!("{n} rows, {}", opts.category)).class(EXIT_INPUT)?;

    let mut t = Table::new(&[by, "score", "before_pct", "months_0_6_pct", "months_6_12_pct", "n_deposits"]);
    for s in &y1 {
        t.row([
            s.group.to_string(),
            fixed3(Some(s.score)),
            pct(s.p_before),
            pct(s.p_0_6),
            pct(s.p_6_12),
            s.denominator.to_string(),
        ]);
    }
    let n = t.rows();
    dir.write("first_year_latency.csv", &t.finish(), &format!("{n} rows, {}", opts.category)).class(EXIT_INPUT)?;
    Ok(EXIT_OK)
}

/// stage1.csv, stage2.csv, summary.csv and report.json.
pub fn analysis_tables(report: &AnalysisReport) -> Vec<(&'static str, String)> {
    let mut t = Table::new(&["condition", "response", "r", "p", "n"]);
    for c in &report.stage1 {
        t.row([
            c.result.condition.to_string(),
            c.response.to_string(),
            fixed3(c.result.r),
            fixed3(c.result.p),
            c.result.n.to_string(),
        ]);
    }
    let stage1 = t.finish();

    let mut t = Table::new(&["condition", "response", "beta", "se", "exp_beta", "p", "flag", "r", "r_p"]);
    for s in &report.stage2 {
        for (condition, pair) in s.conditions.iter().zip(&s.pairwise) {
            let coef = s.fit.as_ref().and_then(|f| f.coefficient(condition.as_str()));
            let flag = match (&s.fit, coef) {
                (None, _) => "fit_failed",
                (Some(_), Some(c)) if c.near_zero => "near_zero",
                (Some(f), _) if f.advisory() => "advisory",
                _ => "",
            };
            t.row([
                condition.to_string(),
                s.response.to_string(),
                fixed3(coef.and_then(|c| c.beta)),
                fixed3(coef.and_then(|c| c.se)),
                fixed3(coef.and_then(|c| c.exp_beta)),
                fixed3(coef.and_then(|c| c.p)),
                flag.to_string(),
                fixed3(pair.r),
                fixed3(pair.p),
            ]);
        }
    }
    let stage2 = t.finish();

    let mut t = Table::new(&["condition", "response", "direction", "significant", "significant_in"]);
    for r in &report.summary {
        let within: Vec<&str> = [(r.significant_nbr, "nbr"), (r.significant_pairwise, "pairwise")]
            .into_iter()
            .filter_map(|(yes, name)| yes.then_some(name))
            .collect();
        t.row([
            r.condition.to_string(),
            r.response.to_string(),
            r.direction.as_str().to_string(),
            if r.significant() { "yes" } else { "no" }.to_string(),
            within.join(" "),
        ]);
    }
    let summary = t.finish();
    vec![
        ("stage1.csv", stage1),
        ("stage2.csv", stage2),
        ("summary.csv", summary),
        ("report.json", json(report)),
    ]
}

fn write_analysis(report: &AnalysisReport, out: &Path) -> Result<u8, Failure> {
    let dir = OutputDir::create(out).class(EXIT_INPUT)?;
    for (name, contents) in analysis_tables(report) {
        let what = if name.ends_with(".csv") {
            format!("{} rows", contents.lines().count().saturating_sub(1))
        } else {
            format!("{} institutions", report.institutions.len())
        };
        dir.write(name, &contents, &what).class(EXIT_INPUT)?;
    }
    for note in &report.notes {
        println!("note: {note}");
    }
    Ok(EXIT_OK)
}
