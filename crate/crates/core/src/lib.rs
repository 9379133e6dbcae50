//! Open Access policy analytics.
//!
//! The crate is organised around the data flow of a policy-effectiveness
//! study:
//!
//! * [`registry`] parses and validates policy records classified under the
//!   registry schema and answers mandate queries.
//! * [`encoding`] turns policy records into numeric condition weights and
//!   design matrices.
//! * [`corpus`] models per-article deposit records, publication-date
//!   estimation, deposit latency, exclusion filters and synthetic corpora.
//! * [`metrics`] aggregates deposit rates, latency summaries, latency-period
//!   distributions, first-year latency scores and registry summary tables.
//! * [`stats`] holds Pearson screening, negative binomial regression and the
//!   end-to-end effectiveness analysis.
//! * [`cli`] wires everything into the `oa-policy-lab` command.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and runs sequentially otherwise.

#[macro_use]
mod macros;

pub mod cli;
pub mod corpus;
pub mod dates;
pub mod encoding;
pub mod metrics;
pub mod par;
pub mod registry;
pub mod stats;

pub use par::Execution;
