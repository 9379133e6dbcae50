//! Calendar-date helpers shared by the registry and corpus modules.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Mean Gregorian month length in days, used for every month/day conversion.
pub const DAYS_PER_MONTH: f64 = 30.4375;

/// Mean Julian year length in days, used for mandate ages.
pub const DAYS_PER_YEAR: f64 = 365.25;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid date `{0}` (expected YYYY-MM-DD)")]
pub struct DateParseError(pub String);

/// Strict ISO-8601 `YYYY-MM-DD`.
pub fn parse_iso_date(s: &str) -> Result<NaiveDate, DateParseError> {
    let s = s.trim();
    if s.len() != 10 {
        return Err(DateParseError(s.to_string()));
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| DateParseError(s.to_string()))
}

/// Whole days from `from` to `to` (negative when `to` precedes `from`).
pub fn days_between(from: NaiveDate, to: NaiveDate) -> i64 {
    (to - from).num_days()
}

/// How much of a policy date was actually recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatePrecision {
    Year,
    Month,
    Day,
}

/// A possibly partial calendar date. Year-only and year-month inputs are
/// completed to the first day of the period and keep their precision, so
/// they serialize back to the form they were read in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PolicyDate {
    pub date: NaiveDate,
    pub precision: DatePrecision,
}

impl PolicyDate {
    pub fn day(date: NaiveDate) -> Self {
        PolicyDate { date, precision: DatePrecision::Day }
    }

    pub fn year(&self) -> i32 {
        self.date.year()
    }
}

impl PartialOrd for PolicyDate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PolicyDate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.date.cmp(&other.date).then(self.precision.cmp(&other.precision))
    }
}

impl FromStr for PolicyDate {
    type Err = DateParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || DateParseError(s.to_string());
        let parts: Vec<&str> = s.trim().split('-').collect();
        let num = |p: &str, width: usize| -> Result<u32, DateParseError> {
            if p.len() != width || !p.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            p.parse().map_err(|_| err())
        };
        let (y, m, d, precision) = match parts.as_slice() {
            [y] => (num(y, 4)?, 1, 1, DatePrecision::Year),
            [y, m] => (num(y, 4)?, num(m, 2)?, 1, DatePrecision::Month),
            [y, m, d] => (num(y, 4)?, num(m, 2)?, num(d, 2)?, DatePrecision::Day),
            _ => return Err(err()),
        };
        let date = NaiveDate::from_ymd_opt(y as i32, m, d).ok_or_else(err)?;
        Ok(PolicyDate { date, precision })
    }
}

impl fmt::Display for PolicyDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.precision {
            DatePrecision::Year => write!(f, "{:04}", self.date.year()),
            DatePrecision::Month => write!(f, "{:04}-{:02}", self.date.year(), self.date.month()),
            DatePrecision::Day => write!(f, "{}", self.date.format("%Y-%m-%d")),
        }
    }
}

impl Serialize for PolicyDate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PolicyDate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for strict `YYYY-MM-DD` dates.
pub mod iso {
    use super::*;

    pub fn serialize<S: Serializer>(date: &NaiveDate, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&date.format("%Y-%m-%d"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<NaiveDate, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_iso_date(&s).map_err(serde::de::Error::custom)
    }
}
