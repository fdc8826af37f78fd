//! Readers (and writers) for the two input families.
//!
//! Deaths come as a canonical CSV with header `year,month,sex,age_group,deaths`,
//! one row per (year, month, sex, age group). Upstream converters from the
//! NCHS detail files must resolve unknown ages and months and decide on
//! residency exclusions before writing this file; the pipeline takes every
//! row at face value.
//!
//! Exposures come in the Human Mortality Database `Exposures_1x1` layout:
//! whitespace-separated `Year Age Female Male Total`, ages `0..=109` then
//! `110+`, optionally preceded by up to two header lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::age::{AgeGroup, N_GROUPS, TOP_SINGLE_AGE};
use crate::season::{Sex, YearMonth};

pub const DEATHS_HEADER: &str = "year,month,sex,age_group,deaths";

const N_SINGLE_AGES: usize = TOP_SINGLE_AGE as usize + 1;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("duplicate record for {key} on lines {first} and {second}")]
    DuplicateKey { key: String, first: usize, second: usize },
    #[error("exposures for {year}: {reason}")]
    Incomplete { year: i32, reason: String },
    #[error("input contains no data rows")]
    Empty,
}

fn malformed(line: usize, reason: impl Into<String>) -> IngestError {
    IngestError::Malformed { line, reason: reason.into() }
}

fn read(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.to_path_buf(), source })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeathsRecord {
    pub period: YearMonth,
    pub sex: Sex,
    pub group: AgeGroup,
    pub deaths: u64,
}

impl DeathsRecord {
    fn key(&self) -> (YearMonth, Sex, AgeGroup) {
        (self.period, self.sex, self.group)
    }
}

pub fn parse_deaths(path: impl AsRef<Path>) -> Result<Vec<DeathsRecord>, IngestError> {
    parse_deaths_str(&read(path.as_ref())?)
}

/// Parse canonical deaths CSV text. Output is sorted by (year, month, sex, age).
pub fn parse_deaths_str(text: &str) -> Result<Vec<DeathsRecord>, IngestError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    match lines.next() {
        Some((_, header)) if header.trim() == DEATHS_HEADER => {}
        Some((n, header)) => {
            return Err(malformed(n, format!("expected header `{DEATHS_HEADER}`, found `{header}`")))
        }
        None => return Err(IngestError::Empty),
    }

    let mut seen: BTreeMap<(YearMonth, Sex, AgeGroup), (usize, DeathsRecord)> = BTreeMap::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let record = parse_deaths_row(n, line)?;
        if let Some((first, _)) = seen.get(&record.key()) {
            return Err(IngestError::DuplicateKey {
                key: format!("{} {} age group {}", record.period, record.sex, record.group.index()),
                first: *first,
                second: n,
            });
        }
        seen.insert(record.key(), (n, record));
    }
    if seen.is_empty() {
        return Err(IngestError::Empty);
    }
    Ok(seen.into_values().map(|(_, r)| r).collect())
}

fn parse_deaths_row(n: usize, line: &str) -> Result<DeathsRecord, IngestError> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 5 {
        return Err(malformed(n, format!("expected 5 fields, found {}", fields.len())));
    }
    let year: i32 = fields[0].parse().map_err(|_| malformed(n, format!("bad year `{}`", fields[0])))?;
    let month: u8 = fields[1].parse().map_err(|_| malformed(n, format!("bad month `{}`", fields[1])))?;
    let period = YearMonth::new(year, month).ok_or_else(|| malformed(n, "month out of range"))?;
    let sex = Sex::from_code(fields[2]).ok_or_else(|| malformed(n, format!("sex must be F or M, found `{}`", fields[2])))?;
    let group = fields[3]
        .parse::<usize>()
        .ok()
        .and_then(AgeGroup::new)
        .ok_or_else(|| malformed(n, format!("age_group must be 0..21, found `{}`", fields[3])))?;
    let deaths: i64 = fields[4].parse().map_err(|_| malformed(n, format!("bad deaths count `{}`", fields[4])))?;
    if deaths < 0 {
        return Err(malformed(n, "negative deaths"));
    }
    Ok(DeathsRecord { period, sex, group, deaths: deaths as u64 })
}

/// Serialize records in canonical form (LF line endings, sorted input order kept).
pub fn write_deaths(records: &[DeathsRecord]) -> String {
    let mut out = String::with_capacity(16 * (records.len() + 1));
    out.push_str(DEATHS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.period.year,
            r.period.month,
            r.sex,
            r.group.index(),
            r.deaths
        );
    }
    out
}

/// Annual person-years by (year, sex) and single age `0..=110` (110 = `110+`).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnualExposureTable {
    rows: BTreeMap<(i32, Sex), Vec<f64>>,
}

impl AnnualExposureTable {
    /// Build from complete per-(year, sex) age vectors of length 111.
    pub fn from_rows(rows: BTreeMap<(i32, Sex), Vec<f64>>) -> Result<Self, IngestError> {
        for (&(year, _), ages) in &rows {
            if ages.len() != N_SINGLE_AGES {
                return Err(IngestError::Incomplete {
                    year,
                    reason: format!("expected {N_SINGLE_AGES} ages, found {}", ages.len()),
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn get(&self, year: i32, sex: Sex, age: u32) -> Option<f64> {
        self.rows.get(&(year, sex)).and_then(|v| v.get(age as usize)).copied()
    }

    pub fn years(&self) -> Vec<i32> {
        let mut years: Vec<i32> = self.rows.keys().map(|&(y, _)| y).collect();
        years.dedup();
        years
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, Sex, &[f64])> {
        self.rows.iter().map(|(&(y, s), v)| (y, s, v.as_slice()))
    }
}

pub fn parse_exposures(path: impl AsRef<Path>) -> Result<AnnualExposureTable, IngestError> {
    parse_exposures_str(&read(path.as_ref())?)
}

pub fn parse_exposures_str(text: &str) -> Result<AnnualExposureTable, IngestError> {
    let mut rows: BTreeMap<i32, [Option<(f64, f64)>; N_SINGLE_AGES]> = BTreeMap::new();
    let mut header_lines = 0;
    let mut seen_data = false;

    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let year = match fields[0].parse::<i32>() {
            Ok(y) => y,
            Err(_) if !seen_data && header_lines < 2 => {
                header_lines += 1;
                continue;
            }
            Err(_) => return Err(malformed(n, format!("bad year `{}`", fields[0]))),
        };
        seen_data = true;
        if fields.len() != 5 {
            return Err(malformed(n, format!("expected 5 columns, found {}", fields.len())));
        }
        let age = if fields[1] == "110+" {
            TOP_SINGLE_AGE
        } else {
            match fields[1].parse::<u32>() {
                Ok(a) if a < TOP_SINGLE_AGE => a,
                _ => return Err(malformed(n, format!("bad age `{}`", fields[1]))),
            }
        };
        let mut values = [0.0; 3];
        for (slot, raw) in values.iter_mut().zip(&fields[2..]) {
            let v: f64 = raw.parse().map_err(|_| malformed(n, format!("non-numeric exposure `{raw}`")))?;
            if !v.is_finite() || v < 0.0 {
                return Err(malformed(n, format!("exposure must be finite and non-negative, got `{raw}`")));
            }
            *slot = v;
        }
        let entry = rows.entry(year).or_insert([None; N_SINGLE_AGES]);
        if entry[age as usize].is_some() {
            return Err(malformed(n, format!("duplicate row for year {year} age {}", fields[1])));
        }
        entry[age as usize] = Some((values[0], values[1]));
    }

    if rows.is_empty() {
        return Err(IngestError::Empty);
    }
    let mut table = BTreeMap::new();
    for (year, ages) in rows {
        let missing: Vec<u32> = (0..=TOP_SINGLE_AGE).filter(|&a| ages[a as usize].is_none()).collect();
        if !missing.is_empty() {
            return Err(IngestError::Incomplete {
                year,
                reason: format!("{} of {N_SINGLE_AGES} age rows missing (first missing age {})", missing.len(), missing[0]),
            });
        }
        let female = ages.iter().map(|a| a.expect("checked").0).collect();
        let male = ages.iter().map(|a| a.expect("checked").1).collect();
        table.insert((year, Sex::Female), female);
        table.insert((year, Sex::Male), male);
    }
    Ok(AnnualExposureTable { rows: table })
}

/// Write a table in the HMD `Exposures_1x1` layout. Both sexes must be
/// present for every year.
pub fn write_exposures(table: &AnnualExposureTable, title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    out.push('\n');
    let _ = writeln!(out, "{:>6}{:>12}{:>16}{:>16}{:>16}", "Year", "Age", "Female", "Male", "Total");
    for year in table.years() {
        for age in 0..=TOP_SINGLE_AGE {
            let f = table.get(year, Sex::Female, age).unwrap_or(0.0);
            let m = table.get(year, Sex::Male, age).unwrap_or(0.0);
            let age_label = if age == TOP_SINGLE_AGE { "110+".to_string() } else { age.to_string() };
            let _ = writeln!(out, "{year:>6}{age_label:>12}{f:>16.2}{m:>16.2}{:>16.2}", f + m);
        }
    }
    out
}

/// Annual exposure summed to the 22-group grid, by (year, sex).
pub type GroupedExposure = BTreeMap<(i32, Sex), [f64; N_GROUPS]>;

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Fold single-year ages into the abridged grid; ages 100..=110 land in `100+`.
pub fn aggregate_ages(table: &AnnualExposureTable) -> GroupedExposure {
    table
        .iter()
        .map(|(year, sex, ages)| {
            let mut groups = [0.0; N_GROUPS];
            for (slot, group) in groups.iter_mut().zip(crate::age::AgeGrid.groups()) {
                *slot = compensated_sum(group.single_ages().map(|a| ages[a as usize]));
            }
            ((year, sex), groups)
        })
        .collect()
}
