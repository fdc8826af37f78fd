//! Monthly graduation of annual exposure and binning into pseudoseasons.
//!
//! Month `m` of year `Y` receives `annual * days(m, Y) / days_in_year(Y)`.
//! A winter draws November and December from year `Y` and January through
//! April from `Y + 1`, each from the same age group (no within-season aging).

use std::collections::{BTreeMap, BTreeSet};

use crate::age::{AgeGroup, N_GROUPS};
use crate::ingest::{aggregate_ages, AnnualExposureTable, DeathsRecord, GroupedExposure};
use crate::season::{complete_span, days_in_year, Pseudoseason, Sex, YearMonth};
use crate::surface::MortalitySurface;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GraduateError {
    #[error("annual exposure for {year} {sex} age {group} must be positive, got {value}")]
    NonPositiveAnnual { year: i32, sex: Sex, group: AgeGroup, value: f64 },
    #[error("{season} ({sex}) is missing month {month}")]
    MissingMonth { season: Pseudoseason, sex: Sex, month: YearMonth },
}

/// Person-years by (calendar month, sex) and age group.
pub type MonthlyExposure = BTreeMap<(YearMonth, Sex), [f64; N_GROUPS]>;

/// Pseudoseasonal exposure by (season, sex).
pub type SeasonalExposure = BTreeMap<(Pseudoseason, Sex), [f64; N_GROUPS]>;

/// Pseudoseasonal deaths by (season, sex).
pub type SeasonalDeaths = BTreeMap<(Pseudoseason, Sex), [u64; N_GROUPS]>;

pub fn graduate_to_months(annual: &GroupedExposure) -> Result<MonthlyExposure, GraduateError> {
    let mut out = MonthlyExposure::new();
    for (&(year, sex), groups) in annual {
        if let Some((i, &value)) = groups.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            let group = AgeGroup::new(i).expect("grid index");
            return Err(GraduateError::NonPositiveAnnual { year, sex, group, value });
        }
        let year_days = days_in_year(year) as f64;
        for month in 1..=12 {
            let ym = YearMonth { year, month };
            let share = ym.days() as f64 / year_days;
            out.insert((ym, sex), groups.map(|v| v * share));
        }
    }
    Ok(out)
}

fn sexes_in<K>(keys: impl Iterator<Item = K>, sex_of: impl Fn(K) -> Sex) -> BTreeSet<Sex> {
    keys.map(sex_of).collect()
}

/// Sum six monthly exposures per season. Every sex present in `monthly` must
/// have every month of every requested season.
pub fn bin_exposure(
    monthly: &MonthlyExposure,
    seasons: &[Pseudoseason],
) -> Result<SeasonalExposure, GraduateError> {
    let sexes = sexes_in(monthly.keys(), |&(_, s)| s);
    let mut out = SeasonalExposure::new();
    for &season in seasons {
        for &sex in &sexes {
            let mut total = [0.0; N_GROUPS];
            for month in season.months() {
                let cells = monthly
                    .get(&(month, sex))
                    .ok_or(GraduateError::MissingMonth { season, sex, month })?;
                for (t, v) in total.iter_mut().zip(cells) {
                    *t += v;
                }
            }
            out.insert((season, sex), total);
        }
    }
    Ok(out)
}

type MonthlyDeaths = BTreeMap<(YearMonth, Sex), [u64; N_GROUPS]>;

fn monthly_deaths(records: &[DeathsRecord]) -> MonthlyDeaths {
    let mut monthly = MonthlyDeaths::new();
    for r in records {
        monthly.entry((r.period, r.sex)).or_insert([0; N_GROUPS])[r.group.index()] += r.deaths;
    }
    monthly
}

fn season_deaths(monthly: &MonthlyDeaths, season: Pseudoseason, sex: Sex) -> Result<[u64; N_GROUPS], GraduateError> {
    let mut total = [0u64; N_GROUPS];
    for month in season.months() {
        let cells = monthly.get(&(month, sex)).ok_or(GraduateError::MissingMonth { season, sex, month })?;
        for (t, v) in total.iter_mut().zip(cells) {
            *t += v;
        }
    }
    Ok(total)
}

/// Sum six months of deaths per season. A month counts as present for a sex
/// once any record exists for it; absent age cells within it are zero.
pub fn bin_deaths(records: &[DeathsRecord], seasons: &[Pseudoseason]) -> Result<SeasonalDeaths, GraduateError> {
    let monthly = monthly_deaths(records);
    let sexes = sexes_in(monthly.keys(), |&(_, s)| s);
    let mut out = SeasonalDeaths::new();
    for &season in seasons {
        for &sex in &sexes {
            out.insert((season, sex), season_deaths(&monthly, season, sex)?);
        }
    }
    Ok(out)
}

/// A season dropped from the surface despite lying inside the data span.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedSeason {
    pub season: Pseudoseason,
    pub sex: Sex,
    pub reason: String,
}

/// Result of assembling a surface from raw inputs.
#[derive(Debug, Clone)]
pub struct SurfaceBuild {
    pub surface: MortalitySurface,
    /// Edge seasons only partly covered by the deaths span; discarded by rule.
    pub discarded_partial: Vec<Pseudoseason>,
    /// Interior seasons with missing deaths or exposure months.
    pub skipped: Vec<SkippedSeason>,
    pub first_month: YearMonth,
    pub last_month: YearMonth,
}

/// Run aggregation, graduation and binning, keeping only complete seasons.
pub fn assemble_surface(records: &[DeathsRecord], exposures: &AnnualExposureTable) -> SurfaceBuild {
    let first_month = records.iter().map(|r| r.period).min().unwrap_or(YearMonth { year: 0, month: 1 });
    let last_month = records.iter().map(|r| r.period).max().unwrap_or(YearMonth { year: 0, month: 1 });
    let coverage = if records.is_empty() { Default::default() } else { complete_span(first_month, last_month) };
    let sexes = sexes_in(records.iter(), |r| r.sex);
    let deaths_by_month = monthly_deaths(records);

    let grouped = aggregate_ages(exposures);
    let mut monthly = MonthlyExposure::new();
    let mut skipped = Vec::new();
    // graduate year by year so one bad year only loses the seasons touching it
    for (&key, groups) in &grouped {
        let single = GroupedExposure::from([(key, *groups)]);
        match graduate_to_months(&single) {
            Ok(m) => monthly.extend(m),
            Err(e) => skipped.push((key, e.to_string())),
        }
    }

    let mut surface = MortalitySurface::new();
    let mut skipped_seasons = Vec::new();
    for &season in &coverage.complete {
        for &sex in &sexes {
            let deaths = season_deaths(&deaths_by_month, season, sex);
            let exposure = season
                .months()
                .iter()
                .try_fold([0.0; N_GROUPS], |mut acc, &month| {
                    let cells = monthly.get(&(month, sex)).ok_or_else(|| {
                        match skipped.iter().find(|((y, s), _)| *y == month.year && *s == sex) {
                            Some((_, why)) => why.clone(),
                            None => GraduateError::MissingMonth { season, sex, month }.to_string(),
                        }
                    })?;
                    for (a, v) in acc.iter_mut().zip(cells) {
                        *a += v;
                    }
                    Ok::<_, String>(acc)
                });
            let result = match (deaths, exposure) {
                (Err(e), _) => Err(format!("deaths: {e}")),
                (_, Err(e)) => Err(format!("exposure: {e}")),
                (Ok(d), Ok(x)) => surface.insert(season, sex, d, x).map_err(|e| e.to_string()),
            };
            if let Err(reason) = result {
                skipped_seasons.push(SkippedSeason { season, sex, reason });
            }
        }
    }

    SurfaceBuild {
        surface,
        discarded_partial: coverage.partial,
        skipped: skipped_seasons,
        first_month,
        last_month,
    }
}
