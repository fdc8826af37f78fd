//! Winter:summer proportional hazards.
//!
//! The model is `W = P * S` on age-specific rates at and above an age floor.
//! `P` is the exponentiated mean log ratio, which is the same thing as the
//! ratio of the two seasons' geometric mean rates. Goodness of fit is an R²
//! on the log scale against that one-parameter model.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::age::{AgeGrid, AgeGroup, N_GROUPS};
use crate::lifetable::{death_rates, LifeTableError};
use crate::season::{Pseudoseason, SeasonKind, Sex};
use crate::surface::MortalitySurface;

pub const DEFAULT_AGE_FLOOR: u32 = 45;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum HazardError {
    #[error("{kind} rate at age {group}{} must be positive, got {value}", season.map(|s| format!(" in {s}")).unwrap_or_default())]
    NonPositiveRate { kind: SeasonKind, season: Option<Pseudoseason>, group: AgeGroup, value: f64 },
    #[error("need at least 2 age groups at or above the floor, found {0}")]
    TooFewAges(usize),
    #[error("no winter/summer pairs available for {0}")]
    NoPairs(Sex),
    #[error(transparent)]
    Rates(#[from] LifeTableError),
}

/// Which summer a winter is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// `Winter(Y)` against `Summer(Y)`, the summer just before it.
    #[default]
    PrevSummer,
    /// `Winter(Y)` against `Summer(Y + 1)`.
    NextSummer,
}

impl Pairing {
    pub fn summer_for(self, winter: Pseudoseason) -> Pseudoseason {
        match self {
            Pairing::PrevSummer => Pseudoseason::summer(winter.label_year),
            Pairing::NextSummer => Pseudoseason::summer(winter.label_year + 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Pairing::PrevSummer => "prev-summer",
            Pairing::NextSummer => "next-summer",
        }
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pairing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prev-summer" => Ok(Pairing::PrevSummer),
            "next-summer" => Ok(Pairing::NextSummer),
            other => Err(format!("unknown pairing `{other}` (expected prev-summer or next-summer)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SeasonPair {
    pub winter: Pseudoseason,
    pub summer: Pseudoseason,
}

/// Fitted `P` with its log-scale goodness of fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProportionalHazard {
    pub p: f64,
    pub r2: f64,
    /// Age groups per year entering the estimate.
    pub n_ages: usize,
    /// Total (year, age) cells; equals `n_ages` for a single year.
    pub n_cells: usize,
}

/// Estimate from `(winter, summer)` rate pairs, already validated positive.
fn fit_cells(cells: &[(f64, f64)], n_ages: usize) -> ProportionalHazard {
    let n = cells.len() as f64;
    let log_p = cells.iter().map(|&(w, s)| w.ln() - s.ln()).sum::<f64>() / n;
    let mean_log_w = cells.iter().map(|&(w, _)| w.ln()).sum::<f64>() / n;
    let ss_res: f64 = cells.iter().map(|&(w, s)| (w.ln() - log_p - s.ln()).powi(2)).sum();
    let ss_tot: f64 = cells.iter().map(|&(w, _)| (w.ln() - mean_log_w).powi(2)).sum();
    let r2 = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        f64::NEG_INFINITY
    };
    ProportionalHazard { p: log_p.exp(), r2, n_ages, n_cells: cells.len() }
}

fn included_groups(age_floor: u32) -> Vec<AgeGroup> {
    AgeGrid.at_or_above(age_floor).collect()
}

fn collect_cells(
    winter: &[f64; N_GROUPS],
    summer: &[f64; N_GROUPS],
    groups: &[AgeGroup],
    pair: Option<SeasonPair>,
    out: &mut Vec<(f64, f64)>,
) -> Result<(), HazardError> {
    for &g in groups {
        let (w, s) = (winter[g.index()], summer[g.index()]);
        for (kind, value) in [(SeasonKind::Winter, w), (SeasonKind::Summer, s)] {
            if !(value.is_finite() && value > 0.0) {
                let season = pair.map(|p| if kind == SeasonKind::Winter { p.winter } else { p.summer });
                return Err(HazardError::NonPositiveRate { kind, season, group: g, value });
            }
        }
        out.push((w, s));
    }
    Ok(())
}

/// Single-year proportional hazard from two rate vectors.
pub fn estimate_ph_year(
    winter: &[f64; N_GROUPS],
    summer: &[f64; N_GROUPS],
    age_floor: u32,
) -> Result<ProportionalHazard, HazardError> {
    let groups = included_groups(age_floor);
    if groups.len() < 2 {
        return Err(HazardError::TooFewAges(groups.len()));
    }
    let mut cells = Vec::with_capacity(groups.len());
    collect_cells(winter, summer, &groups, None, &mut cells)?;
    Ok(fit_cells(&cells, groups.len()))
}

/// Winter/summer pairs present in the surface for `sex`, chronological.
pub fn season_pairs(surface: &MortalitySurface, sex: Sex, pairing: Pairing) -> Vec<SeasonPair> {
    surface
        .seasons_of(SeasonKind::Winter)
        .into_iter()
        .map(|winter| SeasonPair { winter, summer: pairing.summer_for(winter) })
        .filter(|p| surface.contains(p.winter, sex) && surface.contains(p.summer, sex))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YearEstimate {
    pub sex: Sex,
    pub pair: SeasonPair,
    pub estimate: ProportionalHazard,
}

pub fn estimate_ph_by_year(
    surface: &MortalitySurface,
    sex: Sex,
    age_floor: u32,
    pairing: Pairing,
) -> Result<Vec<YearEstimate>, HazardError> {
    let groups = included_groups(age_floor);
    if groups.len() < 2 {
        return Err(HazardError::TooFewAges(groups.len()));
    }
    season_pairs(surface, sex, pairing)
        .into_iter()
        .map(|pair| {
            let w = death_rates(surface, pair.winter, sex)?;
            let s = death_rates(surface, pair.summer, sex)?;
            let mut cells = Vec::with_capacity(groups.len());
            collect_cells(&w, &s, &groups, Some(pair), &mut cells)?;
            Ok(YearEstimate { sex, pair, estimate: fit_cells(&cells, groups.len()) })
        })
        .collect()
}

/// One `P` over every (year, age) cell of every available pair.
pub fn estimate_ph_pooled(
    surface: &MortalitySurface,
    sex: Sex,
    age_floor: u32,
    pairing: Pairing,
) -> Result<ProportionalHazard, HazardError> {
    let groups = included_groups(age_floor);
    if groups.len() < 2 {
        return Err(HazardError::TooFewAges(groups.len()));
    }
    let pairs = season_pairs(surface, sex, pairing);
    if pairs.is_empty() {
        return Err(HazardError::NoPairs(sex));
    }
    let mut cells = Vec::with_capacity(groups.len() * pairs.len());
    for pair in pairs {
        let w = death_rates(surface, pair.winter, sex)?;
        let s = death_rates(surface, pair.summer, sex)?;
        collect_cells(&w, &s, &groups, Some(pair), &mut cells)?;
    }
    Ok(fit_cells(&cells, groups.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellFlag {
    Ok,
    ZeroWinter,
    ZeroSummer,
    ZeroBoth,
}

impl CellFlag {
    pub fn name(self) -> &'static str {
        match self {
            CellFlag::Ok => "ok",
            CellFlag::ZeroWinter => "zero-winter",
            CellFlag::ZeroSummer => "zero-summer",
            CellFlag::ZeroBoth => "zero-both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioCell {
    pub ratio: Option<f64>,
    pub flag: CellFlag,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub pair: SeasonPair,
    pub cells: [RatioCell; N_GROUPS],
}

/// Winter:summer rate ratios by (pair, age group).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioMatrix {
    pub sex: Sex,
    pub rows: Vec<RatioRow>,
}

impl RatioMatrix {
    pub fn flagged(&self) -> usize {
        self.rows.iter().flat_map(|r| r.cells.iter()).filter(|c| c.flag != CellFlag::Ok).count()
    }
}

pub fn ratio_matrix(surface: &MortalitySurface, sex: Sex, pairing: Pairing) -> Result<RatioMatrix, HazardError> {
    let rows = season_pairs(surface, sex, pairing)
        .into_iter()
        .map(|pair| {
            let w = death_rates(surface, pair.winter, sex)?;
            let s = death_rates(surface, pair.summer, sex)?;
            let cells = std::array::from_fn(|i| match (w[i] > 0.0, s[i] > 0.0) {
                (true, true) => RatioCell { ratio: Some(w[i] / s[i]), flag: CellFlag::Ok },
                (false, true) => RatioCell { ratio: None, flag: CellFlag::ZeroWinter },
                (true, false) => RatioCell { ratio: None, flag: CellFlag::ZeroSummer },
                (false, false) => RatioCell { ratio: None, flag: CellFlag::ZeroBoth },
            });
            Ok(RatioRow { pair, cells })
        })
        .collect::<Result<_, HazardError>>()?;
    Ok(RatioMatrix { sex, rows })
}
