//! Death rates and abridged period life tables per (pseudoseason, sex).
//!
//! A seasonal rate is deaths over six months of person-years, so it is
//! already annualized. Each season's table treats that rate as holding for a
//! full year.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::age::{AgeGrid, AgeGroup, N_GROUPS, OPEN_GROUP};
use crate::season::{Pseudoseason, SeasonKind, Sex};
use crate::surface::{MortalitySurface, SurfaceError};

pub const RADIX: f64 = 100_000.0;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LifeTableError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("age {group}: exposure must be positive, got {value}")]
    ZeroExposure { group: AgeGroup, value: f64 },
    #[error("age {group}: death rate must be finite and non-negative, got {value}")]
    BadRate { group: AgeGroup, value: f64 },
    #[error("open interval death rate is zero; its person-years are undefined")]
    OpenIntervalZeroRate,
}

/// How the closed-interval separation factors `ax` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxConvention {
    /// `n/2` everywhere.
    Midpoint,
    /// `a0 = 0.07 + 1.7 M0`, `a(1-4) = 1.5`, `n/2` elsewhere.
    #[default]
    CoaleDemeny,
}

impl AxConvention {
    pub fn name(self) -> &'static str {
        match self {
            AxConvention::Midpoint => "midpoint",
            AxConvention::CoaleDemeny => "cd",
        }
    }

    /// Separation factors for the closed groups; the open group's entry is
    /// `1 / M(last)` (or 0 when that rate is 0).
    pub fn separation_factors(self, mx: &[f64; N_GROUPS]) -> [f64; N_GROUPS] {
        let mut ax = [0.0; N_GROUPS];
        for g in AgeGrid.groups() {
            let i = g.index();
            ax[i] = match (self, g.width()) {
                (_, None) => {
                    if mx[i] > 0.0 {
                        1.0 / mx[i]
                    } else {
                        0.0
                    }
                }
                (AxConvention::CoaleDemeny, Some(n)) if i == 0 => (0.07 + 1.7 * mx[0]).min(n as f64),
                (AxConvention::CoaleDemeny, Some(_)) if i == 1 => 1.5,
                (_, Some(n)) => n as f64 / 2.0,
            };
        }
        ax
    }
}

impl fmt::Display for AxConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "midpoint" => Ok(AxConvention::Midpoint),
            "cd" => Ok(AxConvention::CoaleDemeny),
            other => Err(format!("unknown ax convention `{other}` (expected midpoint or cd)")),
        }
    }
}

/// `deaths / exposure` for every group.
pub fn rates_from_counts(deaths: &[u64; N_GROUPS], exposure: &[f64; N_GROUPS]) -> Result<[f64; N_GROUPS], LifeTableError> {
    let mut mx = [0.0; N_GROUPS];
    for g in AgeGrid.groups() {
        let i = g.index();
        if !(exposure[i].is_finite() && exposure[i] > 0.0) {
            return Err(LifeTableError::ZeroExposure { group: g, value: exposure[i] });
        }
        mx[i] = deaths[i] as f64 / exposure[i];
    }
    Ok(mx)
}

pub fn death_rates(surface: &MortalitySurface, season: Pseudoseason, sex: Sex) -> Result<[f64; N_GROUPS], LifeTableError> {
    let slice = surface.get(season, sex)?;
    rates_from_counts(&slice.deaths, &slice.exposure)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LifeTableRow {
    #[serde(skip)]
    pub group: AgeGroup,
    pub mx: f64,
    pub ax: f64,
    pub qx: f64,
    pub lx: f64,
    pub dx: f64,
    #[serde(rename = "Lx")]
    pub person_years: f64,
    #[serde(rename = "Tx")]
    pub remaining: f64,
    pub ex: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LifeTable {
    pub rows: [LifeTableRow; N_GROUPS],
    pub convention: AxConvention,
    /// Set when some closed-interval `qx` hit the cap of 1.
    pub capped: bool,
}

impl LifeTable {
    pub fn e0(&self) -> f64 {
        self.rows[0].ex
    }

    pub fn column(&self, f: impl Fn(&LifeTableRow) -> f64) -> [f64; N_GROUPS] {
        self.rows.map(|r| f(&r))
    }
}

/// Standard abridged life table from annualized rates.
///
/// `qx = n Mx / (1 + (n - ax) Mx)` capped at 1; survivorship ends at a capped
/// interval. Closed intervals get `Lx = n l(x+n) + ax dx`, the open one
/// `l / M`.
pub fn build_life_table(mx: &[f64; N_GROUPS], convention: AxConvention) -> Result<LifeTable, LifeTableError> {
    for g in AgeGrid.groups() {
        let m = mx[g.index()];
        if !(m.is_finite() && m >= 0.0) {
            return Err(LifeTableError::BadRate { group: g, value: m });
        }
    }
    if mx[OPEN_GROUP] <= 0.0 {
        return Err(LifeTableError::OpenIntervalZeroRate);
    }
    let ax = convention.separation_factors(mx);

    let mut qx = [0.0; N_GROUPS];
    let mut lx = [0.0; N_GROUPS + 1];
    let mut dx = [0.0; N_GROUPS];
    let mut big_l = [0.0; N_GROUPS];
    let mut capped = false;
    lx[0] = RADIX;
    for g in AgeGrid.groups() {
        let i = g.index();
        match g.width() {
            Some(n) => {
                let n = n as f64;
                let raw = n * mx[i] / (1.0 + (n - ax[i]) * mx[i]);
                qx[i] = if raw.is_finite() && raw <= 1.0 {
                    raw.max(0.0)
                } else {
                    capped = true;
                    1.0
                };
                dx[i] = lx[i] * qx[i];
                lx[i + 1] = if qx[i] == 1.0 { 0.0 } else { lx[i] - dx[i] };
                big_l[i] = n * lx[i + 1] + ax[i] * dx[i];
            }
            None => {
                qx[i] = 1.0;
                dx[i] = lx[i];
                big_l[i] = lx[i] / mx[i];
            }
        }
    }

    let mut tx = [0.0; N_GROUPS];
    let mut acc = 0.0;
    for i in (0..N_GROUPS).rev() {
        acc += big_l[i];
        tx[i] = acc;
    }

    let rows = std::array::from_fn(|i| LifeTableRow {
        group: AgeGroup::new(i).expect("grid index"),
        mx: mx[i],
        ax: ax[i],
        qx: qx[i],
        lx: lx[i],
        dx: dx[i],
        person_years: big_l[i],
        remaining: tx[i],
        ex: if lx[i] > 0.0 { tx[i] / lx[i] } else { 0.0 },
    });
    Ok(LifeTable { rows, convention, capped })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct E0Point {
    pub season: Pseudoseason,
    pub sex: Sex,
    pub e0: f64,
}

/// Life expectancy at birth for every (season, sex), chronological.
pub fn e0_series(surface: &MortalitySurface, convention: AxConvention) -> Result<Vec<E0Point>, LifeTableError> {
    surface
        .iter()
        .map(|(season, sex, slice)| {
            let mx = rates_from_counts(&slice.deaths, &slice.exposure)?;
            let table = build_life_table(&mx, convention)?;
            Ok(E0Point { season, sex, e0: table.e0() })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapPoint {
    pub sex: Sex,
    pub summer: Pseudoseason,
    pub winter: Pseudoseason,
    /// `e0(summer) - e0(preceding winter)`, years.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapSummary {
    pub sex: Sex,
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single pair.
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeasonalGapSeries {
    pub points: Vec<GapPoint>,
    pub summaries: Vec<GapSummary>,
}

/// Pair every summer `Y` with winter `Y - 1` when both are present.
pub fn seasonal_gap(series: &[E0Point]) -> SeasonalGapSeries {
    let lookup = |season: Pseudoseason, sex: Sex| series.iter().find(|p| p.season == season && p.sex == sex);
    let mut points = Vec::new();
    for p in series.iter().filter(|p| p.season.kind == SeasonKind::Summer) {
        let winter = Pseudoseason::winter(p.season.label_year - 1);
        if let Some(w) = lookup(winter, p.sex) {
            points.push(GapPoint { sex: p.sex, summer: p.season, winter, gap: p.e0 - w.e0 });
        }
    }
    points.sort_by_key(|p| (p.sex, p.summer));

    let summaries = Sex::ALL
        .into_iter()
        .filter_map(|sex| {
            let gaps: Vec<f64> = points.iter().filter(|p| p.sex == sex).map(|p| p.gap).collect();
            if gaps.is_empty() {
                return None;
            }
            let n = gaps.len();
            let mean = gaps.iter().sum::<f64>() / n as f64;
            let sd = if n > 1 {
                (gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            Some(GapSummary { sex, n, mean, sd })
        })
        .collect();
    SeasonalGapSeries { points, summaries }
}
