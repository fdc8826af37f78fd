//! Synthetic inputs with known ground truth, and a day-by-day micro-simulation
//! used as a brute-force oracle for death rates.
//!
//! The synthetic population is stationary: every single age `0..=110` holds
//! the same number of persons of each sex in every year. The annual hazard at
//! single age `a` is `exp(alpha + beta (a + 0.5))`, multiplied by
//! `winter_multiplier` in winter months at ages 45 and over and by
//! `youth_summer_multiplier` in summer months at ages 15-34.
//!
//! Scenario files are plain `key = value` text; `#` starts a comment:
//!
//! ```text
//! seed = 7
//! first_year = 2000          # deaths cover Jan first_year ..= Dec last_year
//! last_year = 2009
//! female_alpha = -10.94
//! female_beta = 0.0975
//! male_alpha = -9.80
//! male_beta = 0.0869
//! winter_multiplier = 1.12
//! youth_summer_multiplier = 1.0
//! population_per_age = 100000
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::age::{AgeGrid, AgeGroup, TOP_SINGLE_AGE};
use crate::gompertz::GompertzCoefficients;
use crate::ingest::{write_deaths, write_exposures, AnnualExposureTable, DeathsRecord};
use crate::season::{days_in_year, pseudoseason_of, Pseudoseason, SeasonKind, Sex, YearMonth};

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("scenario line {line}: {reason}")]
    Config { line: usize, reason: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("cannot access {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub seed: u64,
    pub first_year: i32,
    pub last_year: i32,
    pub female: GompertzCoefficients,
    pub male: GompertzCoefficients,
    pub winter_multiplier: f64,
    pub youth_summer_multiplier: f64,
    pub population_per_age: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            seed: 1,
            first_year: 2005,
            last_year: 2014,
            female: GompertzCoefficients::new(-10.94, 0.0975),
            male: GompertzCoefficients::new(-9.80, 0.0869),
            winter_multiplier: 1.12,
            youth_summer_multiplier: 1.0,
            population_per_age: 100_000.0,
        }
    }
}

const KEYS: [&str; 10] = [
    "seed",
    "first_year",
    "last_year",
    "female_alpha",
    "female_beta",
    "male_alpha",
    "male_beta",
    "winter_multiplier",
    "youth_summer_multiplier",
    "population_per_age",
];

impl Scenario {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::Invalid(m.to_string()));
        if self.last_year < self.first_year {
            return bad("last_year precedes first_year");
        }
        if !(self.winter_multiplier > 0.0 && self.winter_multiplier.is_finite()) {
            return bad("winter_multiplier must be positive");
        }
        if !(self.youth_summer_multiplier > 0.0 && self.youth_summer_multiplier.is_finite()) {
            return bad("youth_summer_multiplier must be positive");
        }
        if !(self.population_per_age > 0.0 && self.population_per_age.is_finite()) {
            return bad("population_per_age must be positive");
        }
        for c in [self.female, self.male] {
            if !(c.alpha.is_finite() && c.beta.is_finite()) {
                return bad("Gompertz coefficients must be finite");
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, SynthError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| SynthError::Config { line: i + 1, reason };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected `key = value`".into()))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(err(format!("unknown key `{key}`")));
            }
            if values.insert(key.to_string(), (i + 1, value.trim().to_string())).is_some() {
                return Err(err(format!("duplicate key `{key}`")));
            }
        }

        let mut s = Scenario::default();
        for (key, (line, value)) in &values {
            let err = || SynthError::Config { line: *line, reason: format!("bad value `{value}` for `{key}`") };
            let float = || value.parse::<f64>().map_err(|_| err());
            match key.as_str() {
                "seed" => s.seed = value.parse().map_err(|_| err())?,
                "first_year" => s.first_year = value.parse().map_err(|_| err())?,
                "last_year" => s.last_year = value.parse().map_err(|_| err())?,
                "female_alpha" => s.female.alpha = float()?,
                "female_beta" => s.female.beta = float()?,
                "male_alpha" => s.male.alpha = float()?,
                "male_beta" => s.male.beta = float()?,
                "winter_multiplier" => s.winter_multiplier = float()?,
                "youth_summer_multiplier" => s.youth_summer_multiplier = float()?,
                "population_per_age" => s.population_per_age = float()?,
                _ => unreachable!("checked against KEYS"),
            }
        }
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SynthError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| SynthError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn to_config_string(&self) -> String {
        format!(
            "seed = {}\nfirst_year = {}\nlast_year = {}\nfemale_alpha = {}\nfemale_beta = {}\nmale_alpha = {}\nmale_beta = {}\nwinter_multiplier = {}\nyouth_summer_multiplier = {}\npopulation_per_age = {}\n",
            self.seed,
            self.first_year,
            self.last_year,
            self.female.alpha,
            self.female.beta,
            self.male.alpha,
            self.male.beta,
            self.winter_multiplier,
            self.youth_summer_multiplier,
            self.population_per_age
        )
    }

    pub fn coefficients(&self, sex: Sex) -> GompertzCoefficients {
        match sex {
            Sex::Female => self.female,
            Sex::Male => self.male,
        }
    }

    /// Seasonal multiplier at single age `age`.
    pub fn multiplier(&self, kind: SeasonKind, age: u32) -> f64 {
        match kind {
            SeasonKind::Winter if age >= 45 => self.winter_multiplier,
            SeasonKind::Summer if (15..=34).contains(&age) => self.youth_summer_multiplier,
            _ => 1.0,
        }
    }

    /// Annual hazard at single age `age` during a season of kind `kind`.
    pub fn hazard(&self, sex: Sex, age: u32, kind: SeasonKind) -> f64 {
        self.coefficients(sex).predict_mx(age as f64 + 0.5) * self.multiplier(kind, age)
    }

    /// True seasonal death rate of an age group: the mean single-age hazard,
    /// since every single age holds the same population.
    pub fn expected_rate(&self, sex: Sex, group: AgeGroup, kind: SeasonKind) -> f64 {
        let ages = group.single_ages();
        let n = ages.clone().count() as f64;
        ages.map(|a| self.hazard(sex, a, kind)).sum::<f64>() / n
    }
}

/// Generated deaths and exposures, in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub deaths: Vec<DeathsRecord>,
    pub exposures: AnnualExposureTable,
}

pub const DEATHS_FILE: &str = "deaths.csv";
pub const EXPOSURES_FILE: &str = "Exposures_1x1.txt";

impl SyntheticData {
    pub fn deaths_csv(&self) -> String {
        write_deaths(&self.deaths)
    }

    pub fn exposures_text(&self) -> String {
        write_exposures(&self.exposures, "Synthetic stationary population, Exposure to risk (period 1x1)")
    }

    /// Write `deaths.csv` and `Exposures_1x1.txt` into `dir`.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<(), SynthError> {
        let dir = dir.as_ref();
        let io = |path: &Path| {
            let path = path.display().to_string();
            move |source| SynthError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let deaths = dir.join(DEATHS_FILE);
        std::fs::write(&deaths, self.deaths_csv()).map_err(io(&deaths))?;
        let exposures = dir.join(EXPOSURES_FILE);
        std::fs::write(&exposures, self.exposures_text()).map_err(io(&exposures))?;
        Ok(())
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

fn block_id(year: i32, sex: Sex) -> u64 {
    (year as i64 - i32::MIN as i64) as u64 * 2 + sex as u64
}

/// Draw monthly Poisson deaths for every (year, month, sex, group) in the span.
///
/// Each (year, sex) block has its own random stream, so output depends only
/// on the seed and the block, never on generation order.
pub fn generate(scenario: &Scenario) -> Result<SyntheticData, SynthError> {
    scenario.validate()?;
    let n = scenario.population_per_age;

    let mut deaths = Vec::new();
    let mut rows = BTreeMap::new();
    for year in scenario.first_year..=scenario.last_year {
        let year_days = days_in_year(year) as f64;
        for sex in Sex::ALL {
            rows.insert((year, sex), vec![n; TOP_SINGLE_AGE as usize + 1]);
            let mut rng = block_rng(scenario.seed, block_id(year, sex));
            for month in 1..=12u8 {
                let ym = YearMonth { year, month };
                let kind = pseudoseason_of(ym).kind;
                let person_years = n * ym.days() as f64 / year_days;
                for group in AgeGrid.groups() {
                    let expected: f64 = group.single_ages().map(|a| person_years * scenario.hazard(sex, a, kind)).sum();
                    let count = if expected > 0.0 {
                        Poisson::new(expected)
                            .map_err(|e| SynthError::Invalid(format!("Poisson mean {expected}: {e}")))?
                            .sample(&mut rng) as u64
                    } else {
                        0
                    };
                    deaths.push(DeathsRecord { period: ym, sex, group, deaths: count });
                }
            }
        }
    }
    // canonical order is (year, month, sex, age)
    deaths.sort_by_key(|r| (r.period, r.sex, r.group));
    let exposures = AnnualExposureTable::from_rows(rows).map_err(|e| SynthError::Invalid(e.to_string()))?;
    Ok(SyntheticData { deaths, exposures })
}

/// Tallies from a micro-simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicroSimResult {
    pub persons: usize,
    pub deaths: u64,
    pub person_years: f64,
}

impl MicroSimResult {
    pub fn rate(&self) -> f64 {
        if self.person_years > 0.0 {
            self.deaths as f64 / self.person_years
        } else {
            0.0
        }
    }
}

/// Follow each person through every day of `season`.
///
/// `hazard(age, kind)` is an annual hazard; on a day of year `Y` the death
/// probability is `1 - exp(-h / days_in_year(Y))`. Survived days count in
/// full, the day of death counts half, and person-days are converted to
/// person-years with the day count of the year they fall in.
pub fn simulate_season(
    ages: &[u32],
    season: Pseudoseason,
    hazard: impl Fn(u32, SeasonKind) -> f64,
    rng: &mut impl Rng,
) -> MicroSimResult {
    let days: Vec<f64> = season
        .months()
        .iter()
        .flat_map(|m| std::iter::repeat_n(days_in_year(m.year) as f64, m.days() as usize))
        .collect();
    let mut deaths = 0u64;
    let mut person_years = 0.0;
    for &age in ages {
        let h = hazard(age, season.kind);
        for &year_days in &days {
            let p = -(-h / year_days).exp_m1();
            if rng.gen::<f64>() < p {
                deaths += 1;
                person_years += 0.5 / year_days;
                break;
            }
            person_years += 1.0 / year_days;
        }
    }
    MicroSimResult { persons: ages.len(), deaths, person_years }
}

/// Upper bound on simulated persons per oracle call.
pub const MAX_MICRO_PERSONS: usize = 100_000;

/// Simulate `persons` individuals spread evenly over the group's single ages
/// under the scenario's hazards.
pub fn micro_sim_rate_oracle(
    scenario: &Scenario,
    season: Pseudoseason,
    sex: Sex,
    group: AgeGroup,
    persons: usize,
) -> Result<MicroSimResult, SynthError> {
    if persons == 0 || persons > MAX_MICRO_PERSONS {
        return Err(SynthError::Invalid(format!("persons must be in 1..={MAX_MICRO_PERSONS}")));
    }
    let single: Vec<u32> = group.single_ages().collect();
    let ages: Vec<u32> = (0..persons).map(|i| single[i % single.len()]).collect();
    // stream ids above the generator's block range
    let stream = (1u64 << 40) ^ ((season.label_year as u32 as u64) << 8) ^ ((season.kind as u64) << 6) ^ ((sex as u64) << 5) ^ group.index() as u64;
    let mut rng = block_rng(scenario.seed, stream);
    Ok(simulate_season(&ages, season, |a, k| scenario.hazard(sex, a, k), &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let s = Scenario { seed: 99, winter_multiplier: 1.3, first_year: 1990, last_year: 1995, ..Default::default() };
        assert_eq!(Scenario::parse(&s.to_config_string()).unwrap(), s);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(Scenario::parse("speed = 3"), Err(SynthError::Config { line: 1, .. })));
        assert!(matches!(Scenario::parse("seed = 1\nseed = 2"), Err(SynthError::Config { line: 2, .. })));
        assert!(matches!(Scenario::parse("# c\nseed"), Err(SynthError::Config { line: 2, .. })));
        assert!(matches!(Scenario::parse("winter_multiplier = 0"), Err(SynthError::Invalid(_))));
        assert!(matches!(Scenario::parse("first_year = 2000\nlast_year = 1999"), Err(SynthError::Invalid(_))));
        let s = Scenario::parse("seed = 5 # trailing\n\nwinter_multiplier=1.2").unwrap();
        assert_eq!((s.seed, s.winter_multiplier), (5, 1.2));
    }

    #[test]
    fn multipliers_by_age_and_season() {
        let s = Scenario { winter_multiplier: 1.2, youth_summer_multiplier: 1.5, ..Default::default() };
        assert_eq!(s.multiplier(SeasonKind::Winter, 45), 1.2);
        assert_eq!(s.multiplier(SeasonKind::Winter, 44), 1.0);
        assert_eq!(s.multiplier(SeasonKind::Summer, 15), 1.5);
        assert_eq!(s.multiplier(SeasonKind::Summer, 34), 1.5);
        assert_eq!(s.multiplier(SeasonKind::Summer, 35), 1.0);
        assert_eq!(s.multiplier(SeasonKind::Winter, 20), 1.0);
    }

    #[test]
    fn generation_is_deterministic_and_complete() {
        let s = Scenario { first_year: 2000, last_year: 2001, population_per_age: 1000.0, ..Default::default() };
        let a = generate(&s).unwrap();
        let b = generate(&s).unwrap();
        assert_eq!(a.deaths_csv(), b.deaths_csv());
        assert_eq!(a.exposures_text(), b.exposures_text());
        assert_eq!(a.deaths.len(), 2 * 12 * 2 * 22);
        let other = generate(&Scenario { seed: 2, ..s.clone() }).unwrap();
        assert_ne!(a.deaths_csv(), other.deaths_csv());
        // a block's draws do not depend on which other years are generated
        let later = generate(&Scenario { first_year: 2001, ..s }).unwrap();
        let tail: Vec<_> = a.deaths.iter().filter(|r| r.period.year == 2001).copied().collect();
        assert_eq!(tail, later.deaths);
    }

    #[test]
    fn generated_files_parse_cleanly() {
        let s = Scenario { first_year: 2003, last_year: 2004, population_per_age: 5000.0, ..Default::default() };
        let data = generate(&s).unwrap();
        let deaths = crate::ingest::parse_deaths_str(&data.deaths_csv()).unwrap();
        assert_eq!(deaths, data.deaths);
        let exposures = crate::ingest::parse_exposures_str(&data.exposures_text()).unwrap();
        assert_eq!(exposures, data.exposures);
    }

    #[test]
    fn zero_hazard_means_no_deaths() {
        let ages = vec![50; 1000];
        let mut rng = block_rng(1, 0);
        let r = simulate_season(&ages, Pseudoseason::summer(2001), |_, _| 0.0, &mut rng);
        assert_eq!(r.deaths, 0);
        assert_eq!(r.rate(), 0.0);
        assert!((r.person_years - 1000.0 * 184.0 / 365.0).abs() < 1e-6);
    }

    #[test]
    fn half_year_cohort_exposure() {
        // 100,000 persons over a six-month window with deaths mid-window: the
        // textbook approximation deducts half the decedents' time
        let exposure: f64 = (100_000.0 - 250.0) * 0.5 + 250.0 * 0.25;
        assert_eq!(exposure, 49_937.5);
        assert!((250.0 / exposure - 0.005_006_3).abs() < 1e-7);
    }

    #[test]
    fn constant_hazard_rate_is_recovered() {
        let h = 0.2;
        let ages = vec![60; 50_000];
        let mut rng = block_rng(3, 7);
        let r = simulate_season(&ages, Pseudoseason::winter(2001), |_, _| h, &mut rng);
        let se = h / (r.deaths as f64).sqrt();
        assert!((r.rate() - h).abs() < 4.0 * se, "{} vs {h} (se {se})", r.rate());
    }

    #[test]
    fn extreme_hazard_matches_exponential_survival() {
        // everyone dies within days; mean survival is about 1/h years
        let h = 100.0;
        let ages = vec![90; 20_000];
        let mut rng = block_rng(4, 9);
        let r = simulate_season(&ages, Pseudoseason::summer(2001), |_, _| h, &mut rng);
        assert_eq!(r.deaths, 20_000);
        let mean_survival = r.person_years / r.persons as f64;
        assert!((mean_survival * h - 1.0).abs() < 0.03, "{mean_survival}");
        assert!((r.rate() / h - 1.0).abs() < 0.03);
    }

    #[test]
    fn oracle_guards_population_size() {
        let s = Scenario::default();
        let g = AgeGroup::new(15).unwrap();
        assert!(micro_sim_rate_oracle(&s, Pseudoseason::summer(2005), Sex::Male, g, 0).is_err());
        assert!(micro_sim_rate_oracle(&s, Pseudoseason::summer(2005), Sex::Male, g, MAX_MICRO_PERSONS + 1).is_err());
    }
}
