use std::collections::BTreeMap;

use crate::age::{AgeGroup, N_GROUPS};
use crate::season::{Pseudoseason, SeasonKind, Sex};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SurfaceError {
    #[error("{season} {sex} age {group}: exposure must be positive and finite, got {value}")]
    BadExposure { season: Pseudoseason, sex: Sex, group: AgeGroup, value: f64 },
    #[error("no data for {season} {sex}")]
    MissingSlice { season: Pseudoseason, sex: Sex },
}

/// Deaths and person-years for one (pseudoseason, sex), all 22 groups.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonSlice {
    pub deaths: [u64; N_GROUPS],
    pub exposure: [f64; N_GROUPS],
}

impl SeasonSlice {
    pub fn total_deaths(&self) -> u64 {
        self.deaths.iter().sum()
    }
}

/// Deaths and exposure indexed by (pseudoseason, sex, age group).
///
/// Only complete pseudoseasons are ever inserted; every stored slice covers
/// the whole grid with strictly positive exposure.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MortalitySurface {
    slices: BTreeMap<(Pseudoseason, Sex), SeasonSlice>,
}

impl MortalitySurface {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        season: Pseudoseason,
        sex: Sex,
        deaths: [u64; N_GROUPS],
        exposure: [f64; N_GROUPS],
    ) -> Result<(), SurfaceError> {
        for (i, &value) in exposure.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                let group = AgeGroup::new(i).expect("grid index");
                return Err(SurfaceError::BadExposure { season, sex, group, value });
            }
        }
        self.slices.insert((season, sex), SeasonSlice { deaths, exposure });
        Ok(())
    }

    pub fn get(&self, season: Pseudoseason, sex: Sex) -> Result<&SeasonSlice, SurfaceError> {
        self.slices.get(&(season, sex)).ok_or(SurfaceError::MissingSlice { season, sex })
    }

    pub fn contains(&self, season: Pseudoseason, sex: Sex) -> bool {
        self.slices.contains_key(&(season, sex))
    }

    /// Slices in chronological order, females before males within a season.
    pub fn iter(&self) -> impl Iterator<Item = (Pseudoseason, Sex, &SeasonSlice)> {
        self.slices.iter().map(|(&(season, sex), slice)| (season, sex, slice))
    }

    /// Distinct seasons, chronological.
    pub fn seasons(&self) -> Vec<Pseudoseason> {
        let mut out: Vec<_> = self.slices.keys().map(|&(s, _)| s).collect();
        out.dedup();
        out
    }

    pub fn seasons_of(&self, kind: SeasonKind) -> Vec<Pseudoseason> {
        self.seasons().into_iter().filter(|s| s.kind == kind).collect()
    }

    pub fn sexes(&self) -> Vec<Sex> {
        Sex::ALL
            .into_iter()
            .filter(|sex| self.slices.keys().any(|(_, s)| s == sex))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive_exposure() {
        let mut s = MortalitySurface::new();
        let mut exposure = [1.0; N_GROUPS];
        exposure[3] = 0.0;
        let err = s.insert(Pseudoseason::summer(1960), Sex::Male, [0; N_GROUPS], exposure).unwrap_err();
        assert!(matches!(err, SurfaceError::BadExposure { group, .. } if group.index() == 3));
        assert!(s.is_empty());
    }

    #[test]
    fn seasons_are_chronological() {
        let mut s = MortalitySurface::new();
        for season in [Pseudoseason::summer(1961), Pseudoseason::winter(1960), Pseudoseason::summer(1960)] {
            for sex in Sex::ALL {
                s.insert(season, sex, [1; N_GROUPS], [1.0; N_GROUPS]).unwrap();
            }
        }
        assert_eq!(
            s.seasons(),
            vec![Pseudoseason::summer(1960), Pseudoseason::winter(1960), Pseudoseason::summer(1961)]
        );
        assert_eq!(s.seasons_of(SeasonKind::Winter), vec![Pseudoseason::winter(1960)]);
        assert_eq!(s.sexes(), vec![Sex::Female, Sex::Male]);
        assert_eq!(s.len(), 6);
    }
}
