//! The abridged 22-group age grid: `0`, `1-4`, `5-9`, ..., `95-99`, `100+`.

use std::fmt;

use serde::Serialize;

/// Number of abridged age groups.
pub const N_GROUPS: usize = 22;

/// Index of the open-ended `100+` group.
pub const OPEN_GROUP: usize = N_GROUPS - 1;

/// Highest single-year age carried by exposure tables (`110+` bucket).
pub const TOP_SINGLE_AGE: u32 = 110;

/// Nominal midpoint assigned to the open `100+` interval.
pub const OPEN_GROUP_MIDPOINT: f64 = 102.5;

/// One abridged age interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AgeGroup {
    index: usize,
}

impl AgeGroup {
    pub fn new(index: usize) -> Option<Self> {
        (index < N_GROUPS).then_some(Self { index })
    }

    pub fn index(self) -> usize {
        self.index
    }

    pub fn lower(self) -> u32 {
        match self.index {
            0 => 0,
            1 => 1,
            i => 5 * (i as u32 - 1),
        }
    }

    /// Interval width in years, `None` for the open `100+` group.
    pub fn width(self) -> Option<u32> {
        match self.index {
            0 => Some(1),
            1 => Some(4),
            OPEN_GROUP => None,
            _ => Some(5),
        }
    }

    pub fn is_open(self) -> bool {
        self.index == OPEN_GROUP
    }

    /// Scalar age used by anything that needs one; the open group sits at 102.5.
    pub fn midpoint(self) -> f64 {
        match self.width() {
            Some(w) => self.lower() as f64 + w as f64 / 2.0,
            None => OPEN_GROUP_MIDPOINT,
        }
    }

    /// Group containing a single-year age; ages past 100 fold into the open group.
    pub fn of_age(age: u32) -> Self {
        let index = match age {
            0 => 0,
            1..=4 => 1,
            a if a >= 100 => OPEN_GROUP,
            a => (a / 5 + 1) as usize,
        };
        Self { index }
    }

    /// Single-year ages (within `0..=110`) that make up this group.
    pub fn single_ages(self) -> std::ops::RangeInclusive<u32> {
        match self.width() {
            Some(w) => self.lower()..=self.lower() + w - 1,
            None => self.lower()..=TOP_SINGLE_AGE,
        }
    }

    pub fn label(self) -> String {
        match self.width() {
            Some(1) => format!("{}", self.lower()),
            Some(w) => format!("{}-{}", self.lower(), self.lower() + w - 1),
            None => format!("{}+", self.lower()),
        }
    }
}

impl fmt::Display for AgeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// The full 22-group grid, in order.
#[derive(Debug, Clone, Copy, Default)]
pub struct AgeGrid;

impl AgeGrid {
    pub fn groups(self) -> impl ExactSizeIterator<Item = AgeGroup> + Clone {
        (0..N_GROUPS).map(|index| AgeGroup { index })
    }

    pub fn group(self, index: usize) -> Option<AgeGroup> {
        AgeGroup::new(index)
    }

    /// Groups whose lower bound is at least `floor`, open group included.
    pub fn at_or_above(self, floor: u32) -> impl Iterator<Item = AgeGroup> {
        self.groups().filter(move |g| g.lower() >= floor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bounds() {
        let lowers: Vec<u32> = AgeGrid.groups().map(AgeGroup::lower).collect();
        let mut expected = vec![0, 1];
        expected.extend((1..=20).map(|k| 5 * k));
        assert_eq!(lowers, expected);
        assert_eq!(lowers.len(), N_GROUPS);
    }

    #[test]
    fn groups_partition_the_age_axis() {
        let groups: Vec<_> = AgeGrid.groups().collect();
        for pair in groups.windows(2) {
            assert_eq!(pair[0].lower() + pair[0].width().unwrap(), pair[1].lower());
        }
        assert!(groups[OPEN_GROUP].is_open());
        for age in 0..=TOP_SINGLE_AGE {
            let g = AgeGroup::of_age(age);
            assert!(g.single_ages().contains(&age), "age {age} not in {g}");
        }
    }

    #[test]
    fn midpoints_and_labels() {
        let g = AgeGroup::new(12).unwrap();
        assert_eq!(g.label(), "55-59");
        assert_eq!(g.midpoint(), 57.5);
        assert_eq!(AgeGroup::new(0).unwrap().midpoint(), 0.5);
        assert_eq!(AgeGroup::new(1).unwrap().midpoint(), 3.0);
        assert_eq!(AgeGroup::new(OPEN_GROUP).unwrap().midpoint(), 102.5);
        assert_eq!(AgeGroup::new(OPEN_GROUP).unwrap().label(), "100+");
        assert!(AgeGroup::new(N_GROUPS).is_none());
    }

    #[test]
    fn single_age_counts() {
        let counts: Vec<usize> = AgeGrid.groups().map(|g| g.single_ages().count()).collect();
        assert_eq!(counts[0], 1);
        assert_eq!(counts[1], 4);
        assert_eq!(counts[2], 5);
        assert_eq!(counts[OPEN_GROUP], 11);
        assert_eq!(counts.iter().sum::<usize>(), 111);
    }
}
