//! Gompertz hazards `M(x) = exp(alpha + beta x)` fitted by Poisson regression,
//! and winter/summer equivalent ages.
//!
//! Deaths in each age group are modelled as `Poisson(E_x exp(alpha + beta x))`
//! with log exposure as offset. The two-parameter GLM is solved by
//! iteratively reweighted least squares on centred ages.

use std::fmt::Write as _;

use serde::Serialize;

use crate::age::{AgeGrid, N_GROUPS};
use crate::season::{Pseudoseason, SeasonKind, Sex};

pub const DEFAULT_FIT_FLOOR: u32 = 45;
pub const MAX_ITERATIONS: usize = 100;
pub const DEVIANCE_TOLERANCE: f64 = 1e-10;
pub const STEP_TOLERANCE: f64 = 1e-10;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GompertzError {
    #[error("need at least 2 age groups to fit, found {0}")]
    TooFewGroups(usize),
    #[error("no deaths in the fitting window")]
    NoDeaths,
    #[error("group at age {age}: exposure must be positive, got {value}")]
    BadExposure { age: f64, value: f64 },
    #[error("group at age {age}: deaths must be finite and non-negative, got {value}")]
    BadDeaths { age: f64, value: f64 },
    #[error("ages, deaths and exposure lengths differ")]
    LengthMismatch,
    #[error(
        "IRLS did not converge in {MAX_ITERATIONS} iterations (last alpha {:.6}, beta {:.6}); deviance trace: {}",
        last.alpha, last.beta, fmt_trace(trace)
    )]
    NotConverged { last: GompertzCoefficients, trace: Vec<f64> },
    #[error("target slope is zero; no equivalent age exists")]
    FlatTarget,
}

fn fmt_trace(trace: &[f64]) -> String {
    let mut s = String::new();
    for (i, d) in trace.iter().enumerate() {
        let _ = write!(s, "{}{d:.6e}", if i == 0 { "" } else { ", " });
    }
    s
}

/// `(alpha, beta)` with `alpha` the log hazard at age 0 (per person-year) and
/// `beta` the log-hazard slope per year of age.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GompertzCoefficients {
    pub alpha: f64,
    pub beta: f64,
}

impl GompertzCoefficients {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    /// Death rate per person-year at `age`.
    pub fn predict_mx(&self, age: f64) -> f64 {
        (self.alpha + self.beta * age).exp()
    }
}

pub fn predict_mx(coefficients: &GompertzCoefficients, age: f64) -> f64 {
    coefficients.predict_mx(age)
}

/// Grouped data entering a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct GompertzData {
    pub ages: Vec<f64>,
    pub deaths: Vec<f64>,
    pub exposure: Vec<f64>,
}

impl GompertzData {
    pub fn new(ages: Vec<f64>, deaths: Vec<f64>, exposure: Vec<f64>) -> Result<Self, GompertzError> {
        if ages.len() != deaths.len() || ages.len() != exposure.len() {
            return Err(GompertzError::LengthMismatch);
        }
        if ages.len() < 2 {
            return Err(GompertzError::TooFewGroups(ages.len()));
        }
        for ((&age, &d), &e) in ages.iter().zip(&deaths).zip(&exposure) {
            if !(e.is_finite() && e > 0.0) {
                return Err(GompertzError::BadExposure { age, value: e });
            }
            if !(d.is_finite() && d >= 0.0) {
                return Err(GompertzError::BadDeaths { age, value: d });
            }
        }
        if deaths.iter().all(|&d| d == 0.0) {
            return Err(GompertzError::NoDeaths);
        }
        Ok(Self { ages, deaths, exposure })
    }

    /// Closed groups with lower bound at or above `age_floor`, at their
    /// midpoints. The open `100+` group never enters a fit.
    pub fn from_groups(deaths: &[u64; N_GROUPS], exposure: &[f64; N_GROUPS], age_floor: u32) -> Result<Self, GompertzError> {
        let groups: Vec<_> = AgeGrid.at_or_above(age_floor).filter(|g| !g.is_open()).collect();
        Self::new(
            groups.iter().map(|g| g.midpoint()).collect(),
            groups.iter().map(|g| deaths[g.index()] as f64).collect(),
            groups.iter().map(|g| exposure[g.index()]).collect(),
        )
    }

    fn fitted(&self, c: &GompertzCoefficients) -> impl Iterator<Item = f64> + '_ {
        let c = *c;
        self.ages.iter().zip(&self.exposure).map(move |(&x, &e)| e * c.predict_mx(x))
    }

    /// Poisson log-likelihood without the `log(y!)` constant.
    pub fn log_likelihood(&self, c: &GompertzCoefficients) -> f64 {
        self.deaths.iter().zip(self.fitted(c)).map(|(&y, mu)| y * mu.ln() - mu).sum()
    }

    /// Gradient of the log-likelihood in `(alpha, beta)`.
    pub fn score(&self, c: &GompertzCoefficients) -> [f64; 2] {
        let mut g = [0.0; 2];
        for ((&y, mu), &x) in self.deaths.iter().zip(self.fitted(c)).zip(&self.ages) {
            g[0] += y - mu;
            g[1] += x * (y - mu);
        }
        g
    }

    pub fn deviance(&self, c: &GompertzCoefficients) -> f64 {
        2.0 * self
            .deaths
            .iter()
            .zip(self.fitted(c))
            .map(|(&y, mu)| if y > 0.0 { y * (y / mu).ln() - (y - mu) } else { mu })
            .sum::<f64>()
    }

    pub fn total_deaths(&self) -> f64 {
        self.deaths.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GompertzFit {
    pub coefficients: GompertzCoefficients,
    pub deviance: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Euclidean norm of the score at the returned estimate.
    pub gradient_norm: f64,
    pub n_groups: usize,
    pub deviance_trace: Vec<f64>,
}

/// Maximum-likelihood Gompertz fit by IRLS.
///
/// Starts from OLS of `log((d + 0.5) / E)` on age and stops when the
/// deviance changes by less than `1e-10` or the parameter step's max-norm
/// drops below `1e-10`.
pub fn fit_gompertz(data: &GompertzData) -> Result<GompertzFit, GompertzError> {
    let n = data.ages.len() as f64;
    let centre = data.ages.iter().sum::<f64>() / n;
    let xc: Vec<f64> = data.ages.iter().map(|x| x - centre).collect();
    let log_e: Vec<f64> = data.exposure.iter().map(|e| e.ln()).collect();

    // (intercept at centred age, slope)
    let mut theta = {
        let ys: Vec<f64> = data.deaths.iter().zip(&log_e).map(|(d, le)| (d + 0.5).ln() - le).collect();
        let ybar = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xc.iter().map(|x| x * x).sum();
        let sxy: f64 = xc.iter().zip(&ys).map(|(x, y)| x * (y - ybar)).sum();
        [ybar, sxy / sxx]
    };
    let to_coefs = |t: [f64; 2]| GompertzCoefficients { alpha: t[0] - t[1] * centre, beta: t[1] };

    let mut deviance = data.deviance(&to_coefs(theta));
    let mut trace = vec![deviance];
    for iteration in 1..=MAX_ITERATIONS {
        // weighted normal equations on (1, xc) with weights mu
        let (mut s0, mut s1, mut s2, mut r0, mut r1) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for ((&x, &le), &y) in xc.iter().zip(&log_e).zip(&data.deaths) {
            let mu = (le + theta[0] + theta[1] * x).exp();
            s0 += mu;
            s1 += mu * x;
            s2 += mu * x * x;
            r0 += y - mu;
            r1 += x * (y - mu);
        }
        let det = s0 * s2 - s1 * s1;
        let mut step = [(s2 * r0 - s1 * r1) / det, (s0 * r1 - s1 * r0) / det];
        if !(step[0].is_finite() && step[1].is_finite()) {
            break;
        }

        let mut candidate = [theta[0] + step[0], theta[1] + step[1]];
        let mut new_dev = data.deviance(&to_coefs(candidate));
        let mut halvings = 0;
        while !(new_dev.is_finite() && new_dev <= deviance + 1e-12 * deviance.abs()) && halvings < 30 {
            step = [step[0] / 2.0, step[1] / 2.0];
            candidate = [theta[0] + step[0], theta[1] + step[1]];
            new_dev = data.deviance(&to_coefs(candidate));
            halvings += 1;
        }
        theta = candidate;
        let change = (new_dev - deviance).abs();
        deviance = new_dev;
        trace.push(deviance);

        let step_norm = step[0].abs().max(step[1].abs());
        if change < DEVIANCE_TOLERANCE || step_norm < STEP_TOLERANCE {
            let coefficients = to_coefs(theta);
            let g = data.score(&coefficients);
            return Ok(GompertzFit {
                coefficients,
                deviance,
                iterations: iteration,
                converged: true,
                gradient_norm: g[0].hypot(g[1]),
                n_groups: data.ages.len(),
                deviance_trace: trace,
            });
        }
    }
    Err(GompertzError::NotConverged { last: to_coefs(theta), trace })
}

/// A fit tagged with the season and sex it was estimated for.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeasonalFit {
    pub season: Pseudoseason,
    pub sex: Sex,
    pub age_floor: u32,
    pub fit: GompertzFit,
}

/// The age in `to`'s season whose rate equals `from`'s rate at `age`.
pub fn equivalent_age(from: &GompertzCoefficients, to: &GompertzCoefficients, age: f64) -> Result<f64, GompertzError> {
    if to.beta == 0.0 {
        return Err(GompertzError::FlatTarget);
    }
    Ok((from.alpha - to.alpha + from.beta * age) / to.beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalentAge {
    pub input_age: f64,
    pub input_season: SeasonKind,
    pub output_age: f64,
}

impl EquivalentAge {
    /// Winter-equivalent age for a summer age, or summer-equivalent for a winter age.
    pub fn compute(
        summer: &GompertzCoefficients,
        winter: &GompertzCoefficients,
        input_season: SeasonKind,
        input_age: f64,
    ) -> Result<Self, GompertzError> {
        let output_age = match input_season {
            SeasonKind::Summer => equivalent_age(summer, winter, input_age)?,
            SeasonKind::Winter => equivalent_age(winter, summer, input_age)?,
        };
        Ok(Self { input_age, input_season, output_age })
    }
}

/// One row of the equivalent-age table. Rates are per person-year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceRow {
    pub age: f64,
    pub mx_summer: f64,
    /// Winter age with the summer rate at `age`.
    pub winter_equivalent_age: f64,
    pub mx_winter: f64,
    /// Summer age with the winter rate at `age`.
    pub summer_equivalent_age: f64,
}

pub fn equivalence_table(
    summer: &GompertzCoefficients,
    winter: &GompertzCoefficients,
    ages: &[f64],
) -> Result<Vec<EquivalenceRow>, GompertzError> {
    ages.iter()
        .map(|&age| {
            Ok(EquivalenceRow {
                age,
                mx_summer: summer.predict_mx(age),
                winter_equivalent_age: equivalent_age(summer, winter, age)?,
                mx_winter: winter.predict_mx(age),
                summer_equivalent_age: equivalent_age(winter, summer, age)?,
            })
        })
        .collect()
}

/// Rate per 100,000 with one decimal and thousands separators, e.g. `1,021.9`.
pub fn format_rate_per_100k(rate: f64) -> String {
    let text = format!("{:.1}", rate * 1e5);
    let (int, frac) = text.split_once('.').expect("one decimal");
    let (sign, digits) = int.strip_prefix('-').map_or(("", int), |d| ("-", d));
    let mut grouped = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    format!("{sign}{grouped}.{frac}")
}

/// Coefficients in the published display form: `alpha` to two decimals,
/// `beta` to four with no leading zero (`-10.94`, `.0975`).
pub fn format_coefficients(c: &GompertzCoefficients) -> (String, String) {
    let beta = format!("{:.4}", c.beta);
    let beta = match beta.strip_prefix("0.") {
        Some(rest) => format!(".{rest}"),
        None => beta.replacen("-0.", "-.", 1),
    };
    (format!("{:.2}", c.alpha), beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exact_data(alpha: f64, beta: f64, ages: &[f64], exposure: f64) -> GompertzData {
        let c = GompertzCoefficients::new(alpha, beta);
        GompertzData::new(
            ages.to_vec(),
            ages.iter().map(|&x| exposure * c.predict_mx(x)).collect(),
            vec![exposure; ages.len()],
        )
        .unwrap()
    }

    fn fitting_ages() -> Vec<f64> {
        (0..11).map(|k| 47.5 + 5.0 * k as f64).collect()
    }

    #[test]
    fn recovers_exact_model() {
        let fit = fit_gompertz(&exact_data(-10.0, 0.09, &fitting_ages(), 1e7)).unwrap();
        assert!(fit.converged);
        assert!((fit.coefficients.alpha + 10.0).abs() < 1e-8, "{:?}", fit.coefficients);
        assert!((fit.coefficients.beta - 0.09).abs() < 1e-8);
        assert!(fit.iterations < 20);
        assert!(fit.deviance.abs() < 1e-6);
    }

    #[test]
    fn saturated_two_group_fit() {
        let data = GompertzData::new(vec![50.0, 60.0], vec![120.0, 300.0], vec![1e5, 8e4]).unwrap();
        let fit = fit_gompertz(&data).unwrap();
        assert!(fit.deviance.abs() < 1e-9, "{}", fit.deviance);
        let c = fit.coefficients;
        assert!((c.predict_mx(50.0) - 120.0 / 1e5).abs() < 1e-12);
        assert!((c.predict_mx(60.0) - 300.0 / 8e4).abs() < 1e-12);
    }

    #[test]
    fn zero_cells_are_allowed_but_not_all_zero() {
        let data = GompertzData::new(vec![50.0, 60.0, 70.0], vec![0.0, 3.0, 9.0], vec![1e3; 3]).unwrap();
        assert!(fit_gompertz(&data).unwrap().converged);
        assert_eq!(
            GompertzData::new(vec![50.0, 60.0], vec![0.0, 0.0], vec![1.0, 1.0]),
            Err(GompertzError::NoDeaths)
        );
        assert!(matches!(
            GompertzData::new(vec![50.0, 60.0], vec![1.0, 1.0], vec![1.0, 0.0]),
            Err(GompertzError::BadExposure { .. })
        ));
        assert_eq!(GompertzData::new(vec![50.0], vec![1.0], vec![1.0]), Err(GompertzError::TooFewGroups(1)));
    }

    #[test]
    fn group_selection_excludes_open_interval() {
        let deaths = [10; N_GROUPS];
        let exposure = [1e4; N_GROUPS];
        let d = GompertzData::from_groups(&deaths, &exposure, 45).unwrap();
        assert_eq!(d.ages, fitting_ages());
        let d = GompertzData::from_groups(&deaths, &exposure, 65).unwrap();
        assert_eq!(d.ages.first(), Some(&67.5));
        assert_eq!(d.ages.len(), 7);
    }

    #[test]
    fn score_equations_hold_at_the_optimum() {
        let data = GompertzData::new(
            fitting_ages(),
            vec![31.0, 52.0, 70.0, 118.0, 190.0, 301.0, 480.0, 770.0, 1200.0, 1900.0, 2950.0],
            vec![1e5, 1e5, 9e4, 9e4, 8e4, 8e4, 7e4, 6e4, 5e4, 4e4, 3e4],
        )
        .unwrap();
        let fit = fit_gompertz(&data).unwrap();
        let g = data.score(&fit.coefficients);
        let total = data.total_deaths();
        assert!(g[0].abs() < 1e-6 * total && g[1].abs() < 1e-6 * total, "{g:?}");
        assert!(fit.gradient_norm < 1e-6 * total);
    }

    #[test]
    fn score_matches_finite_differences() {
        let data = exact_data(-9.5, 0.085, &fitting_ages(), 2e5);
        for c in [GompertzCoefficients::new(-9.4, 0.084), GompertzCoefficients::new(-9.7, 0.088)] {
            let g = data.score(&c);
            let h = [1e-6, 1e-8];
            let fd_a = (data.log_likelihood(&GompertzCoefficients::new(c.alpha + h[0], c.beta))
                - data.log_likelihood(&GompertzCoefficients::new(c.alpha - h[0], c.beta)))
                / (2.0 * h[0]);
            let fd_b = (data.log_likelihood(&GompertzCoefficients::new(c.alpha, c.beta + h[1]))
                - data.log_likelihood(&GompertzCoefficients::new(c.alpha, c.beta - h[1])))
                / (2.0 * h[1]);
            assert!(((fd_a - g[0]) / g[0]).abs() < 1e-5, "{fd_a} vs {}", g[0]);
            assert!(((fd_b - g[1]) / g[1]).abs() < 1e-5, "{fd_b} vs {}", g[1]);
        }
    }

    #[test]
    fn exposure_scale_shifts_alpha_only() {
        let base = exact_data(-10.0, 0.09, &fitting_ages(), 1e6);
        let mut scaled = base.clone();
        let c = 7.5;
        scaled.exposure.iter_mut().for_each(|e| *e *= c);
        let a = fit_gompertz(&base).unwrap().coefficients;
        let b = fit_gompertz(&scaled).unwrap().coefficients;
        assert!((b.alpha - (a.alpha - c.ln())).abs() < 1e-9);
        assert!((b.beta - a.beta).abs() < 1e-10);
    }

    #[test]
    fn prediction() {
        let flat = GompertzCoefficients::new(-5.0, 0.0);
        assert_eq!(flat.predict_mx(30.0), flat.predict_mx(90.0));
        assert_eq!(flat.predict_mx(30.0), (-5.0f64).exp());
        let women_summer = GompertzCoefficients::new(-10.94, 0.0975);
        let per_100k = predict_mx(&women_summer, 50.0) * 1e5;
        assert!((per_100k - 232.2758).abs() < 1e-4, "{per_100k}");
        assert!((per_100k / 231.1 - 1.0).abs() < 0.015);
        let men_winter = GompertzCoefficients::new(-9.85, 0.0888);
        let per_100k = men_winter.predict_mx(90.0) * 1e5;
        assert!((per_100k / 15_563.1 - 1.0).abs() < 0.015, "{per_100k}");
    }

    #[test]
    fn women_2010_equivalent_ages() {
        let summer = GompertzCoefficients::new(-10.94, 0.0975);
        let winter = GompertzCoefficients::new(-10.95, 0.0989);
        let wea = equivalent_age(&summer, &winter, 80.0).unwrap();
        assert!((wea - 78.97).abs() < 0.005, "{wea}");
        let sea = equivalent_age(&winter, &summer, 80.0).unwrap();
        assert!((sea - 81.05).abs() < 0.005, "{sea}");
        let e = EquivalentAge::compute(&summer, &winter, SeasonKind::Winter, 80.0).unwrap();
        assert_eq!(e.output_age, sea);
    }

    #[test]
    fn identical_coefficients_give_identity() {
        let c = GompertzCoefficients::new(-9.0, 0.08);
        assert_eq!(equivalent_age(&c, &c, 73.25).unwrap(), 73.25);
        let flat = GompertzCoefficients::new(-9.0, 0.0);
        assert_eq!(equivalent_age(&c, &flat, 50.0), Err(GompertzError::FlatTarget));
    }

    #[test]
    fn divergence_grows_with_age() {
        let summer = GompertzCoefficients::new(-9.80, 0.0869);
        let winter = GompertzCoefficients::new(-9.85, 0.0888);
        let gaps: Vec<f64> = (40..=100)
            .map(|x| {
                let x = x as f64;
                (x - equivalent_age(&summer, &winter, x).unwrap()).abs()
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn display_formats() {
        assert_eq!(format_rate_per_100k(0.010219), "1,021.9");
        assert_eq!(format_rate_per_100k(0.002311), "231.1");
        assert_eq!(format_rate_per_100k(0.1234567), "12,345.7");
        assert_eq!(format_rate_per_100k(12.345678), "1,234,567.8");
        let (a, b) = format_coefficients(&GompertzCoefficients::new(-10.9412, 0.09752));
        assert_eq!((a.as_str(), b.as_str()), ("-10.94", ".0975"));
        let (a, _) = format_coefficients(&GompertzCoefficients::new(-9.8, 0.0869));
        assert_eq!(a, "-9.80");
    }

    #[test]
    fn non_convergence_carries_trace() {
        let err = GompertzError::NotConverged { last: GompertzCoefficients::new(-1.0, 0.5), trace: vec![3.0, 2.0] };
        let msg = err.to_string();
        assert!(msg.contains("3.000000e0, 2.000000e0"), "{msg}");
    }

    proptest! {
        #[test]
        fn equivalent_age_defining_identity(
            a_s in -12.0f64..-8.0, b_s in 0.05f64..0.12,
            a_w in -12.0f64..-8.0, b_w in 0.05f64..0.12,
            x in 30.0f64..100.0,
        ) {
            let s = GompertzCoefficients::new(a_s, b_s);
            let w = GompertzCoefficients::new(a_w, b_w);
            let wea = equivalent_age(&s, &w, x).unwrap();
            prop_assert!((w.predict_mx(wea) / s.predict_mx(x) - 1.0).abs() < 1e-9);
            let back = equivalent_age(&w, &s, wea).unwrap();
            prop_assert!((back - x).abs() <= 1e-9 * x);
        }
    }
}
