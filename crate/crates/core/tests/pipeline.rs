// End-to-end checks on generated data against independent oracles.

mod common;

use pseudoseason::age::{AgeGrid, AgeGroup, N_GROUPS};
use pseudoseason::graduate::assemble_surface;
use pseudoseason::hazard::{estimate_ph_by_year, estimate_ph_pooled, season_pairs, Pairing};
use pseudoseason::lifetable::{death_rates, e0_series, seasonal_gap, AxConvention};
use pseudoseason::synth::{generate, simulate_season, micro_sim_rate_oracle, Scenario};
use pseudoseason::{MortalitySurface, Pseudoseason, SeasonKind, Sex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn surface(scenario: &Scenario) -> MortalitySurface {
    let data = generate(scenario).unwrap();
    // through the text formats, as the CLI would read them
    let deaths = pseudoseason::ingest::parse_deaths_str(&data.deaths_csv()).unwrap();
    let exposures = pseudoseason::ingest::parse_exposures_str(&data.exposures_text()).unwrap();
    let build = assemble_surface(&deaths, &exposures);
    assert!(build.skipped.is_empty());
    build.surface
}

fn adult_counts(surface: &MortalitySurface, sex: Sex, floor: u32) -> Vec<(u64, u64)> {
    let mut counts = Vec::new();
    for pair in season_pairs(surface, sex, Pairing::PrevSummer) {
        let w = surface.get(pair.winter, sex).unwrap();
        let s = surface.get(pair.summer, sex).unwrap();
        for g in AgeGrid.at_or_above(floor) {
            counts.push((w.deaths[g.index()], s.deaths[g.index()]));
        }
    }
    counts
}

#[test]
fn half_year_exposure_deducts_decedent_time() {
    // 100,000 persons, hazard 0.005 for six months: about 250 deaths and
    // 50,000 - 250 * 0.25 person-years
    let ages = vec![60u32; 100_000];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let r = simulate_season(&ages, Pseudoseason::summer(2011), |_, _| 0.005, &mut rng);
    let days = 184.0 / 365.0;
    let expected_deaths = 100_000.0 * (1.0 - f64::exp(-0.005 * days));
    assert!((r.deaths as f64 - expected_deaths).abs() < 4.0 * expected_deaths.sqrt(), "{}", r.deaths);
    let expected_py = 100_000.0 * days - r.deaths as f64 * days / 2.0;
    assert!((r.person_years - expected_py).abs() < 2.0, "{} vs {}", r.person_years, expected_py);
    let rate_sd = 0.005 / expected_deaths.sqrt();
    assert!((r.rate() - 0.005).abs() < 4.0 * rate_sd);
}

#[test]
fn pipeline_rates_agree_with_micro_simulation() {
    let scenario = Scenario { seed: 21, first_year: 2009, last_year: 2011, ..Scenario::default() };
    let surface = surface(&scenario);
    for (season, sex, age) in [
        (Pseudoseason::summer(2010), Sex::Male, 72),
        (Pseudoseason::winter(2010), Sex::Male, 72),
        (Pseudoseason::winter(2009), Sex::Female, 88),
    ] {
        let group = AgeGroup::of_age(age);
        let slice = surface.get(season, sex).unwrap();
        let mx = death_rates(&surface, season, sex).unwrap()[group.index()];
        let pipeline_sd = mx / (slice.deaths[group.index()] as f64).sqrt();
        let sim = micro_sim_rate_oracle(&scenario, season, sex, group, 100_000).unwrap();
        let sim_sd = sim.rate() / (sim.deaths as f64).sqrt();
        let bound = 4.0 * (pipeline_sd.powi(2) + sim_sd.powi(2)).sqrt();
        assert!((mx - sim.rate()).abs() < bound, "{season} {sex} {}: {mx} vs {}", group.label(), sim.rate());
    }
}

#[test]
fn null_scenario_gives_ratio_near_one() {
    let scenario = Scenario { seed: 5, first_year: 2001, last_year: 2010, winter_multiplier: 1.0, ..Scenario::default() };
    let surface = surface(&scenario);
    for sex in Sex::ALL {
        let pooled = estimate_ph_pooled(&surface, sex, 45, Pairing::PrevSummer).unwrap();
        let sd = common::pooled_p_sd(pooled.p, &adult_counts(&surface, sex, 45));
        assert!((pooled.p - 1.0).abs() < 4.0 * sd, "{sex}: {} (sd {sd})", pooled.p);
        for y in estimate_ph_by_year(&surface, sex, 45, Pairing::PrevSummer).unwrap() {
            let w = surface.get(y.pair.winter, sex).unwrap();
            let s = surface.get(y.pair.summer, sex).unwrap();
            let counts: Vec<(u64, u64)> =
                AgeGrid.at_or_above(45).map(|g| (w.deaths[g.index()], s.deaths[g.index()])).collect();
            let sd = common::pooled_p_sd(y.estimate.p, &counts);
            assert!((y.estimate.p - 1.0).abs() < 4.5 * sd, "{sex} {}: {}", y.pair.winter, y.estimate.p);
        }
    }
}

#[test]
fn gap_matches_oracle_life_table_chain() {
    let scenario = Scenario {
        seed: 13,
        first_year: 2003,
        last_year: 2012,
        winter_multiplier: 1.12,
        youth_summer_multiplier: 1.3,
        ..Scenario::default()
    };
    let surface = surface(&scenario);
    let gaps = seasonal_gap(&e0_series(&surface, AxConvention::CoaleDemeny).unwrap());
    for sex in Sex::ALL {
        let expected = |kind: SeasonKind| -> [f64; N_GROUPS] {
            std::array::from_fn(|i| scenario.expected_rate(sex, AgeGroup::new(i).unwrap(), kind))
        };
        let oracle_gap = common::oracle_e0(&expected(SeasonKind::Summer), true) - common::oracle_e0(&expected(SeasonKind::Winter), true);
        assert!(oracle_gap > 0.0);
        let summary = gaps.summaries.iter().find(|s| s.sex == sex).unwrap();
        assert_eq!(summary.n, 9);
        assert!(gaps.points.iter().filter(|p| p.sex == sex).all(|p| p.gap > 0.0));
        // the sample mean of 9 noisy gaps sits within 4 standard errors of the oracle
        let se = summary.sd / (summary.n as f64).sqrt();
        assert!((summary.mean - oracle_gap).abs() < 4.0 * se.max(0.01), "{sex}: {} vs {oracle_gap}", summary.mean);
    }
}
