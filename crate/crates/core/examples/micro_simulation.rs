// Individual-level simulation against the expected seasonal rate.
//
//     cargo run --release --example micro_simulation

use pseudoseason::age::AgeGroup;
use pseudoseason::synth::{micro_sim_rate_oracle, Scenario};
use pseudoseason::{Pseudoseason, Sex};

fn main() {
    let scenario = Scenario { winter_multiplier: 1.2, ..Scenario::default() };
    for age in [60, 75, 90] {
        let group = AgeGroup::of_age(age);
        for season in [Pseudoseason::summer(2010), Pseudoseason::winter(2010)] {
            let sim = micro_sim_rate_oracle(&scenario, season, Sex::Male, group, 50_000).unwrap();
            let expected = scenario.expected_rate(Sex::Male, group, season.kind);
            let se = (sim.deaths as f64).sqrt() / sim.person_years;
            println!(
                "{} {season}: simulated {:.5} +/- {:.5}, expected {:.5}",
                group.label(),
                sim.rate(),
                se,
                expected
            );
        }
    }
}
