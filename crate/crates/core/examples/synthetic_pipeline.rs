// Full pipeline on generated data: files on disk, surface, life tables,
// proportional hazards and Gompertz fits.
//
//     cargo run --release --example synthetic_pipeline

use pseudoseason::gompertz::{equivalence_table, fit_gompertz, GompertzData, DEFAULT_FIT_FLOOR};
use pseudoseason::graduate::assemble_surface;
use pseudoseason::hazard::{estimate_ph_pooled, Pairing, DEFAULT_AGE_FLOOR};
use pseudoseason::ingest::{parse_deaths, parse_exposures};
use pseudoseason::lifetable::{e0_series, seasonal_gap, AxConvention};
use pseudoseason::synth::{generate, Scenario, DEATHS_FILE, EXPOSURES_FILE};
use pseudoseason::{Pseudoseason, Sex};

fn main() {
    let scenario = Scenario { seed: 7, first_year: 2006, last_year: 2012, ..Scenario::default() };
    let dir = std::env::temp_dir().join(format!("pseudoseason-example-{}", std::process::id()));
    generate(&scenario).unwrap().write_to(&dir).unwrap();

    let deaths = parse_deaths(dir.join(DEATHS_FILE)).unwrap();
    let exposures = parse_exposures(dir.join(EXPOSURES_FILE)).unwrap();
    let build = assemble_surface(&deaths, &exposures);
    let surface = &build.surface;
    let dropped: Vec<String> = build.discarded_partial.iter().map(|s| s.to_string()).collect();
    println!("{} deaths rows, {} season slices, partial seasons dropped: {}", deaths.len(), surface.len(), dropped.join(", "));

    let series = e0_series(surface, AxConvention::CoaleDemeny).unwrap();
    for s in seasonal_gap(&series).summaries {
        println!("{}: mean summer-winter e0 gap {:.3} years (sd {:.3}, n {})", s.sex, s.mean, s.sd, s.n);
    }

    for sex in Sex::ALL {
        let ph = estimate_ph_pooled(surface, sex, DEFAULT_AGE_FLOOR, Pairing::PrevSummer).unwrap();
        println!("{sex}: pooled P {:.4} (true {}), R2 {:.4}", ph.p, scenario.winter_multiplier, ph.r2);
    }

    let fit = |season: Pseudoseason| {
        let slice = surface.get(season, Sex::Female).unwrap();
        let data = GompertzData::from_groups(&slice.deaths, &slice.exposure, DEFAULT_FIT_FLOOR).unwrap();
        fit_gompertz(&data).unwrap().coefficients
    };
    let summer = fit(Pseudoseason::summer(2010));
    let winter = fit(Pseudoseason::winter(2010));
    println!("F summer-2010: alpha {:.3} beta {:.4}; winter-2010: alpha {:.3} beta {:.4}", summer.alpha, summer.beta, winter.alpha, winter.beta);
    for r in equivalence_table(&summer, &winter, &[60.0, 80.0]).unwrap() {
        println!("  age {}: winter-equivalent {:.2}, summer-equivalent {:.2}", r.age, r.winter_equivalent_age, r.summer_equivalent_age);
    }

    std::fs::remove_dir_all(&dir).ok();
}
