// Annual exposures split into months and binned into pseudoseasons.
//
//     cargo run --example graduation

use pseudoseason::age::N_GROUPS;
use pseudoseason::graduate::{bin_exposure, graduate_to_months};
use pseudoseason::ingest::GroupedExposure;
use pseudoseason::{complete_span, Pseudoseason, Sex, YearMonth};

fn main() {
    let annual = GroupedExposure::from([
        ((2011, Sex::Female), [365_000.0; N_GROUPS]),
        ((2012, Sex::Female), [366_000.0; N_GROUPS]),
    ]);
    let monthly = graduate_to_months(&annual).unwrap();
    for m in [1u8, 2, 7] {
        for y in [2011, 2012] {
            let ym = YearMonth::new(y, m).unwrap();
            println!("{ym}: {:.1}", monthly[&(ym, Sex::Female)][0]);
        }
    }

    let span = complete_span(YearMonth::new(2011, 1).unwrap(), YearMonth::new(2012, 12).unwrap());
    let seasons: Vec<String> = span.complete.iter().map(|s| s.to_string()).collect();
    let partial: Vec<String> = span.partial.iter().map(|s| s.to_string()).collect();
    println!("complete: {}", seasons.join(", "));
    println!("partial:  {}", partial.join(", "));

    let binned = bin_exposure(&monthly, &span.complete).unwrap();
    for s in [Pseudoseason::summer(2011), Pseudoseason::winter(2011), Pseudoseason::summer(2012)] {
        println!("{s}: {:.1} person-years per group", binned[&(s, Sex::Female)][0]);
    }
}
