// Equivalent ages from published-style Gompertz coefficients.
//
//     cargo run --example equivalent_ages

use pseudoseason::gompertz::{equivalence_table, format_coefficients, format_rate_per_100k, GompertzCoefficients};

fn main() {
    let sets = [
        ("women", GompertzCoefficients::new(-10.94, 0.0975), GompertzCoefficients::new(-10.95, 0.0989)),
        ("men", GompertzCoefficients::new(-9.80, 0.0869), GompertzCoefficients::new(-9.85, 0.0888)),
    ];
    let ages = [50.0, 60.0, 70.0, 80.0, 90.0];
    for (label, summer, winter) in sets {
        let (sa, sb) = format_coefficients(&summer);
        let (wa, wb) = format_coefficients(&winter);
        println!("{label}: summer {sa} {sb}, winter {wa} {wb}");
        println!("{:>4} {:>10} {:>7} {:>10} {:>7}", "age", "Mx summer", "w.e.a.", "Mx winter", "s.e.a.");
        for r in equivalence_table(&summer, &winter, &ages).expect("non-flat coefficients") {
            println!(
                "{:>4} {:>10} {:>7.2} {:>10} {:>7.2}",
                r.age,
                format_rate_per_100k(r.mx_summer),
                r.winter_equivalent_age,
                format_rate_per_100k(r.mx_winter),
                r.summer_equivalent_age,
            );
        }
        println!();
    }
}
