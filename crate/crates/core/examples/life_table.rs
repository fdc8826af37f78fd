// Abridged period life table from a rate schedule.
//
//     cargo run --example life_table

use pseudoseason::age::{AgeGrid, N_GROUPS};
use pseudoseason::lifetable::{build_life_table, AxConvention};

fn main() {
    // infant and child rates by hand, Gompertz above
    let mut mx = [0.0; N_GROUPS];
    for g in AgeGrid.groups() {
        mx[g.index()] = match g.lower() {
            0 => 0.004,
            1 => 0.0002,
            _ => 0.0001 + (-10.9f64 + 0.097 * g.midpoint()).exp(),
        };
    }
    for convention in [AxConvention::CoaleDemeny, AxConvention::Midpoint] {
        let t = build_life_table(&mx, convention).expect("valid rates");
        println!("ax convention {}: e0 = {:.3}", convention.name(), t.e0());
    }

    let t = build_life_table(&mx, AxConvention::CoaleDemeny).unwrap();
    println!("{:>7} {:>10} {:>6} {:>8} {:>10} {:>10} {:>7}", "age", "mx", "ax", "qx", "lx", "dx", "ex");
    for r in &t.rows {
        println!(
            "{:>7} {:>10.6} {:>6.3} {:>8.5} {:>10.1} {:>10.1} {:>7.2}",
            r.group.label(),
            r.mx,
            r.ax,
            r.qx,
            r.lx,
            r.dx,
            r.ex
        );
    }

    let flat = build_life_table(&[0.02; N_GROUPS], AxConvention::Midpoint).unwrap();
    println!("constant rate 0.02: e0 = {:.6} (1/M = 50)", flat.e0());
}
