// Winter:summer proportional hazard from two rate schedules.
//
//     cargo run --example proportional_hazard

use pseudoseason::age::{AgeGrid, N_GROUPS};
use pseudoseason::hazard::{estimate_ph_year, DEFAULT_AGE_FLOOR};

fn main() {
    let mut summer = [0.0; N_GROUPS];
    for g in AgeGrid.groups() {
        summer[g.index()] = (-10.9f64 + 0.097 * g.midpoint()).exp();
    }

    let exact = summer.map(|s| 1.12 * s);
    let ph = estimate_ph_year(&exact, &summer, DEFAULT_AGE_FLOOR).unwrap();
    println!("winter = 1.12 x summer: P = {:.12}, R2 = {}", ph.p, ph.r2);

    // excess that grows with age: P is the geometric mean of the ratios
    let mut tilted = summer;
    for (i, g) in AgeGrid.groups().enumerate() {
        tilted[i] *= 1.0 + 0.002 * g.lower() as f64;
    }
    for floor in [45, 65, 85] {
        let ph = estimate_ph_year(&tilted, &summer, floor).unwrap();
        println!("age-tilted excess, floor {floor}: P = {:.4}, R2 = {:.6}, {} ages", ph.p, ph.r2, ph.n_ages);
    }
}
