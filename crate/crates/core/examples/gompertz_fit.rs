// Poisson maximum-likelihood Gompertz fit on grouped counts.
//
//     cargo run --example gompertz_fit

use pseudoseason::gompertz::{fit_gompertz, GompertzCoefficients, GompertzData};

fn main() {
    let truth = GompertzCoefficients::new(-10.2, 0.094);
    let ages: Vec<f64> = (0..11).map(|i| 47.5 + 5.0 * i as f64).collect();
    let exposure: Vec<f64> = ages.iter().map(|&x| 2.0e6 * (-0.03 * (x - 47.5)).exp()).collect();
    // expected counts: the fit recovers the generating coefficients exactly
    let deaths: Vec<f64> = ages.iter().zip(&exposure).map(|(&x, &e)| e * truth.predict_mx(x)).collect();

    let data = GompertzData::new(ages, deaths, exposure).expect("valid data");
    let fit = fit_gompertz(&data).expect("converges");
    println!("truth     alpha {:.6}  beta {:.6}", truth.alpha, truth.beta);
    println!("estimate  alpha {:.6}  beta {:.6}", fit.coefficients.alpha, fit.coefficients.beta);
    println!("iterations {}, deviance {:.3e}, |score| {:.3e}", fit.iterations, fit.deviance, fit.gradient_norm);
    for (i, d) in fit.deviance_trace.iter().enumerate() {
        println!("  step {i}: deviance {d:.6e}");
    }
}
