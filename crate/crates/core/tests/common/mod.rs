// Independent oracles shared by the integration tests.
#![allow(dead_code)]

/// Widths of the 22 groups; `None` is the open 100+ group.
pub fn widths() -> Vec<Option<f64>> {
    let mut w = vec![Some(1.0), Some(4.0)];
    w.extend(std::iter::repeat_n(Some(5.0), 19));
    w.push(None);
    w
}

/// Straight-line life table returning e(0), written column by column the
/// way a spreadsheet would. `infant_cd` selects a0 = 0.07 + 1.7 M0 and
/// a(1-4) = 1.5; otherwise every closed ax is n/2.
pub fn oracle_e0(mx: &[f64], infant_cd: bool) -> f64 {
    let w = widths();
    let k = mx.len();
    let mut a = vec![0.0; k];
    let mut q = vec![0.0; k];
    let mut l = vec![0.0; k + 1];
    let mut big_l = vec![0.0; k];
    for i in 0..k {
        a[i] = match w[i] {
            Some(n) if infant_cd && i == 0 => f64::min(0.07 + 1.7 * mx[0], n),
            Some(_) if infant_cd && i == 1 => 1.5,
            Some(n) => n / 2.0,
            None => 0.0,
        };
    }
    for i in 0..k {
        q[i] = match w[i] {
            Some(n) => f64::min(1.0, n * mx[i] / (1.0 + (n - a[i]) * mx[i])),
            None => 1.0,
        };
    }
    l[0] = 100_000.0;
    for i in 0..k {
        l[i + 1] = l[i] * (1.0 - q[i]);
    }
    for i in 0..k {
        big_l[i] = match w[i] {
            Some(n) => n * l[i + 1] + a[i] * (l[i] - l[i + 1]),
            None => l[i] / mx[i],
        };
    }
    big_l.iter().sum::<f64>() / l[0]
}

/// Delta-method standard deviation of a pooled geometric-mean ratio built
/// from Poisson counts: Var(log P) = sum(1/dW + 1/dS) / K^2.
pub fn pooled_p_sd(p: f64, counts: &[(u64, u64)]) -> f64 {
    let k = counts.len() as f64;
    let var: f64 = counts.iter().map(|&(w, s)| 1.0 / w as f64 + 1.0 / s as f64).sum::<f64>() / (k * k);
    p * var.sqrt()
}
