//! Regularized incomplete gamma ratios for integer order, in log space.

/// `ln(k!)` by direct summation; exact enough for the orders used here.
pub fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Q(n, x)` with `Q(n, x) = Gamma(n, x) / (n-1)!`, accumulated by
/// `Q(k+1, x) = Q(k, x) + x^k e^{-x} / k!`.
pub fn ln_upper_ratio(n: u64, x: f64) -> f64 {
    assert!(n >= 1 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    let lx = x.ln();
    let mut term = -x;
    let mut acc = term;
    for k in 1..n {
        term += lx - (k as f64).ln();
        acc = log_sum_exp(acc, term);
    }
    acc
}

/// `ln P(n, x)`, `P = 1 - Q`, by the power series `x^n e^{-x}/n! sum_k x^k / ((n+1)...(n+k))`.
pub fn ln_lower_ratio(n: u64, x: f64) -> f64 {
    assert!(n >= 1 && x >= 0.0);
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    if x > n as f64 + 1.0 {
        let q = ln_upper_ratio(n, x).exp();
        return (-q).ln_1p();
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut k = 1u64;
    while term > sum * 1e-17 {
        term *= x / (n + k) as f64;
        sum += term;
        k += 1;
    }
    n as f64 * x.ln() - x - ln_factorial(n) + sum.ln()
}

pub fn upper_ratio(n: u64, x: f64) -> f64 {
    if x < n as f64 + 1.0 {
        -ln_lower_ratio(n, x).exp_m1()
    } else {
        ln_upper_ratio(n, x).exp()
    }
}

pub fn lower_ratio(n: u64, x: f64) -> f64 {
    ln_lower_ratio(n, x).exp()
}
