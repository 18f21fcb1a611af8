//! Bessel functions of the first kind, orders 0, 1, 2.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const SERIES_MAX: f64 = 12.0;
const ASYMPTOTIC_MIN: f64 = 25.0;

/// J_n(x) for n ∈ {0, 1, 2} and x ≥ 0.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    if n > 2 {
        return Err(Error::Domain(format!("Bessel order {n} not supported (0, 1, 2 only)")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be finite and >= 0, got {x}")));
    }
    Ok(j012(x)[n as usize])
}

/// (J0(x), J1(x), J2(x)) for x ≥ 0, without validation.
pub fn j012(x: f64) -> [f64; 3] {
    if x < SERIES_MAX {
        [series(0, x), series(1, x), series(2, x)]
    } else if x < ASYMPTOTIC_MIN {
        miller(x)
    } else {
        let j0 = hankel_asymptotic(0, x);
        let j1 = hankel_asymptotic(1, x);
        [j0, j1, 2.0 * j1 / x - j0]
    }
}

fn series(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let h2 = h * h;
    let mut term = match n {
        0 => 1.0,
        1 => h,
        _ => 0.5 * h2,
    };
    let mut sum = term;
    let nf = n as f64;
    let mut k = 1.0;
    loop {
        term *= -h2 / (k * (k + nf));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) || k > 80.0 {
            break;
        }
        k += 1.0;
    }
    sum
}

/// Backward recurrence normalised by J0 + 2ΣJ_2k = 1.
fn miller(x: f64) -> [f64; 3] {
    let start = 2 * (((x + 36.0) / 2.0) as usize + 1);
    let (mut jp1, mut j) = (0.0f64, 1e-30f64);
    let mut norm = 0.0;
    let mut out = [0.0; 3];
    for k in (1..=start).rev() {
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        let order = k - 1;
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * j;
        }
        if order <= 2 {
            out[order] = j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            out.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    norm += out[0];
    out.map(|v| v / norm)
}

fn hankel_asymptotic(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let inv8x = 1.0 / (8.0 * x);
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) * inv8x / k as f64;
        let mag = term.abs();
        if mag > prev {
            break;
        }
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if mag < 1e-17 {
            break;
        }
        prev = mag;
    }
    let chi = x - (n as f64 * 0.5 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Derivative J_n'(x).
fn bessel_deriv(n: usize, x: f64) -> (f64, f64) {
    let j = j012(x);
    let d = match n {
        0 => -j[1],
        1 => j[0] - j[1] / x,
        _ => j[1] - 2.0 * j[2] / x,
    };
    (j[n], d)
}

/// k-th positive zero (k ≥ 1) of J_n, n ∈ {0, 1, 2}.
pub fn bessel_zero(n: u32, k: usize) -> f64 {
    assert!(n <= 2 && k >= 1);
    let mu = 4.0 * (n * n) as f64;
    let beta = (k as f64 + 0.5 * n as f64 - 0.25) * PI;
    let b8 = 8.0 * beta;
    let mut x = beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3));
    for _ in 0..8 {
        let (j, dj) = bessel_deriv(n as usize, x);
        let step = j / dj;
        x -= step;
        if step.abs() <= 1e-15 * x {
            break;
        }
    }
    x
}

/// All zeros of J_n(q r) with q in (0, q_max), in ascending order.
pub fn zeros_below(n: u32, r: f64, q_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if r <= 0.0 {
        return out;
    }
    let mut k = 1;
    loop {
        let z = bessel_zero(n, k) / r;
        if z >= q_max {
            break;
        }
        out.push(z);
        k += 1;
    }
    out
}
