#![allow(dead_code)]

use std::f64::consts::PI;

use corremit_core::noise::{circular, oersted_coupling};
use corremit_core::units::HBAR;
use corremit_core::PhysicalParams;

/// Gaussian-broadened k-grid sum of `weight(κ)·n(κ)(1 − n(κ+Q))·δ(w − 2Qκ∥ − Q²)` over κ = k/k_F,
/// with κ∥ along q̂. The δ is a Gaussian of width `sigma` in κ∥.
pub fn broadened_k_sum(q_over_kf: f64, w: f64, sigma: f64, weight: impl Fn(f64, f64) -> f64) -> f64 {
    let kappa0 = (w - q_over_kf * q_over_kf) / (2.0 * q_over_kf);
    let (n_par, n_perp) = (240usize, 8000usize);
    let (lo, hi) = (kappa0 - 6.0 * sigma, kappa0 + 6.0 * sigma);
    let (h_par, h_perp) = ((hi - lo) / n_par as f64, 2.0 / n_perp as f64);
    let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
    let mut total = 0.0;
    for i in 0..n_par {
        let kp = lo + (i as f64 + 0.5) * h_par;
        let g = norm * (-0.5 * ((kp - kappa0) / sigma).powi(2)).exp();
        let mut row = 0.0;
        for j in 0..n_perp {
            let kt = -1.0 + (j as f64 + 0.5) * h_perp;
            let inside = kp * kp + kt * kt < 1.0;
            let blocked = (kp + q_over_kf).powi(2) + kt * kt < 1.0;
            if inside && !blocked {
                row += weight(kp, kt);
            }
        }
        total += g * row * h_perp;
    }
    // δ(w − 2Qκ∥ − Q²) = δ(κ∥ − κ0)/(2Q)
    total * h_par / (2.0 * q_over_kf)
}

/// σ → 0 by Richardson extrapolation (leading error ∝ σ²).
pub fn extrapolated(q_over_kf: f64, w: f64, weight: impl Fn(f64, f64) -> f64 + Copy) -> f64 {
    let s = 4e-3;
    let coarse = broadened_k_sum(q_over_kf, w, s, weight);
    let fine = broadened_k_sum(q_over_kf, w, s / 2.0, weight);
    (4.0 * fine - coarse) / 3.0
}

/// C^{−+}(ω,q) = 2πħ · 2 · ∫d²k/(2π)² |V⁻_{k,k+q}|² n_k(1 − n_{k+q}) δ(ħω − ε_{k+q} + ε_k),
/// with the matrix element from the Oersted coupling.
pub fn brute_force_oersted(p: &PhysicalParams, omega: f64, q: f64) -> f64 {
    let (k_f, e_f) = (p.k_f(), p.e_f());
    let (qq, w) = (q / k_f, HBAR * omega / e_f);
    let pp = *p;
    let sum = extrapolated(qq, w, move |kp, kt| {
        let v = oersted_coupling(&pp, [kp * k_f, kt * k_f], [q, 0.0]).unwrap();
        circular(v).1.norm_sqr()
    });
    2.0 * PI * HBAR * 2.0 * k_f * k_f / (4.0 * PI * PI) * sum / e_f
}
