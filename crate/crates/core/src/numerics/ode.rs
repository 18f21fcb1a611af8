//! Dormand–Prince 5(4) adaptive integrator for small autonomous systems.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates y' = f(t, y) from `t0` and returns the state at every time in `t_out`
/// (ascending, ≥ t0). Steps land exactly on each output time.
pub fn dopri5<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_out: &[f64],
    rtol: f64,
    atol: f64,
) -> Result<Vec<[f64; N]>> {
    if t_out.windows(2).any(|w| w[1] < w[0]) || t_out.first().is_some_and(|&t| t < t0) {
        return Err(Error::Integration("output times must be ascending and not before t0".into()));
    }
    let mut out = Vec::with_capacity(t_out.len());
    let (mut t, mut y) = (t0, y0);
    let span = t_out.last().map_or(0.0, |&e| e - t0);
    let mut h = if span > 0.0 { span * 1e-4 } else { 1.0 };
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);
    for &target in t_out {
        while t < target {
            let last = h >= target - t;
            let step = if last { target - t } else { h };
            if step <= 1e-14 * t.abs().max(span) {
                if last {
                    t = target;
                    break;
                }
                return Err(Error::Integration(format!("step size underflow at t = {t:e}")));
            }
            for s in 1..7 {
                let mut ys = y;
                for (i, v) in ys.iter_mut().enumerate() {
                    for j in 0..s {
                        *v += step * A[s][j] * k[j][i];
                    }
                }
                k[s] = f(t + C[s] * step, &ys);
            }
            let mut y5 = y;
            let mut err = 0.0f64;
            for i in 0..N {
                let (mut d5, mut d4) = (0.0, 0.0);
                for s in 0..7 {
                    d5 += B5[s] * k[s][i];
                    d4 += B4[s] * k[s][i];
                }
                y5[i] += step * d5;
                let sc = atol + rtol * y[i].abs().max(y5[i].abs());
                err = err.max((step * (d5 - d4)).abs() / sc);
            }
            if !err.is_finite() {
                return Err(Error::Integration(format!("non-finite state at t = {t:e}")));
            }
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y5;
                k[0] = k[6];
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !(last && err <= 1.0) {
                h = step * factor;
            }
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let ts: Vec<f64> = (0..=50).map(|i| i as f64 * 0.4).collect();
        let ys = dopri5(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], &ts, 1e-11, 1e-13).unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert!((y[0] - t.cos()).abs() < 1e-8);
            assert!((y[1] + t.sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn exponential_decay() {
        let ts = [0.0, 1.0, 5.0];
        let ys = dopri5(|_, y: &[f64; 1]| [-2.0 * y[0]], 0.0, [3.0], &ts, 1e-10, 1e-14).unwrap();
        assert_eq!(ys[0][0], 3.0);
        assert!((ys[2][0] - 3.0 * (-10f64).exp()).abs() < 1e-12);
    }
}
