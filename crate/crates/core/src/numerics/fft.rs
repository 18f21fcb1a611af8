//! Power-of-two FFTs with the physics sign convention.
//!
//! `fft_forward` computes X_k = Σ_j x_j e^{+2πijk/n} (unnormalised), matching
//! S(ω) = ∫dt e^{iωt} S(t); `fft_inverse` applies e^{−2πijk/n} and divides by n.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

fn check_len(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Size(format!("FFT length {n} is not a power of two")));
    }
    Ok(())
}

pub fn fft_forward(samples: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(samples.len())?;
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    Ok(buf)
}

pub fn fft_inverse(spectrum: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(spectrum.len())?;
    let mut buf = spectrum.to_vec();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    let s = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|z| *z *= s);
    Ok(buf)
}

/// Angular frequency of bin k for n samples spaced dt apart, in FFT order.
pub fn bin_frequency(k: usize, n: usize, dt: f64) -> f64 {
    let signed = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
    2.0 * std::f64::consts::PI * signed / (n as f64 * dt)
}
