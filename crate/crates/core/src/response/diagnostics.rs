//! Kinematic and structural measurements on synthesized current frames.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::field::CurrentFrame;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    Rho,
    Phi,
}

fn values(frame: &CurrentFrame, c: Component) -> &[f64] {
    match c {
        Component::Rho => &frame.j_rho,
        Component::Phi => &frame.j_phi,
    }
}

/// Azimuthal Fourier coefficient c_m(ρ) = ⟨J e^{−imφ}⟩_φ for every radius.
pub fn azimuthal_harmonic(frame: &CurrentFrame, c: Component, m: i32) -> Vec<Complex64> {
    let np = frame.grid.phi.len();
    let v = values(frame, c);
    let basis: Vec<Complex64> = frame.grid.phi.iter().map(|&p| Complex64::from_polar(1.0, -(m as f64) * p)).collect();
    (0..frame.grid.rho.len())
        .map(|i| v[i * np..(i + 1) * np].iter().zip(&basis).map(|(x, b)| b * x).sum::<Complex64>() / np as f64)
        .collect()
}

/// Shift (in samples, parabolically refined) that best aligns `b` with the template `a[range]`,
/// scored by normalized cross-correlation over lags |l| ≤ `max_lag` that keep the window inside `b`.
pub fn template_shift(a: &[f64], b: &[f64], range: (usize, usize), max_lag: usize) -> Result<f64> {
    let (i0, i1) = range;
    if a.len() != b.len() || i1 >= a.len() || i1 < i0 + 2 {
        return Err(Error::Size("template range must hold >= 3 samples inside equal-length profiles".into()));
    }
    let centred = |v: &[f64]| -> Vec<f64> {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| x - m).collect()
    };
    let t = centred(&a[i0..=i1]);
    let tn = t.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut scores: Vec<(isize, f64)> = Vec::new();
    for lag in -(max_lag as isize)..=max_lag as isize {
        let (lo, hi) = (i0 as isize + lag, i1 as isize + lag);
        if lo < 0 || hi >= b.len() as isize {
            continue;
        }
        let s = centred(&b[lo as usize..=hi as usize]);
        let sn = s.iter().map(|x| x * x).sum::<f64>().sqrt();
        let dot: f64 = t.iter().zip(&s).map(|(x, y)| x * y).sum();
        scores.push((lag, dot / (tn * sn).max(f64::MIN_POSITIVE)));
    }
    let best = (0..scores.len())
        .max_by(|&x, &y| scores[x].1.total_cmp(&scores[y].1))
        .ok_or_else(|| Error::Domain("no admissible lag".into()))?;
    if best == 0 || best + 1 == scores.len() {
        return Err(Error::Domain("cross-correlation peak at the lag limit".into()));
    }
    let (l, c, r) = (scores[best - 1].1, scores[best].1, scores[best + 1].1);
    Ok(scores[best].0 as f64 + 0.5 * (l - r) / (l - 2.0 * c + r))
}

/// Front speed from the cross-correlation of ρ²·Re c₁(ρ) of J_φ: the profile of frame `a` inside
/// `window` is matched against frame `b`. The front must move less than a quarter radial period.
pub fn front_speed(a: &CurrentFrame, b: &CurrentFrame, window: (f64, f64)) -> Result<f64> {
    let rho = &a.grid.rho;
    let inside: Vec<usize> = (0..rho.len()).filter(|&i| rho[i] >= window.0 && rho[i] <= window.1).collect();
    if inside.len() < 8 {
        return Err(Error::Size("front window holds fewer than 8 radii".into()));
    }
    let profile = |f: &CurrentFrame| -> Vec<f64> {
        azimuthal_harmonic(f, Component::Phi, 1)
            .iter()
            .zip(rho)
            .map(|(z, r)| z.re * r * r)
            .collect()
    };
    let dt = b.time - a.time;
    if dt == 0.0 {
        return Err(Error::Domain("frames share the same time".into()));
    }
    let range = (inside[0], inside[inside.len() - 1]);
    let shift = template_shift(&profile(a), &profile(b), range, inside.len() / 4)?;
    Ok(shift * (rho[1] - rho[0]) / dt)
}

/// Radial period of the spiral from the slope of the unwrapped phase of c₁(ρ) over radii in `window`.
pub fn radial_period(frame: &CurrentFrame, window: (f64, f64)) -> Result<f64> {
    let c1 = azimuthal_harmonic(frame, Component::Phi, 1);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut prev: Option<f64> = None;
    let mut offset = 0.0;
    for (z, &r) in c1.iter().zip(&frame.grid.rho) {
        if r < window.0 || r > window.1 {
            continue;
        }
        let mut th = z.arg() + offset;
        if let Some(p) = prev {
            while th - p > PI {
                th -= 2.0 * PI;
                offset -= 2.0 * PI;
            }
            while th - p < -PI {
                th += 2.0 * PI;
                offset += 2.0 * PI;
            }
        }
        prev = Some(th);
        xs.push(r);
        ys.push(th);
    }
    let slope = linear_fit(&xs, &ys)?.0;
    Ok(2.0 * PI / slope.abs())
}

/// Least-squares (slope, intercept).
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Size("fit needs at least two paired points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Log-log slope of the peak (over frames) first-harmonic amplitude against ρ within `window`.
pub fn amplitude_exponent(frames: &[CurrentFrame], c: Component, window: (f64, f64)) -> Result<f64> {
    let first = frames.first().ok_or_else(|| Error::Size("no frames".into()))?;
    let mut peak = vec![0.0f64; first.grid.rho.len()];
    for f in frames {
        for (p, z) in peak.iter_mut().zip(azimuthal_harmonic(f, c, 1)) {
            *p = p.max(z.norm());
        }
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (&r, &p) in first.grid.rho.iter().zip(&peak) {
        if r >= window.0 && r <= window.1 && p > 0.0 {
            xs.push(r.ln());
            ys.push(p.ln());
        }
    }
    Ok(linear_fit(&xs, &ys)?.0)
}

/// max |(1/ρ)∂_ρ(ρJ_ρ) + (1/ρ)∂_φJ_φ| over interior points with ρ in `window`, divided by the larger
/// of the two terms' maxima. Centered differences.
pub fn divergence_ratio(frame: &CurrentFrame, window: (f64, f64)) -> f64 {
    let (rho, np) = (&frame.grid.rho, frame.grid.phi.len());
    let (hr, hp) = (rho[1] - rho[0], 2.0 * PI / np as f64);
    let (mut div, mut t1, mut t2) = (0.0f64, 0.0f64, 0.0f64);
    for i in 1..rho.len() - 1 {
        if rho[i] < window.0 || rho[i] > window.1 {
            continue;
        }
        for j in 0..np {
            let (jp, jm) = ((j + 1) % np, (j + np - 1) % np);
            let radial = (rho[i + 1] * frame.j_rho[(i + 1) * np + j] - rho[i - 1] * frame.j_rho[(i - 1) * np + j])
                / (2.0 * hr * rho[i]);
            let azim = (frame.j_phi[i * np + jp] - frame.j_phi[i * np + jm]) / (2.0 * hp * rho[i]);
            div = div.max((radial + azim).abs());
            t1 = t1.max(radial.abs());
            t2 = t2.max(azim.abs());
        }
    }
    div / t1.max(t2).max(f64::MIN_POSITIVE)
}

/// Net phase advance (in turns) of the analytic signal of J_φ − ⟨J_φ⟩ around the circle at radius index `i_rho`.
pub fn azimuthal_winding(frame: &CurrentFrame, i_rho: usize) -> Result<f64> {
    let np = frame.grid.phi.len();
    let row = &frame.j_phi[i_rho * np..(i_rho + 1) * np];
    let samples: Vec<Complex64> = row.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut f = crate::numerics::fft::fft_inverse(&samples)?;
    // keep positive harmonics only: analytic signal
    f[0] = Complex64::new(0.0, 0.0);
    for (k, v) in f.iter_mut().enumerate().skip(1) {
        if k >= np / 2 {
            *v = Complex64::new(0.0, 0.0);
        } else {
            *v *= 2.0;
        }
    }
    let z = crate::numerics::fft::fft_forward(&f)?;
    let mut total = 0.0;
    for j in 0..np {
        total += (z[(j + 1) % np] / z[j]).arg();
    }
    Ok(total / (2.0 * PI))
}
