//! Superradiance diagnostics and the mean-field macrospin.

use std::f64::consts::PI;

use crate::decay::DecayMatrix;
use crate::error::{Error, Result};
use crate::noise::{oersted_noise, support_breakpoints};
use crate::numerics::ode::dopri5;
use crate::numerics::quad::{integrate_partitioned, QuadratureSpec};
use crate::units::{PhysicalParams, HBAR};

/// Initial rate of change of the total decay rate for the fully excited state (Hz²):
/// Σ_{n≠m} γ_nm γ_mn − Σ_n γ_nn².
pub fn dtr_excited(m: &DecayMatrix) -> f64 {
    let g = &m.rates;
    let n = g.nrows();
    let mut off = 0.0;
    let mut diag = 0.0;
    for a in 0..n {
        diag += g[(a, a)].re * g[(a, a)].re;
        for b in 0..n {
            if a != b {
                off += (g[(a, b)] * g[(b, a)]).re;
            }
        }
    }
    off - diag
}

/// Second-order photon correlation at t = 0 for the fully excited state.
pub fn g2_zero(m: &DecayMatrix) -> Result<f64> {
    let g = &m.rates;
    let n = g.nrows();
    let trace: f64 = (0..n).map(|a| g[(a, a)].re).sum();
    if trace == 0.0 {
        return Err(Error::Domain("g2 undefined: decay matrix has zero trace".into()));
    }
    let mut num = 0.0;
    for a in 0..n {
        for b in 0..n {
            if a != b {
                num += g[(a, a)].re * g[(b, b)].re + (g[(a, b)] * g[(b, a)]).re;
            }
        }
    }
    Ok(num / (trace * trace))
}

/// Decay rate of the σ^x product state: ½ Σ_{n,m} Re γ_nm (Hz).
pub fn r_coherent(m: &DecayMatrix) -> f64 {
    0.5 * m.rates.iter().map(|z| z.re).sum::<f64>()
}

/// λ_SR from an isotropic noise profile c(q) over the breakpoints:
/// πλ² = ∫ q dq/2π c² / (∫ q dq/2π c)².
pub fn lambda_sr_from<F: Fn(f64) -> f64>(c: F, breaks: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    let first = integrate_partitioned(|q| q * c(q) / (2.0 * PI), breaks, spec)?.value;
    let second = integrate_partitioned(|q| q * c(q).powi(2) / (2.0 * PI), breaks, spec)?.value;
    let v = [first, second];
    if v[0] == 0.0 {
        return Err(Error::Domain("lambda_SR undefined: local noise density is zero".into()));
    }
    Ok((v[1] / (v[0] * v[0]) / PI).sqrt())
}

/// Correlated-emission length of the transverse-current noise at the dipole frequency (cm).
pub fn lambda_sr(params: &PhysicalParams, spec: &QuadratureSpec) -> Result<f64> {
    params.validate()?;
    let omega = params.delta;
    let breaks = support_breakpoints(params, omega)
        .ok_or_else(|| Error::Domain("no particle-hole continuum at the dipole frequency".into()))?;
    lambda_sr_from(|q| oersted_noise(params, omega, q, 1.0).unwrap_or(0.0), &breaks, spec)
}

/// λ_SR for a noise ∝ 1/q on (Δ/v_F, 2k_F): λ² = ln(2k_F v_F/Δ)/(2k_F²).
pub fn lambda_sr_one_over_q(params: &PhysicalParams) -> f64 {
    let k = params.k_f();
    ((2.0 * k * params.v_f / params.delta).ln() / (2.0 * k * k)).sqrt()
}

/// Order-of-magnitude estimate λ_F² ln(4E_F/ħΔ), returned as a length.
pub fn lambda_sr_rough(params: &PhysicalParams) -> f64 {
    let lf = params.lambda_f();
    (lf * lf * (4.0 * params.e_f() / (HBAR * params.delta)).ln()).sqrt()
}

/// Spacing scale below which the coherent-state rate is enhanced (cm).
pub fn lambda_sr_prime(params: &PhysicalParams) -> f64 {
    let lf = params.lambda_f();
    let length = if params.d < lf { lf } else { params.d };
    (length * params.v_f / params.delta).sqrt()
}

/// ∂tR ≈ Nγ0²(nπλ_SR² − 1) for a homogeneous low-density ensemble.
pub fn dtr_homogeneous(gamma0: f64, lambda_sr: f64, density: f64, n: usize) -> f64 {
    n as f64 * gamma0 * gamma0 * (density * PI * lambda_sr * lambda_sr - 1.0)
}

/// Large-area estimate of the coherent-state rate for γ(r) = γ0 (r0/r)^α beyond r0.
///
/// For α < 2 returns Nπ/(2−α) n γ0 A^{1−α/2} r0^α; otherwise the independent value Nγ0/2.
pub fn r_area_scaling(alpha: f64, r0: f64, area: f64, density: f64, n: usize, gamma0: f64) -> Result<f64> {
    if !(r0 > 0.0 && area > r0 * r0) {
        return Err(Error::invalid("area", format!("need A > r0², got A={area:e}, r0={r0:e}")));
    }
    let nf = n as f64;
    if alpha >= 2.0 {
        return Ok(0.5 * nf * gamma0);
    }
    Ok(nf * PI / (2.0 - alpha) * density * gamma0 * area.powf(1.0 - 0.5 * alpha) * r0.powf(alpha))
}

/// Superradiance diagnostics for one decay matrix at areal density `density` (cm⁻²).
#[derive(Clone, Debug, PartialEq)]
pub struct SuperradianceReport {
    pub dtr: f64,
    pub g2_zero: f64,
    pub r_coherent: f64,
    pub lambda_sr: f64,
    pub lambda_sr_prime: f64,
    pub density: f64,
}

impl SuperradianceReport {
    pub fn compute(m: &DecayMatrix, params: &PhysicalParams, density: f64, spec: &QuadratureSpec) -> Result<Self> {
        Ok(SuperradianceReport {
            dtr: dtr_excited(m),
            g2_zero: g2_zero(m)?,
            r_coherent: r_coherent(m),
            lambda_sr: lambda_sr(params, spec)?,
            lambda_sr_prime: lambda_sr_prime(params),
            density,
        })
    }

    /// Whether ∂tR > 0, equivalently g²(0) > 1.
    pub fn is_superradiant(&self) -> bool {
        self.dtr > 0.0
    }
}

/// Collective spin ⟨S⟩(t) in units of ħ.
#[derive(Clone, Debug, PartialEq)]
pub struct MacrospinTrajectory {
    pub times: Vec<f64>,
    pub sx: Vec<f64>,
    pub sy: Vec<f64>,
    pub sz: Vec<f64>,
    pub n: usize,
    pub gamma0: f64,
    pub delta: f64,
}

impl MacrospinTrajectory {
    /// Largest relative deviation of |S| from N/2.
    pub fn norm_drift(&self) -> f64 {
        let half = 0.5 * self.n as f64;
        (0..self.times.len())
            .map(|i| ((self.sx[i].powi(2) + self.sy[i].powi(2) + self.sz[i].powi(2)).sqrt() - half).abs() / half)
            .fold(0.0, f64::max)
    }

    /// The same trajectory in the frame co-rotating at Δ (precession removed).
    pub fn rotating_frame(&self) -> MacrospinTrajectory {
        let mut out = self.clone();
        for i in 0..self.times.len() {
            let (s, c) = (self.delta * self.times[i]).sin_cos();
            out.sx[i] = c * self.sx[i] - s * self.sy[i];
            out.sy[i] = s * self.sx[i] + c * self.sy[i];
        }
        out.delta = 0.0;
        out
    }
}

fn check_macrospin(n: usize, gamma0: f64, delta: f64, t_grid: &[f64]) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n", "need at least one dipole"));
    }
    if !(gamma0 > 0.0 && gamma0.is_finite()) {
        return Err(Error::invalid("gamma0", "must be positive"));
    }
    if !delta.is_finite() {
        return Err(Error::invalid("delta", "must be finite"));
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("t_grid", "times must be finite"));
    }
    Ok(())
}

/// Closed-form solution starting fully polarised along x̂.
pub fn macrospin_exact(n: usize, gamma0: f64, delta: f64, t_grid: &[f64]) -> Result<MacrospinTrajectory> {
    check_macrospin(n, gamma0, delta, t_grid)?;
    let half = 0.5 * n as f64;
    let rate = half * gamma0;
    let mut tr = MacrospinTrajectory {
        times: t_grid.to_vec(),
        sx: Vec::with_capacity(t_grid.len()),
        sy: Vec::with_capacity(t_grid.len()),
        sz: Vec::with_capacity(t_grid.len()),
        n,
        gamma0,
        delta,
    };
    for &t in t_grid {
        let sech = 1.0 / (rate * t).cosh();
        let (s, c) = (delta * t).sin_cos();
        tr.sx.push(half * c * sech);
        tr.sy.push(-half * s * sech);
        tr.sz.push(-half * (rate * t).tanh());
    }
    Ok(tr)
}

/// Lab-frame Landau–Lifshitz right-hand side −Δẑ×S − γ0 S×(ẑ×S).
pub fn landau_lifshitz_rhs(s: &[f64; 3], gamma0: f64, delta: f64) -> [f64; 3] {
    // ẑ×S = (−S_y, S_x, 0); S×(ẑ×S) = (−S_x S_z, −S_y S_z, S_x² + S_y²)
    let prec = [delta * s[1], -delta * s[0], 0.0];
    let damp = [-s[0] * s[2], -s[1] * s[2], s[0] * s[0] + s[1] * s[1]];
    [0, 1, 2].map(|i| prec[i] - gamma0 * damp[i])
}

const MAX_LAB_PHASE: f64 = 1e5;

/// Adaptive Dormand–Prince integration of the Landau–Lifshitz equation (local tolerance 1e-10).
/// Runs co-rotating at Δ when Δ·t_max exceeds 10⁵ rad.
pub fn macrospin_ode(n: usize, gamma0: f64, delta: f64, t_grid: &[f64]) -> Result<MacrospinTrajectory> {
    check_macrospin(n, gamma0, delta, t_grid)?;
    let half = 0.5 * n as f64;
    let mut order: Vec<usize> = (0..t_grid.len()).collect();
    order.sort_by(|&a, &b| t_grid[a].total_cmp(&t_grid[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| t_grid[i]).collect();
    if sorted.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::invalid("t_grid", "times must be >= 0"));
    }
    // Precession commutes with the damping; beyond this many radians integrate co-rotating
    // and rotate back exactly.
    let t_end = sorted.last().copied().unwrap_or(0.0);
    let rotating = (delta * t_end).abs() > MAX_LAB_PHASE;
    let lab_delta = if rotating { 0.0 } else { delta };
    // scaled spin s = S/(N/2) keeps the tolerance meaningful for any N
    let mut states = dopri5(
        |_, y: &[f64; 3]| landau_lifshitz_rhs(y, gamma0 * half, lab_delta),
        0.0,
        [1.0, 0.0, 0.0],
        &sorted,
        1e-10,
        1e-12,
    )?;
    if rotating {
        for (st, &t) in states.iter_mut().zip(&sorted) {
            let (sn, c) = (delta * t).sin_cos();
            *st = [c * st[0] + sn * st[1], -sn * st[0] + c * st[1], st[2]];
        }
    }
    let mut tr = MacrospinTrajectory {
        times: t_grid.to_vec(),
        sx: vec![0.0; t_grid.len()],
        sy: vec![0.0; t_grid.len()],
        sz: vec![0.0; t_grid.len()],
        n,
        gamma0,
        delta,
    };
    for (k, &i) in order.iter().enumerate() {
        tr.sx[i] = half * states[k][0];
        tr.sy[i] = half * states[k][1];
        tr.sz[i] = half * states[k][2];
    }
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn diag(n: usize, g0: f64) -> DecayMatrix {
        DecayMatrix::from_real(DMatrix::from_diagonal_element(n, n, g0), g0)
    }

    fn constant(n: usize, g0: f64) -> DecayMatrix {
        DecayMatrix::from_real(DMatrix::from_element(n, n, g0), g0)
    }

    #[test]
    fn closed_forms() {
        let g0 = 1.7;
        for n in 2..=12 {
            let nf = n as f64;
            assert!((dtr_excited(&diag(n, g0)) + nf * g0 * g0).abs() < 1e-12 * nf * g0 * g0);
            assert!((dtr_excited(&constant(n, g0)) - nf * (nf - 2.0) * g0 * g0).abs() < 1e-12 * nf * nf * g0 * g0);
            assert!((g2_zero(&diag(n, g0)).unwrap() - (1.0 - 1.0 / nf)).abs() < 1e-12);
            assert!((g2_zero(&constant(n, g0)).unwrap() - 2.0 * (nf - 1.0) / nf).abs() < 1e-12);
            assert!((r_coherent(&diag(n, g0)) - 0.5 * nf * g0).abs() < 1e-12);
            assert!((r_coherent(&constant(n, g0)) - 0.5 * nf * nf * g0).abs() < 1e-11);
        }
        assert_eq!(dtr_excited(&constant(2, g0)), 0.0);
        assert!(g2_zero(&DecayMatrix::from_real(DMatrix::zeros(3, 3), 0.0)).is_err());
    }

    #[test]
    fn area_scaling_branches() {
        let r = r_area_scaling(3.0, 1.0, 100.0, 0.1, 10, 2.0).unwrap();
        assert_eq!(r, 10.0);
        let a = r_area_scaling(1.0, 1.0, 100.0, 0.1, 10, 2.0).unwrap();
        let b = r_area_scaling(1.0, 1.0, 400.0, 0.1, 10, 2.0).unwrap();
        assert!((b / a - 2.0).abs() < 1e-12);
        assert_eq!(r_area_scaling(2.0, 1.0, 100.0, 0.1, 10, 2.0).unwrap(), 10.0);
        assert!(r_area_scaling(1.0, 1.0, 0.5, 0.1, 10, 2.0).is_err());
    }

    #[test]
    fn lambda_prime_branches() {
        let p = PhysicalParams::standard().with_delta(2.0 * PI * 1e9);
        let l = lambda_sr_prime(&p);
        assert!(l > 1e-5 && l < 1e-4);
        let cont = p.with_d(p.lambda_f());
        assert!((lambda_sr_prime(&cont) - l).abs() < 1e-12 * l);
        let fast = p.with_delta(4.0 * p.delta);
        assert!((lambda_sr_prime(&fast) / l - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_macrospin_limits() {
        let tr = macrospin_exact(20, 1.0, 100.0, &[0.0, 1e3]).unwrap();
        assert_eq!((tr.sx[0], tr.sy[0], tr.sz[0]), (10.0, 0.0, 0.0));
        assert!(tr.sx[1].abs() < 1e-12 && tr.sy[1].abs() < 1e-12 && (tr.sz[1] + 10.0).abs() < 1e-12);
        assert!(tr.norm_drift() < 1e-15);
    }

    #[test]
    fn ode_tracks_exact_without_precession() {
        let ts: Vec<f64> = (0..50).map(|i| i as f64 * 0.01).collect();
        let tr = macrospin_ode(20, 1.0, 0.0, &ts).unwrap();
        assert!(tr.sy.iter().all(|&v| v == 0.0));
        let ex = macrospin_exact(20, 1.0, 0.0, &ts).unwrap();
        for i in 0..ts.len() {
            assert!((tr.sz[i] - ex.sz[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn ode_with_huge_precession_phase() {
        let (n, g0, delta) = (20usize, 7.0, 7.5e9);
        let ts: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5 / (n as f64 * g0)).collect();
        let a = macrospin_ode(n, g0, delta, &ts).unwrap();
        let b = macrospin_exact(n, g0, delta, &ts).unwrap();
        for i in 0..ts.len() {
            assert!((a.sx[i] - b.sx[i]).abs() < 1e-6 * n as f64);
            assert!((a.sy[i] - b.sy[i]).abs() < 1e-6 * n as f64);
            assert!((a.sz[i] - b.sz[i]).abs() < 1e-6 * n as f64);
        }
    }
}
