//! Magnetic-field noise spectra of a two-dimensional Fermi gas and of bosonic lines.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::quad::{integrate_partitioned, QuadratureSpec};
use crate::units::{q_omega, PhysicalParams, Triad, C_LIGHT, E_CHARGE, HBAR};

/// One bosonic mode: frequency ω_q, wave vector q, field amplitude g (Cartesian) and occupation n_q.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BosonLine {
    pub omega_q: f64,
    pub q: [f64; 2],
    pub g: [Complex64; 3],
    pub n_q: f64,
}

impl BosonLine {
    pub fn g_plus(&self) -> Complex64 {
        self.g[0] + Complex64::i() * self.g[1]
    }

    pub fn g_minus(&self) -> Complex64 {
        self.g[0] - Complex64::i() * self.g[1]
    }

    pub fn coupling_sq(&self) -> f64 {
        self.g.iter().map(|z| z.norm_sqr()).sum()
    }

    /// The same mode rotated by φ about the plane normal.
    pub fn rotated(&self, phi: f64) -> BosonLine {
        let (s, c) = phi.sin_cos();
        let rot = |x: f64, y: f64| [c * x - s * y, s * x + c * y];
        let q = rot(self.q[0], self.q[1]);
        let gx = self.g[0] * c - self.g[1] * s;
        let gy = self.g[0] * s + self.g[1] * c;
        BosonLine {
            q,
            g: [gx, gy, self.g[2]],
            ..*self
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NoiseKind {
    /// Momentum- and direction-independent coupling 𝒱.
    SimpleFermion { coupling: f64 },
    TransverseCurrent,
    BosonLines { lines: Vec<BosonLine> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub params: PhysicalParams,
}

/// A spectral line of the bosonic correlator within the requested window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineWeight {
    pub q: [f64; 2],
    pub omega: f64,
    pub weight: f64,
}

fn check_q(q: f64) -> Result<()> {
    if q == 0.0 {
        return Err(Error::SingularInput("noise spectrum at q = 0".into()));
    }
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::Domain(format!("q must be positive and finite, got {q}")));
    }
    Ok(())
}

/// Dimensionless (E_F − E)/E_F, (E_F − ħω − E)/E_F and ħω/E_F.
fn energy_gaps(params: &PhysicalParams, omega: f64, q: f64) -> (f64, f64, f64) {
    let k_f = params.k_f();
    let qw = q_omega(params, omega);
    let x = (qw - q) * (qw + q) / (2.0 * k_f * q);
    let w = (qw / k_f) * (qw / k_f);
    let a = (1.0 - x) * (1.0 + x);
    (a, a - w, w)
}

pub fn simple_fermion_noise(model: &NoiseModel, omega: f64, q: f64) -> Result<f64> {
    let coupling = match model.kind {
        NoiseKind::SimpleFermion { coupling } => coupling,
        _ => return Err(Error::invalid("kind", "simple_fermion_noise needs a simple-fermion model")),
    };
    check_q(q)?;
    if omega <= 0.0 {
        return Ok(0.0);
    }
    let p = &model.params;
    let (a, b, _) = energy_gaps(p, omega, q);
    if a <= 0.0 {
        return Ok(0.0);
    }
    let e_f = p.e_f();
    let pref = 2f64.sqrt() * coupling * coupling * p.mass.powf(1.5) / (PI * HBAR * HBAR * q);
    let bracket = if b <= 0.0 {
        a.sqrt()
    } else {
        (a - b) / (a.sqrt() + b.sqrt())
    };
    Ok(pref * e_f.sqrt() * bracket)
}

/// Dimensionless transverse-current spectral function C(q,ω), spin degeneracy 2 included.
pub fn transverse_current_c(params: &PhysicalParams, omega: f64, q: f64) -> Result<f64> {
    transverse_current_c_spin(params, omega, q, 2.0)
}

/// C(q,ω) for an arbitrary spin degeneracy (2 is physical).
pub fn transverse_current_c_spin(params: &PhysicalParams, omega: f64, q: f64, spin_degeneracy: f64) -> Result<f64> {
    check_q(q)?;
    if omega <= 0.0 {
        return Ok(0.0);
    }
    let (a, b, w) = energy_gaps(params, omega, q);
    let c = if a <= 0.0 {
        0.0
    } else if b <= 0.0 {
        2.0 / 3.0 * a.powf(1.5)
    } else {
        let (sa, sb) = (a.sqrt(), b.sqrt());
        2.0 / 3.0 * w * (a + sa * sb + b) / (sa + sb)
    };
    Ok(c * spin_degeneracy / 2.0)
}

/// (2e v_F/c)²(πm/ħ); the Oersted noise is this times F e^{−2qd} (k_F/q) C(q,ω).
pub fn oersted_prefactor(params: &PhysicalParams) -> f64 {
    let a = 2.0 * E_CHARGE * params.v_f / C_LIGHT;
    a * a * PI * params.mass / HBAR
}

/// C^{−+}(ω,q) = F e^{−2dq} (2e v_F/c)² (πm/ħ)(k_F/q) C(q,ω).
pub fn oersted_noise(params: &PhysicalParams, omega: f64, q: f64, f: f64) -> Result<f64> {
    oersted_noise_spin(params, omega, q, f, 2.0)
}

pub fn oersted_noise_spin(params: &PhysicalParams, omega: f64, q: f64, f: f64, spin_degeneracy: f64) -> Result<f64> {
    let c = transverse_current_c_spin(params, omega, q, spin_degeneracy)?;
    Ok(f * (-2.0 * params.d * q).exp() * oersted_prefactor(params) * params.k_f() / q * c)
}

/// Open q-interval where the transverse-current noise is nonzero, and the interior
/// kinks where the second 3/2-power term switches on. Sorted breakpoints.
pub fn support_breakpoints(params: &PhysicalParams, omega: f64) -> Option<Vec<f64>> {
    let (lo, hi) = crate::units::continuum_support(params, omega)?;
    let k_f = params.k_f();
    let qw = q_omega(params, omega);
    let mut pts = vec![lo, hi];
    if qw < k_f {
        let k1 = ((k_f - qw) * (k_f + qw)).sqrt();
        pts.extend([k_f - k1, k_f + k1].into_iter().filter(|&x| x > lo && x < hi));
    }
    pts.sort_by(f64::total_cmp);
    Some(pts)
}

/// Largest q with E(q,ω) < E_F.
pub fn q_max(params: &PhysicalParams, omega: f64) -> Option<f64> {
    crate::units::continuum_support(params, omega).map(|s| s.1)
}

/// ∫ q dq/2π f(q) over the given ascending breakpoints.
pub fn isotropic_density<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    Ok(integrate_partitioned(|q| q * f(q) / (2.0 * PI), breaks, spec)?.value)
}

/// Local spectral density C^{−+}(Δ) = ∫ q dq/2π C^{−+}(Δ,q) for z-aligned dipoles (G²·s).
pub fn local_noise_density(params: &PhysicalParams, spec: &QuadratureSpec) -> Result<f64> {
    params.validate()?;
    let breaks = support_breakpoints(params, params.delta)
        .ok_or_else(|| Error::Domain("no particle-hole continuum at the dipole frequency".into()))?;
    let pref = oersted_prefactor(params) * params.k_f() / (2.0 * PI);
    let omega = params.delta;
    let p = *params;
    let v = integrate_partitioned(
        |q| pref * (-2.0 * p.d * q).exp() * transverse_current_c(&p, omega, q).unwrap_or(0.0),
        &breaks,
        spec,
    )?;
    Ok(v.value)
}

/// Emission and absorption lines of the bosonic correlator within |ω ∓ ω_q| < window.
pub fn boson_line_spectrum(model: &NoiseModel, omega: f64, window: f64) -> Result<Vec<LineWeight>> {
    let lines = match &model.kind {
        NoiseKind::BosonLines { lines } => lines,
        _ => return Err(Error::invalid("kind", "boson_line_spectrum needs a boson-lines model")),
    };
    let mut out = Vec::new();
    for l in lines {
        let g2 = l.coupling_sq();
        if (omega - l.omega_q).abs() < window {
            out.push(LineWeight {
                q: l.q,
                omega: l.omega_q,
                weight: 2.0 * PI * g2 * (1.0 + l.n_q),
            });
        }
        if l.n_q > 0.0 && (omega + l.omega_q).abs() < window {
            out.push(LineWeight {
                q: [-l.q[0], -l.q[1]],
                omega: -l.omega_q,
                weight: 2.0 * PI * g2 * l.n_q,
            });
        }
    }
    Ok(out)
}

/// Orientations of two dipoles relative to a plane with unit normal `normal`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientationPair {
    pub n: Triad,
    pub m: Triad,
    pub normal: [f64; 3],
}

impl OrientationPair {
    pub fn new(n: Triad, m: Triad) -> Self {
        OrientationPair {
            n,
            m,
            normal: [0.0, 0.0, 1.0],
        }
    }
}

fn cdot(u: [Complex64; 3], v: [Complex64; 3]) -> Complex64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn complexify(a: [f64; 3], i_b: [f64; 3], sign: f64) -> [Complex64; 3] {
    [0, 1, 2].map(|k| Complex64::new(a[k], sign * i_b[k]))
}

/// F_nm(q̂) = [(x̂_n − iŷ_n)·(q̂ + id̂)] [(x̂_m + iŷ_m)·(q̂ − id̂)].
pub fn orientation_factor(pair: &OrientationPair, q_hat: [f64; 2]) -> Result<Complex64> {
    let norm = (q_hat[0] * q_hat[0] + q_hat[1] * q_hat[1]).sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("q_hat", format!("must be a unit vector, |q̂| = {norm}")));
    }
    let d = pair.normal;
    if ((d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() - 1.0).abs() > 1e-12 || (q_hat[0] * d[0] + q_hat[1] * d[1]).abs() > 1e-12 {
        return Err(Error::invalid("normal", "plane normal must be a unit vector orthogonal to q̂"));
    }
    pair.n.validate()?;
    pair.m.validate()?;
    let q3 = [q_hat[0], q_hat[1], 0.0];
    let left = cdot(complexify(pair.n.x, pair.n.y, -1.0), complexify(q3, d, 1.0));
    let right = cdot(complexify(pair.m.x, pair.m.y, 1.0), complexify(q3, d, -1.0));
    Ok(left * right)
}

/// Fourier coefficients f_k (k = −2..2, stored at index k+2) with
/// F_nm(cos θ, sin θ) = Σ_k f_k e^{ikθ}, for the normal d̂ = ẑ.
pub fn orientation_fourier(n: &Triad, m: &Triad) -> [Complex64; 5] {
    let i = Complex64::i();
    let u = complexify(n.x, n.y, -1.0);
    let v = complexify(m.x, m.y, 1.0);
    // a(θ) = u_x cos θ + u_y sin θ + i u_z, b(θ) = v_x cos θ + v_y sin θ − i v_z
    let a = [(u[0] + i * u[1]) * 0.5, i * u[2], (u[0] - i * u[1]) * 0.5];
    let b = [(v[0] + i * v[1]) * 0.5, -i * v[2], (v[0] - i * v[1]) * 0.5];
    let mut f = [Complex64::new(0.0, 0.0); 5];
    for (j, aj) in a.iter().enumerate() {
        for (k, bk) in b.iter().enumerate() {
            f[j + k] += aj * bk;
        }
    }
    f
}

/// Oersted coupling V_{k,k+q} = (q̂ + id̂)(2πeħ/cm) e^{−qd} (q̂⊥·k), Cartesian components.
pub fn oersted_coupling(params: &PhysicalParams, k: [f64; 2], q: [f64; 2]) -> Result<[Complex64; 3]> {
    let qn = (q[0] * q[0] + q[1] * q[1]).sqrt();
    if qn == 0.0 {
        return Err(Error::SingularInput("Oersted coupling at q = 0".into()));
    }
    let qh = [q[0] / qn, q[1] / qn];
    // q̂⊥ = q̂ × d̂
    let q_perp = [qh[1], -qh[0]];
    let amp = 2.0 * PI * E_CHARGE * HBAR / (C_LIGHT * params.mass) * (-qn * params.d).exp() * (q_perp[0] * k[0] + q_perp[1] * k[1]);
    Ok([
        Complex64::new(qh[0] * amp, 0.0),
        Complex64::new(qh[1] * amp, 0.0),
        Complex64::new(0.0, amp),
    ])
}

/// Coupling with the coordinate origin shifted to `origin`: V(r) = V(0) e^{iq·r}.
pub fn oersted_coupling_shifted(params: &PhysicalParams, k: [f64; 2], q: [f64; 2], origin: [f64; 2]) -> Result<[Complex64; 3]> {
    let v = oersted_coupling(params, k, q)?;
    let phase = Complex64::from_polar(1.0, q[0] * origin[0] + q[1] * origin[1]);
    Ok(v.map(|c| c * phase))
}

/// Circular components (V⁺, V⁻) = (V_x + iV_y, V_x − iV_y).
pub fn circular(v: [Complex64; 3]) -> (Complex64, Complex64) {
    let i = Complex64::i();
    (v[0] + i * v[1], v[0] - i * v[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::resonance_energy;

    fn standard() -> PhysicalParams {
        PhysicalParams::standard()
    }

    #[test]
    fn vanishes_for_negative_frequency_and_outside_support() {
        let p = standard();
        let k_f = p.k_f();
        assert_eq!(transverse_current_c(&p, -1e12, 0.1 * k_f).unwrap(), 0.0);
        assert_eq!(transverse_current_c(&p, 1e12, 2.5 * k_f).unwrap(), 0.0);
        assert!(matches!(transverse_current_c(&p, 1e12, 0.0), Err(Error::SingularInput(_))));
    }

    #[test]
    fn plateau_at_resonance() {
        let p = standard();
        let ef = p.e_f();
        for frac in [1e-3, 1e-4, 1e-6] {
            let w = frac * ef / HBAR;
            let qw = q_omega(&p, w);
            let c = transverse_current_c(&p, w, qw).unwrap();
            assert!((c / frac - 1.0).abs() < 0.01, "frac {frac}: {c}");
        }
        let w = ef / HBAR;
        let c = transverse_current_c(&p, w, q_omega(&p, w)).unwrap();
        assert!((c - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn branches_agree_at_boundary() {
        let p = standard();
        let w = 0.3 * p.e_f() / HBAR;
        let bp = support_breakpoints(&p, w).unwrap();
        assert_eq!(bp.len(), 4);
        let q = bp[1];
        let below = transverse_current_c(&p, w, q * (1.0 - 1e-12)).unwrap();
        let above = transverse_current_c(&p, w, q * (1.0 + 1e-12)).unwrap();
        assert!((below - above).abs() < 1e-9);
        let (e, _) = resonance_energy(&p, q, w).unwrap();
        assert!(((p.e_f() - HBAR * w - e) / p.e_f()).abs() < 1e-9);
    }

    #[test]
    fn oersted_small_q_plateau() {
        let p = standard();
        let w = 1e-4 * p.e_f() / HBAR;
        let q = 0.1 * p.k_f();
        let v = oersted_noise(&p, w, q, 1.0).unwrap();
        let plateau = oersted_prefactor(&p) * 1e-4 * p.k_f() / q;
        assert!((v / plateau - 1.0).abs() < 0.02);
        let mut pd = p;
        pd.d = 3e-8;
        let damped = oersted_noise(&pd, w, q, 1.0).unwrap();
        assert!((damped / v - (-2.0 * 3e-8 * q).exp()).abs() < 1e-12);
    }

    #[test]
    fn top_hat_density() {
        let s = QuadratureSpec::default();
        let (c0, qm) = (3.5, 2.0e5);
        let v = isotropic_density(|_| c0, &[0.0, qm], &s).unwrap();
        assert!((v / (c0 * qm * qm / (4.0 * PI)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn local_density_positive_and_monotone_in_height() {
        let s = QuadratureSpec::default();
        let p = standard().with_delta(1e13);
        let mut prev = f64::INFINITY;
        for k in 0..6 {
            let d = if k == 0 { 0.0 } else { 1e-7 * 2f64.powi(k) };
            let v = local_noise_density(&p.with_d(d), &s).unwrap();
            assert!(v > 0.0 && v.is_finite() && v < prev);
            prev = v;
        }
    }

    #[test]
    fn orientation_examples() {
        let z = Triad::Z_ALIGNED;
        let pair = OrientationPair::new(z, z);
        for th in [0.0, 0.7, 2.5] {
            let f = orientation_factor(&pair, [f64::cos(th), f64::sin(th)]).unwrap();
            assert!((f - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
        let t = Triad::new([0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap();
        let pair = OrientationPair::new(t, t);
        for th in [0.0, 0.7, 2.5, 4.0] {
            let q = [f64::cos(th), f64::sin(th)];
            let f = orientation_factor(&pair, q).unwrap();
            let want = (1.0 + q[1]).powi(2);
            assert!((f - Complex64::new(want, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn orientation_fourier_matches_direct() {
        let a = Triad::new([0.0, 0.6, 0.8], [0.0, -0.8, 0.6], [1.0, 0.0, 0.0]).unwrap();
        let b = Triad::Z_ALIGNED;
        let f = orientation_fourier(&a, &b);
        for th in [0.1, 1.3, 2.9, 5.0] {
            let direct = orientation_factor(&OrientationPair::new(a, b), [f64::cos(th), f64::sin(th)]).unwrap();
            let series: Complex64 = (0..5).map(|k| f[k] * Complex64::from_polar(1.0, (k as f64 - 2.0) * th)).sum();
            assert!((direct - series).norm() < 1e-13);
        }
    }

    #[test]
    fn coupling_examples() {
        let p = standard();
        let k_f = p.k_f();
        let q = [0.1 * k_f, 0.0];
        let v = oersted_coupling(&p, [3.0 * k_f, 0.0], q).unwrap();
        assert!(v.iter().all(|c| c.norm() == 0.0));
        // q̂⊥ = q̂ × d̂ = (0, −1) for q̂ = x̂
        let v = oersted_coupling(&p, [0.0, -k_f], q).unwrap();
        let mag = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let want = 2.0 * PI * E_CHARGE * HBAR / (C_LIGHT * p.mass) * k_f * 2f64.sqrt();
        assert!((mag / want - 1.0).abs() < 1e-12);
        assert!(oersted_coupling(&p, [0.0, 1.0], [0.0, 0.0]).is_err());
    }

    #[test]
    fn boson_lines() {
        let line = BosonLine {
            omega_q: 5.0,
            q: [1.0, 0.0],
            g: [Complex64::new(0.3, 0.1), Complex64::new(0.0, 0.2), Complex64::new(0.1, 0.0)],
            n_q: 0.0,
        };
        let model = NoiseModel {
            kind: NoiseKind::BosonLines { lines: vec![line] },
            params: standard(),
        };
        assert!(boson_line_spectrum(&model, -5.0, 0.1).unwrap().is_empty());
        let l = boson_line_spectrum(&model, 5.0, 0.1).unwrap();
        assert_eq!(l.len(), 1);
        assert!((l[0].weight - 2.0 * PI * line.coupling_sq()).abs() < 1e-15);
        let phi = 0.9;
        let r = line.rotated(phi);
        assert!((r.g_plus() - line.g_plus() * Complex64::from_polar(1.0, phi)).norm() < 1e-14);
        assert!((r.g_minus() - line.g_minus() * Complex64::from_polar(1.0, -phi)).norm() < 1e-14);
    }
}
