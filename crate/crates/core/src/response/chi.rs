//! Real-space current response χ_{αβ}(ρ, φ, ω) to a dipole above the plane.

use num_complex::Complex64;

use super::green::{diamagnetic_weight, kubo_dimensionless, kubo_small_q_dimensionless, ResponseMode, ResponsePart};
use crate::error::{Error, Result};
use crate::noise::support_breakpoints;
use crate::numerics::bessel::j012;
use crate::numerics::quad::{hankel_partition, integrate_partitioned, QuadratureSpec};
use crate::units::{PhysicalParams, C_LIGHT};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResponseEvaluation {
    pub mode: ResponseMode,
    pub part: ResponsePart,
    pub spec: QuadratureSpec,
    /// Upper q limit; `None` selects min(30/d, 10 k_F).
    pub q_cut: Option<f64>,
}

impl Default for ResponseEvaluation {
    fn default() -> Self {
        ResponseEvaluation {
            mode: ResponseMode::Exact,
            part: ResponsePart::Total,
            spec: QuadratureSpec::default().with_rel_tol(1e-8).with_max_subdivisions(20_000),
            q_cut: None,
        }
    }
}

impl ResponseEvaluation {
    pub fn with_part(mut self, part: ResponsePart) -> Self {
        self.part = part;
        self
    }

    pub fn with_mode(mut self, mode: ResponseMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn cutoff(&self, params: &PhysicalParams) -> Result<f64> {
        if let Some(q) = self.q_cut {
            if !(q > 0.0 && q.is_finite()) {
                return Err(Error::invalid("q_cut", "must be positive and finite"));
            }
            return Ok(q);
        }
        if params.d == 0.0 && self.part != ResponsePart::Paramagnetic {
            return Err(Error::Divergence(
                "diamagnetic response diverges for d = 0; place the dipole at a finite height d > 0".into(),
            ));
        }
        Ok((30.0 / params.d).min(10.0 * params.k_f()))
    }
}

/// Angular kernel K(qρ, φ): rows (ρ̂, φ̂), columns (x, y, d).
pub fn kernel_k(q_rho: f64, phi: f64) -> [[f64; 3]; 2] {
    let [j0, j1, j2] = j012(q_rho);
    let (s, c) = phi.sin_cos();
    let (p, m) = (0.5 * (j0 + j2), 0.5 * (j0 - j2));
    [[-p * s, p * c, 0.0], [-m * c, -m * s, j1]]
}

/// Radial integrals ∫ q dq/2π {(J0+J2), (J0−J2), J1}(qρ) e^{−qd} W(q, ω), with the overall 2πγ_e/c.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RadialIntegrals {
    pub plus: Complex64,
    pub minus: Complex64,
    pub d: Complex64,
}

impl RadialIntegrals {
    /// χ at azimuth φ: rows (ρ̂, φ̂), columns (S_x, S_y, S_d).
    pub fn matrix(&self, phi: f64) -> [[Complex64; 3]; 2] {
        let (s, c) = phi.sin_cos();
        let (p, m) = (self.plus * 0.5, self.minus * 0.5);
        let z = Complex64::new(0.0, 0.0);
        [[-p * s, p * c, z], [-m * c, -m * s, self.d]]
    }

    /// (J_ρ, J_φ) for the spin amplitudes (S_x, S_y, S_z).
    pub fn current(&self, phi: f64, s: [Complex64; 3]) -> [Complex64; 2] {
        let m = self.matrix(phi);
        [0, 1].map(|r| m[r][0] * s[0] + m[r][1] * s[1] + m[r][2] * s[2])
    }
}

/// Prefactor (2πγ_e/c)(e²ρ_e/m)/2π.
pub fn chi_prefactor(params: &PhysicalParams) -> f64 {
    params.gamma / C_LIGHT * diamagnetic_weight(params)
}

/// Kubo coefficient in units of e²ρ_e/m selected by mode and part.
pub(crate) fn kubo_weight(params: &PhysicalParams, q: f64, omega: f64, eval: &ResponseEvaluation) -> Complex64 {
    let (u, nu) = (q / (2.0 * params.k_f()), omega / (params.v_f * q));
    let (p, t) = match eval.mode {
        ResponseMode::Exact => kubo_dimensionless(u, nu),
        ResponseMode::SmallQ => kubo_small_q_dimensionless(nu),
    };
    match eval.part {
        ResponsePart::Paramagnetic => p,
        ResponsePart::Diamagnetic => Complex64::new(1.0, 0.0),
        ResponsePart::Total => t,
    }
}

/// Kinks of the Kubo coefficient in q at frequency ω.
pub(crate) fn kubo_kinks(params: &PhysicalParams, omega: f64) -> Vec<f64> {
    let w = omega.abs();
    if w == 0.0 {
        return vec![2.0 * params.k_f()];
    }
    support_breakpoints(params, w).unwrap_or_default()
}

/// Radial integrals at distance ρ and frequency ω by adaptive quadrature split at Bessel zeros and kinks.
pub fn chi_radial(params: &PhysicalParams, rho: f64, omega: f64, eval: &ResponseEvaluation) -> Result<RadialIntegrals> {
    params.validate()?;
    if !(rho >= 0.0 && rho.is_finite() && omega.is_finite()) {
        return Err(Error::Domain(format!("need finite rho >= 0 and omega, got rho={rho:e}, omega={omega:e}")));
    }
    let q_cut = eval.cutoff(params)?;
    let kinks = kubo_kinks(params, omega);
    let pts = hankel_partition(1, rho, 0.0, q_cut, &kinks, eval.spec.oscillation_splitting);
    let spec = eval.spec.with_max_subdivisions(eval.spec.max_subdivisions.max(4 * pts.len()));
    let d = params.d;
    let est = integrate_partitioned(
        |q| {
            let [j0, j1, j2] = j012(q * rho);
            let w = kubo_weight(params, q, omega, eval) * (q * (-q * d).exp());
            let (a, b, c) = (w * (j0 + j2), w * (j0 - j2), w * j1);
            [a.re, a.im, b.re, b.im, c.re, c.im]
        },
        &pts,
        &spec,
    )
    .map_err(|e| Error::GridPoint {
        rho,
        omega,
        source: Box::new(e),
    })?;
    let v = est.value;
    let pref = chi_prefactor(params);
    Ok(RadialIntegrals {
        plus: Complex64::new(v[0], v[1]) * pref,
        minus: Complex64::new(v[2], v[3]) * pref,
        d: Complex64::new(v[4], v[5]) * pref,
    })
}

/// χ_{αβ}(ρ, φ, ω).
pub fn chi(params: &PhysicalParams, rho: f64, phi: f64, omega: f64, eval: &ResponseEvaluation) -> Result<[[Complex64; 3]; 2]> {
    Ok(chi_radial(params, rho, omega, eval)?.matrix(phi))
}

/// Wave-zone paramagnetic response, valid for ρω/v_F ≫ 1.
pub fn chi_para_far_field(params: &PhysicalParams, rho: f64, phi: f64, omega: f64) -> [[Complex64; 3]; 2] {
    let amp = 2.0 * params.gamma / C_LIGHT * diamagnetic_weight(params) / (rho * rho);
    let phase = Complex64::from_polar(amp, omega * rho / params.v_f);
    let (s, c) = phi.sin_cos();
    let a = Complex64::new(0.0, params.v_f / (omega * rho));
    let z = Complex64::new(0.0, 0.0);
    [
        [phase * a * s, -phase * a * c, z],
        [-phase * c, -phase * s, phase * Complex64::new(0.0, -omega.signum())],
    ]
}

/// Diamagnetic response for ρ ≫ d.
pub fn chi_dia_far_field(params: &PhysicalParams, rho: f64, phi: f64) -> [[f64; 3]; 2] {
    let amp = -params.gamma / C_LIGHT * diamagnetic_weight(params) / (rho * rho);
    let (s, c) = phi.sin_cos();
    [[amp * s, -amp * c, 0.0], [-amp * c, -amp * s, -amp]]
}
