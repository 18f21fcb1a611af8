//! Exact and small-q retarded current response of the 2D electron gas.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units::{PhysicalParams, C_LIGHT, E_CHARGE, HBAR, M_ELECTRON};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResponseMode {
    Exact,
    SmallQ,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResponsePart {
    Paramagnetic,
    Diamagnetic,
    Total,
}

/// Coefficients |binom(3/2, k)| for k ≥ 2, driving the large-|x| expansion of Re g.
fn series_coeffs() -> impl Iterator<Item = (f64, f64)> {
    (2..).scan(0.375, |c, k| {
        let cur = *c;
        *c *= (k as f64 - 1.5) / (k as f64 + 1.0);
        Some((k as f64, cur))
    })
}

/// Re g(x) for x ≥ 1.
fn re_g_outside(x: f64) -> f64 {
    if x < 2.0 {
        return x * x * x - 1.5 * x - (x * x - 1.0).powf(1.5);
    }
    let t = 1.0 / (x * x);
    let mut pow = 1.0 / x;
    let mut sum = 0.0;
    for (_, c) in series_coeffs() {
        let term = c * pow;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        pow *= t;
    }
    -sum
}

/// Re g′(x) for x ≥ 1.
fn re_g_prime_outside(x: f64) -> f64 {
    if x < 2.0 {
        return 3.0 * x * x - 1.5 - 3.0 * x * (x * x - 1.0).sqrt();
    }
    let t = 1.0 / (x * x);
    let mut pow = t;
    let mut sum = 0.0;
    for (k, c) in series_coeffs() {
        let term = c * (2.0 * k - 3.0) * pow;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        pow *= t;
    }
    sum
}

fn im_g(x: f64) -> f64 {
    if x.abs() < 1.0 {
        ((1.0 - x) * (1.0 + x)).powf(1.5)
    } else {
        0.0
    }
}

/// The piecewise function g(x): Re g = x³ − 3x/2 − sgn(x)(x²−1)^{3/2}Θ(x²−1), Im g = (1−x²)^{3/2}Θ(1−x²).
pub fn g_complex(x: f64) -> Complex64 {
    let re = if x.abs() < 1.0 {
        x * x * x - 1.5 * x
    } else {
        x.signum() * re_g_outside(x.abs())
    };
    Complex64::new(re, im_g(x))
}

/// dg/dx, one-sided (from inside the continuum) at |x| = 1.
pub fn g_prime(x: f64) -> Complex64 {
    let a = x.abs();
    if a <= 1.0 {
        Complex64::new(3.0 * x * x - 1.5, -3.0 * x * ((1.0 - x) * (1.0 + x)).sqrt())
    } else {
        Complex64::new(re_g_prime_outside(a), 0.0)
    }
}

/// Kubo coefficient in units of e²ρ_e/m as (paramagnetic, total), for u = q/2k_F > 0 and ν = ω/(v_F q).
pub fn kubo_dimensionless(u: f64, nu: f64) -> (Complex64, Complex64) {
    if nu < 0.0 {
        let (p, t) = kubo_dimensionless(u, -nu);
        return (p.conj(), t.conj());
    }
    let (xp, xm) = (nu + u, nu - u);
    let inv = 1.0 / (3.0 * u);
    if xm >= 1.0 {
        let p = Complex64::new(inv * (re_g_outside(xp) - re_g_outside(xm)), 0.0);
        return (p, p + 1.0);
    }
    let h = |x: f64| {
        if x.abs() > 1.0 {
            x.signum() * (x * x - 1.0).powf(1.5)
        } else {
            0.0
        }
    };
    // polynomial parts of g(x₊) − g(x₋) combined with the diamagnetic 1 without cancellation
    let re_total = (2.0 / 3.0) * (3.0 * nu * nu + u * u) - inv * (h(xp) - h(xm));
    let im = if xp < 1.0 {
        let a = (1.0 - xm) * (1.0 + xm);
        let b = (1.0 - xp) * (1.0 + xp);
        let (sa, sb) = (a.sqrt(), b.sqrt());
        -(4.0 * nu / 3.0) * (a + sa * sb + b) / (sa + sb)
    } else {
        inv * (im_g(xp) - im_g(xm))
    };
    (Complex64::new(re_total - 1.0, im), Complex64::new(re_total, im))
}

/// Small-q Kubo coefficient in units of e²ρ_e/m as (paramagnetic, total).
pub fn kubo_small_q_dimensionless(nu: f64) -> (Complex64, Complex64) {
    let gp = g_prime(nu);
    let p = gp * (2.0 / 3.0);
    if nu.abs() < 1.0 {
        (p, Complex64::new(2.0 * nu * nu, p.im))
    } else {
        (p, p + 1.0)
    }
}

fn check_q(q: f64, omega: f64) -> Result<()> {
    if q == 0.0 {
        return Err(Error::SingularInput("current response needs q > 0".into()));
    }
    if !(q > 0.0 && q.is_finite() && omega.is_finite()) {
        return Err(Error::Domain(format!("need finite q > 0 and finite omega, got q={q:e}, omega={omega:e}")));
    }
    Ok(())
}

fn scaled(params: &PhysicalParams, q: f64, omega: f64) -> (f64, f64) {
    (q / (2.0 * params.k_f()), omega / (params.v_f * q))
}

/// e²ρ_e/m.
pub fn diamagnetic_weight(params: &PhysicalParams) -> f64 {
    E_CHARGE * E_CHARGE * params.rho_e() / params.mass
}

/// Exact retarded correlator G₀ᴿ(q, ω) (erg).
pub fn green_exact(params: &PhysicalParams, q: f64, omega: f64) -> Result<Complex64> {
    check_q(q, omega)?;
    let (u, nu) = scaled(params, q, omega);
    Ok(kubo_dimensionless(u, nu).0 * (HBAR * diamagnetic_weight(params)))
}

/// Small-q approximation (e²ρ_e/m)(2ħ/3) g′(ω/v_F q).
pub fn green_smallq(params: &PhysicalParams, q: f64, omega: f64) -> Result<Complex64> {
    check_q(q, omega)?;
    let (_, nu) = scaled(params, q, omega);
    Ok(kubo_small_q_dimensionless(nu).0 * (HBAR * diamagnetic_weight(params)))
}

/// Kubo coefficient in units of e²ρ_e/m.
pub fn kubo_dimensionless_at(params: &PhysicalParams, q: f64, omega: f64, mode: ResponseMode, part: ResponsePart) -> Result<Complex64> {
    check_q(q, omega)?;
    let (u, nu) = scaled(params, q, omega);
    let (p, t) = match mode {
        ResponseMode::Exact => kubo_dimensionless(u, nu),
        ResponseMode::SmallQ => kubo_small_q_dimensionless(nu),
    };
    Ok(match part {
        ResponsePart::Paramagnetic => p,
        ResponsePart::Diamagnetic => Complex64::new(1.0, 0.0),
        ResponsePart::Total => t,
    })
}

/// (1/ħ)G₀ᴿ + e²ρ_e/m with part selection.
pub fn kubo_coefficient(params: &PhysicalParams, q: f64, omega: f64, mode: ResponseMode, part: ResponsePart) -> Result<Complex64> {
    Ok(kubo_dimensionless_at(params, q, omega, mode, part)? * diamagnetic_weight(params))
}

/// Re g(x) rebuilt from Im g by the principal-value Hilbert transform (1/π) PV∫ Im g(t)/(t−x) dt.
pub fn kramers_kronig_re_g(x: f64) -> Result<f64> {
    use crate::numerics::quad::{integrate_partitioned, QuadratureSpec};
    let spec = QuadratureSpec::default().with_rel_tol(1e-11);
    let fx = im_g(x);
    let mut pts = vec![-1.0, 1.0];
    if x.abs() < 1.0 {
        pts.insert(1, x);
    }
    // subtract the pole so the integrand stays bounded
    let smooth = integrate_partitioned(
        |t| {
            if t == x {
                0.0
            } else {
                (im_g(t) - fx) / (t - x)
            }
        },
        &pts,
        &spec,
    )?
    .value;
    let log = if fx != 0.0 { fx * ((1.0 - x) / (1.0 + x)).abs().ln() } else { 0.0 };
    Ok((smooth + log) / std::f64::consts::PI)
}

/// Static susceptibility from the q → 0 limit at ω = 0, with its extrapolation error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LandauLimit {
    pub value: f64,
    pub error: f64,
}

/// −e²/(12πmc²).
pub fn landau_chi_analytic(params: &PhysicalParams) -> f64 {
    -E_CHARGE * E_CHARGE / (12.0 * std::f64::consts::PI * params.mass * C_LIGHT * C_LIGHT)
}

/// Free-electron 2D spin susceptibility e²/(4π m_e c²).
pub fn pauli_chi() -> f64 {
    E_CHARGE * E_CHARGE / (4.0 * std::f64::consts::PI * M_ELECTRON * C_LIGHT * C_LIGHT)
}

/// Richardson extrapolation of −[(1/ħ)G₀ᴿ + e²ρ_e/m]/(c²q²) to q → 0 on q_k = 0.2 k_F ratioᵏ.
pub fn landau_chi_with_ratio(params: &PhysicalParams, ratio: f64) -> Result<LandauLimit> {
    params.validate()?;
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::invalid("ratio", "must lie in (0, 1)"));
    }
    const LEVELS: usize = 6;
    let weight = diamagnetic_weight(params);
    let mut hs = Vec::with_capacity(LEVELS);
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(LEVELS);
    let mut q = 0.2 * params.k_f();
    for _ in 0..LEVELS {
        let total = green_exact(params, q, 0.0)?.re / HBAR + weight;
        hs.push(q * q);
        table.push(vec![-total / (C_LIGHT * C_LIGHT * q * q)]);
        q *= ratio;
    }
    // Neville tableau in h = q²
    for i in 1..LEVELS {
        for j in 1..=i {
            let (a, b) = (table[i][j - 1], table[i - 1][j - 1]);
            let next = a + (a - b) * hs[i] / (hs[i - j] - hs[i]);
            table[i].push(next);
        }
    }
    let value = table[LEVELS - 1][LEVELS - 1];
    let error = (value - table[LEVELS - 1][LEVELS - 2])
        .abs()
        .max((value - table[LEVELS - 2][LEVELS - 2]).abs());
    if !value.is_finite() || error > 1e-6 * value.abs() {
        let seq: Vec<String> = table.iter().map(|r| format!("{:e}", r[0])).collect();
        return Err(Error::Extrapolation(format!(
            "Landau limit: estimate {value:e} with spread {error:e}; sequence [{}]",
            seq.join(", ")
        )));
    }
    Ok(LandauLimit { value, error })
}

pub fn landau_chi(params: &PhysicalParams) -> Result<LandauLimit> {
    landau_chi_with_ratio(params, 0.5)
}
