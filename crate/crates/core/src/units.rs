//! Physical constants (CGS-Gaussian), electron-gas parameters and dipole ensembles.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const HBAR: f64 = 1.054571817e-27;
pub const C_LIGHT: f64 = 2.99792458e10;
pub const E_CHARGE: f64 = 4.80320471e-10;
pub const M_ELECTRON: f64 = 9.1093837015e-28;

/// How the two-level dipole is embedded in the physical spin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    SpinHalf,
    /// Two-level subset of the NV triplet; transverse coupling enhanced by √2.
    NvTwoLevel,
}

impl Projection {
    /// Multiplier applied to every noise-driven decay rate.
    pub fn rate_factor(self) -> f64 {
        match self {
            Projection::SpinHalf => 1.0,
            Projection::NvTwoLevel => 2.0,
        }
    }
}

impl FromStr for Projection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spin-half" => Ok(Projection::SpinHalf),
            "nv-two-level" => Ok(Projection::NvTwoLevel),
            other => Err(Error::invalid(
                "projection",
                format!("`{other}` is not one of spin-half, nv-two-level"),
            )),
        }
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Projection::SpinHalf => "spin-half",
            Projection::NvTwoLevel => "nv-two-level",
        })
    }
}

/// Electron-gas and dipole parameters.
///
/// `delta` is an angular frequency (rad/s) and `gamma` a gyromagnetic ratio in rad/(s·G).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams {
    pub v_f: f64,
    pub mass: f64,
    pub d: f64,
    pub delta: f64,
    pub gamma: f64,
    pub projection: Projection,
}

/// Fermi-surface quantities derived from `PhysicalParams`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Derived {
    pub k_f: f64,
    pub lambda_f: f64,
    pub e_f: f64,
    pub rho_e: f64,
}

impl PhysicalParams {
    pub fn new(v_f: f64, mass: f64, d: f64, delta: f64, gamma: f64, projection: Projection) -> Result<Self> {
        let p = PhysicalParams {
            v_f,
            mass,
            d,
            delta,
            gamma,
            projection,
        };
        p.validate()?;
        Ok(p)
    }

    /// Free electron mass, v_F = 1e8 cm/s, Δ = 2π·1.2 GHz, γ_e = 2π·2.8 MHz/G, d = 0.
    pub fn standard() -> Self {
        PhysicalParams {
            v_f: 1e8,
            mass: 9.1e-28,
            d: 0.0,
            delta: 2.0 * PI * 1.2e9,
            gamma: 2.0 * PI * 2.8e6,
            projection: Projection::SpinHalf,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(field, format!("must be positive and finite, got {v}")))
            }
        };
        positive("v_f", self.v_f)?;
        positive("mass", self.mass)?;
        positive("delta", self.delta)?;
        positive("gamma", self.gamma)?;
        if !(self.d.is_finite() && self.d >= 0.0) {
            return Err(Error::invalid("d", format!("must be non-negative and finite, got {}", self.d)));
        }
        Ok(())
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_d(mut self, d: f64) -> Self {
        self.d = d;
        self
    }

    pub fn k_f(&self) -> f64 {
        self.mass * self.v_f / HBAR
    }

    pub fn lambda_f(&self) -> f64 {
        1.0 / self.k_f()
    }

    pub fn e_f(&self) -> f64 {
        0.5 * HBAR * self.k_f() * self.v_f
    }

    pub fn rho_e(&self) -> f64 {
        let k = self.k_f();
        k * k / (2.0 * PI)
    }

    /// Effective gyromagnetic ratio squared entering decay rates.
    pub fn gamma_sq_eff(&self) -> f64 {
        self.gamma * self.gamma * self.projection.rate_factor()
    }
}

pub fn derive(params: &PhysicalParams) -> Result<Derived> {
    params.validate()?;
    let k_f = params.k_f();
    let out = Derived {
        k_f,
        lambda_f: 1.0 / k_f,
        e_f: params.e_f(),
        rho_e: params.rho_e(),
    };
    for (name, v) in [("k_f", out.k_f), ("lambda_f", out.lambda_f), ("e_f", out.e_f), ("rho_e", out.rho_e)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::invalid(name, format!("derived value {v} is not positive and finite")));
        }
    }
    Ok(out)
}

/// q_ω = √(2mω/ħ).
pub fn q_omega(params: &PhysicalParams, omega: f64) -> f64 {
    (2.0 * params.mass * omega.abs() / HBAR).sqrt()
}

/// Returns (E(q,ω), q_ω) with E = ħ²(q_ω² − q²)²/(8mq²).
pub fn resonance_energy(params: &PhysicalParams, q: f64, omega: f64) -> Result<(f64, f64)> {
    if q == 0.0 {
        return Err(Error::SingularInput("resonance energy at q = 0".into()));
    }
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain(format!("q must be positive, got {q}")));
    }
    if omega < 0.0 {
        return Err(Error::Domain(format!("omega must be non-negative, got {omega}")));
    }
    let qw = q_omega(params, omega);
    let diff = (qw - q) * (qw + q);
    Ok((HBAR * HBAR * diff * diff / (8.0 * params.mass * q * q), qw))
}

/// Open interval of q on which E(q,ω) < E_F, for ω > 0.
///
/// E < E_F ⇔ |q_ω² − q²| < 2k_F q, whose positive solutions are
/// q_ω²/(k_F + √(k_F² + q_ω²)) < q < k_F + √(k_F² + q_ω²).
pub fn continuum_support(params: &PhysicalParams, omega: f64) -> Option<(f64, f64)> {
    if !(omega > 0.0) {
        return None;
    }
    let k = params.k_f();
    let qw = q_omega(params, omega);
    let root = (k * k + qw * qw).sqrt();
    Some((qw * qw / (k + root), k + root))
}

/// Right-handed orthonormal frame (x̂, ŷ, ẑ) of a dipole; ẑ is the quantization axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triad {
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub z: [f64; 3],
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

impl Triad {
    /// Dipole axis along the plane normal.
    pub const Z_ALIGNED: Triad = Triad {
        x: [1.0, 0.0, 0.0],
        y: [0.0, 1.0, 0.0],
        z: [0.0, 0.0, 1.0],
    };

    pub fn new(x: [f64; 3], y: [f64; 3], z: [f64; 3]) -> Result<Self> {
        let t = Triad { x, y, z };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let tol = 1e-12;
        let (x, y, z) = (self.x, self.y, self.z);
        let checks = [
            dot(x, x) - 1.0,
            dot(y, y) - 1.0,
            dot(z, z) - 1.0,
            dot(x, y),
            dot(y, z),
            dot(z, x),
        ];
        if checks.iter().any(|c| !(c.abs() <= tol)) {
            return Err(Error::invalid("orientation", "triad is not orthonormal to 1e-12"));
        }
        let c = cross(x, y);
        if !((0..3).all(|i| (c[i] - z[i]).abs() <= 1e-10)) {
            return Err(Error::invalid("orientation", "triad is not right-handed"));
        }
        Ok(())
    }

    pub fn is_z_aligned(&self) -> bool {
        (self.z[2] - 1.0).abs() <= 1e-12
    }
}

/// Positions (cm) and orientation triads of N dipoles.
#[derive(Clone, Debug, PartialEq)]
pub struct DipoleEnsemble {
    positions: Vec<[f64; 2]>,
    orientations: Vec<Triad>,
}

impl DipoleEnsemble {
    pub fn new(positions: Vec<[f64; 2]>, orientations: Vec<Triad>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("positions", "ensemble needs at least one dipole"));
        }
        if positions.len() != orientations.len() {
            return Err(Error::invalid(
                "orientations",
                format!("{} orientations for {} positions", orientations.len(), positions.len()),
            ));
        }
        if positions.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::invalid("positions", "non-finite coordinate"));
        }
        for t in &orientations {
            t.validate()?;
        }
        Ok(DipoleEnsemble { positions, orientations })
    }

    pub fn z_aligned(positions: Vec<[f64; 2]>) -> Result<Self> {
        let n = positions.len();
        Self::new(positions, vec![Triad::Z_ALIGNED; n])
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn orientations(&self) -> &[Triad] {
        &self.orientations
    }

    pub fn all_z_aligned(&self) -> bool {
        self.orientations.iter().all(Triad::is_z_aligned)
    }
}
