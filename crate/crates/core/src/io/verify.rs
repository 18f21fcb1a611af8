//! Cross-module consistency suite behind the `verify` command.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;

use crate::collective::{dtr_excited, g2_zero, macrospin_exact, macrospin_ode};
use crate::decay::DecayMatrix;
use crate::error::Result;
use crate::noise::oersted_noise_spin;
use crate::numerics::rng::SeededStream;
use crate::response::green::{kramers_kronig_re_g, landau_chi_analytic};
use crate::response::{g_complex, green_exact, kubo_coefficient, landau_chi, ResponseMode, ResponsePart};
use crate::units::{PhysicalParams, C_LIGHT, HBAR};

/// Fixed internal seed; the suite never depends on the command-line seed.
const SUITE_SEED: u64 = 0x5eed_0f_c0de;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Spin degeneracy fed to the noise side of the FDT check. 2 is physical.
    pub spin_degeneracy: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { spin_degeneracy: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when |value − target| ≤ tolerance.
    fn near(name: &'static str, value: f64, target: f64, tolerance: f64) -> Check {
        Check {
            name,
            value,
            target,
            tolerance,
            pass: (value - target).abs() <= tolerance && value.is_finite(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<28} value={:.6e} target={:.6e} tol={:.1e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.target,
            self.tolerance
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Largest relative mismatch between the Oersted noise and −(8π²/c²)e^{−2qd} Im G₀ᴿ at 200 points.
fn fdt_mismatch(params: &PhysicalParams, spin: f64) -> Result<f64> {
    let mut rng = SeededStream::new(SUITE_SEED, 1).rng();
    let (k_f, e_f) = (params.k_f(), params.e_f());
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let q = rng.random_range(0.01..2.5) * k_f;
        let omega = rng.random_range(0.001..1.5) * e_f / HBAR;
        let noise = oersted_noise_spin(params, omega, q, 1.0, spin)?;
        let fdt = -8.0 * PI * PI / (C_LIGHT * C_LIGHT) * (-2.0 * q * params.d).exp() * green_exact(params, q, omega)?.im;
        let scale = noise.abs().max(fdt.abs());
        if scale > 0.0 {
            worst = worst.max((noise - fdt).abs() / scale);
        }
    }
    Ok(worst)
}

fn kk_mismatch() -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..=60 {
        let x = -3.0 + 0.1 * i as f64 + 0.013;
        let re = g_complex(x).re;
        worst = worst.max((kramers_kronig_re_g(x)? - re).abs() / re.abs().max(1e-3));
    }
    Ok(worst)
}

fn random_psd(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    &a * a.transpose()
}

/// Fraction of 1000 random PSD matrices where sign(g² − 1) disagrees with sign(∂tR).
fn g2_dtr_disagreement() -> Result<f64> {
    let mut rng = SeededStream::new(SUITE_SEED, 2).rng();
    let mut bad = 0usize;
    for i in 0..1000 {
        let n = 2 + i % 11;
        let m = DecayMatrix::from_real(random_psd(&mut rng, n), 1.0);
        let (g2, dtr) = (g2_zero(&m)?, dtr_excited(&m));
        if (g2 - 1.0).signum() != dtr.signum() {
            bad += 1;
        }
    }
    Ok(bad as f64 / 1000.0)
}

/// Largest relative error of the Dicke-limit closed forms for N = 2..12.
fn dicke_mismatch() -> Result<f64> {
    let g0 = 1.0;
    let mut worst = 0.0f64;
    for n in 2..=12usize {
        let nf = n as f64;
        let diag = DecayMatrix::from_real(DMatrix::identity(n, n) * g0, g0);
        let full = DecayMatrix::from_real(DMatrix::from_element(n, n, g0), g0);
        let pairs = [
            (dtr_excited(&diag), -nf * g0 * g0),
            (dtr_excited(&full), nf * (nf - 2.0) * g0 * g0),
            (g2_zero(&diag)?, 1.0 - 1.0 / nf),
            (g2_zero(&full)?, 2.0 * (nf - 1.0) / nf),
        ];
        for (v, t) in pairs {
            let err = if t == 0.0 { v.abs() } else { ((v - t) / t).abs() };
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

/// Max |S_ode − S_exact|/N over t ∈ [0, 10/(Nγ0)] for N = 20, Δ = 100γ0.
fn macrospin_mismatch() -> Result<f64> {
    let (n, g0) = (20usize, 1.0e6);
    let delta = 100.0 * g0;
    let ts: Vec<f64> = (0..=400).map(|i| 10.0 / (n as f64 * g0) * i as f64 / 400.0).collect();
    let a = macrospin_ode(n, g0, delta, &ts)?;
    let b = macrospin_exact(n, g0, delta, &ts)?;
    let mut worst = 0.0f64;
    for i in 0..ts.len() {
        worst = worst
            .max((a.sx[i] - b.sx[i]).abs())
            .max((a.sy[i] - b.sy[i]).abs())
            .max((a.sz[i] - b.sz[i]).abs());
    }
    Ok(worst / n as f64)
}

/// |K(q, ω)|/(e²ρ_e/m) at q = 5·10⁻⁴ k_F, ω = (q/k_F)³ v_F k_F.
fn kubo_small(params: &PhysicalParams) -> Result<f64> {
    let k_f = params.k_f();
    let eps = 5e-4;
    let k = kubo_coefficient(params, eps * k_f, eps.powi(3) * params.v_f * k_f, ResponseMode::Exact, ResponsePart::Total)?;
    Ok(k.norm() / crate::response::green::diamagnetic_weight(params))
}

/// Runs every check. Numerical failures inside a check surface as errors.
pub fn run_verify(params: &PhysicalParams, opts: &VerifyOptions) -> Result<VerifyReport> {
    let landau = landau_chi(params)?;
    let landau_rel = ((landau.value - landau_chi_analytic(params)) / landau_chi_analytic(params)).abs();
    let ms = macrospin_mismatch()?;
    let checks = vec![
        Check::near("fdt_relative", fdt_mismatch(params, opts.spin_degeneracy)?, 0.0, 1e-6),
        Check::near("kramers_kronig_re_g", kk_mismatch()?, 0.0, 1e-3),
        Check::near("g2_dtr_sign_disagreement", g2_dtr_disagreement()?, 0.0, 0.0),
        Check::near("dicke_limits", dicke_mismatch()?, 0.0, 1e-12),
        Check::near("macrospin_ode_vs_exact", ms, 0.0, 1e-6),
        Check::near("landau_limit", landau_rel, 0.0, 1e-3),
        Check::near("kubo_small_q_omega", kubo_small(params)?, 0.0, 1e-6),
    ];
    Ok(VerifyReport { checks })
}
