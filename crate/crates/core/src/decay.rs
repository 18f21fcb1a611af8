//! Nonlocal decay-rate matrices γ_nm, their spectra and single-excitation dynamics.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::noise::{oersted_prefactor, orientation_fourier, support_breakpoints, transverse_current_c};
use crate::numerics::eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen};
use crate::numerics::quad::{integrate_hankel_between, QuadratureSpec};
use crate::numerics::rng::{uniform_points, SeededStream};
use crate::units::{DipoleEnsemble, PhysicalParams};

/// Radial integral H_m(r) = (γ²/4) ∫ q dq/2π C^{−+}_{F=1}(Δ,q) J_m(q r), in Hz.
pub fn hankel_rate(params: &PhysicalParams, order: u32, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    params.validate()?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("separation must be finite and >= 0, got {r}")));
    }
    let omega = params.delta;
    let breaks = support_breakpoints(params, omega)
        .ok_or_else(|| Error::Domain("no particle-hole continuum at the dipole frequency".into()))?;
    let (a, b) = (breaks[0], breaks[breaks.len() - 1]);
    let pref = 0.25 * params.gamma_sq_eff() * oersted_prefactor(params) * params.k_f() / (2.0 * PI);
    let p = *params;
    integrate_hankel_between(
        |q| pref * transverse_current_c(&p, omega, q).unwrap_or(0.0),
        order,
        r,
        2.0 * params.d,
        a,
        b,
        &breaks[1..breaks.len() - 1],
        spec,
    )
    .map_err(|e| match e {
        Error::Convergence { context, best, error } => Error::Convergence {
            context: format!("gamma(r) at r={r:e} cm, delta={omega:e} rad/s: {context}"),
            best,
            error,
        },
        other => other,
    })
}

/// γ(r) for z-aligned dipoles (Hz).
pub fn gamma_r(params: &PhysicalParams, r: f64) -> Result<f64> {
    hankel_rate(params, 0, r, &QuadratureSpec::default())
}

/// Independent rate γ0 = γ(0).
pub fn gamma0(params: &PhysicalParams) -> Result<f64> {
    gamma_r(params, 0.0)
}

/// Tabulated H_m(r) with 4-point Lagrange interpolation in ln r.
///
/// The grid starts as 2048 log-spaced nodes on [1e-3 λ_F, r_max] and is refined by
/// bisection until the interpolant matches direct quadrature at every midpoint to
/// `tol` (absolute, Hz). Outside the table the value is computed directly.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    params: PhysicalParams,
    order: u32,
    ln_r: Vec<f64>,
    values: Vec<f64>,
    tol: f64,
    spec: QuadratureSpec,
}

fn lagrange4(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        let mut w = 1.0;
        for j in 0..4 {
            if i != j {
                w *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        s += w * ys[i];
    }
    s
}

impl RadialProfile {
    pub fn build(params: &PhysicalParams, order: u32, r_max: f64, rel_tol: f64) -> Result<Self> {
        let spec = QuadratureSpec::default().with_rel_tol(1e-10).with_max_subdivisions(20_000);
        let g0 = hankel_rate(params, 0, 0.0, &spec)?;
        let tol = rel_tol * g0;
        let r_min = 1e-3 * params.lambda_f();
        let r_max = r_max.max(10.0 * r_min);
        let n0 = 2048;
        let (l0, l1) = (r_min.ln(), r_max.ln());
        let mut ln_r: Vec<f64> = (0..n0).map(|i| l0 + (l1 - l0) * i as f64 / (n0 - 1) as f64).collect();
        let eval = |lr: &[f64]| -> Result<Vec<f64>> { lr.par_iter().map(|&x| hankel_rate(params, order, x.exp(), &spec)).collect() };
        let mut values = eval(&ln_r)?;
        // intervals still to be checked, by left node index
        let mut pending: Vec<usize> = (0..n0 - 1).collect();
        let min_width = 1e-7;
        for _pass in 0..40 {
            if pending.is_empty() {
                break;
            }
            let mids: Vec<f64> = pending.iter().map(|&i| 0.5 * (ln_r[i] + ln_r[i + 1])).collect();
            let mid_vals = eval(&mids)?;
            let mut failed = vec![false; pending.len()];
            for (k, &i) in pending.iter().enumerate() {
                let lo = i.saturating_sub(1).min(ln_r.len() - 4);
                let guess = lagrange4(&ln_r[lo..lo + 4], &values[lo..lo + 4], mids[k]);
                failed[k] = (guess - mid_vals[k]).abs() > tol && ln_r[i + 1] - ln_r[i] > min_width;
            }
            // merge midpoints into the grid and collect children of failed intervals
            let mut new_ln = Vec::with_capacity(ln_r.len() + mids.len());
            let mut new_val = Vec::with_capacity(ln_r.len() + mids.len());
            let mut next = Vec::new();
            let mut k = 0;
            for i in 0..ln_r.len() {
                new_ln.push(ln_r[i]);
                new_val.push(values[i]);
                if k < pending.len() && pending[k] == i {
                    if failed[k] {
                        next.push(new_ln.len() - 1);
                        next.push(new_ln.len());
                    }
                    new_ln.push(mids[k]);
                    new_val.push(mid_vals[k]);
                    k += 1;
                }
            }
            ln_r = new_ln;
            values = new_val;
            pending = next;
        }
        if !pending.is_empty() {
            return Err(Error::Convergence {
                context: format!("radial profile order {order}: {} intervals unresolved", pending.len()),
                best: 0.0,
                error: tol,
            });
        }
        Ok(RadialProfile {
            params: *params,
            order,
            ln_r,
            values,
            tol,
            spec,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn nodes(&self) -> usize {
        self.ln_r.len()
    }

    /// Absolute interpolation tolerance (Hz).
    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn r_max(&self) -> f64 {
        self.ln_r[self.ln_r.len() - 1].exp()
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return if self.order == 0 {
                hankel_rate(&self.params, 0, 0.0, &self.spec)
            } else {
                Ok(0.0)
            };
        }
        let x = r.ln();
        let n = self.ln_r.len();
        if !(x >= self.ln_r[0] && x <= self.ln_r[n - 1]) {
            return hankel_rate(&self.params, self.order, r, &self.spec);
        }
        let i = self.ln_r.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
        let lo = i.saturating_sub(1).min(n - 4);
        Ok(lagrange4(&self.ln_r[lo..lo + 4], &self.values[lo..lo + 4], x))
    }
}

/// Tables needed to assemble a decay matrix: order 0 always, orders 1 and 2 for tilted dipoles.
#[derive(Clone, Debug)]
pub struct DecayProfiles {
    pub gamma0: f64,
    profiles: Vec<RadialProfile>,
}

pub const PROFILE_REL_TOL: f64 = 2e-9;

impl DecayProfiles {
    pub fn build(params: &PhysicalParams, r_max: f64, with_tilt: bool) -> Result<Self> {
        let orders: &[u32] = if with_tilt { &[0, 1, 2] } else { &[0] };
        let profiles = orders
            .iter()
            .map(|&m| RadialProfile::build(params, m, r_max, PROFILE_REL_TOL))
            .collect::<Result<Vec<_>>>()?;
        let gamma0 = profiles[0].eval(0.0)?;
        Ok(DecayProfiles { gamma0, profiles })
    }

    pub fn h(&self, order: u32, r: f64) -> Result<f64> {
        self.profiles
            .get(order as usize)
            .ok_or_else(|| Error::invalid("order", format!("profile of order {order} was not built")))?
            .eval(r)
    }

    pub fn profile(&self, order: u32) -> Option<&RadialProfile> {
        self.profiles.get(order as usize)
    }
}

/// N×N Hermitian decay-rate matrix (Hz) with lazily computed spectrum.
#[derive(Debug)]
pub struct DecayMatrix {
    pub rates: DMatrix<Complex64>,
    pub gamma0: f64,
    /// Eigenvalues in [−psd_tolerance·γ0, 0) are clamped to zero; lower ones are an error.
    pub psd_tolerance: f64,
    spectrum: OnceLock<Vec<f64>>,
    eigen: OnceLock<HermitianEigen>,
}

impl Clone for DecayMatrix {
    fn clone(&self) -> Self {
        DecayMatrix::new(self.rates.clone(), self.gamma0).with_psd_tolerance(self.psd_tolerance)
    }
}

impl DecayMatrix {
    pub fn new(rates: DMatrix<Complex64>, gamma0: f64) -> Self {
        DecayMatrix {
            rates,
            gamma0,
            psd_tolerance: 1e-8,
            spectrum: OnceLock::new(),
            eigen: OnceLock::new(),
        }
    }

    pub fn from_real(rates: DMatrix<f64>, gamma0: f64) -> Self {
        Self::new(rates.map(|x| Complex64::new(x, 0.0)), gamma0)
    }

    /// Real matrix from row vectors.
    pub fn from_rows(rows: &[Vec<f64>], gamma0: f64) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Size("decay matrix rows must form a square matrix".into()));
        }
        Ok(Self::from_real(DMatrix::from_fn(n, n, |i, j| rows[i][j]), gamma0))
    }

    pub fn with_psd_tolerance(mut self, tol: f64) -> Self {
        self.psd_tolerance = tol;
        self
    }

    pub fn len(&self) -> usize {
        self.rates.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.nrows() == 0
    }

    fn clamp(&self, mut values: Vec<f64>) -> Result<Vec<f64>> {
        let floor = self.psd_tolerance * self.gamma0.abs();
        let mut clamped = 0;
        for v in values.iter_mut() {
            if *v < 0.0 {
                if *v < -floor {
                    return Err(Error::NotPsd { value: *v, tolerance: floor });
                }
                *v = 0.0;
                clamped += 1;
            }
        }
        if clamped > 0 {
            log::debug!("clamped {clamped} slightly negative eigenvalues to zero");
        }
        Ok(values)
    }

    /// Ascending eigenvalues (Hz), clamped to be non-negative.
    pub fn spectrum(&self) -> Result<&[f64]> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let values = match self.eigen.get() {
            Some(e) => e.values.clone(),
            None => hermitian_eigenvalues(&self.rates)?,
        };
        let values = self.clamp(values)?;
        Ok(self.spectrum.get_or_init(|| values))
    }

    /// Full eigendecomposition (eigenvalues not clamped).
    pub fn eigen(&self) -> Result<&HermitianEigen> {
        if let Some(e) = self.eigen.get() {
            return Ok(e);
        }
        let e = hermitian_eigen(&self.rates)?;
        self.clamp(e.values.clone())?;
        Ok(self.eigen.get_or_init(|| e))
    }

    /// Participation ratio 1/Σ|v_n|⁴ of every eigenvector, in eigenvalue order.
    pub fn participation_ratios(&self) -> Result<Vec<f64>> {
        let e = self.eigen()?;
        Ok((0..self.len())
            .map(|k| 1.0 / e.vectors.column(k).iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>())
            .collect())
    }
}

fn max_separation(ensemble: &DipoleEnsemble) -> f64 {
    let p = ensemble.positions();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for x in p {
        for a in 0..2 {
            lo[a] = lo[a].min(x[a]);
            hi[a] = hi[a].max(x[a]);
        }
    }
    ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt()
}

fn pair_rate<H: Fn(u32, f64) -> Result<f64>>(
    h: &H,
    f: &[Complex64; 5],
    dx: f64,
    dy: f64,
    z_aligned: bool,
) -> Result<Complex64> {
    let r = (dx * dx + dy * dy).sqrt();
    if z_aligned {
        return Ok(f[2] * h(0, r)?);
    }
    let theta = dy.atan2(dx);
    let mut s = f[2] * h(0, r)?;
    if r > 0.0 {
        let i = Complex64::i();
        for k in [1i32, 2] {
            let hk = h(k as u32, r)?;
            let ik = i.powi(k);
            let plus = f[(2 + k) as usize] * ik * Complex64::from_polar(1.0, k as f64 * theta);
            // J_{−k} = (−1)^k J_k and i^{−k}
            let minus = f[(2 - k) as usize] * ik.inv() * Complex64::from_polar(1.0, -(k as f64) * theta) * (-1f64).powi(k);
            s += (plus + minus) * hk;
        }
    }
    Ok(s)
}

fn assemble<H: Fn(u32, f64) -> Result<f64> + Sync>(ensemble: &DipoleEnsemble, gamma0: f64, h: H) -> Result<DecayMatrix> {
    let n = ensemble.len();
    let pos = ensemble.positions();
    let tri = ensemble.orientations();
    let z = ensemble.all_z_aligned();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            (a..n)
                .map(|b| {
                    let f = orientation_fourier(&tri[a], &tri[b]);
                    pair_rate(&h, &f, pos[a][0] - pos[b][0], pos[a][1] - pos[b][1], z).map_err(|e| match e {
                        Error::Convergence { context, best, error } => Error::Convergence {
                            context: format!("matrix entry ({a}, {b}): {context}"),
                            best,
                            error,
                        },
                        other => other,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut m = DMatrix::zeros(n, n);
    for (a, row) in rows.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            let b = a + k;
            m[(a, b)] = v;
            m[(b, a)] = v.conj();
        }
        m[(a, a)].im = 0.0;
    }
    Ok(DecayMatrix::new(m, gamma0))
}

/// Builds γ_nm from precomputed radial profiles.
pub fn build_matrix_with(ensemble: &DipoleEnsemble, profiles: &DecayProfiles) -> Result<DecayMatrix> {
    let n = ensemble.len() as f64;
    let tol = profiles.profile(0).map_or(0.0, |p| p.tolerance());
    let psd = (1e-8f64).max(4.0 * n * tol / profiles.gamma0);
    Ok(assemble(ensemble, profiles.gamma0, |k, r| profiles.h(k, r))?.with_psd_tolerance(psd))
}

/// Builds γ_nm, tabulating the radial integrals out to the largest separation.
pub fn build_matrix(ensemble: &DipoleEnsemble, params: &PhysicalParams) -> Result<DecayMatrix> {
    let r_max = max_separation(ensemble) * 1.01;
    let profiles = DecayProfiles::build(params, r_max, !ensemble.all_z_aligned())?;
    build_matrix_with(ensemble, &profiles)
}

/// Builds γ_nm with one quadrature per entry (no interpolation).
pub fn build_matrix_direct(ensemble: &DipoleEnsemble, params: &PhysicalParams, spec: &QuadratureSpec) -> Result<DecayMatrix> {
    let g0 = hankel_rate(params, 0, 0.0, spec)?;
    assemble(ensemble, g0, |k, r| hankel_rate(params, k, r, spec))
}

/// Disorder-averaged single-excitation statistics at one spacing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubradianceStats {
    /// Spacing a in units of λ_F (density a⁻²).
    pub spacing: f64,
    pub realizations: usize,
    pub threshold: f64,
    /// ⟨γ_min⟩/γ0.
    pub mean_min_rate: f64,
    /// Fraction of eigenvalues below θγ0, averaged over realizations.
    pub dark_fraction: f64,
    pub mean_min_rate_stderr: f64,
    pub dark_fraction_stderr: f64,
}

/// Stream index of realization `r` at spacing index `s`.
pub fn realization_stream(seed: u64, spacing_index: usize, realization: usize) -> SeededStream {
    SeededStream::new(seed, ((spacing_index as u64) << 32) | realization as u64)
}

/// Random positions of one disorder realization: N uniform points in a square of side √N·a.
pub fn realization_positions(params: &PhysicalParams, n: usize, spacing: f64, stream: SeededStream) -> Result<Vec<[f64; 2]>> {
    let side = (n as f64).sqrt() * spacing * params.lambda_f();
    uniform_points(stream, n, side)
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn disorder_sweep(
    params: &PhysicalParams,
    n: usize,
    spacings: &[f64],
    realizations: usize,
    threshold: f64,
    seed: u64,
) -> Result<Vec<SubradianceStats>> {
    if n < 2 {
        return Err(Error::invalid("n", "disorder sweep needs at least two dipoles"));
    }
    if realizations == 0 {
        return Err(Error::invalid("realizations", "need at least one realization"));
    }
    if spacings.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
        return Err(Error::invalid("spacings", "spacings must be positive"));
    }
    if !(threshold > 0.0) {
        return Err(Error::invalid("threshold", "must be positive"));
    }
    let a_max = spacings.iter().fold(0.0f64, |m, &a| m.max(a));
    let r_max = 2f64.sqrt() * (n as f64).sqrt() * a_max * params.lambda_f() * 1.01;
    let profiles = DecayProfiles::build(params, r_max, false)?;
    let jobs: Vec<(usize, usize)> = (0..spacings.len()).flat_map(|s| (0..realizations).map(move |r| (s, r))).collect();
    let results: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|&(s, r)| {
            let run = || -> Result<(f64, f64)> {
                let pos = realization_positions(params, n, spacings[s], realization_stream(seed, s, r))?;
                let ens = DipoleEnsemble::z_aligned(pos)?;
                let m = build_matrix_with(&ens, &profiles)?;
                let g0 = m.gamma0;
                let spec = m.spectrum()?;
                let dark = spec.iter().filter(|&&v| v < threshold * g0).count() as f64 / n as f64;
                Ok((spec[0] / g0, dark))
            };
            run().map_err(|e| Error::Realization {
                spacing: spacings[s],
                realization: r,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    Ok(spacings
        .iter()
        .enumerate()
        .map(|(s, &a)| {
            let chunk = &results[s * realizations..(s + 1) * realizations];
            let mins: Vec<f64> = chunk.iter().map(|c| c.0).collect();
            let darks: Vec<f64> = chunk.iter().map(|c| c.1).collect();
            let (m, me) = mean_and_stderr(&mins);
            let (d, de) = mean_and_stderr(&darks);
            SubradianceStats {
                spacing: a,
                realizations,
                threshold,
                mean_min_rate: m,
                dark_fraction: d,
                mean_min_rate_stderr: me,
                dark_fraction_stderr: de,
            }
        })
        .collect())
}

/// ψ(t) = exp(−γᵀt/2) ψ0 and the excited population P1(t) = Σ|ψ_n|².
pub fn single_excitation_evolve(m: &DecayMatrix, psi0: &[Complex64], t: f64) -> Result<(Vec<Complex64>, f64)> {
    if psi0.len() != m.len() {
        return Err(Error::invalid("psi0", format!("length {} does not match N = {}", psi0.len(), m.len())));
    }
    let norm: f64 = psi0.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("psi0", format!("must be normalized, |psi0|^2 = {norm}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", "must be finite and >= 0"));
    }
    let e = m.eigen()?;
    let n = m.len();
    // γᵀ = conj(V) Λ Vᵀ
    let mut coeff = vec![Complex64::new(0.0, 0.0); n];
    for (k, c) in coeff.iter_mut().enumerate() {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..n {
            s += e.vectors[(j, k)] * psi0[j];
        }
        *c = s * (-0.5 * e.values[k].max(0.0) * t).exp();
    }
    let psi: Vec<Complex64> = (0..n)
        .map(|j| (0..n).map(|k| e.vectors[(j, k)].conj() * coeff[k]).sum())
        .collect();
    let p1 = psi.iter().map(|z| z.norm_sqr()).sum();
    Ok((psi, p1))
}
