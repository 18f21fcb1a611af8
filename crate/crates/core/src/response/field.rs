//! Spin spectra of the decaying macrospin and the radiated current wave in the plane.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::chi::{chi_prefactor, kubo_kinks, kubo_weight, RadialIntegrals, ResponseEvaluation};
use super::green::{ResponseMode, ResponsePart};
use crate::error::{Error, Result};
use crate::numerics::bessel::j012;
use crate::numerics::fft::fft_forward;
use crate::numerics::quad::composite_gauss_legendre;
use crate::units::{PhysicalParams, HBAR};

/// Symmetric FFT grid: `n` samples spaced `dt`, bins ω_k = 2πk/(n·dt) in FFT order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyGrid {
    n: usize,
    dt: f64,
}

impl FrequencyGrid {
    pub fn new(n: usize, dt: f64) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::Size(format!("frequency grid length {n} must be a power of two >= 4")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("dt", "must be positive and finite"));
        }
        Ok(FrequencyGrid { n, dt })
    }

    /// Smallest power-of-two grid with resolution Nγ0/16 and span ≥ 8Δ.
    pub fn for_macrospin(n_dipoles: usize, gamma0: f64, delta: f64) -> Result<Self> {
        check_drive(n_dipoles, gamma0, delta)?;
        let d_omega = n_dipoles as f64 * gamma0 / 16.0;
        let n = ((8.0 * delta.abs() / d_omega).ceil() as usize).next_power_of_two().max(256);
        FrequencyGrid::new(n, 2.0 * PI / (n as f64 * d_omega))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn d_omega(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.dt)
    }

    pub fn span(&self) -> f64 {
        2.0 * PI / self.dt
    }

    /// Period T = n·dt of the time window [−T/2, T/2).
    pub fn window(&self) -> f64 {
        self.n as f64 * self.dt
    }

    pub fn omega(&self, k: usize) -> f64 {
        crate::numerics::fft::bin_frequency(k, self.n, self.dt)
    }

    /// Sample time of index j, wrapped so the second half is negative.
    pub fn time(&self, j: usize) -> f64 {
        if j < self.n / 2 {
            j as f64 * self.dt
        } else {
            (j as f64 - self.n as f64) * self.dt
        }
    }

    /// Errors unless span ≥ 8|Δ| and resolution ≤ Nγ0/16.
    pub fn check(&self, n_dipoles: usize, gamma0: f64, delta: f64) -> Result<()> {
        check_drive(n_dipoles, gamma0, delta)?;
        if self.span() < 8.0 * delta.abs() {
            return Err(Error::Resolution(format!(
                "span {:e} rad/s is below 8 delta = {:e}",
                self.span(),
                8.0 * delta.abs()
            )));
        }
        let need = n_dipoles as f64 * gamma0 / 16.0;
        if self.d_omega() > need * (1.0 + 1e-12) {
            return Err(Error::Resolution(format!(
                "resolution {:e} rad/s is coarser than N gamma0/16 = {need:e}",
                self.d_omega()
            )));
        }
        Ok(())
    }
}

fn check_drive(n_dipoles: usize, gamma0: f64, delta: f64) -> Result<()> {
    if n_dipoles == 0 {
        return Err(Error::invalid("n", "need at least one dipole"));
    }
    if !(gamma0 > 0.0 && gamma0.is_finite()) {
        return Err(Error::invalid("gamma0", "must be positive and finite"));
    }
    if !delta.is_finite() {
        return Err(Error::invalid("delta", "must be finite"));
    }
    Ok(())
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// ⟨S(ω)⟩ = ∫dt e^{iωt}⟨S(t)⟩ of the exact macrospin solution (ħ units · s), bins in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinSpectrum {
    pub grid: FrequencyGrid,
    pub n_dipoles: usize,
    pub gamma0: f64,
    pub delta: f64,
    pub sx: Vec<Complex64>,
    pub sy: Vec<Complex64>,
    /// Dynamic (odd) part; the ω = 0 bin is set to zero.
    pub sz: Vec<Complex64>,
}

impl SpinSpectrum {
    /// S⁺(ω) = (π/γ0) sech(π(ω−Δ)/(Nγ0)).
    pub fn s_plus(&self, omega: f64) -> f64 {
        PI / self.gamma0 * sech(PI * (omega - self.delta) / (self.n_dipoles as f64 * self.gamma0))
    }

    /// S⁻(ω) = (π/γ0) sech(π(ω+Δ)/(Nγ0)).
    pub fn s_minus(&self, omega: f64) -> f64 {
        PI / self.gamma0 * sech(PI * (omega + self.delta) / (self.n_dipoles as f64 * self.gamma0))
    }

    /// Largest nonnegative bin index whose amplitude exceeds `floor` times the peak.
    pub fn significant_bins(&self, floor: f64) -> usize {
        let mag = |k: usize| self.sx[k].norm().max(self.sy[k].norm()).max(self.sz[k].norm());
        let peak = (0..self.grid.len() / 2).map(mag).fold(0.0, f64::max);
        (0..self.grid.len() / 2).filter(|&k| mag(k) > floor * peak).max().unwrap_or(0)
    }
}

pub fn spin_spectrum(n_dipoles: usize, gamma0: f64, delta: f64, grid: FrequencyGrid) -> Result<SpinSpectrum> {
    grid.check(n_dipoles, gamma0, delta)?;
    let n = grid.len();
    let mut spec = SpinSpectrum {
        grid,
        n_dipoles,
        gamma0,
        delta,
        sx: vec![Complex64::new(0.0, 0.0); n],
        sy: vec![Complex64::new(0.0, 0.0); n],
        sz: vec![Complex64::new(0.0, 0.0); n],
    };
    for k in 0..n {
        let w = grid.omega(k);
        let (p, m) = (spec.s_plus(w), spec.s_minus(w));
        spec.sx[k] = Complex64::new(0.5 * (p + m), 0.0);
        spec.sy[k] = Complex64::new(0.0, -0.5 * (p - m));
    }
    // S_z from the transform of its localized derivative, divided by −iω
    let alpha = 0.5 * n_dipoles as f64 * gamma0;
    let deriv: Vec<Complex64> = (0..n)
        .map(|j| {
            let s = sech(alpha * grid.time(j));
            Complex64::new(-0.5 * n_dipoles as f64 * alpha * s * s, 0.0)
        })
        .collect();
    let ft = fft_forward(&deriv)?;
    for k in 1..n {
        spec.sz[k] = ft[k] * grid.dt() * Complex64::new(0.0, 1.0 / grid.omega(k));
    }
    Ok(spec)
}

/// Uniform polar grid: ρ from `rho_min` to `rho_max` inclusive, φ_j = 2πj/n_phi.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarGrid {
    pub rho: Vec<f64>,
    pub phi: Vec<f64>,
}

impl PolarGrid {
    pub fn new(rho_min: f64, rho_max: f64, n_rho: usize, n_phi: usize) -> Result<Self> {
        if !(rho_min > 0.0 && rho_max > rho_min && rho_max.is_finite()) {
            return Err(Error::invalid("rho", format!("need 0 < rho_min < rho_max, got [{rho_min:e}, {rho_max:e}]")));
        }
        if n_rho < 2 || n_phi < 4 {
            return Err(Error::invalid("grid", "need at least 2 radii and 4 azimuths"));
        }
        let h = (rho_max - rho_min) / (n_rho - 1) as f64;
        Ok(PolarGrid {
            rho: (0..n_rho).map(|i| rho_min + i as f64 * h).collect(),
            phi: (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect(),
        })
    }
}

/// One snapshot of the in-plane current (statampere/cm), indexed `i_rho * n_phi + i_phi`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurrentFrame {
    pub time: f64,
    pub grid: PolarGrid,
    pub j_rho: Vec<f64>,
    pub j_phi: Vec<f64>,
}

impl CurrentFrame {
    pub fn at(&self, i_rho: usize, i_phi: usize) -> (f64, f64) {
        let k = i_rho * self.grid.phi.len() + i_phi;
        (self.j_rho[k], self.j_phi[k])
    }
}

/// Tuning of the fixed-node radial quadrature shared by all grid radii and frequencies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldOptions {
    /// Gauss–Legendre nodes per panel.
    pub nodes_per_panel: usize,
    /// Panel width in units of 1/ρ_max.
    pub panel_phase: f64,
    /// Geometric refinement levels (factor 4) on each side of every Kubo kink.
    pub grading_levels: usize,
    /// Spectral bins below this fraction of the peak amplitude are dropped.
    pub spectral_floor: f64,
    /// Quadrature nodes per matrix-product block.
    pub block: usize,
}

impl Default for FieldOptions {
    fn default() -> Self {
        FieldOptions {
            nodes_per_panel: 12,
            panel_phase: PI,
            grading_levels: 8,
            spectral_floor: 1e-10,
            block: 4096,
        }
    }
}

/// Radial response integrals on a (ρ, ω) table plus the macrospin drive, ready for frame synthesis.
#[derive(Clone, Debug)]
pub struct CurrentSynthesis {
    params: PhysicalParams,
    grid: PolarGrid,
    spectrum: SpinSpectrum,
    omegas: Vec<f64>,
    para: Vec<RadialIntegrals>,
    dia: Vec<RadialIntegrals>,
    nodes: usize,
}

impl CurrentSynthesis {
    pub fn new(params: &PhysicalParams, grid: PolarGrid, spectrum: SpinSpectrum, opts: &FieldOptions) -> Result<Self> {
        params.validate()?;
        if params.d <= 0.0 {
            return Err(Error::Divergence(
                "current synthesis needs the dipoles at a finite height d > 0".into(),
            ));
        }
        if opts.nodes_per_panel == 0 || !(opts.panel_phase > 0.0) || opts.block == 0 {
            return Err(Error::invalid("field options", "nodes, panel width and block must be positive"));
        }
        let kmax = spectrum.significant_bins(opts.spectral_floor);
        let omegas: Vec<f64> = (0..=kmax).map(|k| spectrum.grid.omega(k)).collect();
        let (para, dia, nodes) = radial_tables(params, &grid.rho, &omegas, opts)?;
        Ok(CurrentSynthesis {
            params: *params,
            grid,
            spectrum,
            omegas,
            para,
            dia,
            nodes,
        })
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn spectrum(&self) -> &SpinSpectrum {
        &self.spectrum
    }

    /// Nonnegative frequencies retained in the synthesis.
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    /// Tabulated radial integrals at grid radius `i_rho` and retained bin `k`.
    pub fn radial(&self, i_rho: usize, k: usize, part: ResponsePart) -> RadialIntegrals {
        let p = self.para[i_rho * self.omegas.len() + k];
        let d = self.dia[i_rho];
        match part {
            ResponsePart::Paramagnetic => p,
            ResponsePart::Diamagnetic => d,
            ResponsePart::Total => RadialIntegrals {
                plus: p.plus + d.plus,
                minus: p.minus + d.minus,
                d: p.d + d.d,
            },
        }
    }

    /// Static J_φ (statA/cm) for S_z = −N/2 (the constant routed out of the dynamic synthesis).
    pub fn static_j_phi(&self, i_rho: usize, part: ResponsePart) -> f64 {
        -0.5 * HBAR * self.spectrum.n_dipoles as f64 * self.radial(i_rho, 0, part).d.re
    }

    /// Frames at `times` (s), each within the half-window |t| < T/2. Currents in statA/cm for a
    /// spin counted in units of ħ.
    pub fn frames(&self, part: ResponsePart, times: &[f64]) -> Result<Vec<CurrentFrame>> {
        let window = self.spectrum.grid.window();
        if let Some(t) = times.iter().find(|t| !(t.abs() < 0.5 * window)) {
            return Err(Error::Domain(format!("frame time {t:e} s outside the window ±{:e} s", 0.5 * window)));
        }
        let n_phi = self.grid.phi.len();
        let trig: Vec<(f64, f64)> = self.grid.phi.iter().map(|p| p.sin_cos()).collect();
        let nw = self.omegas.len();
        let norm = HBAR / window;
        let n_half = 0.5 * self.spectrum.n_dipoles as f64;
        // rows (ρ) are independent; output order is fixed by the index
        let rows: Vec<Vec<(f64, Vec<f64>, Vec<f64>)>> = (0..self.grid.rho.len())
            .into_par_iter()
            .map(|i| {
                let d0 = self.radial(i, 0, part).d.re;
                times
                    .iter()
                    .map(|&t| {
                        let mut acc = [Complex64::new(0.0, 0.0); 5];
                        for k in 0..nw {
                            let r = self.radial(i, k, part);
                            let w = if k == 0 { 1.0 } else { 2.0 } * norm;
                            let e = Complex64::from_polar(w, -self.omegas[k] * t);
                            let (sx, sy) = (self.spectrum.sx[k], self.spectrum.sy[k]);
                            acc[0] += e * r.plus * sx;
                            acc[1] += e * r.plus * sy;
                            acc[2] += e * r.minus * sx;
                            acc[3] += e * r.minus * sy;
                            if k > 0 {
                                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                                acc[4] += (e - w * sign) * r.d * self.spectrum.sz[k];
                            }
                        }
                        // S_z is the zero-mean periodic reconstruction; restore the step from +N/2
                        let jz = acc[4].re - 2.0 * n_half * d0 * t * norm;
                        let mut jr = Vec::with_capacity(n_phi);
                        let mut jp = Vec::with_capacity(n_phi);
                        for &(s, c) in &trig {
                            jr.push(0.5 * (-s * acc[0] + c * acc[1]).re);
                            jp.push(-0.5 * (c * acc[2] + s * acc[3]).re + jz);
                        }
                        (t, jr, jp)
                    })
                    .collect()
            })
            .collect();
        let mut frames: Vec<CurrentFrame> = times
            .iter()
            .map(|&t| CurrentFrame {
                time: t,
                grid: self.grid.clone(),
                j_rho: Vec::with_capacity(self.grid.rho.len() * n_phi),
                j_phi: Vec::with_capacity(self.grid.rho.len() * n_phi),
            })
            .collect();
        for row in rows {
            for (f, (_, jr, jp)) in frames.iter_mut().zip(row) {
                f.j_rho.extend(jr);
                f.j_phi.extend(jp);
            }
        }
        Ok(frames)
    }
}

type Tables = (Vec<RadialIntegrals>, Vec<RadialIntegrals>, usize);

/// Paramagnetic integrals per (ρ, ω) and the ω-independent diamagnetic ones, on one shared node set.
fn radial_tables(params: &PhysicalParams, rhos: &[f64], omegas: &[f64], opts: &FieldOptions) -> Result<Tables> {
    let eval = ResponseEvaluation::default();
    let q_cut = eval.cutoff(params)?;
    let rho_max = rhos.iter().copied().fold(0.0, f64::max);
    let h_max = opts.panel_phase / rho_max;
    let mut breaks = vec![0.0, q_cut];
    for &w in omegas {
        for k in kubo_kinks(params, w) {
            breaks.push(k);
            let mut h = h_max;
            for _ in 0..opts.grading_levels {
                h *= 0.25;
                breaks.push(k - h);
                breaks.push(k + h);
            }
        }
    }
    breaks.retain(|&b| (0.0..=q_cut).contains(&b));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(q_cut * 1e-6));
    let (nodes, weights) = composite_gauss_legendre(&breaks, h_max, opts.nodes_per_panel);
    let (nr, nw) = (rhos.len(), omegas.len());
    let cols = 2 * nw + 1;
    let para_eval = eval.with_part(ResponsePart::Paramagnetic).with_mode(ResponseMode::Exact);
    let d = params.d;
    let blocks: Vec<DMatrix<f64>> = nodes
        .par_chunks(opts.block)
        .zip(weights.par_chunks(opts.block))
        .map(|(qs, ws)| {
            let a = DMatrix::from_fn(3 * nr, qs.len(), |row, n| {
                let q = qs[n];
                let [j0, j1, j2] = j012(q * rhos[row / 3]);
                let base = ws[n] * q * (-q * d).exp();
                base * match row % 3 {
                    0 => j0 + j2,
                    1 => j0 - j2,
                    _ => j1,
                }
            });
            let mut b = DMatrix::zeros(qs.len(), cols);
            for (n, &q) in qs.iter().enumerate() {
                for (k, &w) in omegas.iter().enumerate() {
                    let p = kubo_weight(params, q, w, &para_eval);
                    b[(n, 2 * k)] = p.re;
                    b[(n, 2 * k + 1)] = p.im;
                }
                b[(n, 2 * nw)] = 1.0;
            }
            a * b
        })
        .collect();
    let mut sum = DMatrix::<f64>::zeros(3 * nr, cols);
    for blk in &blocks {
        sum += blk;
    }
    if sum.iter().any(|v| !v.is_finite()) {
        return Err(Error::Integration("non-finite radial response table".into()));
    }
    let pref = chi_prefactor(params);
    let c = |row: usize, col: usize| Complex64::new(sum[(row, 2 * col)], sum[(row, 2 * col + 1)]) * pref;
    let mut para = Vec::with_capacity(nr * nw);
    let mut dia = Vec::with_capacity(nr);
    for i in 0..nr {
        for k in 0..nw {
            para.push(RadialIntegrals {
                plus: c(3 * i, k),
                minus: c(3 * i + 1, k),
                d: c(3 * i + 2, k),
            });
        }
        let r = |row: usize| Complex64::new(sum[(row, 2 * nw)] * pref, 0.0);
        dia.push(RadialIntegrals {
            plus: r(3 * i),
            minus: r(3 * i + 1),
            d: r(3 * i + 2),
        });
    }
    Ok((para, dia, nodes.len()))
}

/// Parameters of the spiral-wave run: E_F = 10⁶ħγ0/2, Δ = 100γ0, d = 10⁻³v_F/γ0, N = 20.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpiralSetup {
    pub params: PhysicalParams,
    pub n_dipoles: usize,
    pub gamma0: f64,
}

impl SpiralSetup {
    pub fn spiral() -> Self {
        let base = PhysicalParams::standard();
        let gamma0 = 2.0 * base.e_f() / (1e6 * HBAR);
        let params = base.with_delta(100.0 * gamma0).with_d(1e-3 * base.v_f / gamma0);
        SpiralSetup {
            params,
            n_dipoles: 20,
            gamma0,
        }
    }

    /// Length unit 2v_F/(γ0N) used for plot axes.
    pub fn length_unit(&self) -> f64 {
        2.0 * self.params.v_f / (self.gamma0 * self.n_dipoles as f64)
    }

    /// Default grid ρ ∈ [0.05, 4]·(2v_F/γ0N).
    pub fn grid(&self, n_rho: usize, n_phi: usize) -> Result<PolarGrid> {
        let u = self.length_unit();
        PolarGrid::new(0.05 * u, 4.0 * u, n_rho, n_phi)
    }

    /// Frame times spanning the front's transit of the grid, 0 to 4·(2/γ0N).
    pub fn frame_times(&self, frames: usize) -> Vec<f64> {
        let t_max = 4.0 * self.length_unit() / self.params.v_f;
        let den = frames.saturating_sub(1).max(1) as f64;
        (0..frames).map(|i| t_max * i as f64 / den).collect()
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::for_macrospin(self.n_dipoles, self.gamma0, self.params.delta)
    }

    pub fn synthesis(&self, grid: PolarGrid, opts: &FieldOptions) -> Result<CurrentSynthesis> {
        let spec = spin_spectrum(self.n_dipoles, self.gamma0, self.params.delta, self.frequency_grid()?)?;
        CurrentSynthesis::new(&self.params, grid, spec, opts)
    }
}

/// Frequency sum of χ(ρ, φ, ω)·S(ω) for the exact macrospin drive, one frame per time.
pub fn current_field(
    params: &PhysicalParams,
    n_dipoles: usize,
    gamma0: f64,
    grid: PolarGrid,
    times: &[f64],
) -> Result<Vec<CurrentFrame>> {
    let fg = FrequencyGrid::for_macrospin(n_dipoles, gamma0, params.delta)?;
    let spec = spin_spectrum(n_dipoles, gamma0, params.delta, fg)?;
    CurrentSynthesis::new(params, grid, spec, &FieldOptions::default())?.frames(ResponsePart::Total, times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::chi::chi_radial;

    #[test]
    fn grid_selection() {
        let g = FrequencyGrid::for_macrospin(20, 1.0, 100.0).unwrap();
        assert_eq!(g.len(), 1024);
        assert!((g.d_omega() - 1.25).abs() < 1e-12);
        assert!(g.check(20, 1.0, 100.0).is_ok());
        let coarse = FrequencyGrid::new(64, g.dt()).unwrap();
        assert!(matches!(coarse.check(20, 1.0, 100.0), Err(Error::Resolution(_))));
        let narrow = FrequencyGrid::new(1024, 1.0).unwrap();
        assert!(matches!(narrow.check(20, 1.0, 100.0), Err(Error::Resolution(_))));
    }

    #[test]
    fn spectrum_peaks_and_symmetry() {
        let g = FrequencyGrid::for_macrospin(20, 1.0, 100.0).unwrap();
        let s = spin_spectrum(20, 1.0, 100.0, g).unwrap();
        let kpeak = (0..g.len()).max_by(|&a, &b| s.s_plus(g.omega(a)).total_cmp(&s.s_plus(g.omega(b)))).unwrap();
        assert!((g.omega(kpeak) - 100.0).abs() <= 0.5 * g.d_omega());
        for k in 1..g.len() / 2 {
            let neg = g.len() - k;
            assert!((s.sz[k] + s.sz[neg]).norm() < 1e-12 * s.sz[1].norm());
            assert!((s.sx[k] - s.sx[neg].conj()).norm() < 1e-15 * s.sx[k].norm().max(1e-300));
        }
        assert_eq!(s.sz[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn table_matches_adaptive_quadrature() {
        let setup = SpiralSetup::spiral();
        let u = setup.length_unit();
        let grid = PolarGrid::new(0.05 * u, 4.0 * u, 9, 8).unwrap();
        let syn = setup.synthesis(grid.clone(), &FieldOptions::default()).unwrap();
        let eval = ResponseEvaluation::default().with_part(ResponsePart::Paramagnetic);
        for &i in &[0usize, 4, 8] {
            for &k in &[0usize, 3, 80, syn.omegas().len() - 1] {
                let w = syn.omegas()[k];
                let want = chi_radial(&setup.params, grid.rho[i], w, &eval).unwrap();
                let got = syn.radial(i, k, ResponsePart::Paramagnetic);
                let scale = want.plus.norm().max(want.minus.norm()).max(want.d.norm());
                for (a, b) in [(got.plus, want.plus), (got.minus, want.minus), (got.d, want.d)] {
                    assert!((a - b).norm() < 1e-6 * scale, "rho#{i} omega#{k}: {a} vs {b}");
                }
            }
        }
    }
}
