//! One runner per CLI subcommand. Each writes CSV output plus `manifest.txt` into its directory.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::collective::{
    dtr_excited, dtr_homogeneous, g2_zero, lambda_sr, lambda_sr_one_over_q, lambda_sr_prime, lambda_sr_rough,
    macrospin_exact, macrospin_ode, r_coherent, MacrospinTrajectory,
};
use crate::decay::{build_matrix_with, disorder_sweep, gamma0, gamma_r, realization_stream, DecayProfiles};
use crate::error::{Error, Result};
use crate::io::output::{write_csv, RunManifest};
use crate::noise::oersted_noise;
use crate::numerics::quad::QuadratureSpec;
use crate::numerics::rng::uniform_points;
use crate::response::{FieldOptions, PolarGrid, ResponsePart, SpiralSetup};
use crate::units::{DipoleEnsemble, PhysicalParams, HBAR};

/// Shared inputs of every command.
#[derive(Clone, Debug)]
pub struct RunContext {
    pub params: PhysicalParams,
    pub out: PathBuf,
    pub seed: Option<u64>,
}

impl RunContext {
    fn prepare(&self) -> Result<()> {
        fs::create_dir_all(&self.out)?;
        Ok(())
    }

    fn require_seed(&self, command: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::invalid("seed", format!("`{command}` is stochastic and needs --seed")))
    }

    fn finish(&self, mut manifest: RunManifest, started: Instant, files: &[PathBuf]) -> Result<RunManifest> {
        for f in files {
            manifest.record(f)?;
        }
        manifest.duration = started.elapsed();
        manifest.write(&self.out, "manifest.txt")?;
        Ok(manifest)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

fn check_count(field: &'static str, n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::invalid(field, format!("need at least {min}, got {n}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseOptions {
    /// ħω/E_F range.
    pub omega_min: f64,
    pub omega_max: f64,
    pub omegas: usize,
    /// Largest q in units of k_F.
    pub q_max: f64,
    pub points: usize,
}

impl Default for NoiseOptions {
    fn default() -> Self {
        NoiseOptions {
            omega_min: 0.01,
            omega_max: 1.0,
            omegas: 50,
            q_max: 2.5,
            points: 250,
        }
    }
}

/// Oersted noise C^{−+}(ω, q) on a (ħω/E_F, q/k_F) grid.
pub fn run_noise(ctx: &RunContext, opts: &NoiseOptions) -> Result<RunManifest> {
    let started = Instant::now();
    ctx.prepare()?;
    check_count("omegas", opts.omegas, 1)?;
    check_count("points", opts.points, 1)?;
    if !(opts.omega_min > 0.0 && opts.omega_max >= opts.omega_min && opts.q_max > 0.0) {
        return Err(Error::invalid("range", "need 0 < omega_min <= omega_max and q_max > 0"));
    }
    let p = &ctx.params;
    let (e_f, k_f) = (p.e_f(), p.k_f());
    let mut rows = Vec::with_capacity(opts.omegas * opts.points);
    for w in linspace(opts.omega_min, opts.omega_max, opts.omegas) {
        let omega = w * e_f / HBAR;
        for i in 1..=opts.points {
            let q = opts.q_max * i as f64 / opts.points as f64;
            rows.push(vec![q * k_f, omega, oersted_noise(p, omega, q * k_f, 1.0)?]);
        }
    }
    let path = ctx.out.join("noise.csv");
    write_csv(&path, &["q_invcm", "omega_rads", "c_minusplus"], &rows)?;
    let mut m = RunManifest::new("noise", p, None);
    m.option("omega_min", opts.omega_min)
        .option("omega_max", opts.omega_max)
        .option("omegas", opts.omegas)
        .option("q_max", opts.q_max)
        .option("points", opts.points)
        .option("units", "c_minusplus in G^2 s");
    ctx.finish(m, started, &[path])
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatesOptions {
    /// Radii in units of λ_F, log-spaced.
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl Default for RatesOptions {
    fn default() -> Self {
        RatesOptions {
            r_min: 0.01,
            r_max: 1e4,
            points: 121,
        }
    }
}

/// Decay-rate profile γ(r) on a log grid.
pub fn run_rates(ctx: &RunContext, opts: &RatesOptions) -> Result<RunManifest> {
    let started = Instant::now();
    ctx.prepare()?;
    check_count("points", opts.points, 2)?;
    if !(opts.r_min > 0.0 && opts.r_max > opts.r_min) {
        return Err(Error::invalid("r range", "need 0 < r_min < r_max"));
    }
    let p = &ctx.params;
    let g0 = gamma0(p)?;
    let lf = p.lambda_f();
    let mut rows = Vec::with_capacity(opts.points);
    for x in logspace(opts.r_min, opts.r_max, opts.points) {
        let g = gamma_r(p, x * lf)?;
        rows.push(vec![x * lf, x, g, g / g0]);
    }
    let path = ctx.out.join("rates.csv");
    write_csv(&path, &["r_cm", "r_over_lambda_f", "gamma_hz", "gamma_over_gamma0"], &rows)?;
    let mut m = RunManifest::new("rates", p, None);
    m.option("r_min_lambda_f", opts.r_min)
        .option("r_max_lambda_f", opts.r_max)
        .option("points", opts.points)
        .option("gamma0_hz", format!("{g0:.16e}"));
    ctx.finish(m, started, &[path])
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubradianceOptions {
    pub n: usize,
    pub realizations: usize,
    pub threshold: f64,
    /// Mean spacings in units of λ_F.
    pub spacings: Vec<f64>,
}

impl Default for SubradianceOptions {
    fn default() -> Self {
        SubradianceOptions {
            n: 500,
            realizations: 50,
            threshold: 0.1,
            spacings: vec![0.3, 1.0, 3.0, 10.0, 30.0],
        }
    }
}

/// Single-excitation decay statistics against dipole spacing.
pub fn run_subradiance(ctx: &RunContext, opts: &SubradianceOptions) -> Result<RunManifest> {
    let started = Instant::now();
    let seed = ctx.require_seed("subradiance")?;
    ctx.prepare()?;
    let stats = disorder_sweep(&ctx.params, opts.n, &opts.spacings, opts.realizations, opts.threshold, seed)?;
    let rows: Vec<Vec<f64>> = stats
        .iter()
        .map(|s| {
            vec![
                s.spacing,
                s.dark_fraction,
                s.dark_fraction_stderr,
                s.mean_min_rate,
                s.mean_min_rate_stderr,
            ]
        })
        .collect();
    let path = ctx.out.join("subradiance.csv");
    write_csv(
        &path,
        &[
            "spacing_over_lambda_f",
            "dark_fraction",
            "dark_fraction_stderr",
            "mean_min_rate_over_gamma0",
            "mean_min_rate_stderr",
        ],
        &rows,
    )?;
    let mut m = RunManifest::new("subradiance", &ctx.params, Some(seed));
    m.option("n", opts.n)
        .option("realizations", opts.realizations)
        .option("threshold", opts.threshold)
        .option(
            "spacings_lambda_f",
            opts.spacings.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "),
        );
    ctx.finish(m, started, &[path])
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuperradianceOptions {
    pub n: usize,
    pub realizations: usize,
    /// Densities in units of 1/(πλ_SR²).
    pub densities: Vec<f64>,
}

impl Default for SuperradianceOptions {
    fn default() -> Self {
        SuperradianceOptions {
            n: 100,
            realizations: 5,
            densities: vec![0.1, 0.3, 1.0, 3.0, 10.0],
        }
    }
}

/// ∂tR, g²(0) and the coherent-state rate for random ensembles at several densities.
pub fn run_superradiance(ctx: &RunContext, opts: &SuperradianceOptions) -> Result<RunManifest> {
    let started = Instant::now();
    let seed = ctx.require_seed("superradiance")?;
    ctx.prepare()?;
    check_count("n", opts.n, 2)?;
    check_count("realizations", opts.realizations, 1)?;
    if opts.densities.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::invalid("densities", "must be positive"));
    }
    let p = &ctx.params;
    let spec = QuadratureSpec::default();
    let l_sr = lambda_sr(p, &spec)?;
    let unit = 1.0 / (PI * l_sr * l_sr);
    let min_density = opts.densities.iter().fold(f64::INFINITY, |m, &x| m.min(x)) * unit;
    let r_max = (2.0 * opts.n as f64 / min_density).sqrt() * 1.01;
    let profiles = DecayProfiles::build(p, r_max, false)?;
    let g0 = profiles.gamma0;
    let mut rows = Vec::new();
    let mut report = String::new();
    let _ = writeln!(report, "gamma0_hz = {g0:.16e}");
    let _ = writeln!(report, "lambda_sr_cm = {l_sr:.16e}");
    let _ = writeln!(report, "lambda_sr_one_over_q_cm = {:.16e}", lambda_sr_one_over_q(p));
    let _ = writeln!(report, "lambda_sr_rough_cm = {:.16e}", lambda_sr_rough(p));
    let _ = writeln!(report, "lambda_sr_prime_cm = {:.16e}", lambda_sr_prime(p));
    for (di, &mult) in opts.densities.iter().enumerate() {
        let n_density = mult * unit;
        let side = (opts.n as f64 / n_density).sqrt();
        let mut dtr_sum = 0.0;
        for r in 0..opts.realizations {
            let pts = uniform_points(realization_stream(seed, di, r), opts.n, side)?;
            let m = build_matrix_with(&DipoleEnsemble::z_aligned(pts)?, &profiles)?;
            let dtr = dtr_excited(&m);
            dtr_sum += dtr;
            rows.push(vec![n_density, dtr, g2_zero(&m)?, r_coherent(&m)]);
        }
        let _ = writeln!(
            report,
            "density_cm2 = {n_density:.16e} mean_dtr_hz2 = {:.16e} homogeneous_dtr_hz2 = {:.16e}",
            dtr_sum / opts.realizations as f64,
            dtr_homogeneous(g0, l_sr, n_density, opts.n)
        );
    }
    let csv_path = ctx.out.join("superradiance.csv");
    write_csv(&csv_path, &["n_cm2", "dtr_hz2", "g2_zero", "r_coherent_hz"], &rows)?;
    let txt = ctx.out.join("superradiance.txt");
    fs::write(&txt, &report)?;
    let mut m = RunManifest::new("superradiance", p, Some(seed));
    m.option("n", opts.n).option("realizations", opts.realizations).option(
        "densities_per_pi_lambda_sr2",
        opts.densities.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "),
    );
    ctx.finish(m, started, &[csv_path, txt])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MacrospinMethod {
    Exact,
    Ode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MacrospinOptions {
    pub n: usize,
    /// Single-dipole rate; `None` uses γ0 of the configured parameters.
    pub gamma0: Option<f64>,
    /// End time in units of 1/(Nγ0).
    pub t_max: f64,
    pub points: usize,
    pub method: MacrospinMethod,
    pub rotating_frame: bool,
}

impl Default for MacrospinOptions {
    fn default() -> Self {
        MacrospinOptions {
            n: 20,
            gamma0: None,
            t_max: 10.0,
            points: 1001,
            method: MacrospinMethod::Ode,
            rotating_frame: false,
        }
    }
}

pub fn macrospin_trajectory(params: &PhysicalParams, opts: &MacrospinOptions) -> Result<MacrospinTrajectory> {
    check_count("points", opts.points, 2)?;
    let g0 = match opts.gamma0 {
        Some(g) => g,
        None => gamma0(params)?,
    };
    let t_end = opts.t_max / (opts.n.max(1) as f64 * g0);
    let ts = linspace(0.0, t_end, opts.points);
    let tr = match opts.method {
        MacrospinMethod::Exact => macrospin_exact(opts.n, g0, params.delta, &ts)?,
        MacrospinMethod::Ode => macrospin_ode(opts.n, g0, params.delta, &ts)?,
    };
    Ok(if opts.rotating_frame { tr.rotating_frame() } else { tr })
}

/// Collective spin ⟨S(t)⟩ of N co-located dipoles.
pub fn run_macrospin(ctx: &RunContext, opts: &MacrospinOptions) -> Result<RunManifest> {
    let started = Instant::now();
    ctx.prepare()?;
    let tr = macrospin_trajectory(&ctx.params, opts)?;
    let rows: Vec<Vec<f64>> = (0..tr.times.len())
        .map(|i| vec![tr.times[i], tr.sx[i], tr.sy[i], tr.sz[i]])
        .collect();
    let path = ctx.out.join("macrospin.csv");
    write_csv(&path, &["t_s", "sx", "sy", "sz"], &rows)?;
    let mut m = RunManifest::new("macrospin", &ctx.params, None);
    m.option("n", opts.n)
        .option("gamma0_hz", format!("{:.16e}", tr.gamma0))
        .option("t_max_per_n_gamma0", opts.t_max)
        .option("points", opts.points)
        .option("method", format!("{:?}", opts.method).to_lowercase())
        .option("rotating_frame", opts.rotating_frame)
        .option("units", "spin in units of hbar");
    ctx.finish(m, started, &[path])
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurrentsOptions {
    pub setup: SpiralSetup,
    pub n_rho: usize,
    pub n_phi: usize,
    pub frames: usize,
    pub part: ResponsePart,
    pub field: FieldOptions,
}

impl Default for CurrentsOptions {
    fn default() -> Self {
        CurrentsOptions {
            setup: SpiralSetup::spiral(),
            n_rho: 256,
            n_phi: 128,
            frames: 64,
            part: ResponsePart::Total,
            field: FieldOptions::default(),
        }
    }
}

/// Frame file name for index `i`.
pub fn frame_name(i: usize) -> String {
    format!("frame_{i:05}.csv")
}

/// Time frames of the current wave emitted by a decaying macrospin.
pub fn run_currents(ctx: &RunContext, opts: &CurrentsOptions) -> Result<RunManifest> {
    let started = Instant::now();
    ctx.prepare()?;
    check_count("frames", opts.frames, 1)?;
    let setup = &opts.setup;
    let grid = setup.grid(opts.n_rho, opts.n_phi)?;
    let syn = setup.synthesis(grid, &opts.field)?;
    let times = setup.frame_times(opts.frames);
    let frames = syn.frames(opts.part, &times)?;
    let mut files = Vec::with_capacity(frames.len());
    for (i, f) in frames.iter().enumerate() {
        let np = f.grid.phi.len();
        let mut rows = Vec::with_capacity(f.j_rho.len());
        for (ir, &rho) in f.grid.rho.iter().enumerate() {
            for (ip, &phi) in f.grid.phi.iter().enumerate() {
                let k = ir * np + ip;
                rows.push(vec![rho, phi, f.j_rho[k], f.j_phi[k]]);
            }
        }
        let path = ctx.out.join(frame_name(i));
        write_csv(&path, &["rho_cm", "phi_rad", "j_rho", "j_phi"], &rows)?;
        files.push(path);
    }
    let fg = syn.spectrum().grid;
    let mut m = RunManifest::new("currents", &setup.params, None);
    m.option("n_dipoles", setup.n_dipoles)
        .option("gamma0_hz", format!("{:.16e}", setup.gamma0))
        .option("grid", format!("{} x {}", opts.n_rho, opts.n_phi))
        .option("part", format!("{:?}", opts.part).to_lowercase())
        .option("fft_points", fg.len())
        .option("fft_window_s", format!("{:.16e}", fg.window()))
        .option("frequency_bins", syn.omegas().len())
        .option("quadrature_nodes", syn.node_count())
        .option(
            "frame_times_s",
            times.iter().map(|t| format!("{t:.16e}")).collect::<Vec<_>>().join(" "),
        )
        .option("units", "rho in cm, phi in rad, currents in statA/cm");
    ctx.finish(m, started, &files)
}

/// Convenience for tests and the CLI: the directory-relative path of a produced file.
pub fn output_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

/// Frame grid for a currents run.
pub fn currents_grid(opts: &CurrentsOptions) -> Result<PolarGrid> {
    opts.setup.grid(opts.n_rho, opts.n_phi)
}
