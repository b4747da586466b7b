//! Command-line front end.
//!
//! Exit codes: `0` success, `2` configuration or usage errors, `3` numerical
//! alarms (boundary mass, incomplete decompositions, failed fits), `4` file
//! I/O and snapshot format errors, `1` anything else.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use image::{Rgb, RgbImage};
use rayon::prelude::*;

use crate::decomposer::{decompose, DecompositionResult};
use crate::diagnostics::{
    error_measures, error_measures_wavefunction, exact_kerr_wavefunction, exact_kerr_wigner,
    fit_scaling, run_kerr_schrodinger, run_kerr_wigner, ErrorMeasures, KerrRun, Measure,
    RunSeries,
};
use crate::error::{Error, Result};
use crate::grid::Representation;
use crate::io::config::{read_config, resolve_output};
use crate::io::{
    read_snapshot, write_manifest, write_schedule, write_snapshot, ManifestSummary, Picture,
    RunConfig, Snapshot,
};
use crate::moyal::{parse_polynomial, BracketKind, PolynomialXP};
use crate::schemes::{
    kerr_hamiltonian, schedule_from_decomposition, KerrSchrodingerPropagator, KerrWignerPropagator,
    Schedule, SchemeKind, SchrodingerScheduleStepper, WignerScheduleStepper,
};
use crate::states::{
    coherent_wavefunction, coherent_wigner, quadrature, WaveFunction, WignerState, EDGE_ALARM,
};

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. }
        | Error::Parse { .. }
        | Error::InvalidParameter(_)
        | Error::NotPowerOfTwo(_)
        | Error::NonPositiveExtent(_)
        | Error::IncompatibleGrid(_) => EXIT_CONFIG,
        Error::BoundaryMass { .. }
        | Error::NonUnitaryStep(_)
        | Error::NonzeroResidual(_)
        | Error::InsufficientFitPoints { .. }
        | Error::NonFiniteExponent { .. } => EXIT_NUMERICAL,
        Error::Io { .. } | Error::Snapshot { .. } | Error::TruncatedSnapshot { .. } => EXIT_IO,
        Error::RepresentationMismatch { .. } | Error::DivisionByZero => EXIT_OTHER,
    }
}

#[derive(Debug, Parser)]
#[command(name = "nonsep", version, about = "Split-operator propagation of nonseparable Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate a coherent state and write snapshots and a manifest.
    Propagate(PropagateArgs),
    /// Run a step-size sweep concurrently and fit error exponents.
    #[command(alias = "sweep")]
    Scaling(ScalingArgs),
    /// Expand a polynomial in double brackets and emit a schedule file.
    Decompose(DecomposeArgs),
    /// Render Wigner snapshots as PNG heatmaps.
    Render(RenderArgs),
}

#[derive(Debug, Args, Default)]
pub struct Overrides {
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
    /// u9, u7 or strang
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t2: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// wigner or schrodinger
    #[arg(long)]
    pub picture: Option<String>,
}

#[derive(Debug, Args)]
pub struct PropagateArgs {
    pub config: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
    /// Also write a PNG next to every Wigner snapshot.
    #[arg(long)]
    pub render: bool,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    pub config: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
    /// Comma-separated step sizes, replacing `dts` from the config.
    #[arg(long, value_delimiter = ',')]
    pub dts: Option<Vec<f64>>,
    /// Concurrent trajectories (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BracketArg {
    Moyal,
    Poisson,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Polynomial in x, p and hbar, e.g. "x^2 p^2".
    pub polynomial: String,
    #[arg(long, value_enum, default_value = "moyal")]
    pub bracket: BracketArg,
    #[arg(long, default_value = "u9")]
    pub scheme: String,
    #[arg(long, allow_hyphen_values = true)]
    pub t2: Option<f64>,
    /// Schedule file to write.
    #[arg(long, default_value = "schedule.txt")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(required = true)]
    pub snapshots: Vec<PathBuf>,
    /// Color scale: |W| mapped to full saturation. Defaults to 1/(πℏ), the
    /// largest value a Wigner function can take, so a series shares one scale.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Output directory (default: next to each snapshot).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match run(cli) {
        Ok(report) => {
            print!("{report}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a parsed command and returns its human-readable report.
pub fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Propagate(a) => cmd_propagate(&a),
        Command::Scaling(a) => cmd_scaling(&a),
        Command::Decompose(a) => cmd_decompose(&a),
        Command::Render(a) => cmd_render(&a),
    }
}

fn load_config(path: &Path, o: &Overrides) -> Result<RunConfig> {
    let mut cfg = read_config(path)?;
    apply_overrides(&mut cfg, o)?;
    Ok(cfg)
}

pub fn apply_overrides(cfg: &mut RunConfig, o: &Overrides) -> Result<()> {
    let wrap = |e: Error| Error::Config {
        line: 0,
        message: format!("command line: {e}"),
    };
    if let Some(v) = o.dt {
        cfg.dt = v;
    }
    if let Some(v) = o.t_final {
        cfg.t_final = v;
    }
    if let Some(s) = &o.scheme {
        cfg.scheme = SchemeKind::parse(s).map_err(wrap)?;
    }
    if let Some(v) = o.t2 {
        cfg.t2 = v;
    }
    if let Some(p) = &o.output {
        cfg.output = p.clone();
    }
    if let Some(p) = &o.picture {
        cfg.picture = Picture::parse(p).map_err(wrap)?;
    }
    cfg.validate()
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))
}

/// Step indices at which something happens: samples, snapshots, the end.
struct EventPlan {
    total: usize,
    samples: BTreeSet<usize>,
    snapshots: BTreeSet<usize>,
}

impl EventPlan {
    fn new(cfg: &RunConfig) -> Self {
        let total = (cfg.t_final / cfg.dt).round() as usize;
        let n = cfg.samples.max(1).min(total.max(1));
        let samples = (1..=n).map(|k| total * k / n).filter(|&s| s > 0).collect();
        // the end state is always kept
        let snapshots = cfg
            .snapshots
            .iter()
            .map(|t| ((t / cfg.dt).round() as usize).min(total))
            .chain(std::iter::once(total))
            .collect();
        EventPlan {
            total,
            samples,
            snapshots,
        }
    }

    fn events(&self) -> Vec<usize> {
        let mut all: BTreeSet<usize> = self.samples.union(&self.snapshots).copied().collect();
        if self.total > 0 {
            all.insert(self.total);
        }
        all.remove(&0);
        all.into_iter().collect()
    }
}

fn snapshot_name(step: usize, t: f64) -> String {
    format!("snap_{step:08}_t{t:.4}.bin")
}

fn boundary_alarm(mass: f64, t: f64) -> Error {
    eprintln!("boundary alarm at t = {t:.6}: edge value {mass:e} exceeds {EDGE_ALARM:e}");
    Error::BoundaryMass {
        mass,
        limit: EDGE_ALARM,
    }
}

enum WignerStepper {
    Kerr(KerrWignerPropagator),
    Generic(WignerScheduleStepper),
}

impl WignerStepper {
    fn run(&mut self, w: &mut WignerState, n: usize) -> Result<()> {
        match self {
            WignerStepper::Kerr(p) => p.run(w, n),
            WignerStepper::Generic(p) => p.run(w, n),
        }
    }

    fn transforms(&self) -> usize {
        match self {
            WignerStepper::Kerr(p) => p.transforms(),
            WignerStepper::Generic(p) => p.transforms(),
        }
    }
}

enum WaveStepper {
    Kerr(KerrSchrodingerPropagator),
    Generic(SchrodingerScheduleStepper),
}

impl WaveStepper {
    fn run(&mut self, psi: &mut WaveFunction, n: usize) -> Result<()> {
        match self {
            WaveStepper::Kerr(p) => p.run(psi, n),
            WaveStepper::Generic(p) => p.run(psi, n),
        }
    }

    fn transforms(&self) -> usize {
        match self {
            WaveStepper::Kerr(p) => p.transforms(),
            WaveStepper::Generic(p) => p.transforms(),
        }
    }
}

fn per_step(transforms: usize, steps: usize) -> usize {
    if steps == 0 {
        0
    } else {
        (transforms as f64 / steps as f64).round() as usize
    }
}

fn cmd_propagate(a: &PropagateArgs) -> Result<String> {
    let mut cfg = load_config(&a.config, &a.overrides)?;
    cfg.render |= a.render;
    let out = cfg.output_dir();
    create_dir(&out)?;
    std::fs::write(out.join("config.txt"), cfg.to_text())
        .map_err(|e| Error::io("writing config copy", e))?;
    let start = Instant::now();
    let plan = EventPlan::new(&cfg);
    let symbol = cfg.hamiltonian_symbol()?;
    let h = symbol.clone().unwrap_or_else(kerr_hamiltonian);
    let exact_known = symbol.is_none() && !cfg.classical_limit;
    let grid = cfg.phase_grid()?;
    let provenance = format!("nonsep propagate {}", a.config.display());
    let mut series = RunSeries::default();
    let mut written = Vec::new();
    let mut last: Option<ErrorMeasures>;
    let fft;
    match cfg.picture {
        Picture::Wigner => {
            let mut w = coherent_wigner(&grid, cfg.x0, cfg.p0)?;
            let mut stepper = match &symbol {
                None => WignerStepper::Kerr(KerrWignerPropagator::new(&grid, cfg.dt, cfg.kerr_options())?),
                Some(hs) => {
                    let s = Schedule::for_hamiltonian(hs, cfg.scheme, cfg.t2, cfg.splitting)?;
                    WignerStepper::Generic(WignerScheduleStepper::new(&grid, &s, cfg.dt, cfg.classical_limit)?)
                }
            };
            let record = |w: &WignerState, t: f64, series: &mut RunSeries| -> Result<Option<ErrorMeasures>> {
                let edge = w.edge_max()?;
                if edge > EDGE_ALARM {
                    return Err(boundary_alarm(edge, t));
                }
                let m = if exact_known {
                    Some(error_measures(w, &exact_kerr_wigner(&grid, cfg.x0, cfg.p0, t)?)?)
                } else {
                    None
                };
                let energy = quadrature(w, &h)?.0;
                series.push(t, w.norm(), energy, &m.unwrap_or(zero_measures(None)))?;
                Ok(m)
            };
            let save = |w: &WignerState, step: usize, t: f64, written: &mut Vec<PathBuf>| -> Result<()> {
                let path = out.join(snapshot_name(step, t));
                write_snapshot(&path, &Snapshot::from_wigner(w, t, cfg.scheme.name(), &provenance)?)?;
                written.push(path);
                Ok(())
            };
            last = record(&w, 0.0, &mut series)?;
            save(&w, 0, 0.0, &mut written)?;
            let mut done = 0;
            for ev in plan.events() {
                stepper.run(&mut w, ev - done)?;
                done = ev;
                let t = ev as f64 * cfg.dt;
                if plan.samples.contains(&ev) || ev == plan.total {
                    last = record(&w, t, &mut series)?;
                } else {
                    let edge = w.edge_max()?;
                    if edge > EDGE_ALARM {
                        return Err(boundary_alarm(edge, t));
                    }
                }
                if plan.snapshots.contains(&ev) {
                    save(&w, ev, t, &mut written)?;
                }
            }
            fft = stepper.transforms();
        }
        Picture::Schrodinger => {
            let line = cfg.line_grid()?;
            let mut psi = coherent_wavefunction(&line, cfg.x0, cfg.p0)?;
            let mut stepper = match &symbol {
                None => WaveStepper::Kerr(KerrSchrodingerPropagator::new(&line, cfg.dt, cfg.kerr_options())?),
                Some(hs) => {
                    let s = Schedule::for_hamiltonian(hs, cfg.scheme, cfg.t2, cfg.splitting)?;
                    WaveStepper::Generic(SchrodingerScheduleStepper::new(&line, &s, cfg.dt)?)
                }
            };
            let record = |psi: &WaveFunction, t: f64, series: &mut RunSeries| -> Result<Option<ErrorMeasures>> {
                let pos = psi.in_rep(Representation::Position)?;
                let mass = pos.boundary_mass()?;
                if mass > EDGE_ALARM {
                    return Err(boundary_alarm(mass, t));
                }
                let m = if exact_known {
                    let exact = exact_kerr_wavefunction(&line, cfg.x0, cfg.p0, t)?;
                    Some(error_measures_wavefunction(&pos, &exact, &grid)?)
                } else {
                    None
                };
                series.push(t, pos.norm(), pos.expectation(&h)?, &m.unwrap_or(zero_measures(Some(0.0))))?;
                Ok(m)
            };
            let save = |psi: &WaveFunction, step: usize, t: f64, written: &mut Vec<PathBuf>| -> Result<()> {
                let path = out.join(snapshot_name(step, t));
                write_snapshot(&path, &Snapshot::from_wavefunction(psi, t, cfg.scheme.name(), &provenance)?)?;
                written.push(path);
                Ok(())
            };
            last = record(&psi, 0.0, &mut series)?;
            save(&psi, 0, 0.0, &mut written)?;
            let mut done = 0;
            for ev in plan.events() {
                stepper.run(&mut psi, ev - done)?;
                done = ev;
                let t = ev as f64 * cfg.dt;
                if plan.samples.contains(&ev) || ev == plan.total {
                    last = record(&psi, t, &mut series)?;
                }
                if plan.snapshots.contains(&ev) {
                    save(&psi, ev, t, &mut written)?;
                }
            }
            fft = stepper.transforms();
        }
    }
    series.fft_count = fft;
    let summary = ManifestSummary {
        steps: plan.total,
        transforms_per_step: per_step(fft, plan.total),
        wall_seconds: start.elapsed().as_secs_f64(),
        final_measures: last,
    };
    write_manifest(&out.join("manifest.csv"), &series, &cfg, &summary)?;
    let mut report = format!(
        "propagated {} steps of dt = {} ({} picture, {}), {} transforms per step\n",
        plan.total,
        cfg.dt,
        cfg.picture.name(),
        cfg.scheme.name(),
        summary.transforms_per_step
    );
    report.push_str(&format!(
        "norm drift {:e}, energy drift {:e}\n",
        series.norm_drift(),
        series.energy_drift()
    ));
    if let Some(m) = &last {
        report.push_str(&format!(
            "final: w_overlap {:e}, l2 {:e}, max_diff {:e}{}\n",
            m.w_overlap,
            m.l2,
            m.max_diff,
            m.psi_overlap.map(|v| format!(", psi_overlap {v:e}")).unwrap_or_default()
        ));
    }
    if cfg.render && cfg.picture == Picture::Wigner {
        for p in &written {
            let png = p.with_extension("png");
            render_file(p, &png, None)?;
        }
    }
    for p in &written {
        report.push_str(&format!("wrote {}\n", p.display()));
    }
    report.push_str(&format!("wrote {}\n", out.join("manifest.csv").display()));
    Ok(report)
}

fn zero_measures(psi: Option<f64>) -> ErrorMeasures {
    ErrorMeasures {
        w_overlap: 0.0,
        psi_overlap: psi,
        l2: 0.0,
        max_diff: 0.0,
    }
}

/// One point of a step-size sweep.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub dt: f64,
    pub energy: f64,
    pub measures: ErrorMeasures,
    pub transforms_per_step: usize,
}

/// Runs Wigner and Schrödinger Kerr trajectories for every step size,
/// `jobs` at a time. Points come back in the order of `dts`.
pub fn run_sweep(cfg: &RunConfig, dts: &[f64], jobs: Option<usize>) -> Result<Vec<SweepPoint>> {
    let grid = cfg.phase_grid()?;
    let line = cfg.line_grid()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| {
        dts.par_iter()
            .map(|&dt| {
                let mut run = KerrRun::new(cfg.x0, cfg.p0, dt, cfg.t_final, cfg.kerr_options());
                run.samples = cfg.samples;
                let (psi_run, _) = run_kerr_schrodinger(&line, &grid, &run)?;
                let (energy, mut measures, tps) = match cfg.picture {
                    Picture::Wigner => {
                        let (w_run, _) = run_kerr_wigner(&grid, &run)?;
                        (w_run.series.energy_drift(), w_run.final_measures, w_run.transforms_per_step)
                    }
                    Picture::Schrodinger => (
                        psi_run.series.energy_drift(),
                        psi_run.final_measures,
                        psi_run.transforms_per_step,
                    ),
                };
                measures.psi_overlap = psi_run.final_measures.psi_overlap;
                Ok(SweepPoint {
                    dt,
                    energy,
                    measures,
                    transforms_per_step: tps,
                })
            })
            .collect()
    })
}

fn cmd_scaling(a: &ScalingArgs) -> Result<String> {
    let mut cfg = load_config(&a.config, &a.overrides)?;
    if cfg.hamiltonian.is_some() || cfg.classical_limit {
        return Err(Error::Config {
            line: 0,
            message: "scaling sweeps need the quantum Kerr Hamiltonian".into(),
        });
    }
    if let Some(d) = &a.dts {
        cfg.dts = d.clone();
        cfg.validate()?;
    }
    let mut dts = cfg.dts.clone();
    dts.sort_by(|x, y| x.total_cmp(y));
    dts.dedup();
    let out = cfg.output_dir();
    create_dir(&out)?;
    let points = run_sweep(&cfg, &dts, a.jobs)?;
    let mut csv = String::from("dt,energy,w_overlap,psi_overlap,l2,max_diff,fft_per_step\n");
    for p in &points {
        csv.push_str(&format!(
            "{:e},{:e},{:e},{:e},{:e},{:e},{}\n",
            p.dt,
            p.energy,
            p.measures.w_overlap,
            p.measures.psi_overlap.unwrap_or(f64::NAN),
            p.measures.l2,
            p.measures.max_diff,
            p.transforms_per_step
        ));
    }
    let csv_path = out.join("scaling.csv");
    std::fs::write(&csv_path, &csv).map_err(|e| Error::io("writing scaling.csv", e))?;
    let mut fits = format!(
        "# scheme = {}, t_final = {}, picture = {}\nmeasure,exponent,intercept,r_squared,points\n",
        cfg.scheme.name(),
        cfg.t_final,
        cfg.picture.name()
    );
    let dtv: Vec<f64> = points.iter().map(|p| p.dt).collect();
    for m in Measure::ALL {
        let errs: Vec<f64> = points
            .iter()
            .map(|p| match m {
                Measure::Energy => p.energy,
                other => p.measures.get(other).unwrap_or(f64::NAN),
            })
            .collect();
        match fit_scaling(&dtv, &errs) {
            Ok(f) => fits.push_str(&format!(
                "{},{:.6},{:.6},{:.6},{}\n",
                m.name(),
                f.exponent,
                f.intercept,
                f.r_squared,
                f.dts.len()
            )),
            Err(e) => fits.push_str(&format!("{},,,,{}\n", m.name(), e)),
        }
    }
    let fit_path = out.join("fits.csv");
    std::fs::write(&fit_path, &fits).map_err(|e| Error::io("writing fits.csv", e))?;
    Ok(format!("{csv}\n{fits}\nwrote {}\nwrote {}\n", csv_path.display(), fit_path.display()))
}

/// Human-readable listing of a decomposition.
pub fn decomposition_report(result: &DecompositionResult) -> String {
    let mut s = format!("target: {}\n", result.target);
    if result.terms.is_empty() {
        s.push_str("no terms\n");
    }
    for t in result.sorted_terms() {
        s.push_str(&format!("{}  coefficient {}\n", t.element.label(), t.coefficient));
    }
    if result.is_exact() {
        s.push_str("residual: 0\n");
    } else {
        s.push_str(&format!("residual: {}\n", result.residual));
        let mono: Vec<String> = result
            .unreachable
            .iter()
            .map(|(i, j)| format!("x^{i} p^{j}"))
            .collect();
        s.push_str(&format!("unreachable monomials: {}\n", mono.join(", ")));
    }
    s
}

fn cmd_decompose(a: &DecomposeArgs) -> Result<String> {
    let target: PolynomialXP = parse_polynomial(&a.polynomial)?;
    let bracket = match a.bracket {
        BracketArg::Moyal => BracketKind::Moyal,
        BracketArg::Poisson => BracketKind::Poisson,
    };
    let kind = SchemeKind::parse(&a.scheme)?;
    let t2 = a.t2.unwrap_or_else(crate::schemes::default_t2);
    let result = decompose(&target, bracket)?;
    let report = decomposition_report(&result);
    if !result.is_exact() {
        eprint!("{report}");
        return Err(Error::NonzeroResidual(result.residual.to_string()));
    }
    let schedule = schedule_from_decomposition(&result, kind, t2)?;
    let path = resolve_output(&a.output);
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    let comments = vec![format!("target = {}", a.polynomial), format!("bracket = {:?}", bracket)];
    write_schedule(&path, &schedule, &comments)?;
    Ok(format!(
        "{report}schedule: {} items\nwrote {}\n",
        schedule.items.len(),
        path.display()
    ))
}

/// Diverging blue–white–red map; `v` is clamped to [−1, 1].
pub fn diverging_color(v: f64) -> Rgb<u8> {
    let v = if v.is_finite() { v.clamp(-1.0, 1.0) } else { 0.0 };
    // anchors: deep blue, white, deep red
    let (neg, pos) = ([0.019, 0.188, 0.380], [0.404, 0.0, 0.122]);
    let t = v.abs();
    let end = if v < 0.0 { neg } else { pos };
    let c = |k: usize| ((1.0 - t) + t * end[k]) * 255.0;
    Rgb([c(0).round() as u8, c(1).round() as u8, c(2).round() as u8])
}

/// W(x,p) as an image: x to the right, p upward, one pixel per cell.
pub fn render_wigner(w: &ndarray::Array2<f64>, scale: f64) -> RgbImage {
    let (nx, np) = w.dim();
    RgbImage::from_fn(nx as u32, np as u32, |i, j| {
        let row = np - 1 - j as usize;
        diverging_color(w[[i as usize, row]] / scale)
    })
}

fn render_file(snapshot: &Path, png: &Path, scale: Option<f64>) -> Result<()> {
    let snap = read_snapshot(snapshot)?;
    let w = snap.wigner_xp().ok_or_else(|| Error::Snapshot {
        path: snapshot.to_path_buf(),
        message: "wavefunction snapshots have no phase-space field to render".into(),
    })?;
    let scale = scale.unwrap_or(1.0 / (std::f64::consts::PI * snap.header.hbar));
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("color scale {scale} must be positive")));
    }
    render_wigner(w, scale)
        .save(png)
        .map_err(|e| Error::io(format!("writing {}", png.display()), std::io::Error::other(e)))
}

fn cmd_render(a: &RenderArgs) -> Result<String> {
    let mut report = String::new();
    if let Some(dir) = &a.output {
        create_dir(dir)?;
    }
    for snap in &a.snapshots {
        let png = match &a.output {
            Some(dir) => dir.join(snap.with_extension("png").file_name().unwrap_or_default()),
            None => snap.with_extension("png"),
        };
        render_file(snap, &png, a.scale)?;
        report.push_str(&format!("wrote {}\n", png.display()));
    }
    Ok(report)
}
