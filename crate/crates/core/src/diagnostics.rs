//! Overlap and distance measures between states, run bookkeeping and
//! log-log scaling fits.

use std::f64::consts::PI;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::grid::{LineGrid, PhaseGrid, Representation, C64};
use crate::moyal::PolynomialXP;
use crate::oracle::{evolve_exact_kerr, fock_expand, psi_on_grid};
use crate::schemes::{kerr_hamiltonian, KerrOptions, KerrSchrodingerPropagator, KerrWignerPropagator};
use crate::states::{
    coherent_wavefunction, coherent_wigner, quadrature, wigner_of_wavefunction, EDGE_ALARM, WaveFunction,
    WignerState,
};

/// Errors at or below this value are treated as round-off and left out of fits.
pub const FIT_FLOOR: f64 = 1e-12;
/// Minimum number of usable points for [`fit_scaling`].
pub const MIN_FIT_POINTS: usize = 4;

/// `2πℏ ∫∫ a·b dx dp`.
///
/// Both states must live on the same grid; `b` is moved into `a`'s
/// representation first. The real part of the sesquilinear form is returned,
/// which equals the bilinear one for real Wigner functions.
pub fn overlap_wigner(a: &WignerState, b: &WignerState) -> Result<f64> {
    if !a.grid.same_as(&b.grid) {
        return Err(Error::IncompatibleGrid("overlap of states on different grids".into()));
    }
    let b = if b.rep == a.rep { b.clone() } else { b.in_rep(a.rep)? };
    let g = &a.grid;
    let s: C64 = a.data.iter().zip(b.data.iter()).map(|(u, v)| u * v.conj()).sum();
    let cell = match a.rep {
        Representation::XP => g.x.step * g.p.step,
        Representation::XTheta => g.x.step * g.theta.step * 2.0 * PI,
        Representation::LambdaP => g.lambda.step * g.p.step / (2.0 * PI),
        other => {
            return Err(Error::RepresentationMismatch {
                expected: Representation::XTheta,
                found: other,
            })
        }
    };
    Ok(2.0 * PI * g.hbar * s.re * cell)
}

/// The four distances between a numerical and a reference state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorMeasures {
    /// `1 − ⟨W_e|W⟩`.
    pub w_overlap: f64,
    /// `1 − |⟨ψ_e|ψ⟩|²`, present only when both states are wavefunctions.
    pub psi_overlap: Option<f64>,
    /// `⟨W_e−W|W_e−W⟩^{1/2}` with the overlap inner product.
    pub l2: f64,
    /// `max |W_e − W|` over the `(x, p)` lattice.
    pub max_diff: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Measure {
    Energy,
    WOverlap,
    PsiOverlap,
    L2,
    MaxDiff,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::Energy,
        Measure::WOverlap,
        Measure::PsiOverlap,
        Measure::L2,
        Measure::MaxDiff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Energy => "energy",
            Measure::WOverlap => "w_overlap",
            Measure::PsiOverlap => "psi_overlap",
            Measure::L2 => "l2",
            Measure::MaxDiff => "max_diff",
        }
    }
}

impl ErrorMeasures {
    pub fn get(&self, m: Measure) -> Option<f64> {
        match m {
            Measure::Energy => None,
            Measure::WOverlap => Some(self.w_overlap),
            Measure::PsiOverlap => self.psi_overlap,
            Measure::L2 => Some(self.l2),
            Measure::MaxDiff => Some(self.max_diff),
        }
    }
}

/// Measures between two Wigner states on the same grid.
pub fn error_measures(numeric: &WignerState, exact: &WignerState) -> Result<ErrorMeasures> {
    let a = numeric.in_rep(Representation::XP)?;
    let b = exact.in_rep(Representation::XP)?;
    let ov = overlap_wigner(&b, &a)?;
    let diff = WignerState::new(a.grid.clone(), &b.data - &a.data, Representation::XP)?;
    let l2 = overlap_wigner(&diff, &diff)?.max(0.0).sqrt();
    let max_diff = diff.data.iter().map(|v| v.re.abs()).fold(0.0, f64::max);
    Ok(ErrorMeasures {
        w_overlap: 1.0 - ov,
        psi_overlap: None,
        l2,
        max_diff,
    })
}

/// Measures between two wavefunctions; the Wigner measures use `grid`.
pub fn error_measures_wavefunction(
    numeric: &WaveFunction,
    exact: &WaveFunction,
    grid: &PhaseGrid,
) -> Result<ErrorMeasures> {
    let a = numeric.in_rep(Representation::Position)?;
    let b = exact.in_rep(Representation::Position)?;
    let ov = b.inner(&a)?;
    let wa = wigner_of_wavefunction(&a, grid)?;
    let wb = wigner_of_wavefunction(&b, grid)?;
    let mut m = error_measures(&wa, &wb)?;
    m.psi_overlap = Some(1.0 - ov.norm_sqr());
    Ok(m)
}

/// Least-squares line through `(ln dt, ln error)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits `error ≈ e^{intercept} dt^{exponent}`, skipping points at or below
/// [`FIT_FLOOR`].
pub fn fit_scaling(dts: &[f64], errors: &[f64]) -> Result<ScalingFit> {
    if dts.len() != errors.len() {
        return Err(Error::InvalidParameter(format!(
            "{} step sizes but {} errors",
            dts.len(),
            errors.len()
        )));
    }
    let (kept_dt, kept_err): (Vec<f64>, Vec<f64>) = dts
        .iter()
        .zip(errors)
        .filter(|(d, e)| **d > 0.0 && d.is_finite() && e.is_finite() && **e > FIT_FLOOR)
        .map(|(d, e)| (*d, *e))
        .unzip();
    if kept_dt.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientFitPoints {
            needed: MIN_FIT_POINTS,
            got: kept_dt.len(),
        });
    }
    let xs: Vec<f64> = kept_dt.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = kept_err.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("step sizes are all equal".into()));
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - exponent * x).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(ScalingFit {
        dts: kept_dt,
        errors: kept_err,
        exponent,
        intercept,
        r_squared,
    })
}

/// Time series recorded along one trajectory.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunSeries {
    pub times: Vec<f64>,
    pub norm: Vec<f64>,
    pub energy: Vec<f64>,
    /// `1 − |overlap with the exact state at the same time|`, per sample.
    pub overlaps: Vec<(Measure, Vec<f64>)>,
    pub fft_count: usize,
}

impl RunSeries {
    pub fn push(&mut self, t: f64, norm: f64, energy: f64, measures: &ErrorMeasures) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::InvalidParameter(format!(
                    "sample time {t} does not follow {last}"
                )));
            }
        }
        self.times.push(t);
        self.norm.push(norm);
        self.energy.push(energy);
        for m in [Measure::WOverlap, Measure::PsiOverlap, Measure::L2, Measure::MaxDiff] {
            if let Some(v) = measures.get(m) {
                match self.overlaps.iter_mut().find(|(k, _)| *k == m) {
                    Some((_, vs)) => vs.push(v),
                    None => self.overlaps.push((m, vec![v])),
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn measure(&self, m: Measure) -> Option<&[f64]> {
        self.overlaps
            .iter()
            .find(|(k, _)| *k == m)
            .map(|(_, v)| v.as_slice())
    }

    /// `max_t |E(t) − E(0)|`.
    pub fn energy_drift(&self) -> f64 {
        match self.energy.first() {
            Some(e0) => self.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max),
            None => 0.0,
        }
    }

    /// `max_t |N(t) − 1|`.
    pub fn norm_drift(&self) -> f64 {
        self.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Kerr trajectory from a coherent state at `(x0, p0)`.
#[derive(Clone, Copy, Debug)]
pub struct KerrRun {
    pub x0: f64,
    pub p0: f64,
    pub dt: f64,
    pub t_final: f64,
    pub options: KerrOptions,
    /// Number of evenly spaced samples after `t = 0`.
    pub samples: usize,
}

impl KerrRun {
    pub fn new(x0: f64, p0: f64, dt: f64, t_final: f64, options: KerrOptions) -> Self {
        KerrRun {
            x0,
            p0,
            dt,
            t_final,
            options,
            samples: 40,
        }
    }

    /// Step counts between samples; the last sample lands on `t_final`
    /// rounded to whole steps.
    fn plan(&self) -> Result<Vec<usize>> {
        if !(self.dt > 0.0 && self.dt.is_finite() && self.t_final >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "run needs dt > 0 and t_final >= 0, got dt = {}, t_final = {}",
                self.dt, self.t_final
            )));
        }
        let total = (self.t_final / self.dt).round() as usize;
        let samples = self.samples.max(1).min(total.max(1));
        let mut out = Vec::with_capacity(samples);
        let mut done = 0;
        for k in 1..=samples {
            let target = total * k / samples;
            if target > done {
                out.push(target - done);
                done = target;
            }
        }
        Ok(out)
    }
}

/// Result of a trajectory: the series plus the measures at the final time.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub series: RunSeries,
    pub final_measures: ErrorMeasures,
    pub transforms_per_step: usize,
    pub steps: usize,
    pub wall_seconds: f64,
}

impl RunOutcome {
    /// Final-time value of a measure; `Energy` maps to the energy drift.
    pub fn value(&self, m: Measure) -> Option<f64> {
        match m {
            Measure::Energy => Some(self.series.energy_drift()),
            other => self.final_measures.get(other),
        }
    }
}

/// Exact Kerr wavefunction at time `t` for a coherent start.
pub fn exact_kerr_wavefunction(line: &LineGrid, x0: f64, p0: f64, t: f64) -> Result<WaveFunction> {
    let fock = fock_expand(x0, p0, line.hbar, 1e-15)?;
    psi_on_grid(&evolve_exact_kerr(&fock, t, line.hbar), line)
}

/// Exact Kerr Wigner function at time `t`.
///
/// At multiples of `π` (ℏ = 1) the dynamics recurs, and the initial state is
/// sampled analytically instead of going through the Fock sum.
pub fn exact_kerr_wigner(grid: &PhaseGrid, x0: f64, p0: f64, t: f64) -> Result<WignerState> {
    let period = PI / grid.hbar;
    let r = (t / period).round();
    if (t - r * period).abs() < 1e-12 * period.max(t.abs()) {
        return coherent_wigner(grid, x0, p0);
    }
    let line = LineGrid::new(grid.x, grid.hbar)?;
    wigner_of_wavefunction(&exact_kerr_wavefunction(&line, x0, p0, t)?, grid)
}

/// Wigner-picture Kerr run, measured against the exact state at each sample.
pub fn run_kerr_wigner(grid: &PhaseGrid, run: &KerrRun) -> Result<(RunOutcome, WignerState)> {
    let start = Instant::now();
    let plan = run.plan()?;
    let h = kerr_hamiltonian();
    let mut state = coherent_wigner(grid, run.x0, run.p0)?;
    let mut prop = KerrWignerPropagator::new(grid, run.dt, run.options)?;
    let mut series = RunSeries::default();
    let zero = ErrorMeasures {
        w_overlap: 1.0 - overlap_wigner(&state, &state)?,
        psi_overlap: None,
        l2: 0.0,
        max_diff: 0.0,
    };
    series.push(0.0, state.norm(), energy_of(&state, &h)?, &zero)?;
    let mut steps = 0usize;
    let mut last = zero;
    for chunk in plan {
        prop.run(&mut state, chunk)?;
        steps += chunk;
        let t = steps as f64 * run.dt;
        let exact = exact_kerr_wigner(grid, run.x0, run.p0, t)?;
        last = error_measures(&state, &exact)?;
        series.push(t, state.norm(), energy_of(&state, &h)?, &last)?;
    }
    series.fft_count = prop.transforms();
    let outcome = RunOutcome {
        series,
        final_measures: last,
        transforms_per_step: prop.transforms_per_step(),
        steps,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((outcome, state))
}

/// Schrödinger-picture Kerr run; `grid` supplies the Wigner measures.
pub fn run_kerr_schrodinger(
    line: &LineGrid,
    grid: &PhaseGrid,
    run: &KerrRun,
) -> Result<(RunOutcome, WaveFunction)> {
    let start = Instant::now();
    let plan = run.plan()?;
    let h = kerr_hamiltonian();
    let mut psi = coherent_wavefunction(line, run.x0, run.p0)?;
    let mut prop = KerrSchrodingerPropagator::new(line, run.dt, run.options)?;
    let mut series = RunSeries::default();
    let zero = ErrorMeasures {
        w_overlap: 0.0,
        psi_overlap: Some(0.0),
        l2: 0.0,
        max_diff: 0.0,
    };
    series.push(0.0, psi.norm(), psi.expectation(&h)?, &zero)?;
    let mut steps = 0usize;
    let mut last = zero;
    for chunk in plan {
        prop.run(&mut psi, chunk)?;
        steps += chunk;
        let t = steps as f64 * run.dt;
        let exact = exact_kerr_wavefunction(line, run.x0, run.p0, t)?;
        last = error_measures_wavefunction(&psi, &exact, grid)?;
        let pos = psi.in_rep(Representation::Position)?;
        let mass = pos.boundary_mass()?;
        if mass > EDGE_ALARM {
            return Err(Error::BoundaryMass {
                mass,
                limit: EDGE_ALARM,
            });
        }
        series.push(t, pos.norm(), pos.expectation(&h)?, &last)?;
    }
    series.fft_count = prop.transforms();
    let outcome = RunOutcome {
        series,
        final_measures: last,
        transforms_per_step: prop.transforms_per_step(),
        steps,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((outcome, psi))
}

/// Energy by quadrature, guarded by the edge alarm rather than the weighted
/// strip test, which round-off trips for quartic symbols on long runs.
fn energy_of(state: &WignerState, h: &PolynomialXP) -> Result<f64> {
    let edge = state.edge_max()?;
    if edge > EDGE_ALARM {
        return Err(Error::BoundaryMass {
            mass: edge,
            limit: EDGE_ALARM,
        });
    }
    Ok(quadrature(state, h)?.0)
}
