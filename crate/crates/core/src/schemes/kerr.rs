//! Hand-written Kerr propagators, `H = (p²+x²)²/4` written as
//! `p⁴/4 + x⁴/4 + [p̂²,x̂²]₊/4`, with the anticommutator produced by a Chin
//! block of `T = p²/(2√2)`, `V = x⁴/12`.

use std::f64::consts::SQRT_2;

use ndarray::{Array1, Array2, Zip};
use num_complex::Complex64 as C64;

use super::bch::{chin_sigma, effective_epsilon, kerr_prefactor};
use super::coefficients::{scheme_for, Role, SchemeKind, SplitScheme};
use crate::error::{Error, Result};
use crate::grid::{DiagonalFactor, LineGrid, PhaseGrid, Representation};
use crate::states::{WaveFunction, WignerState, EDGE_ALARM};

/// Placement of the separable factors around the block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OuterSplitting {
    /// Half-weight separable factors on both sides of the block.
    #[default]
    Symmetric,
    /// Kinetic factor, block, potential factor.
    FirstOrder,
}

impl OuterSplitting {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "symmetric" => Ok(OuterSplitting::Symmetric),
            "first_order" | "first-order" | "firstorder" => Ok(OuterSplitting::FirstOrder),
            other => Err(Error::InvalidParameter(format!(
                "unknown splitting '{other}' (expected symmetric or first_order)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OuterSplitting::Symmetric => "symmetric",
            OuterSplitting::FirstOrder => "first_order",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KerrOptions {
    pub kind: SchemeKind,
    pub t2: f64,
    pub splitting: OuterSplitting,
    /// Replace sector differences by their ℏ → 0 limit (Liouville flow).
    pub classical: bool,
}

impl Default for KerrOptions {
    fn default() -> Self {
        KerrOptions {
            kind: SchemeKind::U9,
            t2: super::coefficients::default_t2(),
            splitting: OuterSplitting::Symmetric,
            classical: false,
        }
    }
}

impl KerrOptions {
    pub fn with_kind(kind: SchemeKind) -> Self {
        KerrOptions {
            kind,
            ..Default::default()
        }
    }
}

/// One factor of a step, before discretization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum KerrPiece {
    /// `exp(−i dt w p⁴/4 /ℏ)`
    Kinetic(f64),
    /// `exp(−i dt w (x⁴/4 + c₆x⁶) /ℏ)`
    Potential(f64),
    /// Chin slot factors `exp(ε w T)` and `exp(ε w V)`.
    BlockT(f64),
    BlockV(f64),
}

impl KerrPiece {
    fn is_momentum(self) -> bool {
        matches!(self, KerrPiece::Kinetic(_) | KerrPiece::BlockT(_))
    }
}

/// Ordered factor list of one step and the x⁶ coefficient of the outer
/// potential.
pub(crate) fn kerr_pieces(scheme: &SplitScheme, splitting: OuterSplitting) -> Result<(Vec<KerrPiece>, f64)> {
    let block: Vec<KerrPiece> = scheme
        .numeric_factors()
        .into_iter()
        .map(|(role, w)| match role {
            Role::Kinetic => KerrPiece::BlockT(w),
            Role::Potential => KerrPiece::BlockV(w),
        })
        .collect();
    let c6 = match &scheme.compensation {
        Some(c) => {
            let corr = c.potential_correction();
            if !corr.is_x_only() {
                return Err(Error::InvalidParameter("compensation is not a potential".into()));
            }
            corr.coefficient(6, 0).eval(1.0) * scheme.t2.powi(c.t2_power)
        }
        None => 0.0,
    };
    let mut out = Vec::with_capacity(block.len() + 4);
    match (scheme.kind, splitting) {
        (SchemeKind::Strang, _) => {
            return Err(Error::InvalidParameter(
                "the Kerr propagator needs a block scheme (u9 or u7)".into(),
            ))
        }
        (SchemeKind::U9, OuterSplitting::Symmetric) => {
            out.push(KerrPiece::Kinetic(0.5));
            out.push(KerrPiece::Potential(0.5));
            out.extend(block);
            out.push(KerrPiece::Potential(0.5));
            out.push(KerrPiece::Kinetic(0.5));
        }
        (SchemeKind::U7, OuterSplitting::Symmetric) => {
            out.push(KerrPiece::Potential(0.5));
            out.push(KerrPiece::Kinetic(0.5));
            out.extend(block);
            out.push(KerrPiece::Kinetic(0.5));
            out.push(KerrPiece::Potential(0.5));
        }
        (_, OuterSplitting::FirstOrder) => {
            out.push(KerrPiece::Kinetic(1.0));
            out.extend(block);
            out.push(KerrPiece::Potential(1.0));
        }
    }
    Ok((out, c6))
}

/// Number of representation changes per step in steady state.
fn cyclic_switches(reps: &[Representation]) -> usize {
    if reps.len() < 2 {
        return 0;
    }
    let inner = reps.windows(2).filter(|w| w[0] != w[1]).count();
    inner + usize::from(reps[reps.len() - 1] != reps[0])
}

fn merge_stages<T>(
    stages: Vec<(Representation, T)>,
    mut fuse: impl FnMut(&mut T, T),
) -> Vec<(Representation, T)> {
    let mut out: Vec<(Representation, T)> = Vec::with_capacity(stages.len());
    for (rep, s) in stages {
        match out.last_mut() {
            Some((r, acc)) if *r == rep => fuse(acc, s),
            _ => out.push((rep, s)),
        }
    }
    out
}

/// Sector differences of the Kerr symbols; `h` is ℏ, or 0 for the
/// classical limit.
mod sector {
    use super::SQRT_2;

    /// `(K(P₊) − K(P₋))/ℏ` for `K = p⁴/4`.
    pub fn kinetic(lambda: f64, p: f64, h: f64) -> f64 {
        lambda * p * (p * p + 0.25 * h * h * lambda * lambda)
    }

    /// `(T(P₊) − T(P₋))/ℏ` for `T = p²/(2√2)`.
    pub fn block_t(lambda: f64, p: f64) -> f64 {
        lambda * p / SQRT_2
    }

    /// `(V(X₋) − V(X₊))/ℏ` for `V = x⁴/4 + c₆x⁶`.
    pub fn potential(x: f64, theta: f64, h: f64, c6: f64) -> f64 {
        let h2 = h * h;
        let th2 = theta * theta;
        let quartic = -x * theta * (x * x + 0.25 * h2 * th2);
        if c6 == 0.0 {
            return quartic;
        }
        let x2 = x * x;
        let sextic = -x * theta * (6.0 * x2 * x2 + h2 * th2 * (5.0 * x2 + 0.375 * h2 * th2));
        quartic + c6 * sextic
    }

    /// `(V(X₋) − V(X₊))/ℏ` for `V = x⁴/12`.
    pub fn block_v(x: f64, theta: f64, h: f64) -> f64 {
        -x * theta * (x * x + 0.25 * h * h * theta * theta) / 3.0
    }
}

/// Wigner-picture Kerr propagator with precomputed, fused multipliers.
#[derive(Clone, Debug)]
pub struct KerrWignerPropagator {
    grid: PhaseGrid,
    dt: f64,
    options: KerrOptions,
    stages: Vec<DiagonalFactor>,
    transforms: usize,
}

impl KerrWignerPropagator {
    pub fn new(grid: &PhaseGrid, dt: f64, options: KerrOptions) -> Result<Self> {
        if !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be finite, got {dt}")));
        }
        let scheme = scheme_for(options.kind, options.t2)?;
        let (pieces, c6) = kerr_pieces(&scheme, options.splitting)?;
        let h = if options.classical { 0.0 } else { grid.hbar };
        let plain = C64::new(0.0, -dt);
        let sigma = chin_sigma(dt);

        let mut raw: Vec<(Representation, Array2<C64>)> = Vec::with_capacity(pieces.len());
        for piece in pieces {
            let (rep, field) = if piece.is_momentum() {
                let sym = match piece {
                    KerrPiece::Kinetic(w) => {
                        grid.sample(Representation::LambdaP, |l, p| w * sector::kinetic(l, p, h))?
                    }
                    KerrPiece::BlockT(w) => {
                        grid.sample(Representation::LambdaP, |l, p| w * sector::block_t(l, p))?
                    }
                    _ => unreachable!(),
                };
                (Representation::LambdaP, (piece, sym))
            } else {
                let sym = match piece {
                    KerrPiece::Potential(w) => grid.sample(Representation::XTheta, |x, t| {
                        w * sector::potential(x, t, h, c6)
                    })?,
                    KerrPiece::BlockV(w) => {
                        grid.sample(Representation::XTheta, |x, t| w * sector::block_v(x, t, h))?
                    }
                    _ => unreachable!(),
                };
                (Representation::XTheta, (piece, sym))
            };
            let coef = match field.0 {
                KerrPiece::Kinetic(_) | KerrPiece::Potential(_) => plain,
                _ => sigma,
            };
            raw.push((rep, field.1.mapv(|s| coef * s)));
        }
        let fused = merge_stages(raw, |acc, e| *acc += &e);
        let stages = fused
            .into_iter()
            .map(|(rep, e)| DiagonalFactor::from_exponent(rep, e))
            .collect::<Result<Vec<_>>>()?;
        Ok(KerrWignerPropagator {
            grid: grid.clone(),
            dt,
            options,
            stages,
            transforms: 0,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn options(&self) -> &KerrOptions {
        &self.options
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    /// Full 2-D transforms per step once the state sits in the first stage's
    /// representation.
    pub fn transforms_per_step(&self) -> usize {
        let reps: Vec<_> = self.stages.iter().map(|s| s.rep).collect();
        cyclic_switches(&reps)
    }

    /// Full 2-D transforms applied so far.
    pub fn transforms(&self) -> usize {
        self.transforms
    }

    /// Largest `||m| − 1|` over all stage multipliers.
    pub fn unitarity_defect(&self) -> f64 {
        self.stages
            .iter()
            .map(|s| s.unitarity_defect())
            .fold(0.0, f64::max)
    }

    /// Advances one step. The state is left in the representation of the
    /// last stage.
    pub fn step(&mut self, state: &mut WignerState) -> Result<()> {
        if !state.grid.same_as(&self.grid) {
            return Err(Error::IncompatibleGrid(
                "state grid differs from propagator grid".into(),
            ));
        }
        for stage in &self.stages {
            if state.rep != stage.rep {
                state.to_rep(stage.rep)?;
                self.transforms += 1;
            }
            stage.apply(&mut state.data, state.rep)?;
        }
        Ok(())
    }

    pub fn run(&mut self, state: &mut WignerState, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step(state)?;
        }
        Ok(())
    }
}

/// One Kerr step of the Wigner function, with the edge alarm.
pub fn kerr_step_wigner(state: &mut WignerState, dt: f64, kind: SchemeKind) -> Result<()> {
    let mut prop = KerrWignerPropagator::new(&state.grid, dt, KerrOptions::with_kind(kind))?;
    prop.step(state)?;
    let edge = state.edge_max()?;
    if edge > EDGE_ALARM {
        return Err(Error::BoundaryMass {
            mass: edge,
            limit: EDGE_ALARM,
        });
    }
    Ok(())
}

/// Schrödinger-picture Kerr propagator on a line grid.
#[derive(Clone, Debug)]
pub struct KerrSchrodingerPropagator {
    grid: LineGrid,
    dt: f64,
    options: KerrOptions,
    stages: Vec<(Representation, Array1<C64>)>,
    transforms: usize,
}

impl KerrSchrodingerPropagator {
    pub fn new(grid: &LineGrid, dt: f64, options: KerrOptions) -> Result<Self> {
        if !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be finite, got {dt}")));
        }
        if options.classical {
            return Err(Error::InvalidParameter(
                "the classical limit is only defined for the Wigner picture".into(),
            ));
        }
        let hbar = grid.hbar;
        let scheme = scheme_for(options.kind, options.t2)?;
        let (pieces, c6) = kerr_pieces(&scheme, options.splitting)?;
        let eps = effective_epsilon(dt, hbar, kerr_prefactor(hbar))?;
        let plain = C64::new(0.0, -dt / hbar);
        let xs = grid.x.points();
        let ps = grid.momenta();

        let mut raw: Vec<(Representation, Array1<C64>)> = Vec::with_capacity(pieces.len());
        for piece in pieces {
            let (rep, e) = match piece {
                KerrPiece::Kinetic(w) => (
                    Representation::Momentum,
                    ps.mapv(|p| plain * (w * 0.25 * p.powi(4))),
                ),
                KerrPiece::BlockT(w) => (
                    Representation::Momentum,
                    ps.mapv(|p| eps * (w * p * p / (2.0 * SQRT_2))),
                ),
                KerrPiece::Potential(w) => (
                    Representation::Position,
                    xs.mapv(|x| plain * (w * (0.25 * x.powi(4) + c6 * x.powi(6)))),
                ),
                KerrPiece::BlockV(w) => (
                    Representation::Position,
                    xs.mapv(|x| eps * (w * x.powi(4) / 12.0)),
                ),
            };
            raw.push((rep, e));
        }
        let mut fused = merge_stages(raw, |acc, e| *acc += &e);
        // The anticommutator form differs from (p²+x²)²/4 by ℏ²/4.
        if let Some((_, first)) = fused.first_mut() {
            first.mapv_inplace(|e| e + C64::new(0.0, dt * hbar / 4.0));
        }
        let mut stages = Vec::with_capacity(fused.len());
        for (rep, e) in fused {
            let m = e.mapv(|v| v.exp());
            if let Some(index) = m.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
                return Err(Error::NonFiniteExponent { index });
            }
            stages.push((rep, m));
        }
        Ok(KerrSchrodingerPropagator {
            grid: grid.clone(),
            dt,
            options,
            stages,
            transforms: 0,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn options(&self) -> &KerrOptions {
        &self.options
    }

    pub fn transforms_per_step(&self) -> usize {
        let reps: Vec<_> = self.stages.iter().map(|s| s.0).collect();
        cyclic_switches(&reps)
    }

    pub fn transforms(&self) -> usize {
        self.transforms
    }

    pub fn step(&mut self, psi: &mut WaveFunction) -> Result<()> {
        if psi.grid.x.n != self.grid.x.n || !psi.grid.x.same_as(&self.grid.x) {
            return Err(Error::IncompatibleGrid(
                "wavefunction grid differs from propagator grid".into(),
            ));
        }
        for (rep, m) in &self.stages {
            if psi.rep != *rep {
                psi.to_rep(*rep)?;
                self.transforms += 1;
            }
            Zip::from(&mut psi.data).and(m).for_each(|a, b| *a *= b);
        }
        Ok(())
    }

    pub fn run(&mut self, psi: &mut WaveFunction, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step(psi)?;
        }
        Ok(())
    }
}
