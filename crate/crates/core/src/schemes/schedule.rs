//! Generic step built from a list of factors, for any polynomial Hamiltonian
//! whose non-separable part has an exact bracket expansion.

use ndarray::{Array1, Array2, Zip};
use num_complex::Complex64 as C64;

use super::bch::{chin_sigma, effective_epsilon, GeneratorPair};
use super::coefficients::{scheme_for, Role, SchemeKind};
use super::kerr::OuterSplitting;
use crate::decomposer::{decompose, BasisKind, DecompositionResult};
use crate::error::{Error, Result};
use crate::grid::{DiagonalFactor, LineGrid, PhaseGrid, Representation};
use crate::moyal::{parse_polynomial, BracketKind, HbarPoly, PolynomialXP, Surd};
use crate::oracle::{matrix_rep, TruncatedOperator};
use crate::states::{WaveFunction, WignerState};

#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleItem {
    /// `exp(−i dt w h/ℏ)` for a function of x alone or p alone.
    Diagonal { symbol: PolynomialXP, weight: f64 },
    /// A Chin block realizing `{{A,{{A,B}}}}` for one time step, with A in
    /// the kinetic slot of the pair.
    Chin {
        kind: SchemeKind,
        t2: f64,
        pair: GeneratorPair,
    },
    /// Global phase `exp(−i dt w c/ℏ)`; no effect on a Wigner function.
    Phase { constant: HbarPoly, weight: f64 },
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Schedule {
    pub items: Vec<ScheduleItem>,
}

/// Kerr Hamiltonian `(p̂² + x̂²)²/4` as a Weyl symbol.
pub fn kerr_hamiltonian() -> PolynomialXP {
    parse_polynomial("(p^2 + x^2)^2/4 - hbar^2/4").expect("static symbol")
}

/// `α = 1/(2√2)` for the repeated generator.
fn chin_alpha() -> Surd {
    Surd::new(num_traits::Zero::zero(), crate::moyal::rational(1, 4))
}

fn single_variable(s: &PolynomialXP) -> bool {
    s.is_x_only() || s.is_p_only()
}

/// Splits `h` into (p-only part, x-only part, constant, rest); the
/// constant is removed from the first two.
pub fn separate(h: &PolynomialXP) -> (PolynomialXP, PolynomialXP, HbarPoly, PolynomialXP) {
    let constant = h.constant_term();
    let kinetic = h.filter(|i, j| i == 0 && j > 0);
    let potential = h.filter(|i, j| j == 0 && i > 0);
    let rest = h.filter(|i, j| i > 0 && j > 0);
    (kinetic, potential, constant, rest)
}

/// Blocks (and phases for constant elements) from an exact expansion, in
/// canonical order. The seven-factor corrections are returned separately as
/// `(x-only sum, p-only sum)`.
fn blocks_from(
    result: &DecompositionResult,
    kind: SchemeKind,
    t2: f64,
) -> Result<(Vec<ScheduleItem>, PolynomialXP, PolynomialXP)> {
    result.require_exact()?;
    if kind == SchemeKind::Strang && !result.terms.is_empty() {
        return Err(Error::InvalidParameter(
            "a non-separable Hamiltonian needs a block scheme (u9 or u7)".into(),
        ));
    }
    let alpha = chin_alpha();
    let mut items = Vec::new();
    let mut corr_x = PolynomialXP::zero();
    let mut corr_p = PolynomialXP::zero();
    for term in result.sorted_terms() {
        let e = &term.element;
        if e.is_constant() {
            items.push(ScheduleItem::Phase {
                constant: &term.coefficient * &e.expansion.constant_term(),
                weight: 1.0,
            });
            continue;
        }
        // {{A,{{A,B}}}} = α²β{{outer,{{outer,inner}}}}, and PXP carries the
        // opposite bracket order.
        let beta_sign = match e.kind {
            BasisKind::Xxp => Surd::from_int(8),
            BasisKind::Pxp => Surd::from_int(-8),
        };
        let a = e.outer_monomial().scale(&alpha);
        let b = e.inner_monomial().scale_hbar(&term.coefficient.scale(&beta_sign));
        let pair = GeneratorPair::new(a, b)?;
        if kind == SchemeKind::U7 {
            let c = pair.seven_factor_correction()?;
            let scaled = scale_numeric(&c, t2.powi(-3));
            if c.is_x_only() {
                corr_x += &scaled;
            } else {
                corr_p += &scaled;
            }
        }
        items.push(ScheduleItem::Chin { kind, t2, pair });
    }
    Ok((items, corr_x, corr_p))
}

/// Multiplies by a float, rounding each coefficient to a rational. Used only
/// for `t₂`-dependent corrections, which are evaluated numerically anyway.
fn scale_numeric(p: &PolynomialXP, s: f64) -> PolynomialXP {
    let mut out = PolynomialXP::zero();
    for ((i, j), c) in p.terms() {
        for (k, v) in c.terms() {
            let r = num_rational::BigRational::from_float(v.to_f64() * s)
                .unwrap_or_else(num_traits::Zero::zero);
            out.add_term(i, j, &HbarPoly::monomial(k, Surd::from_rational(r)));
        }
    }
    out
}

impl Schedule {
    pub fn new(items: Vec<ScheduleItem>) -> Self {
        Schedule { items }
    }

    /// Separable factors around the blocks of the non-separable part.
    pub fn for_hamiltonian(
        h: &PolynomialXP,
        kind: SchemeKind,
        t2: f64,
        splitting: OuterSplitting,
    ) -> Result<Schedule> {
        let (kin, pot, constant, rest) = separate(h);
        let result = decompose(&rest, BracketKind::Moyal)?;
        let (blocks, corr_x, corr_p) = blocks_from(&result, kind, t2)?;
        let kin = &kin + &corr_p;
        let pot = &pot + &corr_x;
        let diag = |symbol: &PolynomialXP, weight: f64| ScheduleItem::Diagonal {
            symbol: symbol.clone(),
            weight,
        };
        let mut items = Vec::new();
        match (kind, splitting) {
            (SchemeKind::U7, OuterSplitting::Symmetric) => {
                items.push(diag(&pot, 0.5));
                items.push(diag(&kin, 0.5));
                items.extend(blocks);
                items.push(diag(&kin, 0.5));
                items.push(diag(&pot, 0.5));
            }
            (_, OuterSplitting::Symmetric) => {
                items.push(diag(&kin, 0.5));
                items.push(diag(&pot, 0.5));
                items.extend(blocks);
                items.push(diag(&pot, 0.5));
                items.push(diag(&kin, 0.5));
            }
            (_, OuterSplitting::FirstOrder) => {
                items.push(diag(&kin, 1.0));
                items.extend(blocks);
                items.push(diag(&pot, 1.0));
            }
        }
        if !constant.is_zero() {
            items.push(ScheduleItem::Phase {
                constant,
                weight: 1.0,
            });
        }
        items.retain(|it| !matches!(it, ScheduleItem::Diagonal { symbol, .. } if symbol.is_zero()));
        Ok(Schedule { items })
    }

    pub fn kerr(kind: SchemeKind, t2: f64, splitting: OuterSplitting) -> Result<Schedule> {
        Schedule::for_hamiltonian(&kerr_hamiltonian(), kind, t2, splitting)
    }

    /// Hamiltonian realized at first order in dt.
    pub fn realized_hamiltonian(&self) -> PolynomialXP {
        let mut out = PolynomialXP::zero();
        for item in &self.items {
            match item {
                ScheduleItem::Diagonal { symbol, weight } => {
                    out += &scale_numeric(symbol, *weight);
                }
                ScheduleItem::Chin { pair, .. } => out += &pair.generated_hamiltonian(),
                ScheduleItem::Phase { constant, weight } => {
                    out += &scale_numeric(&PolynomialXP::hbar_constant(constant.clone()), *weight)
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        for item in &self.items {
            match item {
                ScheduleItem::Diagonal { symbol, weight } => {
                    if !single_variable(symbol) {
                        return Err(Error::InvalidParameter(format!(
                            "diagonal factor {symbol} depends on both x and p"
                        )));
                    }
                    if !weight.is_finite() {
                        return Err(Error::InvalidParameter("non-finite weight".into()));
                    }
                }
                ScheduleItem::Chin { kind, t2, pair } => {
                    scheme_for(*kind, *t2)?;
                    GeneratorPair::new(pair.t_symbol.clone(), pair.v_symbol.clone())?;
                }
                ScheduleItem::Phase { weight, .. } => {
                    if !weight.is_finite() {
                        return Err(Error::InvalidParameter("non-finite weight".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Expansion of an exact decomposition into blocks only (no separable
/// factors), in canonical order. Seven-factor corrections follow each block.
pub fn schedule_from_decomposition(
    result: &DecompositionResult,
    kind: SchemeKind,
    t2: f64,
) -> Result<Schedule> {
    let (blocks, corr_x, corr_p) = blocks_from(result, kind, t2)?;
    let mut items = blocks;
    for c in [corr_x, corr_p] {
        if !c.is_zero() {
            items.push(ScheduleItem::Diagonal {
                symbol: c,
                weight: 1.0,
            });
        }
    }
    Ok(Schedule { items })
}

/// Polynomial in one variable with float coefficients.
#[derive(Clone, Debug)]
struct Univariate {
    coeffs: Vec<f64>,
    /// `binom[k][i] = C(i, k)`
    binom: Vec<Vec<f64>>,
}

impl Univariate {
    /// Drops the constant term.
    fn of(symbol: &PolynomialXP, hbar: f64) -> Option<(Univariate, bool)> {
        let (mut coeffs, is_x) = if symbol.is_x_only() {
            (symbol.x_coefficients(hbar)?, true)
        } else {
            (symbol.p_coefficients(hbar)?, false)
        };
        coeffs[0] = 0.0;
        let d = coeffs.len();
        let mut binom = vec![vec![0.0; d]; d];
        for i in 0..d {
            binom[0][i] = 1.0;
            for k in 1..=i {
                binom[k][i] = binom[k - 1][i] * (i - k + 1) as f64 / k as f64;
            }
        }
        Some((Univariate { coeffs, binom }, is_x))
    }

    #[cfg(test)]
    fn eval(&self, y: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c)
    }

    /// `Σ_{k odd} g^{(k)}(y) a^{k−1}/k!`, i.e. `(g(y+a) − g(y−a))/(2a)`
    /// without the cancellation.
    fn odd_part(&self, y: f64, a: f64) -> f64 {
        let d = self.coeffs.len();
        let mut out = 0.0;
        let mut ak = 1.0;
        let mut k = 1;
        while k < d {
            let mut t = 0.0;
            for i in (k..d).rev() {
                t = t * y + self.coeffs[i] * self.binom[k][i];
            }
            out += t * ak;
            ak *= a * a;
            k += 2;
        }
        out
    }
}

/// Sector difference of a single-variable symbol on the phase grid:
/// `(g(X₋) − g(X₊))/ℏ` in `(x,θ)` or `(f(P₊) − f(P₋))/ℏ` in `(λ,p)`.
fn sector_field(
    grid: &PhaseGrid,
    symbol: &PolynomialXP,
    classical: bool,
) -> Result<(Representation, Array2<f64>)> {
    let h = if classical { 0.0 } else { grid.hbar };
    let (u, is_x) = Univariate::of(symbol, grid.hbar).ok_or_else(|| {
        Error::InvalidParameter(format!("{symbol} depends on both x and p"))
    })?;
    if is_x {
        let f = grid.sample(Representation::XTheta, |x, th| -th * u.odd_part(x, 0.5 * h * th))?;
        Ok((Representation::XTheta, f))
    } else {
        let f = grid.sample(Representation::LambdaP, |l, p| l * u.odd_part(p, 0.5 * h * l))?;
        Ok((Representation::LambdaP, f))
    }
}

/// Schedule discretized for Wigner functions on one grid.
#[derive(Clone, Debug)]
pub struct WignerScheduleStepper {
    grid: PhaseGrid,
    stages: Vec<DiagonalFactor>,
    transforms: usize,
}

impl WignerScheduleStepper {
    pub fn new(grid: &PhaseGrid, schedule: &Schedule, dt: f64, classical: bool) -> Result<Self> {
        schedule.validate()?;
        let plain = C64::new(0.0, -dt);
        let sigma = chin_sigma(dt);
        let mut stages: Vec<DiagonalFactor> = Vec::new();
        let mut push = |rep: Representation, exponent: Array2<C64>| -> Result<()> {
            let f = DiagonalFactor::from_exponent(rep, exponent)?;
            match stages.last_mut() {
                Some(last) if last.rep == rep => last.fuse(&f),
                _ => stages.push(f),
            }
            Ok(())
        };
        for item in &schedule.items {
            match item {
                ScheduleItem::Diagonal { symbol, weight } => {
                    if symbol.filter(|i, j| i + j > 0).is_zero() {
                        continue;
                    }
                    let (rep, d) = sector_field(grid, symbol, classical)?;
                    push(rep, d.mapv(|v| plain * (weight * v)))?;
                }
                ScheduleItem::Chin { kind, t2, pair } => {
                    let scheme = scheme_for(*kind, *t2)?;
                    let (a, b) = pair.slots();
                    let da = sector_field(grid, a, classical)?;
                    let db = sector_field(grid, b, classical)?;
                    for (role, w) in scheme.numeric_factors() {
                        let (rep, d) = match role {
                            Role::Kinetic => (&da.0, &da.1),
                            Role::Potential => (&db.0, &db.1),
                        };
                        push(*rep, d.mapv(|v| sigma * (w * v)))?;
                    }
                }
                ScheduleItem::Phase { .. } => {}
            }
        }
        Ok(WignerScheduleStepper {
            grid: grid.clone(),
            stages,
            transforms: 0,
        })
    }

    pub fn transforms(&self) -> usize {
        self.transforms
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    pub fn step(&mut self, state: &mut WignerState) -> Result<()> {
        if !state.grid.same_as(&self.grid) {
            return Err(Error::IncompatibleGrid(
                "state grid differs from stepper grid".into(),
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

/// Schedule discretized for wavefunctions on one line grid.
#[derive(Clone, Debug)]
pub struct SchrodingerScheduleStepper {
    grid: LineGrid,
    stages: Vec<(Representation, Array1<C64>)>,
    phase: C64,
    transforms: usize,
}

impl SchrodingerScheduleStepper {
    pub fn new(grid: &LineGrid, schedule: &Schedule, dt: f64) -> Result<Self> {
        schedule.validate()?;
        let hbar = grid.hbar;
        let plain = C64::new(0.0, -dt / hbar);
        let eps = effective_epsilon(dt, hbar, -1.0 / (hbar * hbar))?;
        let xs = grid.x.points();
        let ps = grid.momenta();
        let field = |symbol: &PolynomialXP| -> Result<(Representation, Array1<f64>)> {
            if symbol.is_x_only() {
                let c = symbol.x_coefficients(hbar).expect("x-only");
                Ok((Representation::Position, xs.mapv(|x| horner(&c, x))))
            } else if symbol.is_p_only() {
                let c = symbol.p_coefficients(hbar).expect("p-only");
                Ok((Representation::Momentum, ps.mapv(|p| horner(&c, p))))
            } else {
                Err(Error::InvalidParameter(format!("{symbol} depends on both x and p")))
            }
        };
        let mut raw: Vec<(Representation, Array1<C64>)> = Vec::new();
        let mut phase = C64::new(0.0, 0.0);
        for item in &schedule.items {
            match item {
                ScheduleItem::Diagonal { symbol, weight } => {
                    let c = symbol.constant_term().eval(hbar);
                    phase += plain * (weight * c);
                    let rest = symbol.filter(|i, j| i + j > 0);
                    if rest.is_zero() {
                        continue;
                    }
                    let (rep, v) = field(&rest)?;
                    raw.push((rep, v.mapv(|s| plain * (weight * s))));
                }
                ScheduleItem::Chin { kind, t2, pair } => {
                    let scheme = scheme_for(*kind, *t2)?;
                    let (a, b) = pair.slots();
                    let fa = field(a)?;
                    let fb = field(b)?;
                    for (role, w) in scheme.numeric_factors() {
                        let (rep, v) = match role {
                            Role::Kinetic => (&fa.0, &fa.1),
                            Role::Potential => (&fb.0, &fb.1),
                        };
                        raw.push((*rep, v.mapv(|s| eps * (w * s))));
                    }
                }
                ScheduleItem::Phase { constant, weight } => {
                    phase += plain * (weight * constant.eval(hbar));
                }
            }
        }
        let mut stages: Vec<(Representation, Array1<C64>)> = Vec::new();
        for (rep, e) in raw {
            match stages.last_mut() {
                Some((r, acc)) if *r == rep => *acc += &e,
                _ => stages.push((rep, e)),
            }
        }
        let stages = stages
            .into_iter()
            .map(|(rep, e)| {
                let m = e.mapv(|v| v.exp());
                match m.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
                    Some(index) => Err(Error::NonFiniteExponent { index }),
                    None => Ok((rep, m)),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SchrodingerScheduleStepper {
            grid: grid.clone(),
            stages,
            phase: phase.exp(),
            transforms: 0,
        })
    }

    pub fn transforms(&self) -> usize {
        self.transforms
    }

    pub fn step(&mut self, psi: &mut WaveFunction) -> Result<()> {
        if !psi.grid.x.same_as(&self.grid.x) {
            return Err(Error::IncompatibleGrid(
                "wavefunction grid differs from stepper grid".into(),
            ));
        }
        for (rep, m) in &self.stages {
            if psi.rep != *rep {
                psi.to_rep(*rep)?;
                self.transforms += 1;
            }
            Zip::from(&mut psi.data).and(m).for_each(|a, b| *a *= b);
        }
        let ph = self.phase;
        psi.data.mapv_inplace(|v| v * ph);
        Ok(())
    }

    pub fn run(&mut self, psi: &mut WaveFunction, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step(psi)?;
        }
        Ok(())
    }
}

fn horner(c: &[f64], y: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * y + v)
}

/// One generic step of a Wigner function.
pub fn generic_step_wigner(
    state: &mut WignerState,
    schedule: &Schedule,
    dt: f64,
    classical: bool,
) -> Result<()> {
    WignerScheduleStepper::new(&state.grid, schedule, dt, classical)?.step(state)
}

/// One generic step of a wavefunction.
pub fn generic_step_wavefunction(psi: &mut WaveFunction, schedule: &Schedule, dt: f64) -> Result<()> {
    SchrodingerScheduleStepper::new(&psi.grid, schedule, dt)?.step(psi)
}

/// One step as a product of truncated-matrix exponentials, items applied in
/// order (the first item acts first).
pub fn replay_schedule(schedule: &Schedule, dt: f64, dim: usize, hbar: f64) -> Result<TruncatedOperator> {
    schedule.validate()?;
    let plain = C64::new(0.0, -dt / hbar);
    let eps = effective_epsilon(dt, hbar, -1.0 / (hbar * hbar))?;
    let mut u = TruncatedOperator::identity(dim);
    for item in &schedule.items {
        match item {
            ScheduleItem::Diagonal { symbol, weight } => {
                let m = matrix_rep(symbol, dim, hbar);
                u = m.expm_hermitian(plain * *weight).mul(&u);
            }
            ScheduleItem::Chin { kind, t2, pair } => {
                let scheme = scheme_for(*kind, *t2)?;
                let (a, b) = pair.slots();
                let ma = matrix_rep(a, dim, hbar);
                let mb = matrix_rep(b, dim, hbar);
                for (role, w) in scheme.numeric_factors() {
                    let m = match role {
                        Role::Kinetic => &ma,
                        Role::Potential => &mb,
                    };
                    u = m.expm_hermitian(eps * w).mul(&u);
                }
            }
            ScheduleItem::Phase { constant, weight } => {
                u = u.scale((plain * (weight * constant.eval(hbar))).exp());
            }
        }
    }
    Ok(u)
}
