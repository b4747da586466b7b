//! Wigner distributions and wavefunctions on spectral grids.
//!
//! Phase-space states are stored as `W(x,θ) = (1/2π) ψ*(x+ℏθ/2) ψ(x−ℏθ/2)`
//! for pure states, whose θ → p transform is the ordinary Wigner function
//! `W(x,p)`. Quadrature is the Riemann sum over cells.

use std::f64::consts::PI;

use ndarray::{s, Array1, Array2, Axis};

use crate::error::{Error, Result};
use crate::grid::{LineGrid, PhaseGrid, Representation, C64};
use crate::moyal::{mccoy_terms, rational_to_f64, PolynomialXP};

/// Mass allowed in the edge strips of a freshly prepared state.
pub const PREPARATION_BOUNDARY_LIMIT: f64 = 1e-10;
/// Boundary contribution tolerated in a quadrature of a polynomial symbol.
pub const EXPECTATION_BOUNDARY_LIMIT: f64 = 1e-8;
/// Largest `|W|` tolerated on the outermost grid lines during propagation.
pub const EDGE_ALARM: f64 = 1e-8;

fn strip_width(n: usize) -> usize {
    (n / 16).max(1)
}

#[derive(Clone, Debug)]
pub struct WignerState {
    pub grid: PhaseGrid,
    pub data: Array2<C64>,
    pub rep: Representation,
}

impl WignerState {
    pub fn new(grid: PhaseGrid, data: Array2<C64>, rep: Representation) -> Result<Self> {
        if !rep.is_phase_space() {
            return Err(Error::RepresentationMismatch {
                expected: Representation::XTheta,
                found: rep,
            });
        }
        if data.dim() != grid.shape() {
            return Err(Error::IncompatibleGrid(format!(
                "data shape {:?} does not match grid {:?}",
                data.dim(),
                grid.shape()
            )));
        }
        Ok(WignerState { grid, data, rep })
    }

    /// Samples a real `W(x,p)` and stores it in `(x, θ)`.
    pub fn from_xp(grid: PhaseGrid, w: impl Fn(f64, f64) -> f64 + Sync) -> Result<Self> {
        let data = grid.sample(Representation::XP, w)?.mapv(|v| C64::new(v, 0.0));
        let mut state = WignerState::new(grid, data, Representation::XP)?;
        state.to_rep(Representation::XTheta)?;
        Ok(state)
    }

    /// Converts in place, returning the number of full-field passes performed.
    pub fn to_rep(&mut self, rep: Representation) -> Result<usize> {
        let passes = PhaseGrid::transform_passes(self.rep, rep);
        self.grid.transform(&mut self.data, self.rep, rep)?;
        self.rep = rep;
        Ok(passes)
    }

    pub fn in_rep(&self, rep: Representation) -> Result<WignerState> {
        let mut out = self.clone();
        out.to_rep(rep)?;
        Ok(out)
    }

    /// `∫∫ W dx dp` (complex; the imaginary part measures loss of reality).
    pub fn integral(&self) -> Result<C64> {
        self.grid.integral(&self.data, self.rep)
    }

    pub fn norm(&self) -> f64 {
        self.integral().map(|c| c.re).unwrap_or(f64::NAN)
    }

    /// `2πℏ ∫∫ W² dx dp`.
    pub fn purity(&self) -> f64 {
        let l2 = self
            .grid
            .l2_norm_sq(&self.data, self.rep)
            .unwrap_or(f64::NAN);
        2.0 * PI * self.grid.hbar * l2
    }

    /// Real part of `W(x,p)`.
    pub fn density_xp(&self) -> Result<Array2<f64>> {
        let w = self.in_rep(Representation::XP)?;
        Ok(w.data.mapv(|v| v.re))
    }

    /// Largest violation of the reality condition in the current representation:
    /// `Im W(x,p)` in `(x,p)`, `W(x,−θ) − W̄(x,θ)` in `(x,θ)`.
    pub fn reality_defect(&self) -> Result<f64> {
        match self.rep {
            Representation::XP => Ok(self.data.iter().map(|v| v.im.abs()).fold(0.0, f64::max)),
            Representation::XTheta => {
                let n = self.grid.theta.n;
                let mut worst = 0.0f64;
                for row in self.data.rows() {
                    for k in 0..n {
                        worst = worst.max((row[n - 1 - k] - row[k].conj()).norm());
                    }
                }
                Ok(worst)
            }
            _ => self.in_rep(Representation::XP)?.reality_defect(),
        }
    }

    /// `∫∫|W| dx dp` over edge strips `n/16` cells wide in `(x, p)`.
    pub fn boundary_mass(&self) -> Result<f64> {
        let w = self.density_xp()?;
        let (nx, np) = w.dim();
        let (sx, sp) = (strip_width(nx), strip_width(np));
        let cell = self.grid.x.step * self.grid.p.step;
        let mut mass = 0.0;
        for ((i, j), v) in w.indexed_iter() {
            if i < sx || i >= nx - sx || j < sp || j >= np - sp {
                mass += v.abs() * cell;
            }
        }
        Ok(mass)
    }

    /// Largest `|W(x,p)|` on the outermost rows and columns.
    pub fn edge_max(&self) -> Result<f64> {
        let w = self.density_xp()?;
        let (nx, np) = w.dim();
        let mut m = 0.0f64;
        for lane in [
            w.slice(s![0, ..]),
            w.slice(s![nx - 1, ..]),
            w.slice(s![.., 0]),
            w.slice(s![.., np - 1]),
        ] {
            m = lane.iter().fold(m, |a, v| a.max(v.abs()));
        }
        Ok(m)
    }

    pub fn check_boundary(&self, limit: f64) -> Result<()> {
        let mass = self.boundary_mass()?;
        if mass > limit {
            return Err(Error::BoundaryMass { mass, limit });
        }
        Ok(())
    }

    /// Divides by `∫∫W`; used only right after preparation.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.integral()?.re;
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(format!("cannot normalize state with integral {n}")));
        }
        self.data.mapv_inplace(|v| v / n);
        Ok(())
    }
}

/// Coherent state `W = (πℏ)^{-1} exp(−((x−x₀)² + (p−p₀)²)/ℏ)`, normalized by
/// quadrature and returned in `(x, θ)`.
pub fn coherent_wigner(grid: &PhaseGrid, x0: f64, p0: f64) -> Result<WignerState> {
    let hbar = grid.hbar;
    let data = grid
        .sample(Representation::XP, |x, p| {
            (-((x - x0).powi(2) + (p - p0).powi(2)) / hbar).exp() / (PI * hbar)
        })?
        .mapv(|v| C64::new(v, 0.0));
    let mut state = WignerState::new(grid.clone(), data, Representation::XP)?;
    state.check_boundary(PREPARATION_BOUNDARY_LIMIT)?;
    state.normalize()?;
    state.to_rep(Representation::XTheta)?;
    Ok(state)
}

#[derive(Clone, Debug)]
pub struct WaveFunction {
    pub grid: LineGrid,
    pub data: Array1<C64>,
    pub rep: Representation,
}

impl WaveFunction {
    pub fn new(grid: LineGrid, data: Array1<C64>, rep: Representation) -> Result<Self> {
        if !matches!(rep, Representation::Position | Representation::Momentum) {
            return Err(Error::RepresentationMismatch {
                expected: Representation::Position,
                found: rep,
            });
        }
        if data.len() != grid.x.n {
            return Err(Error::IncompatibleGrid(format!(
                "wavefunction length {} does not match axis {}",
                data.len(),
                grid.x.n
            )));
        }
        Ok(WaveFunction { grid, data, rep })
    }

    pub fn to_rep(&mut self, rep: Representation) -> Result<usize> {
        if rep == self.rep {
            return Ok(0);
        }
        self.grid.transform(&mut self.data, self.rep, rep)?;
        self.rep = rep;
        Ok(1)
    }

    pub fn in_rep(&self, rep: Representation) -> Result<WaveFunction> {
        let mut out = self.clone();
        out.to_rep(rep)?;
        Ok(out)
    }

    /// `∫|ψ|² dx`, evaluated by Parseval in momentum representation.
    pub fn norm(&self) -> f64 {
        let s: f64 = self.data.iter().map(|v| v.norm_sqr()).sum();
        match self.rep {
            Representation::Momentum => s * self.grid.k.step / (2.0 * PI),
            _ => s * self.grid.x.step,
        }
    }

    /// `⟨self|other⟩` by position-space quadrature.
    pub fn inner(&self, other: &WaveFunction) -> Result<C64> {
        if !self.grid.x.same_as(&other.grid.x) {
            return Err(Error::IncompatibleGrid("wavefunction axes differ".into()));
        }
        let a = self.in_rep(Representation::Position)?;
        let b = other.in_rep(Representation::Position)?;
        let s: C64 = a.data.iter().zip(b.data.iter()).map(|(u, v)| u.conj() * v).sum();
        Ok(s * self.grid.x.step)
    }

    /// `∫|ψ|²` over edge strips `n/16` cells wide.
    pub fn boundary_mass(&self) -> Result<f64> {
        let a = self.in_rep(Representation::Position)?;
        let n = a.data.len();
        let w = strip_width(n);
        let s: f64 = a
            .data
            .iter()
            .enumerate()
            .filter(|(k, _)| *k < w || *k >= n - w)
            .map(|(_, v)| v.norm_sqr())
            .sum();
        Ok(s * self.grid.x.step)
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(format!("cannot normalize wavefunction with norm {n}")));
        }
        let s = n.sqrt();
        self.data.mapv_inplace(|v| v / s);
        Ok(())
    }

    /// Applies `x̂^a` (position) or `p̂^b` (via momentum) in sequence, returning
    /// a position-space copy.
    fn apply_ordered(&self, left_x: u32, p_pow: u32, right_x: u32) -> Result<Array1<C64>> {
        let xs = self.grid.x.points();
        let mut w = self.in_rep(Representation::Position)?;
        if right_x > 0 {
            for (v, x) in w.data.iter_mut().zip(xs.iter()) {
                *v *= x.powi(right_x as i32);
            }
        }
        if p_pow > 0 {
            w.to_rep(Representation::Momentum)?;
            let ps = self.grid.momenta();
            for (v, p) in w.data.iter_mut().zip(ps.iter()) {
                *v *= p.powi(p_pow as i32);
            }
            w.to_rep(Representation::Position)?;
        }
        if left_x > 0 {
            for (v, x) in w.data.iter_mut().zip(xs.iter()) {
                *v *= x.powi(left_x as i32);
            }
        }
        Ok(w.data)
    }

    /// `⟨ψ|Op(symbol)|ψ⟩` with the Weyl-ordered operator expanded into
    /// ordered products.
    pub fn expectation(&self, symbol: &PolynomialXP) -> Result<f64> {
        let psi = self.in_rep(Representation::Position)?;
        let hbar = self.grid.hbar;
        let mut total = C64::new(0.0, 0.0);
        for ((i, j), c) in symbol.terms() {
            let cv = c.eval(hbar);
            for t in mccoy_terms(i, j) {
                let v = self.apply_ordered(t.left_x, t.p, t.right_x)?;
                let s: C64 = psi.data.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                total += s * (cv * rational_to_f64(&t.coeff));
            }
        }
        Ok(total.re * self.grid.x.step)
    }
}

/// `ψ = (πℏ)^{-1/4} exp(−(x−x₀)²/(2ℏ) + i p₀ x/ℏ)`, normalized.
///
/// This differs from the Fock-basis coherent state by the global phase
/// `e^{−i x₀ p₀/(2ℏ)}`.
pub fn coherent_wavefunction(grid: &LineGrid, x0: f64, p0: f64) -> Result<WaveFunction> {
    let hbar = grid.hbar;
    let amp = (PI * hbar).powf(-0.25);
    let data = grid.x.points().mapv(|x| {
        C64::from_polar(amp * (-(x - x0).powi(2) / (2.0 * hbar)).exp(), p0 * x / hbar)
    });
    let mut psi = WaveFunction::new(grid.clone(), data, Representation::Position)?;
    let mass = psi.boundary_mass()?;
    if mass > PREPARATION_BOUNDARY_LIMIT {
        return Err(Error::BoundaryMass {
            mass,
            limit: PREPARATION_BOUNDARY_LIMIT,
        });
    }
    psi.normalize()?;
    Ok(psi)
}

/// Wigner transform of a pure state onto a phase-space grid sharing its x axis.
///
/// Off-grid values `ψ(x ± ℏθ/2)` come from spectral shifts; points shifted
/// outside the position interval are set to zero rather than wrapped.
pub fn wigner_of_wavefunction(psi: &WaveFunction, grid: &PhaseGrid) -> Result<WignerState> {
    if !psi.grid.x.same_as(&grid.x) {
        return Err(Error::IncompatibleGrid(
            "wavefunction axis differs from the phase-space x axis".into(),
        ));
    }
    if (psi.grid.hbar - grid.hbar).abs() > 1e-15 * grid.hbar {
        return Err(Error::IncompatibleGrid("hbar differs between wavefunction and grid".into()));
    }
    let spec = psi.in_rep(Representation::Momentum)?;
    let ks = psi.grid.k.points();
    let xs = grid.x.points();
    let (lo, hi) = (grid.x.min, grid.x.min + grid.x.extent());
    let shifted = |s: f64| -> Result<Array1<C64>> {
        let data = Array1::from_iter(
            spec.data
                .iter()
                .zip(ks.iter())
                .map(|(v, k)| v * C64::from_polar(1.0, k * s)),
        );
        let mut w = WaveFunction::new(psi.grid.clone(), data, Representation::Momentum)?;
        w.to_rep(Representation::Position)?;
        let mut out = w.data;
        for (v, x) in out.iter_mut().zip(xs.iter()) {
            let y = x + s;
            if y < lo || y >= hi {
                *v = C64::new(0.0, 0.0);
            }
        }
        Ok(out)
    };
    let mut data = Array2::<C64>::zeros(grid.shape());
    for (k, mut col) in data.axis_iter_mut(Axis(1)).enumerate() {
        let s = 0.5 * grid.hbar * grid.theta.point(k);
        let plus = shifted(s)?;
        let minus = shifted(-s)?;
        for ((v, a), b) in col.iter_mut().zip(plus.iter()).zip(minus.iter()) {
            *v = a.conj() * b / (2.0 * PI);
        }
    }
    WignerState::new(grid.clone(), data, Representation::XTheta)
}

/// `∫∫ symbol(x,p;ℏ) W dx dp` by quadrature in `(x, p)`.
pub fn expectation(state: &WignerState, symbol: &PolynomialXP) -> Result<f64> {
    let (total, edge) = quadrature(state, symbol)?;
    if edge > EXPECTATION_BOUNDARY_LIMIT {
        return Err(Error::BoundaryMass {
            mass: edge,
            limit: EXPECTATION_BOUNDARY_LIMIT,
        });
    }
    Ok(total)
}

/// Quadrature of `symbol · W` together with `∫|symbol · W|` over the edge
/// strips. High-degree symbols amplify round-off at the edges, so long runs
/// should guard with [`WignerState::edge_max`] and read the value from here.
pub fn quadrature(state: &WignerState, symbol: &PolynomialXP) -> Result<(f64, f64)> {
    let w = state.density_xp()?;
    let g = &state.grid;
    let hbar = g.hbar;
    let terms = symbol.numeric_terms(hbar);
    let xs = g.x.points();
    let ps = g.p.points();
    let (nx, np) = w.dim();
    let (sx, sp) = (strip_width(nx), strip_width(np));
    let cell = g.x.step * g.p.step;
    let mut total = 0.0;
    let mut edge = 0.0;
    for ((i, j), v) in w.indexed_iter() {
        let (x, p) = (xs[i], ps[j]);
        let s: f64 = terms
            .iter()
            .map(|(a, b, c)| c * x.powi(*a) * p.powi(*b))
            .sum();
        let contrib = s * v * cell;
        total += contrib;
        if i < sx || i >= nx - sx || j < sp || j >= np - sp {
            edge += contrib.abs();
        }
    }
    Ok((total, edge))
}

pub fn expectation_wavefunction(psi: &WaveFunction, symbol: &PolynomialXP) -> Result<f64> {
    psi.expectation(symbol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_phase_grid;
    use crate::moyal::parse_polynomial;

    fn grid() -> PhaseGrid {
        make_phase_grid(128, 128, 20.0, 20.0, 1.0).unwrap()
    }

    #[test]
    fn coherent_peak_and_moments() {
        let g = grid();
        let a = 3.0 / 2f64.sqrt();
        let w = coherent_wigner(&g, a, a).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-12);
        assert!((w.purity() - 1.0).abs() < 1e-10);
        let x = expectation(&w, &parse_polynomial("x").unwrap()).unwrap();
        assert!((x - a).abs() < 1e-8);
        let d = w.density_xp().unwrap();
        let peak = d.iter().cloned().fold(f64::MIN, f64::max);
        // the peak cell is off the exact centre by less than half a cell
        assert!(peak <= 1.0 / PI + 1e-12 && peak > 0.9 / PI);
        assert!(w.reality_defect().unwrap() < 1e-12);
    }

    #[test]
    fn origin_state_is_centred() {
        let w = coherent_wigner(&grid(), 0.0, 0.0).unwrap();
        let x = expectation(&w, &parse_polynomial("x").unwrap()).unwrap();
        let p = expectation(&w, &parse_polynomial("p").unwrap()).unwrap();
        assert!(x.abs() < 1e-12 && p.abs() < 1e-12);
    }

    #[test]
    fn kerr_energy_of_amplitude_three() {
        let g = make_phase_grid(256, 256, 20.0, 20.0, 1.0).unwrap();
        let a = 3.0 / 2f64.sqrt();
        let w = coherent_wigner(&g, a, a).unwrap();
        let h = parse_polynomial("(p^2/2 + x^2/2)^2 - hbar^2/4").unwrap();
        let e = expectation(&w, &h).unwrap();
        assert!((e - 29.5).abs() < 1e-8, "{e}");
        let psi = coherent_wavefunction(&LineGrid::new(g.x, 1.0).unwrap(), a, a).unwrap();
        let e2 = psi.expectation(&h).unwrap();
        assert!((e2 - 29.5).abs() < 1e-8, "{e2}");
    }

    #[test]
    fn boundary_alarm() {
        assert!(matches!(
            coherent_wigner(&grid(), 9.0, 0.0),
            Err(Error::BoundaryMass { .. })
        ));
        let lg = LineGrid::centered(128, 20.0, 1.0).unwrap();
        assert!(coherent_wavefunction(&lg, 9.5, 0.0).is_err());
    }

    #[test]
    fn high_degree_symbol_trips_expectation_guard() {
        let g = make_phase_grid(64, 64, 20.0, 20.0, 1.0).unwrap();
        let w = WignerState::from_xp(g, |_, _| 1e-6).unwrap();
        assert!(expectation(&w, &parse_polynomial("p^12").unwrap()).is_err());
    }

    #[test]
    fn wigner_of_coherent_wavefunction() {
        let g = grid();
        let lg = LineGrid::new(g.x, 1.0).unwrap();
        for (x0, p0) in [(0.0, 0.0), (1.5, -2.0)] {
            let psi = coherent_wavefunction(&lg, x0, p0).unwrap();
            let w = wigner_of_wavefunction(&psi, &g).unwrap();
            assert!((w.norm() - 1.0).abs() < 1e-10);
            let direct = coherent_wigner(&g, x0, p0).unwrap();
            let a = w.density_xp().unwrap();
            let b = direct.density_xp().unwrap();
            let err = (&a - &b).iter().map(|v| v.abs()).fold(0.0, f64::max);
            assert!(err < 1e-10, "{err}");
        }
    }

    #[test]
    fn incompatible_axes_rejected() {
        let g = grid();
        let lg = LineGrid::centered(64, 20.0, 1.0).unwrap();
        let psi = coherent_wavefunction(&lg, 0.0, 0.0).unwrap();
        assert!(matches!(
            wigner_of_wavefunction(&psi, &g),
            Err(Error::IncompatibleGrid(_))
        ));
    }
}
