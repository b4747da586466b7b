//! Uniform axes, the Bopp phase-space lattice and its Fourier transforms.
//!
//! Axes are cell-centred: point `k` sits at `min + (k + 1/2)·step` on the
//! half-open interval `[min, min + n·step)`. Conjugate axes are stored in
//! monotone order with point `j` at `(j − n/2)·Δk`, so zero frequency is an
//! exact grid point.
//!
//! Kernel conventions for phase-space fields `F[ix, iθ]`:
//!
//! * axis 0, `x → λ`: `F(λ) = ∫ f(x) e^{−iλx} dx`
//! * axis 1, `θ → p`: `F(p) = ∫ f(θ) e^{+ipθ} dθ`
//!
//! With these signs `p̂ = i∂θ` and `λ̂ = −i∂x` are multiplication operators in
//! the `(λ, p)` representation, while `x̂` and `θ̂` are multiplications in
//! `(x, θ)`. The sector operators `X± = x ± ℏθ/2` and `P± = p ± ℏλ/2` are
//! therefore diagonal in `(x, θ)` and `(λ, p)` respectively.
//!
//! The discrete transforms approximate the continuous ones by the midpoint
//! rule. Because `k₀·Δx = −π` for the first conjugate point, the lattice phase
//! reduces to `(−1)^k`, and
//!
//! ```text
//! forward: F_j = Δx · e^{s·i·k_j·x₀} · DFT_s[f_k (−1)^k]
//! inverse: f_k = (−1)^k / (n·Δx) · DFT_{−s}[F_j e^{−s·i·k_j·x₀}]
//! ```
//!
//! where `x₀` is the first cell centre and `DFT_s` uses `e^{s·2πi·jk/n}`.
//!
//! Extended range: diagonal symbols in `(x, θ)` are evaluated at
//! `X± ∈ [x_min − ℏ|θ|_max/2, x_max + ℏ|θ|_max/2]`, and in `(λ, p)` at
//! `P± ∈ [p_min − ℏ|λ|_max/2, p_max + ℏ|λ|_max/2]`. Symbols are sampled there
//! directly; nothing is wrapped back into the base interval.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use ndarray::{Array1, Array2, Axis, Zip};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Lanes handed to a single FFT call when a batch is split across threads.
const LANES_PER_TASK: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representation {
    /// Phase-space field over `(x, θ)`.
    XTheta,
    /// Phase-space field over `(λ, p)`.
    LambdaP,
    /// Phase-space field over `(x, p)`, the ordinary Wigner function.
    XP,
    /// Wavefunction over position.
    Position,
    /// Wavefunction over wave number `k = p/ℏ`.
    Momentum,
}

impl Representation {
    pub fn is_phase_space(self) -> bool {
        matches!(
            self,
            Representation::XTheta | Representation::LambdaP | Representation::XP
        )
    }

    /// (axis 0 is spectral, axis 1 is spectral) for phase-space tags.
    fn spectral_axes(self) -> (bool, bool) {
        match self {
            Representation::XTheta => (false, false),
            Representation::LambdaP => (true, true),
            Representation::XP => (false, true),
            _ => unreachable!("not a phase-space representation"),
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Representation::XTheta => "x-theta",
            Representation::LambdaP => "lambda-p",
            Representation::XP => "x-p",
            Representation::Position => "position",
            Representation::Momentum => "momentum",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisGrid {
    pub n: usize,
    pub min: f64,
    pub step: f64,
}

impl AxisGrid {
    pub fn new(n: usize, min: f64, step: f64) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::NonPositiveExtent(step * n as f64));
        }
        if !min.is_finite() {
            return Err(Error::InvalidParameter(format!("axis minimum {min} is not finite")));
        }
        Ok(AxisGrid { n, min, step })
    }

    /// Axis of `n` cells covering `[−extent/2, extent/2)`.
    pub fn centered(n: usize, extent: f64) -> Result<Self> {
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::NonPositiveExtent(extent));
        }
        AxisGrid::new(n, -0.5 * extent, extent / n as f64)
    }

    pub fn extent(&self) -> f64 {
        self.step * self.n as f64
    }

    pub fn conjugate_step(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.step)
    }

    pub fn point(&self, k: usize) -> f64 {
        self.min + (k as f64 + 0.5) * self.step
    }

    pub fn points(&self) -> Array1<f64> {
        Array1::from_iter((0..self.n).map(|k| self.point(k)))
    }

    pub fn first_point(&self) -> f64 {
        self.point(0)
    }

    pub fn last_point(&self) -> f64 {
        self.point(self.n - 1)
    }

    /// Frequency axis with points `(j − n/2)·Δk`.
    pub fn conjugate(&self) -> AxisGrid {
        let dk = self.conjugate_step();
        AxisGrid {
            n: self.n,
            min: -(self.n as f64 / 2.0 + 0.5) * dk,
            step: dk,
        }
    }

    pub fn same_as(&self, other: &AxisGrid) -> bool {
        self.n == other.n
            && (self.min - other.min).abs() <= 1e-12 * self.min.abs().max(1.0)
            && (self.step - other.step).abs() <= 1e-12 * self.step
    }
}

/// Precomputed 1-D transform between an axis and its conjugate.
pub struct SpectralAxis {
    pub axis: AxisGrid,
    pub conj: AxisGrid,
    /// Kernel sign `s` of the forward transform `e^{s·i·k·x}`.
    sign: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    fwd_pre: Vec<C64>,
    fwd_post: Vec<C64>,
    inv_pre: Vec<C64>,
    inv_post: Vec<C64>,
}

impl fmt::Debug for SpectralAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralAxis")
            .field("axis", &self.axis)
            .field("sign", &self.sign)
            .finish()
    }
}

impl SpectralAxis {
    pub fn new(axis: AxisGrid, sign: f64, planner: &mut FftPlanner<f64>) -> Self {
        let n = axis.n;
        let conj = axis.conjugate();
        let (fwd, inv) = if sign < 0.0 {
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        } else {
            (planner.plan_fft_inverse(n), planner.plan_fft_forward(n))
        };
        let x0 = axis.first_point();
        let alt: Vec<C64> = (0..n)
            .map(|k| if k % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) })
            .collect();
        let fwd_post = (0..n)
            .map(|j| C64::from_polar(axis.step, sign * conj.point(j) * x0))
            .collect();
        let inv_pre = (0..n)
            .map(|j| C64::from_polar(1.0, -sign * conj.point(j) * x0))
            .collect();
        let scale = 1.0 / (n as f64 * axis.step);
        let inv_post = alt.iter().map(|a| a * scale).collect();
        SpectralAxis {
            axis,
            conj,
            sign,
            fwd,
            inv,
            fwd_pre: alt,
            fwd_post,
            inv_pre,
            inv_post,
        }
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    /// Transforms every contiguous lane of length `n` in `buf`.
    pub fn forward_lanes(&self, buf: &mut [C64]) {
        self.run_lanes(buf, &self.fwd_pre, &self.fwd, &self.fwd_post);
    }

    pub fn inverse_lanes(&self, buf: &mut [C64]) {
        self.run_lanes(buf, &self.inv_pre, &self.inv, &self.inv_post);
    }

    fn run_lanes(&self, buf: &mut [C64], pre: &[C64], fft: &Arc<dyn Fft<f64>>, post: &[C64]) {
        let n = self.axis.n;
        debug_assert_eq!(buf.len() % n, 0);
        buf.par_chunks_mut(n * LANES_PER_TASK).for_each(|chunk| {
            for lane in chunk.chunks_mut(n) {
                for (v, w) in lane.iter_mut().zip(pre) {
                    *v *= w;
                }
            }
            fft.process(chunk);
            for lane in chunk.chunks_mut(n) {
                for (v, w) in lane.iter_mut().zip(post) {
                    *v *= w;
                }
            }
        });
    }
}

/// Discretized `(x, θ)` lattice with its conjugate `(λ, p)` axes.
#[derive(Clone, Debug)]
pub struct PhaseGrid {
    pub x: AxisGrid,
    pub theta: AxisGrid,
    pub lambda: AxisGrid,
    pub p: AxisGrid,
    pub hbar: f64,
    x_fft: Arc<SpectralAxis>,
    theta_fft: Arc<SpectralAxis>,
    /// `Σ_j Δp·Δθ·e^{i p_j θ_k}`, so that `∫∫W dx dp = Σ_k w_k Σ_i Δx W(x_i, θ_k)`.
    norm_weights: Arc<Vec<C64>>,
}

pub fn make_phase_grid(
    nx: usize,
    ntheta: usize,
    x_extent: f64,
    theta_extent: f64,
    hbar: f64,
) -> Result<PhaseGrid> {
    PhaseGrid::new(
        AxisGrid::centered(nx, x_extent)?,
        AxisGrid::centered(ntheta, theta_extent)?,
        hbar,
    )
}

impl PhaseGrid {
    pub fn new(x: AxisGrid, theta: AxisGrid, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        let mut planner = FftPlanner::new();
        let x_fft = Arc::new(SpectralAxis::new(x, -1.0, &mut planner));
        let theta_fft = Arc::new(SpectralAxis::new(theta, 1.0, &mut planner));
        let lambda = x.conjugate();
        let p = theta.conjugate();
        let norm_weights = (0..theta.n)
            .map(|k| {
                let th = theta.point(k);
                (0..p.n)
                    .map(|j| C64::from_polar(p.step * theta.step, p.point(j) * th))
                    .sum()
            })
            .collect();
        Ok(PhaseGrid {
            x,
            theta,
            lambda,
            p,
            hbar,
            x_fft,
            theta_fft,
            norm_weights: Arc::new(norm_weights),
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.x.n, self.theta.n)
    }

    /// The (axis 0, axis 1) grids of a phase-space representation.
    pub fn axes(&self, rep: Representation) -> Result<(AxisGrid, AxisGrid)> {
        match rep {
            Representation::XTheta => Ok((self.x, self.theta)),
            Representation::LambdaP => Ok((self.lambda, self.p)),
            Representation::XP => Ok((self.x, self.p)),
            other => Err(Error::RepresentationMismatch {
                expected: Representation::XTheta,
                found: other,
            }),
        }
    }

    pub fn same_as(&self, other: &PhaseGrid) -> bool {
        self.x.same_as(&other.x) && self.theta.same_as(&other.theta) && self.hbar == other.hbar
    }

    /// Number of full-field passes needed to go from `from` to `to`.
    pub fn transform_passes(from: Representation, to: Representation) -> usize {
        if !from.is_phase_space() || !to.is_phase_space() {
            return 0;
        }
        let (a0, a1) = from.spectral_axes();
        let (b0, b1) = to.spectral_axes();
        usize::from(a0 != b0) + usize::from(a1 != b1)
    }

    /// Changes representation in place.
    pub fn transform(
        &self,
        data: &mut Array2<C64>,
        from: Representation,
        to: Representation,
    ) -> Result<()> {
        for rep in [from, to] {
            if !rep.is_phase_space() {
                return Err(Error::RepresentationMismatch {
                    expected: Representation::XTheta,
                    found: rep,
                });
            }
        }
        if data.dim() != self.shape() {
            return Err(Error::IncompatibleGrid(format!(
                "field shape {:?} does not match grid {:?}",
                data.dim(),
                self.shape()
            )));
        }
        let (a0, a1) = from.spectral_axes();
        let (b0, b1) = to.spectral_axes();
        if a1 != b1 {
            self.transform_axis1(data, b1);
        }
        if a0 != b0 {
            self.transform_axis0(data, b0);
        }
        Ok(())
    }

    fn transform_axis1(&self, data: &mut Array2<C64>, forward: bool) {
        let slice = data
            .as_slice_mut()
            .expect("phase-space fields are stored in standard layout");
        if forward {
            self.theta_fft.forward_lanes(slice);
        } else {
            self.theta_fft.inverse_lanes(slice);
        }
    }

    fn transform_axis0(&self, data: &mut Array2<C64>, forward: bool) {
        let mut t = data.t().as_standard_layout().into_owned();
        let slice = t.as_slice_mut().expect("standard layout");
        if forward {
            self.x_fft.forward_lanes(slice);
        } else {
            self.x_fft.inverse_lanes(slice);
        }
        data.assign(&t.t());
    }

    /// Samples `f(a, b)` over the axes of `rep`.
    pub fn sample<F>(&self, rep: Representation, f: F) -> Result<Array2<f64>>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let (a, b) = self.axes(rep)?;
        let av = a.points();
        let bv = b.points();
        let mut out = Array2::zeros((a.n, b.n));
        Zip::indexed(&mut out).par_for_each(|(i, j), v| *v = f(av[i], bv[j]));
        Ok(out)
    }

    /// `∫∫ W dx dp` for a field in any phase-space representation.
    pub fn integral(&self, data: &Array2<C64>, rep: Representation) -> Result<C64> {
        match rep {
            Representation::XP => Ok(data.sum() * (self.x.step * self.p.step)),
            Representation::LambdaP => {
                let row = data.index_axis(Axis(0), self.lambda.n / 2);
                Ok(row.sum() * self.p.step)
            }
            Representation::XTheta => {
                let cols = data.sum_axis(Axis(0));
                let s: C64 = cols
                    .iter()
                    .zip(self.norm_weights.iter())
                    .map(|(c, w)| c * w)
                    .sum();
                Ok(s * self.x.step)
            }
            other => Err(Error::RepresentationMismatch {
                expected: Representation::XTheta,
                found: other,
            }),
        }
    }

    /// `∫∫ |W(x,p)|² dx dp`, computed without leaving `rep`.
    pub fn l2_norm_sq(&self, data: &Array2<C64>, rep: Representation) -> Result<f64> {
        let s: f64 = data.iter().map(|v| v.norm_sqr()).sum();
        match rep {
            Representation::XP => Ok(s * self.x.step * self.p.step),
            Representation::XTheta => Ok(s * self.x.step * self.theta.step * 2.0 * PI),
            Representation::LambdaP => {
                Ok(s * self.lambda.step * self.p.step / (2.0 * PI))
            }
            other => Err(Error::RepresentationMismatch {
                expected: Representation::XTheta,
                found: other,
            }),
        }
    }
}

/// Precomputed multiplier `exp(factor · symbol)` bound to one representation.
#[derive(Clone, Debug)]
pub struct DiagonalFactor {
    pub rep: Representation,
    pub multiplier: Array2<C64>,
}

impl DiagonalFactor {
    /// Builds the multiplier from complex exponents, rejecting non-finite values.
    pub fn from_exponent(rep: Representation, exponent: Array2<C64>) -> Result<Self> {
        let multiplier = exponent.mapv(|e| e.exp());
        if let Some(index) = multiplier
            .iter()
            .position(|m| !(m.re.is_finite() && m.im.is_finite()))
        {
            return Err(Error::NonFiniteExponent { index });
        }
        Ok(DiagonalFactor { rep, multiplier })
    }

    pub fn new(rep: Representation, symbol: &Array2<f64>, factor: C64) -> Result<Self> {
        DiagonalFactor::from_exponent(rep, symbol.mapv(|s| factor * s))
    }

    pub fn identity(rep: Representation, shape: (usize, usize)) -> Self {
        DiagonalFactor {
            rep,
            multiplier: Array2::from_elem(shape, C64::new(1.0, 0.0)),
        }
    }

    /// Multiplies two factors bound to the same representation.
    pub fn fuse(&mut self, other: &DiagonalFactor) {
        assert_eq!(self.rep, other.rep, "cannot fuse factors from different representations");
        Zip::from(&mut self.multiplier)
            .and(&other.multiplier)
            .par_for_each(|a, b| *a *= b);
    }

    pub fn apply(&self, data: &mut Array2<C64>, rep: Representation) -> Result<()> {
        if rep != self.rep {
            return Err(Error::RepresentationMismatch {
                expected: self.rep,
                found: rep,
            });
        }
        Zip::from(data)
            .and(&self.multiplier)
            .par_for_each(|a, b| *a *= b);
        Ok(())
    }

    /// Largest deviation of `|multiplier|` from one.
    pub fn unitarity_defect(&self) -> f64 {
        self.multiplier
            .iter()
            .map(|m| (m.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Pointwise multiplication by `exp(factor · symbol)`.
pub fn apply_diagonal(
    data: &mut Array2<C64>,
    rep: Representation,
    symbol_rep: Representation,
    symbol: &Array2<f64>,
    factor: C64,
) -> Result<()> {
    if rep != symbol_rep {
        return Err(Error::RepresentationMismatch {
            expected: symbol_rep,
            found: rep,
        });
    }
    if symbol.dim() != data.dim() {
        return Err(Error::IncompatibleGrid(format!(
            "symbol shape {:?} does not match field {:?}",
            symbol.dim(),
            data.dim()
        )));
    }
    DiagonalFactor::new(symbol_rep, symbol, factor)?.apply(data, rep)
}

/// 1-D grid for wavefunctions: position axis plus its wave-number transform
/// (kernel `e^{−ikx}` forward).
#[derive(Clone, Debug)]
pub struct LineGrid {
    pub x: AxisGrid,
    pub k: AxisGrid,
    pub hbar: f64,
    fft: Arc<SpectralAxis>,
}

impl LineGrid {
    pub fn new(x: AxisGrid, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        let mut planner = FftPlanner::new();
        let fft = Arc::new(SpectralAxis::new(x, -1.0, &mut planner));
        Ok(LineGrid {
            x,
            k: x.conjugate(),
            hbar,
            fft,
        })
    }

    pub fn centered(n: usize, extent: f64, hbar: f64) -> Result<Self> {
        LineGrid::new(AxisGrid::centered(n, extent)?, hbar)
    }

    /// Momentum values `p = ℏk` of the spectral axis.
    pub fn momenta(&self) -> Array1<f64> {
        self.k.points().mapv(|k| k * self.hbar)
    }

    pub fn transform(
        &self,
        data: &mut Array1<C64>,
        from: Representation,
        to: Representation,
    ) -> Result<()> {
        for rep in [from, to] {
            if !matches!(rep, Representation::Position | Representation::Momentum) {
                return Err(Error::RepresentationMismatch {
                    expected: Representation::Position,
                    found: rep,
                });
            }
        }
        if data.len() != self.x.n {
            return Err(Error::IncompatibleGrid(format!(
                "wavefunction length {} does not match axis {}",
                data.len(),
                self.x.n
            )));
        }
        if from == to {
            return Ok(());
        }
        let slice = data.as_slice_mut().expect("contiguous wavefunction");
        if to == Representation::Momentum {
            self.fft.forward_lanes(slice);
        } else {
            self.fft.inverse_lanes(slice);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel_l2(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (num / den).sqrt()
    }

    #[test]
    fn production_grid_metadata() {
        let g = make_phase_grid(256, 256, 20.0, 20.0, 1.0).unwrap();
        assert!((g.x.step - 20.0 / 256.0).abs() < 1e-15);
        let p_span = g.p.step * g.p.n as f64;
        assert!((p_span - 2.0 * PI / g.theta.step).abs() < 1e-12);
        assert!((p_span - 80.42).abs() < 0.01);
        assert!((g.p.step - g.theta.conjugate_step()).abs() < 1e-15);
        assert!((g.lambda.step - g.x.conjugate_step()).abs() < 1e-15);
    }

    #[test]
    fn small_grid_steps() {
        let g = make_phase_grid(8, 8, 8.0, 8.0, 1.0).unwrap();
        assert_eq!(g.x.step, 1.0);
        assert!((g.lambda.step - 2.0 * PI / 8.0).abs() < 1e-15);
        // zero frequency is a grid point
        assert!(g.lambda.point(4).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_sizes_and_extents() {
        assert!(matches!(
            make_phase_grid(100, 64, 10.0, 10.0, 1.0),
            Err(Error::NotPowerOfTwo(100))
        ));
        assert!(matches!(
            make_phase_grid(64, 64, -1.0, 10.0, 1.0),
            Err(Error::NonPositiveExtent(_))
        ));
        assert!(make_phase_grid(64, 64, 10.0, 10.0, 0.0).is_err());
    }

    #[test]
    fn gaussian_is_self_conjugate() {
        let g = make_phase_grid(128, 8, 30.0, 8.0, 1.0).unwrap();
        // XP → LambdaP touches axis 0 only
        let mut h = Array2::from_shape_fn((128, 8), |(i, _)| {
            C64::new((-g.x.point(i).powi(2) / 2.0).exp(), 0.0)
        });
        g.transform(&mut h, Representation::XP, Representation::LambdaP)
            .unwrap();
        for i in 0..128 {
            let lam = g.lambda.point(i);
            let expect = (2.0 * PI).sqrt() * (-lam * lam / 2.0).exp();
            assert!((h[[i, 3]] - expect).norm() < 1e-12, "λ = {lam}");
        }
    }

    #[test]
    fn p_multiplication_is_i_d_theta() {
        let g = make_phase_grid(16, 64, 16.0, 20.0, 1.0).unwrap();
        let kappa = g.p.point(40);
        let f = Array2::from_shape_fn((16, 64), |(i, j)| {
            let x = g.x.point(i);
            C64::from_polar((-x * x / 4.0).exp(), -kappa * g.theta.point(j))
        });
        let mut h = f.clone();
        g.transform(&mut h, Representation::XTheta, Representation::LambdaP)
            .unwrap();
        let p = g.p.points();
        for mut row in h.rows_mut() {
            for (v, pj) in row.iter_mut().zip(p.iter()) {
                *v *= *pj;
            }
        }
        g.transform(&mut h, Representation::LambdaP, Representation::XTheta)
            .unwrap();
        // i∂θ e^{−iκθ} = κ e^{−iκθ}
        let expect = f.mapv(|v| v * kappa);
        assert!(rel_l2(&h, &expect) < 1e-12);
    }

    #[test]
    fn lambda_multiplication_is_minus_i_d_x() {
        let g = make_phase_grid(64, 4, 20.0, 4.0, 1.0).unwrap();
        let kappa = g.lambda.point(37);
        let f = Array2::from_shape_fn((64, 4), |(i, _)| C64::from_polar(1.0, kappa * g.x.point(i)));
        let mut h = f.clone();
        g.transform(&mut h, Representation::XP, Representation::LambdaP)
            .unwrap();
        let lam = g.lambda.points();
        for (mut col, l) in h.rows_mut().into_iter().zip(lam.iter()) {
            col.mapv_inplace(|v| v * *l);
        }
        g.transform(&mut h, Representation::LambdaP, Representation::XP)
            .unwrap();
        assert!(rel_l2(&h, &f.mapv(|v| v * kappa)) < 1e-12);
    }

    #[test]
    fn integral_agrees_across_representations() {
        let g = make_phase_grid(64, 64, 16.0, 16.0, 1.0).unwrap();
        let mut w = Array2::from_shape_fn((64, 64), |(i, j)| {
            let x = g.x.point(i) - 1.0;
            let p = g.p.point(j) + 0.5;
            C64::new((-(x * x) - p * p).exp() / PI, 0.0)
        });
        let i_xp = g.integral(&w, Representation::XP).unwrap();
        let l2_xp = g.l2_norm_sq(&w, Representation::XP).unwrap();
        assert!((i_xp.re - 1.0).abs() < 1e-12);
        g.transform(&mut w, Representation::XP, Representation::XTheta)
            .unwrap();
        let i_xt = g.integral(&w, Representation::XTheta).unwrap();
        assert!((i_xt - i_xp).norm() < 1e-13);
        assert!((g.l2_norm_sq(&w, Representation::XTheta).unwrap() - l2_xp).abs() < 1e-13);
        g.transform(&mut w, Representation::XTheta, Representation::LambdaP)
            .unwrap();
        assert!((g.integral(&w, Representation::LambdaP).unwrap() - i_xp).norm() < 1e-13);
        assert!((g.l2_norm_sq(&w, Representation::LambdaP).unwrap() - l2_xp).abs() < 1e-13);
    }

    #[test]
    fn diagonal_factor_basics() {
        let g = make_phase_grid(16, 16, 10.0, 10.0, 1.0).unwrap();
        let sym = g.sample(Representation::XTheta, |_, _| 1.0).unwrap();
        let mut f = Array2::from_elem((16, 16), C64::new(0.5, 0.25));
        let orig = f.clone();
        apply_diagonal(&mut f, Representation::XTheta, Representation::XTheta, &sym, C64::new(0.0, 0.0))
            .unwrap();
        assert_eq!(f, orig);
        apply_diagonal(&mut f, Representation::XTheta, Representation::XTheta, &sym, C64::new(0.0, PI))
            .unwrap();
        assert!(rel_l2(&f, &orig.mapv(|v| -v)) < 1e-15);
        let err = apply_diagonal(&mut f, Representation::LambdaP, Representation::XTheta, &sym, C64::new(0.0, 1.0));
        assert!(matches!(err, Err(Error::RepresentationMismatch { .. })));
        let huge = g.sample(Representation::XTheta, |_, _| 1e6).unwrap();
        let err = DiagonalFactor::new(Representation::XTheta, &huge, C64::new(1.0, 0.0));
        assert!(matches!(err, Err(Error::NonFiniteExponent { index: 0 })));
    }

    #[test]
    fn line_grid_round_trip() {
        let lg = LineGrid::centered(128, 20.0, 1.0).unwrap();
        let psi = Array1::from_shape_fn(128, |k| {
            let x = lg.x.point(k);
            C64::from_polar((-(x - 1.0).powi(2) / 2.0).exp(), 2.0 * x)
        });
        let mut h = psi.clone();
        lg.transform(&mut h, Representation::Position, Representation::Momentum)
            .unwrap();
        let n1: f64 = psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * lg.x.step;
        let n2: f64 = h.iter().map(|v| v.norm_sqr()).sum::<f64>() * lg.k.step / (2.0 * PI);
        assert!((n1 - n2).abs() < 1e-13);
        lg.transform(&mut h, Representation::Momentum, Representation::Position)
            .unwrap();
        let err: f64 = h.iter().zip(&psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-13);
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(seed in 0u64..1000, rep_ix in 0usize..3) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = make_phase_grid(32, 16, 12.0, 9.0, 0.7).unwrap();
            let f = Array2::from_shape_fn((32, 16), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let reps = [Representation::XTheta, Representation::LambdaP, Representation::XP];
            let from = reps[rep_ix];
            let to = reps[(rep_ix + 1) % 3];
            let mut h = f.clone();
            let before = g.l2_norm_sq(&h, from).unwrap();
            g.transform(&mut h, from, to).unwrap();
            let mid = g.l2_norm_sq(&h, to).unwrap();
            prop_assert!((before - mid).abs() < 1e-12 * before);
            g.transform(&mut h, to, from).unwrap();
            prop_assert!(rel_l2(&h, &f) < 1e-13);
        }

        #[test]
        fn conjugate_identity(log_n in 1u32..12, extent in 0.1f64..100.0) {
            let a = AxisGrid::centered(1 << log_n, extent).unwrap();
            let prod = a.step * a.conjugate_step() * a.n as f64;
            prop_assert!((prod - 2.0 * PI).abs() < 8.0 * f64::EPSILON * 2.0 * PI);
        }

        #[test]
        fn unit_modulus_factor_preserves_norm(seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = make_phase_grid(16, 16, 10.0, 10.0, 1.0).unwrap();
            let mut f = Array2::from_shape_fn((16, 16), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let sym = Array2::from_shape_fn((16, 16), |_| rng.gen_range(-50.0..50.0));
            let before = g.l2_norm_sq(&f, Representation::XTheta).unwrap();
            apply_diagonal(&mut f, Representation::XTheta, Representation::XTheta, &sym, C64::new(0.0, rng.gen_range(-3.0..3.0))).unwrap();
            let after = g.l2_norm_sq(&f, Representation::XTheta).unwrap();
            prop_assert!((before - after).abs() < 1e-14 * before.max(1.0));
        }
    }
}
