//! Exact Kerr dynamics in the Fock basis and truncated-matrix operators.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use ndarray::Array1;

use crate::error::{Error, Result};
use crate::grid::{LineGrid, Representation, C64};
use crate::moyal::{mccoy_terms, rational_to_f64, PolynomialXP};
use crate::states::WaveFunction;

/// Fraction of the truncated basis kept when comparing operator identities.
pub const INTERIOR_FRACTION: f64 = 0.75;

#[derive(Clone, Debug, PartialEq)]
pub struct FockExpansion {
    pub coefficients: Vec<C64>,
}

impl FockExpansion {
    pub fn cutoff(&self) -> usize {
        self.coefficients.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn mean_number(&self) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// `⟨(N̂ℏ + ℏ/2)²⟩`, the Kerr energy.
    pub fn kerr_energy(&self, hbar: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(n, c)| ((n as f64 + 0.5) * hbar).powi(2) * c.norm_sqr())
            .sum()
    }

    /// `⟨self|other⟩` over the common cutoff.
    pub fn overlap(&self, other: &FockExpansion) -> C64 {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Coherent state `c_n = e^{−|α|²/2} αⁿ/√(n!)`, `α = (x₀ + i p₀)/√(2ℏ)`,
/// truncated once `|c_n| < tol` beyond the Poisson peak.
pub fn fock_expand(x0: f64, p0: f64, hbar: f64, tol: f64) -> Result<FockExpansion> {
    if !(hbar > 0.0 && tol > 0.0 && x0.is_finite() && p0.is_finite()) {
        return Err(Error::InvalidParameter(
            "fock expansion needs finite x0, p0 and positive hbar, tol".into(),
        ));
    }
    let alpha = C64::new(x0, p0) / (2.0 * hbar).sqrt();
    let mean = alpha.norm_sqr();
    let mut c = C64::new((-0.5 * mean).exp(), 0.0);
    let mut out = Vec::new();
    let mut n = 0usize;
    loop {
        if (n as f64) > mean && c.norm() < tol {
            break;
        }
        out.push(c);
        n += 1;
        c = c * alpha / (n as f64).sqrt();
        if n > 100_000 {
            return Err(Error::InvalidParameter("fock expansion does not converge".into()));
        }
    }
    Ok(FockExpansion { coefficients: out })
}

/// `c_n ← c_n exp(−i((n+½)ℏ)² t/ℏ)`.
pub fn evolve_exact_kerr(state: &FockExpansion, t: f64, hbar: f64) -> FockExpansion {
    FockExpansion {
        coefficients: state
            .coefficients
            .iter()
            .enumerate()
            .map(|(n, c)| {
                let e = ((n as f64 + 0.5) * hbar).powi(2);
                c * C64::from_polar(1.0, -e * t / hbar)
            })
            .collect(),
    }
}

/// Oscillator eigenfunctions `φ_0 … φ_{count−1}` at the given points, from the
/// normalized three-term recurrence.
pub fn hermite_functions(count: usize, xs: &Array1<f64>, hbar: f64) -> Vec<Array1<f64>> {
    let scale = hbar.powf(-0.25);
    let xi = xs.mapv(|x| x / hbar.sqrt());
    let mut out: Vec<Array1<f64>> = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(xi.mapv(|s| PI.powf(-0.25) * (-0.5 * s * s).exp()));
    if count > 1 {
        out.push(&xi * &out[0] * 2f64.sqrt());
    }
    for n in 1..count.saturating_sub(1) {
        let a = (2.0 / (n as f64 + 1.0)).sqrt();
        let b = (n as f64 / (n as f64 + 1.0)).sqrt();
        let next = &(&xi * &out[n]) * a - &out[n - 1] * b;
        out.push(next);
    }
    out.into_iter().map(|h| h * scale).collect()
}

/// `Σ c_n φ_n(x)` on the position axis.
pub fn psi_on_grid(state: &FockExpansion, grid: &LineGrid) -> Result<WaveFunction> {
    let xs = grid.x.points();
    let phis = hermite_functions(state.cutoff(), &xs, grid.hbar);
    let mut data = Array1::<C64>::zeros(xs.len());
    for (c, phi) in state.coefficients.iter().zip(&phis) {
        for (d, f) in data.iter_mut().zip(phi.iter()) {
            *d += c * f;
        }
    }
    WaveFunction::new(grid.clone(), data, Representation::Position)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator {
    pub dim: usize,
    pub matrix: DMatrix<C64>,
}

impl TruncatedOperator {
    pub fn new(matrix: DMatrix<C64>) -> Self {
        assert!(matrix.is_square());
        TruncatedOperator {
            dim: matrix.nrows(),
            matrix,
        }
    }

    pub fn identity(dim: usize) -> Self {
        TruncatedOperator::new(DMatrix::identity(dim, dim))
    }

    /// Annihilation operator `a|n⟩ = √n |n−1⟩`.
    pub fn annihilation(dim: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for n in 1..dim {
            m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
        }
        TruncatedOperator::new(m)
    }

    pub fn position(dim: usize, hbar: f64) -> Self {
        let a = TruncatedOperator::annihilation(dim).matrix;
        let ad = a.adjoint();
        TruncatedOperator::new((&a + &ad) * C64::new((hbar / 2.0).sqrt(), 0.0))
    }

    pub fn momentum(dim: usize, hbar: f64) -> Self {
        let a = TruncatedOperator::annihilation(dim).matrix;
        let ad = a.adjoint();
        TruncatedOperator::new((&ad - &a) * C64::new(0.0, (hbar / 2.0).sqrt()))
    }

    pub fn mul(&self, other: &TruncatedOperator) -> Self {
        TruncatedOperator::new(&self.matrix * &other.matrix)
    }

    pub fn add(&self, other: &TruncatedOperator) -> Self {
        TruncatedOperator::new(&self.matrix + &other.matrix)
    }

    pub fn sub(&self, other: &TruncatedOperator) -> Self {
        TruncatedOperator::new(&self.matrix - &other.matrix)
    }

    pub fn scale(&self, c: C64) -> Self {
        TruncatedOperator::new(&self.matrix * c)
    }

    pub fn commutator(&self, other: &TruncatedOperator) -> Self {
        TruncatedOperator::new(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }

    pub fn anticommutator(&self, other: &TruncatedOperator) -> Self {
        TruncatedOperator::new(&self.matrix * &other.matrix + &other.matrix * &self.matrix)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).camax()
    }

    /// `exp(factor · M)` for Hermitian `M`, via its eigen-decomposition.
    pub fn expm_hermitian(&self, factor: C64) -> Self {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let phases = DVector::from_iterator(
            self.dim,
            eig.eigenvalues.iter().map(|l| (factor * *l).exp()),
        );
        let v = &eig.eigenvectors;
        let mut scaled = v.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        TruncatedOperator::new(scaled * v.adjoint())
    }

    pub fn interior_size(&self) -> usize {
        ((self.dim as f64) * INTERIOR_FRACTION).floor() as usize
    }

    /// Frobenius norm of the leading `3/4` block.
    pub fn interior_norm(&self) -> f64 {
        let k = self.interior_size();
        self.matrix.view((0, 0), (k, k)).norm()
    }

    /// Largest entry modulus in the leading `3/4` block.
    pub fn interior_max(&self) -> f64 {
        let k = self.interior_size();
        self.matrix.view((0, 0), (k, k)).camax()
    }

    pub fn truncate(&self, dim: usize) -> Self {
        TruncatedOperator::new(self.matrix.view((0, 0), (dim, dim)).into_owned())
    }

    /// `⟨ψ|M|ψ⟩` for a Fock expansion padded or truncated to `dim`.
    pub fn expectation(&self, state: &FockExpansion) -> C64 {
        let v = DVector::from_iterator(
            self.dim,
            (0..self.dim).map(|n| state.coefficients.get(n).copied().unwrap_or_default()),
        );
        (v.adjoint() * &self.matrix * &v)[(0, 0)]
    }
}

/// Weyl-ordered operator of a symbol in the first `dim` Fock states.
///
/// Products are formed in a basis padded by the symbol's total degree, so the
/// returned block is free of truncation error.
pub fn matrix_rep(symbol: &PolynomialXP, dim: usize, hbar: f64) -> TruncatedOperator {
    let padded = dim + symbol.total_degree() as usize + 1;
    let x = TruncatedOperator::position(padded, hbar);
    let p = TruncatedOperator::momentum(padded, hbar);
    let max_x = symbol.degree_x() as usize;
    let max_p = symbol.degree_p() as usize;
    let mut xp = vec![TruncatedOperator::identity(padded)];
    for k in 1..=max_x {
        xp.push(xp[k - 1].mul(&x));
    }
    let mut pp = vec![TruncatedOperator::identity(padded)];
    for k in 1..=max_p {
        pp.push(pp[k - 1].mul(&p));
    }
    let mut acc = DMatrix::<C64>::zeros(padded, padded);
    for ((i, j), c) in symbol.terms() {
        let cv = c.eval(hbar);
        for t in mccoy_terms(i, j) {
            let w = cv * rational_to_f64(&t.coeff);
            let m = &xp[t.left_x as usize].matrix * &pp[t.p as usize].matrix
                * &xp[t.right_x as usize].matrix;
            acc += m * C64::new(w, 0.0);
        }
    }
    TruncatedOperator::new(acc).truncate(dim)
}
