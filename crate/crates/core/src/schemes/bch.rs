//! Exponent of a composition through cubic order, plus the effective step of
//! a Chin block.

use num_complex::Complex64 as C64;

use super::coefficients::{Role, SplitScheme};
use crate::error::{Error, Result};
use crate::moyal::{
    double_bracket, double_commutator_symbol, parse_polynomial, rational, BracketKind, Laurent,
    PolynomialXP, Rational,
};

/// Element of the free Lie algebra on T, V truncated at degree three, in the
/// basis `T, V, [T,V], [T,[T,V]], [V,[V,T]]`. Coefficients are Laurent
/// polynomials in t₂.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CubicBch {
    pub t: Laurent,
    pub v: Laurent,
    pub tv: Laurent,
    pub ttv: Laurent,
    pub vvt: Laurent,
}

impl CubicBch {
    fn generator(role: Role, w: Laurent) -> Self {
        let mut out = CubicBch::default();
        match role {
            Role::Kinetic => out.t = w,
            Role::Potential => out.v = w,
        }
        out
    }

    fn add(&self, o: &CubicBch) -> CubicBch {
        CubicBch {
            t: &self.t + &o.t,
            v: &self.v + &o.v,
            tv: &self.tv + &o.tv,
            ttv: &self.ttv + &o.ttv,
            vvt: &self.vvt + &o.vvt,
        }
    }

    fn scale(&self, r: &Rational) -> CubicBch {
        CubicBch {
            t: self.t.scale(r),
            v: self.v.scale(r),
            tv: self.tv.scale(r),
            ttv: self.ttv.scale(r),
            vvt: self.vvt.scale(r),
        }
    }

    // [V,[T,V]] = −[V,[V,T]]; everything above degree three is dropped.
    fn bracket(&self, o: &CubicBch) -> CubicBch {
        CubicBch {
            t: Laurent::zero(),
            v: Laurent::zero(),
            tv: &(&self.t * &o.v) - &(&self.v * &o.t),
            ttv: &(&self.t * &o.tv) - &(&self.tv * &o.t),
            vvt: &(&self.tv * &o.v) - &(&self.v * &o.tv),
        }
    }

    /// `log(e^X e^Y)` through degree three.
    fn compose(&self, y: &CubicBch) -> CubicBch {
        let xy = self.bracket(y);
        let twelfth = rational(1, 12);
        self.add(y)
            .add(&xy.scale(&rational(1, 2)))
            .add(&self.bracket(&xy).scale(&twelfth))
            .add(&y.bracket(&xy).scale(&-twelfth))
    }

    pub fn eval(&self, t2: f64) -> [f64; 5] {
        [
            self.t.eval(t2),
            self.v.eval(t2),
            self.tv.eval(t2),
            self.ttv.eval(t2),
            self.vvt.eval(t2),
        ]
    }
}

/// Exact exponent of the product of factors (leftmost acting last is
/// irrelevant here: the scheme is read as a left-to-right operator product).
pub fn bch_cubic(scheme: &SplitScheme) -> CubicBch {
    scheme
        .factors
        .iter()
        .map(|f| CubicBch::generator(f.role, f.weight.as_laurent()))
        .reduce(|acc, g| acc.compose(&g))
        .unwrap_or_default()
}

/// Two single-variable generators filling the slots of a Chin block.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorPair {
    pub t_symbol: PolynomialXP,
    pub v_symbol: PolynomialXP,
    /// Exchanges the slots: `v_symbol` goes where `t_symbol` would.
    pub swapped: bool,
}

fn single_variable(s: &PolynomialXP) -> bool {
    s.is_x_only() || s.is_p_only()
}

impl GeneratorPair {
    pub fn new(t_symbol: PolynomialXP, v_symbol: PolynomialXP) -> Result<Self> {
        if !single_variable(&t_symbol) || !single_variable(&v_symbol) {
            return Err(Error::InvalidParameter(
                "generators must each depend on x alone or p alone".into(),
            ));
        }
        let mixed = (t_symbol.is_p_only() && v_symbol.is_x_only())
            || (t_symbol.is_x_only() && v_symbol.is_p_only());
        if !mixed {
            return Err(Error::InvalidParameter(
                "one generator must be a function of x and the other of p".into(),
            ));
        }
        Ok(GeneratorPair {
            t_symbol,
            v_symbol,
            swapped: false,
        })
    }

    /// `T = p²/(2√2)`, `V = x⁴/12`.
    pub fn kerr() -> Self {
        GeneratorPair {
            t_symbol: parse_polynomial("p^2/(2*sqrt2)").expect("static symbol"),
            v_symbol: parse_polynomial("x^4/12").expect("static symbol"),
            swapped: false,
        }
    }

    /// `T = p⁴/24 + p²/2`, `V = x²/(2√2)`, with the slots exchanged.
    pub fn alternate() -> Self {
        GeneratorPair {
            t_symbol: parse_polynomial("p^4/24 + p^2/2").expect("static symbol"),
            v_symbol: parse_polynomial("x^2/(2*sqrt2)").expect("static symbol"),
            swapped: true,
        }
    }

    pub fn with_swapped(mut self, swapped: bool) -> Self {
        self.swapped = swapped;
        self
    }

    /// `(kinetic slot, potential slot)`.
    pub fn slots(&self) -> (&PolynomialXP, &PolynomialXP) {
        if self.swapped {
            (&self.v_symbol, &self.t_symbol)
        } else {
            (&self.t_symbol, &self.v_symbol)
        }
    }

    /// Weyl symbol of `[Â,[Â,B̂]]` with A in the kinetic slot.
    pub fn double_commutator(&self) -> PolynomialXP {
        let (a, b) = self.slots();
        double_commutator_symbol(a, b)
    }

    /// Hamiltonian realized by the leading term of a block:
    /// `{{A,{{A,B}}}}` in the Moyal bracket.
    pub fn generated_hamiltonian(&self) -> PolynomialXP {
        let (a, b) = self.slots();
        double_bracket(a, a, b, BracketKind::Moyal)
    }

    /// `{{B,{{B,A}}}}`; the seven-factor block realizes `−t₂⁻³` times this
    /// in addition, so adding `t₂⁻³` times it to a potential cancels it.
    pub fn seven_factor_correction(&self) -> Result<PolynomialXP> {
        let (a, b) = self.slots();
        let c = double_bracket(b, b, a, BracketKind::Moyal);
        if !single_variable(&c) {
            return Err(Error::InvalidParameter(format!(
                "seven-factor correction {c} is not a function of one variable"
            )));
        }
        Ok(c)
    }
}

/// `σ = −i·cbrt(dt)`: the Chin coefficient acting on the sector differences
/// of the Liouville generator. Independent of ℏ.
pub fn chin_sigma(dt: f64) -> C64 {
    C64::new(0.0, -dt.cbrt())
}

/// Effective ε of a block realizing `Ĥ = prefactor·[T̂,[T̂,V̂]]`, so that
/// `ε³[T̂,[T̂,V̂]] = −i dt Ĥ/ℏ`: `ε = −i·cbrt(−dt·prefactor/ℏ)`. The Kerr
/// pair has prefactor `−1/ℏ²`, giving `ε = −i (dt/ℏ³)^{1/3}`.
pub fn effective_epsilon(dt: f64, hbar: f64, prefactor: f64) -> Result<C64> {
    if !(dt.is_finite() && hbar.is_finite() && prefactor.is_finite()) || hbar <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "effective epsilon needs finite dt, prefactor and positive hbar (dt={dt}, hbar={hbar}, prefactor={prefactor})"
        )));
    }
    if prefactor == 0.0 {
        return Err(Error::InvalidParameter("block prefactor is zero".into()));
    }
    let s = (-dt * prefactor / hbar).cbrt();
    Ok(C64::new(0.0, -s))
}

/// Kerr prefactor: `[T̂,[T̂,V̂]] = −ℏ²·(Kerr term)` up to a constant.
pub fn kerr_prefactor(hbar: f64) -> f64 {
    -1.0 / (hbar * hbar)
}
