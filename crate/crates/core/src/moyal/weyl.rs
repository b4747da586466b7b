//! Weyl correspondence for polynomial symbols.

use num_bigint::BigInt;
use num_traits::One;

use super::exact::{HbarPoly, Rational, Surd};
use super::parse::parse_polynomial;
use super::poly::{ComplexPoly, PolynomialXP};
use super::star::{double_commutator_symbol, star_complex, star_product};

/// One ordered product `coeff · x̂^a p̂^b x̂^c` of a McCoy expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderedTerm {
    pub coeff: Rational,
    pub left_x: u32,
    pub p: u32,
    pub right_x: u32,
}

/// `Op(x^i p^j) = 2^{−i} Σ_k C(i,k) x̂^k p̂^j x̂^{i−k}`.
pub fn mccoy_terms(i: u32, j: u32) -> Vec<OrderedTerm> {
    let den = BigInt::one() << i;
    let mut binom = BigInt::one();
    let mut out = Vec::with_capacity(i as usize + 1);
    for k in 0..=i {
        if k > 0 {
            binom = binom * BigInt::from(i - k + 1) / BigInt::from(k);
        }
        out.push(OrderedTerm {
            coeff: Rational::new(binom.clone(), den.clone()),
            left_x: k,
            p: j,
            right_x: i - k,
        });
    }
    out
}

/// An operator held through its (possibly complex) Weyl symbol.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OperatorPoly {
    symbol: ComplexPoly,
}

impl OperatorPoly {
    pub fn from_symbol(symbol: PolynomialXP) -> Self {
        OperatorPoly {
            symbol: ComplexPoly::real(symbol),
        }
    }

    pub fn from_complex(symbol: ComplexPoly) -> Self {
        OperatorPoly { symbol }
    }

    pub fn symbol(&self) -> &ComplexPoly {
        &self.symbol
    }

    /// Real symbol of a Hermitian operator, `None` otherwise.
    pub fn hermitian_symbol(&self) -> Option<&PolynomialXP> {
        self.symbol.is_real().then_some(&self.symbol.re)
    }

    pub fn compose(&self, other: &OperatorPoly) -> OperatorPoly {
        OperatorPoly::from_complex(star_complex(&self.symbol, &other.symbol))
    }

    pub fn commutator(&self, other: &OperatorPoly) -> OperatorPoly {
        OperatorPoly::from_complex(&self.compose(other).symbol - &other.compose(self).symbol)
    }

    pub fn anticommutator(&self, other: &OperatorPoly) -> OperatorPoly {
        OperatorPoly::from_complex(&self.compose(other).symbol + &other.compose(self).symbol)
    }

    pub fn add(&self, other: &OperatorPoly) -> OperatorPoly {
        OperatorPoly::from_complex(&self.symbol + &other.symbol)
    }

    pub fn scale(&self, c: &HbarPoly) -> OperatorPoly {
        OperatorPoly::from_complex(self.symbol.scale_hbar(c))
    }
}

/// Weyl symbol of `[p̂², x̂²]₊`, which is `2x²p² − ℏ²`.
pub fn anticommutator_p2_x2() -> PolynomialXP {
    let a = star_product(&PolynomialXP::p().pow(2), &PolynomialXP::x().pow(2));
    let b = star_product(&PolynomialXP::x().pow(2), &PolynomialXP::p().pow(2));
    let s = &a + &b;
    debug_assert!(s.is_real());
    s.re
}

/// Splits a symbol as `a·[p̂²,x̂²]₊ + c·1 + remainder`.
#[derive(Clone, Debug, PartialEq)]
pub struct KerrForm {
    pub anticommutator_coefficient: HbarPoly,
    pub constant: HbarPoly,
    pub remainder: PolynomialXP,
}

impl KerrForm {
    pub fn of(symbol: &PolynomialXP) -> KerrForm {
        let a = symbol
            .coefficient(2, 2)
            .scale(&Surd::frac(1, 2));
        let anti = anticommutator_p2_x2().scale_hbar(&a);
        let rest = symbol - &anti;
        let constant = rest.constant_term();
        let remainder = &rest - &PolynomialXP::hbar_constant(constant.clone());
        KerrForm {
            anticommutator_coefficient: a,
            constant,
            remainder,
        }
    }

    /// True for `−ℏ⁴/4 − (ℏ²/4)[p̂²,x̂²]₊`.
    pub fn is_kerr_identity(&self) -> bool {
        self.anticommutator_coefficient == HbarPoly::monomial(2, Surd::frac(-1, 4))
            && self.constant == HbarPoly::monomial(4, Surd::frac(-1, 4))
            && self.remainder.is_zero()
    }
}

/// Double commutator `[Â,[Â,B̂]]` of a generator pair, split in Kerr form.
#[derive(Clone, Debug)]
pub struct GeneratorReport {
    pub outer: PolynomialXP,
    pub inner: PolynomialXP,
    pub double_commutator: PolynomialXP,
    pub form: KerrForm,
}

pub fn generator_report(outer: &PolynomialXP, inner: &PolynomialXP) -> GeneratorReport {
    let dc = double_commutator_symbol(outer, inner);
    GeneratorReport {
        outer: outer.clone(),
        inner: inner.clone(),
        form: KerrForm::of(&dc),
        double_commutator: dc,
    }
}

/// `T = c_T p²/(2√2)`, `V = c_V x⁴/12`.
pub fn kerr_pair() -> (PolynomialXP, PolynomialXP) {
    (
        parse_polynomial("p^2/(2*sqrt2)").expect("static symbol"),
        parse_polynomial("x^4/12").expect("static symbol"),
    )
}

/// `T = p⁴/24 + p²/2`, `V = x²/(2√2)`.
pub fn alternate_pair() -> (PolynomialXP, PolynomialXP) {
    (
        parse_polynomial("p^4/24 + p^2/2").expect("static symbol"),
        parse_polynomial("x^2/(2*sqrt2)").expect("static symbol"),
    )
}

/// Outcome of comparing the alternate generator pair with the Kerr pair.
#[derive(Clone, Debug)]
pub struct AlternateCheck {
    pub kerr: GeneratorReport,
    /// Alternate pair with roles exchanged: `[V̂,[V̂,T̂]]`.
    pub swapped: GeneratorReport,
    /// Alternate pair used in the original roles: `[T̂,[T̂,V̂]]`.
    pub unswapped: GeneratorReport,
}

impl AlternateCheck {
    /// Ratio of the anticommutator coefficients, alternate over Kerr.
    pub fn anticommutator_ratio(&self) -> Option<Surd> {
        let a = self.swapped.form.anticommutator_coefficient.coefficient(2);
        let k = self.kerr.form.anticommutator_coefficient.coefficient(2);
        a.div(&k).ok()
    }

    pub fn swapped_matches_kerr(&self) -> bool {
        self.swapped.form.is_kerr_identity()
    }

    pub fn unswapped_matches_kerr(&self) -> bool {
        self.unswapped.form.is_kerr_identity()
    }
}

pub fn alternate_generator_check() -> AlternateCheck {
    let (kt, kv) = kerr_pair();
    let (at, av) = alternate_pair();
    AlternateCheck {
        kerr: generator_report(&kt, &kv),
        swapped: generator_report(&av, &at),
        unswapped: generator_report(&at, &av),
    }
}
