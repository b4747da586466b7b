use num_bigint::BigInt;
use num_traits::One;

use super::exact::{rational, HbarPoly, Rational, Surd};
use super::poly::{ComplexPoly, PolynomialXP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BracketKind {
    Moyal,
    Poisson,
}

fn falling(n: u32, k: u32) -> BigInt {
    (0..k).map(|t| BigInt::from(n - t)).product()
}

fn binomial(n: u32, k: u32) -> BigInt {
    falling(n, k) / falling(k, k)
}

/// Exact Groenewold–Moyal product of two real symbols.
///
/// Order-n terms carry `(iℏ/2)^n / n!`; even orders land in the real part and
/// odd orders in the imaginary part, with the sign of `i^n`.
pub fn star_product(f: &PolynomialXP, g: &PolynomialXP) -> ComplexPoly {
    let mut out = ComplexPoly::default();
    for ((i1, j1), c1) in f.terms() {
        for ((i2, j2), c2) in g.terms() {
            let c12 = c1 * c2;
            let max_n = (i1.min(j2)) + (j1.min(i2));
            let mut n_fact = BigInt::one();
            for n in 0..=max_n {
                if n > 0 {
                    n_fact *= BigInt::from(n);
                }
                let den = (BigInt::one() << n) * &n_fact;
                for k in 0..=n {
                    let a = n - k;
                    let b = k;
                    if a > i1 || a > j2 || b > j1 || b > i2 {
                        continue;
                    }
                    let mut num = binomial(n, k)
                        * falling(i1, a)
                        * falling(j1, b)
                        * falling(j2, a)
                        * falling(i2, b);
                    if k % 2 == 1 {
                        num = -num;
                    }
                    if n % 4 >= 2 {
                        num = -num;
                    }
                    let r = Rational::new(num, den.clone());
                    let coeff = c12.shift(n).scale_rational(&r);
                    let (ix, jx) = (i1 - a + i2 - b, j1 - b + j2 - a);
                    if n % 2 == 0 {
                        out.re.add_term(ix, jx, &coeff);
                    } else {
                        out.im.add_term(ix, jx, &coeff);
                    }
                }
            }
        }
    }
    out
}

/// Star product of complex symbols.
pub fn star_complex(f: &ComplexPoly, g: &ComplexPoly) -> ComplexPoly {
    let rr = star_product(&f.re, &g.re);
    let ii = star_product(&f.im, &g.im);
    let ri = star_product(&f.re, &g.im);
    let ir = star_product(&f.im, &g.re);
    // (a + ib)(c + id) with each product itself complex
    let re_part = &rr - &ii;
    let im_part = &ri + &ir;
    &re_part + &im_part.times_i()
}

/// `(f⋆g − g⋆f)/(iℏ)`, exact and real for real inputs.
pub fn moyal_bracket(f: &PolynomialXP, g: &PolynomialXP) -> PolynomialXP {
    let diff = &star_product(f, g) - &star_product(g, f);
    assert!(
        diff.re.is_zero(),
        "star commutator of real symbols must be purely imaginary"
    );
    diff.im
        .unshift_hbar(1)
        .expect("star commutator is divisible by hbar")
}

pub fn poisson_bracket(f: &PolynomialXP, g: &PolynomialXP) -> PolynomialXP {
    &(&f.deriv_x(1) * &g.deriv_p(1)) - &(&f.deriv_p(1) * &g.deriv_x(1))
}

pub fn bracket(f: &PolynomialXP, g: &PolynomialXP, kind: BracketKind) -> PolynomialXP {
    match kind {
        BracketKind::Moyal => moyal_bracket(f, g),
        BracketKind::Poisson => poisson_bracket(f, g),
    }
}

/// `{outer, {inner_a, inner_b}}` in the chosen bracket.
pub fn double_bracket(
    outer: &PolynomialXP,
    inner_a: &PolynomialXP,
    inner_b: &PolynomialXP,
    kind: BracketKind,
) -> PolynomialXP {
    bracket(outer, &bracket(inner_a, inner_b, kind), kind)
}

/// Weyl symbol of the operator double commutator `[Â,[Â,B̂]] = (iℏ)²{{A,{{A,B}}}}`.
pub fn double_commutator_symbol(a: &PolynomialXP, b: &PolynomialXP) -> PolynomialXP {
    -&double_bracket(a, a, b, BracketKind::Moyal).shift_hbar(2)
}

/// `c · x^i p^j` with a rational coefficient.
pub fn rational_term(num: i64, den: i64, i: u32, j: u32) -> PolynomialXP {
    PolynomialXP::monomial(i, j, HbarPoly::constant(Surd::from_rational(rational(num, den))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moyal::parse_polynomial;
    use proptest::prelude::*;

    fn poly(s: &str) -> PolynomialXP {
        parse_polynomial(s).unwrap()
    }

    #[test]
    fn star_with_one_is_identity() {
        let f = poly("3*x^2*p - hbar*p^3 + 1/2");
        let s = star_product(&f, &PolynomialXP::one());
        assert_eq!(s, ComplexPoly::real(f.clone()));
        assert_eq!(star_product(&PolynomialXP::one(), &f), ComplexPoly::real(f));
    }

    #[test]
    fn x_star_p() {
        let s = star_product(&poly("x"), &poly("p"));
        assert_eq!(s.re, poly("x*p"));
        assert_eq!(s.im, poly("hbar/2"));
    }

    #[test]
    fn anticommutator_symbol_of_p2_x2() {
        let a = star_product(&poly("p^2"), &poly("x^2"));
        let b = star_product(&poly("x^2"), &poly("p^2"));
        let sum = &a + &b;
        assert!(sum.is_real());
        assert_eq!(sum.re, poly("2*x^2*p^2 - hbar^2"));
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(moyal_bracket(&poly("x"), &poly("p")), PolynomialXP::one());
        assert_eq!(moyal_bracket(&poly("x^2"), &poly("p^2")), poly("4*x*p"));
        assert_eq!(
            moyal_bracket(&poly("x^3"), &poly("p^3")),
            poly("9*x^2*p^2 - 3/2*hbar^2")
        );
        assert_eq!(poisson_bracket(&poly("x"), &poly("p")), PolynomialXP::one());
        assert_eq!(poisson_bracket(&poly("x^4"), &poly("p^2")), poly("8*x^3*p"));
        assert_eq!(
            double_bracket(&poly("p"), &poly("x^3"), &poly("p"), BracketKind::Poisson),
            poly("-6*x")
        );
    }

    #[test]
    fn kerr_pair_double_bracket() {
        let t = poly("p^2/(2*sqrt2)");
        let v = poly("x^4/12");
        assert_eq!(
            double_bracket(&t, &t, &v, BracketKind::Moyal),
            poly("x^2*p^2/2")
        );
        let c = double_commutator_symbol(&t, &v);
        // −ℏ⁴/4 − (ℏ²/4)(2x²p² − ℏ²)
        assert_eq!(c, poly("-hbar^2*x^2*p^2/2"));
    }

    #[test]
    fn constant_outer_bracket_vanishes() {
        let f = poly("7/3");
        assert!(double_bracket(&f, &f, &poly("x^3*p^2"), BracketKind::Moyal).is_zero());
    }

    fn arb_poly(max_deg: u32) -> impl Strategy<Value = PolynomialXP> {
        prop::collection::vec((0..=max_deg, 0..=max_deg, -5i64..=5, 0u32..2), 0..6).prop_map(
            |terms| {
                let mut out = PolynomialXP::zero();
                for (i, j, c, h) in terms {
                    out.add_term(i, j, &HbarPoly::monomial(h, Surd::from_int(c)));
                }
                out
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn antisymmetry(f in arb_poly(4), g in arb_poly(4)) {
            prop_assert_eq!(moyal_bracket(&f, &g), -moyal_bracket(&g, &f));
        }

        #[test]
        fn jacobi(f in arb_poly(3), g in arb_poly(3), h in arb_poly(3)) {
            let a = moyal_bracket(&f, &moyal_bracket(&g, &h));
            let b = moyal_bracket(&g, &moyal_bracket(&h, &f));
            let c = moyal_bracket(&h, &moyal_bracket(&f, &g));
            prop_assert!((&(&a + &b) + &c).is_zero());
        }

        #[test]
        fn classical_part_is_poisson(f in arb_poly(6), g in arb_poly(6)) {
            let f0 = f.classical_part();
            let g0 = g.classical_part();
            prop_assert_eq!(moyal_bracket(&f0, &g0).classical_part(), poisson_bracket(&f0, &g0));
        }

        #[test]
        fn star_is_associative(f in arb_poly(2), g in arb_poly(2), h in arb_poly(2)) {
            let l = star_complex(&star_product(&f, &g), &ComplexPoly::real(h.clone()));
            let r = star_complex(&ComplexPoly::real(f.clone()), &star_product(&g, &h));
            prop_assert_eq!(l, r);
        }
    }
}
