use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{Signed, Zero};

use super::exact::{HbarPoly, Surd};

/// Sparse polynomial in `(x, p)` whose coefficients are polynomials in ℏ
/// over Q(√2). Key `(i, j)` stands for `x^i p^j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PolynomialXP {
    terms: BTreeMap<(u32, u32), HbarPoly>,
}

impl PolynomialXP {
    pub fn zero() -> Self {
        PolynomialXP::default()
    }

    pub fn one() -> Self {
        PolynomialXP::constant(Surd::one())
    }

    pub fn constant(c: Surd) -> Self {
        PolynomialXP::monomial(0, 0, HbarPoly::constant(c))
    }

    pub fn hbar_constant(c: HbarPoly) -> Self {
        PolynomialXP::monomial(0, 0, c)
    }

    pub fn x() -> Self {
        PolynomialXP::monomial(1, 0, HbarPoly::one())
    }

    pub fn p() -> Self {
        PolynomialXP::monomial(0, 1, HbarPoly::one())
    }

    /// The formal symbol ℏ as a polynomial.
    pub fn hbar() -> Self {
        PolynomialXP::monomial(0, 0, HbarPoly::monomial(1, Surd::one()))
    }

    pub fn monomial(i: u32, j: u32, c: HbarPoly) -> Self {
        let mut out = PolynomialXP::zero();
        out.add_term(i, j, &c);
        out
    }

    /// `c · x^i p^j` with an ℏ-free coefficient.
    pub fn term(c: Surd, i: u32, j: u32) -> Self {
        PolynomialXP::monomial(i, j, HbarPoly::constant(c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = ((u32, u32), &HbarPoly)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coefficient(&self, i: u32, j: u32) -> HbarPoly {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: &HbarPoly) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn scale(&self, c: &Surd) -> Self {
        self.scale_hbar(&HbarPoly::constant(c.clone()))
    }

    pub fn scale_hbar(&self, c: &HbarPoly) -> Self {
        let mut out = PolynomialXP::zero();
        for ((i, j), v) in &self.terms {
            out.add_term(*i, *j, &(v * c));
        }
        out
    }

    /// Multiplies every coefficient by ℏ^k.
    pub fn shift_hbar(&self, k: u32) -> Self {
        PolynomialXP {
            terms: self.terms.iter().map(|(m, v)| (*m, v.shift(k))).collect(),
        }
    }

    /// Divides every coefficient by ℏ^k, `None` if some coefficient is not divisible.
    pub fn unshift_hbar(&self, k: u32) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (m, v) in &self.terms {
            terms.insert(*m, v.unshift(k)?);
        }
        Some(PolynomialXP { terms })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = PolynomialXP::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// k-th derivative in x.
    pub fn deriv_x(&self, k: u32) -> Self {
        let mut out = PolynomialXP::zero();
        for ((i, j), v) in &self.terms {
            if *i >= k {
                let f = falling(*i, k);
                out.add_term(i - k, *j, &v.scale(&Surd::from_int(f)));
            }
        }
        out
    }

    /// k-th derivative in p.
    pub fn deriv_p(&self, k: u32) -> Self {
        let mut out = PolynomialXP::zero();
        for ((i, j), v) in &self.terms {
            if *j >= k {
                let f = falling(*j, k);
                out.add_term(*i, j - k, &v.scale(&Surd::from_int(f)));
            }
        }
        out
    }

    pub fn degree_x(&self) -> u32 {
        self.terms.keys().map(|(i, _)| *i).max().unwrap_or(0)
    }

    pub fn degree_p(&self) -> u32 {
        self.terms.keys().map(|(_, j)| *j).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn hbar_degree(&self) -> u32 {
        self.terms
            .values()
            .filter_map(|v| v.degree())
            .max()
            .unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| *k == (0, 0))
    }

    pub fn is_x_only(&self) -> bool {
        self.terms.keys().all(|(_, j)| *j == 0)
    }

    pub fn is_p_only(&self) -> bool {
        self.terms.keys().all(|(i, _)| *i == 0)
    }

    pub fn constant_term(&self) -> HbarPoly {
        self.coefficient(0, 0)
    }

    /// Coefficient of ℏ^k, as an ℏ-free polynomial.
    pub fn hbar_part(&self, k: u32) -> Self {
        let mut out = PolynomialXP::zero();
        for ((i, j), v) in &self.terms {
            out.add_term(*i, *j, &HbarPoly::constant(v.coefficient(k)));
        }
        out
    }

    /// The ℏ⁰ part.
    pub fn classical_part(&self) -> Self {
        self.hbar_part(0)
    }

    /// Terms selected by a predicate on `(x-degree, p-degree)`.
    pub fn filter(&self, keep: impl Fn(u32, u32) -> bool) -> Self {
        PolynomialXP {
            terms: self
                .terms
                .iter()
                .filter(|((i, j), _)| keep(*i, *j))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Terms whose x-degree and p-degree are both odd.
    pub fn odd_odd_part(&self) -> Self {
        self.filter(|i, j| i % 2 == 1 && j % 2 == 1)
    }

    pub fn eval(&self, x: f64, p: f64, hbar: f64) -> f64 {
        self.terms
            .iter()
            .map(|((i, j), v)| v.eval(hbar) * x.powi(*i as i32) * p.powi(*j as i32))
            .sum()
    }

    /// Numeric coefficients `(i, j, c)` at a given ℏ, for fast repeated evaluation.
    pub fn numeric_terms(&self, hbar: f64) -> Vec<(i32, i32, f64)> {
        self.terms
            .iter()
            .map(|((i, j), v)| (*i as i32, *j as i32, v.eval(hbar)))
            .collect()
    }

    /// Univariate coefficient vector in x for an x-only polynomial.
    pub fn x_coefficients(&self, hbar: f64) -> Option<Vec<f64>> {
        if !self.is_x_only() {
            return None;
        }
        let mut c = vec![0.0; self.degree_x() as usize + 1];
        for ((i, _), v) in &self.terms {
            c[*i as usize] = v.eval(hbar);
        }
        Some(c)
    }

    /// Univariate coefficient vector in p for a p-only polynomial.
    pub fn p_coefficients(&self, hbar: f64) -> Option<Vec<f64>> {
        if !self.is_p_only() {
            return None;
        }
        let mut c = vec![0.0; self.degree_p() as usize + 1];
        for ((_, j), v) in &self.terms {
            c[*j as usize] = v.eval(hbar);
        }
        Some(c)
    }
}

fn falling(n: u32, k: u32) -> i64 {
    (0..k).map(|t| (n - t) as i64).product()
}

impl AddAssign<&PolynomialXP> for PolynomialXP {
    fn add_assign(&mut self, rhs: &PolynomialXP) {
        for ((i, j), v) in &rhs.terms {
            self.add_term(*i, *j, v);
        }
    }
}

impl SubAssign<&PolynomialXP> for PolynomialXP {
    fn sub_assign(&mut self, rhs: &PolynomialXP) {
        for ((i, j), v) in &rhs.terms {
            self.add_term(*i, *j, &-v);
        }
    }
}

impl Add for &PolynomialXP {
    type Output = PolynomialXP;
    fn add(self, rhs: &PolynomialXP) -> PolynomialXP {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &PolynomialXP {
    type Output = PolynomialXP;
    fn sub(self, rhs: &PolynomialXP) -> PolynomialXP {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &PolynomialXP {
    type Output = PolynomialXP;
    fn neg(self) -> PolynomialXP {
        PolynomialXP {
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }
}

impl Mul for &PolynomialXP {
    type Output = PolynomialXP;
    fn mul(self, rhs: &PolynomialXP) -> PolynomialXP {
        let mut out = PolynomialXP::zero();
        for ((i1, j1), v1) in &self.terms {
            for ((i2, j2), v2) in &rhs.terms {
                out.add_term(i1 + i2, j1 + j2, &(v1 * v2));
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                &self * &rhs
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

owned_ops!(PolynomialXP);

/// Writes `c·hbar^k·x^i·p^j` terms in a form the parser reads back.
impl fmt::Display for PolynomialXP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        // Highest total degree first, then by x-degree.
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by(|a, b| (b.0 + b.1, b.0).cmp(&(a.0 + a.1, a.0)));
        for (i, j) in keys {
            let coeff = &self.terms[&(i, j)];
            for (k, c) in coeff.terms().collect::<Vec<_>>().into_iter().rev() {
                let negative = c.rational.is_negative()
                    || (c.rational.is_zero() && c.radical.is_negative());
                let shown = if negative { -c } else { c.clone() };
                if first {
                    if negative {
                        write!(f, "-")?;
                    }
                } else if negative {
                    write!(f, " - ")?;
                } else {
                    write!(f, " + ")?;
                }
                first = false;
                let mut factors: Vec<String> = Vec::new();
                if !shown.is_one() {
                    factors.push(shown.to_string());
                }
                match k {
                    0 => {}
                    1 => factors.push("hbar".into()),
                    _ => factors.push(format!("hbar^{k}")),
                }
                for (name, e) in [("x", i), ("p", j)] {
                    match e {
                        0 => {}
                        1 => factors.push(name.into()),
                        _ => factors.push(format!("{name}^{e}")),
                    }
                }
                if factors.is_empty() {
                    factors.push("1".into());
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `re + i·im` with both parts real polynomials; star products of real
/// symbols land here.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ComplexPoly {
    pub re: PolynomialXP,
    pub im: PolynomialXP,
}

impl ComplexPoly {
    pub fn real(re: PolynomialXP) -> Self {
        ComplexPoly {
            re,
            im: PolynomialXP::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Multiplication by i.
    pub fn times_i(&self) -> Self {
        ComplexPoly {
            re: -&self.im,
            im: self.re.clone(),
        }
    }

    pub fn scale_hbar(&self, c: &HbarPoly) -> Self {
        ComplexPoly {
            re: self.re.scale_hbar(c),
            im: self.im.scale_hbar(c),
        }
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        ComplexPoly {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        ComplexPoly {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl fmt::Display for ComplexPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "({}) + i*({})", self.re, self.im)
        }
    }
}
