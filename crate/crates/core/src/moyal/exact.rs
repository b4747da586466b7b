//! Exact scalars used by the symbolic layer.
//!
//! [`Surd`] is an element `a + b√2` of the field Q(√2); [`HbarPoly`] is a
//! polynomial in ℏ with Q(√2) coefficients; [`Laurent`] is a rational Laurent
//! polynomial in one formal parameter (used for splitting weights that depend
//! on the free parameter `t₂`).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Very large numerators/denominators: fall back to a scaled quotient.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// `rational + radical·√2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    pub rational: Rational,
    pub radical: Rational,
}

impl Surd {
    pub fn new(rational: Rational, radical: Rational) -> Self {
        Surd { rational, radical }
    }

    pub fn from_rational(r: Rational) -> Self {
        Surd::new(r, Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Surd::from_rational(rational(n, 1))
    }

    pub fn frac(num: i64, den: i64) -> Self {
        Surd::from_rational(rational(num, den))
    }

    pub fn sqrt2() -> Self {
        Surd::new(Rational::zero(), Rational::one())
    }

    pub fn zero() -> Self {
        Surd::from_int(0)
    }

    pub fn one() -> Self {
        Surd::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.radical.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.rational.is_one() && self.radical.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.radical.is_zero()
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Surd::new(&self.rational * r, &self.radical * r)
    }

    /// Multiplicative inverse via the conjugate `a − b√2`.
    pub fn inverse(&self) -> Result<Self> {
        let norm = &self.rational * &self.rational
            - Rational::from_integer(BigInt::from(2)) * &self.radical * &self.radical;
        if norm.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Surd::new(&self.rational / &norm, -&self.radical / &norm))
    }

    pub fn div(&self, other: &Surd) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.rational) + rational_to_f64(&self.radical) * std::f64::consts::SQRT_2
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        Surd::new(&self.rational + &rhs.rational, &self.radical + &rhs.radical)
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        Surd::new(&self.rational - &rhs.rational, &self.radical - &rhs.radical)
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let two = Rational::from_integer(BigInt::from(2));
        Surd::new(
            &self.rational * &rhs.rational + two * &self.radical * &rhs.radical,
            &self.rational * &rhs.radical + &self.radical * &rhs.rational,
        )
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd::new(-&self.rational, -&self.radical)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rational.is_zero(), self.radical.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => fmt_rational(&self.rational, f),
            (true, false) => {
                if self.radical.is_one() {
                    write!(f, "sqrt2")
                } else if (-&self.radical).is_one() {
                    write!(f, "-sqrt2")
                } else {
                    fmt_rational(&self.radical, f)?;
                    write!(f, "*sqrt2")
                }
            }
            (false, false) => {
                write!(f, "(")?;
                fmt_rational(&self.rational, f)?;
                if self.radical.is_negative() {
                    write!(f, " - ")?;
                    fmt_rational(&-&self.radical, f)?;
                } else {
                    write!(f, " + ")?;
                    fmt_rational(&self.radical, f)?;
                }
                write!(f, "*sqrt2)")
            }
        }
    }
}

/// Polynomial in ℏ with Q(√2) coefficients, sparse and canonical (no zeros).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct HbarPoly {
    terms: BTreeMap<u32, Surd>,
}

impl HbarPoly {
    pub fn zero() -> Self {
        HbarPoly::default()
    }

    pub fn constant(c: Surd) -> Self {
        HbarPoly::monomial(0, c)
    }

    pub fn one() -> Self {
        HbarPoly::constant(Surd::one())
    }

    pub fn monomial(power: u32, c: Surd) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(power, c);
        }
        HbarPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Surd)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coefficient(&self, power: u32) -> Surd {
        self.terms.get(&power).cloned().unwrap_or_else(Surd::zero)
    }

    /// Largest ℏ power present, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    /// Smallest ℏ power present.
    pub fn lowest_power(&self) -> Option<u32> {
        self.terms.keys().next().copied()
    }

    pub fn add_term(&mut self, power: u32, c: &Surd) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(power).or_insert_with(Surd::zero);
        *entry = &*entry + c;
        if entry.is_zero() {
            self.terms.remove(&power);
        }
    }

    pub fn scale(&self, c: &Surd) -> Self {
        if c.is_zero() {
            return HbarPoly::zero();
        }
        HbarPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&Surd::from_rational(r.clone()))
    }

    /// Multiplies by ℏ^k.
    pub fn shift(&self, k: u32) -> Self {
        HbarPoly {
            terms: self.terms.iter().map(|(p, v)| (p + k, v.clone())).collect(),
        }
    }

    /// Divides by ℏ^k; `None` when a term of degree below `k` is present.
    pub fn unshift(&self, k: u32) -> Option<Self> {
        if self.terms.keys().any(|p| *p < k) {
            return None;
        }
        Some(HbarPoly {
            terms: self.terms.iter().map(|(p, v)| (p - k, v.clone())).collect(),
        })
    }

    /// Part of the polynomial of ℏ-degree zero.
    pub fn classical_part(&self) -> Surd {
        self.coefficient(0)
    }

    /// Division by a constant that is free of ℏ.
    pub fn div_surd(&self, c: &Surd) -> Result<Self> {
        let inv = c.inverse()?;
        Ok(self.scale(&inv))
    }

    pub fn eval(&self, hbar: f64) -> f64 {
        self.terms
            .iter()
            .map(|(k, v)| v.to_f64() * hbar.powi(*k as i32))
            .sum()
    }
}

impl Add for &HbarPoly {
    type Output = HbarPoly;
    fn add(self, rhs: &HbarPoly) -> HbarPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&HbarPoly> for HbarPoly {
    fn add_assign(&mut self, rhs: &HbarPoly) {
        for (k, v) in &rhs.terms {
            self.add_term(*k, v);
        }
    }
}

impl SubAssign<&HbarPoly> for HbarPoly {
    fn sub_assign(&mut self, rhs: &HbarPoly) {
        for (k, v) in &rhs.terms {
            self.add_term(*k, &-v);
        }
    }
}

impl Sub for &HbarPoly {
    type Output = HbarPoly;
    fn sub(self, rhs: &HbarPoly) -> HbarPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &HbarPoly {
    type Output = HbarPoly;
    fn mul(self, rhs: &HbarPoly) -> HbarPoly {
        let mut out = HbarPoly::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &rhs.terms {
                out.add_term(ka + kb, &(va * vb));
            }
        }
        out
    }
}

impl Neg for &HbarPoly {
    type Output = HbarPoly;
    fn neg(self) -> HbarPoly {
        HbarPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }
}

impl fmt::Display for HbarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, v) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{v}")?;
            match k {
                0 => {}
                1 => write!(f, "*hbar")?,
                _ => write!(f, "*hbar^{k}")?,
            }
        }
        Ok(())
    }
}

/// Rational Laurent polynomial in a single formal parameter.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Laurent {
    terms: BTreeMap<i32, Rational>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn monomial(coeff: Rational, power: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(power, coeff);
        }
        Laurent { terms }
    }

    pub fn constant(coeff: Rational) -> Self {
        Laurent::monomial(coeff, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, power: i32) -> Rational {
        self.terms.get(&power).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    fn add_term(&mut self, power: i32, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(power).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&power);
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = Laurent::zero();
        for (k, v) in &self.terms {
            out.add_term(*k, &(v * r));
        }
        out
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(k, v)| rational_to_f64(v) * t.powi(*k))
            .sum()
    }
}

impl Add for &Laurent {
    type Output = Laurent;
    fn add(self, rhs: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v);
        }
        out
    }
}

impl Sub for &Laurent {
    type Output = Laurent;
    fn sub(self, rhs: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, &-v);
        }
        out
    }
}

impl Mul for &Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &rhs.terms {
                out.add_term(ka + kb, &(va * vb));
            }
        }
        out
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, v) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            fmt_rational(v, f)?;
            if *k != 0 {
                write!(f, "*t^{k}")?;
            }
        }
        Ok(())
    }
}
