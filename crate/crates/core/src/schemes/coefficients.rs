use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::moyal::{rational, rational_to_f64, HbarPoly, Laurent, PolynomialXP, Rational, Surd};

/// Slot of a factor in a composition. The names follow the Kerr usage; in a
/// Chin block the `Kinetic` slot holds whichever generator appears twice in
/// the surviving double commutator, and it may be a function of x.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Kinetic,
    Potential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Strang,
    U9,
    U7,
}

impl SchemeKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "strang" => Ok(SchemeKind::Strang),
            "u9" => Ok(SchemeKind::U9),
            "u7" => Ok(SchemeKind::U7),
            other => Err(Error::InvalidParameter(format!(
                "unknown scheme '{other}' (expected u9, u7 or strang)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Strang => "strang",
            SchemeKind::U9 => "u9",
            SchemeKind::U7 => "u7",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exact weight `coeff · t₂^t2_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weight {
    pub coeff: Rational,
    pub t2_power: i32,
}

impl Weight {
    pub fn new(num: i64, den: i64, t2_power: i32) -> Self {
        Weight {
            coeff: rational(num, den),
            t2_power,
        }
    }

    pub fn value(&self, t2: f64) -> f64 {
        rational_to_f64(&self.coeff) * t2.powi(self.t2_power)
    }

    pub fn as_laurent(&self) -> Laurent {
        Laurent::monomial(self.coeff.clone(), self.t2_power)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub role: Role,
    pub weight: Weight,
}

/// Correction the composition leaves at order ε³ in the exponent,
/// `t₂^t2_power · symbol` (operator Weyl symbol, Kerr generator pair).
#[derive(Clone, Debug, PartialEq)]
pub struct Compensation {
    pub symbol: PolynomialXP,
    pub t2_power: i32,
}

impl Compensation {
    /// Symbol to add, times `t₂^t2_power`, to the potential so that the
    /// realized Hamiltonian is unchanged at first order in dt.
    pub fn potential_correction(&self) -> PolynomialXP {
        self.symbol
            .unshift_hbar(2)
            .expect("compensation symbols carry an explicit hbar^2")
    }

    /// Coefficient of the x⁶ term at a numeric t₂, as a polynomial in ℏ.
    pub fn x6_coefficient(&self, t2: f64) -> (HbarPoly, f64) {
        (self.symbol.coefficient(6, 0), t2.powi(self.t2_power))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitScheme {
    pub kind: SchemeKind,
    pub factors: Vec<Factor>,
    /// Order in ε of the leading surviving commutator term.
    pub order_generated: u32,
    pub compensation: Option<Compensation>,
    pub t2: f64,
}

fn check_t2(t2: f64) -> Result<()> {
    if t2 == 0.0 || !t2.is_finite() {
        return Err(Error::InvalidParameter(format!("t2 must be finite and nonzero, got {t2}")));
    }
    Ok(())
}

/// Default free parameter `t₂ = −6^{1/3}`.
pub fn default_t2() -> f64 {
    -(6f64.cbrt())
}

fn t(num: i64, den: i64, pow: i32) -> Factor {
    Factor {
        role: Role::Kinetic,
        weight: Weight::new(num, den, pow),
    }
}

fn v(num: i64, den: i64, pow: i32) -> Factor {
    Factor {
        role: Role::Potential,
        weight: Weight::new(num, den, pow),
    }
}

/// `exp(εT/2) exp(εV) exp(εT/2)`.
pub fn strang() -> SplitScheme {
    SplitScheme {
        kind: SchemeKind::Strang,
        factors: vec![t(1, 2, 0), v(1, 1, 0), t(1, 2, 0)],
        order_generated: 1,
        compensation: None,
        t2: 0.0,
    }
}

/// Nine-factor composition with `t₁ = −t₂`, `v₁ = t₂⁻²`, `v₂ = −v₁/2`,
/// `v₀ = −2(v₁ + v₂)`.
pub fn u9_coefficients(t2: f64) -> Result<SplitScheme> {
    check_t2(t2)?;
    let t1 = t(-1, 1, 1);
    let t2f = t(1, 1, 1);
    let v1 = v(1, 1, -2);
    let v2 = v(-1, 2, -2);
    let v0 = v(-1, 1, -2);
    Ok(SplitScheme {
        kind: SchemeKind::U9,
        factors: vec![
            v2.clone(),
            t2f.clone(),
            v1.clone(),
            t1.clone(),
            v0,
            t1,
            v1,
            t2f,
            v2,
        ],
        order_generated: 3,
        compensation: None,
        t2,
    })
}

/// Seven-factor composition `T V T V T V T` with `v₀ = −2v₁`. Its cubic term
/// carries an extra `−t₂⁻³[V,[V,T]]`, which for the Kerr pair is
/// `ℏ²x⁶/(9√2 t₂³)`.
pub fn u7_coefficients(t2: f64) -> Result<SplitScheme> {
    check_t2(t2)?;
    let t1 = t(-1, 1, 1);
    let t2f = t(1, 1, 1);
    let v1 = v(1, 1, -2);
    let v0 = v(-2, 1, -2);
    // ℏ²/(9√2) = √2 ℏ²/18
    let comp = PolynomialXP::monomial(
        6,
        0,
        HbarPoly::monomial(2, Surd::new(Rational::zero(), rational(1, 18))),
    );
    Ok(SplitScheme {
        kind: SchemeKind::U7,
        factors: vec![t2f.clone(), v1.clone(), t1.clone(), v0, t1, v1, t2f],
        order_generated: 3,
        compensation: Some(Compensation {
            symbol: comp,
            t2_power: -3,
        }),
        t2,
    })
}

pub fn scheme_for(kind: SchemeKind, t2: f64) -> Result<SplitScheme> {
    match kind {
        SchemeKind::Strang => Ok(strang()),
        SchemeKind::U9 => u9_coefficients(t2),
        SchemeKind::U7 => u7_coefficients(t2),
    }
}

impl SplitScheme {
    pub fn weight_sum(&self, role: Role) -> Laurent {
        self.factors
            .iter()
            .filter(|f| f.role == role)
            .fold(Laurent::zero(), |acc, f| &acc + &f.weight.as_laurent())
    }

    pub fn is_palindromic(&self) -> bool {
        self.factors.iter().eq(self.factors.iter().rev())
    }

    /// `(role, numeric weight)` at the scheme's t₂.
    pub fn numeric_factors(&self) -> Vec<(Role, f64)> {
        self.factors
            .iter()
            .map(|f| (f.role, f.weight.value(self.t2)))
            .collect()
    }

    /// Count of factors in each slot.
    pub fn count(&self, role: Role) -> usize {
        self.factors.iter().filter(|f| f.role == role).count()
    }
}
