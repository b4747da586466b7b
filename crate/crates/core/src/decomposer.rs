//! Expansion of non-separable polynomials in nested-bracket elements
//! `XXP(n,m) = {{xⁿ,{{xⁿ,pᵐ}}}}` and `PXP(n,m) = {{pᵐ,{{xⁿ,pᵐ}}}}`.
//!
//! Every XXP element has only even powers of x and every PXP element only
//! even powers of p, so monomials `x^i p^j` with `i` and `j` both odd are
//! never reached. They are returned as the unreachable part of the residual.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::moyal::{double_bracket, BracketKind, HbarPoly, PolynomialXP, Rational, Surd};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisKind {
    Xxp,
    Pxp,
}

impl BasisKind {
    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Xxp => "XXP",
            BasisKind::Pxp => "PXP",
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BracketBasisElement {
    pub kind: BasisKind,
    pub n: u32,
    pub m: u32,
    pub bracket: BracketKind,
    pub expansion: PolynomialXP,
}

impl BracketBasisElement {
    /// Generator that appears twice: `xⁿ` for XXP, `pᵐ` for PXP.
    pub fn outer_monomial(&self) -> PolynomialXP {
        match self.kind {
            BasisKind::Xxp => PolynomialXP::x().pow(self.n),
            BasisKind::Pxp => PolynomialXP::p().pow(self.m),
        }
    }

    /// The other generator.
    pub fn inner_monomial(&self) -> PolynomialXP {
        match self.kind {
            BasisKind::Xxp => PolynomialXP::p().pow(self.m),
            BasisKind::Pxp => PolynomialXP::x().pow(self.n),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.expansion.is_constant()
    }

    pub fn label(&self) -> String {
        format!("{}({},{})", self.kind, self.n, self.m)
    }
}

type CacheKey = (BasisKind, u32, u32, BracketKind);

fn cache() -> &'static Mutex<HashMap<CacheKey, PolynomialXP>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, PolynomialXP>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// One element, with its expansion memoized across calls.
pub fn basis_element(kind: BasisKind, n: u32, m: u32, bracket: BracketKind) -> BracketBasisElement {
    let key = (kind, n, m, bracket);
    if let Some(e) = cache().lock().expect("basis cache").get(&key) {
        return BracketBasisElement {
            kind,
            n,
            m,
            bracket,
            expansion: e.clone(),
        };
    }
    let x = PolynomialXP::x().pow(n);
    let p = PolynomialXP::p().pow(m);
    let expansion = match kind {
        BasisKind::Xxp => double_bracket(&x, &x, &p, bracket),
        BasisKind::Pxp => double_bracket(&p, &x, &p, bracket),
    };
    cache()
        .lock()
        .expect("basis cache")
        .insert(key, expansion.clone());
    BracketBasisElement {
        kind,
        n,
        m,
        bracket,
        expansion,
    }
}

/// All nonzero elements with `1 ≤ n ≤ max_n`, `1 ≤ m ≤ max_m`.
pub fn build_basis(
    max_n: u32,
    max_m: u32,
    kinds: &[BasisKind],
    bracket: BracketKind,
) -> Vec<BracketBasisElement> {
    let mut out = Vec::new();
    for &kind in kinds {
        for n in 1..=max_n {
            for m in 1..=max_m {
                let e = basis_element(kind, n, m, bracket);
                if !e.expansion.is_zero() {
                    out.push(e);
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionTerm {
    pub element: BracketBasisElement,
    pub coefficient: HbarPoly,
}

impl DecompositionTerm {
    pub fn contribution(&self) -> PolynomialXP {
        self.element.expansion.scale_hbar(&self.coefficient)
    }
}

/// Rank of the bracket basis against the monomials it should cover.
#[derive(Clone, Debug, PartialEq)]
pub struct RankDiagnostics {
    pub max_degree: u32,
    pub elements: usize,
    pub rank: usize,
    /// Monomials `x^i p^j` with `i + j ≤ max_degree`.
    pub monomials: usize,
    /// Those with both exponents odd.
    pub odd_odd_monomials: usize,
}

impl RankDiagnostics {
    pub fn rank_deficit(&self) -> usize {
        self.monomials - self.rank.min(self.monomials)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionResult {
    pub target: PolynomialXP,
    pub bracket: BracketKind,
    pub terms: Vec<DecompositionTerm>,
    /// `target − Σ terms`, which is exactly the unreachable part.
    pub residual: PolynomialXP,
    /// Odd-odd monomials that no element reaches.
    pub unreachable: Vec<(u32, u32)>,
}

impl DecompositionResult {
    pub fn is_exact(&self) -> bool {
        self.residual.is_zero()
    }

    pub fn reconstruct(&self) -> PolynomialXP {
        self.terms
            .iter()
            .fold(PolynomialXP::zero(), |acc, t| &acc + &t.contribution())
    }

    /// Terms in canonical order `(kind, n, m)`.
    pub fn sorted_terms(&self) -> Vec<DecompositionTerm> {
        let mut t = self.terms.clone();
        t.sort_by_key(|t| (t.element.kind, t.element.n, t.element.m));
        t
    }

    /// Errors with the residual when the expansion is incomplete.
    pub fn require_exact(&self) -> Result<()> {
        if self.is_exact() {
            Ok(())
        } else {
            Err(Error::NonzeroResidual(self.residual.to_string()))
        }
    }
}

/// Element whose leading (top total degree) part is a multiple of
/// `x^i p^j`, together with that multiple.
pub fn pivot_for(i: u32, j: u32) -> Option<(BasisKind, u32, u32, i64)> {
    if j % 2 == 0 {
        let n = i + 2;
        let m = (j + 2) / 2;
        let lead = -((n * (n - 1) * m * m) as i64);
        Some((BasisKind::Pxp, n, m, lead))
    } else if i % 2 == 0 {
        let n = (i + 2) / 2;
        let m = j + 2;
        let lead = (n * n * m * (m - 1)) as i64;
        Some((BasisKind::Xxp, n, m, lead))
    } else {
        None
    }
}

/// Graded elimination: repeatedly cancel a top-degree monomial with the
/// element whose leading part is that monomial. Lower-order bracket
/// corrections only feed lower degrees, so this terminates.
pub fn decompose(target: &PolynomialXP, bracket: BracketKind) -> Result<DecompositionResult> {
    let mut residual = target.clone();
    let mut unreachable_part = PolynomialXP::zero();
    let mut coeffs: BTreeMap<(BasisKind, u32, u32), HbarPoly> = BTreeMap::new();
    let mut guard = 0usize;
    while !residual.is_zero() {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::InvalidParameter("decomposition did not terminate".into()));
        }
        let ((i, j), c) = residual
            .terms()
            .max_by_key(|((i, j), _)| (i + j, *i))
            .map(|(k, c)| (k, c.clone()))
            .expect("nonzero residual has a term");
        match pivot_for(i, j) {
            None => {
                let t = PolynomialXP::monomial(i, j, c);
                unreachable_part += &t;
                residual -= &t;
            }
            Some((kind, n, m, lead)) => {
                let e = basis_element(kind, n, m, bracket);
                debug_assert_eq!(
                    e.expansion.coefficient(i, j).classical_part(),
                    Surd::from_int(lead)
                );
                let coef = c.div_surd(&Surd::from_int(lead))?;
                residual -= &e.expansion.scale_hbar(&coef);
                let slot = coeffs.entry((kind, n, m)).or_insert_with(HbarPoly::zero);
                *slot += &coef;
            }
        }
    }
    let terms = coeffs
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((kind, n, m), coefficient)| DecompositionTerm {
            element: basis_element(kind, n, m, bracket),
            coefficient,
        })
        .collect();
    let unreachable = unreachable_part.terms().map(|(k, _)| k).collect();
    Ok(DecompositionResult {
        target: target.clone(),
        bracket,
        terms,
        residual: unreachable_part,
        unreachable,
    })
}

/// Exact Gaussian elimination over Q(√2). Rows are vectors indexed by column
/// keys; returns the row-echelon pivots as `(column, normalized row, combo)`.
struct Echelon<K: Ord + Clone> {
    rows: Vec<(K, BTreeMap<K, Surd>, BTreeMap<usize, Surd>)>,
}

impl<K: Ord + Clone> Echelon<K> {
    fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    /// Reduces `v` (tracking its combination of input vectors) against the
    /// stored pivots.
    fn reduce(
        &self,
        mut v: BTreeMap<K, Surd>,
        mut combo: BTreeMap<usize, Surd>,
    ) -> (BTreeMap<K, Surd>, BTreeMap<usize, Surd>) {
        for (col, row, rcombo) in &self.rows {
            let Some(c) = v.get(col).cloned() else { continue };
            for (k, r) in row {
                let e = v.entry(k.clone()).or_insert_with(Surd::zero);
                *e = &*e - &(&c * r);
                if e.is_zero() {
                    v.remove(k);
                }
            }
            for (k, r) in rcombo {
                let e = combo.entry(*k).or_insert_with(Surd::zero);
                *e = &*e - &(&c * r);
                if e.is_zero() {
                    combo.remove(k);
                }
            }
        }
        (v, combo)
    }

    /// Inserts a vector; returns false if it was dependent.
    fn insert(&mut self, v: BTreeMap<K, Surd>, index: usize) -> Result<bool> {
        let mut combo = BTreeMap::new();
        combo.insert(index, Surd::one());
        let (v, combo) = self.reduce(v, combo);
        let Some((col, lead)) = v.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) else {
            return Ok(false);
        };
        let inv = lead.inverse()?;
        let row: BTreeMap<K, Surd> = v.into_iter().map(|(k, c)| (k, &c * &inv)).collect();
        let combo: BTreeMap<usize, Surd> = combo.into_iter().map(|(k, c)| (k, &c * &inv)).collect();
        // keep earlier rows reduced against the new pivot
        for (_, r, rc) in &mut self.rows {
            if let Some(c) = r.get(&col).cloned() {
                for (k, x) in &row {
                    let e = r.entry(k.clone()).or_insert_with(Surd::zero);
                    *e = &*e - &(&c * x);
                    if e.is_zero() {
                        r.remove(k);
                    }
                }
                for (k, x) in &combo {
                    let e = rc.entry(*k).or_insert_with(Surd::zero);
                    *e = &*e - &(&c * x);
                    if e.is_zero() {
                        rc.remove(k);
                    }
                }
            }
        }
        self.rows.push((col, row, combo));
        Ok(true)
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Columns are `(i, j, ℏ-power)`.
type Col = (u32, u32, u32);

fn columns_of(p: &PolynomialXP) -> BTreeMap<Col, Surd> {
    let mut out = BTreeMap::new();
    for ((i, j), c) in p.terms() {
        for (k, s) in c.terms() {
            out.insert((i, j, k), s.clone());
        }
    }
    out
}

/// Exact linear solve of `target = Σ c_e(ℏ) e` over a fixed basis, with each
/// coefficient a polynomial in ℏ of degree `≤ max_hbar_shift`. Independent of
/// the graded elimination; used as a cross-check and for custom bases.
pub fn decompose_linear(
    target: &PolynomialXP,
    basis: &[BracketBasisElement],
    max_hbar_shift: u32,
) -> Result<DecompositionResult> {
    let bracket = basis.first().map(|e| e.bracket).unwrap_or(BracketKind::Moyal);
    let mut ech: Echelon<Col> = Echelon::new();
    let mut labels = Vec::new();
    for (bi, e) in basis.iter().enumerate() {
        for s in 0..=max_hbar_shift {
            let v = columns_of(&e.expansion.shift_hbar(s));
            ech.insert(v, labels.len())?;
            labels.push((bi, s));
        }
    }
    let (rem, combo) = ech.reduce(columns_of(target), BTreeMap::new());
    // combo holds −Σ c_k v_k for the reduced target
    let mut coeffs: BTreeMap<usize, HbarPoly> = BTreeMap::new();
    for (k, c) in combo {
        let (bi, s) = labels[k];
        let entry = coeffs.entry(bi).or_insert_with(HbarPoly::zero);
        entry.add_term(s, &-&c);
    }
    let terms: Vec<DecompositionTerm> = coeffs
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(bi, coefficient)| DecompositionTerm {
            element: basis[bi].clone(),
            coefficient,
        })
        .collect();
    let mut residual = PolynomialXP::zero();
    for ((i, j, k), c) in rem {
        residual.add_term(i, j, &HbarPoly::monomial(k, c));
    }
    let unreachable = residual.terms().map(|(k, _)| k).collect();
    Ok(DecompositionResult {
        target: target.clone(),
        bracket,
        terms,
        residual,
        unreachable,
    })
}

/// Rank of the classical parts of all elements that can reach total degree
/// `≤ max_degree`, against the number of monomials of that degree.
pub fn rank_diagnostics(max_degree: u32, bracket: BracketKind) -> Result<RankDiagnostics> {
    let mut basis = Vec::new();
    for i in 0..=max_degree {
        for j in 0..=(max_degree - i) {
            if let Some((kind, n, m, _)) = pivot_for(i, j) {
                basis.push(basis_element(kind, n, m, bracket));
            }
        }
    }
    let mut ech: Echelon<(u32, u32)> = Echelon::new();
    for (k, e) in basis.iter().enumerate() {
        let v: BTreeMap<(u32, u32), Surd> = e
            .expansion
            .classical_part()
            .terms()
            .map(|(key, c)| (key, c.classical_part()))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        ech.insert(v, k)?;
    }
    let monomials = ((max_degree + 1) * (max_degree + 2) / 2) as usize;
    let odd_odd_monomials = (0..=max_degree)
        .flat_map(|i| (0..=(max_degree - i)).map(move |j| (i, j)))
        .filter(|(i, j)| i % 2 == 1 && j % 2 == 1)
        .count();
    Ok(RankDiagnostics {
        max_degree,
        elements: basis.len(),
        rank: ech.rank(),
        monomials,
        odd_odd_monomials,
    })
}

/// Scalar such that `coefficient · element` has leading monomial
/// coefficient `c`; exposed for tests.
pub fn leading_ratio(c: &Rational, lead: i64) -> Rational {
    if lead.is_zero() {
        return Rational::zero();
    }
    c / Rational::from_integer(lead.into())
}
