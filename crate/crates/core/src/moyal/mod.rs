//! Exact phase-space algebra: Q(√2)[ℏ] coefficients, polynomial symbols,
//! star products, Moyal and Poisson brackets, and the Weyl correspondence.

pub mod exact;
pub mod parse;
pub mod poly;
pub mod star;
pub mod weyl;

pub use exact::{rational, rational_to_f64, HbarPoly, Laurent, Rational, Surd};
pub use parse::{parse_hbar_poly, parse_polynomial, parse_scalar};
pub use poly::{ComplexPoly, PolynomialXP};
pub use star::{
    bracket, double_bracket, double_commutator_symbol, moyal_bracket, poisson_bracket,
    star_complex, star_product, BracketKind,
};
pub use weyl::{
    alternate_generator_check, anticommutator_p2_x2, generator_report, kerr_pair, mccoy_terms,
    AlternateCheck, GeneratorReport, KerrForm, OperatorPoly, OrderedTerm,
};
