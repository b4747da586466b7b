//! Split-operator propagation of nonseparable polynomial Hamiltonians.
//!
//! The crate covers three layers:
//!
//! * an exact symbolic phase-space algebra ([`moyal`]) with a constructive
//!   double-bracket decomposer ([`decomposer`]);
//! * spectral grids and states in the Schrödinger picture and the Bopp
//!   `(x, θ)` Wigner representation ([`grid`], [`states`]);
//! * Chin-type exponential compositions that turn `[T,[T,V]]` into a
//!   propagator built from diagonal factors only ([`schemes`]), checked
//!   against exact Fock-basis dynamics ([`oracle`]) and measured with
//!   [`diagnostics`].

pub mod cli;
pub mod decomposer;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod io;
pub mod moyal;
pub mod oracle;
pub mod schemes;
pub mod states;

pub use error::{Error, Result};
pub use grid::{make_phase_grid, AxisGrid, LineGrid, PhaseGrid, Representation, C64};
pub use moyal::{parse_polynomial, PolynomialXP};
pub use states::{WaveFunction, WignerState};
