//! Splitting schemes and the propagators built from them.

mod bch;
mod coefficients;
mod kerr;
mod schedule;

pub use bch::{bch_cubic, chin_sigma, effective_epsilon, kerr_prefactor, CubicBch, GeneratorPair};
pub use coefficients::{
    default_t2, scheme_for, strang, u7_coefficients, u9_coefficients, Compensation, Factor, Role,
    SchemeKind, SplitScheme, Weight,
};
pub use kerr::{
    kerr_step_wigner, KerrOptions, KerrSchrodingerPropagator, KerrWignerPropagator,
    OuterSplitting,
};
pub use schedule::{
    generic_step_wavefunction, generic_step_wigner, kerr_hamiltonian, replay_schedule,
    schedule_from_decomposition, separate, Schedule, ScheduleItem, SchrodingerScheduleStepper,
    WignerScheduleStepper,
};
