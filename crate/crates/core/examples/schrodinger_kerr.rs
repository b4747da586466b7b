//! Schrödinger-picture Kerr propagation against the exact Fock-basis
//! solution, for both compositions.

use std::f64::consts::SQRT_2;

use nonsep::diagnostics::exact_kerr_wavefunction;
use nonsep::schemes::{KerrOptions, KerrSchrodingerPropagator, SchemeKind};
use nonsep::states::coherent_wavefunction;
use nonsep::{LineGrid, Representation};

fn main() -> nonsep::Result<()> {
    let line = LineGrid::centered(256, 20.0, 1.0)?;
    let a = 3.0 / SQRT_2;
    let t = 0.2;
    // the grid state and the Fock sum differ by a constant phase convention
    let phase0 = exact_kerr_wavefunction(&line, a, a, 0.0)?
        .inner(&coherent_wavefunction(&line, a, a)?)?
        .arg();
    for kind in [SchemeKind::U9, SchemeKind::U7] {
        for dt in [1e-3, 1e-4, 1e-5] {
            let steps = (t / dt as f64).round() as usize;
            let mut psi = coherent_wavefunction(&line, a, a)?;
            KerrSchrodingerPropagator::new(&line, dt, KerrOptions::with_kind(kind))?.run(&mut psi, steps)?;
            let exact = exact_kerr_wavefunction(&line, a, a, steps as f64 * dt)?;
            let ov = exact.inner(&psi.in_rep(Representation::Position)?)?;
            println!(
                "{kind} dt {dt:.0e}: 1 - |<exact|psi>|^2 = {:.3e}, phase error {:+.2e}",
                1.0 - ov.norm_sqr(),
                ov.arg() - phase0
            );
        }
    }
    Ok(())
}
