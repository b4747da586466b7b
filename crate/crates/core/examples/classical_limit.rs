//! Quantum against classical (ℏ → 0 sector differences) Kerr flow from the
//! same initial Wigner function. The two agree at first and separate as
//! the quantum interference builds up.

use std::f64::consts::{PI, SQRT_2};

use nonsep::diagnostics::error_measures;
use nonsep::schemes::{KerrOptions, KerrWignerPropagator};
use nonsep::states::coherent_wigner;
use nonsep::make_phase_grid;

fn main() -> nonsep::Result<()> {
    let grid = make_phase_grid(256, 256, 20.0, 36.0, 1.0)?;
    let a = 3.0 / SQRT_2;
    let dt = 1e-3;
    let mut quantum = coherent_wigner(&grid, a, a)?;
    let mut classical = quantum.clone();
    let mut qp = KerrWignerPropagator::new(&grid, dt, KerrOptions::default())?;
    let mut cp = KerrWignerPropagator::new(&grid, dt, KerrOptions { classical: true, ..KerrOptions::default() })?;
    let chunk = (PI / 12.0 / dt).round() as usize;
    for k in 1..=6 {
        qp.run(&mut quantum, chunk)?;
        cp.run(&mut classical, chunk)?;
        let m = error_measures(&classical, &quantum)?;
        println!(
            "t = {:.4}: 1 - overlap {:.4e}, max |dW| {:.4e}, classical min W {:.2e}",
            (k * chunk) as f64 * dt,
            m.w_overlap,
            m.max_diff,
            classical.density_xp()?.iter().cloned().fold(f64::INFINITY, f64::min)
        );
    }
    Ok(())
}
