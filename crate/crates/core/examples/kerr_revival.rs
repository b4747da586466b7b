//! Wigner-picture Kerr run of the amplitude-3 coherent state up to the
//! recurrence time, printing norm, energy and distance to the initial state.
//!
//! cargo run --release --example kerr_revival -- [dt]

use std::f64::consts::{PI, SQRT_2};

use nonsep::diagnostics::overlap_wigner;
use nonsep::schemes::{kerr_hamiltonian, KerrOptions, KerrWignerPropagator};
use nonsep::states::{coherent_wigner, quadrature};
use nonsep::make_phase_grid;

fn main() -> nonsep::Result<()> {
    let dt: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1e-3);
    let grid = make_phase_grid(256, 256, 20.0, 36.0, 1.0)?;
    let a = 3.0 / SQRT_2;
    let h = kerr_hamiltonian();

    let w0 = coherent_wigner(&grid, a, a)?;
    let mut w = w0.clone();
    let mut prop = KerrWignerPropagator::new(&grid, dt, KerrOptions::default())?;
    let steps = (PI / dt).round() as usize;
    println!("{:>8} {:>14} {:>12} {:>14}", "t", "norm - 1", "energy", "1 - <W0|W>");
    let mut done = 0;
    for k in 0..=6 {
        let target = steps * k / 6;
        prop.run(&mut w, target - done)?;
        done = target;
        println!(
            "{:>8.4} {:>14.3e} {:>12.6} {:>14.6e}",
            done as f64 * dt,
            w.norm() - 1.0,
            quadrature(&w, &h)?.0,
            1.0 - overlap_wigner(&w0, &w)?
        );
    }
    println!("{} FFT passes, {} per step", prop.transforms(), prop.transforms_per_step());
    Ok(())
}
