//! Propagates to the three-fold fractional revival, writes a snapshot,
//! reads it back and renders it.
//!
//! cargo run --release --example render_snapshot -- [output dir]

use std::f64::consts::{PI, SQRT_2};
use std::path::PathBuf;

use nonsep::cli::render_wigner;
use nonsep::io::{read_snapshot, write_snapshot, Snapshot};
use nonsep::schemes::{KerrOptions, KerrWignerPropagator};
use nonsep::states::coherent_wigner;
use nonsep::{make_phase_grid, Error};

fn main() -> nonsep::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "nonsep-out".into()));
    std::fs::create_dir_all(&dir).map_err(|e| Error::io("creating output directory", e))?;
    let grid = make_phase_grid(256, 256, 20.0, 36.0, 1.0)?;
    let a = 3.0 / SQRT_2;
    let dt = 1e-3;
    let steps = (PI / 3.0 / dt).round() as usize;
    let mut w = coherent_wigner(&grid, a, a)?;
    KerrWignerPropagator::new(&grid, dt, KerrOptions::default())?.run(&mut w, steps)?;

    let path = dir.join("revival_third.bin");
    write_snapshot(&path, &Snapshot::from_wigner(&w, steps as f64 * dt, "u9", "render_snapshot example")?)?;
    let back = read_snapshot(&path)?;
    let field = back.wigner_xp().expect("wigner snapshot");
    let png = dir.join("revival_third.png");
    render_wigner(field, 1.0 / PI)
        .save(&png)
        .map_err(|e| Error::io("writing png", std::io::Error::other(e)))?;
    println!("wrote {} and {}", path.display(), png.display());
    Ok(())
}
