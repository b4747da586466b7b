//! Step-size sweep with exponent fits, using the same driver as
//! `nonsep scaling`. Schrödinger picture only, so it finishes quickly.

use std::f64::consts::PI;

use nonsep::cli::run_sweep;
use nonsep::diagnostics::{fit_scaling, Measure};
use nonsep::io::{Picture, RunConfig};

fn main() -> nonsep::Result<()> {
    let mut cfg = RunConfig::with_step(1e-3, PI);
    cfg.picture = Picture::Schrodinger;
    let dts = [1e-3, 2e-3, 4e-3, 8e-3];
    let points = run_sweep(&cfg, &dts, None)?;
    for p in &points {
        println!("dt {:.0e}  dE {:.4e}  psi {:.4e}", p.dt, p.energy, p.measures.psi_overlap.unwrap_or(f64::NAN));
    }
    for m in [Measure::Energy, Measure::PsiOverlap, Measure::L2, Measure::MaxDiff] {
        let errs: Vec<f64> = points
            .iter()
            .map(|p| if m == Measure::Energy { p.energy } else { p.measures.get(m).unwrap_or(f64::NAN) })
            .collect();
        let fit = fit_scaling(&dts, &errs)?;
        println!("{:<12} exponent {:.3}  (r^2 {:.4})", m.name(), fit.exponent, fit.r_squared);
    }
    Ok(())
}
