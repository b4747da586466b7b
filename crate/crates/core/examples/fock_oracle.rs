//! Truncated Fock-basis checks: the Kerr commutator identity on matrices
//! and the exact recurrence of a coherent state.

use std::f64::consts::{PI, SQRT_2};

use nonsep::moyal::{anticommutator_p2_x2, kerr_pair};
use nonsep::oracle::{evolve_exact_kerr, fock_expand, matrix_rep, TruncatedOperator};
use nonsep::C64;

fn main() -> nonsep::Result<()> {
    let dim = 64;
    let (t, v) = kerr_pair();
    let tm = matrix_rep(&t, dim + 16, 1.0);
    let vm = matrix_rep(&v, dim + 16, 1.0);
    let ttv = tm.commutator(&tm.commutator(&vm)).truncate(dim);
    let rhs = TruncatedOperator::identity(dim)
        .scale(C64::new(-0.25, 0.0))
        .sub(&matrix_rep(&anticommutator_p2_x2(), dim, 1.0).scale(C64::new(0.25, 0.0)));
    println!("|[T,[T,V]] - rhs| / |rhs| = {:.2e}", ttv.sub(&rhs).interior_norm() / rhs.interior_norm());

    let a = 3.0 / SQRT_2;
    let f = fock_expand(a, a, 1.0, 1e-15)?;
    println!("cutoff {}, <n> = {:.6}, Kerr energy {:.6}", f.cutoff(), f.mean_number(), f.kerr_energy(1.0));
    for (label, t) in [("pi/3", PI / 3.0), ("pi/2", PI / 2.0), ("pi", PI)] {
        let ft = evolve_exact_kerr(&f, t, 1.0);
        println!("|<psi(0)|psi({label})>|^2 = {:.6}", f.overlap(&ft).norm_sqr());
    }
    Ok(())
}
