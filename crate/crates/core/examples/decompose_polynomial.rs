//! Double-bracket expansion of a polynomial symbol and the schedule built
//! from it.
//!
//! cargo run --example decompose_polynomial -- "x^2 p^2/2 - hbar^2/4"

use nonsep::cli::decomposition_report;
use nonsep::decomposer::decompose;
use nonsep::io::format_schedule;
use nonsep::moyal::{parse_polynomial, BracketKind};
use nonsep::schemes::{default_t2, schedule_from_decomposition, SchemeKind};

fn main() -> nonsep::Result<()> {
    let src = std::env::args().nth(1).unwrap_or_else(|| "x^2 p^2/2 - hbar^2/4".into());
    let target = parse_polynomial(&src)?;
    for bracket in [BracketKind::Poisson, BracketKind::Moyal] {
        println!("-- {bracket:?}");
        print!("{}", decomposition_report(&decompose(&target, bracket)?));
    }
    let result = decompose(&target, BracketKind::Moyal)?;
    result.require_exact()?;
    let schedule = schedule_from_decomposition(&result, SchemeKind::U9, default_t2())?;
    print!("{}", format_schedule(&schedule, &[format!("target = {src}")]));
    Ok(())
}
