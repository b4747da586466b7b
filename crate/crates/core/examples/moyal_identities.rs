//! Exact phase-space algebra: star products, Moyal against Poisson, and the
//! double commutator behind the Kerr block.

use nonsep::moyal::{
    alternate_generator_check, anticommutator_p2_x2, double_commutator_symbol, kerr_pair,
    moyal_bracket, parse_polynomial, poisson_bracket, star_product, KerrForm,
};

fn main() -> nonsep::Result<()> {
    let x = parse_polynomial("x")?;
    let p = parse_polynomial("p")?;
    let s = star_product(&x, &p);
    println!("x * p = {} + i({})", s.re, s.im);
    println!("{{x, p}}_M = {}", moyal_bracket(&x, &p));

    let f = parse_polynomial("x^3 p^2")?;
    let g = parse_polynomial("p^3 + x^2")?;
    println!("{{f, g}}_M = {}", moyal_bracket(&f, &g));
    println!("{{f, g}}_P = {}", poisson_bracket(&f, &g));

    let (t, v) = kerr_pair();
    let ttv = double_commutator_symbol(&t, &v);
    println!("T = {t}, V = {v}");
    println!("[T,[T,V]] = {ttv}");
    println!("[p^2, x^2]_+ = {}", anticommutator_p2_x2());
    let form = KerrForm::of(&ttv);
    println!(
        "  = ({}) [p^2, x^2]_+ + ({}), remainder {}",
        form.anticommutator_coefficient, form.constant, form.remainder
    );

    // second generator pair, slots exchanged and not
    let alt = alternate_generator_check();
    println!("alternate, swapped:   [V,[V,T]] = {}", alt.swapped.double_commutator);
    println!("alternate, unswapped: [T,[T,V]] = {}", alt.unswapped.double_commutator);
    if let Some(r) = alt.anticommutator_ratio() {
        println!("anticommutator coefficient relative to the Kerr pair: {r}");
    }
    Ok(())
}
