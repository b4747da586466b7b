//! Acceptance run. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails. A single criterion can be selected by number:
//! `cargo test --test acceptance -- 7`.

use std::f64::consts::{PI, SQRT_2};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use nonsep::decomposer::decompose;
use nonsep::diagnostics::{
    error_measures, exact_kerr_wavefunction, exact_kerr_wigner, fit_scaling, overlap_wigner,
    run_kerr_schrodinger, run_kerr_wigner, ErrorMeasures, KerrRun, Measure,
};
use nonsep::moyal::{
    anticommutator_p2_x2, double_commutator_symbol, kerr_pair, parse_polynomial, rational,
    BracketKind, HbarPoly, KerrForm, Laurent, PolynomialXP, Surd,
};
use nonsep::oracle::{matrix_rep, TruncatedOperator};
use nonsep::schemes::{
    bch_cubic, default_t2, u7_coefficients, u9_coefficients, KerrOptions,
    KerrSchrodingerPropagator, KerrWignerPropagator, OuterSplitting, Role, Schedule, SchemeKind,
    WignerScheduleStepper,
};
use nonsep::states::{
    coherent_wavefunction, coherent_wigner, quadrature, wigner_of_wavefunction,
};
use nonsep::{make_phase_grid, Error, LineGrid, PhaseGrid, Representation, WignerState, C64};

const N: usize = 256;
const X_EXTENT: f64 = 20.0;
const THETA_EXTENT: f64 = 36.0;
const SWEEP: [f64; 4] = [1e-3, 2e-3, 4e-3, 8e-3];
const EXPONENT_BAND: (f64, f64) = (0.52, 0.82);
const OVERLAP_BAND: (f64, f64) = (1.0, 1.4);

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

type Check = fn() -> Result<Verdict, Error>;

fn amplitude() -> f64 {
    3.0 / SQRT_2
}

fn grid() -> PhaseGrid {
    make_phase_grid(N, N, X_EXTENT, THETA_EXTENT, 1.0).unwrap()
}

fn line() -> LineGrid {
    LineGrid::new(grid().x, 1.0).unwrap()
}

fn linf(a: &WignerState, b: &WignerState, rep: Representation) -> f64 {
    let a = a.in_rep(rep).unwrap();
    let b = b.in_rep(rep).unwrap();
    (&a.data - &b.data).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn in_band(v: f64, band: (f64, f64)) -> bool {
    v >= band.0 && v <= band.1
}

// 1
fn kerr_identity() -> Result<Verdict, Error> {
    let (t, v) = kerr_pair();
    let lhs = double_commutator_symbol(&t, &v);
    let quarter = Surd::frac(1, 4);
    let rhs = &PolynomialXP::hbar_constant(HbarPoly::monomial(4, Surd::frac(-1, 4)))
        - &anticommutator_p2_x2().scale_hbar(&HbarPoly::monomial(2, quarter));
    let residual = &lhs - &rhs;
    let form = KerrForm::of(&lhs);
    Ok(Verdict::new(
        residual.is_zero() && form.is_kerr_identity(),
        format!("[T,[T,V]] = {lhs}; residual = {residual}"),
    ))
}

// 2
fn seven_factor_defect() -> Result<Verdict, Error> {
    let t2 = default_t2();
    let scheme = u7_coefficients(t2)?;
    let bch = bch_cubic(&scheme);
    let one = rational(1, 1);
    let lie_ok = bch.ttv == Laurent::constant(one.clone())
        && bch.vvt == Laurent::monomial(-one, -3)
        && bch.t == Laurent::zero()
        && bch.v == Laurent::zero()
        && bch.tv == Laurent::zero();

    // −t₂⁻³ [V,[V,T]] for the Kerr pair, as a symbol
    let (t, v) = kerr_pair();
    let vvt = double_commutator_symbol(&v, &t);
    let defect = -&vvt;
    let expected = PolynomialXP::monomial(6, 0, HbarPoly::monomial(2, Surd::new(rational(0, 1), rational(1, 18))));
    let comp = scheme.compensation.as_ref().expect("seven-factor scheme carries a compensation");
    let symbol_ok = defect == expected && comp.symbol == expected && comp.t2_power == -3;

    // the same commutator on truncated matrices; padding keeps the compared
    // block free of truncation effects
    let dim = 64;
    let pad = dim + 24;
    let tm = matrix_rep(&t, pad, 1.0);
    let vm = matrix_rep(&v, pad, 1.0);
    let matrix = vm.commutator(&vm.commutator(&tm)).truncate(dim);
    let from_symbol = matrix_rep(&vvt, dim, 1.0);
    let residual = matrix.sub(&from_symbol).matrix.norm() / from_symbol.matrix.norm();
    let x6 = comp.x6_coefficient(t2);
    let value = x6.0.eval(1.0) * x6.1;
    Ok(Verdict::new(
        lie_ok && symbol_ok && residual < 1e-9,
        format!(
            "BCH [V,[V,T]] coefficient {}; defect {defect}·t2^-3 (= {value:.6} x^6 at t2 = {t2:.6}); matrix residual {residual:.2e}",
            bch.vvt.coefficient(-3)
        ),
    ))
}

// 3
fn operator_order() -> Result<Verdict, Error> {
    let (t, v) = kerr_pair();
    let dim = 64;
    let tm = matrix_rep(&t, dim, 1.0);
    let vm = matrix_rep(&v, dim, 1.0);
    let ttv = tm.commutator(&tm.commutator(&vm));
    let scheme = u9_coefficients(default_t2())?;
    let errors: Vec<f64> = (0..4)
        .map(|k| {
            let eps = C64::new(0.0, -1e-3 / 2f64.powi(k));
            let u = scheme
                .numeric_factors()
                .into_iter()
                .fold(TruncatedOperator::identity(dim), |u, (role, w)| {
                    let m = if role == Role::Kinetic { &tm } else { &vm };
                    m.expm_hermitian(eps * w).mul(&u)
                });
            u.sub(&ttv.expm_hermitian(eps * eps * eps)).matrix.norm()
        })
        .collect();
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(Verdict::new(
        ratios.iter().all(|r| in_band(*r, (24.0, 40.0))),
        format!(
            "errors {:?}; halving ratios {:?}",
            errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>(),
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()
        ),
    ))
}

// 4
fn norm_conservation() -> Result<Verdict, Error> {
    let g = grid();
    let dt = 1e-3;
    let steps = (PI / dt).round() as usize;
    let mut w = coherent_wigner(&g, amplitude(), amplitude())?;
    let mut prop = KerrWignerPropagator::new(&g, dt, KerrOptions::default())?;
    let mut worst = (w.norm() - 1.0).abs();
    for _ in 0..steps {
        prop.step(&mut w)?;
        worst = worst.max((w.norm() - 1.0).abs());
    }
    Ok(Verdict::new(
        worst < 1e-10,
        format!("max |∫W − 1| over {steps} steps = {worst:.2e}"),
    ))
}

// 5
fn reversibility() -> Result<Verdict, Error> {
    let g = grid();
    let dt = 1e-3;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for kind in [SchemeKind::U9, SchemeKind::U7] {
        let w0 = coherent_wigner(&g, amplitude(), amplitude())?;
        let mut w = w0.clone();
        KerrWignerPropagator::new(&g, dt, KerrOptions::with_kind(kind))?.step(&mut w)?;
        KerrWignerPropagator::new(&g, -dt, KerrOptions::with_kind(kind))?.step(&mut w)?;
        let dw = linf(&w, &w0, Representation::XP);

        let l = line();
        let psi0 = coherent_wavefunction(&l, amplitude(), amplitude())?;
        let mut psi = psi0.clone();
        KerrSchrodingerPropagator::new(&l, dt, KerrOptions::with_kind(kind))?.step(&mut psi)?;
        KerrSchrodingerPropagator::new(&l, -dt, KerrOptions::with_kind(kind))?.step(&mut psi)?;
        let a = psi.in_rep(Representation::Position)?;
        let b = psi0.in_rep(Representation::Position)?;
        let dpsi = (&a.data - &b.data).iter().map(|v| v.norm()).fold(0.0, f64::max);
        worst = worst.max(dw).max(dpsi);
        parts.push(format!("{kind}: W {dw:.2e}, psi {dpsi:.2e}"));
    }
    Ok(Verdict::new(worst < 1e-10, parts.join("; ")))
}

// 6
fn recurrence() -> Result<Verdict, Error> {
    let g = grid();
    let run = KerrRun::new(amplitude(), amplitude(), 5e-4, PI, KerrOptions::default());
    let (outcome, w) = run_kerr_wigner(&g, &run)?;
    let w0 = coherent_wigner(&g, amplitude(), amplitude())?;
    let err = 1.0 - overlap_wigner(&w0, &w)?;
    Ok(Verdict::new(
        err < 2e-2,
        format!(
            "1 − <W(0)|W(π)> = {err:.4e} after {} steps (limit 2e-2); energy drift {:.3e}, norm drift {:.2e}",
            outcome.steps,
            outcome.series.energy_drift(),
            outcome.series.norm_drift()
        ),
    ))
}

/// Final-time measures of one sweep point, with the largest edge value
/// seen along the way.
struct SweepPoint {
    dt: f64,
    energy: f64,
    w: ErrorMeasures,
    psi_overlap: f64,
    edge: f64,
    boundary_mass: f64,
    alarm: Option<String>,
}

fn sweep_point(kind: SchemeKind, dt: f64) -> Result<SweepPoint, Error> {
    let g = grid();
    let l = line();
    let run = KerrRun::new(amplitude(), amplitude(), dt, PI, KerrOptions::with_kind(kind));
    let strict_w = run_kerr_wigner(&g, &run);
    let strict_psi = run_kerr_schrodinger(&l, &g, &run);
    let alarm = [strict_w.as_ref().err(), strict_psi.as_ref().err()]
        .into_iter()
        .flatten()
        .map(|e| match e {
            Error::BoundaryMass { .. } => Ok(e.to_string()),
            other => Err(other.to_string()),
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(Error::InvalidParameter)?;
    if let (Ok((wo, _)), Ok((po, _))) = (&strict_w, &strict_psi) {
        return Ok(SweepPoint {
            dt,
            energy: wo.series.energy_drift(),
            w: wo.final_measures.clone(),
            psi_overlap: po.final_measures.psi_overlap.unwrap_or(f64::NAN),
            edge: 0.0,
            boundary_mass: 0.0,
            alarm: None,
        });
    }
    // The library run aborted on the boundary alarm: repeat the run without
    // the guard so the analysis still has numbers.
    let steps = (PI / dt).round() as usize;
    let t = steps as f64 * dt;
    let h = nonsep::schemes::kerr_hamiltonian();
    let mut w = coherent_wigner(&g, amplitude(), amplitude())?;
    let e0 = quadrature(&w, &h)?.0;
    let mut prop = KerrWignerPropagator::new(&g, dt, KerrOptions::with_kind(kind))?;
    let mut energy: f64 = 0.0;
    let mut edge: f64 = 0.0;
    let mut done = 0;
    for k in 1..=40 {
        let target = steps * k / 40;
        prop.run(&mut w, target - done)?;
        done = target;
        energy = energy.max((quadrature(&w, &h)?.0 - e0).abs());
        edge = edge.max(w.edge_max()?);
    }
    let measures = error_measures(&w, &exact_kerr_wigner(&g, amplitude(), amplitude(), t)?)?;
    let mut psi = coherent_wavefunction(&l, amplitude(), amplitude())?;
    let mut pprop = KerrSchrodingerPropagator::new(&l, dt, KerrOptions::with_kind(kind))?;
    let mut boundary_mass: f64 = 0.0;
    done = 0;
    for k in 1..=40 {
        let target = steps * k / 40;
        pprop.run(&mut psi, target - done)?;
        done = target;
        boundary_mass = boundary_mass.max(psi.boundary_mass()?);
    }
    let exact = exact_kerr_wavefunction(&l, amplitude(), amplitude(), t)?;
    let ov = exact.inner(&psi.in_rep(Representation::Position)?)?;
    Ok(SweepPoint {
        dt,
        energy,
        w: measures,
        psi_overlap: 1.0 - ov.norm_sqr(),
        edge,
        boundary_mass,
        alarm: Some(alarm.join(" / ")),
    })
}

fn sweep(kind: SchemeKind) -> Result<Vec<SweepPoint>, Error> {
    SWEEP.par_iter().map(|&dt| sweep_point(kind, dt)).collect()
}

fn exponents(points: &[SweepPoint]) -> Result<Vec<(Measure, f64)>, Error> {
    let dts: Vec<f64> = points.iter().map(|p| p.dt).collect();
    Measure::ALL
        .iter()
        .map(|&m| {
            let errs: Vec<f64> = points.iter().map(|p| value(p, m)).collect();
            Ok((m, fit_scaling(&dts, &errs)?.exponent))
        })
        .collect()
}

fn band_for(m: Measure) -> (f64, f64) {
    match m {
        Measure::WOverlap | Measure::PsiOverlap => OVERLAP_BAND,
        _ => EXPONENT_BAND,
    }
}

fn describe(points: &[SweepPoint], fits: &[(Measure, f64)]) -> String {
    let mut s = String::new();
    for p in points {
        s.push_str(&format!(
            "\n      dt {:.0e}: dE {:.4e}, w {:.4e}, psi {:.4e}, l2 {:.4e}, max {:.4e}",
            p.dt, p.energy, p.w.w_overlap, p.psi_overlap, p.w.l2, p.w.max_diff
        ));
        if let Some(a) = &p.alarm {
            s.push_str(&format!(
                " [alarm: {a}; unguarded edge |W| {:.2e}, psi boundary mass {:.2e}]",
                p.edge, p.boundary_mass
            ));
        }
    }
    for (m, e) in fits {
        let band = band_for(*m);
        let mark = if in_band(*e, band) { "ok" } else { "out of band" };
        s.push_str(&format!("\n      exponent {}: {e:.3} in [{}, {}] {mark}", m.name(), band.0, band.1));
    }
    let clean: Vec<&SweepPoint> = points.iter().filter(|p| p.alarm.is_none()).collect();
    if !fits.is_empty() && clean.len() >= 2 && clean.len() < points.len() {
        // informational only; the verdict uses the full sweep
        let slopes: Vec<String> = Measure::ALL
            .iter()
            .map(|&m| {
                let pts: Vec<(f64, f64)> = clean.iter().map(|p| (p.dt.ln(), value(p, m).ln())).collect();
                format!("{} {:.3}", m.name(), ls_slope(&pts))
            })
            .collect();
        s.push_str(&format!("\n      (alarm-free points only: {})", slopes.join(", ")));
    }
    s
}

fn value(p: &SweepPoint, m: Measure) -> f64 {
    match m {
        Measure::Energy => p.energy,
        Measure::WOverlap => p.w.w_overlap,
        Measure::PsiOverlap => p.psi_overlap,
        Measure::L2 => p.w.l2,
        Measure::MaxDiff => p.w.max_diff,
    }
}

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

// 7
fn scaling_u9() -> Result<Verdict, Error> {
    let points = sweep(SchemeKind::U9)?;
    let fits = exponents(&points)?;
    let pass = points.iter().all(|p| p.alarm.is_none()) && fits.iter().all(|(m, e)| in_band(*e, band_for(*m)));
    Ok(Verdict::new(pass, describe(&points, &fits)))
}

// 8
fn u7_against_u9() -> Result<Verdict, Error> {
    let u7 = sweep(SchemeKind::U7)?;
    let u9 = sweep_point(SchemeKind::U9, 1e-3)?;
    let fits = exponents(&u7)?;
    let ordered = u7[0].w.w_overlap >= u9.w.w_overlap;
    let in_bands = fits.iter().all(|(m, e)| in_band(*e, band_for(*m)));
    let clean = u7.iter().all(|p| p.alarm.is_none());
    let mut detail = format!(
        "ordering at dt 1e-3: U7 {:.4e} vs U9 {:.4e} ({})",
        u7[0].w.w_overlap,
        u9.w.w_overlap,
        if ordered { "ok" } else { "violated" }
    );
    detail.push_str(&describe(&u7, &fits));
    Ok(Verdict::new(ordered && in_bands && clean, detail))
}

fn random_polynomial(rng: &mut ChaCha8Rng) -> PolynomialXP {
    loop {
        let mut p = PolynomialXP::zero();
        for i in 0..=4u32 {
            for j in 0..=4u32 {
                if rng.gen_bool(0.3) {
                    let num = rng.gen_range(-9i64..=9);
                    let den = rng.gen_range(1i64..=6);
                    p.add_term(i, j, &HbarPoly::constant(Surd::frac(num, den)));
                }
            }
        }
        if !p.is_zero() {
            return p;
        }
    }
}

// 9
fn decomposition_round_trip() -> Result<Verdict, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut exact = 0;
    let mut with_odd_odd = 0;
    let mut reachable_exact = 0;
    let mut agree = 0;
    let total = 100;
    for _ in 0..total {
        let target = random_polynomial(&mut rng);
        let m = decompose(&target, BracketKind::Moyal)?;
        let p = decompose(&target, BracketKind::Poisson)?;
        let round_trip = m.is_exact() && m.reconstruct() == target;
        if round_trip {
            exact += 1;
        }
        if target.odd_odd_part().is_zero() {
            if round_trip {
                reachable_exact += 1;
            }
        } else {
            with_odd_odd += 1;
        }
        // terms whose coefficient is pure hbar^2 are quantum corrections with
        // no classical counterpart
        let mt: Vec<_> = m
            .sorted_terms()
            .into_iter()
            .filter(|t| !t.coefficient.classical_part().is_zero())
            .collect();
        let pt = p.sorted_terms();
        let terms_agree = mt.len() == pt.len()
            && mt.iter().zip(&pt).all(|(a, b)| {
                a.element.kind == b.element.kind
                    && a.element.n == b.element.n
                    && a.element.m == b.element.m
                    && a.coefficient.classical_part() == b.coefficient.classical_part()
                    && a.element.expansion.classical_part() == b.element.expansion
            });
        if terms_agree && m.reconstruct().classical_part() == p.reconstruct() && m.residual == p.residual {
            agree += 1;
        }
    }
    Ok(Verdict::new(
        exact == total && agree == total,
        format!(
            "{exact}/{total} reassemble exactly; {with_odd_odd} contain x^odd p^odd monomials (left in the residual), \
             {reachable_exact}/{} of the rest are exact; Poisson/Moyal hbar^0 agreement {agree}/{total}",
            total - with_odd_odd
        ),
    ))
}

// 10
fn cross_picture() -> Result<Verdict, Error> {
    let g = grid();
    let l = line();
    let dt: f64 = 1e-4;
    let steps = (0.1 / dt).round() as usize;
    let mut w = coherent_wigner(&g, amplitude(), amplitude())?;
    KerrWignerPropagator::new(&g, dt, KerrOptions::default())?.run(&mut w, steps)?;
    let mut psi = coherent_wavefunction(&l, amplitude(), amplitude())?;
    KerrSchrodingerPropagator::new(&l, dt, KerrOptions::default())?.run(&mut psi, steps)?;
    let from_psi = wigner_of_wavefunction(&psi, &g)?;
    let d = linf(&w, &from_psi, Representation::XP);
    Ok(Verdict::new(d < 1e-6, format!("L∞ |W − W[ψ]| at t = 0.1 = {d:.2e}")))
}

// 11
fn classical_rotation() -> Result<Verdict, Error> {
    // squeezed, displaced, and narrower than ℏ allows: a genuinely classical
    // density whose rotation is visible
    let g = make_phase_grid(128, 128, 16.0, 48.0, 1.0)?;
    let (sx, sp, x0) = (0.4, 0.8, 2.0);
    let density = |x: f64, p: f64| {
        (-(x - x0).powi(2) / (2.0 * sx * sx) - p * p / (2.0 * sp * sp)).exp() / (2.0 * PI * sx * sp)
    };
    let h = parse_polynomial("p^2/2 + x^2/2")?;
    let schedule = Schedule::for_hamiltonian(&h, SchemeKind::U9, default_t2(), OuterSplitting::Symmetric)?;
    let steps = 40_000;
    let period = 2.0 * PI;
    let mut w = WignerState::from_xp(g.clone(), density)?;
    let initial = w.clone();
    WignerScheduleStepper::new(&g, &schedule, period / steps as f64, true)?.run(&mut w, steps)?;
    let d = linf(&w, &initial, Representation::XP);
    Ok(Verdict::new(
        d < 1e-8,
        format!("L∞ against the analytic rotation after one period ({steps} steps) = {d:.2e}"),
    ))
}

fn main() {
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let criteria: [(&str, Duration, Check); 11] = [
        ("Kerr double-commutator identity", Duration::from_secs(1), kerr_identity),
        ("seven-factor x^6 defect", Duration::from_secs(10), seven_factor_defect),
        ("operator-level fifth order", Duration::from_secs(30), operator_order),
        ("norm conservation", Duration::from_secs(120), norm_conservation),
        ("reversibility", Duration::from_secs(10), reversibility),
        ("recurrence at dt 5e-4", Duration::from_secs(900), recurrence),
        ("U9 scaling exponents", Duration::from_secs(1800), scaling_u9),
        ("U7 against U9", Duration::from_secs(900), u7_against_u9),
        ("decomposition round trip", Duration::from_secs(60), decomposition_round_trip),
        ("cross-picture consistency", Duration::from_secs(300), cross_picture),
        ("classical rotation", Duration::from_secs(60), classical_rotation),
    ];
    let mut failed = 0;
    for (k, (name, budget, check)) in criteria.iter().enumerate() {
        let id = k + 1;
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let (pass, detail) = match result {
            Ok(v) => (v.pass && in_time, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {} {name} ({:.1} s, budget {} s): {detail}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
