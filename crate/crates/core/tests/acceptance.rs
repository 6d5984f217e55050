//! Acceptance checks. Runs as a plain binary and prints one PASS/FAIL line
//! per criterion; exits nonzero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::*;
use mixedderiv_core::circulant::trap_antiderivative;
use mixedderiv_core::equations::{
    build_degenerate_cubic, build_ostrovsky, build_sine_gordon, catalog, ExpectedBehavior, InitialData,
    OstrovskyVariant,
};
use mixedderiv_core::integrators::{simulate, spatial_convergence, Method, SimulationConfig, Status};
use mixedderiv_core::reformulate::{differential_residual, ladder_probe, reduce, FrozenSineGordon};
use mixedderiv_core::spectral::{
    build_error_curve, closed_form_error, sample_modes, ClosedFormKind, LabeledPair, EXCLUSION_RADIUS,
};
use mixedderiv_core::{CirculantOperator, Error, GridFunction, OperatorPair, StandardKind, VectorField};
use nalgebra::DMatrix;

// Pinned tolerances.
const CLOSED_FORM_TOL: f64 = 1e-10;
const SPOT_TOL: f64 = 1e-12;
const PSEUDO_TOL: f64 = 1e-10;
const TRAP_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-11;
const PRINTED_TOL: f64 = 1e-12;
const CONSERVATION_TOL: f64 = 1e-11;
const LEMMA_TOL: f64 = 1e-12;
const FLATNESS_TOL: f64 = 1e-11;
const ENVELOPE_TOL: f64 = 1e-8;
const ORDER_RANGE: (f64, f64) = (1.8, 2.2);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn closed_forms() -> Outcome {
    let start = Instant::now();
    let g = grid(512);
    let pairs: Vec<LabeledPair> = ClosedFormKind::ALL.iter().map(|&k| LabeledPair::builtin(k, g)).collect();
    let curve = build_error_curve(&pairs, 512, 200).map_err(|e| e.to_string())?;
    let worst = curve.max_discrepancy.iter().fold(0.0f64, |m, (_, d)| m.max(*d));
    ensure(curve.max_discrepancy.len() == 4, || "missing cross-checks".into())?;
    ensure(worst <= CLOSED_FORM_TOL, || format!("max discrepancy {worst:e}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("max |symbol - closed form| = {worst:.2e} over 200 modes"))
}

fn figure_claims() -> Outcome {
    let modes = sample_modes(512, 400, EXCLUSION_RADIUS).map_err(|e| e.to_string())?;
    let dx = 2.0 * PI / 512.0;
    let e = |k, w| closed_form_error(k, w).unwrap();
    let (mut low, mut high) = (0, 0);
    for w in modes.iter().map(|&m| m as f64 * dx) {
        if w < PI {
            low += 1;
            ensure(e(ClosedFormKind::Ad, w) < e(ClosedFormKind::Cd2, w), || format!("e_AD ≥ e_CD2 at {w}"))?;
        } else if w < 2.0 * PI - EXCLUSION_RADIUS {
            high += 1;
            ensure(e(ClosedFormKind::Ad, w) < e(ClosedFormKind::Ps, w), || format!("e_AD ≥ e_PS at {w}"))?;
        }
    }
    let ad = e(ClosedFormKind::Ad, PI / 2.0);
    let cd = e(ClosedFormKind::Cd2, PI / 2.0);
    ensure((ad - (PI / 4.0 - 1.0).abs()).abs() <= SPOT_TOL, || format!("e_AD(π/2) = {ad}"))?;
    ensure((cd - (PI / 2.0 - 1.0).abs()).abs() <= SPOT_TOL, || format!("e_CD2(π/2) = {cd}"))?;
    Ok(format!("dominance at {low} samples below and {high} above Nyquist; spot values exact"))
}

fn to_matrix(k: usize, data: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(k, k, data)
}

fn norm(m: &DMatrix<f64>) -> f64 {
    m.abs().max()
}

fn pseudoinverse_axioms() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in [8usize, 16, 33] {
        let g = grid(k);
        for kind in [
            StandardKind::ForwardDiff,
            StandardKind::CentralDiff,
            StandardKind::OneSided2Diff,
            StandardKind::FourierSpectralDiff,
        ] {
            let op = CirculantOperator::standard(kind, g);
            let pair = OperatorPair::plain(op.clone());
            let d = to_matrix(k, &op.dense());
            let p = to_matrix(k, &pair.pseudo_dense());
            let oracle = d.clone().svd(true, true).pseudo_inverse(1e-9 * d.norm()).map_err(|e| e.to_string())?;
            let dp = &d * &p;
            let pd = &p * &d;
            let checks = [
                norm(&(&dp * &d - &d)),
                norm(&(&pd * &p - &p)),
                norm(&(&dp - dp.transpose())),
                norm(&(&pd - pd.transpose())),
                norm(&(&p - &oracle)),
            ];
            for (i, c) in checks.iter().enumerate() {
                ensure(*c <= PSEUDO_TOL, || format!("{kind:?} K={k} check {i}: {c:e}"))?;
                worst = worst.max(*c);
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("worst Moore–Penrose residual {worst:.2e}"))
}

fn trapezoidal_identity() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for k in [8usize, 64] {
        let g = grid(k);
        let fwd = CirculantOperator::standard(StandardKind::ForwardDiff, g);
        let avg = CirculantOperator::standard(StandardKind::ForwardAvg, g);
        for _ in 0..100 {
            let v = zero_mean(&rough(&mut r, g, 1.0));
            let w = trap_antiderivative(&v).map_err(|e| e.to_string())?;
            let lhs = fwd.apply(&w).unwrap();
            let rhs = avg.apply(&v).unwrap();
            worst = worst.max(max_abs_diff(lhs.values(), rhs.values()));
        }
    }
    ensure(worst <= TRAP_TOL, || format!("max residual {worst:e}"))?;
    Ok(format!("max |δ⁺w - μ⁺v| = {worst:.2e} over 200 inputs"))
}

fn printed_sg_trap(u: &GridFunction) -> GridFunction {
    let w = trap_antiderivative(&u.map(f64::sin)).unwrap();
    let c = u.map(f64::cos);
    let shift = c.dot(&w) / c.sum();
    w.map(|v| v - shift)
}

fn equivalence() -> Outcome {
    let mut r = rng(5);
    let g = grid(64);
    let eq = build_sine_gordon(g);
    let ode = reduce(&eq);
    let (mut residual, mut printed) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let u = on_constraint(&mut r, &eq, 6, 0.8);
        ensure(u.map(f64::cos).sum() >= 0.5 * 64.0, || "state too far from rest".into())?;
        let rhs = ode.rhs(&u).map_err(|e| e.to_string())?;
        residual = residual.max(differential_residual(&eq, &u, &rhs).unwrap().max_abs());
        printed = printed.max((&rhs - &printed_sg_trap(&u)).max_abs());
    }
    ensure(residual <= RESIDUAL_TOL, || format!("residual {residual:e}"))?;
    ensure(printed <= PRINTED_TOL, || format!("printed formula mismatch {printed:e}"))?;
    Ok(format!("max residual {residual:.2e}, max mismatch with trapezoidal form {printed:.2e}"))
}

fn conservation() -> Outcome {
    let mut r = rng(6);
    let g = grid(64);
    let sg = build_sine_gordon(g);
    let mut worst_sg = 0.0f64;
    for _ in 0..50 {
        let u = on_constraint(&mut r, &sg, 6, 0.8);
        let rhs = reduce(&sg).rhs(&u).unwrap();
        worst_sg = worst_sg.max(u.map(f64::sin).dot(&rhs).abs());
    }
    ensure(worst_sg <= CONSERVATION_TOL, || format!("Σ sin u · rhs = {worst_sg:e}"))?;
    let mut worst_os = 0.0f64;
    for variant in [OstrovskyVariant::Fd, OstrovskyVariant::Ps] {
        let eq = build_ostrovsky(g, variant, 0.1, 1.0).unwrap();
        for _ in 0..50 {
            let u = zero_mean(&smooth(&mut r, g, 8, 1.0, 0.0));
            let rhs = reduce(&eq).rhs(&u).unwrap();
            let d = mixedderiv_core::grid::inner(&u, &rhs).unwrap().abs();
            ensure(d <= CONSERVATION_TOL, || format!("{variant:?}: inner(u, rhs) = {d:e}"))?;
            worst_os = worst_os.max(d);
        }
    }
    Ok(format!("sine-Gordon {worst_sg:.2e}, Ostrovsky {worst_os:.2e}"))
}

fn frozen_lemma() -> Outcome {
    let mut r = rng(7);
    let g = grid(64);
    let dx = g.dx();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let u = smooth(&mut r, g, 8, 1.5, 0.3);
        let h0 = {
            let h: f64 = rand::Rng::random_range(&mut r, 0.5..3.0);
            if rand::Rng::random_bool(&mut r, 0.5) {
                h
            } else {
                -h
            }
        };
        let field = FrozenSineGordon::new(g, h0).unwrap();
        let udot = field.eval(&u).unwrap();
        let ct = field.c_tilde(&u).unwrap();
        let h = dx * u.map(f64::cos).sum();
        let f = dx * u.map(f64::sin).sum();
        let df = dx * u.map(f64::cos).dot(&udot);
        let dh = -dx * u.map(f64::sin).dot(&udot);
        let e1 = (df - ct / h0 * (h0 - h)).abs();
        let e2 = (dh - ct / h0 * f).abs();
        worst = worst.max(e1).max(e2);
    }
    ensure(worst <= LEMMA_TOL, || format!("identity defect {worst:e}"))?;
    Ok(format!("max identity defect {worst:.2e} over 50 states"))
}

fn constraint_flatness() -> Outcome {
    let mut r = rng(8);
    let g = grid(64);
    let mut checked = Vec::new();
    let mut worst = 0.0f64;
    for entry in catalog() {
        if entry.expected_behavior == ExpectedBehavior::Degenerate {
            continue;
        }
        let eq = entry.build(g, &Default::default()).map_err(|e| e.to_string())?;
        let ode = reduce(&eq);
        for _ in 0..10 {
            let u = smooth(&mut r, g, 5, 0.3, 0.0);
            let rhs = ode.rhs(&u).map_err(|e| format!("{}: {e}", entry.id))?;
            let grad = &eq.f_bar_grad(&u) * g.dx();
            let scale = grad.dot(&grad).sqrt() * rhs.dot(&rhs).sqrt();
            let rel = grad.dot(&rhs).abs() / scale.max(f64::MIN_POSITIVE);
            ensure(rel <= FLATNESS_TOL, || format!("{}: relative rate {rel:e}", entry.id))?;
            worst = worst.max(rel);
        }
        checked.push(entry.id);
    }
    Ok(format!("{} equations, worst relative dF_d/dt {worst:.2e}", checked.len()))
}

fn degeneracy() -> Outcome {
    let g = grid(64);
    let eq = build_degenerate_cubic(g);
    let delta = CirculantOperator::standard(StandardKind::CentralDiff, g);
    let mut notes = Vec::new();
    for (label, u) in [
        ("sin x", GridFunction::from_fn(g, f64::sin).unwrap()),
        ("sin x + sin 2x", GridFunction::from_fn(g, |x| x.sin() + (2.0 * x).sin()).unwrap()),
    ] {
        match reduce(&eq).rhs(&u) {
            Err(Error::DegenerateConstraint { .. }) => {}
            other => return Err(format!("{label}: expected degeneracy, got {other:?}")),
        }
        let ladder = ladder_probe(&eq, &u).unwrap();
        let reference = -delta.apply(&u).unwrap().values().iter().map(|d| d.powi(5)).sum::<f64>() / 3.0;
        // both vanish identically for a single mode; compare signs outside round-off
        let band = 1e-12;
        let sign = |x: f64| {
            if x.abs() <= band {
                0
            } else if x > 0.0 {
                1
            } else {
                -1
            }
        };
        ensure(sign(ladder) == sign(reference), || format!("{label}: ladder {ladder:e} vs reference {reference:e}"))?;
        notes.push(format!("{label}: F₁ = {ladder:.3e}"));
    }
    Ok(notes.join(", "))
}

fn simulation_envelope() -> Outcome {
    let start = Instant::now();
    let mut c = SimulationConfig::new("sine_gordon", 64, 1.0, 1e-3, InitialData::Kink);
    c.project = true;
    c.method = Method::ImplicitMidpoint;
    c.monitors = vec!["F_d".into(), "H_d".into()];
    c.output_stride = 10;
    let rec = simulate(&c).map_err(|e| e.to_string())?;
    ensure(rec.status == Status::Completed, || format!("status {:?}", rec.status))?;
    let f = rec.monitor("F_d").unwrap();
    let h = rec.monitor("H_d").unwrap();
    let max_f = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let drift = (h[h.len() - 1] - h[0]).abs();
    ensure(max_f <= ENVELOPE_TOL, || format!("max |F_d| = {max_f:e}"))?;
    ensure(drift <= ENVELOPE_TOL, || format!("H_d drift {drift:e}"))?;
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("max |F_d| = {max_f:.2e}, H_d drift {drift:.2e}"))
}

fn spatial_order() -> Outcome {
    let start = Instant::now();
    let mut c = SimulationConfig::new("sine_gordon", 32, 0.5, 1e-4, InitialData::Kink);
    c.project = true;
    c.method = Method::Rk4;
    let study = spatial_convergence(&c, &[32, 64, 128], 1024).map_err(|e| e.to_string())?;
    let order = study.order.ok_or("no fitted order")?;
    ensure((ORDER_RANGE.0..=ORDER_RANGE.1).contains(&order), || {
        format!("order {order:.3}, errors {:?}", study.errors)
    })?;
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!(
        "fitted order {order:.3}, errors {:?}",
        study.errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>()
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("closed-form spectral errors", closed_forms),
        ("error-curve comparisons", figure_claims),
        ("pseudoinverse axioms", pseudoinverse_axioms),
        ("trapezoidal identity", trapezoidal_identity),
        ("average-difference equivalence", equivalence),
        ("semi-discrete conservation", conservation),
        ("frozen sine-Gordon identities", frozen_lemma),
        ("constraint flatness", constraint_flatness),
        ("degeneracy detection", degeneracy),
        ("simulation envelope", simulation_envelope),
        ("spatial convergence", spatial_order),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
