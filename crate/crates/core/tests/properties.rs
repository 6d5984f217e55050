mod common;

use common::*;
use mixedderiv_core::circulant::trap_antiderivative;
use mixedderiv_core::equations::{catalog, skew_flux, ExpectedBehavior};
use mixedderiv_core::grid::{inner, mean, project_zero_mean};
use mixedderiv_core::integrators::{implicit_midpoint_step, rk4_step};
use mixedderiv_core::reformulate::reduce;
use mixedderiv_core::spectral::{approx_band_integral, closed_form_error, exact_band_integral, ClosedFormKind};
use mixedderiv_core::{CirculantOperator, EquationDef, GridFunction, OperatorPair, PeriodicGrid, StandardKind};
use num_complex::Complex64;
use proptest::prelude::*;

fn values(k: usize, bound: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-bound..bound, k)
}

fn gf(k: usize, v: Vec<f64>) -> GridFunction {
    GridFunction::new(grid(k), v).unwrap()
}

fn operator_kinds() -> impl Strategy<Value = StandardKind> {
    prop::sample::select(vec![
        StandardKind::ForwardDiff,
        StandardKind::BackwardDiff,
        StandardKind::CentralDiff,
        StandardKind::OneSided2Diff,
        StandardKind::CentralDiff3,
        StandardKind::FourierSpectralDiff,
    ])
}

fn pairs(g: PeriodicGrid) -> Vec<OperatorPair> {
    let mut out: Vec<OperatorPair> = [
        StandardKind::ForwardDiff,
        StandardKind::CentralDiff,
        StandardKind::OneSided2Diff,
        StandardKind::FourierSpectralDiff,
    ]
    .into_iter()
    .map(|k| OperatorPair::plain(CirculantOperator::standard(k, g)))
    .collect();
    out.push(OperatorPair::average_difference(g));
    out.push(OperatorPair::compact(g, 1.5, 0.0, 0.0, 0.25, 0.0).unwrap());
    out
}

fn regular_equations(g: PeriodicGrid) -> Vec<EquationDef> {
    catalog()
        .iter()
        .filter(|e| e.expected_behavior != ExpectedBehavior::Degenerate)
        .map(|e| e.build(g, &Default::default()).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inner_is_symmetric_and_bilinear(a in values(12, 10.0), b in values(12, 10.0), c in values(12, 10.0), s in -5.0..5.0f64) {
        let (u, v, w) = (gf(12, a), gf(12, b), gf(12, c));
        let scale = (inner(&u, &u).unwrap() * inner(&v, &v).unwrap()).sqrt().max(1.0);
        prop_assert!((inner(&u, &v).unwrap() - inner(&v, &u).unwrap()).abs() <= 1e-14 * scale);
        let lhs = inner(&(&(&u * s) + &w), &v).unwrap();
        let rhs = s * inner(&u, &v).unwrap() + inner(&w, &v).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()) * 10.0);
    }

    #[test]
    fn projection_is_idempotent_and_self_adjoint(a in values(15, 10.0), b in values(15, 10.0)) {
        let (u, v) = (gf(15, a), gf(15, b));
        let pu = project_zero_mean(&u);
        prop_assert!(mean(&pu).abs() <= 1e-13);
        prop_assert!((&project_zero_mean(&pu) - &pu).max_abs() <= 1e-13);
        let l = inner(&pu, &v).unwrap();
        let r = inner(&u, &project_zero_mean(&v)).unwrap();
        prop_assert!((l - r).abs() <= 1e-11);
    }

    #[test]
    fn projection_equals_pseudo_composition(a in values(16, 10.0)) {
        let u = gf(16, a);
        let op = CirculantOperator::standard(StandardKind::ForwardDiff, u.grid());
        let pair = OperatorPair::plain(op.clone());
        let back = pair.pseudo_apply(&op.apply(&u).unwrap()).unwrap();
        prop_assert!((&back - &project_zero_mean(&u)).max_abs() <= 1e-10);
    }

    #[test]
    fn rank_deficient_by_one_operators_recover_zero_mean_part(kind in operator_kinds(), k in 5usize..40, seed in any::<u64>()) {
        let g = grid(k);
        let op = CirculantOperator::standard(kind, g);
        prop_assume!(op.rank() == k - 1);
        let u = rough(&mut rng(seed), g, 3.0);
        let back = op.pseudo_apply(&op.apply(&u).unwrap()).unwrap();
        prop_assert!((&back - &project_zero_mean(&u)).max_abs() <= 1e-10);
    }

    #[test]
    fn symbols_are_eigenvalues(kind in operator_kinds(), k in 4usize..40, w in 0i64..100) {
        let g = grid(k);
        let op = CirculantOperator::standard(kind, g);
        let re = GridFunction::from_fn(g, |x| (w as f64 * x).cos()).unwrap();
        let im = GridFunction::from_fn(g, |x| (w as f64 * x).sin()).unwrap();
        let (dre, dim) = (op.apply(&re).unwrap(), op.apply(&im).unwrap());
        let l = op.symbol(w);
        let tol = 1e-12 * op.max_symbol().max(1.0) * k as f64;
        for i in 0..k {
            let want = Complex64::new(re[i], im[i]) * l;
            prop_assert!((Complex64::new(dre[i], dim[i]) - want).norm() <= tol);
        }
        prop_assert_eq!(op.symbol(w + k as i64), l);
    }

    #[test]
    fn circulant_left_null_vector(kind in operator_kinds(), k in 4usize..30) {
        let g = grid(k);
        let op = CirculantOperator::standard(kind, g);
        let m = op.dense();
        for col in 0..k {
            let s: f64 = (0..k).map(|row| m[row * k + col]).sum();
            prop_assert!(s.abs() <= 1e-9 * op.max_symbol().max(1.0));
            for row in 0..k {
                // circulant: entry depends on col - row only
                let r2 = (row + 1) % k;
                let c2 = (col + 1) % k;
                prop_assert!((m[row * k + col] - m[r2 * k + c2]).abs() <= 1e-9 * op.max_symbol().max(1.0));
            }
        }
    }

    #[test]
    fn pseudo_apply_is_linear_with_zero_mean_output(k in 4usize..40, seed in any::<u64>(), s in -3.0..3.0f64) {
        let g = grid(k);
        let mut r = rng(seed);
        let (u, v) = (rough(&mut r, g, 5.0), rough(&mut r, g, 5.0));
        for pair in pairs(g) {
            let pu = pair.pseudo_apply(&u).unwrap();
            prop_assert!(mean(&pu).abs() <= 1e-12 * (1.0 + pu.max_abs()));
            let combo = pair.pseudo_apply(&(&(&u * s) + &v)).unwrap();
            let sep = &(&pu * s) + &pair.pseudo_apply(&v).unwrap();
            prop_assert!((&combo - &sep).max_abs() <= 1e-12 * (1.0 + combo.max_abs()));
            let d = pair.difference();
            let lin = &d.apply(&(&u * s)).unwrap() - &(&d.apply(&u).unwrap() * s);
            prop_assert!(lin.max_abs() <= 1e-12 * (1.0 + d.max_symbol() * 5.0 * s.abs()));
        }
    }

    #[test]
    fn trap_agrees_with_average_difference_inverse(k in 4usize..80, seed in any::<u64>()) {
        let g = grid(k);
        let v = zero_mean(&rough(&mut rng(seed), g, 2.0));
        let a = trap_antiderivative(&v).unwrap();
        let b = OperatorPair::average_difference(g).pseudo_apply(&v).unwrap();
        prop_assert!((&a - &b).max_abs() <= 1e-10);
    }

    #[test]
    fn catalog_gradients_match_finite_differences(seed in any::<u64>()) {
        let g = grid(24);
        let mut r = rng(seed);
        for entry in catalog() {
            let eq = entry.build(g, &Default::default()).unwrap();
            let u = smooth(&mut r, g, 4, 0.8, 0.1);
            let dir = rough(&mut r, g, 1.0);
            let h = 1e-6 * (1.0 + u.max_abs());
            let total = |w: &GridFunction| eq.f_bar(w).sum();
            let fd = (total(&(&u + &(&dir * h))) - total(&(&u - &(&dir * h)))) / (2.0 * h);
            let exact = eq.f_bar_grad(&u).dot(&dir);
            prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{}: {fd} vs {exact}", entry.id);
        }
    }

    #[test]
    fn conserved_gradients_match_finite_differences(seed in any::<u64>()) {
        let g = grid(20);
        let mut r = rng(seed);
        for entry in catalog() {
            let eq = entry.build(g, &Default::default()).unwrap();
            for f in eq.conserved() {
                let u = smooth(&mut r, g, 4, 0.8, 0.1);
                let dir = rough(&mut r, g, 1.0);
                let h = 1e-6;
                let fd = ((f.value)(&(&u + &(&dir * h))) - (f.value)(&(&u - &(&dir * h)))) / (2.0 * h);
                let exact = (f.gradient)(&u).dot(&dir);
                prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0));
            }
        }
    }

    #[test]
    fn skew_fluxes_sum_to_zero(seed in any::<u64>(), k in 6usize..48) {
        let g = grid(k);
        let u = rough(&mut rng(seed), g, 2.0);
        for kind in [StandardKind::CentralDiff, StandardKind::FourierSpectralDiff] {
            let d = CirculantOperator::standard(kind, g);
            let s = skew_flux(&d, &u);
            prop_assert!(s.sum().abs() <= 1e-12 * (1.0 + d.max_symbol()) * k as f64);
            prop_assert!(u.dot(&s).abs() <= 1e-12 * (1.0 + d.max_symbol()) * k as f64 * 4.0);
            prop_assert!(skew_flux(&d, &GridFunction::constant(g, 1.3)).max_abs() <= 1e-12 * (1.0 + d.max_symbol()));
        }
    }

    #[test]
    fn reduced_fields_are_shift_equivariant(seed in any::<u64>(), s in -7i64..7) {
        let g = grid(16);
        let mut r = rng(seed);
        for eq in regular_equations(g) {
            let u = smooth(&mut r, g, 3, 0.4, 0.0);
            let ode = reduce(&eq);
            let a = ode.rhs(&u.shift(s)).unwrap();
            let b = ode.rhs(&u).unwrap().shift(s);
            prop_assert!((&a - &b).max_abs() <= 1e-11 * (1.0 + b.max_abs()), "{}", eq.name());
            let dt = 1e-3;
            let a = rk4_step(&ode, &u.shift(s), dt).unwrap();
            let b = rk4_step(&ode, &u, dt).unwrap().shift(s);
            prop_assert!((&a - &b).max_abs() <= 1e-11);
            let a = implicit_midpoint_step(&ode, &u.shift(s), dt).unwrap();
            let b = implicit_midpoint_step(&ode, &u, dt).unwrap().shift(s);
            prop_assert!((&a - &b).max_abs() <= 1e-11);
        }
    }

    #[test]
    fn reduced_fields_keep_the_constraint_flat(seed in any::<u64>()) {
        let g = grid(32);
        let mut r = rng(seed);
        for eq in regular_equations(g) {
            let u = smooth(&mut r, g, 4, 0.4, 0.0);
            let rhs = reduce(&eq).rhs(&u).unwrap();
            let grad = eq.f_bar_grad(&u);
            let scale = grad.dot(&grad).sqrt() * rhs.dot(&rhs).sqrt();
            prop_assert!(grad.dot(&rhs).abs() <= 1e-11 * scale.max(1e-300), "{}", eq.name());
        }
    }

    #[test]
    fn band_integral_ratio_is_independent_of_k(w in 1i64..15, ks in prop::collection::vec(-50i64..50, 10)) {
        let g = grid(32);
        for pair in pairs(g) {
            if !pair.in_range(w) {
                continue;
            }
            let ratio = |k| approx_band_integral(&pair, w, k).unwrap() / exact_band_integral(w, k, g.dx());
            let r0 = ratio(ks[0]);
            let expected = Complex64::new(0.0, w as f64) * pair.symbol(w);
            prop_assert!((r0 - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
            for &k in &ks[1..] {
                prop_assert!((ratio(k) - r0).norm() <= 1e-12 * (1.0 + r0.norm()));
            }
        }
    }

    #[test]
    fn closed_forms_are_nonnegative_and_finite(w in 0.01..12.5f64) {
        let near_pole = (w / std::f64::consts::PI - (w / std::f64::consts::PI).round()).abs() < 1e-6;
        prop_assume!(!near_pole);
        for kind in ClosedFormKind::ALL {
            let e = closed_form_error(kind, w).unwrap();
            prop_assert!(e.is_finite() && e >= 0.0);
        }
    }
}

#[test]
fn implicit_midpoint_is_time_symmetric() {
    let g = grid(32);
    let mut r = rng(11);
    for eq in regular_equations(g) {
        let ode = reduce(&eq);
        for _ in 0..5 {
            let u = smooth(&mut r, g, 4, 0.4, 0.0);
            let fwd = implicit_midpoint_step(&ode, &u, 1e-3).unwrap();
            let back = implicit_midpoint_step(&ode, &fwd, -1e-3).unwrap();
            assert!((&back - &u).max_abs() <= 1e-10, "{}", eq.name());
        }
    }
}

#[test]
fn consistent_pairs_are_second_order_at_low_wavenumber() {
    use mixedderiv_core::integrators::least_squares_slope;
    use mixedderiv_core::spectral::relative_error;
    let k = 4096;
    let g = grid(k);
    let all = pairs(g);
    let last = all.len() - 1;
    for (i, pair) in all.into_iter().enumerate().skip(1) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for w in (8..=326).step_by(6) {
            let e = relative_error(&pair, w).unwrap();
            if e > 1e-13 {
                xs.push((w as f64 * g.dx()).ln());
                ys.push(e.ln());
            }
        }
        if xs.len() < 5 {
            // spectral: exact below Nyquist
            continue;
        }
        let slope = least_squares_slope(&xs, &ys);
        // skips forward difference (first order); compact is fourth order
        let is_compact = i == last;
        let band = if is_compact { 3.9..=4.1 } else { 1.9..=2.1 };
        assert!(band.contains(&slope), "slope {slope}");
    }
}

#[test]
fn average_difference_beats_one_sided_for_most_samples() {
    use mixedderiv_core::spectral::{sample_modes, EXCLUSION_RADIUS};
    let dx = 2.0 * std::f64::consts::PI / 512.0;
    let below: Vec<f64> = sample_modes(512, 200, EXCLUSION_RADIUS)
        .unwrap()
        .into_iter()
        .map(|m| m as f64 * dx)
        .filter(|&w| w < std::f64::consts::PI)
        .collect();
    let wins = below
        .iter()
        .filter(|&&w| {
            closed_form_error(ClosedFormKind::Ad, w).unwrap() <= closed_form_error(ClosedFormKind::Od2, w).unwrap()
        })
        .count();
    assert!(wins as f64 >= 0.9 * below.len() as f64, "{wins}/{}", below.len());
}
