use oppq_core::mer::{QzmSystem, Recurrence1D};
use oppq_core::mpnum::{BigReal, Precision};
use oppq_core::oppq::*;
use oppq_core::refweight::Weight1D;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

fn fd_derivative(f: &Evaluator<'_>, e: &BigReal) -> BigReal {
    let p = f.precision();
    let h = p.pow10(-(p.digits() as i32) / 3);
    let hi = f.value(&Float::with_val(p.bits(), e + &h)).unwrap();
    let lo = f.value(&Float::with_val(p.bits(), e - &h)).unwrap();
    (hi - lo) / (h * 2u32)
}

fn rel_err(a: &BigReal, b: &BigReal) -> BigReal {
    let bits = a.prec();
    let scale = Float::with_val(bits, b.abs_ref()).max(&Float::with_val(bits, 1e-30));
    Float::with_val(bits, a - b).abs() / scale
}

#[test]
fn full_line_oscillator_eigen_path() {
    // Both parities at once: two missing moments, smallest eigenvalue of a 2×2.
    let p = Precision::new(60).unwrap();
    let prob = Problem::one_d(
        Recurrence1D::harmonic_full_line(p),
        &Weight1D::Gaussian { variance: p.one() },
        24,
        NormalizationMode::UnitMissingMomentVector,
        p,
    )
    .unwrap();
    let f = prob.order(24).unwrap();
    let tol = p.pow10(-25);
    let m = minimize_in_window(&f, &p.from_f64(2.2), &p.from_f64(3.8), 17, &tol, Default::default()).unwrap();
    assert!((m.energy.to_f64() - 3.0).abs() < 1e-6, "{}", m.energy);
    let bu = Float::with_val(p.bits(), &m.value * 1.01f64);
    let b = extract_bounds(&f, &m.energy, &bu, (&p.int(2), &p.int(4)), &tol).unwrap();
    assert!(b.lower < 3 && b.upper > 3);
    // Hellmann-Feynman derivative against finite differences away from the minimum.
    let e = p.from_f64(3.4);
    let d = f.derivative(&e).unwrap();
    assert!(rel_err(&fd_derivative(&f, &e), &d) < p.pow10(-15));
}

#[test]
fn schur_path_agrees_with_eigen_path_for_single_missing_moment() {
    let p = Precision::new(60).unwrap();
    let unit = Problem::harmonic(10, p).unwrap();
    let first = unit.clone().with_mode(NormalizationMode::FirstMomentOne).unwrap();
    let e = p.from_f64(6.3);
    let a = unit.order(10).unwrap().evaluate(&e, true).unwrap();
    let b = first.order(10).unwrap().evaluate(&e, true).unwrap();
    assert!(rel_err(&a.value, &b.value) < p.ulp_scaled(8));
    assert!(rel_err(a.derivative.as_ref().unwrap(), b.derivative.as_ref().unwrap()) < p.ulp_scaled(8));
}

#[test]
fn harmonic_bounds_contain_exact_levels() {
    let p = Precision::new(60).unwrap();
    let prob = Problem::harmonic(16, p).unwrap();
    let tol = p.pow10(-25);
    let window = (p.zero(), p.int(20));
    for (level, lo, hi) in [(5, 3.0, 7.0), (9, 7.5, 10.5)] {
        let mut seq = Vec::new();
        for i in [10, 12, 14, 16] {
            let f = prob.order(i).unwrap();
            let m = minimize_in_window(&f, &p.from_f64(lo), &p.from_f64(hi), 41, &tol, Default::default()).unwrap();
            seq.push((i, m));
        }
        let bu = Float::with_val(p.bits(), &seq.last().unwrap().1.value * 1.05f64);
        for (i, m) in &seq {
            let f = prob.order(*i).unwrap();
            let b = extract_bounds(&f, &m.energy, &bu, (&window.0, &window.1), &tol).unwrap();
            assert!(b.lower < level && b.upper > level, "I = {i}, level {level}");
        }
    }
}

#[test]
fn qzm_global_minimum_certificate() {
    let p = Precision::new(60).unwrap();
    let sys = QzmSystem::parse(p, "2", "1", "1").unwrap();
    let prob = Problem::qzm(sys, 3, p).unwrap();
    let f = prob.order(3).unwrap();
    let e = p.from_f64(1.03);
    let s = f.evaluate(&e, false).unwrap();
    let (d, _) = f.quadratic_form(&e, false).unwrap();
    assert!((d.quadratic_form(&s.minimizer) - s.value.clone()).abs() < p.ulp_scaled(10));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let mu: Vec<BigReal> = (0..4)
            .map(|k| if k == 0 { p.one() } else { Float::with_val(p.bits(), &s.minimizer[k] + rng.gen_range(-1.0..1.0)) })
            .collect();
        assert!(d.quadratic_form(&mu) >= s.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn harmonic_orders_nest(e in 0.0f64..20.0, i in 1usize..14) {
        let p = Precision::new(50).unwrap();
        let prob = Problem::harmonic(14, p).unwrap();
        let e = p.from_f64(e);
        let a = prob.order(i).unwrap().value(&e).unwrap();
        let b = prob.order(i + 1).unwrap().value(&e).unwrap();
        prop_assert!(a > 0);
        prop_assert!(a <= b);
    }

    #[test]
    fn qzm_orders_nest(eps in 1.001f64..2.0) {
        let p = Precision::new(60).unwrap();
        let sys = QzmSystem::parse(p, "2", "1", "1").unwrap();
        let prob = Problem::qzm(sys, 3, p).unwrap();
        let e = p.from_f64(eps);
        let mut last = p.zero();
        for m_s in 0..=3 {
            let v = prob.order(m_s).unwrap().value(&e).unwrap();
            prop_assert!(v >= last);
            last = v;
        }
    }
}
