use oppq_core::mer::{
    antidiagonal_order, build_1d, build_derivative, build_qzm, QzmSystem, Recurrence1D, TransferTable,
};
use oppq_core::mpnum::{max_abs, BigReal, Precision};
use proptest::prelude::*;
use rug::Float;

/// Every derivative entry against a central difference with `h = 10^(-D/3)`.
fn assert_fd_agrees(p: Precision, at: impl Fn(&BigReal) -> TransferTable, e: &BigReal) {
    let bits = p.bits();
    let h = p.pow10(-(p.digits() as i32) / 3);
    let tol = p.pow10(-(p.digits() as i32) / 4);
    let t = build_derivative(at(e)).unwrap();
    let plus = at(&Float::with_val(bits, e + &h));
    let minus = at(&Float::with_val(bits, e - &h));
    for idx in 0..t.len() {
        let d = t.d_row(idx).unwrap();
        let scale = max_abs(d);
        for l in 0..d.len() {
            let fd = Float::with_val(bits, &plus.row(idx)[l] - &minus.row(idx)[l]) / Float::with_val(bits, &h * 2u32);
            let err = Float::with_val(bits, &fd - &d[l]).abs();
            assert!(err <= Float::with_val(bits, &scale * &tol), "row {idx}, column {l}");
        }
    }
}

#[test]
fn harmonic_derivative_matches_finite_differences() {
    for digits in [60, 120] {
        let p = Precision::new(digits).unwrap();
        let rec = Recurrence1D::harmonic_even(p);
        assert_fd_agrees(p, |e| build_1d(&rec, e, 20).unwrap(), &p.from_f64(4.7));
    }
}

#[test]
fn qzm_derivative_matches_finite_differences() {
    for digits in [60, 120] {
        let p = Precision::new(digits).unwrap();
        let sys = QzmSystem::parse(p, "2", "1", "1").unwrap();
        assert_fd_agrees(p, |e| build_qzm(&sys, e, 2).unwrap(), &p.one());
        assert_fd_agrees(p, |e| build_qzm(&sys, e, 5).unwrap(), &p.from_f64(1.3));
    }
}

#[test]
fn harmonic_entries_are_polynomials_in_energy() {
    // M_E(p, 0) has degree p: Lagrange interpolation through p + 1 energies
    // reproduces it exactly at any other energy.
    let p = Precision::new(80).unwrap();
    let bits = p.bits();
    let rec = Recurrence1D::harmonic_even(p);
    let deg = 9;
    let nodes: Vec<BigReal> = (0..=deg).map(|k| p.int(k as i64 - 3)).collect();
    let values: Vec<BigReal> = nodes
        .iter()
        .map(|e| build_1d(&rec, e, deg).unwrap().get(deg, 0).unwrap().clone())
        .collect();
    let target = p.parse("2.75").unwrap();
    let mut interp = Float::new(bits);
    for (k, (xk, yk)) in nodes.iter().zip(&values).enumerate() {
        let mut basis = Float::with_val(bits, 1);
        for (j, xj) in nodes.iter().enumerate() {
            if j != k {
                basis *= Float::with_val(bits, &target - xj) / Float::with_val(bits, xk - xj);
            }
        }
        interp += basis * yk;
    }
    let direct = build_1d(&rec, &target, deg).unwrap().get(deg, 0).unwrap().clone();
    let err = Float::with_val(bits, &interp - &direct).abs() / direct.abs();
    assert!(err < p.ulp_scaled(10));
}

#[test]
fn stencil_residual_small_up_to_order_six() {
    for digits in [60, 120] {
        let p = Precision::new(digits).unwrap();
        let sys = QzmSystem::parse(p, "2", "1", "1").unwrap();
        for m_s in 0..=6 {
            let r = build_qzm(&sys, &p.from_f64(1.02), m_s).unwrap().stencil_residual().unwrap();
            assert!(r < p.ulp_scaled(8), "m_s = {m_s}: {r}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn qzm_tables_keep_symmetry_and_seeds(b in 0.01f64..50.0, eps in 0.05f64..5.0, m_s in 0usize..5) {
        let p = Precision::new(40).unwrap();
        let sys = QzmSystem::new(p.from_f64(b), p.one(), p.one()).unwrap();
        let t = build_qzm(&sys, &p.from_f64(eps), m_s).unwrap();
        prop_assert_eq!(t.len(), (m_s + 1) * (2 * m_s + 3));
        for (m, n) in antidiagonal_order(m_s) {
            for l in 0..=m_s {
                prop_assert_eq!(t.get_2d(m, n, l), t.get_2d(n, m, l));
            }
        }
        for a in 0..=m_s {
            for c in 0..=m_s {
                prop_assert_eq!(t.get_2d(a, a, c).unwrap().clone(), Float::with_val(p.bits(), u32::from(a == c)));
            }
        }
        prop_assert!(t.stencil_residual().unwrap() < p.ulp_scaled(8));
    }

    #[test]
    fn one_d_tables_start_with_identity(e in -10.0f64..30.0, p_max in 1usize..30) {
        let p = Precision::new(40).unwrap();
        let t = build_derivative(build_1d(&Recurrence1D::harmonic_full_line(p), &p.from_f64(e), p_max).unwrap()).unwrap();
        for a in 0..=1 {
            for c in 0..=1 {
                prop_assert_eq!(t.get(a, c).unwrap().clone(), Float::with_val(p.bits(), u32::from(a == c)));
                prop_assert!(t.d_get(a, c).unwrap().is_zero());
            }
        }
    }
}
