use std::sync::Arc;

use proptest::prelude::*;

use fracsusy::realize::{build_realization, verify_realization, verify_sn_derivative_identity, FractionalDerivative, OperatorMatrix};
use fracsusy::scalar::q_integer;
use fracsusy::{CyclotomicConfig, Gen, NcPoly, Scalar, Word};

fn cfg3() -> Arc<CyclotomicConfig> {
    CyclotomicConfig::get(3).unwrap()
}

#[test]
fn symmetrized_derivative_products_vanish() {
    for (size, n, cap) in [(1, 3, 5), (2, 3, 5), (2, 2, 4), (1, 4, 6), (3, 3, 4)] {
        let rep = verify_sn_derivative_identity(size, n, cap).unwrap();
        assert!(rep.pass, "N={size} n={n}: {:?}", rep.failures);
        assert!(rep.words_checked > cap);
    }
}

#[test]
fn cubed_derivative_on_reduced_words() {
    let c = cfg3();
    let d = FractionalDerivative::new(&c, 1);
    let th2 = NcPoly::word(&c, Word::parse("th1 th1").unwrap());
    assert!(d.apply_chain(&[1, 1, 1], &th2).unwrap().is_zero());
    // D³θ³ = [3]_q [2]_q [1]_q = 0 at a primitive cube root
    let th3 = NcPoly::word(&c, Word::parse("th1 th1 th1").unwrap());
    assert!(d.apply_chain(&[1, 1, 1], &th3).unwrap().is_zero());
}

#[test]
fn derivative_matrix_uses_q_integers() {
    let r = build_realization(4).unwrap();
    let c = r.config().clone();
    for m in 0..=4 {
        for k in 1..3 {
            let img = r.d_theta.image(m, k);
            assert_eq!(img, vec![(r.basis.label(r.basis.index(m, k - 1)), q_integer(&c, k as u32))]);
        }
        assert!(r.d_theta.image(m, 0).is_empty());
    }
}

#[test]
fn grading_operator_and_theta_identity() {
    let r = build_realization(6).unwrap();
    let c = r.config().clone();
    assert_eq!(r.l.image(0, 1), vec![("th^1".to_string(), Scalar::one(&c))]);
    assert_eq!(r.l.image(2, 2), vec![("z^2 th^2".to_string(), Scalar::from_integer(&c, 2))]);
    let t2 = &r.theta_sq;
    let d = &r.d_theta;
    let lhs = t2.compose(d).compose(d).add(&d.compose(d).compose(t2)).add(&d.compose(t2).compose(d));
    assert_eq!(lhs, r.identity.scale(&-Scalar::q_pow(&c, 2)));
    assert_eq!(r.k.pow(3), r.identity);
}

#[test]
fn first_order_operators_on_monomials() {
    let r = build_realization(5).unwrap();
    let c = r.config().clone();
    // X₁ z θ = −z²θ − z²θ
    assert_eq!(r.x[0].image(1, 1), vec![("z^2 th^1".to_string(), Scalar::from_integer(&c, -2))]);
    // Q₃ z = (q/2)θ²
    let half_q = &Scalar::q_pow(&c, 1) * &Scalar::from_ratio(&c, 1, 2);
    assert_eq!(r.q[2].image(1, 0), vec![("th^2".to_string(), half_q)]);
    assert_eq!(r.operator(Gen::K).unwrap(), r.k);
}

#[test]
fn realization_report_at_m8() {
    let rep = verify_realization(8).unwrap();
    for c in rep.checks.iter().filter(|c| matches!(c.name.as_str(), "lie_bracket" | "graded_action")) {
        assert!(c.pass, "{} {} = {}", c.name, c.lhs, c.rhs);
        assert_eq!(c.window, Some(5));
    }
    assert_eq!(rep.checks.iter().filter(|c| c.name == "lie_bracket").count(), 3);
    assert_eq!(rep.checks.iter().filter(|c| c.name == "graded_action").count(), 9);
    for name in ["grading_eigenvalues", "theta_derivative_identity", "grading_order"] {
        assert!(rep.checks.iter().any(|c| c.name == name && c.pass), "{name}");
    }
    assert_eq!(rep.matched("cubic_bracket"), vec!["b2_113".to_string()]);
    assert_eq!(rep.matched("grading_twist"), vec!["K=q^-L".to_string()]);
    assert!(rep.pass);
}

#[test]
fn realization_needs_headroom() {
    assert!(build_realization(3).is_err());
    assert!(verify_realization(4).is_err());
    assert!(verify_realization(5).unwrap().pass);
}

fn pick(r: &fracsusy::realize::Realization, i: usize) -> OperatorMatrix {
    match i % 8 {
        0..=2 => r.x[i % 8].clone(),
        3..=5 => r.q[i % 8 - 3].clone(),
        6 => r.k.clone(),
        _ => r.l.clone(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn composition_is_associative_and_shifts_add(a in 0usize..8, b in 0usize..8, d in 0usize..8) {
        let r = build_realization(4).unwrap();
        let (x, y, z) = (pick(&r, a), pick(&r, b), pick(&r, d));
        let left = x.compose(&y).compose(&z);
        let right = x.compose(&y.compose(&z));
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(left.z_shift(), x.z_shift() + y.z_shift() + z.z_shift());
    }
}
