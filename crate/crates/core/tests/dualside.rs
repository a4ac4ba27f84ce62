use fracsusy::dualside::{
    dual_coassociativity, verify_dual_hopf, verify_pairing_well_defined, DualHopfRules, DualKind,
};
use fracsusy::{CyclotomicConfig, Gen, NcPoly};

fn report(kind: DualKind, n: u32, size: usize) {
    let c = CyclotomicConfig::get(n).unwrap();
    let rules = DualHopfRules::new(kind, &c, size).unwrap();
    let rep = verify_dual_hopf(&rules).unwrap();
    for ch in rep.checks.iter().filter(|c| !c.pass) {
        println!("{kind} n={n} N={size}: FAIL {} {:?}", ch.name, ch.residual);
    }
    assert!(rep.pass, "{kind}");
}

#[test]
fn translation_hopf_axioms() {
    report(DualKind::Translation, 2, 1);
    report(DualKind::Translation, 2, 2);
}

#[test]
fn single_generator_hopf_axioms() {
    report(DualKind::SingleGenerator, 2, 1);
    report(DualKind::SingleGenerator, 3, 1);
}

#[test]
fn sl2_spinor_hopf_axioms() {
    report(DualKind::Sl2Spinor, 3, 2);
}

#[test]
fn single_generator_z_not_coassociative_beyond_cubic() {
    let c = CyclotomicConfig::get(4).unwrap();
    let rules = DualHopfRules::new(DualKind::SingleGenerator, &c, 1).unwrap();
    let r = dual_coassociativity(&rules, &NcPoly::gen(&c, Gen::Z(1))).unwrap();
    assert!(!r.is_zero());
}

fn pairing(kind: DualKind, n: u32, size: usize, len: usize) {
    let c = CyclotomicConfig::get(n).unwrap();
    let rules = DualHopfRules::new(kind, &c, size).unwrap();
    let t = std::time::Instant::now();
    let rep = verify_pairing_well_defined(&rules, len).unwrap();
    println!("{kind}: {} pairings in {:?}", rep.pairings_evaluated, t.elapsed());
    for f in rep.failures.iter().take(10) {
        println!("  {} {:?} vs {} = {}", f.relation, f.indices, f.word, f.value);
    }
    assert!(rep.pass, "{kind}: {} failures", rep.failures.len());
}

#[test]
fn pairing_well_defined_translation() {
    pairing(DualKind::Translation, 2, 1, 4);
    pairing(DualKind::Translation, 2, 2, 3);
}

#[test]
fn pairing_well_defined_single_generator() {
    pairing(DualKind::SingleGenerator, 3, 1, 4);
}

#[test]
fn pairing_well_defined_sl2_spinor() {
    pairing(DualKind::Sl2Spinor, 3, 2, 4);
}

mod pairing_values {
    use fracsusy::dualside::{words_up_to, DualHopfRules, DualKind, Pairing, SplitOrder};
    use fracsusy::{CyclotomicConfig, Gen, NcPoly, Scalar, Word};
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn twist_relation_cancels_only_with_q() {
        let c = CyclotomicConfig::get(3).unwrap();
        let rules = DualHopfRules::new(DualKind::SingleGenerator, &c, 1).unwrap();
        let p = Pairing::new(&rules, SplitOrder::DualFirst);
        let qk = NcPoly::word(&c, w("Q1 K"));
        let lt = NcPoly::word(&c, w("la th1"));
        let tl = NcPoly::word(&c, w("th1 la"));
        let good = &lt - &tl.scale(&Scalar::q_pow(&c, 1));
        assert!(p.pair(&good, &qk).unwrap().is_zero());
        assert!(!p.pair(&(&lt - &tl), &qk).unwrap().is_zero());
    }

    #[test]
    fn theta_cube_against_q_cube() {
        let c = CyclotomicConfig::get(3).unwrap();
        let rules = DualHopfRules::new(DualKind::SingleGenerator, &c, 1).unwrap();
        let p = Pairing::new(&rules, SplitOrder::DualFirst);
        // ⟨θ³, Q³⟩ = (1)(1 + q)(1 + q + q²) = 0
        assert!(p.pair_words(&w("th1 th1 th1"), &w("Q1 Q1 Q1")).unwrap().is_zero());
        assert_eq!(
            p.pair_words(&w("th1 th1"), &w("Q1 Q1")).unwrap(),
            Scalar::parse(&c, "1 + q").unwrap()
        );
    }

    #[test]
    fn determinant_against_grouplike() {
        let c = CyclotomicConfig::get(3).unwrap();
        let rules = DualHopfRules::new(DualKind::Sl2Spinor, &c, 2).unwrap();
        let p = Pairing::new(&rules, SplitOrder::DualFirst);
        let det = NcPoly::from_terms(
            &c,
            [
                (w("x11 x22"), Scalar::one(&c)),
                (w("x12 x21"), -Scalar::one(&c)),
                (w("1"), -Scalar::one(&c)),
            ],
        );
        assert!(p.pair(&det, &NcPoly::gen(&c, Gen::K)).unwrap().is_zero());
        assert!(p.pair_words(&w("x11"), &w("X1 X2")).unwrap().is_one());
        assert!(p.pair_words(&w("x11"), &w("X2 X1")).unwrap().is_zero());
    }

    #[test]
    fn split_orders_agree() {
        for (kind, n, size) in [
            (DualKind::SingleGenerator, 3, 1),
            (DualKind::Translation, 2, 2),
            (DualKind::Sl2Spinor, 3, 2),
        ] {
            let c = CyclotomicConfig::get(n).unwrap();
            let rules = DualHopfRules::new(kind, &c, size).unwrap();
            let a = Pairing::new(&rules, SplitOrder::DualFirst);
            let b = Pairing::new(&rules, SplitOrder::EnvelopingFirst);
            let mut u_letters = vec![Gen::K, Gen::Q(1), Gen::X(1)];
            if kind == DualKind::Sl2Spinor {
                u_letters.extend([Gen::Q(2), Gen::X(2), Gen::X(3)]);
            }
            let d_words = words_up_to(&rules.letters(), 3);
            for phi in words_up_to(&u_letters, 3) {
                for x in &d_words {
                    assert_eq!(
                        a.pair_words(x, &phi).unwrap(),
                        b.pair_words(x, &phi).unwrap(),
                        "{kind}: <{x}, {phi}>"
                    );
                }
            }
        }
    }

    fn small_poly(letters: &[Gen], seed: u64, c: &std::sync::Arc<CyclotomicConfig>) -> NcPoly {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        fracsusy::freealg::random_poly(&mut rng, c, letters, 3, 3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn pairing_is_bilinear(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), k in -4i64..5) {
            let c = CyclotomicConfig::get(3).unwrap();
            let rules = DualHopfRules::new(DualKind::SingleGenerator, &c, 1).unwrap();
            let p = Pairing::new(&rules, SplitOrder::DualFirst);
            let d = rules.letters();
            let a = small_poly(&d, s1, &c);
            let b = small_poly(&d, s2, &c);
            let phi = small_poly(&[Gen::K, Gen::Q(1), Gen::X(1)], s3, &c);
            let lhs = p.pair(&(&a + &b), &phi).unwrap();
            let rhs = &p.pair(&a, &phi).unwrap() + &p.pair(&b, &phi).unwrap();
            prop_assert_eq!(lhs, rhs);
            let kk = Scalar::from_integer(&c, k);
            prop_assert_eq!(p.pair(&a.scale(&kk), &phi).unwrap(), &kk * &p.pair(&a, &phi).unwrap());
        }
    }
}
