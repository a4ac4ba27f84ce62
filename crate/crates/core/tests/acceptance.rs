mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fracsusy::dualside::{
    verify_dual_hopf, verify_pairing_well_defined, DualHopfRules, DualKind, LambdaAlgebra, Pairing, SplitOrder,
};
use fracsusy::freealg::random_poly;
use fracsusy::gradesolve::{
    build_constraints, solve_structure_constants, unknowns_for, verify_identity_j1, verify_identity_j2,
    verify_identity_j3, Convention, GradedAlgebraSpec, Pin, SolutionReport, SolveOptions, Subsystem, Unknown,
};
use fracsusy::hopfcheck::{verify_coproduct_on_invariant_form, verify_hopf, HopfRulesU};
use fracsusy::liealg::{builtin_rep, builtin_sl2, RepName};
use fracsusy::realize::verify_realization;
use fracsusy::{CyclotomicConfig, Gen, NcPoly, Scalar, TensorPoly, Word};

type Outcome = Result<String, String>;

fn cfg(n: u32) -> Arc<CyclotomicConfig> {
    CyclotomicConfig::get(n).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn solve(rep: RepName, n: u32, subsystem: Subsystem, pin: Option<&str>) -> SolutionReport {
    let c = cfg(n);
    let opts = SolveOptions {
        subsystem,
        convention: Convention::Cyclic,
        pin: pin.map(|p| Pin::parse(&c, p).unwrap()),
    };
    solve_structure_constants(&builtin_sl2(&c), &builtin_rep(&c, rep), n as usize, &opts)
        .unwrap()
        .1
}

fn value(report: &SolutionReport, label: &str) -> Scalar {
    let u = Unknown::parse(label).unwrap();
    let c = report
        .normalized
        .as_ref()
        .and_then(|v| v.iter().find(|(k, _)| *k == u))
        .map(|(_, x)| x.clone());
    c.unwrap_or_else(|| Scalar::zero(&cfg(3)))
}

fn unknown_counts() -> Outcome {
    let counts: Vec<usize> = (1..=3).map(|size| unknowns_for(3, size, 3).len()).collect();
    ensure(counts == [3, 12, 30], || format!("counts {counts:?}"))?;
    Ok(format!("{counts:?}"))
}

fn spinor_staged_solve() -> Outcome {
    let staged = solve(RepName::Spinor, 3, Subsystem::GradedJacobiOnly, None);
    ensure(staged.rows == 10 && staged.rank == 10 && staged.dimension == 2, || {
        format!("rows {} rank {} dimension {}", staged.rows, staged.rank, staged.dimension)
    })?;
    let c = cfg(3);
    let expected: Vec<Vec<(Unknown, Scalar)>> = [
        [("b1_122", 1i64), ("b2_111", -3), ("b3_112", 1)],
        [("b1_222", 3), ("b2_112", -1), ("b3_122", 1)],
    ]
    .iter()
    .map(|v| v.iter().map(|&(l, x)| (Unknown::parse(l).unwrap(), Scalar::from_integer(&c, x))).collect())
    .collect();
    ensure(staged.basis == expected, || format!("basis {:?}", staged.basis))?;
    let full = solve(RepName::Spinor, 3, Subsystem::Full, None);
    ensure(full.dimension == 0, || format!("full dimension {}", full.dimension))?;
    Ok("graded-Jacobi rows 10, rank 10, dimension 2 with both chains; full dimension 0".into())
}

fn vector_solution() -> Outcome {
    let rep = solve(RepName::Vector, 3, Subsystem::Full, Some("b3_222=6"));
    ensure(rep.dimension == 1, || format!("dimension {}", rep.dimension))?;
    let c = cfg(3);
    let r2 = Scalar::sqrt2(&c);
    let int = |v| Scalar::from_integer(&c, v);
    for (label, want) in [
        ("b1_113", &int(-4) * &r2),
        ("b1_122", &int(2) * &r2),
        ("b3_123", int(-2)),
        ("b2_223", &int(-2) * &r2),
    ] {
        let got = value(&rep, label);
        ensure(got == want, || format!("{label} = {got}, expected {want}"))?;
    }
    let b2_133 = value(&rep, "b2_133");
    let four_r2 = &int(4) * &r2;
    ensure(b2_133 == four_r2 || b2_133 == -four_r2.clone(), || format!("b2_133 = {b2_133}"))?;
    let flagged = if b2_133 == four_r2 {
        "sign of {Q1,Q3,Q3} = -4*r2*X2 flagged"
    } else {
        "sign of b1_113 = -b2_133 flagged"
    };
    Ok(format!("b2_133 = {b2_133}; {flagged}"))
}

fn spinor_plus_scalar_and_scalars() -> Outcome {
    let rep = solve(RepName::SpinorPlusScalar, 3, Subsystem::Full, Some("b1_223=1"));
    let nonzero = rep.normalized.as_ref().map_or(0, |v| v.len());
    ensure(rep.dimension == 1 && nonzero == 3, || format!("dimension {}, {nonzero} slots", rep.dimension))?;
    let solver_slot = if !value(&rep, "b2_113").is_zero() { "b2_113" } else { "b2_111" };
    let real = verify_realization(8).map_err(|e| e.to_string())?;
    let matched = real.matched("cubic_bracket");
    ensure(matched == [solver_slot], || format!("solver {solver_slot}, realization {matched:?}"))?;
    for size in 1..=3 {
        let r = solve(RepName::Scalar(size), 3, Subsystem::Full, None);
        ensure(r.dimension == 0, || format!("scalar({size}) dimension {}", r.dimension))?;
    }
    Ok(format!("three slots, realization matches {solver_slot}; scalar reps N=1,2,3 dimension 0"))
}

fn jacobi_identities() -> Outcome {
    let c = cfg(3);
    let letters = [Gen::X(1), Gen::X(2), Gen::X(3), Gen::Q(1), Gen::Q(2), Gen::Q(3), Gen::K];
    let seed = common::seed();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..100 {
        let p: Vec<NcPoly> = (0..4).map(|_| random_poly(&mut rng, &c, &letters, 1 + i % 3, 2)).collect();
        ensure(verify_identity_j1(&p[0], &p[1], &p[2]).unwrap().is_zero(), || format!("j1 sample {i}"))?;
        ensure(verify_identity_j2(&p[0], &p[1], &p[2], &p[3]).unwrap().is_zero(), || format!("j2 sample {i}"))?;
        ensure(verify_identity_j3(&p[0], &p[1], &p[2], &p[3]).unwrap().is_zero(), || format!("j3 sample {i}"))?;
    }
    Ok(format!("300 residuals zero, seed {seed}"))
}

fn hopf_consistency() -> Outcome {
    let mut triples = 0;
    let mut checks = 0;
    for (rep, pin) in [
        (RepName::Scalar(1), None),
        (RepName::Scalar(2), None),
        (RepName::Scalar(3), None),
        (RepName::Spinor, None),
        (RepName::Vector, Some("b3_222=6")),
        (RepName::SpinorPlusScalar, Some("b1_223=1")),
    ] {
        let c = cfg(3);
        let sol = solve(rep, 3, Subsystem::Full, pin);
        let spec = GradedAlgebraSpec::new(builtin_sl2(&c), builtin_rep(&c, rep), 3)
            .with_b(sol.normalized.clone().unwrap_or_default());
        let rules = HopfRulesU::new(&c);
        for alpha in (0..rep.size()).combinations_with_replacement(3) {
            let chk = verify_coproduct_on_invariant_form(&rules, &spec, &alpha).unwrap();
            ensure(chk.pass(), || format!("{rep} {alpha:?}: {}", chk.residual))?;
            triples += 1;
        }
        let report = verify_hopf(&spec).unwrap();
        ensure(report.pass, || format!("{rep} Hopf checks"))?;
        checks += report.checks.len();
    }
    // two-graded degeneration: super Hopf structure with K² = 1
    let c2 = cfg(2);
    let sol = solve(RepName::Spinor, 2, Subsystem::Full, None);
    let spec = GradedAlgebraSpec::new(builtin_sl2(&c2), builtin_rep(&c2, RepName::Spinor), 2)
        .with_b(sol.normalized.unwrap_or_default());
    ensure(verify_hopf(&spec).unwrap().pass, || "n=2 Hopf checks".into())?;
    let rules = HopfRulesU::new(&c2);
    let q = NcPoly::gen(&c2, Gen::Q(1));
    let k = NcPoly::gen(&c2, Gen::K);
    let one = NcPoly::one(&c2);
    let dq = TensorPoly::product_of(&[&q, &one]).unwrap().try_add(&TensorPoly::product_of(&[&k, &q]).unwrap()).unwrap();
    ensure(rules.coproduct(&q).unwrap() == dq, || "n=2 coproduct of Q".into())?;
    ensure(
        rules.antipode(&q).unwrap() == NcPoly::word(&c2, Word::parse("Q1 K").unwrap()),
        || "n=2 antipode of Q".into(),
    )?;
    for size in [1, 2] {
        let dual = DualHopfRules::new(DualKind::Translation, &c2, size).unwrap();
        ensure(verify_dual_hopf(&dual).unwrap().pass, || format!("super translation dual N={size}"))?;
    }
    Ok(format!("{triples} index triples cancel, {checks} generator/relation checks zero, n=2 super structure"))
}

fn dual_side() -> Outcome {
    let c = cfg(3);
    let lam = LambdaAlgebra::new(&c, 1);
    let dim = lam.basis(6).unwrap().len();
    ensure(dim == 9, || format!("Λ basis dimension {dim}"))?;
    let single = DualHopfRules::new(DualKind::SingleGenerator, &c, 1).unwrap();
    let hopf = verify_dual_hopf(&single).unwrap();
    ensure(hopf.pass, || {
        format!("{:?}", hopf.checks.iter().filter(|c| !c.pass).map(|c| &c.name).collect::<Vec<_>>())
    })?;
    let mut pairings = 0;
    for (kind, n, size) in [
        (DualKind::SingleGenerator, 3, 1),
        (DualKind::Translation, 2, 1),
        (DualKind::Sl2Spinor, 3, 2),
    ] {
        let rules = DualHopfRules::new(kind, &cfg(n), size).unwrap();
        let rep = verify_pairing_well_defined(&rules, 4).unwrap();
        ensure(rep.pass, || format!("{kind}: {} nonzero pairings", rep.failures.len()))?;
        pairings += rep.pairings_evaluated;
    }
    let pairing = Pairing::new(&single, SplitOrder::DualFirst);
    let l3 = NcPoly::word(&c, Word::parse("la la la").unwrap());
    let v = pairing.pair(&l3, &NcPoly::gen(&c, Gen::K)).unwrap();
    ensure(v.is_one(), || format!("<la^3, K> = {v}"))?;
    Ok(format!("dimension 9, Δz axioms exact, {pairings} pairings zero up to length 4, <la^3,K> = 1"))
}

fn realization() -> Outcome {
    let rep = verify_realization(8).map_err(|e| e.to_string())?;
    for c in &rep.checks {
        let required = matches!(
            c.name.as_str(),
            "lie_bracket" | "graded_action" | "grading_eigenvalues" | "theta_derivative_identity" | "grading_order"
        );
        ensure(!required || c.pass, || format!("{} {} = {}", c.name, c.lhs, c.rhs))?;
    }
    let cubic = rep.matched("cubic_bracket");
    ensure(!cubic.is_empty(), || "no cubic-bracket variant holds".into())?;
    let twist = rep.matched("grading_twist");
    ensure(rep.pass, || "realization report".into())?;
    Ok(format!("window z-degree <= 5; cubic variant {}; twist variant {}", cubic.join(","), twist.join(",")))
}

fn numeric_rank_guard() -> Outcome {
    let mut systems = 0;
    for (rep, n) in [
        (RepName::Scalar(1), 3),
        (RepName::Scalar(2), 3),
        (RepName::Scalar(3), 3),
        (RepName::Spinor, 3),
        (RepName::Vector, 3),
        (RepName::SpinorPlusScalar, 3),
        (RepName::Spinor, 2),
    ] {
        for subsystem in [Subsystem::Full, Subsystem::GradedJacobiOnly] {
            let c = cfg(n);
            let sys =
                build_constraints(&builtin_sl2(&c), &builtin_rep(&c, rep), n as usize, Convention::Cyclic, subsystem)
                    .unwrap();
            let numeric = common::numeric_rank(&sys.rows, sys.num_unknowns());
            ensure(sys.rank() == numeric, || format!("{rep} n={n}: exact {} numeric {numeric}", sys.rank()))?;
            systems += 1;
        }
    }
    Ok(format!("{systems} systems agree"))
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 9] = [
        ("b-unknown count N(N+1)(N+2)/2 for sl2 at n=3", "exact", unknown_counts),
        ("sl2/spinor/N=2 staged solve", "exact", spinor_staged_solve),
        ("sl2/vector/N=3 pinned solution", "exact", vector_solution),
        ("sl2/spinor_plus_scalar/N=3 family and scalar reps", "exact", spinor_plus_scalar_and_scalars),
        ("generalized Jacobi identities on 100 seeded inputs", "exact", jacobi_identities),
        ("Hopf consistency of the enveloping side", "exact", hopf_consistency),
        ("dual side and pairing", "exact", dual_side),
        ("differential-operator realization at M=8", "exact", realization),
        ("exact rank equals numeric rank", "sigma > 1e-8 * sigma_max", numeric_rank_guard),
    ];
    let start = Instant::now();
    let mut failed = Vec::new();
    for (i, (name, tol, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}. {name} [{tol}] ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                println!("FAIL {}. {name} [{tol}] ({secs:.2}s): {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    println!("total {:.2}s", start.elapsed().as_secs_f64());
    assert!(failed.is_empty(), "failed criteria {failed:?}");
}
