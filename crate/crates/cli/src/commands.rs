use std::sync::Arc;

use itertools::Itertools;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use fracsusy::dualside::{verify_dual_hopf, verify_pairing_well_defined, DualHopfRules, DualKind};
use fracsusy::freealg::random_poly;
use fracsusy::gradesolve::{
    solve_structure_constants, verify_identity_j1, verify_identity_j2, verify_identity_j3, Convention,
    GradedAlgebraSpec, Pin, SolutionReport, SolveOptions, Subsystem, Unknown,
};
use fracsusy::hopfcheck::{enveloping_relations, verify_hopf as hopf_checks, HopfReport};
use fracsusy::liealg::{builtin_rep, builtin_sl2, parse_spec, LieAlgebraData, RepName, RepresentationData};
use fracsusy::realize::{verify_realization as realization_checks, RealizationReport};
use fracsusy::{CyclotomicConfig, Gen, NcPoly, Scalar};

use crate::{Options, UsageError};

/// Result of one command before formatting.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub input: Value,
    pub result: Value,
    /// Human-readable lines for the text format.
    pub summary: Vec<String>,
}

struct Input {
    g: LieAlgebraData,
    r: RepresentationData,
    n: u32,
    rep: Option<RepName>,
    dual: Option<DualKind>,
    label: String,
}

impl Input {
    fn config(&self) -> &Arc<CyclotomicConfig> {
        self.g.config()
    }

    fn describe(&self) -> Value {
        json!({
            "algebra": self.label,
            "lie_dim": self.g.dim(),
            "N": self.r.size(),
            "n": self.n,
        })
    }
}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(vec![msg.into()])
}

fn resolve(opts: &Options) -> Result<Input, UsageError> {
    if let Some(path) = &opts.spec {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let parsed = parse_spec(&text).map_err(|ds| {
            UsageError(ds.iter().map(|d| format!("{}: {d}", path.display())).collect())
        })?;
        if let Some(n) = opts.n {
            if n != parsed.n {
                return Err(usage(format!("--n {n} conflicts with n = {} in {}", parsed.n, path.display())));
            }
        }
        let label = match parsed.builtin {
            Some(rep) => format!("sl2/{rep}"),
            None => path.display().to_string(),
        };
        return Ok(Input {
            n: parsed.n,
            rep: parsed.builtin,
            dual: parsed.dual,
            label,
            g: parsed.g,
            r: parsed.r,
        });
    }
    if opts.builtin != "sl2" {
        return Err(usage(format!("unknown built-in algebra '{}'; expected sl2", opts.builtin)));
    }
    let rep = if opts.rep == "scalar" {
        RepName::Scalar(opts.size.unwrap_or(1))
    } else {
        RepName::parse(&opts.rep)?
    };
    if let Some(size) = opts.size {
        if size != rep.size() {
            return Err(usage(format!("--N {size} does not match representation {rep} of size {}", rep.size())));
        }
    }
    let n = opts.n.unwrap_or(3);
    let cfg = CyclotomicConfig::get(n).map_err(fracsusy::Error::from)?;
    let dual = opts.dual.as_deref().map(DualKind::parse).transpose()?;
    Ok(Input {
        g: builtin_sl2(&cfg),
        r: builtin_rep(&cfg, rep),
        n,
        rep: Some(rep),
        dual,
        label: format!("sl2/{rep}"),
    })
}

fn parse_subsystem(s: &str) -> Result<Subsystem, UsageError> {
    match s {
        "full" => Ok(Subsystem::Full),
        "equivariance" => Ok(Subsystem::EquivarianceOnly),
        "graded_jacobi" | "graded-jacobi" => Ok(Subsystem::GradedJacobiOnly),
        other => Err(usage(format!("unknown subsystem '{other}'"))),
    }
}

fn default_pin(rep: Option<RepName>, n: u32) -> Option<&'static str> {
    match (rep, n) {
        (Some(RepName::Vector), 3) => Some("b3_222=6"),
        (Some(RepName::SpinorPlusScalar), 3) => Some("b1_223=1"),
        _ => None,
    }
}

fn solve_options(input: &Input, opts: &Options) -> Result<SolveOptions, UsageError> {
    let cfg = input.config();
    let pin = match (&opts.pin, default_pin(input.rep, input.n)) {
        (Some(p), _) => Some(Pin::parse(cfg, p)?),
        (None, Some(p)) => Some(Pin::parse(cfg, p)?),
        (None, None) => None,
    };
    Ok(SolveOptions {
        convention: Convention::parse(&opts.convention)?,
        subsystem: parse_subsystem(&opts.subsystem)?,
        pin,
    })
}

fn labeled(v: &[(Unknown, Scalar)]) -> String {
    if v.is_empty() {
        return "0".into();
    }
    v.iter().map(|(u, x)| format!("{u} = {x}")).join(", ")
}

fn solution_lines(report: &SolutionReport) -> Vec<String> {
    let mut out = vec![format!(
        "unknowns {}, rows {}, rank {}, dimension {} ({} convention)",
        report.unknowns, report.rows, report.rank, report.dimension, report.convention
    )];
    for (i, v) in report.basis.iter().enumerate() {
        out.push(format!("basis[{i}]: {}", labeled(v)));
    }
    if let Some(v) = &report.normalized {
        out.push(format!("normalized: {}", labeled(v)));
    }
    if let Some(e) = &report.normalization_error {
        out.push(format!("normalization error: {e}"));
    }
    out
}

/// Notes on coefficient patterns that are quoted in two incompatible ways
/// for the built-in representations.
fn adjudications(rep: Option<RepName>, report: &SolutionReport) -> Vec<Value> {
    let Some(sol) = &report.normalized else {
        return vec![];
    };
    let get = |label: &str| {
        let u = Unknown::parse(label).expect("valid label");
        sol.iter().find(|(k, _)| *k == u).map(|(_, v)| v.clone())
    };
    let mut out = Vec::new();
    match rep {
        Some(RepName::Vector) => {
            if let (Some(b1_113), Some(b2_133)) = (get("b1_113"), get("b2_133")) {
                let chain = b1_113 == -b2_133.clone();
                let sign = if b2_133.to_complex().re > 0.0 { "+" } else { "-" };
                out.push(json!({
                    "question": "sign of b2_133",
                    "b2_133": b2_133,
                    "sign": sign,
                    "consistent_with_chain_b1_113=-b2_133": chain,
                    "bracket_{Q1,Q3,Q3}": format!("({b2_133})*X2"),
                    "flagged": if sign == "+" {
                        "{Q1,Q3,Q3} = -4*r2*X2 has the wrong sign"
                    } else {
                        "b1_113 = -b2_133 has the wrong sign"
                    },
                }));
            }
        }
        Some(RepName::SpinorPlusScalar) => {
            let b2_113 = get("b2_113");
            let b2_111 = get("b2_111");
            out.push(json!({
                "question": "index of the b2 slot",
                "b2_113": b2_113,
                "b2_111": b2_111,
                "solver_slot": if b2_113.is_some() { "b2_113" } else if b2_111.is_some() { "b2_111" } else { "none" },
                "flagged": if b2_113.is_some() { "b1_223 = -b2_111 = 2 b3_123 names the wrong slot" } else { "{Q1,Q1,Q3} = -X2 names the wrong slot" },
            }));
        }
        _ => {}
    }
    out
}

pub fn solve(opts: &Options) -> Result<Outcome, UsageError> {
    let input = resolve(opts)?;
    let sopts = solve_options(&input, opts)?;
    let (_, report) = solve_structure_constants(&input.g, &input.r, input.n as usize, &sopts)?;
    let adj = adjudications(input.rep, &report);
    let mut summary = vec![format!("{} n={}", input.label, input.n)];
    summary.extend(solution_lines(&report));
    for a in &adj {
        summary.push(format!("note: {}", a["flagged"].as_str().unwrap_or_default()));
    }
    let pass = report.residual_check && report.normalization_error.is_none();
    let mut inp = input.describe();
    inp["pin"] = json!(sopts.pin.as_ref().map(|p| format!("{}={}", p.unknown, p.value)));
    Ok(Outcome {
        pass,
        input: inp,
        result: json!({ "solution": report, "adjudications": adj }),
        summary,
    })
}

fn identity_letters(input: &Input) -> Vec<Gen> {
    let mut letters: Vec<Gen> = (1..=input.g.dim() as u16).map(Gen::X).collect();
    letters.extend((1..=input.r.size() as u16).map(Gen::Q));
    letters.push(Gen::K);
    letters
}

pub fn verify_identities(opts: &Options) -> Result<Outcome, UsageError> {
    let input = resolve(opts)?;
    let cfg = input.config().clone();
    let letters = identity_letters(&input);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut results = Vec::new();
    let mut summary = vec![format!("seed {}, {} samples per identity", opts.seed, opts.samples)];
    for (name, arity) in [("j1", 3usize), ("j2", 4), ("j3", 4)] {
        let mut failures = Vec::new();
        for i in 0..opts.samples {
            let args: Vec<NcPoly> = (0..arity)
                .map(|_| random_poly(&mut rng, &cfg, &letters, 1 + i % 3, 2))
                .collect();
            let r = match name {
                "j1" => verify_identity_j1(&args[0], &args[1], &args[2]),
                "j2" => verify_identity_j2(&args[0], &args[1], &args[2], &args[3]),
                _ => verify_identity_j3(&args[0], &args[1], &args[2], &args[3]),
            }?;
            if !r.is_zero() {
                failures.push(json!({ "sample": i, "residual": r.to_string() }));
            }
        }
        summary.push(format!("{name}: {} of {} residuals zero", opts.samples - failures.len(), opts.samples));
        results.push(json!({ "identity": name, "checked": opts.samples, "failures": failures }));
    }
    let pass = results.iter().all(|r| r["failures"].as_array().is_some_and(|f| f.is_empty()));
    let mut inp = input.describe();
    inp["seed"] = json!(opts.seed);
    inp["samples"] = json!(opts.samples);
    Ok(Outcome {
        pass,
        input: inp,
        result: json!({ "identities": results }),
        summary,
    })
}

fn hopf_lines(report: &HopfReport) -> Vec<String> {
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    let mut out = vec![format!("{} of {} Hopf checks pass", report.checks.len() - failed.len(), report.checks.len())];
    out.extend(failed.iter().map(|f| format!("FAIL {f}")));
    out
}

fn graded_spec(input: &Input, report: &SolutionReport) -> GradedAlgebraSpec {
    let spec = GradedAlgebraSpec::new(input.g.clone(), input.r.clone(), input.n as usize);
    match &report.normalized {
        Some(b) => spec.with_b(b.clone()),
        None => spec,
    }
}

pub fn verify_hopf(opts: &Options) -> Result<Outcome, UsageError> {
    let input = resolve(opts)?;
    let sopts = solve_options(&input, opts)?;
    let (_, sol) = solve_structure_constants(&input.g, &input.r, input.n as usize, &sopts)?;
    let spec = graded_spec(&input, &sol);
    let report = hopf_checks(&spec)?;
    let b: Vec<(Unknown, Scalar)> = spec.nonzero_b().map(|(u, v)| (u.clone(), v.clone())).collect();
    let mut summary = vec![format!("{} n={}; b: {}", input.label, input.n, labeled(&b))];
    summary.extend(hopf_lines(&report));
    Ok(Outcome {
        pass: report.pass,
        input: input.describe(),
        result: json!({ "b": b, "hopf": report }),
        summary,
    })
}

fn dual_run(kind: DualKind, n: u32, size: usize, cap: usize) -> Result<(bool, Value, Vec<String>), UsageError> {
    let cfg = CyclotomicConfig::get(n).map_err(fracsusy::Error::from)?;
    let rules = DualHopfRules::new(kind, &cfg, size)?;
    let hopf = verify_dual_hopf(&rules)?;
    let pairing = verify_pairing_well_defined(&rules, cap)?;
    let basis = rules.algebra().basis(n as usize - 1)?;
    let mut summary = vec![format!("{kind} n={n} N={size}")];
    summary.extend(hopf_lines(&hopf));
    summary.push(format!(
        "pairing: {} relation-word pairings up to length {cap}, {} nonzero",
        pairing.pairings_evaluated,
        pairing.failures.len()
    ));
    let pass = hopf.pass && pairing.pass;
    let result = json!({
        "dual": kind,
        "n": n,
        "N": size,
        "lambda_basis_theta_degree_below_n": basis.len(),
        "hopf": hopf,
        "pairing": pairing,
    });
    Ok((pass, result, summary))
}

pub fn verify_dual(opts: &Options) -> Result<Outcome, UsageError> {
    let kind = match (&opts.dual, &opts.spec) {
        (Some(d), _) => DualKind::parse(d)?,
        (None, Some(_)) => resolve(opts)?
            .dual
            .ok_or_else(|| usage("no dual given: pass --dual or set dual in [grading]"))?,
        (None, None) => return Err(usage("no dual given: pass --dual translation|single_generator|sl2_spinor")),
    };
    let n = opts.n.unwrap_or(if kind == DualKind::Translation { 2 } else { 3 });
    let size = opts.size.unwrap_or(if kind == DualKind::Sl2Spinor { 2 } else { 1 });
    if opts.cap == 0 {
        return Err(usage("--cap must be positive"));
    }
    let (pass, result, summary) = dual_run(kind, n, size, opts.cap)?;
    Ok(Outcome {
        pass,
        input: json!({ "dual": kind, "n": n, "N": size, "cap": opts.cap }),
        result,
        summary,
    })
}

fn realization_lines(report: &RealizationReport) -> Vec<String> {
    let mut out = vec![format!("realization on z^m th^k, m <= {}", report.m)];
    for c in &report.checks {
        let status = match (&c.variant_matched, c.pass) {
            (Some(v), _) => format!("pass [{v}]"),
            (None, true) => "pass".into(),
            (None, false) => "fail".into(),
        };
        out.push(format!("{:<26} {} = {}  {status}", c.name, c.lhs, c.rhs));
    }
    for v in &report.variants {
        out.push(format!(
            "{}: candidates {}, matched {}",
            v.relation,
            v.candidates.join(" | "),
            if v.matched.is_empty() { "none".into() } else { v.matched.join(", ") }
        ));
    }
    out
}

pub fn verify_realization(opts: &Options) -> Result<Outcome, UsageError> {
    let report = realization_checks(opts.m)?;
    Ok(Outcome {
        pass: report.pass,
        input: json!({ "M": opts.m }),
        summary: realization_lines(&report),
        result: serde_json::to_value(&report).expect("report serializes"),
    })
}

struct Case {
    label: &'static str,
    rep: RepName,
    n: u32,
    pin: Option<&'static str>,
    expected_dimension: usize,
    staged_dimension: Option<usize>,
}

const CASES: [Case; 7] = [
    Case { label: "sl2/scalar/N=1", rep: RepName::Scalar(1), n: 3, pin: None, expected_dimension: 0, staged_dimension: None },
    Case { label: "sl2/scalar/N=2", rep: RepName::Scalar(2), n: 3, pin: None, expected_dimension: 0, staged_dimension: None },
    Case { label: "sl2/spinor/N=2", rep: RepName::Spinor, n: 3, pin: None, expected_dimension: 0, staged_dimension: Some(2) },
    Case { label: "sl2/scalar/N=3", rep: RepName::Scalar(3), n: 3, pin: None, expected_dimension: 0, staged_dimension: None },
    Case { label: "sl2/vector/N=3", rep: RepName::Vector, n: 3, pin: Some("b3_222=6"), expected_dimension: 1, staged_dimension: None },
    Case { label: "sl2/spinor_plus_scalar/N=3", rep: RepName::SpinorPlusScalar, n: 3, pin: Some("b1_223=1"), expected_dimension: 1, staged_dimension: None },
    Case { label: "sl2/spinor/N=2/n=2", rep: RepName::Spinor, n: 2, pin: None, expected_dimension: 1, staged_dimension: None },
];

fn relation_strings(spec: &GradedAlgebraSpec) -> Vec<String> {
    let mut out: Vec<String> = enveloping_relations(spec)
        .into_iter()
        .map(|(name, idx, rel)| format!("{name}{idx:?}: {rel} = 0"))
        .collect();
    for alpha in (0..spec.r.size()).combinations_with_replacement(spec.n) {
        let qs = alpha.iter().map(|a| format!("Q{}", a + 1)).join(",");
        out.push(format!("{{{qs}}} = {}", spec.invariant_form_image(&alpha)));
    }
    out
}

fn run_case(case: &Case) -> Result<(Vec<String>, Value, Vec<String>), UsageError> {
    let cfg = CyclotomicConfig::get(case.n).map_err(fracsusy::Error::from)?;
    let input = Input {
        g: builtin_sl2(&cfg),
        r: builtin_rep(&cfg, case.rep),
        n: case.n,
        rep: Some(case.rep),
        dual: None,
        label: case.label.into(),
    };
    let opts = SolveOptions {
        pin: case.pin.map(|p| Pin::parse(&cfg, p)).transpose()?,
        ..Default::default()
    };
    let (_, sol) = solve_structure_constants(&input.g, &input.r, case.n as usize, &opts)?;
    let mut failures = Vec::new();
    if sol.dimension != case.expected_dimension {
        failures.push(format!("{}: dimension {} (expected {})", case.label, sol.dimension, case.expected_dimension));
    }
    if !sol.residual_check {
        failures.push(format!("{}: a solution vector violates a row", case.label));
    }
    let staged = match case.staged_dimension {
        Some(expected) => {
            let sopts = SolveOptions {
                subsystem: Subsystem::GradedJacobiOnly,
                ..Default::default()
            };
            let (_, st) = solve_structure_constants(&input.g, &input.r, case.n as usize, &sopts)?;
            if st.dimension != expected {
                failures.push(format!("{}: graded-Jacobi-only dimension {} (expected {expected})", case.label, st.dimension));
            }
            Some(st)
        }
        None => None,
    };
    let spec = graded_spec(&input, &sol);
    let hopf = hopf_checks(&spec)?;
    failures.extend(hopf.checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", case.label, c.name)));
    let mut summary = vec![format!("{} n={}", case.label, case.n)];
    if let Some(st) = &staged {
        summary.push(format!("graded-Jacobi rows only: rank {} of {}, dimension {}", st.rank, st.unknowns, st.dimension));
    }
    summary.extend(solution_lines(&sol));
    let adj = adjudications(Some(case.rep), &sol);
    for a in &adj {
        summary.push(format!("note: {}", a["flagged"].as_str().unwrap_or_default()));
    }
    summary.extend(hopf_lines(&hopf).into_iter().take(1));
    let row = json!({
        "label": case.label,
        "rep": case.rep.to_string(),
        "n": case.n,
        "N": case.rep.size(),
        "solution": sol,
        "graded_jacobi_only": staged,
        "adjudications": adj,
        "relations": relation_strings(&spec),
        "hopf": { "pass": hopf.pass, "checks": hopf.checks.len() },
        "pass": failures.is_empty(),
    });
    Ok((failures, row, summary))
}

const DUALS: [(DualKind, u32, usize, usize); 5] = [
    (DualKind::Translation, 2, 1, 4),
    (DualKind::Translation, 2, 2, 3),
    (DualKind::SingleGenerator, 2, 1, 4),
    (DualKind::SingleGenerator, 3, 1, 4),
    (DualKind::Sl2Spinor, 3, 2, 4),
];

type Section = Result<(Vec<String>, Value, Vec<String>), UsageError>;

/// Every built-in case, the duals and the realization, run concurrently and
/// assembled in a fixed order.
pub fn report_all() -> Result<Outcome, UsageError> {
    let (cases, duals, real) = std::thread::scope(|s| {
        let cases: Vec<_> = CASES.iter().map(|c| s.spawn(move || run_case(c))).collect();
        let duals: Vec<_> = DUALS
            .iter()
            .map(|&(k, n, size, cap)| {
                s.spawn(move || -> Section {
                    let (pass, v, summary) = dual_run(k, n, size, cap)?;
                    let failures = if pass { vec![] } else { vec![format!("{k} n={n} N={size}")] };
                    Ok((failures, v, summary))
                })
            })
            .collect();
        let real = s.spawn(|| -> Section {
            let r = realization_checks(8)?;
            let failures = if r.pass { vec![] } else { vec!["realization M=8".to_string()] };
            Ok((failures, serde_json::to_value(&r).expect("report serializes"), realization_lines(&r)))
        });
        let join = |h: std::thread::ScopedJoinHandle<'_, Section>| h.join().expect("worker panicked");
        (
            cases.into_iter().map(join).collect::<Vec<_>>(),
            duals.into_iter().map(join).collect::<Vec<_>>(),
            join(real),
        )
    });
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    let mut collect = |sections: Vec<Section>| -> Result<Vec<Value>, UsageError> {
        let mut rows = Vec::new();
        for s in sections {
            let (f, v, lines) = s?;
            failures.extend(f);
            summary.extend(lines);
            summary.push(String::new());
            rows.push(v);
        }
        Ok(rows)
    };
    let case_rows = collect(cases)?;
    let dual_rows = collect(duals)?;
    let real_row = collect(vec![real])?.pop().expect("one realization");
    summary.extend(failures.iter().map(|f| format!("FAIL {f}")));
    Ok(Outcome {
        pass: failures.is_empty(),
        input: json!({}),
        result: json!({
            "cases": case_rows,
            "duals": dual_rows,
            "realization": real_row,
            "failures": failures,
        }),
        summary,
    })
}
