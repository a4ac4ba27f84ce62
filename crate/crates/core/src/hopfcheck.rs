//! Coproduct, counit and antipode on the enveloping side, and the
//! verification of the Hopf axioms and of relation compatibility.

use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freealg::{commutator, symmetrized_product, Gen, NcPoly, Side, TensorPoly, Word};
use crate::gradesolve::GradedAlgebraSpec;
use crate::scalar::{CyclotomicConfig, Scalar};

/// The generator rules
/// `Δ(X) = X⊗1 + 1⊗X`, `Δ(Q) = Q⊗1 + K⊗Q`, `Δ(K) = K⊗K`,
/// `ε(K) = 1`, `S(X) = −X`, `S(Q) = −K^{n−1}Q`, `S(K) = K^{n−1}`.
#[derive(Debug, Clone)]
pub struct HopfRulesU {
    cfg: Arc<CyclotomicConfig>,
}

fn check_side(g: Gen) -> Result<()> {
    if g.side() != Side::Enveloping {
        return Err(Error::ForeignGenerator(g));
    }
    Ok(())
}

impl HopfRulesU {
    pub fn new(cfg: &Arc<CyclotomicConfig>) -> Self {
        HopfRulesU { cfg: cfg.clone() }
    }

    pub fn config(&self) -> &Arc<CyclotomicConfig> {
        &self.cfg
    }

    fn n(&self) -> usize {
        self.cfg.n() as usize
    }

    fn k_pow(&self, e: usize) -> Word {
        Word(vec![Gen::K; e])
    }

    pub fn coproduct_gen(&self, g: Gen) -> Result<TensorPoly> {
        check_side(g)?;
        let one = Scalar::one(&self.cfg);
        let gw = Word::letter(g);
        let mut t = TensorPoly::zero(&self.cfg, 2);
        match g {
            Gen::K => t.add_term(vec![gw.clone(), gw], one),
            Gen::X(_) => {
                t.add_term(vec![gw.clone(), Word::empty()], one.clone());
                t.add_term(vec![Word::empty(), gw], one);
            }
            Gen::Q(_) => {
                t.add_term(vec![gw.clone(), Word::empty()], one.clone());
                t.add_term(vec![Word::letter(Gen::K), gw], one);
            }
            _ => unreachable!(),
        }
        Ok(t)
    }

    /// Multiplicative extension with no K reordering, so the output keeps the
    /// letter order of the plain expansion.
    pub fn coproduct_raw(&self, p: &NcPoly) -> Result<TensorPoly> {
        let mut out = TensorPoly::zero(&self.cfg, 2);
        for (w, c) in p.terms() {
            let mut acc = TensorPoly::one(&self.cfg, 2);
            for &g in w.letters() {
                acc = acc.try_mul(&self.coproduct_gen(g)?)?;
            }
            out = out.try_add(&acc.scale(c))?;
        }
        Ok(out)
    }

    pub fn coproduct(&self, p: &NcPoly) -> Result<TensorPoly> {
        Ok(self.coproduct_raw(p)?.normalize_grading())
    }

    pub fn counit_word(&self, w: &Word) -> Result<Scalar> {
        for &g in w.letters() {
            check_side(g)?;
            if g != Gen::K {
                return Ok(Scalar::zero(&self.cfg));
            }
        }
        Ok(Scalar::one(&self.cfg))
    }

    pub fn counit(&self, p: &NcPoly) -> Result<Scalar> {
        let mut acc = Scalar::zero(&self.cfg);
        for (w, c) in p.terms() {
            acc = &acc + &(c * &self.counit_word(w)?);
        }
        Ok(acc)
    }

    pub fn antipode_gen(&self, g: Gen) -> Result<NcPoly> {
        check_side(g)?;
        let n = self.n();
        Ok(match g {
            Gen::X(_) => -&NcPoly::gen(&self.cfg, g),
            Gen::K => NcPoly::word(&self.cfg, self.k_pow(n - 1)),
            Gen::Q(_) => {
                let mut w = self.k_pow(n - 1);
                w.0.push(g);
                NcPoly::monomial(&self.cfg, w, -Scalar::one(&self.cfg))
            }
            _ => unreachable!(),
        })
    }

    /// Anti-homomorphic extension `S(ab) = S(b)S(a)`, normalized.
    pub fn antipode(&self, p: &NcPoly) -> Result<NcPoly> {
        let out = p.map_words(|w| {
            let mut acc = NcPoly::one(&self.cfg);
            for &g in w.letters().iter().rev() {
                acc = acc.try_mul(&self.antipode_gen(g)?)?;
            }
            Ok(acc)
        })?;
        Ok(out.normalize_grading())
    }
}

/// One verification result, as it appears in reports.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    /// 1-based generator or index data the check was run on.
    pub indices: Vec<usize>,
    pub residual_term_count: usize,
    pub pass: bool,
    /// Rendering of a nonzero residual.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

impl Check {
    pub fn from_poly(name: impl Into<String>, indices: Vec<usize>, r: &NcPoly) -> Self {
        Check {
            name: name.into(),
            indices,
            residual_term_count: r.num_terms(),
            pass: r.is_zero(),
            residual: (!r.is_zero()).then(|| r.to_string()),
        }
    }

    pub fn from_tensor(name: impl Into<String>, indices: Vec<usize>, r: &TensorPoly) -> Self {
        Check {
            name: name.into(),
            indices,
            residual_term_count: r.num_terms(),
            pass: r.is_zero(),
            residual: (!r.is_zero()).then(|| r.to_string()),
        }
    }

    pub fn from_bool(name: impl Into<String>, indices: Vec<usize>, pass: bool, detail: Option<String>) -> Self {
        Check {
            name: name.into(),
            indices,
            residual_term_count: usize::from(!pass),
            pass,
            residual: if pass { None } else { detail },
        }
    }
}

pub(crate) fn gen_indices(g: Gen) -> Vec<usize> {
    match g {
        Gen::X(i) | Gen::Q(i) | Gen::Theta(i) | Gen::Z(i) => vec![i as usize],
        Gen::Entry(a, b) => vec![a as usize, b as usize],
        Gen::K | Gen::Lambda => vec![],
    }
}

/// `(ε⊗id)Δ(p) − p` and `(id⊗ε)Δ(p) − p`, summed into one residual per side.
pub fn verify_counit(rules: &HopfRulesU, p: &NcPoly) -> Result<(NcPoly, NcPoly)> {
    let d = rules.coproduct_raw(p)?;
    let left = d.collapse(|i, w| {
        if i == 0 {
            Ok(NcPoly::scalar(rules.counit_word(w)?))
        } else {
            Ok(NcPoly::word(rules.config(), w.clone()))
        }
    })?;
    let right = d.collapse(|i, w| {
        if i == 1 {
            Ok(NcPoly::scalar(rules.counit_word(w)?))
        } else {
            Ok(NcPoly::word(rules.config(), w.clone()))
        }
    })?;
    Ok((
        left.try_sub(p)?.normalize_grading(),
        right.try_sub(p)?.normalize_grading(),
    ))
}

/// `m(S⊗id)Δ(p) − ε(p)1` and `m(id⊗S)Δ(p) − ε(p)1`.
pub fn verify_antipode(rules: &HopfRulesU, p: &NcPoly) -> Result<(NcPoly, NcPoly)> {
    let d = rules.coproduct_raw(p)?;
    let eps = NcPoly::scalar(rules.counit(p)?);
    let cfg = rules.config().clone();
    let side = |s_slot: usize| {
        d.collapse(|i, w| {
            let wp = NcPoly::word(&cfg, w.clone());
            if i == s_slot {
                rules.antipode(&wp)
            } else {
                Ok(wp)
            }
        })
    };
    Ok((
        side(0)?.try_sub(&eps)?.normalize_grading(),
        side(1)?.try_sub(&eps)?.normalize_grading(),
    ))
}

/// `(Δ⊗id)Δ(p) − (id⊗Δ)Δ(p)`.
pub fn verify_coassociativity(rules: &HopfRulesU, p: &NcPoly) -> Result<TensorPoly> {
    let d = rules.coproduct_raw(p)?;
    let cfg = rules.config().clone();
    let left = d.expand_factor(0, 2, |w| rules.coproduct_raw(&NcPoly::word(&cfg, w.clone())))?;
    let right = d.expand_factor(1, 2, |w| rules.coproduct_raw(&NcPoly::word(&cfg, w.clone())))?;
    Ok(left.try_sub(&right)?.normalize_grading())
}

/// Residual of `Δ(R) − R⊗1 − 1⊗R` for the relation
/// `R = Σ_{S_n} Q_{α₁}⋯Q_{α_n} − b^j_α X_j`, split by the Q-degree of
/// each tensor factor.
#[derive(Debug, Clone)]
pub struct InvariantFormCheck {
    pub alpha: Vec<usize>,
    pub residual: TensorPoly,
    /// The mixed bidegree components `(k, n−k)`, `0 < k < n`, of `Δ(R)`.
    pub mixed: Vec<MixedComponent>,
}

#[derive(Debug, Clone)]
pub struct MixedComponent {
    /// Q-degree of the left and right tensor factors.
    pub bidegree: (usize, usize),
    /// Number of terms before applying `KQ = qQK` and `K^n = 1`.
    pub raw_terms: usize,
    pub residual: TensorPoly,
}

impl InvariantFormCheck {
    pub fn pass(&self) -> bool {
        self.residual.is_zero() && self.mixed.iter().all(|m| m.residual.is_zero())
    }

    pub fn to_check(&self) -> Check {
        Check::from_tensor(
            "coproduct_on_invariant_form",
            self.alpha.iter().map(|a| a + 1).collect(),
            &self.residual,
        )
    }
}

fn q_degree(w: &Word) -> usize {
    w.letters().iter().filter(|g| matches!(g, Gen::Q(_))).count()
}

/// `alpha` is 0-based and has length `n`.
pub fn verify_coproduct_on_invariant_form(
    rules: &HopfRulesU,
    spec: &GradedAlgebraSpec,
    alpha: &[usize],
) -> Result<InvariantFormCheck> {
    let cfg = rules.config().clone();
    let n = cfg.n() as usize;
    if alpha.len() != n {
        return Err(Error::Arity {
            expected: n,
            got: alpha.len(),
        });
    }
    let qs: Vec<NcPoly> = alpha.iter().map(|&a| NcPoly::gen(&cfg, Gen::Q(a as u16 + 1))).collect();
    let form = symmetrized_product(&qs)?;
    let rel = form.try_sub(&spec.invariant_form_image(alpha))?;
    let raw = rules.coproduct_raw(&rel)?;
    let one = NcPoly::one(&cfg);
    let prim = TensorPoly::product_of(&[&rel, &one])?.try_add(&TensorPoly::product_of(&[&one, &rel])?)?;
    let residual = raw.try_sub(&prim)?.normalize_grading();
    let mixed = (1..n)
        .map(|k| {
            let comp = raw.filter(|key| q_degree(&key[0]) == k && q_degree(&key[1]) == n - k);
            MixedComponent {
                bidegree: (k, n - k),
                raw_terms: comp.num_terms(),
                residual: comp.normalize_grading(),
            }
        })
        .collect();
    Ok(InvariantFormCheck {
        alpha: alpha.to_vec(),
        residual,
        mixed,
    })
}

/// The defining relations of the enveloping side for a spec, by name.
pub fn enveloping_relations(spec: &GradedAlgebraSpec) -> Vec<(String, Vec<usize>, NcPoly)> {
    let cfg = spec.config().clone();
    let n = cfg.n() as usize;
    let x = |j: usize| NcPoly::gen(&cfg, Gen::X(j as u16 + 1));
    let q = |a: usize| NcPoly::gen(&cfg, Gen::Q(a as u16 + 1));
    let k = NcPoly::gen(&cfg, Gen::K);
    let mut out = Vec::new();
    let dim = spec.g.dim();
    for i in 0..dim {
        for j in i + 1..dim {
            let mut rhs = NcPoly::zero(&cfg);
            for l in 0..dim {
                rhs = &rhs + &x(l).scale(spec.g.c(l, i, j));
            }
            let rel = &commutator(&x(i), &x(j)).expect("same config") - &rhs;
            out.push(("lie_bracket".to_string(), vec![i + 1, j + 1], rel));
        }
    }
    for a in 0..spec.r.size() {
        for j in 0..dim {
            let rel = &commutator(&q(a), &x(j)).expect("same config") - &spec.action(a, j);
            out.push(("graded_action".to_string(), vec![a + 1, j + 1], rel));
        }
        let kq = &(&k * &q(a)) - &(&q(a) * &k).scale(&Scalar::q_pow(&cfg, 1));
        out.push(("grading_twist".to_string(), vec![a + 1], kq));
    }
    for j in 0..dim {
        out.push((
            "grading_commutes".to_string(),
            vec![j + 1],
            commutator(&k, &x(j)).expect("same config"),
        ));
    }
    out.push((
        "grading_order".to_string(),
        vec![],
        &k.pow(n) - &NcPoly::one(&cfg),
    ));
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct HopfReport {
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl HopfReport {
    pub fn from_checks(checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        HopfReport { checks, pass }
    }
}

/// Counit, antipode and coassociativity on every generator; coproduct
/// compatibility of the `K` relations; and the invariant-form cancellation
/// for every sorted index tuple.
pub fn verify_hopf(spec: &GradedAlgebraSpec) -> Result<HopfReport> {
    let cfg = spec.config().clone();
    let rules = HopfRulesU::new(&cfg);
    let mut gens: Vec<Gen> = (1..=spec.g.dim() as u16).map(Gen::X).collect();
    gens.extend((1..=spec.r.size() as u16).map(Gen::Q));
    gens.push(Gen::K);
    let mut checks = Vec::new();
    for &g in &gens {
        let p = NcPoly::gen(&cfg, g);
        let idx = gen_indices(g);
        let label = g.to_string();
        let (l, r) = verify_counit(&rules, &p)?;
        checks.push(Check::from_poly(format!("counit_left({label})"), idx.clone(), &l));
        checks.push(Check::from_poly(format!("counit_right({label})"), idx.clone(), &r));
        let (l, r) = verify_antipode(&rules, &p)?;
        checks.push(Check::from_poly(format!("antipode_left({label})"), idx.clone(), &l));
        checks.push(Check::from_poly(format!("antipode_right({label})"), idx.clone(), &r));
        let c = verify_coassociativity(&rules, &p)?;
        checks.push(Check::from_tensor(format!("coassociativity({label})"), idx, &c));
    }
    for (name, idx, rel) in enveloping_relations(spec) {
        if matches!(name.as_str(), "grading_twist" | "grading_order" | "grading_commutes") {
            let d = rules.coproduct(&rel)?;
            checks.push(Check::from_tensor(format!("coproduct_kills({name})"), idx.clone(), &d));
            let e = NcPoly::scalar(rules.counit(&rel)?);
            checks.push(Check::from_poly(format!("counit_kills({name})"), idx, &e));
        }
    }
    let n = cfg.n() as usize;
    for alpha in (0..spec.r.size()).combinations_with_replacement(n) {
        checks.push(verify_coproduct_on_invariant_form(&rules, spec, &alpha)?.to_check());
    }
    Ok(HopfReport::from_checks(checks))
}

/// Counts of terms per bidegree, used to present the cancellation.
pub fn bidegree_profile(t: &TensorPoly) -> BTreeMap<(usize, usize), usize> {
    let mut m = BTreeMap::new();
    for (k, _) in t.terms() {
        *m.entry((q_degree(&k[0]), q_degree(&k[1]))).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: u32) -> Arc<CyclotomicConfig> {
        CyclotomicConfig::get(n).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn generator_coproducts() {
        let c = cfg(3);
        let r = HopfRulesU::new(&c);
        let one = Scalar::one(&c);
        let mut expect = TensorPoly::zero(&c, 2);
        expect.add_term(vec![w("X1"), w("1")], one.clone());
        expect.add_term(vec![w("1"), w("X1")], one.clone());
        assert_eq!(r.coproduct(&NcPoly::gen(&c, Gen::X(1))).unwrap(), expect);
        let mut kk = TensorPoly::zero(&c, 2);
        kk.add_term(vec![w("K K"), w("K K")], one);
        assert_eq!(r.coproduct(&NcPoly::word(&c, w("K K"))).unwrap(), kk);
        assert!(matches!(
            r.coproduct(&NcPoly::gen(&c, Gen::Lambda)),
            Err(Error::ForeignGenerator(Gen::Lambda))
        ));
    }

    #[test]
    fn cubic_expansion_matches_displayed_terms() {
        let c = cfg(3);
        let r = HopfRulesU::new(&c);
        let raw = r.coproduct_raw(&NcPoly::word(&c, w("Q1 Q2 Q3"))).unwrap();
        let mut shown = TensorPoly::zero(&c, 2);
        for (a, b) in [
            ("Q1 Q2 Q3", "1"),
            ("1", "Q1 Q2 Q3"),
            ("Q1 Q2 K", "Q3"),
            ("Q1 K Q3", "Q2"),
            ("K Q2 Q3", "Q1"),
            ("Q1 K K", "Q2 Q3"),
            ("K Q2 K", "Q1 Q3"),
            ("K K Q3", "Q1 Q2"),
        ] {
            shown.add_term(vec![w(a), w(b)], Scalar::one(&c));
        }
        // the display writes K³ ⊗ QQQ as 1 ⊗ QQQ
        let diff = raw.try_sub(&shown).unwrap();
        assert_eq!(diff.num_terms(), 2);
        assert!(diff.normalize_grading().is_zero());
    }

    #[test]
    fn antipode_values() {
        let c = cfg(3);
        let r = HopfRulesU::new(&c);
        let sk = r.antipode(&NcPoly::gen(&c, Gen::K)).unwrap();
        assert_eq!(sk, NcPoly::word(&c, w("K K")));
        assert!((&sk * &NcPoly::gen(&c, Gen::K)).normalize_grading() == NcPoly::one(&c));
        let sq = r.antipode(&NcPoly::gen(&c, Gen::Q(1))).unwrap();
        // −K²Q₁ = −q²·Q₁K²
        assert_eq!(sq, NcPoly::monomial(&c, w("Q1 K K"), -Scalar::q_pow(&c, 2)));
        let c2 = cfg(2);
        let r2 = HopfRulesU::new(&c2);
        // n = 2: S(Q) = −KQ = QK
        assert_eq!(
            r2.antipode(&NcPoly::gen(&c2, Gen::Q(1))).unwrap(),
            NcPoly::word(&c2, w("Q1 K"))
        );
    }

    #[test]
    fn counit_on_q() {
        let c = cfg(3);
        let r = HopfRulesU::new(&c);
        let (l, rr) = verify_counit(&r, &NcPoly::gen(&c, Gen::Q(1))).unwrap();
        assert!(l.is_zero() && rr.is_zero());
        assert!(r.counit(&NcPoly::word(&c, w("K K"))).unwrap().is_one());
        assert!(r.counit(&NcPoly::word(&c, w("K Q1"))).unwrap().is_zero());
    }

    #[test]
    fn axioms_on_words() {
        for n in [2, 3, 4] {
            let c = cfg(n);
            let r = HopfRulesU::new(&c);
            for s in ["Q1 Q2", "K Q1 X2", "Q1 Q1 Q1", "X1 K"] {
                let p = NcPoly::word(&c, w(s));
                let (a, b) = verify_counit(&r, &p).unwrap();
                assert!(a.is_zero() && b.is_zero(), "{s}");
                let (a, b) = verify_antipode(&r, &p).unwrap();
                assert!(a.is_zero() && b.is_zero(), "n={n} {s}: {a} | {b}");
                assert!(verify_coassociativity(&r, &p).unwrap().is_zero());
            }
        }
    }
}
