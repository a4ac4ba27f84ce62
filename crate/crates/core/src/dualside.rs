//! The dual side: the quotient algebra `Λ_n^N` of `θ`s and `λ`, the three
//! concrete dual Hopf algebras (super translation group, spinor `SL(2)`,
//! single generator), and the pairing with the enveloping side.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;
use std::sync::{Arc, Mutex};

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freealg::{Gen, NcPoly, Side, TensorPoly, Word};
use crate::gradesolve::GradedAlgebraSpec;
use crate::hopfcheck::{enveloping_relations, gen_indices, Check, HopfReport, HopfRulesU};
use crate::liealg::{builtin_rep, builtin_sl2, LieAlgebraData, RepName, RepresentationData};
use crate::scalar::{q_pochhammer, CyclotomicConfig, Scalar};

/// Which dual Hopf algebra to pair against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DualKind {
    Translation,
    Sl2Spinor,
    SingleGenerator,
}

impl DualKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "translation" => Ok(DualKind::Translation),
            "sl2_spinor" => Ok(DualKind::Sl2Spinor),
            "single_generator" => Ok(DualKind::SingleGenerator),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

impl fmt::Display for DualKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DualKind::Translation => "translation",
            DualKind::Sl2Spinor => "sl2_spinor",
            DualKind::SingleGenerator => "single_generator",
        })
    }
}

type Sparse = BTreeMap<Word, Scalar>;

fn add_sparse(v: &mut Sparse, w: Word, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let sum = match v.get(&w) {
        Some(old) => old + &c,
        None => c,
    };
    if sum.is_zero() {
        v.remove(&w);
    } else {
        v.insert(w, sum);
    }
}

/// Echelon basis of the relation ideal in one `θ`-degree, keyed by leading
/// (largest) word; every stored row has leading coefficient 1.
#[derive(Debug, Default)]
struct DegreeIdeal {
    rows: BTreeMap<Word, Sparse>,
}

impl DegreeIdeal {
    fn normal_form(&self, mut v: Sparse) -> Sparse {
        let mut out = Sparse::new();
        while let Some((w, c)) = v.pop_last() {
            match self.rows.get(&w) {
                Some(row) => {
                    for (rw, rc) in row.range(..&w) {
                        add_sparse(&mut v, rw.clone(), -(&c * rc));
                    }
                }
                None => {
                    out.insert(w, c);
                }
            }
        }
        out
    }

    fn insert(&mut self, v: Sparse) {
        let nf = self.normal_form(v);
        if let Some((lead, c)) = nf.last_key_value() {
            let inv = c.inv().expect("nonzero leading coefficient");
            let lead = lead.clone();
            let row = nf.into_iter().map(|(w, x)| (w, &x * &inv)).collect();
            self.rows.insert(lead, row);
        }
    }
}

/// `Λ_n^N` extended by central letters (`z` or `x`), with equality decided by
/// per-degree linear algebra.
///
/// Normal words have the layout `[central letters, sorted][θ word][λ^k]`.
#[derive(Debug)]
pub struct LambdaAlgebra {
    cfg: Arc<CyclotomicConfig>,
    size: usize,
    central: BTreeSet<Gen>,
    determinant: bool,
    cap: usize,
    ideals: Mutex<HashMap<usize, Arc<DegreeIdeal>>>,
    word_cache: Mutex<HashMap<Word, NcPoly>>,
}

impl LambdaAlgebra {
    /// Plain `Λ_n^N` with the default degree cap `2n`.
    pub fn new(cfg: &Arc<CyclotomicConfig>, size: usize) -> Self {
        Self::with_central(cfg, size, [], false)
    }

    /// `central` lists the commuting letters; `determinant` imposes
    /// `x11 x22 − x12 x21 = 1`.
    pub fn with_central(
        cfg: &Arc<CyclotomicConfig>,
        size: usize,
        central: impl IntoIterator<Item = Gen>,
        determinant: bool,
    ) -> Self {
        LambdaAlgebra {
            cfg: cfg.clone(),
            size,
            central: central.into_iter().collect(),
            determinant,
            cap: 2 * cfg.n() as usize,
            ideals: Mutex::new(HashMap::new()),
            word_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn config(&self) -> &Arc<CyclotomicConfig> {
        &self.cfg
    }

    fn n(&self) -> usize {
        self.cfg.n() as usize
    }

    fn theta_words(&self, len: usize) -> Vec<Word> {
        (0..len)
            .map(|_| 1..=self.size as u16)
            .multi_cartesian_product()
            .map(|v| Word(v.into_iter().map(Gen::Theta).collect()))
            .collect()
    }

    /// The symmetrized `θ` products of degree `n`, one per sorted index tuple,
    /// with each distinct ordering weighted 1.
    pub fn symmetric_forms(&self) -> Vec<(Vec<usize>, NcPoly)> {
        let n = self.n();
        (1..=self.size)
            .combinations_with_replacement(n)
            .map(|alpha| {
                let words: BTreeSet<Vec<usize>> = alpha.iter().copied().permutations(n).collect();
                let p = NcPoly::from_terms(
                    &self.cfg,
                    words.into_iter().map(|w| {
                        (
                            Word(w.into_iter().map(|a| Gen::Theta(a as u16)).collect()),
                            Scalar::one(&self.cfg),
                        )
                    }),
                );
                (alpha, p)
            })
            .collect()
    }

    fn ideal(&self, degree: usize) -> Result<Arc<DegreeIdeal>> {
        if degree > self.cap {
            return Err(Error::DegreeCap {
                cap: self.cap,
                degree,
            });
        }
        if let Some(d) = self.ideals.lock().expect("ideal cache").get(&degree) {
            return Ok(d.clone());
        }
        let n = self.n();
        let mut ideal = DegreeIdeal::default();
        if degree >= n {
            let forms = self.symmetric_forms();
            for left in 0..=degree - n {
                let lefts = self.theta_words(left);
                let rights = self.theta_words(degree - n - left);
                for (_, form) in &forms {
                    for u in &lefts {
                        for v in &rights {
                            let row = form
                                .terms()
                                .map(|(w, c)| (u.concat(w).concat(v), c.clone()))
                                .collect();
                            ideal.insert(row);
                        }
                    }
                }
            }
        }
        let ideal = Arc::new(ideal);
        self.ideals
            .lock()
            .expect("ideal cache")
            .entry(degree)
            .or_insert(ideal.clone());
        Ok(ideal)
    }

    /// Dimension of the ideal in `θ`-degree `d`.
    pub fn ideal_rank(&self, degree: usize) -> Result<usize> {
        Ok(self.ideal(degree)?.rows.len())
    }

    /// Normal `θ` words of degree `d` (those not leading an ideal row).
    pub fn theta_basis(&self, degree: usize) -> Result<Vec<Word>> {
        let ideal = self.ideal(degree)?;
        Ok(self
            .theta_words(degree)
            .into_iter()
            .filter(|w| !ideal.rows.contains_key(w))
            .collect())
    }

    /// Basis monomials `θ-word · λ^k`, `k < n`, of `θ`-degree at most `max_degree`.
    pub fn basis(&self, max_degree: usize) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        for d in 0..=max_degree {
            for w in self.theta_basis(d)? {
                for k in 0..self.n() {
                    let mut v = w.clone();
                    v.0.extend(std::iter::repeat_n(Gen::Lambda, k));
                    out.push(v);
                }
            }
        }
        Ok(out)
    }

    fn check_letter(&self, g: Gen) -> Result<()> {
        let ok = match g {
            Gen::Theta(a) => (1..=self.size as u16).contains(&a),
            Gen::Lambda => true,
            _ => self.central.contains(&g),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ForeignGenerator(g))
        }
    }

    fn reduce_central(&self, mut letters: Vec<Gen>) -> Vec<(Vec<Gen>, Scalar)> {
        letters.sort_unstable();
        if !self.determinant {
            return vec![(letters, Scalar::one(&self.cfg))];
        }
        let count = |ls: &[Gen], g: Gen| ls.iter().filter(|&&x| x == g).count();
        let (x11, x12, x21, x22) = (
            Gen::Entry(1, 1),
            Gen::Entry(1, 2),
            Gen::Entry(2, 1),
            Gen::Entry(2, 2),
        );
        if count(&letters, x11) == 0 || count(&letters, x22) == 0 {
            return vec![(letters, Scalar::one(&self.cfg))];
        }
        // x11 x22 = 1 + x12 x21
        let mut rest = letters.clone();
        let p = rest.iter().position(|&g| g == x11).unwrap();
        rest.remove(p);
        let p = rest.iter().position(|&g| g == x22).unwrap();
        rest.remove(p);
        let mut swapped = rest.clone();
        swapped.push(x12);
        swapped.push(x21);
        let mut out = self.reduce_central(rest);
        out.extend(self.reduce_central(swapped));
        out
    }

    fn reduce_word_uncached(&self, w: &Word) -> Result<NcPoly> {
        let n = self.n();
        let mut central = Vec::new();
        let mut theta = Vec::new();
        let mut lambdas = 0usize;
        let mut exp = 0usize;
        for &g in w.letters() {
            self.check_letter(g)?;
            match g {
                Gen::Lambda => lambdas += 1,
                Gen::Theta(_) => {
                    exp += lambdas;
                    theta.push(g);
                }
                _ => central.push(g),
            }
        }
        let coeff = Scalar::q_pow(&self.cfg, (exp % n) as i64);
        let ideal = self.ideal(theta.len())?;
        let nf = ideal.normal_form(Sparse::from([(Word(theta), coeff)]));
        let tail = vec![Gen::Lambda; lambdas % n];
        let mut out = NcPoly::zero(&self.cfg);
        for (cw, cc) in self.reduce_central(central) {
            for (tw, tc) in &nf {
                let mut letters = cw.clone();
                letters.extend_from_slice(tw.letters());
                letters.extend_from_slice(&tail);
                out.add_term(Word(letters), &cc * tc);
            }
        }
        Ok(out)
    }

    pub fn reduce_word(&self, w: &Word) -> Result<NcPoly> {
        if let Some(p) = self.word_cache.lock().expect("word cache").get(w) {
            return Ok(p.clone());
        }
        let p = self.reduce_word_uncached(w)?;
        self.word_cache
            .lock()
            .expect("word cache")
            .insert(w.clone(), p.clone());
        Ok(p)
    }

    /// Canonical representative of `p` in the quotient.
    pub fn lambda_reduce(&self, p: &NcPoly) -> Result<NcPoly> {
        p.map_words(|w| self.reduce_word(w))
    }

    pub fn equal(&self, a: &NcPoly, b: &NcPoly) -> Result<bool> {
        Ok(self.lambda_reduce(&a.try_sub(b)?)?.is_zero())
    }

    /// Reduces every tensor factor independently.
    pub fn reduce_tensor(&self, t: &TensorPoly) -> Result<TensorPoly> {
        let mut out = TensorPoly::zero(&self.cfg, t.arity());
        for (key, c) in t.terms() {
            let factors = key.iter().map(|w| self.reduce_word(w)).collect::<Result<Vec<_>>>()?;
            let refs: Vec<&NcPoly> = factors.iter().collect();
            out = out.try_add(&TensorPoly::product_of(&refs)?.scale(c))?;
        }
        Ok(out)
    }
}

/// Coproduct, counit and antipode of one of the concrete duals.
#[derive(Debug)]
pub struct DualHopfRules {
    kind: DualKind,
    cfg: Arc<CyclotomicConfig>,
    size: usize,
    lambda: LambdaAlgebra,
}

impl DualHopfRules {
    /// `size` is `N`. Translation requires `n = 2`; the single-generator dual
    /// requires `N = 1`; the `SL(2)` spinor dual requires `N = 2`.
    pub fn new(kind: DualKind, cfg: &Arc<CyclotomicConfig>, size: usize) -> Result<Self> {
        let n = cfg.n();
        let (central, det): (Vec<Gen>, bool) = match kind {
            DualKind::Translation => {
                if n != 2 {
                    return Err(Error::InvalidParameter(format!(
                        "the translation dual is defined for n = 2, not n = {n}"
                    )));
                }
                ((1..=size as u16).map(Gen::Z).collect(), false)
            }
            DualKind::SingleGenerator => {
                if size != 1 {
                    return Err(Error::InvalidParameter(format!(
                        "the single-generator dual has N = 1, not N = {size}"
                    )));
                }
                (vec![Gen::Z(1)], false)
            }
            DualKind::Sl2Spinor => {
                if size != 2 {
                    return Err(Error::InvalidParameter(format!(
                        "the SL(2) spinor dual has N = 2, not N = {size}"
                    )));
                }
                (
                    vec![Gen::Entry(1, 1), Gen::Entry(1, 2), Gen::Entry(2, 1), Gen::Entry(2, 2)],
                    true,
                )
            }
        };
        if size == 0 {
            return Err(Error::InvalidParameter("N must be positive".into()));
        }
        Ok(DualHopfRules {
            kind,
            cfg: cfg.clone(),
            size,
            lambda: LambdaAlgebra::with_central(cfg, size, central, det),
        })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.lambda = self.lambda.with_cap(cap);
        self
    }

    pub fn kind(&self) -> DualKind {
        self.kind
    }

    pub fn config(&self) -> &Arc<CyclotomicConfig> {
        &self.cfg
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn algebra(&self) -> &LambdaAlgebra {
        &self.lambda
    }

    fn n(&self) -> usize {
        self.cfg.n() as usize
    }

    /// All generator letters.
    pub fn letters(&self) -> Vec<Gen> {
        let mut v: Vec<Gen> = (1..=self.size as u16).map(Gen::Theta).collect();
        v.push(Gen::Lambda);
        v.extend(self.lambda.central.iter().copied());
        v
    }

    fn check(&self, g: Gen) -> Result<()> {
        if g.side() != Side::Dual {
            return Err(Error::ForeignGenerator(g));
        }
        self.lambda.check_letter(g)
    }

    fn lambda_pow(&self, k: usize) -> Vec<Gen> {
        vec![Gen::Lambda; k]
    }

    /// Generator coproduct, written without any reordering.
    pub fn coproduct_gen(&self, g: Gen) -> Result<TensorPoly> {
        self.check(g)?;
        let cfg = &self.cfg;
        let one = Scalar::one(cfg);
        let e = Word::empty;
        let l = Word::letter;
        let mut t = TensorPoly::zero(cfg, 2);
        match g {
            Gen::Lambda => t.add_term(vec![l(g), l(g)], one),
            Gen::Theta(a) => {
                match self.kind {
                    DualKind::Sl2Spinor => {
                        for b in 1..=2 {
                            t.add_term(vec![l(Gen::Theta(b)), l(Gen::Entry(b, a))], one.clone());
                        }
                    }
                    _ => t.add_term(vec![l(g), e()], one.clone()),
                }
                t.add_term(vec![l(Gen::Lambda), l(g)], one);
            }
            Gen::Entry(i, j) => {
                for k in 1..=2 {
                    t.add_term(vec![l(Gen::Entry(i, k)), l(Gen::Entry(k, j))], one.clone());
                }
            }
            Gen::Z(a) => {
                t.add_term(vec![l(g), e()], one.clone());
                t.add_term(vec![e(), l(g)], one.clone());
                match self.kind {
                    DualKind::Translation => {
                        t.add_term(vec![Word(vec![Gen::Lambda, Gen::Theta(a)]), l(Gen::Theta(a))], one);
                    }
                    _ => {
                        let n = self.n();
                        for k in 1..n {
                            let denom = &q_pochhammer(cfg, k as u32) * &q_pochhammer(cfg, (n - k) as u32);
                            let mut left = self.lambda_pow(n - k);
                            left.extend(std::iter::repeat_n(Gen::Theta(1), k));
                            let right = Word(vec![Gen::Theta(1); n - k]);
                            t.add_term(vec![Word(left), right], denom.inv()?);
                        }
                    }
                }
            }
            _ => unreachable!("checked above"),
        }
        Ok(t)
    }

    /// Multiplicative extension, unreduced.
    pub fn coproduct_raw(&self, p: &NcPoly) -> Result<TensorPoly> {
        let mut out = TensorPoly::zero(&self.cfg, 2);
        for (w, c) in p.terms() {
            out = out.try_add(&self.coproduct_word(w)?.scale(c))?;
        }
        Ok(out)
    }

    fn coproduct_word(&self, w: &Word) -> Result<TensorPoly> {
        let mut acc = TensorPoly::one(&self.cfg, 2);
        for &g in w.letters() {
            acc = acc.try_mul(&self.coproduct_gen(g)?)?;
        }
        Ok(acc)
    }

    /// Coproduct reduced in `Λ ⊗ Λ`.
    pub fn coproduct(&self, p: &NcPoly) -> Result<TensorPoly> {
        self.lambda.reduce_tensor(&self.coproduct_raw(p)?)
    }

    pub fn counit_gen(&self, g: Gen) -> Result<Scalar> {
        self.check(g)?;
        Ok(match g {
            Gen::Lambda => Scalar::one(&self.cfg),
            Gen::Entry(i, j) if i == j => Scalar::one(&self.cfg),
            _ => Scalar::zero(&self.cfg),
        })
    }

    pub fn counit_word(&self, w: &Word) -> Result<Scalar> {
        let mut acc = Scalar::one(&self.cfg);
        for &g in w.letters() {
            acc = &acc * &self.counit_gen(g)?;
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    pub fn counit(&self, p: &NcPoly) -> Result<Scalar> {
        let mut acc = Scalar::zero(&self.cfg);
        for (w, c) in p.terms() {
            acc = &acc + &(c * &self.counit_word(w)?);
        }
        Ok(acc)
    }

    pub fn antipode_gen(&self, g: Gen) -> Result<NcPoly> {
        self.check(g)?;
        let cfg = &self.cfg;
        let n = self.n();
        let one = Scalar::one(cfg);
        let minus = -Scalar::one(cfg);
        let word = |v: Vec<Gen>| Word(v);
        Ok(match g {
            Gen::Lambda => NcPoly::word(cfg, word(self.lambda_pow(n - 1))),
            Gen::Z(_) => NcPoly::monomial(cfg, Word::letter(g), minus),
            Gen::Entry(i, j) => match (i, j) {
                (1, 1) => NcPoly::gen(cfg, Gen::Entry(2, 2)),
                (2, 2) => NcPoly::gen(cfg, Gen::Entry(1, 1)),
                _ => NcPoly::monomial(cfg, Word::letter(g), minus),
            },
            Gen::Theta(a) => match self.kind {
                DualKind::Sl2Spinor => {
                    // S(θ₁) = λ^{n−1}(x21 θ2 − x22 θ1), S(θ₂) = λ^{n−1}(x12 θ1 − x11 θ2)
                    let other = 3 - a;
                    let mut w1 = self.lambda_pow(n - 1);
                    w1.extend([Gen::Entry(other, a), Gen::Theta(other)]);
                    let mut w2 = self.lambda_pow(n - 1);
                    w2.extend([Gen::Entry(other, other), Gen::Theta(a)]);
                    NcPoly::from_terms(cfg, [(word(w1), one), (word(w2), minus)])
                }
                _ => {
                    let mut w = self.lambda_pow(n - 1);
                    w.push(g);
                    NcPoly::monomial(cfg, word(w), minus)
                }
            },
            _ => unreachable!("checked above"),
        })
    }

    /// Anti-homomorphic extension, reduced.
    pub fn antipode(&self, p: &NcPoly) -> Result<NcPoly> {
        let raw = p.map_words(|w| {
            let mut acc = NcPoly::one(&self.cfg);
            for &g in w.letters().iter().rev() {
                acc = acc.try_mul(&self.antipode_gen(g)?)?;
            }
            Ok(acc)
        })?;
        self.lambda.lambda_reduce(&raw)
    }

    /// The defining relations of the dual algebra, by name.
    pub fn relations(&self) -> Vec<(String, Vec<usize>, NcPoly)> {
        let cfg = &self.cfg;
        let n = self.n();
        let mut out = Vec::new();
        let lam = NcPoly::gen(cfg, Gen::Lambda);
        for a in 1..=self.size as u16 {
            let th = NcPoly::gen(cfg, Gen::Theta(a));
            let rel = &(&lam * &th) - &(&th * &lam).scale(&Scalar::q_pow(cfg, 1));
            out.push(("lambda_theta_twist".to_string(), vec![a as usize], rel));
        }
        out.push(("lambda_order".to_string(), vec![], &lam.pow(n) - &NcPoly::one(cfg)));
        for (alpha, form) in self.lambda.symmetric_forms() {
            out.push(("theta_symmetric_form".to_string(), alpha, form));
        }
        let central: Vec<Gen> = self.lambda.central.iter().copied().collect();
        for &c in &central {
            let cp = NcPoly::gen(cfg, c);
            for g in self.letters() {
                if g == c || (central.contains(&g) && g < c) {
                    continue;
                }
                let gp = NcPoly::gen(cfg, g);
                let mut idx = gen_indices(c);
                idx.extend(gen_indices(g));
                out.push((
                    format!("central({c},{g})"),
                    idx,
                    &(&cp * &gp) - &(&gp * &cp),
                ));
            }
        }
        if self.lambda.determinant {
            let x = |i, j| NcPoly::gen(cfg, Gen::Entry(i, j));
            let det = &(&(&x(1, 1) * &x(2, 2)) - &(&x(1, 2) * &x(2, 1))) - &NcPoly::one(cfg);
            out.push(("determinant".to_string(), vec![], det));
        }
        out
    }
}

/// `(Δ⊗id)Δ(p) − (id⊗Δ)Δ(p)` reduced in `Λ^{⊗3}`.
pub fn dual_coassociativity(rules: &DualHopfRules, p: &NcPoly) -> Result<TensorPoly> {
    let d = rules.coproduct_raw(p)?;
    let left = d.expand_factor(0, 2, |w| rules.coproduct_word(w))?;
    let right = d.expand_factor(1, 2, |w| rules.coproduct_word(w))?;
    rules.lambda.reduce_tensor(&left.try_sub(&right)?)
}

/// `(ε⊗id)Δ(p) − p` and `(id⊗ε)Δ(p) − p`, reduced.
pub fn dual_counit_axiom(rules: &DualHopfRules, p: &NcPoly) -> Result<(NcPoly, NcPoly)> {
    let d = rules.coproduct_raw(p)?;
    let cfg = rules.config().clone();
    let side = |slot: usize| {
        d.collapse(|i, w| {
            if i == slot {
                Ok(NcPoly::scalar(rules.counit_word(w)?))
            } else {
                Ok(NcPoly::word(&cfg, w.clone()))
            }
        })
    };
    let l = rules.lambda.lambda_reduce(&side(0)?.try_sub(p)?)?;
    let r = rules.lambda.lambda_reduce(&side(1)?.try_sub(p)?)?;
    Ok((l, r))
}

/// `m(S⊗id)Δ(p) − ε(p)1` and `m(id⊗S)Δ(p) − ε(p)1`, reduced.
pub fn dual_antipode_axiom(rules: &DualHopfRules, p: &NcPoly) -> Result<(NcPoly, NcPoly)> {
    let d = rules.coproduct_raw(p)?;
    let cfg = rules.config().clone();
    let eps = NcPoly::scalar(rules.counit(p)?);
    let side = |slot: usize| {
        d.collapse(|i, w| {
            let wp = NcPoly::word(&cfg, w.clone());
            if i == slot {
                rules.antipode(&wp)
            } else {
                Ok(wp)
            }
        })
    };
    let l = rules.lambda.lambda_reduce(&side(0)?.try_sub(&eps)?)?;
    let r = rules.lambda.lambda_reduce(&side(1)?.try_sub(&eps)?)?;
    Ok((l, r))
}

/// Hopf axioms on every generator, and compatibility of `Δ`, `ε`, `S` with
/// every defining relation.
pub fn verify_dual_hopf(rules: &DualHopfRules) -> Result<HopfReport> {
    let cfg = rules.config().clone();
    let mut checks = Vec::new();
    for g in rules.letters() {
        let p = NcPoly::gen(&cfg, g);
        let idx = gen_indices(g);
        let c = dual_coassociativity(rules, &p)?;
        checks.push(Check::from_tensor(format!("coassociativity({g})"), idx.clone(), &c));
        let (l, r) = dual_counit_axiom(rules, &p)?;
        checks.push(Check::from_poly(format!("counit_left({g})"), idx.clone(), &l));
        checks.push(Check::from_poly(format!("counit_right({g})"), idx.clone(), &r));
        let (l, r) = dual_antipode_axiom(rules, &p)?;
        checks.push(Check::from_poly(format!("antipode_left({g})"), idx.clone(), &l));
        checks.push(Check::from_poly(format!("antipode_right({g})"), idx, &r));
    }
    for (name, idx, rel) in rules.relations() {
        let d = rules.coproduct(&rel)?;
        checks.push(Check::from_tensor(format!("coproduct_respects({name})"), idx.clone(), &d));
        let e = NcPoly::scalar(rules.counit(&rel)?);
        checks.push(Check::from_poly(format!("counit_respects({name})"), idx.clone(), &e));
        let s = rules.antipode(&rel)?;
        checks.push(Check::from_poly(format!("antipode_respects({name})"), idx, &s));
    }
    Ok(HopfReport::from_checks(checks))
}

/// The enveloping-side algebra paired with each dual: the abelian algebra
/// with `N` scalar generators for translation, the one-dimensional abelian
/// algebra for the single generator, `sl(2)` with the spinor for `SL(2)`.
pub fn partner_spec(kind: DualKind, cfg: &Arc<CyclotomicConfig>, size: usize) -> GradedAlgebraSpec {
    let n = cfg.n() as usize;
    match kind {
        DualKind::Translation | DualKind::SingleGenerator => {
            let dim = if kind == DualKind::SingleGenerator { 1 } else { size };
            GradedAlgebraSpec::new(
                LieAlgebraData::zero(cfg, dim),
                RepresentationData::zero(cfg, dim, size),
                n,
            )
        }
        DualKind::Sl2Spinor => {
            GradedAlgebraSpec::new(builtin_sl2(cfg), builtin_rep(cfg, RepName::Spinor), n)
        }
    }
}

/// Generator pairing values `⟨a, φ⟩` for one dual letter and one enveloping
/// letter.
pub fn pairing_table(kind: DualKind, cfg: &Arc<CyclotomicConfig>, a: Gen, phi: Gen) -> Scalar {
    let one = Scalar::one(cfg);
    let zero = Scalar::zero(cfg);
    match (a, phi) {
        (Gen::Theta(x), Gen::Q(y)) if x == y => one,
        (Gen::Lambda, Gen::K) => Scalar::q_pow(cfg, 1),
        (Gen::Entry(i, j), Gen::K) if i == j => one,
        (Gen::Entry(1, 1), Gen::X(3)) | (Gen::Entry(1, 2), Gen::X(1)) | (Gen::Entry(2, 1), Gen::X(2)) => one,
        (Gen::Entry(2, 2), Gen::X(3)) => -one,
        (Gen::Z(x), Gen::X(y)) if x == y => match kind {
            DualKind::Translation | DualKind::SingleGenerator => one,
            DualKind::Sl2Spinor => zero,
        },
        _ => zero,
    }
}

/// Which side is split first when both arguments are longer than one letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitOrder {
    /// Peel the last dual letter and use the enveloping coproduct.
    DualFirst,
    /// Peel the last enveloping letter and use the dual coproduct.
    EnvelopingFirst,
}

/// Memoized evaluator of `⟨a, φ⟩` via
/// `⟨ab, φ⟩ = Σ ⟨a, φ₍₁₎⟩⟨b, φ₍₂₎⟩` and `⟨a, φψ⟩ = Σ ⟨a₍₁₎, φ⟩⟨a₍₂₎, ψ⟩`.
pub struct Pairing<'a> {
    dual: &'a DualHopfRules,
    u: HopfRulesU,
    order: SplitOrder,
    max_len: usize,
    memo: RefCell<HashMap<(Word, Word), Scalar>>,
    u_coproducts: RefCell<HashMap<Word, Rc<TensorPoly>>>,
    dual_coproducts: RefCell<HashMap<Word, Rc<TensorPoly>>>,
}

impl<'a> Pairing<'a> {
    /// Word lengths on either side are capped at the dual algebra's degree cap.
    pub fn new(dual: &'a DualHopfRules, order: SplitOrder) -> Self {
        Pairing {
            dual,
            u: HopfRulesU::new(dual.config()),
            order,
            max_len: dual.lambda.cap(),
            memo: RefCell::new(HashMap::new()),
            u_coproducts: RefCell::new(HashMap::new()),
            dual_coproducts: RefCell::new(HashMap::new()),
        }
    }

    pub fn pair(&self, a: &NcPoly, phi: &NcPoly) -> Result<Scalar> {
        let cfg = self.dual.config();
        let mut acc = Scalar::zero(cfg);
        for (wa, ca) in a.terms() {
            for (wp, cp) in phi.terms() {
                let v = self.pair_words(wa, wp)?;
                if !v.is_zero() {
                    acc = &acc + &(&(ca * cp) * &v);
                }
            }
        }
        Ok(acc)
    }

    fn check(&self, a: &Word, phi: &Word) -> Result<()> {
        for &g in a.letters() {
            self.dual.check(g)?;
        }
        for &g in phi.letters() {
            if g.side() != Side::Enveloping {
                return Err(Error::ForeignGenerator(g));
            }
        }
        for len in [a.len(), phi.len()] {
            if len > self.max_len {
                return Err(Error::DegreeCap {
                    cap: self.max_len,
                    degree: len,
                });
            }
        }
        Ok(())
    }

    pub fn pair_words(&self, a: &Word, phi: &Word) -> Result<Scalar> {
        self.check(a, phi)?;
        self.eval(a, phi)
    }

    fn split_sum(&self, t: &TensorPoly, f: impl Fn(&Word, &Word) -> Result<Scalar>) -> Result<Scalar> {
        let mut acc = Scalar::zero(self.dual.config());
        for (k, c) in t.terms() {
            let v = f(&k[0], &k[1])?;
            if !v.is_zero() {
                acc = &acc + &(c * &v);
            }
        }
        Ok(acc)
    }

    /// A grading preserved by both coproducts and by the generator table:
    /// `θ`, `Q` have weight 1, `z` weight `n`, `X` weight `n` when paired with
    /// `z` and 0 otherwise.
    fn weight(&self, letters: &[Gen]) -> usize {
        let n = self.dual.n();
        let x_weight = if self.dual.kind == DualKind::Sl2Spinor { 0 } else { n };
        letters
            .iter()
            .map(|g| match g {
                Gen::Theta(_) | Gen::Q(_) => 1,
                Gen::Z(_) => n,
                Gen::X(_) => x_weight,
                _ => 0,
            })
            .sum()
    }

    fn u_coproduct(&self, phi: &Word) -> Result<Rc<TensorPoly>> {
        if let Some(t) = self.u_coproducts.borrow().get(phi) {
            return Ok(t.clone());
        }
        let t = Rc::new(self.u.coproduct_raw(&NcPoly::word(self.dual.config(), phi.clone()))?);
        self.u_coproducts.borrow_mut().insert(phi.clone(), t.clone());
        Ok(t)
    }

    fn dual_coproduct(&self, a: &Word) -> Result<Rc<TensorPoly>> {
        if let Some(t) = self.dual_coproducts.borrow().get(a) {
            return Ok(t.clone());
        }
        let t = Rc::new(self.dual.coproduct_word(a)?);
        self.dual_coproducts.borrow_mut().insert(a.clone(), t.clone());
        Ok(t)
    }

    /// Split the dual word as `a'·g`, expand `φ` with the enveloping coproduct.
    fn split_dual(&self, a: &Word, phi: &Word) -> Result<Scalar> {
        let (&last, init) = a.letters().split_last().expect("nonempty");
        let head = Word(init.to_vec());
        let tail = Word::letter(last);
        let d = self.u_coproduct(phi)?;
        self.split_sum(&d, |p1, p2| {
            let x = self.eval(&head, p1)?;
            if x.is_zero() {
                return Ok(x);
            }
            Ok(&x * &self.eval(&tail, p2)?)
        })
    }

    /// Split `φ` as `φ'·h`, expand `a` with the dual coproduct.
    fn split_enveloping(&self, a: &Word, phi: &Word) -> Result<Scalar> {
        let (&last, init) = phi.letters().split_last().expect("nonempty");
        let head = Word(init.to_vec());
        let tail = Word::letter(last);
        let d = self.dual_coproduct(a)?;
        self.split_sum(&d, |a1, a2| {
            let x = self.eval(a1, &head)?;
            if x.is_zero() {
                return Ok(x);
            }
            Ok(&x * &self.eval(a2, &tail)?)
        })
    }

    fn eval(&self, a: &Word, phi: &Word) -> Result<Scalar> {
        let cfg = self.dual.config();
        if a.is_empty() {
            return self.u.counit_word(phi);
        }
        if phi.is_empty() {
            return self.dual.counit_word(a);
        }
        if self.weight(a.letters()) != self.weight(phi.letters()) {
            return Ok(Scalar::zero(cfg));
        }
        let key = (a.clone(), phi.clone());
        if let Some(v) = self.memo.borrow().get(&key) {
            return Ok(v.clone());
        }
        let v = match (a.len(), phi.len()) {
            (1, 1) => pairing_table(self.dual.kind, cfg, a.0[0], phi.0[0]),
            (1, _) => self.split_enveloping(a, phi)?,
            (_, 1) => self.split_dual(a, phi)?,
            _ => match self.order {
                SplitOrder::DualFirst => self.split_dual(a, phi)?,
                SplitOrder::EnvelopingFirst => self.split_enveloping(a, phi)?,
            },
        };
        self.memo.borrow_mut().insert(key, v.clone());
        Ok(v)
    }
}

/// All words of length `0..=max_len` over `letters`.
pub fn words_up_to(letters: &[Gen], max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| letters.iter().map(move |&g| w.concat(&Word::letter(g))))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct PairingFailure {
    pub relation: String,
    pub indices: Vec<usize>,
    pub word: String,
    pub value: Scalar,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairingReport {
    pub dual: DualKind,
    pub max_word_length: usize,
    pub dual_relations: usize,
    pub enveloping_relations: usize,
    pub pairings_evaluated: usize,
    pub failures: Vec<PairingFailure>,
    pub pass: bool,
}

/// Pairs every dual relation with every enveloping word, and every enveloping
/// relation with every dual word, up to `max_len` letters.
///
/// Enveloping relations are those of [`enveloping_relations`]; for the
/// `SL(2)` spinor dual the vanishing invariant forms `Σ_{S_n} Q⋯Q = 0` are
/// added.
pub fn verify_pairing_well_defined(rules: &DualHopfRules, max_len: usize) -> Result<PairingReport> {
    let cfg = rules.config().clone();
    let spec = partner_spec(rules.kind, &cfg, rules.size);
    let pairing = Pairing::new(rules, SplitOrder::DualFirst);
    let mut u_letters: Vec<Gen> = (1..=spec.g.dim() as u16).map(Gen::X).collect();
    u_letters.extend((1..=spec.r.size() as u16).map(Gen::Q));
    u_letters.push(Gen::K);

    let mut u_rels = enveloping_relations(&spec);
    if rules.kind == DualKind::Sl2Spinor {
        let n = cfg.n() as usize;
        for alpha in (0..spec.r.size()).combinations_with_replacement(n) {
            let qs: Vec<NcPoly> = alpha.iter().map(|&a| NcPoly::gen(&cfg, Gen::Q(a as u16 + 1))).collect();
            let form = crate::freealg::symmetrized_product(&qs)?.try_sub(&spec.invariant_form_image(&alpha))?;
            u_rels.push((
                "invariant_form".to_string(),
                alpha.iter().map(|a| a + 1).collect(),
                form,
            ));
        }
    }
    let d_rels = rules.relations();

    let mut failures = Vec::new();
    let mut evaluated = 0;
    for w in words_up_to(&u_letters, max_len) {
        let phi = NcPoly::word(&cfg, w.clone());
        for (name, idx, rel) in &d_rels {
            evaluated += 1;
            let v = pairing.pair(rel, &phi)?;
            if !v.is_zero() {
                failures.push(PairingFailure {
                    relation: name.clone(),
                    indices: idx.clone(),
                    word: w.to_string(),
                    value: v,
                });
            }
        }
    }
    for w in words_up_to(&rules.letters(), max_len) {
        let a = NcPoly::word(&cfg, w.clone());
        for (name, idx, rel) in &u_rels {
            evaluated += 1;
            let v = pairing.pair(&a, rel)?;
            if !v.is_zero() {
                failures.push(PairingFailure {
                    relation: name.clone(),
                    indices: idx.clone(),
                    word: w.to_string(),
                    value: v,
                });
            }
        }
    }
    Ok(PairingReport {
        dual: rules.kind,
        max_word_length: max_len,
        dual_relations: d_rels.len(),
        enveloping_relations: u_rels.len(),
        pairings_evaluated: evaluated,
        pass: failures.is_empty(),
        failures,
    })
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
    fn theta_cube_vanishes() {
        let c = cfg(3);
        let lam = LambdaAlgebra::new(&c, 1);
        assert!(lam.lambda_reduce(&NcPoly::word(&c, w("th1 th1 th1"))).unwrap().is_zero());
        assert!(!lam.lambda_reduce(&NcPoly::word(&c, w("th1 th1"))).unwrap().is_zero());
        let lt = lam.lambda_reduce(&NcPoly::word(&c, w("la th1"))).unwrap();
        assert_eq!(lt, NcPoly::monomial(&c, w("th1 la"), Scalar::q_pow(&c, 1)));
        assert_eq!(lam.basis(2).unwrap().len(), 9);
        assert_eq!(lam.theta_basis(3).unwrap().len(), 0);
    }

    #[test]
    fn two_generator_cubic_ideal() {
        let c = cfg(3);
        let lam = LambdaAlgebra::new(&c, 2);
        let sym = NcPoly::from_terms(
            &c,
            ["th1 th1 th2", "th1 th2 th1", "th2 th1 th1"].map(|s| (w(s), Scalar::one(&c))),
        );
        assert!(lam.lambda_reduce(&sym).unwrap().is_zero());
        assert!(!lam.lambda_reduce(&NcPoly::word(&c, w("th1 th2 th1"))).unwrap().is_zero());
        // one relation per sorted index tuple: 4 in degree 3
        assert_eq!(lam.ideal_rank(3).unwrap(), 4);
    }

    #[test]
    fn degree_cap() {
        let c = cfg(2);
        let lam = LambdaAlgebra::new(&c, 1);
        let long = NcPoly::word(&c, Word(vec![Gen::Theta(1); 5]));
        assert!(matches!(lam.lambda_reduce(&long), Err(Error::DegreeCap { cap: 4, degree: 5 })));
    }

    #[test]
    fn determinant_reduction() {
        let c = cfg(3);
        let rules = DualHopfRules::new(DualKind::Sl2Spinor, &c, 2).unwrap();
        let p = NcPoly::word(&c, w("x22 th1 x11"));
        let r = rules.algebra().lambda_reduce(&p).unwrap();
        let expect = NcPoly::from_terms(
            &c,
            [(w("th1"), Scalar::one(&c)), (w("x12 x21 th1"), Scalar::one(&c))],
        );
        assert_eq!(r, expect);
    }

    #[test]
    fn sl2_entry_coproduct() {
        let c = cfg(3);
        let rules = DualHopfRules::new(DualKind::Sl2Spinor, &c, 2).unwrap();
        let d = rules.coproduct(&NcPoly::gen(&c, Gen::Entry(1, 1))).unwrap();
        let mut expect = TensorPoly::zero(&c, 2);
        expect.add_term(vec![w("x11"), w("x11")], Scalar::one(&c));
        expect.add_term(vec![w("x12"), w("x21")], Scalar::one(&c));
        assert_eq!(d, expect);
        assert_eq!(
            rules.antipode(&NcPoly::gen(&c, Gen::Lambda)).unwrap(),
            NcPoly::word(&c, w("la la"))
        );
    }

    #[test]
    fn single_generator_coproduct_of_z() {
        let c = cfg(3);
        let rules = DualHopfRules::new(DualKind::SingleGenerator, &c, 1).unwrap();
        let d = rules.coproduct_raw(&NcPoly::gen(&c, Gen::Z(1))).unwrap();
        // (q;q)_1 (q;q)_2 = (1 − q)·3
        let coeff = (&Scalar::from_integer(&c, 3) * &Scalar::parse(&c, "1 - q").unwrap()).inv().unwrap();
        assert_eq!(d.coeff(&[w("la la th1"), w("th1 th1")]), coeff);
        assert_eq!(d.coeff(&[w("la th1 th1"), w("th1")]), coeff);
        assert!(d.coeff(&[w("z1"), w("1")]).is_one());
        assert_eq!(d.num_terms(), 4);
    }

    #[test]
    fn rules_reject_bad_parameters() {
        let c3 = cfg(3);
        assert!(DualHopfRules::new(DualKind::Translation, &c3, 1).is_err());
        assert!(DualHopfRules::new(DualKind::SingleGenerator, &c3, 2).is_err());
        assert!(DualHopfRules::new(DualKind::Sl2Spinor, &c3, 3).is_err());
        let rules = DualHopfRules::new(DualKind::SingleGenerator, &c3, 1).unwrap();
        assert!(matches!(
            rules.coproduct_gen(Gen::Theta(2)),
            Err(Error::ForeignGenerator(Gen::Theta(2)))
        ));
        assert!(rules.coproduct_gen(Gen::Q(1)).is_err());
    }

    #[test]
    fn basic_pairings() {
        let c = cfg(3);
        let rules = DualHopfRules::new(DualKind::SingleGenerator, &c, 1).unwrap();
        let p = Pairing::new(&rules, SplitOrder::DualFirst);
        assert!(p.pair_words(&w("th1"), &w("Q1")).unwrap().is_one());
        assert!(p.pair_words(&w("la la la"), &w("K")).unwrap().is_one());
        assert_eq!(
            p.pair_words(&w("th1 th1"), &w("Q1 Q1")).unwrap(),
            Scalar::parse(&c, "1 + q").unwrap()
        );
        assert!(p.pair_words(&w("th1"), &w("Q1 K")).unwrap().is_one());
        assert_eq!(p.pair_words(&w("th1"), &w("K Q1")).unwrap(), Scalar::q_pow(&c, 1));
    }
}
