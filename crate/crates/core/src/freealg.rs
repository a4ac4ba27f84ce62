//! Free noncommutative polynomials over [`Scalar`], tensor powers of them,
//! and the K/λ grading rewrite.
//!
//! Both sides of the duality share one flat alphabet ([`Gen`]); the side a
//! letter belongs to is checked by the operations that care.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{CyclotomicConfig, Scalar};

/// A generator letter. Indices are 1-based as in the usual notation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    /// Lie algebra generator `X_j`.
    X(u16),
    /// Graded generator `Q_α`.
    Q(u16),
    /// Grading unit `K`.
    K,
    /// Dual graded generator `θ_α`.
    Theta(u16),
    /// Dual grading unit `λ`.
    Lambda,
    /// Group matrix entry `x_{nm}`.
    Entry(u16, u16),
    /// Translation parameter `z_α`.
    Z(u16),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Enveloping,
    Dual,
}

impl Gen {
    pub fn side(self) -> Side {
        match self {
            Gen::X(_) | Gen::Q(_) | Gen::K => Side::Enveloping,
            _ => Side::Dual,
        }
    }

    /// Letters that commute with everything on their side.
    pub fn is_central_dual(self) -> bool {
        matches!(self, Gen::Entry(..) | Gen::Z(_))
    }

    pub fn parse(tok: &str) -> Option<Gen> {
        let num = |s: &str| s.parse::<u16>().ok().filter(|&v| v > 0);
        match tok {
            "K" => return Some(Gen::K),
            "la" => return Some(Gen::Lambda),
            _ => {}
        }
        if let Some(r) = tok.strip_prefix("th") {
            return num(r).map(Gen::Theta);
        }
        if let Some(r) = tok.strip_prefix('X') {
            return num(r).map(Gen::X);
        }
        if let Some(r) = tok.strip_prefix('Q') {
            return num(r).map(Gen::Q);
        }
        if let Some(r) = tok.strip_prefix('z') {
            return num(r).map(Gen::Z);
        }
        if let Some(r) = tok.strip_prefix('x') {
            if r.len() == 2 {
                let (a, b) = r.split_at(1);
                return Some(Gen::Entry(num(a)?, num(b)?));
            }
        }
        None
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::X(j) => write!(f, "X{j}"),
            Gen::Q(a) => write!(f, "Q{a}"),
            Gen::K => write!(f, "K"),
            Gen::Theta(a) => write!(f, "th{a}"),
            Gen::Lambda => write!(f, "la"),
            Gen::Entry(n, m) => write!(f, "x{n}{m}"),
            Gen::Z(a) => write!(f, "z{a}"),
        }
    }
}

/// Index ranges for one algebra instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    pub lie_dim: u16,
    pub graded: u16,
    pub matrix_size: u16,
}

impl Alphabet {
    pub fn contains(&self, g: Gen) -> bool {
        match g {
            Gen::X(j) => (1..=self.lie_dim).contains(&j),
            Gen::Q(a) | Gen::Theta(a) | Gen::Z(a) => (1..=self.graded).contains(&a),
            Gen::K | Gen::Lambda => true,
            Gen::Entry(n, m) => {
                (1..=self.matrix_size).contains(&n) && (1..=self.matrix_size).contains(&m)
            }
        }
    }

    pub fn validate(&self, p: &NcPoly) -> Result<()> {
        for w in p.terms.keys() {
            if let Some(&g) = w.0.iter().find(|&&g| !self.contains(g)) {
                return Err(Error::ForeignGenerator(g));
            }
        }
        Ok(())
    }
}

/// A word in the free monoid, ordered length-lexicographically.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Gen>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(g: Gen) -> Self {
        Word(vec![g])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Gen] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn parse(text: &str) -> Option<Word> {
        let text = text.trim();
        if text == "1" {
            return Some(Word::empty());
        }
        text.split_whitespace().map(Gen::parse).collect::<Option<Vec<_>>>().map(Word)
    }

    /// Moves every `K` right past `Q` letters and every `λ` right past `θ`
    /// letters, reducing both modulo `n`. Returns the exponent of `q` picked up.
    pub fn normalize_grading(&self, n: u32) -> (u64, Word) {
        let mut k_seen = 0u64;
        let mut l_seen = 0u64;
        let mut exp = 0u64;
        let mut out = Vec::with_capacity(self.len());
        for &g in &self.0 {
            match g {
                Gen::K => k_seen += 1,
                Gen::Lambda => l_seen += 1,
                Gen::Q(_) => {
                    exp += k_seen;
                    out.push(g);
                }
                Gen::Theta(_) => {
                    exp += l_seen;
                    out.push(g);
                }
                _ => out.push(g),
            }
        }
        let n64 = n as u64;
        out.extend(std::iter::repeat_n(Gen::K, (k_seen % n64) as usize));
        out.extend(std::iter::repeat_n(Gen::Lambda, (l_seen % n64) as usize));
        (exp % n64, Word(out))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        write!(f, "{}", self.0.iter().join(" "))
    }
}

fn check_cfg(a: &Arc<CyclotomicConfig>, b: &Arc<CyclotomicConfig>) -> Result<()> {
    if a.n() != b.n() {
        return Err(crate::scalar::ScalarError::OrderMismatch {
            left: a.n(),
            right: b.n(),
        }
        .into());
    }
    Ok(())
}

fn add_into<K: Ord>(map: &mut BTreeMap<K, Scalar>, key: K, coeff: Scalar) {
    if coeff.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(coeff);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let sum = o.get() + &coeff;
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}

/// A finite linear combination of words; zero coefficients are never stored.
#[derive(Clone)]
pub struct NcPoly {
    cfg: Arc<CyclotomicConfig>,
    terms: BTreeMap<Word, Scalar>,
}

impl NcPoly {
    pub fn zero(cfg: &Arc<CyclotomicConfig>) -> Self {
        NcPoly {
            cfg: cfg.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(cfg: &Arc<CyclotomicConfig>) -> Self {
        Self::monomial(cfg, Word::empty(), Scalar::one(cfg))
    }

    pub fn scalar(c: Scalar) -> Self {
        let cfg = c.config().clone();
        Self::monomial(&cfg, Word::empty(), c)
    }

    pub fn gen(cfg: &Arc<CyclotomicConfig>, g: Gen) -> Self {
        Self::monomial(cfg, Word::letter(g), Scalar::one(cfg))
    }

    pub fn word(cfg: &Arc<CyclotomicConfig>, w: Word) -> Self {
        Self::monomial(cfg, w, Scalar::one(cfg))
    }

    pub fn monomial(cfg: &Arc<CyclotomicConfig>, w: Word, c: Scalar) -> Self {
        let mut p = Self::zero(cfg);
        add_into(&mut p.terms, w, c);
        p
    }

    pub fn from_terms(
        cfg: &Arc<CyclotomicConfig>,
        terms: impl IntoIterator<Item = (Word, Scalar)>,
    ) -> Self {
        let mut p = Self::zero(cfg);
        for (w, c) in terms {
            add_into(&mut p.terms, w, c);
        }
        p
    }

    /// A single word with coefficient 1, e.g. `"Q1 Q2 K"`.
    pub fn parse_word(cfg: &Arc<CyclotomicConfig>, text: &str) -> Option<Self> {
        Word::parse(text).map(|w| Self::word(cfg, w))
    }

    pub fn config(&self) -> &Arc<CyclotomicConfig> {
        &self.cfg
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Word, Scalar)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(|| Scalar::zero(&self.cfg))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn max_len(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        add_into(&mut self.terms, w, c);
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_cfg(&self.cfg, &other.cfg)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            add_into(&mut out.terms, w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        check_cfg(&self.cfg, &other.cfg)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            add_into(&mut out.terms, w.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        check_cfg(&self.cfg, &other.cfg)?;
        let mut out = Self::zero(&self.cfg);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                add_into(&mut out.terms, wa.concat(wb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(&self.cfg);
        for (w, v) in &self.terms {
            add_into(&mut out.terms, w.clone(), v * c);
        }
        out
    }

    /// Applies the K/λ rewrite to every word.
    pub fn normalize_grading(&self) -> Self {
        let n = self.cfg.n();
        let mut out = Self::zero(&self.cfg);
        for (w, c) in &self.terms {
            let (e, nw) = w.normalize_grading(n);
            add_into(&mut out.terms, nw, c * &Scalar::q_pow(&self.cfg, e as i64));
        }
        out
    }

    /// Linear extension of a word map.
    pub fn map_words(&self, mut f: impl FnMut(&Word) -> Result<NcPoly>) -> Result<NcPoly> {
        let mut out = Self::zero(&self.cfg);
        for (w, c) in &self.terms {
            let img = f(w)?;
            for (iw, ic) in img.terms {
                add_into(&mut out.terms, iw, &ic * c);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(&self.cfg), |acc, _| &acc * self)
    }
}

impl PartialEq for NcPoly {
    fn eq(&self, other: &Self) -> bool {
        self.cfg.n() == other.cfg.n() && self.terms == other.terms
    }
}

impl Eq for NcPoly {}

impl PartialEq for TensorPoly {
    fn eq(&self, other: &Self) -> bool {
        self.cfg.n() == other.cfg.n() && self.arity == other.arity && self.terms == other.terms
    }
}

impl Eq for TensorPoly {}

macro_rules! poly_binop {
    ($ty:ty, $trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&$ty> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl std::ops::$trait<$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                (&self).$method(&rhs)
            }
        }
    };
}

poly_binop!(NcPoly, Add, add, try_add);
poly_binop!(NcPoly, Sub, sub, try_sub);
poly_binop!(NcPoly, Mul, mul, try_mul);
poly_binop!(TensorPoly, Add, add, try_add);
poly_binop!(TensorPoly, Sub, sub, try_sub);
poly_binop!(TensorPoly, Mul, mul, try_mul);

impl std::ops::Neg for &NcPoly {
    type Output = NcPoly;
    fn neg(self) -> NcPoly {
        self.scale(&-Scalar::one(&self.cfg))
    }
}

fn fmt_coeff(c: &Scalar) -> String {
    let s = c.to_string();
    if s.contains(' ') {
        format!("({s})")
    } else {
        s
    }
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts = self.terms.iter().map(|(w, c)| {
            if c.is_one() {
                w.to_string()
            } else if w.is_empty() {
                fmt_coeff(c)
            } else {
                format!("{}*{}", fmt_coeff(c), w)
            }
        });
        write!(f, "{}", parts.format(" + "))
    }
}

impl fmt::Debug for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NcPoly({self})")
    }
}

/// `ab − ba`.
pub fn commutator(a: &NcPoly, b: &NcPoly) -> Result<NcPoly> {
    a.try_mul(b)?.try_sub(&b.try_mul(a)?)
}

/// `ab + ba`.
pub fn anticommutator(a: &NcPoly, b: &NcPoly) -> Result<NcPoly> {
    a.try_mul(b)?.try_add(&b.try_mul(a)?)
}

/// Sum of the products of `args` over all orderings (any arity).
pub fn symmetrized_product(args: &[NcPoly]) -> Result<NcPoly> {
    let cfg = args
        .first()
        .map(|a| a.cfg.clone())
        .ok_or(Error::Arity { expected: 1, got: 0 })?;
    let mut acc = NcPoly::zero(&cfg);
    for perm in (0..args.len()).permutations(args.len()) {
        let mut prod = NcPoly::one(&cfg);
        for i in perm {
            prod = prod.try_mul(&args[i])?;
        }
        acc = acc.try_add(&prod)?;
    }
    Ok(acc)
}

/// The `S_n`-invariant form; requires exactly `n` arguments where `n` is the
/// grading order of the coefficient field.
pub fn s_invariant_form(args: &[NcPoly]) -> Result<NcPoly> {
    let n = args
        .first()
        .map(|a| a.cfg.n() as usize)
        .ok_or(Error::Arity { expected: 1, got: 0 })?;
    if args.len() != n {
        return Err(Error::Arity {
            expected: n,
            got: args.len(),
        });
    }
    let form = symmetrized_product(args)?;
    if n == 3 {
        debug_assert_eq!(form, cubic_form_nested(&args[0], &args[1], &args[2])?);
    }
    Ok(form)
}

/// `a{b,c} + b{a,c} + c{a,b}`, the nested presentation of the cubic form.
pub fn cubic_form_nested(a: &NcPoly, b: &NcPoly, c: &NcPoly) -> Result<NcPoly> {
    let t1 = a.try_mul(&anticommutator(b, c)?)?;
    let t2 = b.try_mul(&anticommutator(a, c)?)?;
    let t3 = c.try_mul(&anticommutator(a, b)?)?;
    t1.try_add(&t2)?.try_add(&t3)
}

/// An element of a `k`-fold tensor power. Tensor factors multiply plainly:
/// `(a⊗b)(c⊗d) = ac⊗bd`; any grading sign lives in explicit K/λ letters.
#[derive(Clone)]
pub struct TensorPoly {
    cfg: Arc<CyclotomicConfig>,
    arity: usize,
    terms: BTreeMap<Vec<Word>, Scalar>,
}

impl TensorPoly {
    pub fn zero(cfg: &Arc<CyclotomicConfig>, arity: usize) -> Self {
        TensorPoly {
            cfg: cfg.clone(),
            arity,
            terms: BTreeMap::new(),
        }
    }

    /// `1 ⊗ … ⊗ 1`.
    pub fn one(cfg: &Arc<CyclotomicConfig>, arity: usize) -> Self {
        let mut t = Self::zero(cfg, arity);
        t.add_term(vec![Word::empty(); arity], Scalar::one(cfg));
        t
    }

    /// `p_1 ⊗ p_2 ⊗ …`, expanded bilinearly.
    pub fn product_of(factors: &[&NcPoly]) -> Result<Self> {
        let cfg = factors
            .first()
            .map(|p| p.cfg.clone())
            .ok_or(Error::Arity { expected: 1, got: 0 })?;
        let mut acc: Vec<(Vec<Word>, Scalar)> = vec![(Vec::new(), Scalar::one(&cfg))];
        for p in factors {
            check_cfg(&cfg, &p.cfg)?;
            let mut next = Vec::with_capacity(acc.len() * p.num_terms());
            for (ws, c) in &acc {
                for (w, d) in &p.terms {
                    let mut k = ws.clone();
                    k.push(w.clone());
                    next.push((k, c * d));
                }
            }
            acc = next;
        }
        let mut t = Self::zero(&cfg, factors.len());
        for (k, c) in acc {
            t.add_term(k, c);
        }
        Ok(t)
    }

    pub fn config(&self) -> &Arc<CyclotomicConfig> {
        &self.cfg
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Word>, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, key: &[Word]) -> Scalar {
        self.terms
            .get(key)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(&self.cfg))
    }

    pub fn add_term(&mut self, key: Vec<Word>, c: Scalar) {
        debug_assert_eq!(key.len(), self.arity);
        add_into(&mut self.terms, key, c);
    }

    fn check(&self, other: &Self) -> Result<()> {
        check_cfg(&self.cfg, &other.cfg)?;
        if self.arity != other.arity {
            return Err(Error::TensorArity {
                left: self.arity,
                right: other.arity,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(&self.cfg, self.arity);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key = ka.iter().zip(kb).map(|(a, b)| a.concat(b)).collect();
                out.add_term(key, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(&self.cfg, self.arity);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    /// K/λ rewrite applied to each tensor factor independently.
    pub fn normalize_grading(&self) -> Self {
        let n = self.cfg.n();
        let mut out = Self::zero(&self.cfg, self.arity);
        for (k, c) in &self.terms {
            let mut e = 0;
            let key = k
                .iter()
                .map(|w| {
                    let (de, nw) = w.normalize_grading(n);
                    e += de;
                    nw
                })
                .collect();
            out.add_term(key, c * &Scalar::q_pow(&self.cfg, e as i64));
        }
        out
    }

    /// Replaces factor `idx` by the image of a word-to-tensor map, so the
    /// arity grows by `image arity − 1`.
    pub fn expand_factor(
        &self,
        idx: usize,
        image_arity: usize,
        mut f: impl FnMut(&Word) -> Result<TensorPoly>,
    ) -> Result<TensorPoly> {
        let arity = self.arity + image_arity - 1;
        let mut out = Self::zero(&self.cfg, arity);
        for (k, c) in &self.terms {
            let img = f(&k[idx])?;
            if img.arity != image_arity {
                return Err(Error::TensorArity {
                    left: img.arity,
                    right: image_arity,
                });
            }
            for (ik, ic) in &img.terms {
                let mut key = Vec::with_capacity(arity);
                key.extend_from_slice(&k[..idx]);
                key.extend(ik.iter().cloned());
                key.extend_from_slice(&k[idx + 1..]);
                out.add_term(key, c * ic);
            }
        }
        Ok(out)
    }

    /// Applies a word map to each factor and multiplies the results in order.
    pub fn collapse(&self, mut f: impl FnMut(usize, &Word) -> Result<NcPoly>) -> Result<NcPoly> {
        let mut out = NcPoly::zero(&self.cfg);
        for (k, c) in &self.terms {
            let mut prod = NcPoly::scalar(c.clone());
            for (i, w) in k.iter().enumerate() {
                prod = prod.try_mul(&f(i, w)?)?;
            }
            out = out.try_add(&prod)?;
        }
        Ok(out)
    }

    /// Linear extension of a map on whole keys.
    pub fn map_keys(&self, mut f: impl FnMut(&[Word]) -> Result<TensorPoly>) -> Result<Self> {
        let mut out = Self::zero(&self.cfg, self.arity);
        for (k, c) in &self.terms {
            let img = f(k)?;
            for (ik, ic) in img.terms {
                out.add_term(ik, &ic * c);
            }
        }
        Ok(out)
    }

    /// Keeps only terms whose key satisfies the predicate.
    pub fn filter(&self, mut keep: impl FnMut(&[Word]) -> bool) -> Self {
        let mut out = Self::zero(&self.cfg, self.arity);
        for (k, c) in &self.terms {
            if keep(k) {
                out.add_term(k.clone(), c.clone());
            }
        }
        out
    }
}

impl fmt::Display for TensorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts = self.terms.iter().map(|(k, c)| {
            let key = k.iter().join(" ⊗ ");
            if c.is_one() {
                key
            } else {
                format!("{}*{}", fmt_coeff(c), key)
            }
        });
        write!(f, "{}", parts.format(" + "))
    }
}

impl fmt::Debug for TensorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TensorPoly[{}]({self})", self.arity)
    }
}

/// A random polynomial with `terms` words of length `1..=max_len` drawn from
/// `letters`, and small coefficients `±c·q^e`.
pub fn random_poly<R: Rng>(
    rng: &mut R,
    cfg: &Arc<CyclotomicConfig>,
    letters: &[Gen],
    terms: usize,
    max_len: usize,
) -> NcPoly {
    let mut p = NcPoly::zero(cfg);
    for _ in 0..terms {
        let len = rng.gen_range(1..=max_len);
        let w = Word((0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect());
        let mag = rng.gen_range(1..=5i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let c = &Scalar::from_integer(cfg, mag) * &Scalar::q_pow(cfg, rng.gen_range(0..cfg.n() as i64));
        p.add_term(w, c);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg3() -> Arc<CyclotomicConfig> {
        CyclotomicConfig::get(3).unwrap()
    }

    fn g(c: &Arc<CyclotomicConfig>, s: &str) -> NcPoly {
        NcPoly::parse_word(c, s).unwrap()
    }

    #[test]
    fn products_and_sums() {
        let c = cfg3();
        let p = &g(&c, "Q1") * &g(&c, "Q2");
        assert_eq!(p, g(&c, "Q1 Q2"));
        let s = &(&g(&c, "Q1") + &g(&c, "Q2")) * &g(&c, "K");
        assert_eq!(s, &g(&c, "Q1 K") + &g(&c, "Q2 K"));
        let qk = g(&c, "K").scale(&Scalar::q_pow(&c, 1));
        let prod = &qk * &g(&c, "K K");
        assert_eq!(prod, g(&c, "K K K").scale(&Scalar::q_pow(&c, 1)));
    }

    #[test]
    fn config_mismatch_is_an_error() {
        let a = NcPoly::gen(&cfg3(), Gen::Q(1));
        let b = NcPoly::gen(&CyclotomicConfig::get(2).unwrap(), Gen::Q(1));
        assert!(a.try_mul(&b).is_err());
        assert!(a.try_add(&b).is_err());
    }

    #[test]
    fn brackets() {
        let c = cfg3();
        let a = &g(&c, "Q1 X2") + &g(&c, "K");
        assert!(commutator(&a, &a).unwrap().is_zero());
        assert_eq!(
            anticommutator(&g(&c, "Q1"), &g(&c, "Q2")).unwrap(),
            &g(&c, "Q1 Q2") + &g(&c, "Q2 Q1")
        );
        assert_eq!(
            commutator(&g(&c, "K"), &g(&c, "Q1")).unwrap(),
            &g(&c, "K Q1") - &g(&c, "Q1 K")
        );
    }

    #[test]
    fn invariant_form_examples() {
        let c2 = CyclotomicConfig::get(2).unwrap();
        assert_eq!(
            s_invariant_form(&[g(&c2, "Q1"), g(&c2, "Q2")]).unwrap(),
            &g(&c2, "Q1 Q2") + &g(&c2, "Q2 Q1")
        );
        let c = cfg3();
        let q1 = g(&c, "Q1");
        assert_eq!(
            s_invariant_form(&[q1.clone(), q1.clone(), q1.clone()]).unwrap(),
            g(&c, "Q1 Q1 Q1").scale(&Scalar::from_integer(&c, 6))
        );
        let (a, b, d) = (g(&c, "Q1"), g(&c, "Q2"), g(&c, "Q3"));
        let form = s_invariant_form(&[a.clone(), b.clone(), d.clone()]).unwrap();
        assert_eq!(form.num_terms(), 6);
        assert_eq!(form, cubic_form_nested(&a, &b, &d).unwrap());
        assert_eq!(
            s_invariant_form(&[a.clone(), b]).unwrap_err(),
            Error::Arity { expected: 3, got: 2 }
        );
    }

    #[test]
    fn grading_rewrite_examples() {
        let c = cfg3();
        let q = Scalar::q_pow(&c, 1);
        assert_eq!(g(&c, "K Q1").normalize_grading(), g(&c, "Q1 K").scale(&q));
        assert_eq!(g(&c, "K K K").normalize_grading(), NcPoly::one(&c));
        assert_eq!(g(&c, "K Q1 K K").normalize_grading(), g(&c, "Q1").scale(&q));
        assert_eq!(g(&c, "la th1").normalize_grading(), g(&c, "th1 la").scale(&q));
        assert_eq!(g(&c, "K X1 X2").normalize_grading(), g(&c, "X1 X2 K"));
        assert_eq!(g(&c, "la x12").normalize_grading(), g(&c, "x12 la"));
    }

    #[test]
    fn word_rendering_round_trip() {
        let w = Word::parse("Q1 Q2 K th1 la x21 z1 X3").unwrap();
        assert_eq!(w.to_string(), "Q1 Q2 K th1 la x21 z1 X3");
        assert_eq!(Word::parse(&w.to_string()).unwrap(), w);
        assert!(Word::parse("Q0").is_none());
        assert!(Word::parse("foo").is_none());
        assert_eq!(Word::parse("1").unwrap(), Word::empty());
    }

    #[test]
    fn alphabet_validation() {
        let c = cfg3();
        let al = Alphabet {
            lie_dim: 3,
            graded: 2,
            matrix_size: 0,
        };
        assert!(al.validate(&g(&c, "X3 Q2 K")).is_ok());
        assert_eq!(
            al.validate(&g(&c, "Q3")).unwrap_err(),
            Error::ForeignGenerator(Gen::Q(3))
        );
    }

    #[test]
    fn tensor_multiplication_has_no_braiding() {
        let c = cfg3();
        let a = TensorPoly::product_of(&[&g(&c, "Q1"), &g(&c, "K")]).unwrap();
        let b = TensorPoly::product_of(&[&g(&c, "K"), &g(&c, "Q2")]).unwrap();
        let ab = &a * &b;
        assert_eq!(ab, TensorPoly::product_of(&[&g(&c, "Q1 K"), &g(&c, "K Q2")]).unwrap());
    }

    fn letters() -> Vec<Gen> {
        vec![Gen::Q(1), Gen::Q(2), Gen::K, Gen::X(1)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn invariant_form_is_symmetric_and_multilinear(seed in any::<u64>()) {
            let c = cfg3();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let args: Vec<NcPoly> = (0..3).map(|_| random_poly(&mut rng, &c, &letters(), 2, 2)).collect();
            let base = s_invariant_form(&args).unwrap();
            let swapped = s_invariant_form(&[args[2].clone(), args[0].clone(), args[1].clone()]).unwrap();
            prop_assert_eq!(&base, &swapped);
            let extra = random_poly(&mut rng, &c, &letters(), 2, 2);
            let k = Scalar::parse(&c, "2 - q").unwrap();
            let mixed = &args[1].scale(&k) + &extra;
            let lhs = s_invariant_form(&[args[0].clone(), mixed, args[2].clone()]).unwrap();
            let rhs = &base.scale(&k) + &s_invariant_form(&[args[0].clone(), extra, args[2].clone()]).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn grading_rewrite_is_idempotent_and_multiplicative(seed in any::<u64>()) {
            let c = cfg3();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_poly(&mut rng, &c, &letters(), 3, 4);
            let b = random_poly(&mut rng, &c, &letters(), 3, 4);
            let na = a.normalize_grading();
            prop_assert_eq!(na.normalize_grading(), na.clone());
            let lhs = (&a * &b).normalize_grading();
            let rhs = (&na * &b.normalize_grading()).normalize_grading();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn multiplication_is_associative_and_distributive(seed in any::<u64>()) {
            let c = cfg3();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_poly(&mut rng, &c, &letters(), 2, 3);
            let b = random_poly(&mut rng, &c, &letters(), 2, 3);
            let d = random_poly(&mut rng, &c, &letters(), 2, 3);
            prop_assert_eq!(&(&a * &b) * &d, &a * &(&b * &d));
            prop_assert_eq!(&a * &(&b + &d), &(&a * &b) + &(&a * &d));
        }

        #[test]
        fn tensor_rewrite_is_per_factor(seed in any::<u64>()) {
            let c = cfg3();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_poly(&mut rng, &c, &letters(), 2, 3);
            let b = random_poly(&mut rng, &c, &letters(), 2, 3);
            let t = TensorPoly::product_of(&[&a, &b]).unwrap().normalize_grading();
            let s = TensorPoly::product_of(&[&a.normalize_grading(), &b.normalize_grading()]).unwrap();
            prop_assert_eq!(t, s);
        }
    }
}
