//! Linear constraint systems for the graded structure constants `b`, their
//! exact solution, and the generalized Jacobi identities.
//!
//! Unknowns are `b^j_{α₁…α_n}` on sorted multi-indices. Two families of rows
//! are generated:
//!
//! * equivariance: for every `i, k` and multi-index `α`,
//!   `Σ_p Σ_σ a^k_{α_p σ} b^i_{α[p→σ]} − Σ_j c^i_{jk} b^j_α = 0`, where `p`
//!   runs over the `n` cyclic placements;
//! * graded Jacobi: for every `τ` and `(n+1)`-index `α`,
//!   `Σ_k Σ_p b^k_{α∖α_p} a^k_{α_p τ} = 0`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::freealg::{commutator, symmetrized_product, Gen, NcPoly};
use crate::liealg::{LieAlgebraData, RepresentationData};
use crate::linalg;
use crate::scalar::{CyclotomicConfig, Scalar};

/// How the equivariance constraint sums over placements of the replaced index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Sum over the `n` cyclic placements.
    #[default]
    Cyclic,
    /// Sum over all `n!` orderings, i.e. the cyclic sum times `(n−1)!`.
    FullSymmetric,
}

impl Convention {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "cyclic" => Ok(Convention::Cyclic),
            "full" | "full_symmetric" | "full-symmetric" => Ok(Convention::FullSymmetric),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Cyclic => "cyclic",
            Convention::FullSymmetric => "full_symmetric",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Equivariance,
    GradedJacobi,
}

/// Which row families to include.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Subsystem {
    EquivarianceOnly,
    GradedJacobiOnly,
    #[default]
    Full,
}

impl Subsystem {
    fn includes(self, f: Family) -> bool {
        matches!(
            (self, f),
            (Subsystem::Full, _)
                | (Subsystem::EquivarianceOnly, Family::Equivariance)
                | (Subsystem::GradedJacobiOnly, Family::GradedJacobi)
        )
    }
}

/// `b^j_α` with 0-based `j` and a sorted 0-based multi-index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Unknown {
    pub j: usize,
    pub alpha: Vec<usize>,
}

impl Unknown {
    pub fn new(j: usize, mut alpha: Vec<usize>) -> Self {
        alpha.sort_unstable();
        Unknown { j, alpha }
    }

    /// Parses labels like `b3_222` (1-based, one digit per index) or
    /// `b3_1,2,12`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::UnknownName(s.to_string());
        let rest = s.trim().strip_prefix('b').ok_or_else(bad)?;
        let (j, idx) = rest.split_once('_').ok_or_else(bad)?;
        let j: usize = j.parse().ok().filter(|&v| v > 0).ok_or_else(bad)?;
        let alpha: Option<Vec<usize>> = if idx.contains(',') {
            idx.split(',').map(|t| t.trim().parse().ok()).collect()
        } else {
            idx.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect()
        };
        let alpha = alpha.filter(|a| !a.is_empty() && a.iter().all(|&v| v > 0)).ok_or_else(bad)?;
        Ok(Unknown::new(j - 1, alpha.into_iter().map(|v| v - 1).collect()))
    }

    pub fn label(&self) -> String {
        let wide = self.alpha.iter().any(|&a| a >= 9);
        let mut idx = self.alpha.iter().map(|a| (a + 1).to_string());
        let idx = if wide { idx.join(",") } else { idx.collect() };
        format!("b{}_{}", self.j + 1, idx)
    }
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for Unknown {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

/// Which equation and index data produced a row. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowOrigin {
    pub family: Family,
    /// `[i, k]` for equivariance rows, `[τ]` for graded-Jacobi rows.
    pub fixed: Vec<usize>,
    /// Sorted multi-index shared by all merged source tuples.
    pub alpha: Vec<usize>,
    /// Number of index orderings merged into this row.
    pub merged: usize,
}

impl fmt::Display for RowOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family {
            Family::Equivariance => "equivariance",
            Family::GradedJacobi => "graded_jacobi",
        };
        write!(
            f,
            "{name}[{}; {}]",
            self.fixed.iter().join(","),
            self.alpha.iter().join("")
        )
    }
}

#[derive(Debug, Clone)]
pub struct LinearSystem {
    cfg: Arc<CyclotomicConfig>,
    pub rows: Vec<Vec<Scalar>>,
    pub unknowns: Vec<Unknown>,
    pub origins: Vec<RowOrigin>,
}

impl LinearSystem {
    pub fn config(&self) -> &Arc<CyclotomicConfig> {
        &self.cfg
    }

    pub fn num_unknowns(&self) -> usize {
        self.unknowns.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.cfg, &self.rows, self.unknowns.len())
    }

    /// Evaluates every row on `x`; returns the rows with nonzero value.
    pub fn residuals(&self, x: &[Scalar]) -> Vec<(RowOrigin, Scalar)> {
        self.rows
            .iter()
            .zip(&self.origins)
            .filter_map(|(row, o)| {
                let v = linalg::dot(row, x);
                (!v.is_zero()).then(|| (o.clone(), v))
            })
            .collect()
    }

    pub fn index_of(&self, u: &Unknown) -> Option<usize> {
        self.unknowns.binary_search(u).ok()
    }
}

fn sorted_multi_indices(size: usize, len: usize) -> Vec<Vec<usize>> {
    (0..size).combinations_with_replacement(len).collect()
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

/// Number of distinct orderings of a sorted multi-index.
fn orderings(alpha: &[usize]) -> usize {
    let mut count = factorial(alpha.len());
    for (_, grp) in &alpha.iter().chunk_by(|&&a| a) {
        count /= factorial(grp.count());
    }
    count as usize
}

/// Unknown labels in the canonical order: by `j`, then multi-index.
pub fn unknowns_for(dim: usize, size: usize, n: usize) -> Vec<Unknown> {
    let idx = sorted_multi_indices(size, n);
    (0..dim)
        .flat_map(|j| idx.iter().map(move |a| Unknown { j, alpha: a.clone() }))
        .collect()
}

/// Builds the homogeneous system for `b`. All orderings of an index tuple give
/// the same row, so one row is emitted per sorted key and the number of merged
/// orderings is kept in the provenance.
pub fn build_constraints(
    g: &LieAlgebraData,
    r: &RepresentationData,
    n: usize,
    convention: Convention,
    subsystem: Subsystem,
) -> Result<LinearSystem> {
    if g.dim() != r.lie_dim() {
        return Err(Error::Dimension(format!(
            "Lie algebra has dimension {} but {} representation matrices were given",
            g.dim(),
            r.lie_dim()
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("grading order {n} < 2")));
    }
    let cfg = g.config().clone();
    let dim = g.dim();
    let size = r.size();
    let unknowns = unknowns_for(dim, size, n);
    let col = |j: usize, alpha: &[usize]| -> usize {
        let mut a = alpha.to_vec();
        a.sort_unstable();
        unknowns
            .binary_search(&Unknown { j, alpha: a })
            .expect("every sorted multi-index is an unknown")
    };
    let mult = match convention {
        Convention::Cyclic => Scalar::one(&cfg),
        Convention::FullSymmetric => Scalar::from_integer(&cfg, factorial(n - 1)),
    };
    let mut rows = Vec::new();
    let mut origins = Vec::new();

    if subsystem.includes(Family::Equivariance) {
        for i in 0..dim {
            for k in 0..dim {
                for alpha in sorted_multi_indices(size, n) {
                    let mut row = vec![Scalar::zero(&cfg); unknowns.len()];
                    for p in 0..n {
                        for s in 0..size {
                            let v = r.a(k, alpha[p], s);
                            if v.is_zero() {
                                continue;
                            }
                            let mut m = alpha.clone();
                            m[p] = s;
                            let c = col(i, &m);
                            row[c] = &row[c] + &(v * &mult);
                        }
                    }
                    for j in 0..dim {
                        let v = g.c(i, j, k);
                        if !v.is_zero() {
                            let c = col(j, &alpha);
                            row[c] = &row[c] - v;
                        }
                    }
                    origins.push(RowOrigin {
                        family: Family::Equivariance,
                        fixed: vec![i + 1, k + 1],
                        merged: orderings(&alpha),
                        alpha: alpha.iter().map(|a| a + 1).collect(),
                    });
                    rows.push(row);
                }
            }
        }
    }

    if subsystem.includes(Family::GradedJacobi) {
        for tau in 0..size {
            for alpha in sorted_multi_indices(size, n + 1) {
                let mut row = vec![Scalar::zero(&cfg); unknowns.len()];
                for k in 0..dim {
                    for p in 0..=n {
                        let v = r.a(k, alpha[p], tau);
                        if v.is_zero() {
                            continue;
                        }
                        let mut m = alpha.clone();
                        m.remove(p);
                        let c = col(k, &m);
                        row[c] = &row[c] + v;
                    }
                }
                origins.push(RowOrigin {
                    family: Family::GradedJacobi,
                    fixed: vec![tau + 1],
                    merged: orderings(&alpha),
                    alpha: alpha.iter().map(|a| a + 1).collect(),
                });
                rows.push(row);
            }
        }
    }

    Ok(LinearSystem {
        cfg,
        rows,
        unknowns,
        origins,
    })
}

/// Exact basis of the solution space, one vector per free unknown.
pub fn nullspace(sys: &LinearSystem) -> Vec<Vec<Scalar>> {
    linalg::nullspace(&sys.cfg, &sys.rows, sys.unknowns.len())
}

/// Fixes one coordinate of a one-dimensional solution space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pin {
    pub unknown: Unknown,
    pub value: Scalar,
}

impl Pin {
    /// Parses `b3_222=6`.
    pub fn parse(cfg: &Arc<CyclotomicConfig>, s: &str) -> Result<Self> {
        let (lhs, rhs) = s
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("pin `{s}` is not of the form b<j>_<idx>=<value>")))?;
        let unknown = Unknown::parse(lhs)?;
        let value = Scalar::parse(cfg, rhs.trim())?;
        if value.is_zero() {
            return Err(Error::InvalidParameter("pin value must be nonzero".into()));
        }
        Ok(Pin { unknown, value })
    }
}

impl fmt::Display for Pin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.unknown, self.value)
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub convention: Convention,
    pub subsystem: Subsystem,
    /// When absent, the first nonzero coordinate is set to 1.
    pub pin: Option<Pin>,
}

/// Sparse view of a solution vector: nonzero `(label, value)` pairs.
pub type LabeledVector = Vec<(Unknown, Scalar)>;

fn labeled(unknowns: &[Unknown], v: &[Scalar]) -> LabeledVector {
    unknowns
        .iter()
        .zip(v)
        .filter(|(_, x)| !x.is_zero())
        .map(|(u, x)| (u.clone(), x.clone()))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionReport {
    pub convention: Convention,
    pub subsystem: Subsystem,
    pub unknowns: usize,
    pub rows: usize,
    pub rank: usize,
    pub dimension: usize,
    pub basis: Vec<LabeledVector>,
    pub normalized: Option<LabeledVector>,
    pub normalization_error: Option<String>,
    /// Every basis vector (and the normalized one) satisfies every row.
    pub residual_check: bool,
}

impl SolutionReport {
    /// Coefficient of `label` in the normalized solution (0 when absent).
    pub fn normalized_value(&self, u: &Unknown) -> Option<&Scalar> {
        self.normalized
            .as_ref()?
            .iter()
            .find(|(k, _)| k == u)
            .map(|(_, v)| v)
    }
}

pub fn solve_structure_constants(
    g: &LieAlgebraData,
    r: &RepresentationData,
    n: usize,
    opts: &SolveOptions,
) -> Result<(LinearSystem, SolutionReport)> {
    let sys = build_constraints(g, r, n, opts.convention, opts.subsystem)?;
    let basis = nullspace(&sys);
    let rank = sys.num_unknowns() - basis.len();
    let mut residual_check = basis.iter().all(|v| sys.residuals(v).is_empty());
    let mut normalized = None;
    let mut normalization_error = None;
    if basis.len() == 1 {
        let v = &basis[0];
        let (idx, target) = match &opts.pin {
            Some(pin) => match sys.index_of(&pin.unknown) {
                Some(i) => (Some(i), pin.value.clone()),
                None => {
                    normalization_error = Some(format!("{} is not an unknown of this system", pin.unknown));
                    (None, pin.value.clone())
                }
            },
            None => (v.iter().position(|x| !x.is_zero()), Scalar::one(sys.config())),
        };
        if let Some(i) = idx {
            if v[i].is_zero() {
                normalization_error = Some(format!(
                    "{} has zero coefficient in the solution",
                    sys.unknowns[i]
                ));
            } else {
                let scale = &target * &v[i].inv()?;
                let w: Vec<Scalar> = v.iter().map(|x| x * &scale).collect();
                residual_check &= sys.residuals(&w).is_empty();
                normalized = Some(labeled(&sys.unknowns, &w));
            }
        }
    }
    let report = SolutionReport {
        convention: opts.convention,
        subsystem: opts.subsystem,
        unknowns: sys.num_unknowns(),
        rows: sys.num_rows(),
        rank,
        dimension: basis.len(),
        basis: basis.iter().map(|v| labeled(&sys.unknowns, v)).collect(),
        normalized,
        normalization_error,
        residual_check,
    };
    Ok((sys, report))
}

/// The full datum `(c, a, b, n)`.
#[derive(Debug, Clone)]
pub struct GradedAlgebraSpec {
    pub g: LieAlgebraData,
    pub r: RepresentationData,
    pub n: usize,
    b: BTreeMap<Unknown, Scalar>,
}

impl GradedAlgebraSpec {
    /// All `b` zero.
    pub fn new(g: LieAlgebraData, r: RepresentationData, n: usize) -> Self {
        GradedAlgebraSpec {
            g,
            r,
            n,
            b: BTreeMap::new(),
        }
    }

    pub fn with_b(mut self, entries: impl IntoIterator<Item = (Unknown, Scalar)>) -> Self {
        for (u, v) in entries {
            self.set_b(u, v);
        }
        self
    }

    pub fn config(&self) -> &Arc<CyclotomicConfig> {
        self.g.config()
    }

    /// `b^j_α`; `alpha` need not be sorted.
    pub fn b(&self, j: usize, alpha: &[usize]) -> Scalar {
        self.b
            .get(&Unknown::new(j, alpha.to_vec()))
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.config()))
    }

    pub fn set_b(&mut self, u: Unknown, v: Scalar) {
        if v.is_zero() {
            self.b.remove(&u);
        } else {
            self.b.insert(u, v);
        }
    }

    pub fn nonzero_b(&self) -> impl Iterator<Item = (&Unknown, &Scalar)> {
        self.b.iter()
    }

    /// `Σ_j b^j_α X_j` as a free-algebra element.
    pub fn invariant_form_image(&self, alpha: &[usize]) -> NcPoly {
        let cfg = self.config();
        let mut p = NcPoly::zero(cfg);
        for j in 0..self.g.dim() {
            p.add_term(crate::freealg::Word::letter(Gen::X(j as u16 + 1)), self.b(j, alpha));
        }
        p
    }

    /// `[Q_α, X_j] = Σ_β a^j_{αβ} Q_β`.
    pub fn action(&self, alpha: usize, j: usize) -> NcPoly {
        let cfg = self.config();
        let mut p = NcPoly::zero(cfg);
        for beta in 0..self.r.size() {
            p.add_term(
                crate::freealg::Word::letter(Gen::Q(beta as u16 + 1)),
                self.r.a(j, alpha, beta).clone(),
            );
        }
        p
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ActionEntry {
    pub alpha: usize,
    pub j: usize,
    pub image: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradedSpecReport {
    pub rows_checked: usize,
    pub residuals: Vec<(RowOrigin, Scalar)>,
    /// Nonzero brackets `[Q_α, X_j]`, 1-based.
    pub action: Vec<ActionEntry>,
    pub pass: bool,
}

/// Substitutes the given `b` into every constraint row.
pub fn verify_graded_spec(spec: &GradedAlgebraSpec, convention: Convention) -> Result<GradedSpecReport> {
    let sys = build_constraints(&spec.g, &spec.r, spec.n, convention, Subsystem::Full)?;
    let x: Vec<Scalar> = sys.unknowns.iter().map(|u| spec.b(u.j, &u.alpha)).collect();
    let residuals = sys.residuals(&x);
    let mut action = Vec::new();
    for alpha in 0..spec.r.size() {
        for j in 0..spec.g.dim() {
            let img = spec.action(alpha, j);
            if !img.is_zero() {
                action.push(ActionEntry {
                    alpha: alpha + 1,
                    j: j + 1,
                    image: img.to_string(),
                });
            }
        }
    }
    Ok(GradedSpecReport {
        rows_checked: sys.num_rows(),
        pass: residuals.is_empty(),
        residuals,
        action,
    })
}

/// `[A,[B,C]] + [C,[A,B]] + [B,[C,A]]`.
pub fn verify_identity_j1(a: &NcPoly, b: &NcPoly, c: &NcPoly) -> Result<NcPoly> {
    let t1 = commutator(a, &commutator(b, c)?)?;
    let t2 = commutator(c, &commutator(a, b)?)?;
    let t3 = commutator(b, &commutator(c, a)?)?;
    t1.try_add(&t2)?.try_add(&t3)
}

/// `[A, {B₁…B_m}] + Σ_i {B₁, …, [B_i, A], …, B_m}` with the fully
/// symmetrized product.
pub fn verify_identity_j2_general(a: &NcPoly, bs: &[NcPoly]) -> Result<NcPoly> {
    let mut acc = commutator(a, &symmetrized_product(bs)?)?;
    for i in 0..bs.len() {
        let mut args = bs.to_vec();
        args[i] = commutator(&bs[i], a)?;
        acc = acc.try_add(&symmetrized_product(&args)?)?;
    }
    Ok(acc)
}

/// `Σ_i [A_i, {A₁, …, Â_i, …}]` over all `m+1` arguments.
pub fn verify_identity_j3_general(args: &[NcPoly]) -> Result<NcPoly> {
    let first = args.first().ok_or(Error::Arity { expected: 2, got: 0 })?;
    let mut acc = NcPoly::zero(first.config());
    for i in 0..args.len() {
        let rest: Vec<NcPoly> = args
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, p)| p.clone())
            .collect();
        acc = acc.try_add(&commutator(&args[i], &symmetrized_product(&rest)?)?)?;
    }
    Ok(acc)
}

/// `[A,{B,C,D}] + {[B,A],C,D} + {B,[C,A],D} + {B,C,[D,A]}` with the cubic
/// invariant form.
pub fn verify_identity_j2(a: &NcPoly, b: &NcPoly, c: &NcPoly, d: &NcPoly) -> Result<NcPoly> {
    verify_identity_j2_general(a, &[b.clone(), c.clone(), d.clone()])
}

/// `[A,{B,C,D}] + [B,{A,C,D}] + [C,{B,A,D}] + [D,{B,C,A}]`.
pub fn verify_identity_j3(a: &NcPoly, b: &NcPoly, c: &NcPoly, d: &NcPoly) -> Result<NcPoly> {
    verify_identity_j3_general(&[a.clone(), b.clone(), c.clone(), d.clone()])
}
