//! Lie algebra structure constants, representation matrices, the built-in
//! `sl(2)` data, and the line-oriented spec-file format.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::dualside::DualKind;
use crate::error::{Error, Result};
use crate::scalar::{CyclotomicConfig, Scalar};

pub type Matrix = Vec<Vec<Scalar>>;

/// Structure constants `c[k][i][j] = c^k_{ij}`, stored densely with 0-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebraData {
    dim: usize,
    c: Vec<Vec<Vec<Scalar>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// 1-based indices of the offending entry or identity instance.
    pub indices: Vec<usize>,
    pub residual: Scalar,
}

impl LieAlgebraData {
    pub fn zero(cfg: &Arc<CyclotomicConfig>, dim: usize) -> Self {
        LieAlgebraData {
            dim,
            c: vec![vec![vec![Scalar::zero(cfg); dim]; dim]; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn config(&self) -> &Arc<CyclotomicConfig> {
        self.c[0][0][0].config()
    }

    /// `c^k_{ij}` with 0-based indices.
    pub fn c(&self, k: usize, i: usize, j: usize) -> &Scalar {
        &self.c[k][i][j]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, v: Scalar) {
        self.c[k][i][j] = v;
    }

    /// Sets `c^k_{ij} = v` and `c^k_{ji} = −v`.
    pub fn set_antisymmetric(&mut self, k: usize, i: usize, j: usize, v: Scalar) {
        self.c[k][j][i] = -&v;
        self.c[k][i][j] = v;
    }

    pub fn antisymmetry_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for k in 0..self.dim {
            for i in 0..self.dim {
                for j in i..self.dim {
                    let r = &self.c[k][i][j] + &self.c[k][j][i];
                    if !r.is_zero() {
                        out.push(Violation {
                            indices: vec![k + 1, i + 1, j + 1],
                            residual: r,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn jacobi_violations(&self) -> Vec<Violation> {
        let d = self.dim;
        let cfg = self.config().clone();
        let mut out = Vec::new();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut acc = Scalar::zero(&cfg);
                        for m in 0..d {
                            acc = &acc + &(&self.c[m][i][j] * &self.c[l][m][k]);
                            acc = &acc + &(&self.c[m][j][k] * &self.c[l][m][i]);
                            acc = &acc + &(&self.c[m][k][i] * &self.c[l][m][j]);
                        }
                        if !acc.is_zero() {
                            out.push(Violation {
                                indices: vec![i + 1, j + 1, k + 1, l + 1],
                                residual: acc,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Matrices `a[j][α][β] = a^j_{αβ}`, one `N×N` matrix per Lie generator.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationData {
    size: usize,
    a: Vec<Matrix>,
}

impl RepresentationData {
    pub fn zero(cfg: &Arc<CyclotomicConfig>, dim: usize, size: usize) -> Self {
        RepresentationData {
            size,
            a: vec![vec![vec![Scalar::zero(cfg); size]; size]; dim],
        }
    }

    pub fn from_matrices(size: usize, a: Vec<Matrix>) -> Result<Self> {
        for m in &a {
            if m.len() != size || m.iter().any(|r| r.len() != size) {
                return Err(Error::Dimension(format!("expected {size}x{size} matrices")));
            }
        }
        Ok(RepresentationData { size, a })
    }

    /// `N`, the number of graded generators.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn lie_dim(&self) -> usize {
        self.a.len()
    }

    /// `a^j_{αβ}` with 0-based indices.
    pub fn a(&self, j: usize, alpha: usize, beta: usize) -> &Scalar {
        &self.a[j][alpha][beta]
    }

    pub fn matrix(&self, j: usize) -> &Matrix {
        &self.a[j]
    }

    pub fn set(&mut self, j: usize, alpha: usize, beta: usize, v: Scalar) {
        self.a[j][alpha][beta] = v;
    }
}

/// The standard `sl(2)` basis with `[X1,X2] = X3`, `[X3,X1] = 2X1`, `[X3,X2] = −2X2`.
pub fn builtin_sl2(cfg: &Arc<CyclotomicConfig>) -> LieAlgebraData {
    let mut g = LieAlgebraData::zero(cfg, 3);
    g.set_antisymmetric(2, 0, 1, Scalar::from_integer(cfg, 1));
    g.set_antisymmetric(0, 2, 0, Scalar::from_integer(cfg, 2));
    g.set_antisymmetric(1, 2, 1, Scalar::from_integer(cfg, -2));
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepName {
    /// `N` copies of the trivial representation.
    Scalar(usize),
    Spinor,
    SpinorPlusScalar,
    Vector,
}

impl RepName {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "spinor" => return Ok(RepName::Spinor),
            "spinor_plus_scalar" => return Ok(RepName::SpinorPlusScalar),
            "vector" => return Ok(RepName::Vector),
            _ => {}
        }
        if let Some(inner) = s.strip_prefix("scalar(").and_then(|r| r.strip_suffix(')')) {
            if let Ok(n) = inner.trim().parse::<usize>() {
                if n > 0 {
                    return Ok(RepName::Scalar(n));
                }
            }
        }
        Err(Error::UnknownName(s.to_string()))
    }

    pub fn size(self) -> usize {
        match self {
            RepName::Scalar(n) => n,
            RepName::Spinor => 2,
            RepName::SpinorPlusScalar | RepName::Vector => 3,
        }
    }
}

impl fmt::Display for RepName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepName::Scalar(n) => write!(f, "scalar({n})"),
            RepName::Spinor => write!(f, "spinor"),
            RepName::SpinorPlusScalar => write!(f, "spinor_plus_scalar"),
            RepName::Vector => write!(f, "vector"),
        }
    }
}

/// Built-in representations of [`builtin_sl2`].
pub fn builtin_rep(cfg: &Arc<CyclotomicConfig>, name: RepName) -> RepresentationData {
    let mut r = RepresentationData::zero(cfg, 3, name.size());
    let int = |v| Scalar::from_integer(cfg, v);
    match name {
        RepName::Scalar(_) => {}
        RepName::Spinor | RepName::SpinorPlusScalar => {
            r.set(0, 0, 1, int(1));
            r.set(1, 1, 0, int(1));
            r.set(2, 0, 0, int(1));
            r.set(2, 1, 1, int(-1));
        }
        RepName::Vector => {
            let s = Scalar::sqrt2(cfg);
            r.set(0, 1, 0, s.clone());
            r.set(0, 2, 1, s.clone());
            r.set(1, 0, 1, s.clone());
            r.set(1, 1, 2, s);
            r.set(2, 0, 0, int(-2));
            r.set(2, 2, 2, int(2));
        }
    }
    r
}

#[derive(Debug, Clone, Serialize)]
pub struct RepresentationReport {
    /// `(i, j, α, β)` quadruples (1-based) where `[a^i, a^j] ≠ c^k_{ij} a^k`.
    pub violations: Vec<Violation>,
}

impl RepresentationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `Σ_σ (a^i_{ασ} a^j_{σβ} − a^j_{ασ} a^i_{σβ}) = Σ_k c^k_{ij} a^k_{αβ}`.
pub fn check_representation(g: &LieAlgebraData, r: &RepresentationData) -> Result<RepresentationReport> {
    if g.dim() != r.lie_dim() {
        return Err(Error::Dimension(format!(
            "Lie algebra has dimension {} but {} representation matrices were given",
            g.dim(),
            r.lie_dim()
        )));
    }
    let cfg = g.config().clone();
    let n = r.size();
    let mut violations = Vec::new();
    for i in 0..g.dim() {
        for j in 0..g.dim() {
            for al in 0..n {
                for be in 0..n {
                    let mut acc = Scalar::zero(&cfg);
                    for s in 0..n {
                        acc = &acc + &(r.a(i, al, s) * r.a(j, s, be));
                        acc = &acc - &(r.a(j, al, s) * r.a(i, s, be));
                    }
                    for k in 0..g.dim() {
                        acc = &acc - &(g.c(k, i, j) * r.a(k, al, be));
                    }
                    if !acc.is_zero() {
                        violations.push(Violation {
                            indices: vec![i + 1, j + 1, al + 1, be + 1],
                            residual: acc,
                        });
                    }
                }
            }
        }
    }
    Ok(RepresentationReport { violations })
}

/// A parsed algebra spec file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSpec {
    pub g: LieAlgebraData,
    pub r: RepresentationData,
    pub n: u32,
    pub dual: Option<DualKind>,
    /// Set when the file used the one-line built-in alias.
    pub builtin: Option<RepName>,
}

impl ParsedSpec {
    pub fn graded(&self) -> usize {
        self.r.size()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

fn diag(line: usize, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        line: Some(line),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Algebra,
    Representation,
    Grading,
}

fn parse_kv(line: &str) -> Option<(&str, &str)> {
    let (k, v) = line.split_once('=')?;
    Some((k.trim(), v.trim()))
}

fn parse_alias(line_no: usize, line: &str) -> Result<ParsedSpec, Vec<Diagnostic>> {
    let mut toks = line.split_whitespace();
    toks.next(); // "sl2"
    let rep_tok = toks
        .next()
        .ok_or_else(|| vec![diag(line_no, "alias needs a representation name")])?;
    let mut n = 3u32;
    let mut size = None;
    let mut dual = None;
    for t in toks {
        let Some((k, v)) = parse_kv(t) else {
            return Err(vec![diag(line_no, format!("unexpected token `{t}`"))]);
        };
        match k {
            "n" => n = v.parse().map_err(|_| vec![diag(line_no, "bad value for n")])?,
            "N" => size = Some(v.parse().map_err(|_| vec![diag(line_no, "bad value for N")])?),
            "dual" => {
                dual = Some(DualKind::parse(v).map_err(|e| vec![diag(line_no, e.to_string())])?)
            }
            _ => return Err(vec![diag(line_no, format!("unknown alias key `{k}`"))]),
        }
    }
    let rep = match (rep_tok, size) {
        ("scalar", Some(s)) if s > 0 => RepName::Scalar(s),
        ("scalar", _) => return Err(vec![diag(line_no, "scalar representation needs N=<size>")]),
        (other, _) => RepName::parse(other).map_err(|e| vec![diag(line_no, e.to_string())])?,
    };
    if let Some(s) = size {
        if s != rep.size() {
            return Err(vec![diag(
                line_no,
                format!("representation {rep} has size {}, not {s}", rep.size()),
            )]);
        }
    }
    let cfg = CyclotomicConfig::get(n).map_err(|e| vec![diag(line_no, e.to_string())])?;
    Ok(ParsedSpec {
        g: builtin_sl2(&cfg),
        r: builtin_rep(&cfg, rep),
        n,
        dual,
        builtin: Some(rep),
    })
}

/// Parses the spec-file format.
///
/// ```text
/// [algebra]
/// dim = 3
/// c 3 1 2 = 1
/// c 3 2 1 = -1
/// [representation]
/// N = 2
/// a 1 1 2 = 1
/// [grading]
/// n = 3
/// dual = sl2_spinor
/// ```
///
/// Unlisted entries are zero. A file may instead consist of the one-line alias
/// `sl2 <rep> [N=<size>] [n=<order>] [dual=<kind>]`. Lines starting with `#`
/// are comments. Parsed data is validated (antisymmetry, Jacobi, and the
/// representation property); violations are returned as diagnostics.
pub fn parse_spec(text: &str) -> Result<ParsedSpec, Vec<Diagnostic>> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    if let Some(&(no, first)) = lines.first() {
        if first.starts_with("sl2 ") || first == "sl2" {
            if let Some(&(extra, _)) = lines.get(1) {
                return Err(vec![diag(extra, "nothing may follow the built-in alias line")]);
            }
            return parse_alias(no, first);
        }
    }

    let mut diags = Vec::new();
    // first pass: scalars need the grading order
    let mut section = Section::None;
    let mut n = None;
    let mut dim = None;
    let mut size = None;
    let mut dual = None;
    let mut c_entries: Vec<(usize, [usize; 3], &str)> = Vec::new();
    let mut a_entries: Vec<(usize, [usize; 3], &str)> = Vec::new();
    for &(no, line) in &lines {
        match line {
            "[algebra]" => {
                section = Section::Algebra;
                continue;
            }
            "[representation]" => {
                section = Section::Representation;
                continue;
            }
            "[grading]" => {
                section = Section::Grading;
                continue;
            }
            _ => {}
        }
        if line.starts_with('[') {
            diags.push(diag(no, format!("unknown section {line}")));
            continue;
        }
        let Some((key, value)) = parse_kv(line) else {
            diags.push(diag(no, "expected `key = value`"));
            continue;
        };
        let mut head = key.split_whitespace();
        let name = head.next().unwrap_or("");
        let idx: Vec<&str> = head.collect();
        let expect_usize = |v: &str, diags: &mut Vec<Diagnostic>| match v.parse::<usize>() {
            Ok(x) if x > 0 => Some(x),
            _ => {
                diags.push(diag(no, format!("expected a positive integer, got `{v}`")));
                None
            }
        };
        match (section, name, idx.len()) {
            (Section::Algebra, "dim", 0) => dim = expect_usize(value, &mut diags),
            (Section::Algebra, "c", 3) | (Section::Representation, "a", 3) => {
                let parsed: Option<Vec<usize>> =
                    idx.iter().map(|s| s.parse().ok().filter(|&v: &usize| v > 0)).collect();
                match parsed {
                    Some(v) => {
                        let e = (no, [v[0], v[1], v[2]], value);
                        if name == "c" {
                            c_entries.push(e)
                        } else {
                            a_entries.push(e)
                        }
                    }
                    None => diags.push(diag(no, "indices must be positive integers")),
                }
            }
            (Section::Representation, "N", 0) => size = expect_usize(value, &mut diags),
            (Section::Grading, "n", 0) => {
                n = expect_usize(value, &mut diags).map(|v| v as u32);
            }
            (Section::Grading, "dual", 0) => match DualKind::parse(value) {
                Ok(d) => dual = Some(d),
                Err(e) => diags.push(diag(no, e.to_string())),
            },
            (Section::None, _, _) => diags.push(diag(no, "entry outside of any section")),
            _ => diags.push(diag(no, format!("unexpected entry `{key}`"))),
        }
    }
    let n = n.unwrap_or(3);
    let cfg = match CyclotomicConfig::get(n) {
        Ok(c) => c,
        Err(e) => {
            diags.push(Diagnostic {
                line: None,
                message: e.to_string(),
            });
            return Err(diags);
        }
    };
    let Some(dim) = dim else {
        diags.push(Diagnostic {
            line: None,
            message: "missing `dim` in [algebra]".into(),
        });
        return Err(diags);
    };
    let size = size.unwrap_or(0);
    let mut g = LieAlgebraData::zero(&cfg, dim);
    let mut r = RepresentationData::zero(&cfg, dim, size);
    let mut c_lines = BTreeMap::new();
    for (no, [k, i, j], v) in c_entries {
        if k > dim || i > dim || j > dim {
            diags.push(diag(no, format!("index out of range for dim = {dim}")));
            continue;
        }
        if c_lines.insert((k, i, j), no).is_some() {
            diags.push(diag(no, "duplicate structure constant"));
        }
        match Scalar::parse(&cfg, v) {
            Ok(s) => g.set(k - 1, i - 1, j - 1, s),
            Err(e) => diags.push(diag(no, e.to_string())),
        }
    }
    let mut a_lines = BTreeMap::new();
    for (no, [j, al, be], v) in a_entries {
        if j > dim || al > size || be > size {
            diags.push(diag(no, format!("index out of range for dim = {dim}, N = {size}")));
            continue;
        }
        if a_lines.insert((j, al, be), no).is_some() {
            diags.push(diag(no, "duplicate representation entry"));
        }
        match Scalar::parse(&cfg, v) {
            Ok(s) => r.set(j - 1, al - 1, be - 1, s),
            Err(e) => diags.push(diag(no, e.to_string())),
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    for v in g.antisymmetry_violations() {
        let (k, i, j) = (v.indices[0], v.indices[1], v.indices[2]);
        let line = c_lines.get(&(k, i, j)).or_else(|| c_lines.get(&(k, j, i))).copied();
        diags.push(Diagnostic {
            line,
            message: format!("antisymmetry violated: c{k}_{i}{j} + c{k}_{j}{i} = {}", v.residual),
        });
    }
    if diags.is_empty() {
        for v in g.jacobi_violations().into_iter().take(5) {
            diags.push(Diagnostic {
                line: None,
                message: format!("Jacobi identity violated at {:?}: {}", v.indices, v.residual),
            });
        }
    }
    if diags.is_empty() && size > 0 {
        let rep = check_representation(&g, &r).expect("dimensions agree by construction");
        for v in rep.violations.into_iter().take(5) {
            diags.push(Diagnostic {
                line: None,
                message: format!(
                    "representation property violated at (i,j,α,β) = {:?}: residual {}",
                    v.indices, v.residual
                ),
            });
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(ParsedSpec {
        g,
        r,
        n,
        dual,
        builtin: None,
    })
}

/// Canonical explicit form of a spec; [`parse_spec`] reads it back unchanged.
pub fn serialize_spec(spec: &ParsedSpec) -> String {
    let mut out = String::new();
    let d = spec.g.dim();
    writeln!(out, "[algebra]\ndim = {d}").unwrap();
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let v = spec.g.c(k, i, j);
                if !v.is_zero() {
                    writeln!(out, "c {} {} {} = {v}", k + 1, i + 1, j + 1).unwrap();
                }
            }
        }
    }
    let n = spec.r.size();
    writeln!(out, "[representation]\nN = {n}").unwrap();
    for j in 0..spec.r.lie_dim() {
        for al in 0..n {
            for be in 0..n {
                let v = spec.r.a(j, al, be);
                if !v.is_zero() {
                    writeln!(out, "a {} {} {} = {v}", j + 1, al + 1, be + 1).unwrap();
                }
            }
        }
    }
    writeln!(out, "[grading]\nn = {}", spec.n).unwrap();
    if let Some(dual) = spec.dual {
        writeln!(out, "dual = {dual}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> Arc<CyclotomicConfig> {
        CyclotomicConfig::get(3).unwrap()
    }

    #[test]
    fn sl2_constants() {
        let c = cfg();
        let g = builtin_sl2(&c);
        assert!(g.c(2, 0, 1).is_one());
        assert_eq!(*g.c(2, 1, 0), Scalar::from_integer(&c, -1));
        assert!(g.c(0, 0, 1).is_zero());
        assert_eq!(*g.c(0, 2, 0), Scalar::from_integer(&c, 2));
        assert_eq!(*g.c(1, 2, 1), Scalar::from_integer(&c, -2));
        assert!(g.antisymmetry_violations().is_empty());
        assert!(g.jacobi_violations().is_empty());
    }

    #[test]
    fn builtin_reps_are_representations() {
        let c = cfg();
        let g = builtin_sl2(&c);
        for name in [
            RepName::Scalar(1),
            RepName::Scalar(2),
            RepName::Scalar(3),
            RepName::Spinor,
            RepName::SpinorPlusScalar,
            RepName::Vector,
        ] {
            let r = builtin_rep(&c, name);
            assert!(check_representation(&g, &r).unwrap().is_valid(), "{name}");
        }
        let spinor = builtin_rep(&c, RepName::Spinor);
        assert_eq!(*spinor.a(2, 0, 0), Scalar::from_integer(&c, 1));
        assert_eq!(*spinor.a(2, 1, 1), Scalar::from_integer(&c, -1));
        let vector = builtin_rep(&c, RepName::Vector);
        let diag: Vec<String> = (0..3).map(|i| vector.a(2, i, i).to_string()).collect();
        assert_eq!(diag, ["-2", "0", "2"]);
        let sc = builtin_rep(&c, RepName::Scalar(2));
        assert!((0..3).all(|j| sc.matrix(j).iter().flatten().all(Scalar::is_zero)));
    }

    #[test]
    fn broken_spinor_is_rejected() {
        let c = cfg();
        let g = builtin_sl2(&c);
        let mut r = builtin_rep(&c, RepName::Spinor);
        r.set(2, 1, 1, Scalar::one(&c));
        let rep = check_representation(&g, &r).unwrap();
        assert!(!rep.is_valid());
        assert!(rep.violations.iter().any(|v| v.indices[0] == 3 && v.indices[1] == 1));
    }

    #[test]
    fn dimension_mismatch() {
        let c = cfg();
        let g = LieAlgebraData::zero(&c, 2);
        let r = builtin_rep(&c, RepName::Spinor);
        assert!(matches!(check_representation(&g, &r), Err(Error::Dimension(_))));
    }

    #[test]
    fn alias_matches_builtins() {
        let spec = parse_spec("sl2 spinor n=3").unwrap();
        let c = cfg();
        assert_eq!(spec.g, builtin_sl2(&c));
        assert_eq!(spec.r, builtin_rep(&c, RepName::Spinor));
        assert_eq!(spec.n, 3);
        let sc = parse_spec("sl2 scalar N=2 n=3").unwrap();
        assert_eq!(sc.r.size(), 2);
        assert!(parse_spec("sl2 scalar n=3").is_err());
        assert!(parse_spec("sl2 tensor n=3").is_err());
    }

    #[test]
    fn explicit_listing_round_trips() {
        let text = "\
# sl(2) with the vector representation
[algebra]
dim = 3
c 3 1 2 = 1
c 3 2 1 = -1
c 1 3 1 = 2
c 1 1 3 = -2
c 2 3 2 = -2
c 2 2 3 = 2
[representation]
N = 3
a 1 2 1 = r2
a 1 3 2 = r2
a 2 1 2 = r2
a 2 2 3 = r2
a 3 1 1 = -2
a 3 3 3 = 2
[grading]
n = 3
";
        let spec = parse_spec(text).unwrap();
        let c = cfg();
        assert_eq!(spec.g, builtin_sl2(&c));
        assert_eq!(spec.r, builtin_rep(&c, RepName::Vector));
        let canon = serialize_spec(&spec);
        let again = parse_spec(&canon).unwrap();
        assert_eq!(again, spec);
        assert_eq!(serialize_spec(&again), canon);
    }

    #[test]
    fn antisymmetry_diagnostic_has_line() {
        let text = "[algebra]\ndim = 3\nc 3 1 2 = 1\nc 3 2 1 = 1\n[grading]\nn = 3\n";
        let diags = parse_spec(text).unwrap_err();
        assert!(diags.iter().any(|d| d.message.contains("antisymmetry") && d.line == Some(3)));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = "[algebra]\ndim = 3\nc 3 1 = 1\n[bogus]\n";
        let diags = parse_spec(text).unwrap_err();
        assert_eq!(diags.iter().filter_map(|d| d.line).collect::<Vec<_>>(), vec![3, 4]);
        let bad_scalar = "[algebra]\ndim = 1\nc 1 1 1 = 2 +\n";
        assert_eq!(parse_spec(bad_scalar).unwrap_err()[0].line, Some(3));
    }
}
