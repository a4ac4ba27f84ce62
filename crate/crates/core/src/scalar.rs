//! Exact arithmetic in `Q(q) ⊗ Q(√2)`, where `q` is a primitive `n`-th root of unity.
//!
//! An element is stored as a grid of rationals indexed by the power of `q`
//! (below the totient of `n`) and the power of `s = √2` (0 or 1). The grid is
//! kept fully reduced modulo the `n`-th cyclotomic polynomial and `s² − 2`, so
//! structural equality is field equality.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("grading order must be at least 2, got {0}")]
    InvalidOrder(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is a zero divisor in Q(q_{n}) ⊗ Q(√2) and has no inverse")]
    NotInvertible { n: u32 },
    #[error("cyclotomic order mismatch: {left} vs {right}")]
    OrderMismatch { left: u32, right: u32 },
    #[error("coefficient grid has {got} rows, expected {expected}")]
    GridShape { expected: usize, got: usize },
    #[error("scalar literal error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// The coefficient field for a fixed grading order `n`.
#[derive(Debug)]
pub struct CyclotomicConfig {
    n: u32,
    /// Coefficients of the `n`-th cyclotomic polynomial, constant term first.
    phi: Vec<BigRational>,
    /// `reduce[k]` is `q^k mod phi` for `0 <= k < max(2·totient − 1, n)`.
    reduce: Vec<Vec<BigRational>>,
}

fn config_cache() -> &'static Mutex<HashMap<u32, Arc<CyclotomicConfig>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<CyclotomicConfig>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    // den is monic
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return vec![BigInt::zero()];
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, d) in den.iter().enumerate() {
            rem[i + j] -= &c * d;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

fn cyclotomic_integer(n: u32) -> Vec<BigInt> {
    // x^n - 1 = prod_{d | n} Phi_d(x)
    let mut p = vec![BigInt::zero(); n as usize + 1];
    p[0] = -BigInt::one();
    p[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = poly_div_exact(&p, &cyclotomic_integer(d));
        }
    }
    p
}

impl CyclotomicConfig {
    /// Returns the shared configuration for order `n`.
    pub fn get(n: u32) -> Result<Arc<Self>, ScalarError> {
        if n < 2 {
            return Err(ScalarError::InvalidOrder(n));
        }
        let mut cache = config_cache().lock().expect("cyclotomic cache poisoned");
        if let Some(cfg) = cache.get(&n) {
            return Ok(cfg.clone());
        }
        let cfg = Arc::new(Self::build(n));
        cache.insert(n, cfg.clone());
        Ok(cfg)
    }

    fn build(n: u32) -> Self {
        let phi: Vec<BigRational> = cyclotomic_integer(n)
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        let t = phi.len() - 1;
        let count = (2 * t).max(n as usize + 1);
        let mut reduce = Vec::with_capacity(count);
        let mut cur = vec![BigRational::zero(); t];
        cur[0] = BigRational::one();
        for _ in 0..count {
            reduce.push(cur.clone());
            // multiply by q and fold the overflow with q^t = -sum phi_i q^i
            let top = cur[t - 1].clone();
            for i in (1..t).rev() {
                cur[i] = cur[i - 1].clone();
            }
            cur[0] = BigRational::zero();
            if !top.is_zero() {
                for i in 0..t {
                    cur[i] -= &top * &phi[i];
                }
            }
        }
        CyclotomicConfig { n, phi, reduce }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Euler totient of `n`, the degree of the cyclotomic polynomial.
    pub fn totient(&self) -> usize {
        self.phi.len() - 1
    }

    /// Coefficients of the minimal polynomial of `q`, constant term first.
    pub fn minimal_polynomial(&self) -> &[BigRational] {
        &self.phi
    }

    fn q_power_coeffs(&self, k: usize) -> &[BigRational] {
        &self.reduce[k]
    }
}

/// An element of `Q(q) ⊗ Q(√2)` in canonical form.
#[derive(Clone)]
pub struct Scalar {
    cfg: Arc<CyclotomicConfig>,
    coeffs: Vec<[BigRational; 2]>,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.cfg.n == other.cfg.n && self.coeffs == other.coeffs
    }
}

impl Eq for Scalar {}

impl std::hash::Hash for Scalar {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.cfg.n.hash(state);
        self.coeffs.hash(state);
    }
}

impl Scalar {
    pub fn zero(cfg: &Arc<CyclotomicConfig>) -> Self {
        let zero = [BigRational::zero(), BigRational::zero()];
        Scalar {
            cfg: cfg.clone(),
            coeffs: vec![zero; cfg.totient()],
        }
    }

    pub fn one(cfg: &Arc<CyclotomicConfig>) -> Self {
        Self::from_rational(cfg, BigRational::one())
    }

    pub fn from_integer(cfg: &Arc<CyclotomicConfig>, v: i64) -> Self {
        Self::from_rational(cfg, BigRational::from_integer(v.into()))
    }

    pub fn from_ratio(cfg: &Arc<CyclotomicConfig>, num: i64, den: i64) -> Self {
        Self::from_rational(cfg, BigRational::new(num.into(), den.into()))
    }

    pub fn from_rational(cfg: &Arc<CyclotomicConfig>, v: BigRational) -> Self {
        let mut s = Self::zero(cfg);
        s.coeffs[0][0] = v;
        s
    }

    /// `q^k`, reduced; negative `k` uses `q^n = 1`.
    pub fn q_pow(cfg: &Arc<CyclotomicConfig>, k: i64) -> Self {
        let e = k.rem_euclid(cfg.n as i64) as usize;
        let mut s = Self::zero(cfg);
        for (i, c) in cfg.q_power_coeffs(e).iter().enumerate() {
            s.coeffs[i][0] = c.clone();
        }
        s
    }

    pub fn sqrt2(cfg: &Arc<CyclotomicConfig>) -> Self {
        let mut s = Self::zero(cfg);
        s.coeffs[0][1] = BigRational::one();
        s
    }

    /// Builds a scalar from a grid indexed `[power of q][power of √2]`,
    /// reducing any powers of `q` at or above the totient.
    pub fn from_grid(
        cfg: &Arc<CyclotomicConfig>,
        grid: &[[BigRational; 2]],
    ) -> Result<Self, ScalarError> {
        if grid.len() > cfg.reduce.len() {
            return Err(ScalarError::GridShape {
                expected: cfg.totient(),
                got: grid.len(),
            });
        }
        let mut s = Self::zero(cfg);
        for (k, row) in grid.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                for (i, c) in cfg.q_power_coeffs(k).iter().enumerate() {
                    s.coeffs[i][j] += v * c;
                }
            }
        }
        Ok(s)
    }

    pub fn config(&self) -> &Arc<CyclotomicConfig> {
        &self.cfg
    }

    pub fn n(&self) -> u32 {
        self.cfg.n
    }

    /// Canonical coefficient grid, `[power of q][power of √2]`.
    pub fn grid(&self) -> &[[BigRational; 2]] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|r| r[0].is_zero() && r[1].is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(i, r)| {
            r[1].is_zero() && if i == 0 { r[0].is_one() } else { r[0].is_zero() }
        })
    }

    /// The rational value if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        let rest_zero = self
            .coeffs
            .iter()
            .enumerate()
            .all(|(i, r)| r[1].is_zero() && (i == 0 || r[0].is_zero()));
        rest_zero.then(|| &self.coeffs[0][0])
    }

    fn check(&self, other: &Self) -> Result<(), ScalarError> {
        if self.cfg.n != other.cfg.n {
            return Err(ScalarError::OrderMismatch {
                left: self.cfg.n,
                right: other.cfg.n,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ScalarError> {
        self.check(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            a[0] += &b[0];
            a[1] += &b[1];
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ScalarError> {
        self.check(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            a[0] -= &b[0];
            a[1] -= &b[1];
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        self.check(other)?;
        let t = self.cfg.totient();
        let two = BigRational::from_integer(2.into());
        // (a0 + a1 s)(b0 + b1 s) = (a0 b0 + 2 a1 b1) + (a0 b1 + a1 b0) s
        let mut raw = vec![[BigRational::zero(), BigRational::zero()]; 2 * t - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a[0].is_zero() && a[1].is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let slot = &mut raw[i + j];
                if !a[0].is_zero() {
                    slot[0] += &a[0] * &b[0];
                    slot[1] += &a[0] * &b[1];
                }
                if !a[1].is_zero() {
                    slot[0] += &two * &a[1] * &b[1];
                    slot[1] += &a[1] * &b[0];
                }
            }
        }
        let mut out = Self::zero(&self.cfg);
        for (k, r) in raw.into_iter().enumerate() {
            if k < t {
                out.coeffs[k] = r;
                continue;
            }
            for (i, c) in self.cfg.q_power_coeffs(k).iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                out.coeffs[i][0] += &r[0] * c;
                out.coeffs[i][1] += &r[1] * c;
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse, by solving the multiplication-by-`self` system over `Q`.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let t = self.cfg.totient();
        let dim = 2 * t;
        let idx = |i: usize, j: usize| 2 * i + j;
        // column c holds self * basis_c
        let mut mat = vec![vec![BigRational::zero(); dim + 1]; dim];
        for i in 0..t {
            for j in 0..2 {
                let mut basis = Self::zero(&self.cfg);
                basis.coeffs[i][j] = BigRational::one();
                let prod = self.try_mul(&basis)?;
                for (r, row) in prod.coeffs.iter().enumerate() {
                    for (s, v) in row.iter().enumerate() {
                        mat[idx(r, s)][idx(i, j)] = v.clone();
                    }
                }
            }
        }
        mat[0][dim] = BigRational::one();
        let sol = solve_square(mat).ok_or(ScalarError::NotInvertible { n: self.cfg.n })?;
        let mut out = Self::zero(&self.cfg);
        for i in 0..t {
            for j in 0..2 {
                out.coeffs[i][j] = sol[idx(i, j)].clone();
            }
        }
        Ok(out)
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, ScalarError> {
        self.check(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.cfg);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Image under `q ↦ exp(2πi/n)`, `√2 ↦ 1.41421…`.
    pub fn to_complex(&self) -> Complex64 {
        let q = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / self.cfg.n as f64);
        let s = std::f64::consts::SQRT_2;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut qp = Complex64::new(1.0, 0.0);
        for row in &self.coeffs {
            let v = row[0].to_f64().unwrap_or(f64::NAN) + s * row[1].to_f64().unwrap_or(f64::NAN);
            acc += qp * v;
            qp *= q;
        }
        acc
    }

    pub fn parse(cfg: &Arc<CyclotomicConfig>, text: &str) -> Result<Self, ScalarError> {
        let mut p = LiteralParser {
            cfg,
            src: text.as_bytes(),
            pos: 0,
        };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(v)
    }
}

/// Gauss-Jordan on an augmented square system; `None` if singular.
#[allow(clippy::needless_range_loop)]
fn solve_square(mut m: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let dim = m.len();
    for col in 0..dim {
        let piv = (col..dim).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..dim {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=dim {
                    let sub = &f * &m[col][c];
                    m[r][c] -= sub;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// `(q;q)_k = ∏_{j=1}^{k} (1 − q^j)`; the empty product is 1.
pub fn q_pochhammer(cfg: &Arc<CyclotomicConfig>, k: u32) -> Scalar {
    let one = Scalar::one(cfg);
    (1..=k as i64).fold(one.clone(), |acc, j| &acc * &(&one - &Scalar::q_pow(cfg, j)))
}

/// `[k]_q = 1 + q + … + q^{k−1}`.
pub fn q_integer(cfg: &Arc<CyclotomicConfig>, k: u32) -> Scalar {
    (0..k as i64).fold(Scalar::zero(cfg), |acc, j| &acc + &Scalar::q_pow(cfg, j))
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        let mut out = self.clone();
        for r in out.coeffs.iter_mut() {
            r[0] = -&r[0];
            r[1] = -&r[1];
        }
        out
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut mono = Vec::new();
                match i {
                    0 => {}
                    1 => mono.push("q".to_string()),
                    _ => mono.push(format!("q^{i}")),
                }
                if j == 1 {
                    mono.push("r2".to_string());
                }
                let mono = mono.join("*");
                let neg = c.is_negative();
                let abs = c.abs();
                let body = if mono.is_empty() {
                    abs.to_string()
                } else if abs.is_one() {
                    mono
                } else {
                    format!("{abs}*{mono}")
                };
                match (first, neg) {
                    (true, true) => write!(f, "-{body}")?,
                    (true, false) => write!(f, "{body}")?,
                    (false, true) => write!(f, " - {body}")?,
                    (false, false) => write!(f, " + {body}")?,
                }
                first = false;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar[n={}]({})", self.cfg.n, self)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let grid: Vec<[String; 2]> = self
            .coeffs
            .iter()
            .map(|r| [r[0].to_string(), r[1].to_string()])
            .collect();
        let mut st = serializer.serialize_struct("Scalar", 2)?;
        st.serialize_field("grid", &grid)?;
        st.serialize_field("text", &self.to_string())?;
        st.end()
    }
}

struct LiteralParser<'a> {
    cfg: &'a Arc<CyclotomicConfig>,
    src: &'a [u8],
    pos: usize,
}

impl LiteralParser<'_> {
    fn err(&self, msg: &str) -> ScalarError {
        ScalarError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let at = self.pos;
            let rhs = self.unary()?;
            acc = if c == b'*' {
                &acc * &rhs
            } else {
                acc.try_div(&rhs).map_err(|e| ScalarError::Parse {
                    pos: at,
                    msg: e.to_string(),
                })?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Scalar, ScalarError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Scalar, ScalarError> {
        let is_q = self.peek() == Some(b'q');
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let e = self.integer()?;
        let e = e.to_i64().ok_or_else(|| self.err("exponent too large"))?;
        if is_q {
            return Ok(Scalar::q_pow(self.cfg, if neg { -e } else { e }));
        }
        let p = base.pow(e as u32);
        if neg {
            p.inv().map_err(|e| self.err(&e.to_string()))
        } else {
            Ok(p)
        }
    }

    fn integer(&mut self) -> Result<BigInt, ScalarError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        digits.parse().map_err(|_| self.err("bad integer"))
    }

    fn atom(&mut self) -> Result<Scalar, ScalarError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b'q') => {
                self.pos += 1;
                Ok(Scalar::q_pow(self.cfg, 1))
            }
            Some(b'r') => {
                if self.src[self.pos..].starts_with(b"r2") {
                    self.pos += 2;
                    Ok(Scalar::sqrt2(self.cfg))
                } else {
                    Err(self.err("unknown token"))
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(Scalar::from_rational(self.cfg, BigRational::from_integer(v)))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
