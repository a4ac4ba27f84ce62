//! Dense exact linear algebra over [`Scalar`].

use std::sync::Arc;

use crate::scalar::{CyclotomicConfig, Scalar};

/// Row echelon data produced by [`row_reduce`].
#[derive(Debug, Clone)]
pub struct Echelon {
    /// Fully reduced rows (pivot entries equal to 1), one per pivot.
    pub rows: Vec<Vec<Scalar>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Fraction-free (Bareiss) forward elimination followed by back substitution
/// into reduced row echelon form. Pivots are the first nonzero entry in column
/// order, so the result is deterministic.
pub fn row_reduce(cfg: &Arc<CyclotomicConfig>, rows: &[Vec<Scalar>], cols: usize) -> Echelon {
    let mut a: Vec<Vec<Scalar>> = rows.to_vec();
    let mut prev_inv = Scalar::one(cfg);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let prow = &head[r];
        let pivot = &prow[col];
        for row in tail.iter_mut() {
            if row[col].is_zero() {
                // (p·a_ij − 0)/prev keeps the Bareiss invariant
                for x in row[col + 1..cols].iter_mut() {
                    if !x.is_zero() {
                        *x = &(pivot * &*x) * &prev_inv;
                    }
                }
                continue;
            }
            let f = row[col].clone();
            for j in col + 1..cols {
                let lhs = pivot * &row[j];
                let v = if prow[j].is_zero() {
                    lhs
                } else {
                    &lhs - &(&f * &prow[j])
                };
                row[j] = &v * &prev_inv;
            }
            row[col] = Scalar::zero(cfg);
        }
        prev_inv = pivot.inv().expect("nonzero pivot is invertible");
        pivots.push(col);
        r += 1;
    }
    a.truncate(r);
    // back substitution to reduced form
    for i in (0..r).rev() {
        let inv = a[i][pivots[i]].inv().expect("nonzero pivot is invertible");
        for v in a[i].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        let (above, rest) = a.split_at_mut(i);
        let prow = &rest[0];
        for row in above.iter_mut() {
            let f = row[pivots[i]].clone();
            if f.is_zero() {
                continue;
            }
            for j in pivots[i]..cols {
                if !prow[j].is_zero() {
                    row[j] = &row[j] - &(&f * &prow[j]);
                }
            }
        }
    }
    Echelon {
        rows: a,
        pivots,
        cols,
    }
}

pub fn rank(cfg: &Arc<CyclotomicConfig>, rows: &[Vec<Scalar>], cols: usize) -> usize {
    row_reduce(cfg, rows, cols).rank()
}

/// Basis of `{v : A v = 0}`: one vector per free column, with a 1 in that
/// column.
pub fn nullspace(cfg: &Arc<CyclotomicConfig>, rows: &[Vec<Scalar>], cols: usize) -> Vec<Vec<Scalar>> {
    let ech = row_reduce(cfg, rows, cols);
    let mut is_pivot = vec![false; cols];
    for &p in &ech.pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Scalar::zero(cfg); cols];
            v[f] = Scalar::one(cfg);
            for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                v[p] = -&row[f];
            }
            v
        })
        .collect()
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let cfg = a[0].config().clone();
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Scalar::zero(&cfg), |acc, (x, y)| &acc + &(x * y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> Arc<CyclotomicConfig> {
        CyclotomicConfig::get(3).unwrap()
    }

    fn m(c: &Arc<CyclotomicConfig>, rows: &[&[&str]]) -> Vec<Vec<Scalar>> {
        rows.iter()
            .map(|r| r.iter().map(|s| Scalar::parse(c, s).unwrap()).collect())
            .collect()
    }

    #[test]
    fn zero_matrix_has_identity_nullspace() {
        let c = cfg();
        let rows = m(&c, &[&["0", "0", "0"], &["0", "0", "0"]]);
        let ns = nullspace(&c, &rows, 3);
        assert_eq!(ns.len(), 3);
        for (i, v) in ns.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                assert_eq!(x.is_one(), i == j);
                assert!(i == j || x.is_zero());
            }
        }
    }

    #[test]
    fn nullspace_vectors_solve_the_system() {
        let c = cfg();
        let rows = m(
            &c,
            &[
                &["1", "q", "r2", "0"],
                &["2", "2*q", "2*r2", "0"],
                &["0", "1", "q^2", "1 - q"],
            ],
        );
        let ns = nullspace(&c, &rows, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for r in &rows {
                assert!(dot(r, v).is_zero());
            }
        }
        assert_eq!(rank(&c, &rows, 4), 2);
    }

    #[test]
    fn full_rank_square() {
        let c = cfg();
        let rows = m(&c, &[&["0", "1"], &["q", "r2"]]);
        assert!(nullspace(&c, &rows, 2).is_empty());
        let ech = row_reduce(&c, &rows, 2);
        assert_eq!(ech.pivots, vec![0, 1]);
        assert!(ech.rows[0][0].is_one() && ech.rows[0][1].is_zero());
    }
}
