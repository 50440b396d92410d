//! Exact linear algebra over the rationals.
//!
//! Every routine clears denominators row by row and runs fraction-free
//! Gauss-Jordan elimination (Bareiss updates) on the integer matrix, so all
//! intermediate quantities are integer minors and no gcd is taken inside the
//! elimination loop.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::scalar::{common_denominator, Scalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

/// Scales a rational row to a primitive integer row; returns the row and the factor used.
pub fn integer_row(row: &[Scalar]) -> (Vec<BigInt>, Scalar) {
    let den = common_denominator(row.iter());
    let ints: Vec<BigInt> = row
        .iter()
        .map(|v| v.numer() * (&den / v.denom()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return (ints, Scalar::one());
    }
    let ints = ints.into_iter().map(|v| v / &g).collect();
    (ints, Scalar::new(den, g))
}

/// Fraction-free reduced row echelon form.
///
/// Invariant: row `r` has entry `pivot` in column `pivot_cols[r]`, and every
/// other row is zero in that column.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<Vec<BigInt>>,
    pub pivot_cols: Vec<usize>,
    pub pivot: BigInt,
    pub ncols: usize,
    /// Parity of the row swaps performed.
    pub odd_swaps: bool,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }

    /// Basis of the null space as primitive integer vectors.
    pub fn kernel_int(&self) -> Vec<Vec<BigInt>> {
        let mut is_pivot = vec![false; self.ncols];
        for &c in &self.pivot_cols {
            is_pivot[c] = true;
        }
        let mut out = Vec::new();
        for f in (0..self.ncols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![BigInt::zero(); self.ncols];
            v[f] = self.pivot.clone();
            for (r, &c) in self.pivot_cols.iter().enumerate() {
                v[c] = -&self.rows[r][f];
            }
            out.push(primitive(v));
        }
        out
    }
}

fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return v;
    }
    v.into_iter().map(|x| x / &g).collect()
}

/// Fraction-free Gauss-Jordan elimination over the first `limit` columns.
///
/// Columns past `limit` are carried along (augmented part). Pivot rows are
/// chosen sparsest-first among the candidates of each column.
pub fn echelon_int(mut a: Vec<Vec<BigInt>>, ncols: usize, limit: usize) -> Echelon {
    let nrows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0usize;
    let mut pivot_cols = Vec::new();
    let mut odd_swaps = false;
    for c in 0..limit {
        if r == nrows {
            break;
        }
        let best = (r..nrows)
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| a[i].iter().filter(|v| !v.is_zero()).count());
        let Some(p) = best else { continue };
        if p != r {
            a.swap(p, r);
            odd_swaps = !odd_swaps;
        }
        let piv_row = a[r].clone();
        let piv = piv_row[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c].clone();
            for j in 0..ncols {
                let v = &row[j];
                if f.is_zero() {
                    if v.is_zero() {
                        continue;
                    }
                    row[j] = exact_div(&piv * v, &prev);
                } else {
                    row[j] = exact_div(&piv * v - &f * &piv_row[j], &prev);
                }
            }
        }
        prev = piv;
        pivot_cols.push(c);
        r += 1;
    }
    a.truncate(r);
    Echelon {
        rows: a,
        pivot_cols,
        pivot: if r == 0 { BigInt::one() } else { prev },
        ncols,
        odd_swaps,
    }
}

fn exact_div(n: BigInt, d: &BigInt) -> BigInt {
    if d.is_one() {
        return n;
    }
    let (q, rem) = n.div_rem(d);
    debug_assert!(rem.is_zero(), "inexact Bareiss division");
    q
}

pub fn echelon(rows: &[Vec<Scalar>], ncols: usize) -> Echelon {
    let ints = rows.iter().map(|r| integer_row(r).0).collect();
    echelon_int(ints, ncols, ncols)
}

pub fn rank(rows: &[Vec<Scalar>], ncols: usize) -> usize {
    if rows.is_empty() || ncols == 0 {
        return 0;
    }
    echelon(rows, ncols).rank()
}

/// Basis of `{x : A x = 0}` for `A` given by rows with `ncols` columns.
pub fn kernel(rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    echelon(rows, ncols)
        .kernel_int()
        .into_iter()
        .map(|v| v.into_iter().map(Scalar::from_integer).collect())
        .collect()
}

fn check_square(rows: &[Vec<Scalar>]) -> Result<usize, LinalgError> {
    let n = rows.len();
    match rows.iter().find(|r| r.len() != n) {
        Some(r) => Err(LinalgError::NotSquare { rows: n, cols: r.len() }),
        None => Ok(n),
    }
}

pub fn determinant(rows: &[Vec<Scalar>]) -> Result<Scalar, LinalgError> {
    let n = check_square(rows)?;
    if n == 0 {
        return Ok(Scalar::one());
    }
    let mut scale = Scalar::one();
    let mut ints = Vec::with_capacity(n);
    for r in rows {
        let (row, f) = integer_row(r);
        scale *= f;
        ints.push(row);
    }
    let e = echelon_int(ints, n, n);
    if e.rank() < n {
        return Ok(Scalar::zero());
    }
    let det = Scalar::from_integer(e.pivot) / scale;
    Ok(if e.odd_swaps { -det } else { det })
}

/// Solves `A X = B` for square nonsingular `A`; `rhs` holds the rows of `B`.
pub fn solve(rows: &[Vec<Scalar>], rhs: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>, LinalgError> {
    let n = check_square(rows)?;
    let m = rhs.first().map_or(0, Vec::len);
    let mut ints = Vec::with_capacity(n);
    for (r, b) in rows.iter().zip(rhs) {
        let mut full = r.clone();
        full.extend(b.iter().cloned());
        ints.push(integer_row(&full).0);
    }
    let e = echelon_int(ints, n + m, n);
    if e.rank() < n {
        return Err(LinalgError::Singular);
    }
    let piv = Scalar::from_integer(e.pivot.clone());
    let mut out = vec![Vec::new(); n];
    for (r, &c) in e.pivot_cols.iter().enumerate() {
        out[c] = e.rows[r][n..]
            .iter()
            .map(|v| Scalar::from_integer(v.clone()) / &piv)
            .collect();
    }
    Ok(out)
}

pub fn inverse(rows: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>, LinalgError> {
    let n = check_square(rows)?;
    let ident: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Scalar::one() } else { Scalar::zero() })
                .collect()
        })
        .collect();
    solve(rows, &ident)
}

/// A subspace of `Q^n` kept in reduced row echelon form with unit pivots.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn span(ambient: usize, vectors: &[Vec<Scalar>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let e = echelon(vectors, ambient);
        let piv = Scalar::from_integer(e.pivot.clone());
        let rows = e
            .rows
            .iter()
            .map(|r| r.iter().map(|v| Scalar::from_integer(v.clone()) / &piv).collect())
            .collect();
        Subspace { ambient, rows, pivots: e.pivot_cols }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    /// Canonical representative of `v` modulo the subspace.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|v| self.contains(v))
    }

    /// Members of `candidates` extending this subspace to their joint span, chosen greedily.
    pub fn complement<'a>(&self, candidates: &'a [Vec<Scalar>]) -> Vec<&'a Vec<Scalar>> {
        let mut acc = self.clone();
        let mut out = Vec::new();
        for c in candidates {
            if !acc.contains(c) {
                acc = acc.with(c);
                out.push(c);
            }
        }
        out
    }

    pub fn with(&self, v: &[Scalar]) -> Subspace {
        let mut vs = self.rows.clone();
        vs.push(v.to_vec());
        Subspace::span(self.ambient, &vs)
    }
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// `y = A x` for `A` in sparse column form `cols[j] = [(row, value)]`.
pub fn sparse_apply(cols: &[Vec<(usize, Scalar)>], nrows: usize, x: &[Scalar]) -> Vec<Scalar> {
    let mut y = vec![Scalar::zero(); nrows];
    for (col, xj) in cols.iter().zip(x) {
        if xj.is_zero() {
            continue;
        }
        for (i, v) in col {
            y[*i] += v * xj;
        }
    }
    y
}

pub fn sign_of(v: &Scalar) -> i32 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn determinant_with_swaps() {
        let a = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(determinant(&a).unwrap(), int(-1));
        let b = vec![
            vec![ratio(1, 2), ratio(1, 3)],
            vec![ratio(1, 4), ratio(1, 5)],
        ];
        assert_eq!(determinant(&b).unwrap(), ratio(1, 10) - ratio(1, 12));
    }

    #[test]
    fn kernel_of_rank_deficient() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let k = kernel(&a, 3);
        assert_eq!(k.len(), 1);
        for row in &a {
            let s: Scalar = row.iter().zip(&k[0]).map(|(x, y)| x * y).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = inverse(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: Scalar = (0..3).map(|k| &a[i][k] * &inv[k][j]).sum();
                assert_eq!(s, if i == j { int(1) } else { int(0) });
            }
        }
        assert_eq!(inverse(&m(&[&[1, 2], &[2, 4]])), Err(LinalgError::Singular));
    }

    #[test]
    fn subspace_reduction_is_canonical() {
        let s = Subspace::span(3, &m(&[&[1, 1, 0], &[0, 1, 1]]));
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&m(&[&[1, 0, -1]])[0]));
        let r1 = s.reduce(&m(&[&[0, 0, 1]])[0]);
        let r2 = s.reduce(&m(&[&[1, 1, 1]])[0]);
        assert_eq!(r1, r2);
    }
}
