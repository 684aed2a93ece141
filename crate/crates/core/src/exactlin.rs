//! Exact rational linear algebra.
//!
//! Everything here works over arbitrary-precision rationals, so ranks, kernels
//! and inverses are exact. Matrices in this crate are small (a dimension matrix
//! rarely has more than a dozen columns), so the elimination is the plain
//! first-nonzero-pivot Gauss-Jordan without any pivoting heuristics.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// The exponent field. Always normalized: `gcd(|num|, den) = 1`, `den > 0`.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinError {
    #[error("no solution: right-hand side is outside the column space")]
    NoSolution,
    #[error("matrix is singular")]
    Singular,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Builds a rational from an integer.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Builds `n/d`. Panics when `d == 0`.
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    if let Some(v) = r.to_f64() {
        return v;
    }
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Prints `p` for integers and `p/q` otherwise.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// A dense row-major matrix of rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl QMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, LinError> {
        if entries.len() != rows * cols {
            return Err(LinError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(QMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have `cols` entries.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Result<Self, LinError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinError::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Ok(QMatrix {
            rows: n,
            cols,
            entries,
        })
    }

    /// Convenience constructor for integer matrices. Panics on ragged rows.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| int(v)).collect())
            .collect();
        Self::from_rows(cols, rows).expect("ragged integer matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> Result<QMatrix, LinError> {
        if self.cols != other.rows {
            return Err(LinError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinError> {
        if v.len() != self.cols {
            return Err(LinError::Shape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(fmt_rational).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Result of Gauss-Jordan elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: QMatrix,
    pub pivot_cols: Vec<usize>,
    pub rank: usize,
}

/// Reduced row echelon form, pivot columns and rank.
pub fn rref(m: &QMatrix) -> Rref {
    let mut a = m.clone();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&i| !a[(i, col)].is_zero()) else {
            continue;
        };
        swap_rows(&mut a, row, p);
        let inv = a[(row, col)].recip();
        for j in col..a.cols {
            a[(row, j)] *= &inv;
        }
        for i in 0..a.rows {
            if i == row || a[(i, col)].is_zero() {
                continue;
            }
            let factor = a[(i, col)].clone();
            for j in col..a.cols {
                let sub = &factor * &a[(row, j)];
                a[(i, j)] -= sub;
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let rank = pivot_cols.len();
    Rref {
        reduced: a,
        pivot_cols,
        rank,
    }
}

fn swap_rows(a: &mut QMatrix, r1: usize, r2: usize) {
    if r1 == r2 {
        return;
    }
    for j in 0..a.cols {
        a.entries.swap(r1 * a.cols + j, r2 * a.cols + j);
    }
}

pub fn rank(m: &QMatrix) -> usize {
    rref(m).rank
}

/// The free-variable kernel vectors read off the RREF, one per non-pivot
/// column in increasing order, with the free variable set to 1.
///
/// These are not rescaled; [`kernel_basis`] normalizes them.
pub fn free_variable_kernel(m: &QMatrix) -> Vec<Vec<Rational>> {
    let Rref {
        reduced,
        pivot_cols,
        ..
    } = rref(m);
    let n = m.cols;
    let mut is_pivot = vec![false; n];
    for &p in &pivot_cols {
        is_pivot[p] = true;
    }
    (0..n)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Rational::zero(); n];
            v[free] = Rational::one();
            for (r, &p) in pivot_cols.iter().enumerate() {
                v[p] = -reduced[(r, free)].clone();
            }
            v
        })
        .collect()
}

/// Basis of the kernel of `m`: free-variable construction ordered by free
/// column, each vector scaled to coprime integers. The entry at the vector's
/// own free column stays positive.
pub fn kernel_basis(m: &QMatrix) -> Vec<Vec<Rational>> {
    free_variable_kernel(m)
        .into_iter()
        .map(|v| primitive(&v))
        .collect()
}

/// Scales a vector by a positive rational so that its entries are coprime
/// integers. Signs are preserved; the zero vector is returned unchanged.
pub fn primitive(v: &[Rational]) -> Vec<Rational> {
    if v.iter().all(Zero::is_zero) {
        return v.to_vec();
    }
    let den_lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Rational::from_integer(den_lcm.clone())).to_integer())
        .collect();
    let g = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    scaled
        .into_iter()
        .map(|x| Rational::from_integer(x / &g))
        .collect()
}

/// Solves `a·x = b` exactly. Among multiple solutions, returns the one with
/// every free variable set to zero.
pub fn solve(a: &QMatrix, b: &[Rational]) -> Result<Vec<Rational>, LinError> {
    if b.len() != a.rows {
        return Err(LinError::Shape(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows
        )));
    }
    // Augment and reduce; the system is inconsistent iff the last column is a pivot.
    let mut aug = QMatrix::zeros(a.rows, a.cols + 1);
    for i in 0..a.rows {
        for j in 0..a.cols {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, a.cols)] = b[i].clone();
    }
    let Rref {
        reduced,
        pivot_cols,
        ..
    } = rref(&aug);
    if pivot_cols.last() == Some(&a.cols) {
        return Err(LinError::NoSolution);
    }
    let mut x = vec![Rational::zero(); a.cols];
    for (r, &p) in pivot_cols.iter().enumerate() {
        x[p] = reduced[(r, a.cols)].clone();
    }
    Ok(x)
}

/// Exact inverse of a square matrix.
pub fn invert(m: &QMatrix) -> Result<QMatrix, LinError> {
    if !m.is_square() {
        return Err(LinError::Shape(format!(
            "cannot invert a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    let mut aug = QMatrix::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, n + i)] = Rational::one();
    }
    let r = rref(&aug);
    if r.pivot_cols.iter().take_while(|&&c| c < n).count() < n {
        return Err(LinError::Singular);
    }
    let mut inv = QMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv[(i, j)] = r.reduced[(i, n + j)].clone();
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn rref_identity() {
        let r = rref(&QMatrix::identity(2));
        assert_eq!(r.reduced, QMatrix::identity(2));
        assert_eq!(r.pivot_cols, vec![0, 1]);
        assert_eq!(r.rank, 2);
    }

    #[test]
    fn rref_two_independent_rows() {
        let m = QMatrix::from_i64(&[&[1, 1, 0], &[0, -2, 1]]);
        let r = rref(&m);
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivot_cols, vec![0, 1]);
        let expected = QMatrix::from_rows(
            3,
            vec![
                vec![int(1), int(0), frac(1, 2)],
                vec![int(0), int(1), frac(-1, 2)],
            ],
        )
        .unwrap();
        assert_eq!(r.reduced, expected);
    }

    #[test]
    fn rref_zero() {
        let r = rref(&QMatrix::zeros(3, 3));
        assert!(r.reduced.is_zero());
        assert!(r.pivot_cols.is_empty());
        assert_eq!(r.rank, 0);
    }

    #[test]
    fn kernel_examples() {
        let m = QMatrix::from_i64(&[&[1, 1, 0], &[0, -2, 1]]);
        assert_eq!(kernel_basis(&m), vec![v(&[-1, 1, 2])]);
        assert!(kernel_basis(&QMatrix::identity(4)).is_empty());
        assert_eq!(
            kernel_basis(&QMatrix::zeros(1, 3)),
            vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]
        );
    }

    #[test]
    fn kernel_matches_brute_force_search() {
        // Every integer vector in {-3..3}^3 annihilated by m is a multiple of the basis vector.
        let m = QMatrix::from_i64(&[&[1, 1, 0], &[0, -2, 1]]);
        let mut found = Vec::new();
        for a in -3..=3 {
            for b in -3..=3 {
                for c in -3..=3 {
                    let x = v(&[a, b, c]);
                    if (a, b, c) != (0, 0, 0) && m.mul_vec(&x).unwrap().iter().all(Zero::is_zero) {
                        found.push(x);
                    }
                }
            }
        }
        let primitive_found: Vec<_> = found
            .iter()
            .map(|x| primitive(x))
            .filter(|x| x[0] > int(0) || (x[0].is_zero() && x[1] > int(0)))
            .collect();
        assert!(!primitive_found.is_empty());
        assert!(primitive_found
            .iter()
            .all(|x| *x == v(&[-1, 1, 2]) || *x == v(&[1, -1, -2])));
        assert_eq!(kernel_basis(&m)[0], v(&[-1, 1, 2]));
    }

    #[test]
    fn solve_examples() {
        let b = v(&[4, -7]);
        assert_eq!(solve(&QMatrix::identity(2), &b).unwrap(), b);
        let singular = QMatrix::from_i64(&[&[1, 1], &[0, 0]]);
        assert_eq!(solve(&singular, &v(&[1, 1])), Err(LinError::NoSolution));
        let m = QMatrix::from_i64(&[&[1, 1, 0], &[0, -2, 1]]);
        assert_eq!(solve(&m, &v(&[1, 0])).unwrap(), v(&[1, 0, 0]));
    }

    #[test]
    fn solve_rejects_wrong_length() {
        assert!(matches!(
            solve(&QMatrix::identity(2), &v(&[1])),
            Err(LinError::Shape(_))
        ));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(invert(&QMatrix::identity(3)).unwrap(), QMatrix::identity(3));
        let d =
            QMatrix::from_rows(2, vec![vec![int(2), int(0)], vec![int(0), frac(1, 2)]]).unwrap();
        let expected =
            QMatrix::from_rows(2, vec![vec![frac(1, 2), int(0)], vec![int(0), int(2)]]).unwrap();
        assert_eq!(invert(&d).unwrap(), expected);
        let ones = QMatrix::from_i64(&[&[1, 1], &[1, 1]]);
        assert_eq!(invert(&ones), Err(LinError::Singular));
        assert!(matches!(
            invert(&QMatrix::zeros(2, 3)),
            Err(LinError::Shape(_))
        ));
    }

    #[test]
    fn rational_text() {
        assert_eq!(fmt_rational(&frac(-1, 2)), "-1/2");
        assert_eq!(fmt_rational(&int(3)), "3");
        assert_eq!(parse_rational("-1/2"), Some(frac(-1, 2)));
        assert_eq!(parse_rational("6/4"), Some(frac(3, 2)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn primitive_scaling() {
        let p = primitive(&[frac(-1, 2), frac(1, 2), int(1)]);
        assert_eq!(p, v(&[-1, 1, 2]));
        let q = primitive(&[int(0), int(-4), int(6)]);
        assert_eq!(q, v(&[0, -2, 3]));
    }
}
