//! Exact rational scalars and matrices.
//!
//! Elimination is fraction-free: every row is first scaled to integers and
//! then reduced with Bareiss' algorithm, so intermediate entries stay integral
//! and are bounded by minors of the input.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Scalar = BigRational;

pub fn int(v: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(numer: i64, denom: i64) -> Scalar {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let bad = || Error::ParseScalar(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (t, None),
    };
    let numer: BigInt = n.parse().map_err(|_| bad())?;
    let denom: BigInt = match d {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(numer, denom))
}

/// Canonical `"p/q"` form, `q` omitted when it is 1.
pub fn format_scalar(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        let mut s = x.numer().to_string();
        s.push('/');
        s.push_str(&x.denom().to_string());
        s
    }
}

pub fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or(Error::Overflow("i64 conversion"))
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Scalar>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Positive multiple of `xs` with coprime integer entries. Zero stays zero.
pub fn primitive_integer_vector(xs: &[Scalar]) -> Vec<BigInt> {
    let den = common_denominator(xs);
    let ints: Vec<BigInt> = xs.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        ints
    } else {
        ints.into_iter().map(|v| v / &g).collect()
    }
}

/// Dense rational matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                f.write_str(&format_scalar(&self[(i, j)]))?;
            }
            f.write_str("]\n")?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` is only used when `rows` is empty.
    pub fn from_rows_with_cols(rows: Vec<Vec<Scalar>>, cols: usize) -> Result<Self> {
        let cols = rows.first().map_or(cols, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        Self::from_rows_with_cols(rows, 0)
    }

    pub fn from_int_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&v| int(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch("matrix product".into()));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a * &other[(k, j)];
                    out[(i, j)] += v;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Scalar::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let den = common_denominator(row);
                row.iter().map(|x| x.numer() * (&den / x.denom())).collect()
            })
            .collect()
    }

    /// Exact rank over the rationals.
    pub fn rank(&self) -> usize {
        bareiss(self.integer_rows(), self.cols).pivots.len()
    }

    /// Columns form a basis of the right null space, each a primitive integer vector.
    pub fn kernel_basis(&self) -> Matrix {
        let ech = bareiss(self.integer_rows(), self.cols);
        let free: Vec<usize> = (0..self.cols).filter(|c| !ech.pivots.contains(c)).collect();
        let mut out = Matrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            let mut x = vec![Scalar::zero(); self.cols];
            x[f] = Scalar::one();
            back_substitute(&ech, &mut x, None);
            for (i, v) in primitive_integer_vector(&x).into_iter().enumerate() {
                out[(i, k)] = BigRational::from_integer(v);
            }
        }
        out
    }

    pub fn determinant(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "determinant of non-square matrix".into(),
            ));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Scalar::one());
        }
        let rows = self.integer_rows();
        let scale = (0..n).fold(BigInt::one(), |acc, i| {
            acc * common_denominator(self.row(i))
        });
        let ech = bareiss(rows, n);
        if ech.pivots.len() < n {
            return Ok(Scalar::zero());
        }
        let mut det = ech.rows[n - 1][n - 1].clone();
        if ech.swaps % 2 == 1 {
            det = -det;
        }
        Ok(BigRational::new(det, scale))
    }

    /// Some solution of `self · x = rhs`, or `None` when inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, rhs: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(rhs.len(), self.rows);
        let aug: Vec<Vec<Scalar>> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(rhs[i].clone());
                r
            })
            .collect();
        let aug = Matrix::from_rows_with_cols(aug, self.cols + 1).ok()?;
        let ech = bareiss(aug.integer_rows(), self.cols + 1);
        if ech.pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.cols];
        back_substitute(&ech, &mut x, Some(self.cols));
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug: Vec<Vec<Scalar>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| {
                    if i == j {
                        Scalar::one()
                    } else {
                        Scalar::zero()
                    }
                }));
                r
            })
            .collect();
        let aug = Matrix::from_rows_with_cols(aug, 2 * n).ok()?;
        let ech = bareiss(aug.integer_rows(), 2 * n);
        if ech.pivots.len() < n || ech.pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for col in 0..n {
            let mut x = vec![Scalar::zero(); n];
            back_substitute(&ech, &mut x, Some(n + col));
            for i in 0..n {
                inv[(i, col)] = x[i].clone();
            }
        }
        Some(inv)
    }
}

/// Integer row echelon form.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    swaps: usize,
}

/// Fraction-free Gaussian elimination on the first `ncols` columns.
fn bareiss(mut a: Vec<Vec<BigInt>>, ncols: usize) -> Echelon {
    let nrows = a.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut swaps = 0;
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            swaps += 1;
        }
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut() {
            if row[c].is_zero() {
                for v in row[c + 1..].iter_mut() {
                    if !v.is_zero() {
                        let t = &pivot_row[c] * &*v;
                        *v = exact_div(t, &prev);
                    }
                }
                continue;
            }
            let factor = row[c].clone();
            for j in c + 1..ncols {
                let t = &pivot_row[c] * &row[j] - &factor * &pivot_row[j];
                row[j] = exact_div(t, &prev);
            }
            row[c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    Echelon {
        rows: a,
        pivots,
        swaps,
    }
}

fn exact_div(t: BigInt, d: &BigInt) -> BigInt {
    if d.is_one() {
        return t;
    }
    let (q, r) = t.div_rem(d);
    debug_assert!(r.is_zero(), "Bareiss division must be exact");
    q
}

/// Solves the echelon system for the pivot variables given the free ones
/// already stored in `x`. With `rhs_col`, that column is the right-hand side.
fn back_substitute(ech: &Echelon, x: &mut [Scalar], rhs_col: Option<usize>) {
    let n = x.len();
    for (i, &p) in ech.pivots.iter().enumerate().rev() {
        let row = &ech.rows[i];
        let mut s = match rhs_col {
            Some(c) => BigRational::from_integer(row[c].clone()),
            None => Scalar::zero(),
        };
        for j in p + 1..n {
            if !row[j].is_zero() && !x[j].is_zero() {
                s -= &x[j] * BigRational::from_integer(row[j].clone());
            }
        }
        x[p] = s / BigRational::from_integer(row[p].clone());
    }
}

/// Result of [`ldlt_signature`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Signature {
    PositiveDefinite,
    /// Columns of `kernel` span the (rational) null space.
    PositiveSemidefinite {
        kernel: Matrix,
    },
    Indefinite,
}

/// Classifies a symmetric matrix by fraction-free LDLᵀ with symmetric pivoting.
pub fn ldlt_signature(q: &Matrix) -> Result<Signature> {
    if !q.is_symmetric() {
        return Err(Error::NonSymmetric);
    }
    let n = q.rows();
    let den = common_denominator(&q.data);
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let x = &q[(i, j)];
                    x.numer() * (&den / x.denom())
                })
                .collect()
        })
        .collect();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut prev = BigInt::one();
    loop {
        if remaining.is_empty() {
            return Ok(Signature::PositiveDefinite);
        }
        if remaining.iter().any(|&i| a[i][i].is_negative()) {
            return Ok(Signature::Indefinite);
        }
        let Some(pos) = remaining.iter().position(|&i| a[i][i].is_positive()) else {
            let all_zero = remaining
                .iter()
                .all(|&i| remaining.iter().all(|&j| a[i][j].is_zero()));
            return Ok(if all_zero {
                Signature::PositiveSemidefinite {
                    kernel: q.kernel_basis(),
                }
            } else {
                Signature::Indefinite
            });
        };
        let k = remaining.remove(pos);
        for &i in &remaining {
            for &j in &remaining {
                let t = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = exact_div(t, &prev);
            }
        }
        prev = a[k][k].clone();
    }
}

/// Symmetric rational matrix `q`, read as the quadratic form `x ↦ xᵀ q x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    gram: Matrix,
}

impl QuadraticForm {
    pub fn new(gram: Matrix) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(Error::NonSymmetric);
        }
        Ok(QuadraticForm { gram })
    }

    pub fn from_int_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(Matrix::from_int_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        QuadraticForm {
            gram: Matrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn value(&self, x: &[i64]) -> Scalar {
        let xs: Vec<Scalar> = x.iter().map(|&v| int(v)).collect();
        self.value_rational(&xs)
    }

    pub fn value_rational(&self, x: &[Scalar]) -> Scalar {
        let qx = self.gram.mul_vec(x);
        qx.iter()
            .zip(x)
            .fold(Scalar::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn signature(&self) -> Signature {
        ldlt_signature(&self.gram).expect("gram matrix is symmetric by construction")
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature() == Signature::PositiveDefinite
    }

    pub fn trace(&self) -> Scalar {
        (0..self.dim()).fold(Scalar::zero(), |acc, i| acc + &self.gram[(i, i)])
    }

    pub fn scaled(&self, s: &Scalar) -> Self {
        let mut gram = self.gram.clone();
        for v in gram.data.iter_mut() {
            *v = &*v * s;
        }
        QuadraticForm { gram }
    }

    /// `Uᵀ q U` for an integer matrix `U` given by rows.
    pub fn conjugate<R: AsRef<[i64]>>(&self, u: &[R]) -> Result<Self> {
        let u = Matrix::from_int_rows(u)?;
        Self::new(u.transpose().mul(&self.gram)?.mul(&u)?)
    }

    /// The smallest positive integer multiple of the Gram matrix whose entries are coprime.
    pub fn primitive_integer_gram(&self) -> Result<Vec<Vec<i64>>> {
        let flat = primitive_integer_vector(&self.gram.data);
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| to_i64(&flat[i * n + j])).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_int_rows(rows).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::identity(2).rank(), 2);
        assert_eq!(m(&[&[1, 1], &[1, 1]]).rank(), 1);
        assert_eq!(Matrix::zeros(0, 5).rank(), 0);
        assert_eq!(m(&[&[0, 1], &[0, 2]]).rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Matrix::identity(3).kernel_basis().cols(), 0);
        let k = m(&[&[1, 1]]).kernel_basis();
        assert_eq!(k.cols(), 1);
        assert_eq!(k.column(0), vec![int(-1), int(1)]);
        let empty = Matrix::zeros(0, 4).kernel_basis();
        assert_eq!(empty.cols(), 4);
    }

    #[test]
    fn determinant_with_swaps() {
        let a = m(&[&[1, 2, 3], &[2, 4, 7], &[1, 1, 1]]);
        assert_eq!(a.determinant().unwrap(), int(1));
        let b = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(b.determinant().unwrap(), int(-1));
        let h = Matrix::from_rows(vec![
            vec![ratio(1, 2), ratio(1, 3)],
            vec![ratio(1, 3), ratio(1, 4)],
        ])
        .unwrap();
        assert_eq!(h.determinant().unwrap(), ratio(1, 72));
    }

    #[test]
    fn inverse_and_solve() {
        let a = m(&[&[2, 1], &[1, 2]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
        let x = m(&[&[1, 1, 0], &[0, 1, 1]])
            .solve(&[int(2), int(3)])
            .unwrap();
        assert_eq!(x[0].clone() + &x[1], int(2));
        assert_eq!(x[1].clone() + &x[2], int(3));
        assert!(m(&[&[1, 1], &[1, 1]]).solve(&[int(1), int(2)]).is_none());
    }

    #[test]
    fn signature_examples() {
        assert_eq!(
            ldlt_signature(&Matrix::identity(3)).unwrap(),
            Signature::PositiveDefinite
        );
        match ldlt_signature(&m(&[&[1, 0], &[0, 0]])).unwrap() {
            Signature::PositiveSemidefinite { kernel } => {
                assert_eq!(kernel.cols(), 1);
                assert_eq!(kernel.column(0), vec![int(0), int(1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            ldlt_signature(&m(&[&[2, 1], &[1, 2]])).unwrap(),
            Signature::PositiveDefinite
        );
        assert_eq!(
            ldlt_signature(&m(&[&[0, 1], &[1, 0]])).unwrap(),
            Signature::Indefinite
        );
        assert_eq!(
            ldlt_signature(&m(&[&[1, 2], &[3, 4]])),
            Err(Error::NonSymmetric)
        );
    }

    #[test]
    fn scalar_round_trip() {
        for s in ["3", "-7/2", "0", "12345678901234567890/7"] {
            assert_eq!(format_scalar(&parse_scalar(s).unwrap()), s);
        }
        assert_eq!(format_scalar(&parse_scalar("4/6").unwrap()), "2/3");
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
    }
}
