//! Small integer matrices with `i128` fraction-free elimination.
//!
//! Entries in this crate are tiny lattice coordinates, so `i128` Bareiss
//! almost never overflows; when it does, the big-rational path in
//! [`crate::exact`] takes over.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::exact::{int, Matrix};
use crate::{Error, Result};

struct Echelon {
    pivots: Vec<usize>,
    last: i128,
    swaps: usize,
}

fn bareiss(rows: &[Vec<i64>], ncols: usize) -> Option<Echelon> {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    let nrows = a.len();
    let mut prev: i128 = 1;
    let mut pivots = Vec::new();
    let mut swaps = 0;
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            swaps += 1;
        }
        let (head, tail) = a.split_at_mut(r + 1);
        let piv = &head[r];
        for row in tail.iter_mut() {
            let f = row[c];
            for j in c + 1..ncols {
                let t = piv[c]
                    .checked_mul(row[j])?
                    .checked_sub(f.checked_mul(piv[j])?)?;
                row[j] = t / prev;
            }
            row[c] = 0;
        }
        prev = a[r][c];
        pivots.push(c);
        r += 1;
    }
    Some(Echelon {
        pivots,
        last: prev,
        swaps,
    })
}

fn to_matrix(rows: &[Vec<i64>], ncols: usize) -> Matrix {
    Matrix::from_rows_with_cols(
        rows.iter()
            .map(|r| r.iter().map(|&v| int(v)).collect())
            .collect(),
        ncols,
    )
    .expect("rectangular rows")
}

pub(crate) fn rank(rows: &[Vec<i64>], ncols: usize) -> usize {
    match bareiss(rows, ncols) {
        Some(e) => e.pivots.len(),
        None => to_matrix(rows, ncols).rank(),
    }
}

/// Affine dimension of a point set; `-1` is reported as 0 for the empty set.
pub(crate) fn affine_rank(points: &[Vec<i64>]) -> usize {
    let Some(p0) = points.first() else {
        return 0;
    };
    let diffs: Vec<Vec<i64>> = points[1..].iter().map(|p| sub(p, p0)).collect();
    rank(&diffs, p0.len())
}

/// Columns where the echelon form of `rows` has its pivots.
pub(crate) fn pivot_columns(rows: &[Vec<i64>], ncols: usize) -> Vec<usize> {
    match bareiss(rows, ncols) {
        Some(e) => e.pivots,
        None => {
            // column pivots of the rational echelon form: greedy independent columns
            let m = to_matrix(rows, ncols).transpose();
            let mut chosen: Vec<Vec<_>> = Vec::new();
            let mut cols = Vec::new();
            for j in 0..ncols {
                chosen.push(m.row(j).to_vec());
                let mm = Matrix::from_rows(chosen.clone()).expect("rectangular");
                if mm.rank() == chosen.len() {
                    cols.push(j);
                } else {
                    chosen.pop();
                }
            }
            cols
        }
    }
}

pub(crate) fn det(rows: &[Vec<i64>]) -> Result<i128> {
    let n = rows.len();
    if n == 0 {
        return Ok(1);
    }
    match bareiss(rows, n) {
        Some(e) if e.pivots.len() < n => Ok(0),
        Some(e) => Ok(if e.swaps % 2 == 1 { -e.last } else { e.last }),
        None => {
            let d = to_matrix(rows, n).determinant()?;
            big_to_i128(d.numer())
        }
    }
}

pub(crate) fn big_to_i128(x: &BigInt) -> Result<i128> {
    if x.is_zero() {
        return Ok(0);
    }
    x.to_i128().ok_or(Error::Overflow("i128 conversion"))
}

/// Indices of a greedily chosen maximal affinely independent subset, in input order.
pub(crate) fn affinely_independent_subset(points: &[Vec<i64>]) -> Vec<usize> {
    let Some(p0) = points.first() else {
        return Vec::new();
    };
    let mut chosen = alloc::vec![0];
    let mut diffs: Vec<Vec<i64>> = Vec::new();
    for (i, p) in points.iter().enumerate().skip(1) {
        diffs.push(sub(p, p0));
        if rank(&diffs, p0.len()) == diffs.len() {
            chosen.push(i);
        } else {
            diffs.pop();
        }
    }
    chosen
}

pub(crate) fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn neg(a: &[i64]) -> Vec<i64> {
    a.iter().map(|x| -x).collect()
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

pub(crate) fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Divides by the gcd of the entries; zero vectors are left alone.
pub(crate) fn make_primitive(v: &mut [i128]) {
    let g = v.iter().fold(0, |acc, &x| gcd(acc, x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

pub(crate) fn to_i64(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow("i64 conversion"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn det_and_rank() {
        let a = vec![vec![1, 2, 3], vec![2, 4, 7], vec![1, 1, 1]];
        assert_eq!(det(&a).unwrap(), 1);
        assert_eq!(rank(&a, 3), 3);
        assert_eq!(det(&[vec![0, 1], vec![1, 0]]).unwrap(), -1);
        assert_eq!(rank(&[vec![1, 1], vec![2, 2]], 2), 1);
        assert_eq!(
            pivot_columns(&[vec![0, 1, 1], vec![0, 2, 3]], 3),
            vec![1, 2]
        );
    }

    #[test]
    fn affine_helpers() {
        let pts = vec![vec![0, 0], vec![1, 0], vec![2, 0], vec![0, 1]];
        assert_eq!(affine_rank(&pts), 2);
        assert_eq!(affinely_independent_subset(&pts), vec![0, 1, 3]);
    }
}
