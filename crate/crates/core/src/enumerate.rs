//! Fincke–Pohst enumeration of integer points in an ellipsoid.
//!
//! Pruning is done in `f64` with a small safety margin, so the result is a
//! superset of the exact answer; callers filter candidates exactly.

use alloc::vec;
use alloc::vec::Vec;

const MARGIN: f64 = 1e-7;

/// Upper-triangular `R` with `q = Rᵀ R`, or `None` if `q` is not numerically
/// positive definite.
pub(crate) fn cholesky(q: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = q.len();
    let mut r = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut d = q[i][i];
        for k in 0..i {
            d -= r[k][i] * r[k][i];
        }
        if d <= 0.0 {
            return None;
        }
        let rii = libm::sqrt(d);
        r[i][i] = rii;
        for j in i + 1..n {
            let mut s = q[i][j];
            for k in 0..i {
                s -= r[k][i] * r[k][j];
            }
            r[i][j] = s / rii;
        }
    }
    Some(r)
}

/// All `y ∈ Z^n` with `(y - center)ᵀ q (y - center) <= radius_sq` (plus a few
/// boundary points admitted by the margin).
pub(crate) fn points_in_ellipsoid(
    chol: &[Vec<f64>],
    center: &[f64],
    radius_sq: f64,
) -> Vec<Vec<i64>> {
    let n = center.len();
    let mut out = Vec::new();
    if radius_sq < -MARGIN * (1.0 + radius_sq.abs()) {
        return out;
    }
    let budget = radius_sq.max(0.0) * (1.0 + MARGIN) + MARGIN;
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut y = vec![0i64; n];
    descend(chol, center, n - 1, budget, &mut y, &mut out);
    out
}

fn descend(
    r: &[Vec<f64>],
    m: &[f64],
    i: usize,
    budget: f64,
    y: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    let n = m.len();
    let rii = r[i][i];
    let mut c = m[i];
    for j in i + 1..n {
        c -= r[i][j] / rii * (y[j] as f64 - m[j]);
    }
    let half = libm::sqrt(budget.max(0.0)) / rii;
    let lo = libm::ceil(c - half - MARGIN) as i64;
    let hi = libm::floor(c + half + MARGIN) as i64;
    for v in lo..=hi {
        let t = rii * (v as f64 - c);
        let rest = budget - t * t;
        if rest < -MARGIN * (1.0 + budget) {
            continue;
        }
        y[i] = v;
        if i == 0 {
            out.push(y.clone());
        } else {
            descend(r, m, i - 1, rest, y, out);
        }
    }
}

/// Solves `q x = b` in floating point via the Cholesky factor.
pub(crate) fn cholesky_solve(r: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    // Rᵀ z = b
    let mut z = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= r[k][i] * z[k];
        }
        z[i] = s / r[i][i];
    }
    // R x = z
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in i + 1..n {
            s -= r[i][k] * x[k];
        }
        x[i] = s / r[i][i];
    }
    x
}
