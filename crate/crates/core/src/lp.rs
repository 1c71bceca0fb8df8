//! Dense exact simplex method over the rationals with Bland's rule.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::exact::{Matrix, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Scalar>, value: Scalar },
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Scalar>>,
    rhs: Vec<Scalar>,
    basis: Vec<usize>,
    /// Reduced costs for maximization; optimal once none is positive.
    cost: Vec<Scalar>,
    value: Scalar,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        self.rhs[r] = &self.rhs[r] / &p;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for (v, pv) in self.cost.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.value += &f * &prhs;
        }
        self.basis[r] = c;
    }

    /// Runs to optimality; `false` if unbounded.
    fn solve(&mut self) -> bool {
        loop {
            let Some(c) = (0..self.cost.len()).find(|&j| self.cost[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(Scalar, usize, usize)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((r, _, b)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                };
                if better {
                    best = Some((ratio, i, self.basis[i]));
                }
            }
            let Some((_, r, _)) = best else {
                return false;
            };
            self.pivot(r, c);
        }
    }

    fn primal(&self, n: usize) -> Vec<Scalar> {
        let mut x = vec![Scalar::zero(); n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs[i].clone();
            }
        }
        x
    }
}

/// Maximizes `c · x` subject to `A x <= b`, `x >= 0`, for `b >= 0`.
pub fn maximize(a: &Matrix, b: &[Scalar], c: &[Scalar]) -> LpOutcome {
    let (m, n) = (a.rows(), a.cols());
    assert!(
        b.iter().all(|v| !v.is_negative()),
        "right-hand side must be nonnegative"
    );
    let rows: Vec<Vec<Scalar>> = (0..m)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.extend((0..m).map(|k| {
                if k == i {
                    Scalar::one()
                } else {
                    Scalar::zero()
                }
            }));
            r
        })
        .collect();
    let mut cost = c.to_vec();
    cost.extend(core::iter::repeat_n(Scalar::zero(), m));
    let mut t = Tableau {
        rows,
        rhs: b.to_vec(),
        basis: (n..n + m).collect(),
        cost,
        value: Scalar::zero(),
    };
    if !t.solve() {
        return LpOutcome::Unbounded;
    }
    LpOutcome::Optimal {
        x: t.primal(n),
        value: t.value,
    }
}

/// Some `x >= 0` with `A x = b`, by the phase-one method.
pub fn feasible_point(a: &Matrix, b: &[Scalar]) -> Option<Vec<Scalar>> {
    let (m, n) = (a.rows(), a.cols());
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut r: Vec<Scalar> = a
            .row(i)
            .iter()
            .map(|v| if flip { -v } else { v.clone() })
            .collect();
        r.extend((0..m).map(|k| {
            if k == i {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        }));
        rows.push(r);
        rhs.push(if flip { -&b[i] } else { b[i].clone() });
    }
    // maximize -Σ artificials; reduced costs start at the column sums
    let mut cost: Vec<Scalar> = (0..n)
        .map(|j| rows.iter().fold(Scalar::zero(), |acc, r| acc + &r[j]))
        .collect();
    cost.extend(core::iter::repeat_n(Scalar::zero(), m));
    let value = -rhs.iter().fold(Scalar::zero(), |acc, v| acc + v);
    let mut t = Tableau {
        rows,
        rhs,
        basis: (n..n + m).collect(),
        cost,
        value,
    };
    t.solve();
    if t.value.is_zero() {
        Some(t.primal(n))
    } else {
        None
    }
}
