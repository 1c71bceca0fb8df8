//! Secondary cones of periodic decompositions.
//!
//! A form `q` makes a decomposition Delaunay iff for every cell class there
//! is an affine function agreeing with `q` on the cell's lattice points and
//! the resulting piecewise affine function is strictly convex across every
//! facet. Fixing each affine function by its values on an anchor simplex of
//! vertices turns both conditions into linear conditions on `q` alone:
//! equalities `q(x) = Σ λ_s(x) q(s)` for the remaining lattice points of a
//! cell, and strict inequalities `q(v) > Σ λ_s(v) q(s)` for the vertices of
//! the neighbour beyond each facet.
//!
//! Forms are coordinatized by the upper triangle of the Gram matrix.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::delaunay::{delaunay_decomposition, PeriodicDecomposition};
use crate::exact::{int, primitive_integer_vector, to_i64, Matrix, QuadraticForm, Scalar};
use crate::intmat;
use crate::lp::{self, LpOutcome};
use crate::polytope::{barycentric, LatticeVector};
use crate::sheaf::{h0_general, StratumReport};
use crate::{Error, Result};

/// Strict inequality attached to a codimension-one wall and a vertex of the
/// neighbouring cell, with its weight in a Farkas combination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasTerm {
    pub wall: usize,
    pub point: LatticeVector,
    pub weight: Scalar,
}

/// Equality `q(point) = a_cell(point)` with its multiplier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqualityTerm {
    pub cell: usize,
    pub point: LatticeVector,
    pub multiplier: Scalar,
}

/// `Σ weight · (strict row) + Σ multiplier · (equality row) = 0` with
/// nonnegative, not all zero weights: no form satisfies the equalities and
/// all strict inequalities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub terms: Vec<FarkasTerm>,
    pub equalities: Vec<EqualityTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeCertificate {
    /// `g(g+1)/2`.
    pub form_space_dim: usize,
    /// Dimension of the space of forms satisfying all equalities.
    pub equality_solution_dim: usize,
    pub witness: Option<QuadraticForm>,
    pub farkas: Option<FarkasCertificate>,
}

impl ConeCertificate {
    pub fn is_delaunay(&self) -> bool {
        self.witness.is_some()
    }

    /// Codimension of the cone in the space of forms; this is the dimension
    /// of the stratum of the Voronoi compactification. Only defined when the
    /// cone has interior in its span.
    pub fn voronoi_stratum_dim(&self) -> Option<usize> {
        self.witness
            .as_ref()
            .map(|_| self.form_space_dim - self.equality_solution_dim)
    }
}

fn coordinate_index(g: usize) -> Vec<(usize, usize)> {
    let mut idx = Vec::with_capacity(g * (g + 1) / 2);
    for i in 0..g {
        for j in i..g {
            idx.push((i, j));
        }
    }
    idx
}

/// Coefficients of `q(x)` as a linear form in the Gram entries.
fn evaluation_row(x: &[i64]) -> Vec<Scalar> {
    coordinate_index(x.len())
        .into_iter()
        .map(|(i, j)| {
            let v = x[i] * x[j];
            int(if i == j { v } else { 2 * v })
        })
        .collect()
}

fn form_from_coordinates(g: usize, p: &[Scalar]) -> Result<QuadraticForm> {
    let mut m = Matrix::zeros(g, g);
    for ((i, j), v) in coordinate_index(g).into_iter().zip(p) {
        m[(i, j)] = v.clone();
        m[(j, i)] = v.clone();
    }
    QuadraticForm::new(m)
}

/// Anchor simplex of a cell: the lexicographically greedy affinely
/// independent subset of its vertices.
fn anchors(d: &PeriodicDecomposition, cell: usize) -> Vec<LatticeVector> {
    let verts = d.cells()[cell].vertices();
    intmat::affinely_independent_subset(verts)
        .into_iter()
        .map(|i| verts[i].clone())
        .collect()
}

/// `e(x) - Σ λ_s(x) e(s)` over the anchors of `cell`; its value on `q` is
/// `q(x) - a_cell(x)`.
fn relative_row(d: &PeriodicDecomposition, cell: usize, x: &[i64]) -> Result<Vec<Scalar>> {
    let s = anchors(d, cell);
    let lam = barycentric(&s, x).ok_or(Error::DegenerateCell)?;
    let mut row = evaluation_row(x);
    for (p, l) in s.iter().zip(&lam) {
        for (r, e) in row.iter_mut().zip(evaluation_row(p)) {
            *r -= l * e;
        }
    }
    Ok(row)
}

/// Constraint rows keyed by `(index, lattice point)`.
type KeyedRows = Vec<((usize, LatticeVector), Vec<Scalar>)>;

/// Equality rows, keyed by `(cell, lattice point)`.
fn equality_rows(d: &PeriodicDecomposition) -> Result<KeyedRows> {
    let mut out = Vec::new();
    for (i, c) in d.cells().iter().enumerate() {
        let s = anchors(d, i);
        for x in c.lattice_points() {
            if s.contains(x) {
                continue;
            }
            out.push(((i, x.clone()), relative_row(d, i, x)?));
        }
    }
    Ok(out)
}

/// Strict rows, keyed by `(wall, vertex beyond the wall)`.
fn strict_rows(d: &PeriodicDecomposition) -> Result<KeyedRows> {
    let g = d.ambient_dim();
    let mut out = Vec::new();
    for (k, w) in d.walls().iter().enumerate() {
        if w.face_dim + 1 != g {
            continue;
        }
        for v in d.cells()[w.cell_b].vertices() {
            let v = intmat::add(v, &w.translation);
            if w.face_vertices.contains(&v) {
                continue;
            }
            out.push(((k, v.clone()), relative_row(d, w.cell_a, &v)?));
        }
    }
    Ok(out)
}

fn check_input(d: &PeriodicDecomposition) -> Result<()> {
    if d.fiber_rank() != 0 {
        return Err(Error::NotPolytopal(d.fiber_rank()));
    }
    let g = d.ambient_dim();
    let facets: usize = d.cells().iter().map(|c| c.facets().len()).sum();
    let incidences = 2 * d.walls().iter().filter(|w| w.face_dim + 1 == g).count();
    if facets != incidences {
        return Err(Error::NotFaceFitting(format!(
            "{facets} facets but {incidences} facet incidences in walls"
        )));
    }
    Ok(())
}

/// Decides whether `d` is the Delaunay decomposition of some form.
pub fn secondary_cone(d: &PeriodicDecomposition) -> Result<ConeCertificate> {
    check_input(d)?;
    let g = d.ambient_dim();
    let m = g * (g + 1) / 2;
    let eq = equality_rows(d)?;
    let strict = strict_rows(d)?;
    let e = Matrix::from_rows_with_cols(eq.iter().map(|(_, r)| r.clone()).collect(), m)?;
    let v = e.kernel_basis();
    let k = v.cols();

    // strict rows restricted to the solution space, deduplicated up to positive scaling
    let mut unique: BTreeMap<Vec<num_bigint::BigInt>, usize> = BTreeMap::new();
    let mut reps: Vec<usize> = Vec::new();
    let mut c_rows: Vec<Vec<Scalar>> = Vec::new();
    for (idx, (_, row)) in strict.iter().enumerate() {
        let r: Vec<Scalar> = (0..k)
            .map(|j| {
                row.iter()
                    .enumerate()
                    .fold(Scalar::zero(), |acc, (i, x)| acc + x * &v[(i, j)])
            })
            .collect();
        let key = primitive_integer_vector(&r);
        if let Entry::Vacant(e) = unique.entry(key) {
            e.insert(reps.len());
            reps.push(idx);
            c_rows.push(r);
        }
    }
    let n_rows = c_rows.len();

    // max ε subject to C λ >= ε, ε <= 1, with λ = λ⁺ - λ⁻
    let mut a_rows = Vec::with_capacity(n_rows + 1);
    for r in &c_rows {
        let mut row: Vec<Scalar> = r.iter().map(|x| -x).collect();
        row.extend(r.iter().cloned());
        row.push(int(1));
        a_rows.push(row);
    }
    let mut cap = vec![Scalar::zero(); 2 * k];
    cap.push(int(1));
    a_rows.push(cap);
    let a = Matrix::from_rows_with_cols(a_rows, 2 * k + 1)?;
    let mut b = vec![Scalar::zero(); n_rows];
    b.push(int(1));
    let mut obj = vec![Scalar::zero(); 2 * k];
    obj.push(int(1));
    let LpOutcome::Optimal { x, value } = lp::maximize(&a, &b, &obj) else {
        return Err(Error::CertificationFailed(
            "slack maximization is unbounded".into(),
        ));
    };

    if value.is_positive() {
        let lam: Vec<Scalar> = (0..k).map(|j| &x[j] - &x[k + j]).collect();
        let q: Vec<Scalar> = v.mul_vec(&lam);
        let ints = primitive_integer_vector(&q);
        let p: Vec<Scalar> = ints
            .iter()
            .map(|z| to_i64(z).map(int))
            .collect::<Result<_>>()?;
        let witness = form_from_coordinates(g, &p)?;
        if !witness.is_positive_definite() {
            return Err(Error::CertificationFailed(
                "strictly feasible form is not positive definite".into(),
            ));
        }
        let del = delaunay_decomposition(&witness)?;
        if !del.same_classes(d) {
            return Err(Error::CertificationFailed(
                "Delaunay decomposition of the witness differs from the input".into(),
            ));
        }
        return Ok(ConeCertificate {
            form_space_dim: m,
            equality_solution_dim: k,
            witness: Some(witness),
            farkas: None,
        });
    }

    // Gordan alternative: y >= 0, Σ y = 1, Cᵀ y = 0
    let mut rows: Vec<Vec<Scalar>> = (0..k)
        .map(|j| c_rows.iter().map(|r| r[j].clone()).collect())
        .collect();
    rows.push(vec![int(1); n_rows]);
    let mut rhs = vec![Scalar::zero(); k];
    rhs.push(int(1));
    let y =
        lp::feasible_point(&Matrix::from_rows_with_cols(rows, n_rows)?, &rhs).ok_or_else(|| {
            Error::CertificationFailed("neither a witness nor a Farkas certificate exists".into())
        })?;
    let terms: Vec<FarkasTerm> = y
        .iter()
        .zip(&reps)
        .filter(|(w, _)| !w.is_zero())
        .map(|(w, &idx)| FarkasTerm {
            wall: strict[idx].0 .0,
            point: strict[idx].0 .1.clone(),
            weight: w.clone(),
        })
        .collect();
    // the combination vanishes on ker E, so it is minus a combination of equality rows
    let mut combo = vec![Scalar::zero(); m];
    for (w, &idx) in y.iter().zip(&reps) {
        for (c, s) in combo.iter_mut().zip(&strict[idx].1) {
            *c -= w * s;
        }
    }
    let mu = e
        .transpose()
        .solve(&combo)
        .ok_or_else(|| Error::CertificationFailed("Farkas combination outside row space".into()))?;
    let equalities = mu
        .into_iter()
        .zip(&eq)
        .filter(|(mu, _)| !mu.is_zero())
        .map(|(multiplier, ((cell, point), _))| EqualityTerm {
            cell: *cell,
            point: point.clone(),
            multiplier,
        })
        .collect();
    let cert = FarkasCertificate { terms, equalities };
    debug_assert!(cert.verify(d).is_ok());
    Ok(ConeCertificate {
        form_space_dim: m,
        equality_solution_dim: k,
        witness: None,
        farkas: Some(cert),
    })
}

impl FarkasCertificate {
    /// Rebuilds every referenced row from `d` and checks the combination exactly.
    pub fn verify(&self, d: &PeriodicDecomposition) -> Result<()> {
        let g = d.ambient_dim();
        let m = g * (g + 1) / 2;
        let fail = |s: &str| Err(Error::CertificationFailed(s.into()));
        if self.terms.is_empty() || self.terms.iter().any(|t| !t.weight.is_positive()) {
            return fail("weights must be positive");
        }
        let mut sum = vec![Scalar::zero(); m];
        for t in &self.terms {
            let Some(w) = d.walls().get(t.wall) else {
                return fail("term refers to a missing wall");
            };
            let beyond = d.cells()[w.cell_b]
                .vertices()
                .iter()
                .any(|v| intmat::add(v, &w.translation) == t.point);
            if w.face_dim + 1 != g || !beyond || w.face_vertices.contains(&t.point) {
                return fail("term point is not beyond its wall");
            }
            for (s, r) in sum.iter_mut().zip(relative_row(d, w.cell_a, &t.point)?) {
                *s += &t.weight * r;
            }
        }
        for e in &self.equalities {
            let Some(c) = d.cells().get(e.cell) else {
                return fail("equality refers to a missing cell");
            };
            if c.lattice_points().binary_search(&e.point).is_err() {
                return fail("equality point outside its cell");
            }
            for (s, r) in sum.iter_mut().zip(relative_row(d, e.cell, &e.point)?) {
                *s += &e.multiplier * r;
            }
        }
        if sum.iter().any(|x| !x.is_zero()) {
            return fail("combination does not vanish");
        }
        Ok(())
    }
}

/// `h0` against the Voronoi stratum dimension; a larger `h0` signals an
/// extra component of the compactification through this stratum.
pub fn et_detect(d: &PeriodicDecomposition) -> Result<StratumReport> {
    let cone = secondary_cone(d)?;
    let stratum = cone.voronoi_stratum_dim().ok_or(Error::NotDelaunay)?;
    let mut report = h0_general(d)?;
    report.voronoi_cone_dim = Some(stratum);
    report.secondary_cone_dim = Some(cone.equality_solution_dim);
    report.et_flag = Some(report.h0 > stratum);
    Ok(report)
}
