//! Delaunay decompositions of `Z^g` under a positive-definite form.
//!
//! Cells are found by walking across facets. Every cell `δ` carries the
//! affine function `a_δ` that agrees with `q` on its vertices and lies below
//! `q` on every other lattice point. Crossing a facet `F` of `δ` tilts `a_δ`
//! about `F` until it touches a new lattice point on the far side; the points
//! touched first are the new vertices. The search for the first contact runs
//! over the lattice points of a bounded ellipsoid.
//!
//! The walk is only a way to produce candidates. The result is accepted after
//! an exact check: the cells tile (volume `g!`, each facet shared by exactly
//! two cells), contain no lattice points besides their vertices, and the lift
//! is strictly convex across every facet. Together these force every cell to
//! be inscribed in an empty sphere.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::enumerate;
use crate::exact::{common_denominator, int, Matrix, QuadraticForm, Scalar};
use crate::intmat::{self, dot, sub};
use crate::polytope::{canonical_key, convex_hull, Cell, LatticeVector};
use crate::{Error, Result};

/// Face shared by the representative of `cell_a` and the representative of
/// `cell_b` translated by `translation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub cell_a: usize,
    pub cell_b: usize,
    pub translation: LatticeVector,
    /// Vertices of the shared face in the coordinates of `cell_a`.
    pub face_vertices: Vec<LatticeVector>,
    pub face_dim: usize,
}

impl Wall {
    pub fn face(&self) -> Cell {
        convex_hull(&self.face_vertices).expect("wall faces are nonempty")
    }
}

/// Maximal cell classes modulo `Z^g` and the faces they share.
///
/// With `fiber_rank = a > 0` the cells live in `Z^{g-a}` and stand for their
/// preimages under a projection `Z^g -> Z^{g-a}`; unbounded cells are never
/// built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicDecomposition {
    ambient_dim: usize,
    fiber_rank: usize,
    cells: Vec<Cell>,
    walls: Vec<Wall>,
}

impl PeriodicDecomposition {
    /// Cell classes of a polytopal decomposition; walls are derived from the
    /// cells and face-fitting along codimension-one faces is checked.
    pub fn from_cells(ambient_dim: usize, cells: Vec<Cell>) -> Result<Self> {
        let walls = compute_walls(ambient_dim, &cells)?;
        Ok(PeriodicDecomposition {
            ambient_dim,
            fiber_rank: 0,
            cells,
            walls,
        })
    }

    /// Assembles a decomposition without recomputing anything.
    pub fn from_parts(
        ambient_dim: usize,
        fiber_rank: usize,
        cells: Vec<Cell>,
        walls: Vec<Wall>,
    ) -> Result<Self> {
        if fiber_rank > ambient_dim {
            return Err(Error::InvalidInput(format!(
                "fiber rank {fiber_rank} exceeds dimension {ambient_dim}"
            )));
        }
        let base = ambient_dim - fiber_rank;
        if cells.iter().any(|c| c.ambient_dim() != base) {
            return Err(Error::DimensionMismatch(format!(
                "cells must live in dimension {base}"
            )));
        }
        for w in &walls {
            if w.cell_a >= cells.len() || w.cell_b >= cells.len() || w.translation.len() != base {
                return Err(Error::InvalidInput("wall refers to a missing cell".into()));
            }
        }
        Ok(PeriodicDecomposition {
            ambient_dim,
            fiber_rank,
            cells,
            walls,
        })
    }

    /// Preimage of a polytopal decomposition of `Z^{g-a}`.
    pub fn pullback(base: &PeriodicDecomposition, fiber_rank: usize) -> Result<Self> {
        Self::from_parts(
            base.ambient_dim + fiber_rank,
            fiber_rank,
            base.cells.clone(),
            base.walls.clone(),
        )
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn fiber_rank(&self) -> usize {
        self.fiber_rank
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn total_volume(&self) -> Result<u64> {
        self.cells.iter().map(Cell::normalized_volume).sum()
    }

    /// Sorted canonical vertex sets of the classes; two decompositions have
    /// the same cells iff these agree.
    pub fn class_keys(&self) -> Vec<Vec<LatticeVector>> {
        let mut keys: Vec<Vec<LatticeVector>> = self
            .cells
            .iter()
            .map(|c| canonical_key(c.vertices()).1)
            .collect();
        keys.sort();
        keys
    }

    pub fn same_classes(&self, other: &PeriodicDecomposition) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.fiber_rank == other.fiber_rank
            && self.class_keys() == other.class_keys()
    }

    /// Image under `x ↦ U x` for an integer matrix `U` given by rows.
    pub fn map_linear(&self, u: &[Vec<i64>]) -> Result<Self> {
        let cells = self
            .cells
            .iter()
            .map(|c| {
                let pts: Vec<LatticeVector> = c
                    .vertices()
                    .iter()
                    .map(|v| {
                        u.iter()
                            .map(|row| intmat::to_i64(dot(row, v)))
                            .collect::<Result<_>>()
                    })
                    .collect::<Result<_>>()?;
                convex_hull(&canonical_key(&pts).1)
            })
            .collect::<Result<Vec<_>>>()?;
        if self.fiber_rank == 0 {
            Self::from_cells(self.ambient_dim, cells)
        } else {
            let base = Self::from_cells(self.ambient_dim - self.fiber_rank, cells)?;
            Self::pullback(&base, self.fiber_rank)
        }
    }

    /// Number of distinct hyperplane directions (primitive normals up to sign)
    /// carrying codimension-one walls.
    pub fn wall_hyperplane_classes(&self) -> usize {
        let g = self.ambient_dim - self.fiber_rank;
        let mut normals: BTreeSet<Vec<i64>> = BTreeSet::new();
        for w in self.walls.iter().filter(|w| w.face_dim + 1 == g) {
            let cell = &self.cells[w.cell_a];
            let on: Vec<usize> = w
                .face_vertices
                .iter()
                .filter_map(|v| cell.vertex_index(v))
                .collect();
            if let Some(f) = cell.facets().iter().find(|f| f.vertices == on) {
                let mut n = f.normal.clone();
                if n.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                    n = intmat::neg(&n);
                }
                normals.insert(n);
            }
        }
        normals.len()
    }
}

/// Faces that matter for gluing: every facet, plus every face carrying more
/// lattice points than a simplex of its dimension. Returns
/// `(vertex indices, is_facet)`.
fn gluing_faces(cell: &Cell) -> Vec<(Vec<usize>, bool)> {
    let mut out: Vec<(Vec<usize>, bool)> = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut stack = Vec::new();
    for f in cell.facets() {
        if seen.insert(f.vertices.clone()) {
            out.push((f.vertices.clone(), true));
            if is_rich(cell, &f.vertices) {
                stack.push(f.vertices.clone());
            }
        }
    }
    while let Some(face) = stack.pop() {
        for sub in cell.facets_of_face(&face) {
            if seen.insert(sub.clone()) && is_rich(cell, &sub) {
                out.push((sub.clone(), false));
                stack.push(sub);
            }
        }
    }
    out
}

/// `|F ∩ X| > dim F + 1`.
pub(crate) fn is_rich(cell: &Cell, face: &[usize]) -> bool {
    face.len() > cell.face_dim(face) + 1 || face_lattice_points(cell, face).len() > face.len()
}

/// Lattice points of the cell lying on the given face.
pub fn face_lattice_points(cell: &Cell, face: &[usize]) -> Vec<LatticeVector> {
    let supporting: Vec<&crate::polytope::Facet> = cell
        .facets()
        .iter()
        .filter(|f| face.iter().all(|i| f.vertices.binary_search(i).is_ok()))
        .collect();
    cell.lattice_points()
        .iter()
        .filter(|p| {
            supporting
                .iter()
                .all(|f| dot(&f.normal, p) == f.offset as i128)
        })
        .cloned()
        .collect()
}

fn lex_positive(t: &[i64]) -> bool {
    t.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// Shared faces between class representatives and their translates.
fn compute_walls(g: usize, cells: &[Cell]) -> Result<Vec<Wall>> {
    let mut groups: BTreeMap<Vec<LatticeVector>, Vec<(usize, LatticeVector, bool)>> =
        BTreeMap::new();
    for (i, c) in cells.iter().enumerate() {
        if c.ambient_dim() != g {
            return Err(Error::DimensionMismatch(format!(
                "cell {i} lives in dimension {}, expected {g}",
                c.ambient_dim()
            )));
        }
        if !c.is_full_dimensional() {
            return Err(Error::DegenerateCell);
        }
        for (face, is_facet) in gluing_faces(c) {
            let pts: Vec<LatticeVector> = face.iter().map(|&k| c.vertices()[k].clone()).collect();
            let (offset, key) = canonical_key(&pts);
            groups.entry(key).or_default().push((i, offset, is_facet));
        }
    }
    let mut class_keys = BTreeSet::new();
    for c in cells {
        if !class_keys.insert(canonical_key(c.vertices()).1) {
            return Err(Error::InvalidInput(
                "two cells are translates of each other".into(),
            ));
        }
    }
    let mut seen: BTreeSet<(usize, usize, LatticeVector)> = BTreeSet::new();
    let mut walls = Vec::new();
    for (key, members) in &groups {
        if members[0].2 && members.len() != 2 {
            return Err(Error::NotFaceFitting(format!(
                "facet {key:?} lies on {} cells",
                members.len()
            )));
        }
        for x in 0..members.len() {
            for y in x + 1..members.len() {
                let (mut a, oa, _) = &members[x];
                let (mut b, ob, _) = &members[y];
                let mut t = sub(oa, ob);
                if a > b || (a == b && !lex_positive(&t)) {
                    core::mem::swap(&mut a, &mut b);
                    t = intmat::neg(&t);
                }
                if a == b && t.iter().all(|&v| v == 0) {
                    continue;
                }
                if !seen.insert((a, b, t.clone())) {
                    continue;
                }
                let rb: BTreeSet<LatticeVector> = cells[b]
                    .vertices()
                    .iter()
                    .map(|v| intmat::add(v, &t))
                    .collect();
                let face_vertices: Vec<LatticeVector> = cells[a]
                    .vertices()
                    .iter()
                    .filter(|v| rb.contains(*v))
                    .cloned()
                    .collect();
                let face_dim = intmat::affine_rank(&face_vertices);
                walls.push(Wall {
                    cell_a: a,
                    cell_b: b,
                    translation: t,
                    face_vertices,
                    face_dim,
                });
            }
        }
    }
    walls.sort_by(|p, q| {
        (p.cell_a, p.cell_b, &p.translation).cmp(&(q.cell_a, q.cell_b, &q.translation))
    });
    // a facet pair may also meet along a larger face found through another key
    walls.dedup_by(|p, q| {
        p.cell_a == q.cell_a && p.cell_b == q.cell_b && p.translation == q.translation
    });
    Ok(walls)
}

/// Integer multiple of the Gram matrix; Delaunay cells do not see positive scaling.
struct IntForm {
    q: Vec<Vec<i64>>,
    qf: Vec<Vec<f64>>,
    chol: Vec<Vec<f64>>,
}

impl IntForm {
    fn new(form: &QuadraticForm) -> Result<Self> {
        if !form.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let q = form.primitive_integer_gram()?;
        let qf: Vec<Vec<f64>> = q
            .iter()
            .map(|r| r.iter().map(|&v| v as f64).collect())
            .collect();
        let chol = enumerate::cholesky(&qf).ok_or(Error::NotPositiveDefinite)?;
        Ok(IntForm { q, qf, chol })
    }

    fn value(&self, y: &[i64]) -> Result<i128> {
        let mut s: i128 = 0;
        for (i, row) in self.q.iter().enumerate() {
            let ri = dot(row, y);
            s = ri
                .checked_mul(y[i] as i128)
                .and_then(|v| s.checked_add(v))
                .ok_or(Error::Overflow("form value"))?;
        }
        Ok(s)
    }
}

/// Affine function `y ↦ (alpha · y + beta) / den` with `den > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Lift {
    alpha: Vec<i128>,
    beta: i128,
    den: i128,
}

fn checked(x: Option<i128>) -> Result<i128> {
    x.ok_or(Error::Overflow("lift arithmetic"))
}

impl Lift {
    fn zero(g: usize) -> Self {
        Lift {
            alpha: vec![0; g],
            beta: 0,
            den: 1,
        }
    }

    /// `den · (q(y) - a(y))`, nonnegative on every lattice point for a valid lift.
    fn gap(&self, form: &IntForm, y: &[i64]) -> Result<i128> {
        let mut lin: i128 = self.beta;
        for (a, &v) in self.alpha.iter().zip(y) {
            lin = checked(a.checked_mul(v as i128).and_then(|t| lin.checked_add(t)))?;
        }
        checked(
            form.value(y)?
                .checked_mul(self.den)
                .and_then(|t| t.checked_sub(lin)),
        )
    }

    /// `self + (num/den) · (u · y + u0)`.
    fn tilted(&self, u: &[i64], u0: i64, num: i128, den: i128) -> Result<Lift> {
        let mut alpha = Vec::with_capacity(self.alpha.len());
        for (a, &ui) in self.alpha.iter().zip(u) {
            alpha.push(checked(
                a.checked_mul(den)
                    .zip(
                        self.den
                            .checked_mul(num)
                            .and_then(|t| t.checked_mul(ui as i128)),
                    )
                    .and_then(|(x, y)| x.checked_add(y)),
            )?);
        }
        let beta = checked(
            self.beta
                .checked_mul(den)
                .zip(
                    self.den
                        .checked_mul(num)
                        .and_then(|t| t.checked_mul(u0 as i128)),
                )
                .and_then(|(x, y)| x.checked_add(y)),
        )?;
        let mut l = Lift {
            alpha,
            beta,
            den: checked(self.den.checked_mul(den))?,
        };
        l.reduce();
        Ok(l)
    }

    fn reduce(&mut self) {
        let g = self
            .alpha
            .iter()
            .fold(intmat::gcd(self.beta, self.den), |acc, &x| {
                intmat::gcd(acc, x)
            });
        if g > 1 {
            for a in self.alpha.iter_mut() {
                *a /= g;
            }
            self.beta /= g;
            self.den /= g;
        }
    }

    /// The unique affine function through `(v, q(v))` for affinely spanning `vertices`.
    fn through(form: &IntForm, vertices: &[LatticeVector]) -> Result<Lift> {
        let g = form.q.len();
        let basis = intmat::affinely_independent_subset(vertices);
        let rows: Vec<Vec<Scalar>> = basis
            .iter()
            .map(|&i| {
                vertices[i]
                    .iter()
                    .map(|&x| int(x))
                    .chain([Scalar::one()])
                    .collect()
            })
            .collect();
        let rhs: Vec<Scalar> = basis
            .iter()
            .map(|&i| Ok(Scalar::from_integer(form.value(&vertices[i])?.into())))
            .collect::<Result<_>>()?;
        let sol = Matrix::from_rows_with_cols(rows, g + 1)?
            .solve(&rhs)
            .ok_or(Error::NoCircumsphere)?;
        let den = common_denominator(&sol);
        let ints: Vec<i128> = sol
            .iter()
            .map(|x| intmat::big_to_i128(&(x.numer() * (&den / x.denom()))))
            .collect::<Result<_>>()?;
        let mut l = Lift {
            alpha: ints[..g].to_vec(),
            beta: ints[g],
            den: intmat::big_to_i128(&den)?,
        };
        l.reduce();
        for v in vertices {
            if l.gap(form, v)? != 0 {
                return Err(Error::NoCircumsphere);
            }
        }
        Ok(l)
    }
}

fn frac_less(n1: i128, d1: i128, n2: i128, d2: i128) -> Result<bool> {
    Ok(checked(n1.checked_mul(d2))? < checked(n2.checked_mul(d1))?)
}

/// Tilts `lift` by `t · φ`, `φ(y) = u · y + u0`, with the largest `t` keeping
/// it below `q` on the lattice. Returns the tilted lift and the lattice points
/// with `φ > 0` that it touches. `start` must have `φ(start) > 0`.
fn tilt(
    form: &IntForm,
    lift: &Lift,
    u: &[i64],
    u0: i64,
    start: &[LatticeVector],
) -> Result<(Lift, Vec<LatticeVector>)> {
    let phi = |y: &[i64]| dot(u, y) + u0 as i128;
    let ratio = |y: &[i64]| -> Result<(i128, i128)> {
        let p = phi(y);
        Ok((lift.gap(form, y)?, checked(lift.den.checked_mul(p))?))
    };
    let mut best: Option<((i128, i128), LatticeVector)> = None;
    for y in start {
        debug_assert!(phi(y) > 0);
        let r = ratio(y)?;
        if best
            .as_ref()
            .map_or(Ok(true), |(b, _)| frac_less(r.0, r.1, b.0, b.1))?
        {
            best = Some((r, y.clone()));
        }
    }
    let ((n0, d0), y0) = best.expect("at least one starting point");
    let t0 = n0 as f64 / d0 as f64;
    // {y : q(y) - l·y - k <= 0} with l = alpha/den + t0 u, k = beta/den + t0 u0
    let den = lift.den as f64;
    let l: Vec<f64> = lift
        .alpha
        .iter()
        .zip(u)
        .map(|(&a, &ui)| a as f64 / den + t0 * ui as f64)
        .collect();
    let k = lift.beta as f64 / den + t0 * u0 as f64;
    let half: Vec<f64> = l.iter().map(|x| x / 2.0).collect();
    let center = enumerate::cholesky_solve(&form.chol, &half);
    let radius = k + l.iter().zip(&center).map(|(a, b)| a * b).sum::<f64>() / 2.0;
    let scale = 1.0 + form.qf.iter().flatten().map(|x| x.abs()).sum::<f64>();
    let mut cands = enumerate::points_in_ellipsoid(&form.chol, &center, radius + 1e-9 * scale);
    cands.push(y0);
    let mut min: Option<(i128, i128)> = None;
    let mut touched: Vec<LatticeVector> = Vec::new();
    for y in cands {
        if phi(&y) <= 0 {
            continue;
        }
        let (n, d) = ratio(&y)?;
        match min {
            Some((mn, md)) if frac_less(mn, md, n, d)? => {}
            Some((mn, md)) if !frac_less(n, d, mn, md)? => touched.push(y),
            _ => {
                min = Some((n, d));
                touched.clear();
                touched.push(y);
            }
        }
    }
    touched.sort();
    touched.dedup();
    let (n, d) = min.expect("start point is a candidate");
    let g = intmat::gcd(n, d);
    Ok((lift.tilted(u, u0, n / g, d / g)?, touched))
}

/// Vertices of a Delaunay cell through the origin, found by tilting the zero
/// function until its contact set spans.
fn first_cell(form: &IntForm) -> Result<Vec<LatticeVector>> {
    let g = form.q.len();
    let mut contact: Vec<LatticeVector> = vec![vec![0; g]];
    let mut lift = Lift::zero(g);
    while intmat::affine_rank(&contact) < g {
        let s0 = contact[0].clone();
        let diffs: Vec<Vec<i64>> = contact.iter().map(|s| sub(s, &s0)).collect();
        let k = Matrix::from_int_rows(&diffs)?.kernel_basis();
        let u: Vec<i64> = k
            .column(0)
            .iter()
            .map(|x| crate::exact::to_i64(x.numer()))
            .collect::<Result<_>>()?;
        let u0 = intmat::to_i64(-dot(&u, &s0))?;
        let j = u
            .iter()
            .position(|&x| x != 0)
            .expect("nonzero kernel vector");
        let mut start = s0.clone();
        start[j] += u[j].signum();
        let (next, touched) = tilt(form, &lift, &u, u0, &[start])?;
        lift = next;
        contact.extend(touched);
    }
    contact.sort();
    Ok(contact)
}

struct Walker<'a> {
    form: &'a IntForm,
    keys: BTreeMap<Vec<LatticeVector>, usize>,
    cells: Vec<(Cell, Lift)>,
}

impl Walker<'_> {
    fn add(&mut self, vertices: &[LatticeVector]) -> Result<()> {
        let key = canonical_key(vertices).1;
        if self.keys.contains_key(&key) {
            return Ok(());
        }
        let cell = convex_hull(&key)?;
        if !cell.is_full_dimensional() {
            return Err(Error::CertificationFailed("degenerate cell found".into()));
        }
        let lift = Lift::through(self.form, cell.vertices())?;
        self.keys.insert(key, self.cells.len());
        self.cells.push((cell, lift));
        Ok(())
    }

    fn run(&mut self) -> Result<()> {
        let mut crossed: BTreeSet<Vec<LatticeVector>> = BTreeSet::new();
        let mut next = 0;
        while next < self.cells.len() {
            let (cell, lift) = self.cells[next].clone();
            next += 1;
            for f in cell.facets() {
                let on: Vec<LatticeVector> = f
                    .vertices
                    .iter()
                    .map(|&i| cell.vertices()[i].clone())
                    .collect();
                if !crossed.insert(canonical_key(&on).1) {
                    continue;
                }
                // φ(y) = offset - normal · y is positive beyond the facet
                let u = intmat::neg(&f.normal);
                let off: Vec<&LatticeVector> = (0..cell.vertices().len())
                    .filter(|i| f.vertices.binary_search(i).is_err())
                    .map(|i| &cell.vertices()[i])
                    .collect();
                let mut start = Vec::new();
                for v in off.iter().take(2) {
                    for a in &on {
                        for b in &on {
                            if a <= b {
                                start.push(sub(&intmat::add(a, b), v));
                            }
                        }
                    }
                }
                let (_, touched) = tilt(self.form, &lift, &u, f.offset, &start)?;
                let mut nb = on;
                nb.extend(touched);
                self.add(&nb)?;
            }
        }
        Ok(())
    }
}

fn factorial(g: usize) -> u64 {
    (1..=g as u64).product()
}

/// Delaunay decomposition of `Z^g` for a positive-definite form. Classes are
/// ordered by vertex count (descending), then canonical vertex list;
/// representatives have their smallest vertex at the origin.
pub fn delaunay_decomposition(q: &QuadraticForm) -> Result<PeriodicDecomposition> {
    let form = IntForm::new(q)?;
    let g = q.dim();
    if g == 0 {
        return Err(Error::InvalidInput("zero-dimensional form".into()));
    }
    let mut walker = Walker {
        form: &form,
        keys: BTreeMap::new(),
        cells: Vec::new(),
    };
    let first = first_cell(&form)?;
    walker.add(&first)?;
    walker.run()?;
    let mut cells: Vec<Cell> = walker.cells.into_iter().map(|(c, _)| c).collect();
    cells.sort_by(|a, b| {
        b.vertices()
            .len()
            .cmp(&a.vertices().len())
            .then_with(|| a.vertices().cmp(b.vertices()))
    });
    let d = PeriodicDecomposition::from_cells(g, cells)?;
    certify(q, &d)?;
    Ok(d)
}

/// Exact check that `d` is the Delaunay decomposition of `q`.
pub fn certify(q: &QuadraticForm, d: &PeriodicDecomposition) -> Result<()> {
    let form = IntForm::new(q)?;
    let g = q.dim();
    let fail = |s: alloc::string::String| Err(Error::CertificationFailed(s));
    if d.fiber_rank() != 0 || d.ambient_dim() != g {
        return fail("not a polytopal decomposition of the right dimension".into());
    }
    let mut lifts = Vec::with_capacity(d.cells().len());
    for (i, c) in d.cells().iter().enumerate() {
        let lift = Lift::through(&form, c.vertices())
            .map_err(|_| Error::CertificationFailed(format!("cell {i} is not inscribed")))?;
        if c.lattice_points().len() != c.vertices().len() {
            return fail(format!(
                "cell {i} contains a lattice point besides its vertices"
            ));
        }
        lifts.push(lift);
    }
    let vol = d.total_volume()?;
    if vol != factorial(g) {
        return fail(format!(
            "cell volumes add up to {vol}, expected {}",
            factorial(g)
        ));
    }
    // every facet appears in exactly one codimension-one wall
    let mut facet_count = 0usize;
    for w in d.walls().iter().filter(|w| w.face_dim + 1 == g) {
        facet_count += 2;
        let rb = &d.cells()[w.cell_b];
        for v in rb.vertices() {
            let v = intmat::add(v, &w.translation);
            if w.face_vertices.contains(&v) {
                continue;
            }
            if lifts[w.cell_a].gap(&form, &v)? <= 0 {
                return fail(format!(
                    "lift is not strictly convex across a wall of cells {} and {}",
                    w.cell_a, w.cell_b
                ));
            }
        }
    }
    let facets: usize = d.cells().iter().map(|c| c.facets().len()).sum();
    if facet_count != facets {
        return fail(format!(
            "{facets} facets but {facet_count} facet incidences in walls"
        ));
    }
    Ok(())
}

/// `4 · trace(q)`: a generous bound on squared circumradii used for explicit windows.
pub fn window_radius(q: &QuadraticForm) -> Scalar {
    q.trace() * int(4)
}

/// All lattice points `x` with `q(x) <= radius`.
pub fn window(q: &QuadraticForm, radius: &Scalar) -> Result<Vec<LatticeVector>> {
    let form = IntForm::new(q)?;
    let g = q.dim();
    let r = radius * primitive_ratio(q, &form);
    let rf = r.to_f64().unwrap_or(f64::MAX);
    let mut pts: Vec<LatticeVector> = enumerate::points_in_ellipsoid(&form.chol, &vec![0.0; g], rf)
        .into_iter()
        .filter(|y| {
            form.value(y)
                .map(|v| Scalar::from_integer(v.into()) <= r)
                .unwrap_or(false)
        })
        .collect();
    pts.sort();
    Ok(pts)
}

/// The positive rational `s` with integer Gram matrix `= s · q`.
fn primitive_ratio(q: &QuadraticForm, form: &IntForm) -> Scalar {
    let g = q.dim();
    for i in 0..g {
        for j in 0..g {
            let x = &q.gram()[(i, j)];
            if !x.is_zero() {
                return int(form.q[i][j]) / x;
            }
        }
    }
    Scalar::one()
}

/// Circumsphere of a cell under `q`, certified empty on a finite window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmptySphereCertificate {
    pub center: Vec<Scalar>,
    pub squared_radius: Scalar,
    /// Window points on the sphere that are not vertices of the cell.
    pub boundary_points: Vec<LatticeVector>,
}

/// Computes the `q`-circumcenter of `c` in its affine hull and checks that no
/// window point lies strictly inside the sphere.
pub fn verify_empty_sphere(
    c: &Cell,
    q: &QuadraticForm,
    window: &[LatticeVector],
) -> Result<EmptySphereCertificate> {
    if !q.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let g = q.dim();
    let verts = c.vertices();
    let v0 = &verts[0];
    let basis_idx = intmat::affinely_independent_subset(verts);
    let basis: Vec<Vec<Scalar>> = basis_idx[1..]
        .iter()
        .map(|&i| sub(&verts[i], v0).iter().map(|&x| int(x)).collect())
        .collect();
    let d = basis.len();
    let gram = q.gram();
    let qv0: Vec<Scalar> = gram.mul_vec(&v0.iter().map(|&x| int(x)).collect::<Vec<_>>());
    // 2 (v - v0)ᵀ Q (v0 + Σ μ_k b_k) = q(v) - q(v0)
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for v in &verts[1..] {
        let dv: Vec<Scalar> = sub(v, v0).iter().map(|&x| int(x)).collect();
        let qdv = gram.mul_vec(&dv);
        let row: Vec<Scalar> = basis.iter().map(|b| int(2) * dot_s(&qdv, b)).collect();
        rows.push(row);
        rhs.push(q.value(v) - q.value(v0) - int(2) * dot_s(&dv, &qv0));
    }
    let center: Vec<Scalar> = if d == 0 {
        v0.iter().map(|&x| int(x)).collect()
    } else {
        let mu = Matrix::from_rows_with_cols(rows, d)?
            .solve(&rhs)
            .ok_or(Error::NoCircumsphere)?;
        (0..g)
            .map(|k| {
                basis
                    .iter()
                    .zip(&mu)
                    .fold(int(v0[k]), |acc, (b, m)| acc + &b[k] * m)
            })
            .collect()
    };
    let dist = |x: &[i64]| -> Scalar {
        let diff: Vec<Scalar> = x.iter().zip(&center).map(|(&a, b)| int(a) - b).collect();
        q.value_rational(&diff)
    };
    let r = dist(v0);
    if verts.iter().any(|v| dist(v) != r) {
        return Err(Error::NoCircumsphere);
    }
    let mut boundary_points = Vec::new();
    // the reported witness is the inside point closest to the center
    let mut deepest: Option<(Scalar, &LatticeVector)> = None;
    for x in window {
        if c.vertex_index(x).is_some() {
            continue;
        }
        let dx = dist(x);
        if dx < r {
            if deepest
                .as_ref()
                .is_none_or(|(best, y)| dx < *best || (dx == *best && x < *y))
            {
                deepest = Some((dx, x));
            }
        } else if dx == r {
            boundary_points.push(x.clone());
        }
    }
    if let Some((_, x)) = deepest {
        return Err(Error::SphereNotEmpty { witness: x.clone() });
    }
    boundary_points.sort();
    Ok(EmptySphereCertificate {
        center,
        squared_radius: r,
        boundary_points,
    })
}

fn dot_s(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter()
        .zip(b)
        .fold(Scalar::zero(), |acc, (x, y)| acc + x * y)
}

/// Every class representative passes [`verify_empty_sphere`] against the
/// window of radius `scale · window_radius(q)` around each of its vertices.
pub fn check_window(q: &QuadraticForm, d: &PeriodicDecomposition, scale: &Scalar) -> Result<()> {
    if !scale.is_positive() {
        return Err(Error::InvalidInput("window scale must be positive".into()));
    }
    let base = window(q, &(window_radius(q) * scale))?;
    for c in d.cells() {
        let pts: Vec<LatticeVector> = c
            .vertices()
            .iter()
            .flat_map(|v| base.iter().map(move |w| intmat::add(v, w)))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        verify_empty_sphere(c, q, &pts).map_err(|e| match e {
            Error::SphereNotEmpty { witness } => Error::WindowUnstable(format!(
                "lattice point {witness:?} inside the sphere of a cell"
            )),
            other => other,
        })?;
    }
    Ok(())
}
