//! Lattice polytopes: convex hulls, face lattices, lattice points and volumes.
//!
//! A [`Cell`] works in a chart: the coordinates picked out by the pivot
//! columns of its vertex differences. The projection to those coordinates is
//! injective on the affine hull, so a lower-dimensional cell is handled as a
//! full-dimensional polytope of the chart and lifted back when needed.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::exact::{int, Matrix, Scalar};
use crate::intmat::{self, dot, make_primitive, sub};
use crate::{Error, Result};

pub type LatticeVector = Vec<i64>;

/// Inequality `normal · x >= offset` with a primitive inner normal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
    /// Indices into [`Cell::vertices`] of the vertices on this facet, sorted.
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    ambient_dim: usize,
    vertices: Vec<LatticeVector>,
    affine_dim: usize,
    chart: Vec<usize>,
    equations: Vec<(Vec<i64>, i64)>,
    facets: Vec<Facet>,
    lattice_points: Vec<LatticeVector>,
}

/// Convex hull of a nonempty point set; non-extreme points are dropped.
pub fn convex_hull(points: &[LatticeVector]) -> Result<Cell> {
    let g = points.first().ok_or(Error::EmptyPointSet)?.len();
    if points.iter().any(|p| p.len() != g) {
        return Err(Error::DimensionMismatch(
            "points of different lengths".into(),
        ));
    }
    let pts: Vec<LatticeVector> = points
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let p0 = pts[0].clone();
    let diffs: Vec<Vec<i64>> = pts[1..].iter().map(|p| sub(p, &p0)).collect();
    let chart = intmat::pivot_columns(&diffs, g);
    let d = chart.len();
    let projected: Vec<Vec<i64>> = pts.iter().map(|p| project(p, &chart)).collect();

    let raw = chart_facets(&projected, d)?;
    // a point is extreme iff the facets through it cut out just that point
    let tight: Vec<Vec<usize>> = projected
        .iter()
        .map(|p| {
            (0..raw.len())
                .filter(|&f| dot(&raw[f].0, p) == raw[f].1 as i128)
                .collect()
        })
        .collect();
    let extreme: Vec<usize> = (0..pts.len())
        .filter(|&i| {
            if d == 0 {
                return true;
            }
            let normals: Vec<Vec<i64>> = tight[i].iter().map(|&f| raw[f].0.clone()).collect();
            intmat::rank(&normals, d) == d
        })
        .collect();
    let vertices: Vec<LatticeVector> = extreme.iter().map(|&i| pts[i].clone()).collect();
    let facets = raw
        .iter()
        .enumerate()
        .map(|(f, (u, c))| {
            let mut normal = vec![0; g];
            for (k, &col) in chart.iter().enumerate() {
                normal[col] = u[k];
            }
            let on: Vec<usize> = extreme
                .iter()
                .enumerate()
                .filter(|(_, &i)| tight[i].contains(&f))
                .map(|(new, _)| new)
                .collect();
            Facet {
                normal,
                offset: *c,
                vertices: on,
            }
        })
        .collect();

    let equations = hull_equations(&diffs, g, &p0)?;
    let mut cell = Cell {
        ambient_dim: g,
        vertices,
        affine_dim: d,
        chart,
        equations,
        facets,
        lattice_points: Vec::new(),
    };
    cell.lattice_points = cell.enumerate_lattice_points()?;
    Ok(cell)
}

fn project(p: &[i64], chart: &[usize]) -> Vec<i64> {
    chart.iter().map(|&c| p[c]).collect()
}

fn hull_equations(diffs: &[Vec<i64>], g: usize, p0: &[i64]) -> Result<Vec<(Vec<i64>, i64)>> {
    let m = Matrix::from_rows_with_cols(
        diffs
            .iter()
            .map(|r| r.iter().map(|&v| int(v)).collect())
            .collect(),
        g,
    )?;
    let k = m.kernel_basis();
    (0..k.cols())
        .map(|j| {
            let w: Vec<i64> = k
                .column(j)
                .iter()
                .map(|x| crate::exact::to_i64(x.numer()))
                .collect::<Result<_>>()?;
            let b = intmat::to_i64(dot(&w, p0))?;
            Ok((w, b))
        })
        .collect()
}

/// Bit set over constraint indices.
#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn is_subset(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
}

/// Facets of a full-dimensional point configuration in `Z^d`, as `(u, c)` with
/// `u · p >= c`, by the double description method on the cone of valid
/// inequalities `{(u, c) : u · p - c >= 0}`. Points are added one at a time.
fn chart_facets(pts: &[Vec<i64>], d: usize) -> Result<Vec<(Vec<i64>, i64)>> {
    if d == 0 {
        return Ok(Vec::new());
    }
    let n = pts.len();
    let rows: Vec<Vec<i128>> = pts
        .iter()
        .map(|p| p.iter().map(|&x| x as i128).chain([-1]).collect())
        .collect();
    let basis = intmat::affinely_independent_subset(pts);
    debug_assert_eq!(basis.len(), d + 1);
    let a0 = Matrix::from_rows(
        basis
            .iter()
            .map(|&i| rows[i].iter().map(|&v| int(v as i64)).collect())
            .collect(),
    )?;
    let inv = a0.inverse().expect("affinely independent points");
    let mut rays: Vec<(Vec<i128>, Bits)> = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let col: Vec<Scalar> = inv.column(j);
        let r: Vec<i128> = crate::exact::primitive_integer_vector(&col)
            .iter()
            .map(intmat::big_to_i128)
            .collect::<Result<_>>()?;
        let mut z = Bits::new(n);
        for (k, &b) in basis.iter().enumerate() {
            if k != j {
                z.set(b);
            }
        }
        rays.push((r, z));
    }
    let eval = |row: &[i128], r: &[i128]| -> Result<i128> {
        row.iter().zip(r).try_fold(0i128, |acc, (a, b)| {
            a.checked_mul(*b)
                .and_then(|v| acc.checked_add(v))
                .ok_or(Error::Overflow("hull ray evaluation"))
        })
    };
    for (i, row) in rows.iter().enumerate() {
        if basis.contains(&i) {
            continue;
        }
        let vals: Vec<i128> = rays
            .iter()
            .map(|(r, _)| eval(row, r))
            .collect::<Result<_>>()?;
        if vals.iter().all(|&v| v >= 0) {
            for (k, (_, z)) in rays.iter_mut().enumerate() {
                if vals[k] == 0 {
                    z.set(i);
                }
            }
            continue;
        }
        let plus: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] > 0).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] < 0).collect();
        let mut fresh = Vec::new();
        for &p in &plus {
            for &m in &minus {
                let common = rays[p].1.and(&rays[m].1);
                if (common.count() as usize) + 1 < d {
                    continue;
                }
                let adjacent =
                    (0..rays.len()).all(|k| k == p || k == m || !common.is_subset(&rays[k].1));
                if !adjacent {
                    continue;
                }
                let (sp, sm) = (vals[p], vals[m]);
                let mut r: Vec<i128> = rays[p]
                    .0
                    .iter()
                    .zip(&rays[m].0)
                    .map(|(&a, &b)| {
                        sp.checked_mul(b)
                            .zip(sm.checked_mul(a))
                            .and_then(|(x, y)| x.checked_sub(y))
                            .ok_or(Error::Overflow("hull ray combination"))
                    })
                    .collect::<Result<_>>()?;
                make_primitive(&mut r);
                let mut z = common;
                z.set(i);
                fresh.push((r, z));
            }
        }
        let mut next: Vec<(Vec<i128>, Bits)> = Vec::new();
        for (k, mut ray) in rays.into_iter().enumerate() {
            if vals[k] == 0 {
                ray.1.set(i);
            }
            if vals[k] >= 0 {
                next.push(ray);
            }
        }
        next.extend(fresh);
        rays = next;
    }
    rays.into_iter()
        .map(|(r, _)| {
            let mut u: Vec<i128> = r[..d].to_vec();
            let g = u.iter().fold(0, |acc, &x| intmat::gcd(acc, x));
            for x in u.iter_mut() {
                *x /= g;
            }
            let c = r[d] / g;
            Ok((
                u.into_iter().map(intmat::to_i64).collect::<Result<_>>()?,
                intmat::to_i64(c)?,
            ))
        })
        .collect::<Result<Vec<_>>>()
        .map(|mut v| {
            v.sort();
            v
        })
}

impl Cell {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[LatticeVector] {
        &self.vertices
    }

    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim == self.ambient_dim
    }

    /// Facets relative to the affine hull; for a full-dimensional cell these are
    /// the usual facet inequalities.
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Equations `w · x = b` cutting out the affine hull.
    pub fn hull_equations(&self) -> &[(Vec<i64>, i64)] {
        &self.equations
    }

    /// All integer points of the cell, lexicographically sorted.
    pub fn lattice_points(&self) -> &[LatticeVector] {
        &self.lattice_points
    }

    pub fn is_simplex(&self) -> bool {
        self.vertices.len() == self.affine_dim + 1
    }

    pub fn vertex_index(&self, x: &[i64]) -> Option<usize> {
        self.vertices.binary_search_by(|v| v.as_slice().cmp(x)).ok()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.equations.iter().all(|(w, b)| dot(w, x) == *b as i128)
            && self
                .facets
                .iter()
                .all(|f| dot(&f.normal, x) >= f.offset as i128)
    }

    pub fn translated(&self, t: &[i64]) -> Cell {
        let shift = |p: &LatticeVector| intmat::add(p, t);
        Cell {
            ambient_dim: self.ambient_dim,
            vertices: self.vertices.iter().map(shift).collect(),
            affine_dim: self.affine_dim,
            chart: self.chart.clone(),
            equations: self
                .equations
                .iter()
                .map(|(w, b)| (w.clone(), b + dot(w, t) as i64))
                .collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    normal: f.normal.clone(),
                    offset: f.offset + dot(&f.normal, t) as i64,
                    vertices: f.vertices.clone(),
                })
                .collect(),
            lattice_points: self.lattice_points.iter().map(shift).collect(),
        }
    }

    /// Affine dimension of a set of vertices given by index.
    pub fn face_dim(&self, face: &[usize]) -> usize {
        let pts: Vec<LatticeVector> = face.iter().map(|&i| self.vertices[i].clone()).collect();
        intmat::affine_rank(&pts)
    }

    /// Facets of a face given by its sorted vertex indices.
    pub fn facets_of_face(&self, face: &[usize]) -> Vec<Vec<usize>> {
        let mut cands: Vec<Vec<usize>> = self
            .facets
            .iter()
            .map(|f| {
                face.iter()
                    .copied()
                    .filter(|i| f.vertices.binary_search(i).is_ok())
                    .collect::<Vec<usize>>()
            })
            .filter(|s| !s.is_empty() && s.len() < face.len())
            .collect();
        cands.sort();
        cands.dedup();
        let maximal: Vec<Vec<usize>> = cands
            .iter()
            .filter(|s| {
                !cands
                    .iter()
                    .any(|t| t.len() > s.len() && s.iter().all(|i| t.binary_search(i).is_ok()))
            })
            .cloned()
            .collect();
        maximal
    }

    /// Every nonempty face, the cell itself included, as sorted vertex index sets.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut stack = vec![all];
        while let Some(f) = stack.pop() {
            if !seen.insert(f.clone()) {
                continue;
            }
            if f.len() == 1 {
                continue;
            }
            stack.extend(self.facets_of_face(&f));
        }
        seen.into_iter().collect()
    }

    /// The face spanned by the given vertices as a cell of its own.
    pub fn face_cell(&self, face: &[usize]) -> Cell {
        let pts: Vec<LatticeVector> = face.iter().map(|&i| self.vertices[i].clone()).collect();
        convex_hull(&pts).expect("faces are nonempty")
    }

    /// True iff every proper face is a simplex, i.e. every facet is.
    pub fn is_simplicial_boundary(&self) -> bool {
        self.facets
            .iter()
            .all(|f| f.vertices.len() == self.affine_dim)
    }

    /// Pulling triangulation: cone the minimal vertex over the triangulated
    /// facets not containing it, recursively. Simplices are vertex index sets.
    pub fn triangulation(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let mut out = Vec::new();
        self.pull(&all, self.affine_dim, &mut out);
        out
    }

    fn pull(&self, face: &[usize], dim: usize, out: &mut Vec<Vec<usize>>) {
        if face.len() == dim + 1 {
            out.push(face.to_vec());
            return;
        }
        let apex = face[0];
        for sub in self.facets_of_face(face) {
            if sub.contains(&apex) {
                continue;
            }
            let mut part = Vec::new();
            self.pull(&sub, dim - 1, &mut part);
            for mut s in part {
                s.push(apex);
                s.sort_unstable();
                out.push(s);
            }
        }
    }

    /// `g!` times the Euclidean volume.
    pub fn normalized_volume(&self) -> Result<u64> {
        if !self.is_full_dimensional() {
            return Err(Error::DegenerateCell);
        }
        let mut total: i128 = 0;
        for s in self.triangulation() {
            let v0 = &self.vertices[s[0]];
            let m: Vec<Vec<i64>> = s[1..].iter().map(|&i| sub(&self.vertices[i], v0)).collect();
            total += intmat::det(&m)?.abs();
        }
        u64::try_from(total).map_err(|_| Error::Overflow("normalized volume"))
    }

    /// Integer points of each simplex of the triangulation are read off the
    /// finite group `Z^d / M Z^d` of its edge matrix `M`: every coset has one
    /// representative `M λ` with `λ ∈ [0,1)^d`, and it lies in the simplex iff
    /// `Σ λ <= 1`.
    fn enumerate_lattice_points(&self) -> Result<Vec<LatticeVector>> {
        let d = self.affine_dim;
        let mut found: BTreeSet<LatticeVector> = self.vertices.iter().cloned().collect();
        if d == 0 {
            return Ok(found.into_iter().collect());
        }
        let proj: Vec<Vec<i64>> = self
            .vertices
            .iter()
            .map(|v| project(v, &self.chart))
            .collect();
        let lift = self.chart_lift()?;
        for s in self.triangulation() {
            let y0 = &proj[s[0]];
            let cols: Vec<Vec<i64>> = s[1..].iter().map(|&i| sub(&proj[i], y0)).collect();
            // rows of `m` are the edge vectors, so `m` is Mᵀ
            let det = intmat::det(&cols)?;
            let vol = det.abs();
            if vol == 1 {
                continue;
            }
            let mt = Matrix::from_int_rows(&cols)?;
            let inv = mt
                .transpose()
                .inverse()
                .expect("simplex edges are independent");
            // W = |det| · M⁻¹ is integral; λ = W z / |det|
            let scale = int(vol as i64);
            let w: Vec<Vec<i128>> = (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| {
                            let x = &inv[(i, j)] * &scale;
                            debug_assert!(x.denom().is_one());
                            intmat::big_to_i128(x.numer())
                        })
                        .collect::<Result<_>>()
                })
                .collect::<Result<_>>()?;
            let gens: Vec<Vec<i128>> = (0..d)
                .map(|j| (0..d).map(|i| w[i][j].rem_euclid(vol)).collect())
                .collect();
            let mut seen: BTreeSet<Vec<i128>> = BTreeSet::new();
            let mut stack = vec![vec![0i128; d]];
            seen.insert(stack[0].clone());
            while let Some(cur) = stack.pop() {
                for gen in &gens {
                    let nxt: Vec<i128> = cur.iter().zip(gen).map(|(a, b)| (a + b) % vol).collect();
                    if seen.insert(nxt.clone()) {
                        stack.push(nxt);
                    }
                }
            }
            debug_assert_eq!(seen.len() as i128, vol);
            for lam in seen {
                if lam.iter().all(|&x| x == 0) || lam.iter().sum::<i128>() > vol {
                    continue;
                }
                // y = y0 + M λ
                let y: Vec<i64> = (0..d)
                    .map(|k| {
                        let num: i128 = (0..d).map(|j| cols[j][k] as i128 * lam[j]).sum();
                        debug_assert_eq!(num % vol, 0);
                        y0[k] + (num / vol) as i64
                    })
                    .collect();
                if let Some(x) = lift(&y) {
                    found.insert(x);
                }
            }
        }
        Ok(found.into_iter().collect())
    }

    /// Map from chart coordinates back to the affine hull; `None` when the
    /// lifted point is not integral.
    fn chart_lift(&self) -> Result<impl Fn(&[i64]) -> Option<LatticeVector> + '_> {
        let d = self.affine_dim;
        let g = self.ambient_dim;
        let v0 = self.vertices[0].clone();
        let diffs: Vec<Vec<i64>> = self.vertices.iter().map(|v| sub(v, &v0)).collect();
        let basis_idx = intmat::affinely_independent_subset(&self.vertices);
        let basis: Vec<Vec<i64>> = basis_idx[1..].iter().map(|&i| diffs[i].clone()).collect();
        // x = v0 + Bᵀ P⁻¹ (y - y0), with P the chart part of the basis rows
        let full = d == g;
        let p = Matrix::from_int_rows(
            &basis
                .iter()
                .map(|b| project(b, &self.chart))
                .collect::<Vec<_>>(),
        )?;
        let l = if full {
            None
        } else {
            let pinv = p.transpose().inverse().expect("chart is injective");
            let bt = Matrix::from_int_rows(&basis)?.transpose();
            Some(bt.mul(&pinv)?)
        };
        let y0 = project(&v0, &self.chart);
        Ok(move |y: &[i64]| -> Option<LatticeVector> {
            let Some(l) = &l else {
                return Some(y.to_vec());
            };
            let dy: Vec<Scalar> = y.iter().zip(&y0).map(|(a, b)| int(a - b)).collect();
            let dx = l.mul_vec(&dy);
            let mut x = Vec::with_capacity(g);
            for (k, v) in dx.iter().enumerate() {
                if !v.denom().is_one() {
                    return None;
                }
                let vi: i64 = num_traits::ToPrimitive::to_i64(v.numer())?;
                x.push(v0[k] + vi);
            }
            Some(x)
        })
    }
}

/// Lexicographically sorted points together with the translate that moves
/// the smallest one to the origin: `(offset, points - offset)`.
pub fn canonical_key(points: &[LatticeVector]) -> (LatticeVector, Vec<LatticeVector>) {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    let offset = pts.first().cloned().unwrap_or_default();
    let key = pts.iter().map(|p| sub(p, &offset)).collect();
    (offset, key)
}

/// Integer points of a cell by scanning its bounding box. Exponential in the
/// dimension; kept as an independent check of [`Cell::lattice_points`].
pub fn lattice_points_by_scan(c: &Cell) -> Vec<LatticeVector> {
    let g = c.ambient_dim;
    let lo: Vec<i64> = (0..g)
        .map(|k| c.vertices.iter().map(|v| v[k]).min().unwrap())
        .collect();
    let hi: Vec<i64> = (0..g)
        .map(|k| c.vertices.iter().map(|v| v[k]).max().unwrap())
        .collect();
    let mut out = Vec::new();
    let mut x = lo.clone();
    loop {
        if c.contains(&x) {
            out.push(x.clone());
        }
        let mut k = 0;
        loop {
            if k == g {
                out.sort();
                return out;
            }
            if x[k] < hi[k] {
                x[k] += 1;
                break;
            }
            x[k] = lo[k];
            k += 1;
        }
    }
}

/// Exact barycentric coordinates of `x` with respect to an affinely
/// independent list of points spanning an affine space containing `x`.
pub fn barycentric(simplex: &[LatticeVector], x: &[i64]) -> Option<Vec<Scalar>> {
    let g = x.len();
    let k = simplex.len();
    let mut rows: Vec<Vec<Scalar>> = (0..g)
        .map(|r| simplex.iter().map(|s| int(s[r])).collect())
        .collect();
    rows.push(vec![Scalar::one(); k]);
    let m = Matrix::from_rows_with_cols(rows, k).ok()?;
    let mut rhs: Vec<Scalar> = x.iter().map(|&v| int(v)).collect();
    rhs.push(Scalar::one());
    let lam = m.solve(&rhs)?;
    debug_assert!(!lam.iter().all(Zero::is_zero));
    Some(lam)
}
