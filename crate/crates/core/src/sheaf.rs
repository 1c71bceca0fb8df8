//! Dimension `h0` of the space of compatible cell functions modulo affine ones.
//!
//! A section is a function on the lattice points `δ ∩ X` of every maximal
//! cell class. Two cells meeting along a face must agree there up to an
//! affine function: on every shared face `F` the difference
//! `x ↦ f_a(x) - f_b(x - t)` has to be affine on `F ∩ X`. `h0` is the
//! dimension of the solution space minus the per-cell affine functions.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::delaunay::PeriodicDecomposition;
use crate::exact::{int, Matrix, Scalar};
use crate::intmat::{self, sub};
use crate::polytope::{barycentric, Cell, LatticeVector};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    General,
    Simplicial,
    Pullback,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::General => "general",
            Method::Simplicial => "simplicial",
            Method::Pullback => "pullback",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumReport {
    pub h0: usize,
    pub method: Method,
    /// `lhat_dim` of every maximal class, in class order.
    pub l_values: Vec<usize>,
    /// Sum of normalized volumes of the classes.
    pub volume: u64,
    /// Dimension of the matching stratum of the Voronoi compactification.
    pub voronoi_cone_dim: Option<usize>,
    /// Dimension of the linear span of the secondary cone.
    pub secondary_cone_dim: Option<usize>,
    pub et_flag: Option<bool>,
}

/// `|δ ∩ X| - dim δ - 1`.
pub fn lhat_dim(c: &Cell) -> usize {
    c.lattice_points().len() - c.affine_dim() - 1
}

/// The linear constraints cutting out compatible sections, one column per
/// (class, lattice point) pair. Columns are laid out class by class in the
/// order of [`Cell::lattice_points`].
#[derive(Clone, Debug)]
pub struct SectionSpace {
    pub offsets: Vec<usize>,
    pub constraints: Matrix,
}

impl SectionSpace {
    pub fn variable_count(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }
}

fn variable(d: &PeriodicDecomposition, offsets: &[usize], class: usize, x: &[i64]) -> usize {
    let pts = d.cells()[class].lattice_points();
    let k = pts
        .binary_search_by(|p| p.as_slice().cmp(x))
        .expect("point belongs to the cell");
    offsets[class] + k
}

/// Assembles the gluing constraints of a polytopal decomposition.
pub fn section_space(d: &PeriodicDecomposition) -> Result<SectionSpace> {
    if d.fiber_rank() != 0 {
        return Err(Error::NotPolytopal(d.fiber_rank()));
    }
    if d.walls().is_empty() {
        return Err(Error::MissingWalls);
    }
    let mut offsets = vec![0];
    for c in d.cells() {
        offsets.push(offsets.last().unwrap() + c.lattice_points().len());
    }
    let n = *offsets.last().unwrap();
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for w in d.walls() {
        let (a, b, t) = (w.cell_a, w.cell_b, &w.translation);
        let theirs: BTreeSet<LatticeVector> = d.cells()[b]
            .lattice_points()
            .iter()
            .map(|p| intmat::add(p, t))
            .collect();
        let shared: Vec<LatticeVector> = d.cells()[a]
            .lattice_points()
            .iter()
            .filter(|p| theirs.contains(*p))
            .cloned()
            .collect();
        let dim = intmat::affine_rank(&shared);
        if shared.len() <= dim + 1 {
            continue;
        }
        let anchor_idx = intmat::affinely_independent_subset(&shared);
        let anchors: Vec<LatticeVector> = anchor_idx.iter().map(|&i| shared[i].clone()).collect();
        for (i, p) in shared.iter().enumerate() {
            if anchor_idx.contains(&i) {
                continue;
            }
            let lam = barycentric(&anchors, p).ok_or_else(|| {
                Error::NotFaceFitting(format!("shared point {p:?} outside its face"))
            })?;
            let mut row = vec![Scalar::zero(); n];
            // D(p) - Σ λ_s D(s) with D(x) = f_a(x) - f_b(x - t)
            row[variable(d, &offsets, a, p)] += int(1);
            row[variable(d, &offsets, b, &sub(p, t))] -= int(1);
            for (s, l) in anchors.iter().zip(&lam) {
                row[variable(d, &offsets, a, s)] -= l;
                row[variable(d, &offsets, b, &sub(s, t))] += l;
            }
            rows.push(row);
        }
    }
    let constraints = Matrix::from_rows_with_cols(rows, n)?;
    Ok(SectionSpace {
        offsets,
        constraints,
    })
}

/// `h0` by exact linear algebra on the full gluing system.
pub fn h0_general(d: &PeriodicDecomposition) -> Result<StratumReport> {
    let space = section_space(d)?;
    let m = &space.constraints;
    // the per-cell affine functions always glue; check rather than assume
    let mut affine_dim = 0;
    for (i, c) in d.cells().iter().enumerate() {
        affine_dim += c.affine_dim() + 1;
        let g = c.ambient_dim();
        for k in 0..=g {
            let mut v = vec![Scalar::zero(); space.variable_count()];
            for (j, p) in c.lattice_points().iter().enumerate() {
                v[space.offsets[i] + j] = if k == g { int(1) } else { int(p[k]) };
            }
            if m.mul_vec(&v).iter().any(|x| !x.is_zero()) {
                return Err(Error::CertificationFailed(format!(
                    "affine functions on cell {i} violate the gluing constraints"
                )));
            }
        }
    }
    let kernel = space.variable_count() - m.rank();
    Ok(StratumReport {
        h0: kernel - affine_dim,
        method: Method::General,
        l_values: d.cells().iter().map(lhat_dim).collect(),
        volume: d.total_volume()?,
        voronoi_cone_dim: None,
        secondary_cone_dim: None,
        et_flag: None,
    })
}

/// `h0 = Σ lhat_dim`, valid when every proper face of every cell is a simplex.
pub fn h0_simplicial(d: &PeriodicDecomposition) -> Result<StratumReport> {
    if d.fiber_rank() != 0 {
        return Err(Error::NotPolytopal(d.fiber_rank()));
    }
    if let Some(i) = d.cells().iter().position(|c| !c.is_simplicial_boundary()) {
        return Err(Error::HypothesisViolated(i));
    }
    let l_values: Vec<usize> = d.cells().iter().map(lhat_dim).collect();
    Ok(StratumReport {
        h0: l_values.iter().sum(),
        method: Method::Simplicial,
        l_values,
        volume: d.total_volume()?,
        voronoi_cone_dim: None,
        secondary_cone_dim: None,
        et_flag: None,
    })
}

/// `h0` of the preimage of a `(g-a)`-dimensional decomposition:
/// `h0(base) + a(a+1)/2 + a(g-a)`; for `a = g` this is `g(g+1)/2`.
pub fn h0_pullback(base_h0: usize, a: usize, g: usize) -> usize {
    assert!(a <= g, "fiber rank exceeds dimension");
    if a == g {
        return g * (g + 1) / 2;
    }
    base_h0 + a * (a + 1) / 2 + a * (g - a)
}

/// Simplicial shortcut when its hypothesis holds, general method otherwise,
/// pullback correction for non-polytopal input.
pub fn h0_auto(d: &PeriodicDecomposition) -> Result<StratumReport> {
    let a = d.fiber_rank();
    if a > 0 {
        let g = d.ambient_dim();
        let base = if d.cells().is_empty() {
            None
        } else {
            Some(h0_auto(&PeriodicDecomposition::from_parts(
                g - a,
                0,
                d.cells().to_vec(),
                d.walls().to_vec(),
            )?)?)
        };
        return Ok(StratumReport {
            h0: h0_pullback(base.as_ref().map_or(0, |r| r.h0), a, g),
            method: Method::Pullback,
            l_values: base.as_ref().map_or_else(Vec::new, |r| r.l_values.clone()),
            volume: base.as_ref().map_or(0, |r| r.volume),
            voronoi_cone_dim: None,
            secondary_cone_dim: None,
            et_flag: None,
        });
    }
    if d.cells().iter().all(Cell::is_simplicial_boundary) {
        h0_simplicial(d)
    } else {
        h0_general(d)
    }
}

/// `h0 < Σ normalized volume` (which is `g!` for a tiling).
pub fn volume_upper_bound_check(d: &PeriodicDecomposition) -> Result<bool> {
    let r = h0_general(d)?;
    Ok((r.h0 as u64) < r.volume)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaunay::delaunay_decomposition;
    use crate::exact::QuadraticForm;
    use crate::polytope::convex_hull;

    #[test]
    fn squares() {
        let d = delaunay_decomposition(&QuadraticForm::identity(2)).unwrap();
        let space = section_space(&d).unwrap();
        assert_eq!(space.variable_count(), 4);
        assert_eq!(space.constraints.kernel_basis().cols(), 4);
        assert_eq!(h0_general(&d).unwrap().h0, 1);
        assert_eq!(h0_simplicial(&d).unwrap().h0, 1);
        assert!(volume_upper_bound_check(&d).unwrap());
    }

    #[test]
    fn cubes_are_not_simplicial() {
        let d = delaunay_decomposition(&QuadraticForm::identity(3)).unwrap();
        assert_eq!(h0_simplicial(&d), Err(Error::HypothesisViolated(0)));
        // functions on the 8 cube vertices, glued on opposite square faces
        assert_eq!(h0_general(&d).unwrap().h0, 3);
    }

    #[test]
    fn lhat_examples() {
        let sq = convex_hull(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        assert_eq!(lhat_dim(&sq), 1);
        let tri = convex_hull(&[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(lhat_dim(&tri), 0);
    }

    #[test]
    fn pullback_examples() {
        assert_eq!(h0_pullback(0, 4, 4), 10);
        assert_eq!(h0_pullback(0, 1, 2), 2);
        assert_eq!(h0_pullback(7, 0, 5), 7);
    }

    #[test]
    fn interval_pullback() {
        let seg = convex_hull(&[vec![0], vec![1]]).unwrap();
        let base = PeriodicDecomposition::from_cells(1, vec![seg]).unwrap();
        let strips = PeriodicDecomposition::pullback(&base, 1).unwrap();
        let r = h0_auto(&strips).unwrap();
        assert_eq!(r.method, Method::Pullback);
        assert_eq!(r.h0, 2);
        assert_eq!(h0_general(&strips), Err(Error::NotPolytopal(1)));
    }
}
