//! Named lattices, the maximal dicing `Δ_RT` and its refinements, and the
//! built-in graph corpus.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::delaunay::{delaunay_decomposition, PeriodicDecomposition};
use crate::exact::QuadraticForm;
use crate::graphs::{self, DualGraph};
use crate::polytope::{canonical_key, convex_hull, Cell, LatticeVector};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedForm {
    pub name: &'static str,
    pub n: usize,
    pub form: QuadraticForm,
}

/// Registry entries as `(name, parameter description)`.
pub const NAMES: [(&str, &str); 4] = [
    ("Zg", "identity form, any n >= 1"),
    ("Dn", "checkerboard lattice, n >= 3"),
    ("E8", "even unimodular lattice, n = 8"),
    ("A2", "hexagonal lattice, n = 2"),
];

fn dn_basis(n: usize) -> Vec<Vec<i64>> {
    let mut b = vec![vec![0i64; n]; n];
    b[0][0] = 1;
    b[0][1] = 1;
    b[1][0] = -1;
    b[1][1] = 1;
    for (k, row) in b.iter_mut().enumerate().skip(2) {
        row[k] = 1;
        row[k - 1] = -1;
    }
    b
}

fn e8_gram() -> Vec<Vec<i64>> {
    let mut g = vec![vec![0i64; 8]; 8];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (a, b) in [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)] {
        g[a][b] = -1;
        g[b][a] = -1;
    }
    g
}

/// Gram matrix of a named lattice in its standard basis.
pub fn gram(name: &str, n: usize) -> Result<NamedForm> {
    let bad_n = |what: &str| Error::InvalidInput(format!("{name} needs {what}, got n = {n}"));
    let (key, rows): (&'static str, Vec<Vec<i64>>) = match name {
        "Zg" => {
            if n == 0 {
                return Err(bad_n("n >= 1"));
            }
            (
                "Zg",
                (0..n)
                    .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
                    .collect(),
            )
        }
        "Dn" => {
            if n < 3 {
                return Err(bad_n("n >= 3"));
            }
            let b = dn_basis(n);
            let g = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| b[i][k] * b[j][k]).sum())
                        .collect()
                })
                .collect();
            ("Dn", g)
        }
        "E8" => {
            if n != 8 {
                return Err(bad_n("n = 8"));
            }
            ("E8", e8_gram())
        }
        "A2" => {
            if n != 2 {
                return Err(bad_n("n = 2"));
            }
            ("A2", vec![vec![2, 1], vec![1, 2]])
        }
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    let form = QuadraticForm::from_int_rows(&rows)?;
    if !form.is_positive_definite() {
        return Err(Error::CatalogInvariant(format!(
            "{name} is not positive definite"
        )));
    }
    Ok(NamedForm { name: key, n, form })
}

fn negated(points: &[LatticeVector]) -> Vec<LatticeVector> {
    points
        .iter()
        .map(|p| p.iter().map(|x| -x).collect())
        .collect()
}

fn is_neighborly(c: &Cell) -> bool {
    let faces: BTreeSet<Vec<usize>> = c.faces().into_iter().collect();
    let n = c.vertices().len();
    (0..n).all(|i| (i + 1..n).all(|j| faces.contains(&vec![i, j])))
}

fn is_cyclic_c6(c: &Cell) -> bool {
    c.affine_dim() == 4 && c.vertices().len() == 6 && c.facets().len() == 9 && is_neighborly(c)
}

/// Indices of the two 6-vertex classes of `Δ_RT`.
fn c6_classes(d: &PeriodicDecomposition) -> Vec<usize> {
    (0..d.cells().len())
        .filter(|&i| d.cells()[i].vertices().len() == 6)
        .collect()
}

/// The maximal dicing of `Z^4`: the Delaunay decomposition of the graphic form
/// of `K_{3,3}`, with its cell inventory checked.
pub fn delta_rt() -> Result<PeriodicDecomposition> {
    let q = graphs::graphic_form(&graphs::complete_bipartite(3, 3))?;
    let d = delaunay_decomposition(&q)?;
    let mut counts: Vec<usize> = d.cells().iter().map(|c| c.vertices().len()).collect();
    counts.sort_unstable();
    let mut expected = vec![5; 18];
    expected.extend([6, 6]);
    if counts != expected {
        return Err(Error::CatalogInvariant(format!(
            "unexpected vertex counts {counts:?}"
        )));
    }
    let big = c6_classes(&d);
    let (a, b) = (&d.cells()[big[0]], &d.cells()[big[1]]);
    if canonical_key(&negated(a.vertices())).1 != canonical_key(b.vertices()).1 {
        return Err(Error::CatalogInvariant(
            "6-vertex classes are not exchanged by x -> -x".into(),
        ));
    }
    if !is_cyclic_c6(a) || !is_cyclic_c6(b) {
        return Err(Error::CatalogInvariant(
            "6-vertex class is not a cyclic polytope".into(),
        ));
    }
    Ok(d)
}

/// Triangulations of a cell that use only its vertices and come from lifting
/// the vertices to heights in `{0, 1, 2}`. Each triangulation is a sorted list
/// of sorted vertex sets.
pub fn lifted_triangulations(c: &Cell) -> Result<Vec<Vec<Vec<LatticeVector>>>> {
    let verts = c.vertices();
    let n = verts.len();
    let dim = c.affine_dim();
    let mut found: BTreeSet<Vec<Vec<LatticeVector>>> = BTreeSet::new();
    let mut heights = vec![0i64; n];
    loop {
        let lifted: Vec<LatticeVector> = verts
            .iter()
            .zip(&heights)
            .map(|(v, &h)| v.iter().copied().chain([h]).collect())
            .collect();
        let hull = convex_hull(&lifted)?;
        if hull.affine_dim() == dim {
            // a flat lift gives the trivial subdivision
            if c.is_simplex() {
                found.insert(vec![verts.to_vec()]);
            }
        } else {
            let last = c.ambient_dim();
            let mut simplices: Vec<Vec<LatticeVector>> = Vec::new();
            let mut ok = true;
            for f in hull.facets().iter().filter(|f| f.normal[last] > 0) {
                if f.vertices.len() != dim + 1 {
                    ok = false;
                    break;
                }
                let mut s: Vec<LatticeVector> = f
                    .vertices
                    .iter()
                    .map(|&i| hull.vertices()[i][..last].to_vec())
                    .collect();
                s.sort();
                simplices.push(s);
            }
            if ok {
                simplices.sort();
                found.insert(simplices);
            }
        }
        // next height vector in base 3
        let mut k = 0;
        while k < n && heights[k] == 2 {
            heights[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
        heights[k] += 1;
    }
    Ok(found.into_iter().collect())
}

/// A refinement of `Δ_RT` obtained by triangulating both cyclic polytopes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    /// Indices into the triangulation lists of the two 6-vertex classes.
    pub choice: (usize, usize),
    /// Invariant under `x -> -x`.
    pub symmetric: bool,
    pub decomposition: PeriodicDecomposition,
}

/// All refinements of `Δ_RT` that triangulate both 6-vertex classes without
/// new vertices, with walls recomputed.
pub fn rt_refinements() -> Result<Vec<Refinement>> {
    let d = delta_rt()?;
    let big = c6_classes(&d);
    let tri_a = lifted_triangulations(&d.cells()[big[0]])?;
    let tri_b = lifted_triangulations(&d.cells()[big[1]])?;
    if tri_a.len() != 2 || tri_b.len() != 2 {
        return Err(Error::CatalogInvariant(format!(
            "cyclic polytopes have {} and {} triangulations",
            tri_a.len(),
            tri_b.len()
        )));
    }
    let g = d.ambient_dim();
    let minus: Vec<Vec<i64>> = (0..g)
        .map(|i| (0..g).map(|j| if i == j { -1 } else { 0 }).collect())
        .collect();
    let mut out = Vec::new();
    for (i, ta) in tri_a.iter().enumerate() {
        for (j, tb) in tri_b.iter().enumerate() {
            let mut cells: Vec<Cell> = d
                .cells()
                .iter()
                .enumerate()
                .filter(|(k, _)| !big.contains(k))
                .map(|(_, c)| c.clone())
                .collect();
            for s in ta.iter().chain(tb) {
                cells.push(convex_hull(s)?);
            }
            let r = PeriodicDecomposition::from_cells(g, cells)?;
            let symmetric = r.map_linear(&minus)?.same_classes(&r);
            out.push(Refinement {
                choice: (i, j),
                symmetric,
                decomposition: r,
            });
        }
    }
    Ok(out)
}

/// Named graphs shipped with the crate.
pub fn named_graphs() -> Vec<(String, DualGraph)> {
    let mut out: Vec<(String, DualGraph)> = vec![
        ("K4".into(), graphs::complete(4)),
        ("K5".into(), graphs::complete(5)),
        ("K33".into(), graphs::complete_bipartite(3, 3)),
        ("cube".into(), graphs::cube()),
        ("W4".into(), graphs::wheel(4)),
        ("W5".into(), graphs::wheel(5)),
    ];
    for k in 3..=5 {
        out.push((format!("theta{k}"), graphs::theta(k)));
    }
    for n in 1..=4 {
        out.push((format!("cycle{n}"), graphs::cycle(n)));
    }
    out
}

/// Stable graphs of genus `2..=max_genus`, named `g{genus}_{index}`.
pub fn stable_corpus(max_genus: usize) -> Vec<(String, DualGraph)> {
    let mut out = Vec::new();
    for genus in 2..=max_genus {
        for (i, g) in graphs::stable_graphs(genus).into_iter().enumerate() {
            out.push((format!("g{genus}_{i}"), g));
        }
    }
    out
}
