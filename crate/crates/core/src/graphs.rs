//! Dual graphs of stable curves, their graphic forms and planarity.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::delaunay::delaunay_decomposition;
use crate::exact::QuadraticForm;
use crate::seccone::secondary_cone;
use crate::sheaf::h0_general;
use crate::{Error, Result};

/// Multigraph with loops. Edges are unordered; `(u, v)` is oriented `u -> v`
/// where an orientation is needed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DualGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl DualGraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = edges
            .iter()
            .find(|&&(u, v)| u >= vertex_count || v >= vertex_count)
        {
            return Err(Error::InvalidInput(format!(
                "edge ({u}, {v}) leaves a graph on {vertex_count} vertices"
            )));
        }
        Ok(DualGraph {
            vertex_count,
            edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Degrees with loops counted twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Every vertex has degree at least 3.
    pub fn is_stable(&self) -> bool {
        self.degrees().iter().all(|&d| d >= 3)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return false;
        }
        let mut uf = UnionFind::new(self.vertex_count);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        (1..self.vertex_count).all(|v| uf.find(v) == uf.find(0))
    }

    /// Graph with vertices renamed by `perm[old] = new`, edges normalized and sorted.
    pub fn relabeled(&self, perm: &[usize]) -> DualGraph {
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (perm[u], perm[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        DualGraph {
            vertex_count: self.vertex_count,
            edges,
        }
    }

    /// Smallest relabeling over all vertex permutations.
    pub fn canonical(&self) -> DualGraph {
        let mut best: Option<DualGraph> = None;
        for_each_permutation(self.vertex_count, &mut |perm| {
            let g = self.relabeled(perm);
            if best.as_ref().is_none_or(|b| g < *b) {
                best = Some(g);
            }
        });
        best.unwrap_or_else(|| self.clone())
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

fn for_each_permutation(n: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(k: usize, perm: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if k == perm.len() {
            f(perm);
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            rec(k + 1, perm, f);
            perm.swap(k, i);
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    rec(0, &mut perm, f);
}

/// First Betti number `E - V + 1`.
pub fn betti(g: &DualGraph) -> Result<usize> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(g.edges.len() + 1 - g.vertex_count)
}

/// `E × g` matrix whose columns are the fundamental cycles of the spanning
/// tree chosen greedily along `order` (a permutation of edge indices).
pub fn cycle_matrix(g: &DualGraph, order: &[usize]) -> Result<Vec<Vec<i64>>> {
    let genus = betti(g)?;
    let n = g.vertex_count;
    let mut uf = UnionFind::new(n);
    let mut in_tree = vec![false; g.edges.len()];
    for &e in order {
        let (u, v) = g.edges[e];
        if uf.union(u, v) {
            in_tree[e] = true;
        }
    }
    // root the tree at 0: parent edge of every vertex
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &(u, v)) in g.edges.iter().enumerate() {
        if in_tree[e] {
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &(y, e) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some((x, e));
                depth[y] = depth[x] + 1;
                stack.push(y);
            }
        }
    }
    let mut b = vec![Vec::with_capacity(genus); g.edges.len()];
    for (e, &(u, v)) in g.edges.iter().enumerate() {
        if in_tree[e] {
            continue;
        }
        let mut col = vec![0i64; g.edges.len()];
        col[e] = 1;
        // close the cycle u -> v by walking the tree from v back to u
        let (mut a, mut c) = (v, u);
        let mut tail: Vec<(usize, i64)> = Vec::new();
        while a != c {
            if depth[a] >= depth[c] {
                let (p, te) = parent[a].expect("non-root vertex");
                col[te] += if g.edges[te] == (a, p) { 1 } else { -1 };
                a = p;
            } else {
                let (p, te) = parent[c].expect("non-root vertex");
                // traversed p -> c on the way back to u
                tail.push((te, if g.edges[te] == (p, c) { 1 } else { -1 }));
                c = p;
            }
        }
        for (te, s) in tail {
            col[te] += s;
        }
        for (row, x) in b.iter_mut().zip(col) {
            row.push(x);
        }
    }
    Ok(b)
}

/// `BᵀB` for the cycle matrix of the spanning tree taken along `order`.
pub fn graphic_form_with_order(g: &DualGraph, order: &[usize]) -> Result<QuadraticForm> {
    let b = cycle_matrix(g, order)?;
    let genus = b.first().map_or(0, Vec::len);
    let gram: Vec<Vec<i64>> = (0..genus)
        .map(|i| {
            (0..genus)
                .map(|j| b.iter().map(|r| r[i] * r[j]).sum())
                .collect()
        })
        .collect();
    QuadraticForm::from_int_rows(&gram)
}

/// Gram matrix of the fundamental-cycle basis of the cycle lattice.
pub fn graphic_form(g: &DualGraph) -> Result<QuadraticForm> {
    let order: Vec<usize> = (0..g.edges.len()).collect();
    graphic_form_with_order(g, &order)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KuratowskiKind {
    K5,
    K33,
}

/// Subdivision of `K5` or `K3,3`: branch vertices and one path per edge of
/// the model graph, each path given by its vertex sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KuratowskiWitness {
    pub kind: KuratowskiKind,
    /// For `K3,3` the first three and the last three form the two sides.
    pub branch_vertices: Vec<usize>,
    pub paths: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarityVerdict {
    pub planar: bool,
    pub witness: Option<KuratowskiWitness>,
}

/// Simple graph left after dropping loops and parallel copies and pruning
/// vertices of degree at most one; neither step changes planarity.
fn simplified(g: &DualGraph) -> Vec<BTreeSet<usize>> {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); g.vertex_count];
    for &(u, v) in &g.edges {
        if u != v {
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    while let Some(x) = (0..adj.len()).find(|&x| adj[x].len() == 1) {
        let y = *adj[x].iter().next().unwrap();
        adj[x].clear();
        adj[y].remove(&x);
    }
    adj
}

fn model_edges(kind: KuratowskiKind) -> Vec<(usize, usize)> {
    match kind {
        KuratowskiKind::K5 => {
            let mut e = Vec::new();
            for i in 0..5 {
                for j in i + 1..5 {
                    e.push((i, j));
                }
            }
            e
        }
        KuratowskiKind::K33 => {
            let mut e = Vec::new();
            for i in 0..3 {
                for j in 3..6 {
                    e.push((i, j));
                }
            }
            e
        }
    }
}

/// Internally disjoint paths realizing `model` between `branch` vertices,
/// found by exhaustive backtracking.
fn embed_paths(
    adj: &[BTreeSet<usize>],
    branch: &[usize],
    model: &[(usize, usize)],
) -> Option<Vec<Vec<usize>>> {
    fn dfs(
        adj: &[BTreeSet<usize>],
        branch: &[usize],
        model: &[(usize, usize)],
        k: usize,
        used: &mut Vec<bool>,
        used_edges: &mut BTreeSet<(usize, usize)>,
        paths: &mut Vec<Vec<usize>>,
    ) -> bool {
        if k == model.len() {
            return true;
        }
        let (s, t) = (branch[model[k].0], branch[model[k].1]);
        let mut path = vec![s];
        extend(adj, branch, model, k, t, used, used_edges, paths, &mut path)
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        adj: &[BTreeSet<usize>],
        branch: &[usize],
        model: &[(usize, usize)],
        k: usize,
        t: usize,
        used: &mut Vec<bool>,
        used_edges: &mut BTreeSet<(usize, usize)>,
        paths: &mut Vec<Vec<usize>>,
        path: &mut Vec<usize>,
    ) -> bool {
        let x = *path.last().unwrap();
        for &y in &adj[x] {
            let e = (x.min(y), x.max(y));
            if used_edges.contains(&e) {
                continue;
            }
            if y == t {
                path.push(y);
                used_edges.insert(e);
                paths.push(path.clone());
                if dfs(adj, branch, model, k + 1, used, used_edges, paths) {
                    return true;
                }
                paths.pop();
                used_edges.remove(&e);
                path.pop();
                continue;
            }
            if used[y] || branch.contains(&y) {
                continue;
            }
            used[y] = true;
            used_edges.insert(e);
            path.push(y);
            if extend(adj, branch, model, k, t, used, used_edges, paths, path) {
                return true;
            }
            path.pop();
            used_edges.remove(&e);
            used[y] = false;
        }
        false
    }

    let mut used = vec![false; adj.len()];
    let mut used_edges = BTreeSet::new();
    let mut paths = Vec::new();
    dfs(
        adj,
        branch,
        model,
        0,
        &mut used,
        &mut used_edges,
        &mut paths,
    )
    .then_some(paths)
}

fn combinations(items: &[usize], k: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..items.len() {
            cur.push(items[i]);
            if rec(items, k, i + 1, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(items, k, 0, &mut Vec::new(), f)
}

/// Exact planarity by exhaustive search for a Kuratowski subdivision.
pub fn planarity(g: &DualGraph) -> PlanarityVerdict {
    let adj = simplified(g);
    let mut witness = None;
    let deg4: Vec<usize> = (0..adj.len()).filter(|&v| adj[v].len() >= 4).collect();
    combinations(&deg4, 5, &mut |b| {
        let model = model_edges(KuratowskiKind::K5);
        if let Some(paths) = embed_paths(&adj, b, &model) {
            witness = Some(KuratowskiWitness {
                kind: KuratowskiKind::K5,
                branch_vertices: b.to_vec(),
                paths,
            });
            return true;
        }
        false
    });
    if witness.is_none() {
        let deg3: Vec<usize> = (0..adj.len()).filter(|&v| adj[v].len() >= 3).collect();
        combinations(&deg3, 6, &mut |six| {
            // sides {six[0], x, y} and the rest
            let rest: Vec<usize> = six[1..].to_vec();
            combinations(&rest, 2, &mut |pair| {
                let mut b = vec![six[0], pair[0], pair[1]];
                b.extend(rest.iter().filter(|v| !pair.contains(v)));
                let model = model_edges(KuratowskiKind::K33);
                if let Some(paths) = embed_paths(&adj, &b, &model) {
                    witness = Some(KuratowskiWitness {
                        kind: KuratowskiKind::K33,
                        branch_vertices: b,
                        paths,
                    });
                    return true;
                }
                false
            })
        });
    }
    PlanarityVerdict {
        planar: witness.is_none(),
        witness,
    }
}

/// Euler's bound for simple planar graphs, `E <= 3V - 6` (for `V >= 3`), on
/// the simplified graph. Only a necessary condition.
pub fn satisfies_euler_bound(g: &DualGraph) -> bool {
    let adj = simplified(g);
    let v = adj.iter().filter(|s| !s.is_empty()).count();
    let e: usize = adj.iter().map(BTreeSet::len).sum::<usize>() / 2;
    v < 3 || e + 6 <= 3 * v
}

impl KuratowskiWitness {
    /// Checks that the paths use edges of `g`, are internally disjoint, and
    /// smooth down to the model graph.
    pub fn verify(&self, g: &DualGraph) -> bool {
        let edges: BTreeSet<(usize, usize)> =
            g.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        let model = model_edges(self.kind);
        let n = match self.kind {
            KuratowskiKind::K5 => 5,
            KuratowskiKind::K33 => 6,
        };
        if self.branch_vertices.len() != n
            || self.paths.len() != model.len()
            || self.branch_vertices.iter().collect::<BTreeSet<_>>().len() != n
        {
            return false;
        }
        let mut interior = BTreeSet::new();
        let mut contracted: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for p in &self.paths {
            if p.len() < 2 {
                return false;
            }
            for w in p.windows(2) {
                if !edges.contains(&(w[0].min(w[1]), w[0].max(w[1]))) {
                    return false;
                }
            }
            for x in &p[1..p.len() - 1] {
                if self.branch_vertices.contains(x) || !interior.insert(*x) {
                    return false;
                }
            }
            let (Some(a), Some(b)) = (
                self.branch_vertices
                    .iter()
                    .position(|v| v == p.first().unwrap()),
                self.branch_vertices
                    .iter()
                    .position(|v| v == p.last().unwrap()),
            ) else {
                return false;
            };
            *contracted.entry((a.min(b), a.max(b))).or_default() += 1;
        }
        // the smoothed graph must be isomorphic to the model
        let mut iso = false;
        for_each_permutation(n, &mut |perm| {
            if iso {
                return;
            }
            let mapped: BTreeMap<(usize, usize), usize> = model
                .iter()
                .map(|&(a, b)| ((perm[a].min(perm[b]), perm[a].max(perm[b])), 1))
                .collect();
            iso = mapped == contracted;
        });
        iso
    }
}

/// Output of the dual graph → Delaunay decomposition → stratum pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorelliReport {
    pub genus: usize,
    pub planar: bool,
    pub witness: Option<KuratowskiWitness>,
    pub class_count: usize,
    pub vertex_counts: Vec<usize>,
    pub h0: usize,
    pub secondary_cone_dim: usize,
    /// Dimension of the Voronoi stratum, the codimension of the secondary cone.
    pub cone_dim: usize,
    pub et_flag: bool,
    /// The flag agrees with non-planarity.
    pub conjecture_consistent: bool,
}

/// Largest genus the pipeline accepts.
pub const MAX_GENUS: usize = 8;

pub fn torelli_report(g: &DualGraph) -> Result<TorelliReport> {
    let genus = betti(g)?;
    if genus == 0 || genus > MAX_GENUS {
        return Err(Error::InvalidInput(format!(
            "genus {genus} outside 1..={MAX_GENUS}"
        )));
    }
    let verdict = planarity(g);
    let q = graphic_form(g)?;
    let d = delaunay_decomposition(&q)?;
    let h0 = h0_general(&d)?.h0;
    let cone = secondary_cone(&d)?;
    let cone_dim = cone.voronoi_stratum_dim().ok_or(Error::NotDelaunay)?;
    let et_flag = h0 > cone_dim;
    Ok(TorelliReport {
        genus,
        planar: verdict.planar,
        witness: verdict.witness,
        class_count: d.cells().len(),
        vertex_counts: d.cells().iter().map(|c| c.vertices().len()).collect(),
        h0,
        secondary_cone_dim: cone.equality_solution_dim,
        cone_dim,
        et_flag,
        conjecture_consistent: et_flag == !verdict.planar,
    })
}

/// Connected multigraphs of the given genus with all degrees at least 3, one
/// per isomorphism class, in canonical form and sorted.
pub fn stable_graphs(genus: usize) -> Vec<DualGraph> {
    let mut out: BTreeSet<DualGraph> = BTreeSet::new();
    for v in 1..=(2 * genus).saturating_sub(2) {
        let e = v + genus - 1;
        let pairs: Vec<(usize, usize)> = (0..v).flat_map(|i| (i..v).map(move |j| (i, j))).collect();
        let mut deg = vec![0usize; v];
        let mut chosen = Vec::with_capacity(e);
        generate(&pairs, 0, e, &mut deg, &mut chosen, &mut |edges| {
            let g = DualGraph {
                vertex_count: v,
                edges: edges.to_vec(),
            };
            if g.is_connected() {
                out.insert(g.canonical());
            }
        });
    }
    out.into_iter().collect()
}

fn generate(
    pairs: &[(usize, usize)],
    start: usize,
    remaining: usize,
    deg: &mut Vec<usize>,
    chosen: &mut Vec<(usize, usize)>,
    emit: &mut impl FnMut(&[(usize, usize)]),
) {
    let deficit: usize = deg.iter().map(|&d| 3usize.saturating_sub(d)).sum();
    if deficit > 2 * remaining {
        return;
    }
    if remaining == 0 {
        emit(chosen);
        return;
    }
    // a vertex whose pairs are all behind us can no longer gain degree
    if let Some(&(i, _)) = pairs.get(start) {
        if deg[..i].iter().any(|&d| d < 3) {
            return;
        }
    }
    for k in start..pairs.len() {
        let (u, w) = pairs[k];
        deg[u] += 1;
        deg[w] += 1;
        chosen.push((u, w));
        generate(pairs, k, remaining - 1, deg, chosen, emit);
        chosen.pop();
        deg[u] -= 1;
        deg[w] -= 1;
    }
}

/// Complete graph on `n` vertices.
pub fn complete(n: usize) -> DualGraph {
    let edges = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    DualGraph {
        vertex_count: n,
        edges,
    }
}

pub fn complete_bipartite(a: usize, b: usize) -> DualGraph {
    let edges = (0..a)
        .flat_map(|i| (0..b).map(move |j| (i, a + j)))
        .collect();
    DualGraph {
        vertex_count: a + b,
        edges,
    }
}

/// Two vertices joined by `k` parallel edges.
pub fn theta(k: usize) -> DualGraph {
    DualGraph {
        vertex_count: 2,
        edges: vec![(0, 1); k],
    }
}

/// Cycle on `n` vertices; `n = 1` is a loop and `n = 2` a double edge.
pub fn cycle(n: usize) -> DualGraph {
    let edges = (0..n)
        .map(|i| (i, (i + 1) % n))
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    DualGraph {
        vertex_count: n,
        edges,
    }
}

/// Wheel with `n` rim vertices and a hub.
pub fn wheel(n: usize) -> DualGraph {
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    edges.extend((0..n).map(|i| (i, n)));
    DualGraph {
        vertex_count: n + 1,
        edges,
    }
}

/// 1-skeleton of the 3-cube.
pub fn cube() -> DualGraph {
    let mut edges = Vec::new();
    for x in 0..8usize {
        for bit in [1, 2, 4] {
            if x & bit == 0 {
                edges.push((x, x | bit));
            }
        }
    }
    DualGraph {
        vertex_count: 8,
        edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn betti_examples() {
        assert_eq!(betti(&complete_bipartite(3, 3)).unwrap(), 4);
        assert_eq!(betti(&complete(5)).unwrap(), 6);
        assert_eq!(betti(&theta(3)).unwrap(), 2);
        let two = DualGraph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        assert_eq!(betti(&two), Err(Error::Disconnected));
    }

    #[test]
    fn graphic_form_examples() {
        let q = graphic_form(&theta(3)).unwrap();
        assert_eq!(q.gram().determinant().unwrap(), int(3));
        assert_eq!(q.gram()[(0, 0)], int(2));
        let loop1 = DualGraph::new(1, vec![(0, 0)]).unwrap();
        assert_eq!(graphic_form(&loop1).unwrap(), QuadraticForm::identity(1));
        // K4 has 16 spanning trees
        let k4 = graphic_form(&complete(4)).unwrap();
        assert_eq!(k4.gram().determinant().unwrap(), int(16));
    }

    #[test]
    fn planarity_examples() {
        assert!(planarity(&complete(4)).planar);
        for g in [complete(5), complete_bipartite(3, 3)] {
            let v = planarity(&g);
            assert!(!v.planar);
            assert!(v.witness.unwrap().verify(&g));
            assert!(g.edges.len() != 10 || !satisfies_euler_bound(&g));
        }
        assert!(planarity(&cube()).planar);
        assert!(planarity(&wheel(5)).planar);
    }

    #[test]
    fn genus_two_stable_graphs() {
        // two loops at a vertex, the theta graph, the dumbbell
        assert_eq!(stable_graphs(2).len(), 3);
    }
}
