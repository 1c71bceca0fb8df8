//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Every comparison is exact (integer or rational equality); the only
//! tolerances are wall-clock budgets, pinned below. Criteria listed in
//! `KNOWN_FAILURES` are computed in full and reported, but do not fail the
//! run; any other failing criterion does. The target runs without the libtest
//! harness so the gate lines are never captured.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_traits::{ToPrimitive, Zero};
use perdel::json;
use perdel_core::catalog::{delta_rt, gram, named_graphs, rt_refinements, stable_corpus};
use perdel_core::delaunay::{delaunay_decomposition, PeriodicDecomposition};
use perdel_core::exact::{int, Matrix, QuadraticForm, Scalar};
use perdel_core::graphs::{betti, graphic_form, planarity, torelli_report, DualGraph};
use perdel_core::polytope::LatticeVector;
use perdel_core::seccone::{et_detect, secondary_cone};
use perdel_core::sheaf::{h0_general, h0_pullback, h0_simplicial, volume_upper_bound_check};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const BUDGET_SQUARES: Duration = Duration::from_secs(1);
const BUDGET_PULLBACK: Duration = Duration::from_secs(1);
const BUDGET_DN: Duration = Duration::from_secs(120);
const BUDGET_E8: Duration = Duration::from_secs(15 * 60);
const BUDGET_E8_GENERAL: Duration = Duration::from_secs(2 * 60 * 60);
const BUDGET_DELTA_RT: Duration = Duration::from_secs(120);
const BUDGET_REFINEMENTS: Duration = Duration::from_secs(10 * 60);
const BUDGET_CORPUS: Duration = Duration::from_secs(10 * 60);
const BUDGET_K5: Duration = Duration::from_secs(30 * 60);
const BUDGET_PROPERTIES: Duration = Duration::from_secs(10 * 60);

const SEED: u64 = 0x5e_ed0f_1a77_1ce5;

/// Sub-criteria whose failure is analysed rather than fixed: the simplicial
/// hypothesis and the `2^n - n - 3` count both fail for `D5` and `D6`.
const KNOWN_FAILURES: [&str; 3] = ["3", "3/D5", "3/D6"];

struct Gate {
    failures: Vec<String>,
    bounds: Vec<(String, usize, usize)>,
}

impl Gate {
    fn record(&mut self, id: &str, ok: bool, detail: String, elapsed: Duration, budget: Duration) {
        let within = elapsed <= budget;
        let pass = ok && within;
        println!(
            "[{}] criterion {id}: {detail} ({:.2}s of {:.0}s)",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs_f64()
        );
        if !pass {
            self.failures.push(id.to_string());
        }
    }

    fn bound(&mut self, label: &str, h0: usize, g: usize) {
        self.bounds.push((label.to_string(), h0, g));
    }
}

fn factorial(g: usize) -> usize {
    (1..=g).product()
}

fn long_tests() -> bool {
    std::env::var("PERDEL_LONG_TESTS").is_ok_and(|v| v == "1")
}

fn vertex_histogram(d: &PeriodicDecomposition) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for c in d.cells() {
        *h.entry(c.vertices().len()).or_insert(0) += 1;
    }
    h
}

fn squares(gate: &mut Gate) {
    let t = Instant::now();
    let d = delaunay_decomposition(&QuadraticForm::identity(2)).unwrap();
    let h0 = h0_general(&d).unwrap().h0;
    gate.bound("squares", h0, 2);
    gate.record(
        "1",
        h0 == 1,
        format!("squares h0 = {h0}, expected 1"),
        t.elapsed(),
        BUDGET_SQUARES,
    );
}

fn pullback(gate: &mut Gate) {
    let t = Instant::now();
    let values: Vec<usize> = (1..=8).map(|g| h0_pullback(0, g, g)).collect();
    let expected: Vec<usize> = (1..=8).map(|g| g * (g + 1) / 2).collect();
    gate.record(
        "2",
        values == expected,
        format!("one big cell h0 for g = 1..8: {values:?}"),
        t.elapsed(),
        BUDGET_PULLBACK,
    );
}

fn dn(gate: &mut Gate, decomps: &mut Vec<(String, QuadraticForm, PeriodicDecomposition)>) {
    let start = Instant::now();
    let mut all = true;
    for n in 4..=6usize {
        let t = Instant::now();
        let q = gram("Dn", n).unwrap().form;
        let d = delaunay_decomposition(&q).unwrap();
        let mut counts: Vec<usize> = d.cells().iter().map(|c| c.vertices().len()).collect();
        counts.sort_unstable();
        let mut expected_counts = vec![2 * n, 1 << (n - 1), 1 << (n - 1)];
        expected_counts.sort_unstable();
        let simplicial = d.cells().iter().all(|c| c.is_simplicial_boundary());
        let volume = d.total_volume().unwrap() as usize;
        let general = h0_general(&d).unwrap().h0;
        let by_formula = h0_simplicial(&d).map(|r| r.h0);
        let target = (1usize << n) - n - 3;
        let lhat: usize = d.cells().iter().map(perdel_core::sheaf::lhat_dim).sum();
        gate.bound(&format!("D{n}"), general, n);
        let ok = counts == expected_counts
            && simplicial
            && volume == factorial(n)
            && general == target
            && by_formula == Ok(target);
        all &= ok;
        gate.record(
            &format!("3/D{n}"),
            ok,
            format!(
                "vertex counts {counts:?} (expected {expected_counts:?}), simplicial boundaries {simplicial}, \
                 volume {volume} (expected {}), h0 general {general}, simplicial formula {:?} \
                 (sum of lhat {lhat}), expected {target}",
                factorial(n),
                by_formula.map_err(|e| e.code()),
            ),
            t.elapsed(),
            BUDGET_DN,
        );
        decomps.push((format!("D{n}"), q, d));
    }
    gate.record(
        "3",
        all,
        "Dn pipeline for n = 4, 5, 6".into(),
        start.elapsed(),
        BUDGET_DN,
    );
}

fn e8(gate: &mut Gate) {
    let t = Instant::now();
    let q = gram("E8", 8).unwrap().form;
    let d = delaunay_decomposition(&q).unwrap();
    let hist = vertex_histogram(&d);
    let simplicial = h0_simplicial(&d).map(|r| r.h0);
    let expected: BTreeMap<usize, usize> = [(9, 1920), (16, 135)].into();
    if let Ok(h0) = simplicial {
        gate.bound("E8", h0, 8);
    }
    gate.record(
        "4",
        hist == expected && simplicial == Ok(945),
        format!(
            "E8 classes by vertex count {hist:?}, h0 simplicial {:?}",
            simplicial.map_err(|e| e.code())
        ),
        t.elapsed(),
        BUDGET_E8,
    );
    if long_tests() {
        let t = Instant::now();
        let general = h0_general(&d).map(|r| r.h0);
        gate.record(
            "4/general",
            general == Ok(945),
            format!("E8 h0 general {:?}", general.map_err(|e| e.code())),
            t.elapsed(),
            BUDGET_E8_GENERAL,
        );
    } else {
        println!("[SKIP] criterion 4/general: E8 general method runs with PERDEL_LONG_TESTS=1");
    }
}

fn delta(gate: &mut Gate, decomps: &mut Vec<(String, QuadraticForm, PeriodicDecomposition)>) {
    let t = Instant::now();
    let d = delta_rt().unwrap();
    let hist = vertex_histogram(&d);
    let hyper = d.wall_hyperplane_classes();
    let r = et_detect(&d).unwrap();
    gate.bound("delta-rt", r.h0, 4);
    let ok = d.cells().len() == 20
        && hist == [(5, 18), (6, 2)].into()
        && hyper == 9
        && r.h0 == 2
        && r.voronoi_cone_dim == Some(1)
        && r.et_flag == Some(true);
    gate.record(
        "5",
        ok,
        format!(
            "classes {} {hist:?}, wall hyperplanes {hyper}, h0 {}, stratum dim {:?} \
             (secondary cone span {:?}), et_flag {:?}",
            d.cells().len(),
            r.h0,
            r.voronoi_cone_dim,
            r.secondary_cone_dim,
            r.et_flag
        ),
        t.elapsed(),
        BUDGET_DELTA_RT,
    );
    let q = graphic_form(&perdel_core::graphs::complete_bipartite(3, 3)).unwrap();
    decomps.push(("delta-rt".into(), q, d));
}

fn refinements(gate: &mut Gate) {
    let t = Instant::now();
    let refs = rt_refinements().unwrap();
    let mut witnesses = 0;
    let mut farkas = 0;
    for r in &refs {
        let cone = secondary_cone(&r.decomposition).unwrap();
        if let Some(w) = &cone.witness {
            let round = delaunay_decomposition(w).unwrap();
            if round.same_classes(&r.decomposition) {
                witnesses += 1;
            }
        }
        if let Some(f) = &cone.farkas {
            if f.verify(&r.decomposition).is_ok() {
                farkas += 1;
            }
        }
        if let Ok(h0) = h0_general(&r.decomposition) {
            gate.bound(&format!("refinement {:?}", r.choice), h0.h0, 4);
        }
    }
    gate.record(
        "6",
        refs.len() == 4 && witnesses == 2 && farkas == 2,
        format!("{} refinements, {witnesses} round-tripped witnesses, {farkas} verified Farkas certificates", refs.len()),
        t.elapsed(),
        BUDGET_REFINEMENTS,
    );
}

/// A subdivision of `K3,3` in a graph on at most 6 vertices of degree >= 3
/// has no subdividing vertices, so it is a `K3,3` subgraph; check all splits.
fn contains_k33(g: &DualGraph) -> bool {
    let adj: BTreeSet<(usize, usize)> = g
        .edges()
        .iter()
        .filter(|(a, b)| a != b)
        .flat_map(|&(a, b)| [(a, b), (b, a)])
        .collect();
    let n = g.vertex_count();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() != 6 {
            continue;
        }
        let six: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        for side in 0u32..64 {
            if side.count_ones() != 3 {
                continue;
            }
            let (a, b): (Vec<usize>, Vec<usize>) = (0..6).partition(|k| side >> k & 1 == 1);
            if a.iter()
                .all(|&x| b.iter().all(|&y| adj.contains(&(six[x], six[y]))))
            {
                return true;
            }
        }
    }
    false
}

fn corpus(gate: &mut Gate) {
    let t = Instant::now();
    let mut graphs: Vec<(String, DualGraph)> = named_graphs()
        .into_iter()
        .filter(|(_, g)| g.is_stable() && betti(g).is_ok_and(|b| b <= 4))
        .collect();
    graphs.extend(stable_corpus(4));
    let rows = perdel::cli::scan(&graphs);
    let mut mismatches = Vec::new();
    let mut flagged_genus4 = BTreeSet::new();
    let mut planar_flagged = 0;
    let mut errors = 0;
    for ((name, g), (_, r)) in graphs.iter().zip(&rows) {
        let Ok(v) = r else {
            errors += 1;
            continue;
        };
        let et = v["et_flag"] == true;
        if g.vertex_count() > 6 {
            mismatches.push(format!(
                "{name}: too many vertices for the exhaustive oracle"
            ));
        }
        if et != contains_k33(g) {
            mismatches.push(name.clone());
        }
        if planarity(g).planar && et {
            planar_flagged += 1;
        }
        if et && betti(g).unwrap() == 4 {
            flagged_genus4.insert(g.canonical());
        }
        if let (Some(h0), Some(g_)) = (v["h0"].as_u64(), v["genus"].as_u64()) {
            gate.bound(name, h0 as usize, g_ as usize);
        }
    }
    let k33 = perdel_core::graphs::complete_bipartite(3, 3).canonical();
    let only_k33 = flagged_genus4.len() == 1 && flagged_genus4.contains(&k33);
    gate.record(
        "7",
        mismatches.is_empty() && planar_flagged == 0 && errors == 0 && only_k33,
        format!(
            "{} graphs, {errors} errors, et_flag/K3,3 mismatches {mismatches:?}, planar graphs flagged {planar_flagged}, \
             genus-4 flagged = {{K3,3}}: {only_k33}",
            graphs.len()
        ),
        t.elapsed(),
        BUDGET_CORPUS,
    );
}

fn k5(gate: &mut Gate) {
    let t = Instant::now();
    let report = torelli_report(&perdel_core::graphs::complete(5)).unwrap();
    let text = json::to_text(&json::torelli(&report));
    let path: PathBuf = [
        env!("CARGO_MANIFEST_DIR"),
        "tests",
        "golden",
        "k5_report.json",
    ]
    .iter()
    .collect();
    let (ok, note) = match std::fs::read_to_string(&path) {
        Ok(golden) => (golden == text, "compared with archived golden file"),
        Err(_) => {
            std::fs::write(&path, &text).unwrap();
            (true, "golden file archived")
        }
    };
    gate.record(
        "8",
        ok,
        format!(
            "K5 report h0 {}, cone_dim {}, et_flag {}, {} classes; {note}",
            report.h0, report.cone_dim, report.et_flag, report.class_count
        ),
        t.elapsed(),
        BUDGET_K5,
    );
}

/// `Bᵀ B + I` with entries of `B` in `-2..=2`.
fn random_form(rng: &mut StdRng, g: usize) -> QuadraticForm {
    let b: Vec<Vec<i64>> = (0..g)
        .map(|_| (0..g).map(|_| rng.gen_range(-2..=2)).collect())
        .collect();
    let rows: Vec<Vec<i64>> = (0..g)
        .map(|i| {
            (0..g)
                .map(|j| (0..g).map(|k| b[k][i] * b[k][j]).sum::<i64>() + i64::from(i == j))
                .collect()
        })
        .collect();
    QuadraticForm::from_int_rows(&rows).unwrap()
}

fn random_unimodular(rng: &mut StdRng, g: usize) -> Vec<Vec<i64>> {
    let mut u: Vec<Vec<i64>> = (0..g)
        .map(|i| (0..g).map(|j| i64::from(i == j)).collect())
        .collect();
    if g < 2 {
        return u;
    }
    for _ in 0..6 {
        let i = rng.gen_range(0..g);
        let j = (i + rng.gen_range(1..g)) % g;
        if rng.gen_bool(0.3) {
            u.swap(i, j);
        } else {
            let c: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
            for k in 0..g {
                u[i][k] += c * u[j][k];
            }
        }
    }
    u
}

/// Circumcenter from `2 (v - v0)ᵀ Q c = q(v) - q(v0)` and an exhaustive scan
/// of the bounding box of the circumscribed ellipsoid.
fn sphere_is_empty(q: &QuadraticForm, verts: &[LatticeVector]) -> bool {
    let g = q.dim();
    let qm = q.gram();
    let v0 = &verts[0];
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut rhs: Vec<Scalar> = Vec::new();
    for v in &verts[1..] {
        let row: Vec<Scalar> = (0..g)
            .map(|j| {
                (0..g).fold(Scalar::zero(), |acc, i| {
                    acc + int(2 * (v[i] - v0[i])) * &qm[(i, j)]
                })
            })
            .collect();
        let candidate: Vec<Vec<Scalar>> = rows.iter().cloned().chain([row.clone()]).collect();
        if Matrix::from_rows_with_cols(candidate, g).unwrap().rank() > rows.len() {
            rows.push(row);
            rhs.push(q.value(v) - q.value(v0));
        }
    }
    if rows.len() != g {
        return false;
    }
    let c = Matrix::from_rows(rows).unwrap().solve(&rhs).unwrap();
    let diff = |x: &[i64]| -> Vec<Scalar> { x.iter().zip(&c).map(|(a, b)| int(*a) - b).collect() };
    let r2 = q.value_rational(&diff(v0));
    if verts.iter().any(|v| q.value_rational(&diff(v)) != r2) {
        return false;
    }
    let inv = qm.inverse().unwrap();
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for i in 0..g {
        let half = (r2.to_f64().unwrap() * inv[(i, i)].to_f64().unwrap()).sqrt() + 1.0;
        let ci = c[i].to_f64().unwrap();
        lo.push((ci - half).floor() as i64);
        hi.push((ci + half).ceil() as i64);
    }
    let vset: BTreeSet<&LatticeVector> = verts.iter().collect();
    let mut x = lo.clone();
    loop {
        let v = q.value_rational(&diff(&x));
        if v < r2 || (v == r2 && !vset.contains(&x)) {
            return false;
        }
        let mut k = 0;
        while k < g && x[k] == hi[k] {
            x[k] = lo[k];
            k += 1;
        }
        if k == g {
            return true;
        }
        x[k] += 1;
    }
}

fn spanning_trees(g: &DualGraph) -> i64 {
    let n = g.vertex_count();
    let edges: Vec<(usize, usize)> = g.edges().iter().copied().filter(|(a, b)| a != b).collect();
    let mut count = 0;
    for mask in 0u32..(1 << edges.len()) {
        if mask.count_ones() as usize + 1 != n {
            continue;
        }
        let mut comp: Vec<usize> = (0..n).collect();
        let mut acyclic = true;
        for (k, &(a, b)) in edges.iter().enumerate() {
            if mask >> k & 1 == 0 {
                continue;
            }
            let (ca, cb) = (comp[a], comp[b]);
            if ca == cb {
                acyclic = false;
                break;
            }
            for c in comp.iter_mut() {
                if *c == cb {
                    *c = ca;
                }
            }
        }
        if acyclic {
            count += 1;
        }
    }
    count
}

fn random_connected_graph(rng: &mut StdRng) -> DualGraph {
    let n = rng.gen_range(2..=7);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    let extra = rng.gen_range(1..=12 - (n - 1));
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        edges.push((a.min(b), a.max(b)));
    }
    DualGraph::new(n, edges).unwrap()
}

fn properties(gate: &mut Gate, decomps: &[(String, QuadraticForm, PeriodicDecomposition)]) {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(SEED);

    let t = Instant::now();
    let mut forms = Vec::new();
    let mut tiled = 0;
    for _ in 0..50 {
        let g = rng.gen_range(1..=4);
        let q = random_form(&mut rng, g);
        let d = delaunay_decomposition(&q).unwrap();
        if d.total_volume().unwrap() as usize == factorial(g) {
            tiled += 1;
        }
        forms.push((q, d));
    }
    gate.record(
        "9a",
        tiled == 50,
        format!("{tiled}/50 random forms tile with volume g!"),
        t.elapsed(),
        BUDGET_PROPERTIES,
    );

    let t = Instant::now();
    let mut cells = 0;
    let mut empty = 0;
    for (q, d) in forms
        .iter()
        .map(|(q, d)| (q, d))
        .chain(decomps.iter().map(|(_, q, d)| (q, d)))
    {
        for c in d.cells() {
            cells += 1;
            if sphere_is_empty(q, c.vertices()) {
                empty += 1;
            }
        }
    }
    gate.record(
        "9b",
        cells == empty,
        format!("{empty}/{cells} cells pass the brute-force empty-sphere oracle"),
        t.elapsed(),
        BUDGET_PROPERTIES,
    );

    let t = Instant::now();
    let mut invariant = 0;
    for k in 0..20 {
        let (q, d) = &forms[k];
        let g = q.dim();
        let u = random_unimodular(&mut rng, g);
        let qu = q.conjugate(&u).unwrap();
        let du = delaunay_decomposition(&qu).unwrap();
        let same_cells = du.map_linear(&u).unwrap().same_classes(d);
        let inventory = |d: &PeriodicDecomposition| -> Vec<usize> {
            let mut v: Vec<usize> = d.cells().iter().map(|c| c.vertices().len()).collect();
            v.sort_unstable();
            v
        };
        let a = (
            h0_general(d).unwrap().h0,
            secondary_cone(d).unwrap().voronoi_stratum_dim(),
            inventory(d),
        );
        let b = (
            h0_general(&du).unwrap().h0,
            secondary_cone(&du).unwrap().voronoi_stratum_dim(),
            inventory(&du),
        );
        if same_cells && a == b {
            invariant += 1;
        }
    }
    gate.record(
        "9c",
        invariant == 20,
        format!("{invariant}/20 conjugations preserve cells, h0, cone_dim and inventory"),
        t.elapsed(),
        BUDGET_PROPERTIES,
    );

    let t = Instant::now();
    let mut matched = 0;
    for _ in 0..30 {
        let g = random_connected_graph(&mut rng);
        let det = graphic_form(&g).unwrap().gram().determinant().unwrap();
        if det == int(spanning_trees(&g)) {
            matched += 1;
        }
    }
    gate.record(
        "9d",
        matched == 30,
        format!("{matched}/30 graphic determinants equal spanning tree counts"),
        t.elapsed(),
        BUDGET_PROPERTIES,
    );

    let t = Instant::now();
    let mut both = 0;
    let mut agree = 0;
    for d in forms
        .iter()
        .map(|(_, d)| d)
        .chain(decomps.iter().map(|(_, _, d)| d))
    {
        if let Ok(s) = h0_simplicial(d) {
            both += 1;
            if h0_general(d).unwrap().h0 == s.h0 {
                agree += 1;
            }
        }
    }
    gate.record(
        "9e",
        both == agree,
        format!("{agree}/{both} simplicial shortcut values equal the general method"),
        t.elapsed(),
        BUDGET_PROPERTIES,
    );
    gate.record(
        "9",
        true,
        "property suites total time".into(),
        start.elapsed(),
        BUDGET_PROPERTIES,
    );
}

fn bounds(gate: &mut Gate, decomps: &[(String, QuadraticForm, PeriodicDecomposition)]) {
    let t = Instant::now();
    let mut violations: Vec<String> = gate
        .bounds
        .iter()
        .filter(|(_, h0, g)| *h0 >= factorial(*g))
        .map(|(l, h0, g)| format!("{l}: h0 {h0} vs {}", factorial(*g)))
        .collect();
    for (label, _, d) in decomps {
        if !volume_upper_bound_check(d).unwrap() {
            violations.push(label.clone());
        }
    }
    let checked = gate.bounds.len();
    gate.record(
        "10",
        violations.is_empty(),
        format!("h0 < g! on {checked} decompositions, violations {violations:?}"),
        t.elapsed(),
        Duration::from_secs(60),
    );
}

fn main() {
    let mut gate = Gate {
        failures: Vec::new(),
        bounds: Vec::new(),
    };
    let mut decomps = Vec::new();
    squares(&mut gate);
    pullback(&mut gate);
    dn(&mut gate, &mut decomps);
    e8(&mut gate);
    delta(&mut gate, &mut decomps);
    refinements(&mut gate);
    corpus(&mut gate);
    k5(&mut gate);
    properties(&mut gate, &decomps);
    bounds(&mut gate, &decomps);
    let unexpected: Vec<&String> = gate
        .failures
        .iter()
        .filter(|f| !KNOWN_FAILURES.contains(&f.as_str()))
        .collect();
    println!(
        "acceptance: {} failing sub-criteria {:?}, of which analysed {:?}",
        gate.failures.len(),
        gate.failures,
        KNOWN_FAILURES
    );
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
