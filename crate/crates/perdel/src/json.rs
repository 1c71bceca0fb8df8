//! Canonical JSON for forms, cells, decompositions, graphs, supports and reports.
//!
//! Object keys come out sorted and rationals are written as `"p/q"` strings,
//! so identical values always serialize to identical bytes.

use perdel_core::catalog::Refinement;
use perdel_core::delaunay::PeriodicDecomposition;
use perdel_core::exact::{format_scalar, parse_scalar, Matrix, QuadraticForm, Scalar};
use perdel_core::graphs::{DualGraph, KuratowskiKind, KuratowskiWitness, TorelliReport};
use perdel_core::moment::WeightedSupport;
use perdel_core::polytope::{convex_hull, Cell, LatticeVector};
use perdel_core::seccone::{ConeCertificate, FarkasCertificate};
use perdel_core::sheaf::StratumReport;
use serde_json::{json, Value};

use crate::CliError;

/// Pretty-printed text with a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

pub fn parse_text(text: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed JSON: {e}")))
}

fn bad(what: &str) -> CliError {
    CliError::Input(what.to_string())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, CliError> {
    v.get(key)
        .ok_or_else(|| bad(&format!("missing field {key:?}")))
}

fn usize_of(v: &Value, what: &str) -> Result<usize, CliError> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| bad(&format!("{what} must be a nonnegative integer")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, CliError> {
    v.as_array()
        .ok_or_else(|| bad(&format!("{what} must be an array")))
}

pub fn scalar(x: &Scalar) -> Value {
    Value::String(format_scalar(x))
}

/// Accepts `"p/q"` strings and JSON integers.
pub fn scalar_from(v: &Value) -> Result<Scalar, CliError> {
    match v {
        Value::String(s) => parse_scalar(s).map_err(|e| CliError::Input(e.to_string())),
        Value::Number(n) => n
            .as_i64()
            .map(perdel_core::exact::int)
            .ok_or_else(|| bad("numbers must be integers; write other rationals as \"p/q\"")),
        _ => Err(bad("rational must be a string or an integer")),
    }
}

pub fn matrix(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(scalar).collect()))
            .collect(),
    )
}

fn vector_from(v: &Value, len: Option<usize>) -> Result<LatticeVector, CliError> {
    let xs = array(v, "lattice vector")?
        .iter()
        .map(|x| {
            x.as_i64()
                .ok_or_else(|| bad("lattice coordinates must be integers"))
        })
        .collect::<Result<Vec<i64>, _>>()?;
    if len.is_some_and(|l| l != xs.len()) {
        return Err(bad("lattice vector has the wrong length"));
    }
    Ok(xs)
}

pub fn form(q: &QuadraticForm) -> Value {
    json!({ "dim": q.dim(), "gram": matrix(q.gram()) })
}

pub fn form_from(v: &Value) -> Result<QuadraticForm, CliError> {
    let rows = array(field(v, "gram")?, "gram")?
        .iter()
        .map(|r| array(r, "gram row")?.iter().map(scalar_from).collect())
        .collect::<Result<Vec<Vec<Scalar>>, _>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(bad("gram must be square"));
    }
    if let Some(d) = v.get("dim") {
        if usize_of(d, "dim")? != n {
            return Err(bad("dim does not match the gram matrix"));
        }
    }
    let m = Matrix::from_rows_with_cols(rows, n).map_err(|e| CliError::Input(e.to_string()))?;
    QuadraticForm::new(m).map_err(|e| CliError::Input(e.to_string()))
}

pub fn cell(c: &Cell) -> Value {
    json!({ "dim": c.ambient_dim(), "vertices": c.vertices() })
}

pub fn cell_from(v: &Value, dim: usize) -> Result<Cell, CliError> {
    if let Some(d) = v.get("dim") {
        if usize_of(d, "cell dim")? != dim {
            return Err(bad("cell dim does not match the decomposition"));
        }
    }
    let mut pts = array(field(v, "vertices")?, "vertices")?
        .iter()
        .map(|p| vector_from(p, Some(dim)))
        .collect::<Result<Vec<_>, _>>()?;
    if pts.is_empty() {
        return Err(bad("cell without vertices"));
    }
    pts.sort();
    Ok(convex_hull(&pts)?)
}

pub fn decomposition(d: &PeriodicDecomposition) -> Value {
    let walls: Vec<Value> = d
        .walls()
        .iter()
        .map(
            |w| json!({ "a": w.cell_a, "b": w.cell_b, "t": w.translation, "face_dim": w.face_dim }),
        )
        .collect();
    json!({
        "dim": d.ambient_dim(),
        "fiber_rank": d.fiber_rank(),
        "cells": d.cells().iter().map(cell).collect::<Vec<_>>(),
        "walls": walls,
    })
}

/// Walls in the file are informational; they are rebuilt from the cells.
pub fn decomposition_from(v: &Value) -> Result<PeriodicDecomposition, CliError> {
    let g = usize_of(field(v, "dim")?, "dim")?;
    let a = match v.get("fiber_rank") {
        Some(x) => usize_of(x, "fiber_rank")?,
        None => 0,
    };
    if a > g {
        return Err(bad("fiber_rank exceeds dim"));
    }
    let cells = array(field(v, "cells")?, "cells")?
        .iter()
        .map(|c| cell_from(c, g - a))
        .collect::<Result<Vec<_>, _>>()?;
    if a == 0 {
        return Ok(PeriodicDecomposition::from_cells(g, cells)?);
    }
    let base = if cells.is_empty() {
        PeriodicDecomposition::from_parts(g - a, 0, cells, Vec::new())?
    } else {
        PeriodicDecomposition::from_cells(g - a, cells)?
    };
    Ok(PeriodicDecomposition::pullback(&base, a)?)
}

pub fn graph(g: &DualGraph) -> Value {
    let edges: Vec<[usize; 2]> = g.edges().iter().map(|&(a, b)| [a, b]).collect();
    json!({ "vertices": g.vertex_count(), "edges": edges })
}

pub fn graph_from(v: &Value) -> Result<DualGraph, CliError> {
    let n = usize_of(field(v, "vertices")?, "vertices")?;
    let edges = array(field(v, "edges")?, "edges")?
        .iter()
        .map(|e| match e.as_array().map(Vec::as_slice) {
            Some([a, b]) => Ok((usize_of(a, "edge end")?, usize_of(b, "edge end")?)),
            _ => Err(bad("edges must be pairs")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    DualGraph::new(n, edges).map_err(|e| CliError::Input(e.to_string()))
}

pub fn support_from(v: &Value) -> Result<WeightedSupport, CliError> {
    let points = array(field(v, "points")?, "points")?;
    let weights = array(field(v, "weights")?, "weights")?;
    if points.len() != weights.len() {
        return Err(bad("points and weights differ in length"));
    }
    let entries = points
        .iter()
        .zip(weights)
        .map(|(p, w)| Ok((vector_from(p, None)?, scalar_from(w)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(WeightedSupport::new(entries)?)
}

pub fn stratum_report(r: &StratumReport) -> Value {
    let mut v = json!({
        "h0": r.h0,
        "method": r.method.name(),
        "l_values": r.l_values,
        "volume": r.volume,
    });
    if let Some(c) = r.voronoi_cone_dim {
        v["cone_dim"] = json!(c);
    }
    if let Some(s) = r.secondary_cone_dim {
        v["secondary_cone_dim"] = json!(s);
    }
    if let Some(f) = r.et_flag {
        v["et_flag"] = json!(f);
    }
    v
}

pub fn farkas(f: &FarkasCertificate) -> Value {
    let terms: Vec<Value> = f
        .terms
        .iter()
        .map(|t| json!({ "wall": t.wall, "point": t.point, "weight": scalar(&t.weight) }))
        .collect();
    let equalities: Vec<Value> = f
        .equalities
        .iter()
        .map(|e| json!({ "cell": e.cell, "point": e.point, "multiplier": scalar(&e.multiplier) }))
        .collect();
    json!({ "terms": terms, "equalities": equalities })
}

pub fn cone(c: &ConeCertificate) -> Value {
    json!({
        "delaunay": c.is_delaunay(),
        "cone_dim": c.voronoi_stratum_dim(),
        "secondary_cone_dim": c.equality_solution_dim,
        "witness": c.witness.as_ref().map(|q| matrix(q.gram())),
        "farkas": c.farkas.as_ref().map(farkas),
    })
}

fn witness(w: &KuratowskiWitness) -> Value {
    let kind = match w.kind {
        KuratowskiKind::K5 => "K5",
        KuratowskiKind::K33 => "K33",
    };
    json!({ "kind": kind, "branch_vertices": w.branch_vertices, "paths": w.paths })
}

pub fn torelli(r: &TorelliReport) -> Value {
    json!({
        "genus": r.genus,
        "planar": r.planar,
        "kuratowski": r.witness.as_ref().map(witness),
        "class_count": r.class_count,
        "vertex_counts": r.vertex_counts,
        "h0": r.h0,
        "secondary_cone_dim": r.secondary_cone_dim,
        "cone_dim": r.cone_dim,
        "et_flag": r.et_flag,
        "conjecture_consistent": r.conjecture_consistent,
    })
}

pub fn refinement(r: &Refinement) -> Value {
    json!({
        "choice": [r.choice.0, r.choice.1],
        "symmetric": r.symmetric,
        "decomposition": decomposition(&r.decomposition),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use perdel_core::delaunay::delaunay_decomposition;
    use perdel_core::exact::ratio;

    #[test]
    fn form_round_trip() {
        let q = QuadraticForm::new(
            Matrix::from_rows(vec![
                vec![ratio(3, 2), ratio(-1, 3)],
                vec![ratio(-1, 3), ratio(2, 1)],
            ])
            .unwrap(),
        )
        .unwrap();
        let v = form(&q);
        assert_eq!(v["gram"][0][1], json!("-1/3"));
        assert_eq!(v["gram"][1][1], json!("2"));
        assert_eq!(form_from(&v).unwrap(), q);
        assert_eq!(
            form_from(&json!({ "gram": [[1, 0], [0, 1]] })).unwrap(),
            QuadraticForm::identity(2)
        );
    }

    #[test]
    fn decomposition_round_trip() {
        let d = delaunay_decomposition(&QuadraticForm::from_int_rows(&[[2, 1], [1, 2]]).unwrap())
            .unwrap();
        let v = decomposition(&d);
        let back = decomposition_from(&v).unwrap();
        assert_eq!(back, d);
        assert_eq!(to_text(&decomposition(&back)), to_text(&v));
    }

    #[test]
    fn keys_are_sorted() {
        let v = json!({ "b": 1, "a": 2 });
        assert!(to_text(&v).find("\"a\"").unwrap() < to_text(&v).find("\"b\"").unwrap());
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(
            form_from(&json!({ "gram": [[1, 2]] })),
            Err(CliError::Input(_))
        ));
        assert!(matches!(
            graph_from(&json!({ "vertices": 2, "edges": [[0]] })),
            Err(CliError::Input(_))
        ));
        assert!(matches!(
            scalar_from(&json!("1/0")),
            Err(CliError::Input(_))
        ));
    }
}
