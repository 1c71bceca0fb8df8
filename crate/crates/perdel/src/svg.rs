//! SVG drawing of a decomposition of `Z^2`: every class and its translates by
//! `{-1, 0, 1}^2`.

use std::fmt::Write;

use num_traits::ToPrimitive;
use perdel_core::delaunay::PeriodicDecomposition;
use perdel_core::exact::QuadraticForm;
use perdel_core::polytope::Cell;

use crate::CliError;

const UNIT: f64 = 60.0;
const PALETTE: [&str; 6] = [
    "#c6dbef", "#fdd0a2", "#c7e9c0", "#dadaeb", "#fcbba1", "#d9d9d9",
];

/// Vertices in boundary order, walking along the edges.
fn boundary_cycle(c: &Cell) -> Vec<usize> {
    let n = c.vertices().len();
    let edges: Vec<&Vec<usize>> = c.facets().iter().map(|f| &f.vertices).collect();
    let mut order = vec![0];
    while order.len() < n {
        let last = *order.last().unwrap();
        let next = edges
            .iter()
            .filter(|e| e.contains(&last))
            .flat_map(|e| e.iter().copied())
            .find(|v| *v != last && !order.contains(v));
        match next {
            Some(v) => order.push(v),
            None => break,
        }
    }
    order
}

/// Embedding of the lattice in the plane: the identity, or a basis with Gram
/// matrix `q` when a form is supplied.
fn embedding(q: Option<&QuadraticForm>) -> [[f64; 2]; 2] {
    let Some(q) = q else {
        return [[1.0, 0.0], [0.0, 1.0]];
    };
    let m = q.gram();
    let a = m[(0, 0)].to_f64().unwrap_or(1.0);
    let b = m[(0, 1)].to_f64().unwrap_or(0.0);
    let c = m[(1, 1)].to_f64().unwrap_or(1.0);
    let s = a.sqrt();
    [[s, 0.0], [b / s, (c - b * b / a).max(0.0).sqrt()]]
}

pub fn render(d: &PeriodicDecomposition, q: Option<&QuadraticForm>) -> Result<String, CliError> {
    if d.ambient_dim() != 2 || d.fiber_rank() != 0 {
        return Err(CliError::Input(
            "svg needs a polytopal decomposition of Z^2".into(),
        ));
    }
    if q.is_some_and(|q| q.dim() != 2) {
        return Err(CliError::Input("svg form must be 2-dimensional".into()));
    }
    let basis = embedding(q);
    let place = |x: f64, y: f64| -> (f64, f64) {
        (
            UNIT * (x * basis[0][0] + y * basis[1][0]),
            -UNIT * (x * basis[0][1] + y * basis[1][1]),
        )
    };
    let mut polys = Vec::new();
    let (mut min_x, mut min_y, mut max_x, mut max_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for (k, c) in d.cells().iter().enumerate() {
        let order = boundary_cycle(c);
        for tx in -1..=1i64 {
            for ty in -1..=1i64 {
                let pts: Vec<(f64, f64)> = order
                    .iter()
                    .map(|&i| {
                        let v = &c.vertices()[i];
                        place((v[0] + tx) as f64, (v[1] + ty) as f64)
                    })
                    .collect();
                for &(x, y) in &pts {
                    min_x = min_x.min(x);
                    min_y = min_y.min(y);
                    max_x = max_x.max(x);
                    max_y = max_y.max(y);
                }
                polys.push((k, tx == 0 && ty == 0, pts));
            }
        }
    }
    let pad = UNIT / 4.0;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.3} {:.3} {:.3} {:.3}">"#,
        min_x - pad,
        min_y - pad,
        max_x - min_x + 2.0 * pad,
        max_y - min_y + 2.0 * pad
    )
    .unwrap();
    for (k, home, pts) in polys {
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
        let width = if home { 2.5 } else { 1.0 };
        writeln!(
            out,
            r##"  <polygon class="cell-{k}" points="{}" fill="{}" stroke="#333333" stroke-width="{width}"/>"##,
            coords.join(" "),
            PALETTE[k % PALETTE.len()]
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}
