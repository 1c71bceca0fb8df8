//! Command-line entry point.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use perdel_core::catalog;
use perdel_core::delaunay::{check_window, delaunay_decomposition};
use perdel_core::exact::parse_scalar;
use perdel_core::graphs::{self, betti, planarity, torelli_report, DualGraph};
use perdel_core::moment::moment_point;
use perdel_core::seccone::{et_detect, secondary_cone};
use perdel_core::sheaf::{h0_auto, h0_general, h0_simplicial};
use serde_json::{json, Value};

use crate::{json, svg, CliError};

/// Environment variable equivalent to `--long-tests`.
pub const LONG_TESTS_VAR: &str = "PERDEL_LONG_TESTS";

#[derive(Parser, Debug)]
#[command(
    name = "perdel",
    version,
    about = "Exact periodic Delaunay decompositions of Z^g"
)]
pub struct Cli {
    /// Enable expensive cross-checks (also PERDEL_LONG_TESTS=1).
    #[arg(long, global = true)]
    pub long_tests: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Delaunay decomposition of a positive-definite form.
    Delaunay {
        #[arg(long)]
        form: PathBuf,
        /// Also check empty spheres against an explicit window of this scale.
        #[arg(long)]
        window_scale: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Stratum dimension h0 of a decomposition.
    H0 {
        #[arg(long)]
        decomp: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[command(flatten)]
        output: Output,
    },
    /// Secondary cone: Delaunay witness or Farkas certificate.
    Certify {
        #[arg(long)]
        decomp: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// h0 against the Voronoi stratum dimension.
    Et {
        #[arg(long)]
        decomp: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Invariants of a dual graph.
    Graph {
        #[arg(long = "in")]
        input: PathBuf,
        /// Run the full decomposition pipeline.
        #[arg(long)]
        report: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Pipeline report for every graph of a corpus.
    Scan {
        #[arg(long, value_enum, default_value_t = Corpus::Builtin)]
        corpus: Corpus,
        /// Skip graphs of larger genus.
        #[arg(long, default_value_t = 4)]
        max_genus: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Built-in lattices and decompositions.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Moment map of a weighted support.
    Moment {
        #[arg(long)]
        support: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// SVG tiling of a decomposition of Z^2, read from a file or standard input.
    Svg {
        #[arg(long)]
        decomp: Option<PathBuf>,
        /// Draw in the metric of this form instead of lattice coordinates.
        #[arg(long)]
        form: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand, Debug)]
pub enum CatalogAction {
    /// Names of the built-in form families
    List,
    /// Gram matrix of a named form
    Form {
        #[arg(long)]
        name: String,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Delaunay decomposition of the form of the K33 graph
    DeltaRt {
        #[command(flatten)]
        output: Output,
    },
    /// The four triangulating refinements of that decomposition
    RtRefinements {
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    General,
    Simplicial,
    Auto,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Corpus {
    /// Named graphs and all stable graphs.
    Builtin,
    Stable,
    Named,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", p.display()))),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    json::parse_text(&read_input(Some(path))?)
}

fn emit(output: &Output, text: &str) -> Result<(), CliError> {
    match &output.out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json(output: &Output, v: &Value) -> Result<(), CliError> {
    emit(output, &json::to_text(v))
}

fn long_tests_enabled(flag: bool) -> bool {
    flag || std::env::var(LONG_TESTS_VAR).is_ok_and(|v| v == "1")
}

/// Named corpus graphs followed by stable graphs, filtered by genus.
pub fn corpus(which: Corpus, max_genus: usize) -> Vec<(String, DualGraph)> {
    let mut out = Vec::new();
    if which != Corpus::Stable {
        out.extend(
            catalog::named_graphs()
                .into_iter()
                .filter(|(_, g)| betti(g).is_ok_and(|b| b <= max_genus)),
        );
    }
    if which != Corpus::Named {
        out.extend(catalog::stable_corpus(max_genus.min(graphs::MAX_GENUS)));
    }
    out
}

/// Reports for every graph, computed on all available cores, in input order.
pub fn scan(graphs: &[(String, DualGraph)]) -> Vec<(String, Result<Value, CliError>)> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let chunk = graphs.len().div_ceil(workers).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = graphs
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|(name, g)| {
                            let r = torelli_report(g)
                                .map(|r| json::torelli(&r))
                                .map_err(CliError::from);
                            (name.clone(), r)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("scan worker panicked"))
            .collect()
    })
}

fn scan_text(rows: &[(String, Result<Value, CliError>)]) -> String {
    let mut out = format!(
        "{:<10} {:>5} {:>6} {:>7} {:>3} {:>8} {:>7}\n",
        "graph", "genus", "planar", "classes", "h0", "cone_dim", "et_flag"
    );
    for (name, r) in rows {
        match r {
            Ok(v) => out.push_str(&format!(
                "{:<10} {:>5} {:>6} {:>7} {:>3} {:>8} {:>7}\n",
                name,
                v["genus"].to_string(),
                v["planar"].to_string(),
                v["class_count"].to_string(),
                v["h0"].to_string(),
                v["cone_dim"].to_string(),
                v["et_flag"].to_string()
            )),
            Err(e) => out.push_str(&format!("{name:<10} error {}\n", e.code())),
        }
    }
    out
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let long = long_tests_enabled(cli.long_tests);
    match cli.command {
        Command::Delaunay {
            form,
            window_scale,
            output,
        } => {
            let q = json::form_from(&read_json(&form)?)?;
            let d = delaunay_decomposition(&q)?;
            if let Some(s) = window_scale {
                let scale = parse_scalar(&s).map_err(|e| CliError::Input(e.to_string()))?;
                check_window(&q, &d, &scale)?;
            }
            emit_json(&output, &json::decomposition(&d))
        }
        Command::H0 {
            decomp,
            method,
            output,
        } => {
            let d = json::decomposition_from(&read_json(&decomp)?)?;
            let r = match method {
                MethodArg::General => h0_general(&d)?,
                MethodArg::Simplicial => h0_simplicial(&d)?,
                MethodArg::Auto => h0_auto(&d)?,
            };
            let mut v = json::stratum_report(&r);
            if long && r.method != perdel_core::sheaf::Method::General && d.fiber_rank() == 0 {
                let general = h0_general(&d)?.h0;
                if general != r.h0 {
                    return Err(perdel_core::Error::CertificationFailed(format!(
                        "general method gives {general}, {} gives {}",
                        r.method.name(),
                        r.h0
                    ))
                    .into());
                }
                v["general_cross_check"] = json!(general);
            }
            emit_json(&output, &v)
        }
        Command::Certify { decomp, output } => {
            let d = json::decomposition_from(&read_json(&decomp)?)?;
            emit_json(&output, &json::cone(&secondary_cone(&d)?))
        }
        Command::Et { decomp, output } => {
            let d = json::decomposition_from(&read_json(&decomp)?)?;
            emit_json(&output, &json::stratum_report(&et_detect(&d)?))
        }
        Command::Graph {
            input,
            report,
            output,
        } => {
            let g = json::graph_from(&read_json(&input)?)?;
            let v = if report {
                json::torelli(&torelli_report(&g)?)
            } else {
                let verdict = planarity(&g);
                json!({
                    "genus": betti(&g)?,
                    "stable": g.is_stable(),
                    "planar": verdict.planar,
                    "graphic_form": json::form(&graphs::graphic_form(&g)?),
                })
            };
            emit_json(&output, &v)
        }
        Command::Scan {
            corpus: which,
            max_genus,
            format,
            output,
        } => {
            let rows = scan(&corpus(which, max_genus));
            match format {
                Format::Text => emit(&output, &scan_text(&rows)),
                Format::Json => {
                    let table: Vec<Value> = rows
                        .iter()
                        .map(|(name, r)| {
                            let mut v = match r {
                                Ok(v) => v.clone(),
                                Err(e) => e.to_json(),
                            };
                            v["name"] = json!(name);
                            v
                        })
                        .collect();
                    emit_json(&output, &Value::Array(table))
                }
            }
        }
        Command::Catalog { action } => run_catalog(action),
        Command::Moment { support, output } => {
            let s = json::support_from(&read_json(&support)?)?;
            let m = moment_point(&s);
            emit_json(
                &output,
                &json!({ "moment": m.iter().map(json::scalar).collect::<Vec<_>>() }),
            )
        }
        Command::Svg {
            decomp,
            form,
            output,
        } => {
            let d = json::decomposition_from(&json::parse_text(&read_input(decomp.as_deref())?)?)?;
            let q = form
                .map(|p| read_json(&p).and_then(|v| json::form_from(&v)))
                .transpose()?;
            emit(&output, &svg::render(&d, q.as_ref())?)
        }
    }
}

fn run_catalog(action: CatalogAction) -> Result<(), CliError> {
    match action {
        CatalogAction::List => {
            let forms: Vec<Value> = catalog::NAMES
                .iter()
                .map(|(name, about)| json!({ "name": name, "about": about }))
                .collect();
            let graphs: Vec<Value> = catalog::named_graphs()
                .iter()
                .map(|(name, g)| json!({ "name": name, "graph": json::graph(g) }))
                .collect();
            let out = Output { out: None };
            emit_json(
                &out,
                &json!({ "forms": forms, "graphs": graphs, "decompositions": ["delta-rt", "rt-refinements"] }),
            )
        }
        CatalogAction::Form { name, n, output } => {
            let f = catalog::gram(&name, n)?;
            emit_json(&output, &json::form(&f.form))
        }
        CatalogAction::DeltaRt { output } => {
            emit_json(&output, &json::decomposition(&catalog::delta_rt()?))
        }
        CatalogAction::RtRefinements { out_dir } => {
            fs::create_dir_all(&out_dir)?;
            for r in catalog::rt_refinements()? {
                let path = out_dir.join(format!("refinement_{}_{}.json", r.choice.0, r.choice.1));
                fs::write(path, json::to_text(&json::refinement(&r)))?;
            }
            Ok(())
        }
    }
}

/// Parses arguments, runs, and maps failures to exit codes: 1 for domain
/// errors, 2 for malformed input. Errors go to standard error as JSON.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
