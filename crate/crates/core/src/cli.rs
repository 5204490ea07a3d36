//! Command-line interface of the `graphfp` binary.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::compress::{
    diagonal_compress, freeness_sufficient, off_diagonal_compress, projection_compress, CompressError,
    FreenessQuery, VertexSet,
};
use crate::cumulant::{Alphabet, CumulantEngine, CumulantError, DiagonalSamples};
use crate::expr::{DiagonalElement, ElementDocument, ElementError, FourierExpr};
use crate::fock::{oracle_expectation, FockError};
use crate::graph::{DirectedGraph, GraphError};
use crate::scalar::format_rational;
use crate::verify::{builtin_graphs, run_suite, VerifyConfig};
use crate::word::{lattice_path, parse_word, reduce, Model, WordParseError};

pub const MAX_N: usize = 10;
pub const MAX_DEPTH: usize = 12;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "graphfp",
    version,
    about = "Exact moments, cumulants and compressions over graph operator algebras",
    after_help = "Models: `ck` (default) imposes L_w L_w* = L_s(w); `toeplitz` keeps only \
                  L_w* L_w = L_r(w), which is how the operators act on the Fock space. \
                  Use `--model both` to compare them."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Ck,
    Toeplitz,
    Both,
}

impl ModelArg {
    fn models(self) -> Vec<Model> {
        match self {
            ModelArg::Ck => vec![Model::CK],
            ModelArg::Toeplitz => vec![Model::Toeplitz],
            ModelArg::Both => Model::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Graph file (JSON with `vertices` and `edges`).
    #[arg(short = 'g', long = "graph")]
    pub graph: PathBuf,
    /// Element file; repeat for commands taking several elements.
    #[arg(short = 'a', long = "element")]
    pub elements: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModelArg::Ck)]
    pub model: ModelArg,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print E(a^n) for n = 1..=n_max.
    Moments {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'n', long = "n-max", default_value_t = 4)]
        n_max: usize,
    },
    /// Print k_n(a, ..., a) for n = 1..=n_max.
    Cumulants {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'n', long = "n-max", default_value_t = 4)]
        n_max: usize,
    },
    /// Compress an element; writes the result in the element format.
    Compress {
        #[arg(value_enum)]
        kind: CompressKind,
        #[command(flatten)]
        common: Common,
        /// Vertex names: the set V for `diag` and `proj`, `v1 v2` for `offdiag`.
        #[arg(required = true)]
        vertices: Vec<String>,
    },
    /// Test two elements for freeness: support criterion and mixed cumulants.
    Free {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'n', long = "n-max", default_value_t = 4)]
        n_max: usize,
    },
    /// Reduce a word such as `L[e] L*[e]` and take its expectation.
    Reduce {
        #[command(flatten)]
        common: Common,
        word: String,
        /// Also evaluate on the Fock space truncated at this depth.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Run the exact self-check suite on the built-in graphs and `--graph`.
    Verify {
        #[arg(short = 'g', long = "graph")]
        graph: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModelArg::Ck)]
        model: ModelArg,
        #[arg(short = 'n', long = "n-max", default_value_t = 4)]
        n_max: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompressKind {
    Diag,
    Offdiag,
    Proj,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Graph { path: String, source: GraphError },
    #[error("{path}: {source}")]
    Element { path: String, source: ElementError },
    #[error(transparent)]
    Word(#[from] WordParseError),
    #[error(transparent)]
    Compress(#[from] CompressError),
    #[error(transparent)]
    Cumulant(#[from] CumulantError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn read(path: &FsPath) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn load_graph(path: &FsPath) -> Result<DirectedGraph, CliError> {
    DirectedGraph::from_json(&read(path)?).map_err(|source| CliError::Graph {
        path: path.display().to_string(),
        source,
    })
}

fn load_element(graph: &DirectedGraph, path: &FsPath) -> Result<FourierExpr, CliError> {
    FourierExpr::from_json(graph, &read(path)?).map_err(|source| CliError::Element {
        path: path.display().to_string(),
        source,
    })
}

fn load_elements(graph: &DirectedGraph, common: &Common, count: usize) -> Result<Vec<FourierExpr>, CliError> {
    if common.elements.len() != count {
        return Err(CliError::Usage(format!(
            "expected {count} element file(s) via -a, got {}",
            common.elements.len()
        )));
    }
    common.elements.iter().map(|p| load_element(graph, p)).collect()
}

fn check_n(n_max: usize) -> Result<(), CliError> {
    if n_max == 0 || n_max > MAX_N {
        return Err(CliError::Usage(format!("--n-max must be in 1..={MAX_N}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct ScalarJson {
    re: String,
    im: String,
}

#[derive(Serialize)]
struct DiagonalJson(std::collections::BTreeMap<String, ScalarJson>);

fn diagonal_json(graph: &DirectedGraph, d: &DiagonalElement) -> DiagonalJson {
    DiagonalJson(
        d.iter()
            .map(|(v, c)| {
                (
                    graph.vertex_name(*v).to_string(),
                    ScalarJson {
                        re: format_rational(&c.re),
                        im: format_rational(&c.im),
                    },
                )
            })
            .collect(),
    )
}

#[derive(Serialize)]
struct TableJson {
    model: &'static str,
    kind: &'static str,
    values: Vec<DiagonalJson>,
}

fn print_table(
    out: &mut dyn Write,
    graph: &DirectedGraph,
    format: Format,
    kind: &'static str,
    tables: &[(Model, Vec<DiagonalElement>)],
) -> Result<(), CliError> {
    match format {
        Format::Text => {
            for (m, values) in tables {
                writeln!(out, "# {kind} ({})", m.name())?;
                for (i, v) in values.iter().enumerate() {
                    writeln!(out, "{:>3}  {}", i + 1, v.display(graph))?;
                }
            }
        }
        Format::Json => {
            let docs: Vec<TableJson> = tables
                .iter()
                .map(|(m, values)| TableJson {
                    model: m.name(),
                    kind,
                    values: values.iter().map(|v| diagonal_json(graph, v)).collect(),
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&docs).expect("serializable"))?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ProjectionJson {
    full: ElementDocument,
    diag: ElementDocument,
    offdiag: ElementDocument,
}

fn vertex_set(graph: &DirectedGraph, names: &[String]) -> Result<VertexSet, CliError> {
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(VertexSet::from_names(graph, &names)?)
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Moments { common, n_max } => {
            check_n(n_max)?;
            let g = load_graph(&common.graph)?;
            let a = load_elements(&g, &common, 1)?.remove(0);
            let tables: Vec<_> = common
                .model
                .models()
                .into_iter()
                .map(|m| (m, CumulantEngine::new(&g, m).moment_table(&a, n_max)))
                .collect();
            print_table(out, &g, common.format.unwrap_or(Format::Text), "moments", &tables)?;
            Ok(EXIT_OK)
        }
        Command::Cumulants { common, n_max } => {
            check_n(n_max)?;
            let g = load_graph(&common.graph)?;
            let a = load_elements(&g, &common, 1)?.remove(0);
            let mut tables = Vec::new();
            for m in common.model.models() {
                tables.push((m, CumulantEngine::new(&g, m).cumulant_table(&a, n_max)?));
            }
            print_table(out, &g, common.format.unwrap_or(Format::Text), "cumulants", &tables)?;
            Ok(EXIT_OK)
        }
        Command::Compress { kind, common, vertices } => {
            let g = load_graph(&common.graph)?;
            let a = load_elements(&g, &common, 1)?.remove(0);
            let format = common.format.unwrap_or(Format::Json);
            let emit = |out: &mut dyn Write, x: &FourierExpr| -> Result<(), CliError> {
                match format {
                    Format::Json => writeln!(out, "{}", x.to_json(&g))?,
                    Format::Text => writeln!(out, "{}", x.display(&g))?,
                }
                Ok(())
            };
            match kind {
                CompressKind::Diag => emit(out, &diagonal_compress(&a, &vertex_set(&g, &vertices)?))?,
                CompressKind::Offdiag => {
                    let [v1, v2] = vertices.as_slice() else {
                        return Err(CliError::Usage("offdiag takes exactly two vertices".into()));
                    };
                    let (v1, v2) = (g.vertex(v1).map_err(CompressError::from)?, g.vertex(v2).map_err(CompressError::from)?);
                    emit(out, &off_diagonal_compress(&a, v1, v2)?)?;
                }
                CompressKind::Proj => {
                    let pc = projection_compress(&a, &vertex_set(&g, &vertices)?);
                    match format {
                        Format::Json => {
                            let doc = ProjectionJson {
                                full: pc.full.to_document(&g),
                                diag: pc.diag.to_document(&g),
                                offdiag: pc.offdiag.to_document(&g),
                            };
                            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))?;
                        }
                        Format::Text => {
                            writeln!(out, "full     {}", pc.full.display(&g))?;
                            writeln!(out, "diag     {}", pc.diag.display(&g))?;
                            writeln!(out, "offdiag  {}", pc.offdiag.display(&g))?;
                        }
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Free { common, n_max } => {
            check_n(n_max)?;
            let g = load_graph(&common.graph)?;
            let xs = load_elements(&g, &common, 2)?;
            let (a, b) = (&xs[0], &xs[1]);
            let verdict = freeness_sufficient(&g, FreenessQuery::Elements { a, b });
            writeln!(out, "support criterion: {verdict}")?;
            let samples = DiagonalSamples::standard(&g, n_max);
            for m in common.model.models() {
                let r = CumulantEngine::new(&g, m).mixed_cumulants_vanish(a, b, n_max, &samples, Alphabet::WithAdjoints)?;
                match r.witness {
                    None => writeln!(
                        out,
                        "{}: all {} mixed cumulants up to order {n_max} vanish",
                        m.name(),
                        r.checked
                    )?,
                    Some(w) => {
                        let pattern: Vec<String> = w.pattern.iter().map(|o| o.to_string()).collect();
                        writeln!(
                            out,
                            "{}: not free, k_{}({}) = {} with diagonal sample {}",
                            m.name(),
                            w.n,
                            pattern.join(", "),
                            w.value.display(&g),
                            w.sample
                        )?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Reduce { common, word, depth } => {
            let g = load_graph(&common.graph)?;
            let w = parse_word(&g, &word)?;
            let heights: Vec<String> = lattice_path(&w).heights().iter().map(|h| h.to_string()).collect();
            writeln!(out, "heights  [{}]", heights.join(", "))?;
            for m in common.model.models() {
                let nf = reduce(&w, m);
                let e = crate::expr::Evaluated::from_word(&w, m).expectation();
                writeln!(out, "{:<9}{}  E = {}", m.name(), nf.display(&g), e.display(&g))?;
            }
            if let Some(d) = depth {
                if d > MAX_DEPTH {
                    return Err(CliError::Usage(format!("--depth must be at most {MAX_DEPTH}")));
                }
                writeln!(out, "fock     E = {}", oracle_expectation(&g, &w, d)?.display(&g))?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            graph,
            model,
            n_max,
            format,
        } => {
            check_n(n_max)?;
            let mut graphs = builtin_graphs();
            if let Some(p) = graph {
                let name = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "user".into());
                graphs.push((name, load_graph(&p)?));
            }
            let config = VerifyConfig {
                n_max,
                ..VerifyConfig::default()
            };
            let report = run_suite(&graphs, &model.models(), &config);
            match format.unwrap_or(Format::Text) {
                Format::Text => writeln!(out, "{report}")?,
                Format::Json => {
                    #[derive(Serialize)]
                    struct Row<'a> {
                        check: &'a str,
                        graph: &'a str,
                        model: Option<&'static str>,
                        status: String,
                        detail: &'a str,
                    }
                    let rows: Vec<Row> = report
                        .results
                        .iter()
                        .map(|r| Row {
                            check: r.check,
                            graph: &r.graph,
                            model: r.model.map(Model::name),
                            status: r.status.to_string(),
                            detail: &r.detail,
                        })
                        .collect();
                    writeln!(out, "{}", serde_json::to_string_pretty(&rows).expect("serializable"))?;
                }
            }
            Ok(if report.failed() { EXIT_VERIFY_FAILED } else { EXIT_OK })
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
