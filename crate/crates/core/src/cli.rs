//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 usage, 2 query syntax, 3 input or snapshot, 4 journal
//! not found, 5 chart column or empty chart. Every option under "Scoring and
//! matching" can also be set through a `SCIGRAPH_*` environment variable.

use crate::chart::{self, ChartError, CsvExport};
use crate::graph::{Label, NodeId, PropertyGraph, RelType};
use crate::indicators::journal_indicators;
use crate::ingest::{ingest_jsonl, Thresholds};
use crate::internationality::{optimal_elasticities, score, ElasticityVector, ScoreParams};
use crate::query::{self, QueryError, ResultTable};
use crate::similarity::{
    cosine, normalize_text, DEFAULT_AUTHOR_THRESHOLD, DEFAULT_JOURNAL_THRESHOLD,
    DEFAULT_TITLE_THRESHOLD,
};
use crate::snapshot;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_QUERY: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NOT_FOUND: i32 = 4;
pub const EXIT_CHART: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "scigraph", version, about = "Scholarly article graph: ingest, query, score, export")]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
#[command(next_help_heading = "Scoring and matching")]
pub struct Config {
    /// Cosine threshold for merging author names
    #[arg(long, global = true, env = "SCIGRAPH_AUTHOR_THRESHOLD", default_value_t = DEFAULT_AUTHOR_THRESHOLD, value_parser = parse_threshold)]
    pub author_threshold: f64,
    /// Cosine threshold for merging journal names
    #[arg(long, global = true, env = "SCIGRAPH_JOURNAL_THRESHOLD", default_value_t = DEFAULT_JOURNAL_THRESHOLD, value_parser = parse_threshold)]
    pub journal_threshold: f64,
    /// Cosine threshold for merging article titles within a journal
    #[arg(long, global = true, env = "SCIGRAPH_TITLE_THRESHOLD", default_value_t = DEFAULT_TITLE_THRESHOLD, value_parser = parse_threshold)]
    pub title_threshold: f64,
    /// Elasticities for x1..x4, comma separated
    #[arg(long, global = true, env = "SCIGRAPH_ALPHA", value_delimiter = ',', default_value = "0.25,0.25,0.25,0.25")]
    pub alpha: Vec<f64>,
    /// Scale factor A of the score
    #[arg(long = "scale", global = true, env = "SCIGRAPH_SCALE", default_value_t = 1.0)]
    pub scale_a: f64,
    /// SNIP used for journals without one
    #[arg(long, global = true, env = "SCIGRAPH_SNIP_DEFAULT", default_value_t = 1.0)]
    pub snip_default: f64,
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("threshold must be in (0, 1], got {v}"))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ingest JSONL article records into a snapshot; prints the report as JSON
    Ingest {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run a query against a snapshot
    Query {
        snapshot: PathBuf,
        query: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Compute the internationality score of a journal
    Score {
        snapshot: PathBuf,
        #[arg(long)]
        journal: String,
        /// Report the elasticities that maximize the score instead
        #[arg(long)]
        optimize_alpha: bool,
    },
    /// Turn a query result into chart CSV
    Chart {
        #[command(subcommand)]
        kind: ChartKind,
    },
    /// Export a filtered slice of the graph as DOT
    ExportDot {
        snapshot: PathBuf,
        /// Node labels to keep, comma separated
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        labels: Vec<String>,
        /// Relationship types to keep, comma separated
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        rels: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ChartInput {
    snapshot: PathBuf,
    #[arg(long)]
    query: String,
    /// Output CSV path; standard output when absent
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ChartKind {
    /// Count rows per (group, x)
    Line {
        #[command(flatten)]
        input: ChartInput,
        #[arg(long)]
        x_col: String,
        #[arg(long)]
        group_col: String,
    },
    /// Pass numeric columns through, one row per result row
    Area {
        #[command(flatten)]
        input: ChartInput,
        #[arg(long, value_delimiter = ',', required = true)]
        cols: Vec<String>,
    },
    /// Count rows per category with percentages
    Pie {
        #[command(flatten)]
        input: ChartInput,
        #[arg(long)]
        col: String,
    },
}

/// A failed command: message for standard error plus exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<QueryError> for Failure {
    fn from(e: QueryError) -> Self {
        let code = if e.is_syntax() { EXIT_QUERY } else { EXIT_INPUT };
        Failure::new(code, e.to_string())
    }
}

impl From<ChartError> for Failure {
    fn from(e: ChartError) -> Self {
        let code = match e {
            ChartError::Io(_) => EXIT_INPUT,
            _ => EXIT_CHART,
        };
        Failure::new(code, e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

/// Parses `args` and runs the command, writing data to `out` and diagnostics
/// to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let config = &cli.config;
    match &cli.command {
        Command::Ingest { input, output } => cmd_ingest(input, output, config, out),
        Command::Query {
            snapshot,
            query,
            format,
        } => cmd_query(snapshot, query, *format, out, err),
        Command::Score {
            snapshot,
            journal,
            optimize_alpha,
        } => cmd_score(snapshot, journal, config, *optimize_alpha, out),
        Command::Chart { kind } => cmd_chart(kind, out, err),
        Command::ExportDot {
            snapshot,
            labels,
            rels,
            output,
        } => cmd_export_dot(snapshot, labels, rels, output.as_deref(), out),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(EXIT_INPUT, format!("{}: {e}", path.display()))
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(EXIT_INPUT, e.to_string())),
    }
}

pub fn load_snapshot(path: &Path) -> Result<PropertyGraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    snapshot::from_str(&text).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn cmd_ingest(input: &Path, output: &Path, config: &Config, out: &mut dyn Write) -> CmdResult {
    let text = fs::read_to_string(input).map_err(|e| io_failure(input, e))?;
    let thresholds = Thresholds::new(
        config.author_threshold,
        config.journal_threshold,
        config.title_threshold,
    )
    .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    let (graph, report) =
        ingest_jsonl(&text, thresholds).map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
    write_output(Some(output), &snapshot::to_string(&graph), out)?;
    let report = serde_json::to_string(&report).expect("reports always serialize");
    write_output(None, &(report + "\n"), out)
}

fn run_query(graph: &PropertyGraph, text: &str, err: &mut dyn Write) -> Result<ResultTable, Failure> {
    let table = query::run(graph, text)?;
    for w in &table.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(table)
}

fn cmd_query(
    snapshot: &Path,
    text: &str,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    // Syntax errors are reported before touching the snapshot.
    query::parse(text)?;
    let graph = load_snapshot(snapshot)?;
    let table = run_query(&graph, text, err)?;
    let rendered = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json() + "\n",
    };
    write_output(None, &rendered, out)
}

/// Exact match on the normalized name first, then the most similar journal
/// above the journal threshold (lowest id on ties).
pub fn find_journal(graph: &PropertyGraph, name: &str, threshold: f64) -> Option<NodeId> {
    let wanted = normalize_text(name);
    let journals = graph.nodes_with_label(Label::Journal);
    if let Some(&id) = journals
        .iter()
        .find(|&&j| graph.node(j).is_ok_and(|n| n.name() == wanted))
    {
        return Some(id);
    }
    let mut best: Option<(NodeId, f64)> = None;
    for &j in journals {
        let c = cosine(graph.node(j).ok()?.name(), &wanted);
        if c >= threshold && best.is_none_or(|(_, b)| c > b) {
            best = Some((j, c));
        }
    }
    best.map(|(j, _)| j)
}

#[derive(Debug, Serialize)]
struct ScoreOutput<'a> {
    journal: &'a str,
    x1: f64,
    x2: f64,
    x3: f64,
    x4: f64,
    alpha: &'a [f64],
    #[serde(rename = "A")]
    scale: f64,
    internationality: f64,
}

fn cmd_score(
    snapshot: &Path,
    journal: &str,
    config: &Config,
    optimize: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let usage = |e: &dyn std::fmt::Display| Failure::new(EXIT_USAGE, e.to_string());
    let params = ScoreParams::new(config.scale_a).map_err(|e| usage(&e))?;
    let alpha = if optimize {
        None
    } else {
        Some(ElasticityVector::simplex(config.alpha.clone()).map_err(|e| usage(&e))?)
    };
    if let Some(a) = &alpha {
        if a.len() != 4 {
            return Err(Failure::new(
                EXIT_USAGE,
                format!("--alpha needs 4 values, got {}", a.len()),
            ));
        }
    }
    if !(config.snip_default.is_finite() && config.snip_default >= 0.0) {
        return Err(usage(&format!("invalid --snip-default {}", config.snip_default)));
    }

    let graph = load_snapshot(snapshot)?;
    let id = find_journal(&graph, journal, config.journal_threshold)
        .ok_or_else(|| Failure::new(EXIT_NOT_FOUND, format!("journal not found: {journal}")))?;
    let node = graph.node(id).map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
    let snip = node
        .get("snip")
        .and_then(|v| v.as_f64())
        .unwrap_or(config.snip_default);
    let ind = journal_indicators(&graph, id, snip, config.author_threshold)
        .map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
    let x = ind
        .input_vector()
        .map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
    let (alpha, y) = match alpha {
        Some(a) => {
            let y = score(&x, &a, params).map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
            (a, y)
        }
        None => {
            let opt = optimal_elasticities(&x, params)
                .map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
            (opt.alpha, opt.score)
        }
    };
    let output = ScoreOutput {
        journal: node.name(),
        x1: ind.x1,
        x2: ind.x2,
        x3: ind.x3,
        x4: ind.x4,
        alpha: alpha.as_slice(),
        scale: params.scale(),
        internationality: y,
    };
    let text = serde_json::to_string(&output).expect("finite scores always serialize");
    write_output(None, &(text + "\n"), out)
}

fn cmd_chart(kind: &ChartKind, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let input = match kind {
        ChartKind::Line { input, .. } | ChartKind::Area { input, .. } | ChartKind::Pie { input, .. } => {
            input
        }
    };
    query::parse(&input.query)?;
    let graph = load_snapshot(&input.snapshot)?;
    let table = run_query(&graph, &input.query, err)?;
    let csv = match kind {
        ChartKind::Line { x_col, group_col, .. } => {
            let s = chart::line_series(&table, x_col, group_col)?;
            if s.dropped > 0 {
                let _ = writeln!(err, "warning: dropped {} rows with null values", s.dropped);
            }
            s.to_csv()
        }
        ChartKind::Area { cols, .. } => {
            let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
            let s = chart::area_series(&table, &cols)?;
            if s.nulls_zeroed > 0 {
                let _ = writeln!(err, "warning: {} null cells written as 0", s.nulls_zeroed);
            }
            s.to_csv()
        }
        ChartKind::Pie { col, .. } => {
            let p = chart::pie_counts(&table, col)?;
            if p.dropped > 0 {
                let _ = writeln!(err, "warning: dropped {} rows with null category", p.dropped);
            }
            p.to_csv()
        }
    };
    write_output(input.output.as_deref(), &csv, out)
}

fn parse_list<T: FromStr>(items: &[String], what: &str) -> Result<Vec<T>, Failure> {
    items
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| T::from_str(s).map_err(|_| Failure::new(EXIT_USAGE, format!("unknown {what} '{s}'"))))
        .collect()
}

fn cmd_export_dot(
    snapshot: &Path,
    labels: &[String],
    rels: &[String],
    output: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let labels: Vec<Label> = parse_list(labels, "label")?;
    let rels: Vec<RelType> = parse_list(rels, "relationship type")?;
    let graph = load_snapshot(snapshot)?;
    write_output(output, &chart::export_dot(&graph, &labels, &rels), out)
}
