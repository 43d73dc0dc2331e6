//! Chart data and graph-visualization export.
//!
//! Query results become deterministic CSV files: a line series per group
//! (publications per year per journal), an area matrix (total vs self
//! citations), and pie slices (articles per country). Graph slices become DOT
//! digraphs with a fixed colour per label.

use crate::graph::{Label, PropertyGraph, PropertyValue, RelType};
use crate::query::ResultTable;
use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("unknown column '{0}'")]
    UnknownColumn(String),
    #[error("column '{column}' holds a non-integer value: {value}")]
    NonIntegerX { column: String, value: String },
    #[error("column '{column}' holds a non-numeric value: {value}")]
    NonNumericColumn { column: String, value: String },
    #[error("no rows to chart")]
    EmptyTable,
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = ChartError> = std::result::Result<T, E>;

fn column(table: &ResultTable, name: &str) -> Result<usize> {
    table
        .column_index(name)
        .ok_or_else(|| ChartError::UnknownColumn(name.to_string()))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LineSeries {
    /// Group → `(x, count)` with strictly increasing x.
    pub groups: BTreeMap<String, Vec<(i64, u64)>>,
    /// Rows dropped for a null x or group.
    pub dropped: usize,
}

impl LineSeries {
    pub fn total(&self) -> u64 {
        self.groups.values().flatten().map(|(_, c)| c).sum()
    }
}

pub fn line_series(table: &ResultTable, x_col: &str, group_col: &str) -> Result<LineSeries> {
    let xi = column(table, x_col)?;
    let gi = column(table, group_col)?;
    let mut counts: BTreeMap<String, BTreeMap<i64, u64>> = BTreeMap::new();
    let mut dropped = 0;
    for row in &table.rows {
        let (Some(x), Some(group)) = (&row[xi], &row[gi]) else {
            dropped += 1;
            continue;
        };
        let PropertyValue::Int(x) = x else {
            return Err(ChartError::NonIntegerX {
                column: x_col.to_string(),
                value: x.to_string(),
            });
        };
        *counts
            .entry(group.to_string())
            .or_default()
            .entry(*x)
            .or_insert(0) += 1;
    }
    if dropped > 0 {
        log::warn!("line series: dropped {dropped} rows with null values");
    }
    Ok(LineSeries {
        groups: counts
            .into_iter()
            .map(|(g, xs)| (g, xs.into_iter().collect()))
            .collect(),
        dropped,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Number {
    Int(i64),
    Float(f64),
}

impl std::fmt::Display for Number {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Number::Int(i) => write!(f, "{i}"),
            Number::Float(x) => write!(f, "{x:?}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AreaSeries {
    pub columns: Vec<String>,
    pub rows: Vec<(usize, Vec<Number>)>,
    /// Null cells written as 0.
    pub nulls_zeroed: usize,
}

pub fn area_series(table: &ResultTable, cols: &[&str]) -> Result<AreaSeries> {
    let idx = cols
        .iter()
        .map(|c| column(table, c))
        .collect::<Result<Vec<_>>>()?;
    let mut series = AreaSeries {
        columns: cols.iter().map(|c| c.to_string()).collect(),
        ..AreaSeries::default()
    };
    for (ri, row) in table.rows.iter().enumerate() {
        let mut values = Vec::with_capacity(idx.len());
        for (&ci, name) in idx.iter().zip(cols) {
            values.push(match &row[ci] {
                None => {
                    series.nulls_zeroed += 1;
                    Number::Int(0)
                }
                Some(PropertyValue::Int(i)) => Number::Int(*i),
                Some(PropertyValue::Float(x)) => Number::Float(*x),
                Some(other) => {
                    return Err(ChartError::NonNumericColumn {
                        column: name.to_string(),
                        value: other.to_string(),
                    })
                }
            });
        }
        series.rows.push((ri, values));
    }
    if series.nulls_zeroed > 0 {
        log::warn!("area series: {} null cells written as 0", series.nulls_zeroed);
    }
    Ok(series)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieSlice {
    pub category: String,
    pub count: u64,
    /// Percentage in hundredths of a percent (5000 = 50.00%).
    pub percent_hundredths: u64,
}

impl PieSlice {
    pub fn percent(&self) -> f64 {
        self.percent_hundredths as f64 / 100.0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PieCounts {
    /// Sorted by count descending, then category ascending.
    pub slices: Vec<PieSlice>,
    pub dropped: usize,
}

impl PieCounts {
    pub fn total(&self) -> u64 {
        self.slices.iter().map(|s| s.count).sum()
    }
}

/// `10000 · count / total` rounded half-to-even, plus the signed remainder
/// used for sum correction.
fn hundredths(count: u64, total: u64) -> (u64, i128) {
    let num = 10_000u128 * count as u128;
    let den = total as u128;
    let (q, r) = (num / den, num % den);
    let rounded = match (2 * r).cmp(&den) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => q + (q % 2),
    };
    // exact − rounded, scaled by `den`.
    let error = num as i128 - (rounded * den) as i128;
    (rounded as u64, error)
}

pub fn pie_counts(table: &ResultTable, col: &str) -> Result<PieCounts> {
    let ci = column(table, col)?;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut dropped = 0;
    for row in &table.rows {
        match &row[ci] {
            Some(v) => *counts.entry(v.to_string()).or_insert(0) += 1,
            None => dropped += 1,
        }
    }
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(ChartError::EmptyTable);
    }
    let mut slices: Vec<(PieSlice, i128)> = counts
        .into_iter()
        .map(|(category, count)| {
            let (percent_hundredths, error) = hundredths(count, total);
            (
                PieSlice {
                    category,
                    count,
                    percent_hundredths,
                },
                error,
            )
        })
        .collect();

    // Independent rounding can drift the sum past ±0.01; move single
    // hundredths on the slices with the largest rounding error until it fits.
    let sum: i64 = slices.iter().map(|(s, _)| s.percent_hundredths as i64).sum();
    let drift = sum - 10_000;
    if drift.abs() > 1 {
        let mut order: Vec<usize> = (0..slices.len()).collect();
        let excess = drift > 0;
        order.sort_by(|&a, &b| {
            let (ea, eb) = (slices[a].1, slices[b].1);
            let key = if excess { ea.cmp(&eb) } else { eb.cmp(&ea) };
            key.then(a.cmp(&b))
        });
        for &i in order.iter().take(drift.unsigned_abs() as usize - 1) {
            let s = &mut slices[i].0;
            if excess {
                s.percent_hundredths -= 1;
            } else {
                s.percent_hundredths += 1;
            }
        }
    }

    let mut slices: Vec<PieSlice> = slices.into_iter().map(|(s, _)| s).collect();
    slices.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.category.cmp(&b.category)));
    Ok(PieCounts { slices, dropped })
}

/// Quotes a CSV field only when it contains a comma, quote or line break.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut line = fields
        .into_iter()
        .map(|f| csv_field(f.as_ref()))
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

/// UTF-8, LF-terminated CSV with a header row.
pub trait CsvExport {
    fn to_csv(&self) -> String;

    fn write_csv<W: Write>(&self, mut out: W) -> Result<usize> {
        let text = self.to_csv();
        out.write_all(text.as_bytes())?;
        Ok(text.len())
    }
}

impl CsvExport for LineSeries {
    fn to_csv(&self) -> String {
        let mut out = csv_line(["group", "x", "count"]);
        for (group, points) in &self.groups {
            for (x, count) in points {
                out.push_str(&csv_line([group.clone(), x.to_string(), count.to_string()]));
            }
        }
        out
    }
}

impl CsvExport for AreaSeries {
    fn to_csv(&self) -> String {
        let mut out = csv_line(std::iter::once("index".to_string()).chain(self.columns.iter().cloned()));
        for (index, values) in &self.rows {
            out.push_str(&csv_line(
                std::iter::once(index.to_string()).chain(values.iter().map(Number::to_string)),
            ));
        }
        out
    }
}

impl CsvExport for PieCounts {
    fn to_csv(&self) -> String {
        let mut out = csv_line(["category", "count", "percent"]);
        for s in &self.slices {
            out.push_str(&csv_line([
                s.category.clone(),
                s.count.to_string(),
                format!("{}.{:02}", s.percent_hundredths / 100, s.percent_hundredths % 100),
            ]));
        }
        out
    }
}

impl CsvExport for ResultTable {
    fn to_csv(&self) -> String {
        let mut out = csv_line(&self.columns);
        for row in &self.rows {
            out.push_str(&csv_line(
                row.iter()
                    .map(|v| v.as_ref().map(|v| v.to_string()).unwrap_or_default()),
            ));
        }
        out
    }
}

pub fn label_color(label: Label) -> &'static str {
    match label {
        Label::Journal => "blue",
        Label::Author => "purple",
        Label::Article => "yellow",
        Label::Country => "red",
        Label::Institute => "lightblue",
        Label::Region => "green",
    }
}

fn dot_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out
}

/// DOT digraph of the nodes whose label is in `labels` and the relationships
/// whose type is in `rel_types` with both endpoints kept.
pub fn export_dot(graph: &PropertyGraph, labels: &[Label], rel_types: &[RelType]) -> String {
    let labels: BTreeSet<Label> = labels.iter().copied().collect();
    let rel_types: BTreeSet<RelType> = rel_types.iter().copied().collect();
    let mut out = String::from("digraph scigraph {\n");
    let mut kept = vec![false; graph.node_count()];
    for node in graph.nodes() {
        if labels.contains(&node.label) {
            kept[node.id.index()] = true;
            out.push_str(&format!(
                "  n{} [label=\"{}\", fillcolor=\"{}\", style=filled];\n",
                node.id.0,
                dot_escape(node.name()),
                label_color(node.label)
            ));
        }
    }
    for rel in graph.relationships() {
        if rel_types.contains(&rel.rel_type) && kept[rel.source.index()] && kept[rel.target.index()] {
            out.push_str(&format!(
                "  n{} -> n{} [label=\"{}\"];\n",
                rel.source.0, rel.target.0, rel.rel_type
            ));
        }
    }
    out.push_str("}\n");
    out
}
