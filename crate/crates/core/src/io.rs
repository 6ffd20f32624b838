//! Graph JSON and embedding CSV.
//!
//! Graph files look like `{"n": 3, "edges": [[1, 2, 1.5], [2, 3]], "s": [1, 1, 2]}`:
//! vertex ids are 1-based, `"s"` defaults to all ones and a missing third
//! edge entry means length 1. Embedding CSV has the header
//! `vertex,x1,...,xd` and one row per vertex, again 1-based.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    edges: Vec<Vec<serde_json::Number>>,
    s: Option<Vec<f64>>,
}

fn vertex_id(x: &serde_json::Number, n: usize) -> Result<usize> {
    match x.as_u64() {
        Some(v) if v >= 1 && (v as usize) <= n => Ok(v as usize - 1),
        _ => Err(Error::Parse(format!("vertex id {x} is not an integer in 1..={n}"))),
    }
}

/// Parses the graph JSON format (the graph must be connected).
pub fn graph_from_json(text: &str) -> Result<Graph> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    graph_from_value(file)
}

/// Parses a graph out of an already-decoded JSON value, such as the input
/// echo of an analysis report.
pub fn graph_from_json_value(value: &serde_json::Value) -> Result<Graph> {
    let file = GraphFile::deserialize(value).map_err(|e| Error::Parse(e.to_string()))?;
    graph_from_value(file)
}

fn graph_from_value(file: GraphFile) -> Result<Graph> {
    let n = file.n;
    let mut edges = Vec::with_capacity(file.edges.len());
    let mut lengths = Vec::with_capacity(file.edges.len());
    for e in &file.edges {
        if !(2..=3).contains(&e.len()) {
            return Err(Error::Parse(format!("edge entry needs 2 or 3 numbers, got {}", e.len())));
        }
        edges.push((vertex_id(&e[0], n)?, vertex_id(&e[1], n)?));
        let l = match e.get(2) {
            Some(x) => x.as_f64().ok_or_else(|| Error::Parse(format!("bad length {x}")))?,
            None => 1.0,
        };
        lengths.push(l);
    }
    let s = file.s.unwrap_or_else(|| vec![1.0; n]);
    Graph::new(n, &edges, s, lengths)
}

/// JSON value for `g` in the input format; always writes `s` and lengths.
pub fn graph_to_json_value(g: &Graph) -> serde_json::Value {
    let edges: Vec<serde_json::Value> = g
        .edges()
        .iter()
        .zip(g.lengths())
        .map(|(&(i, j), &l)| serde_json::json!([i + 1, j + 1, l]))
        .collect();
    serde_json::json!({ "n": g.n(), "edges": edges, "s": g.s() })
}

pub fn graph_to_json(g: &Graph) -> String {
    to_json_17(&graph_to_json_value(g)).expect("graph values are finite")
}

pub fn read_graph(path: &std::path::Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    graph_from_json(&text)
}

/// Writes every float as `d.dddddddddddddddde±x` (17 significant digits).
struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    // serde_json routes NaN and infinities here
    fn write_null<W: ?Sized + Write>(&mut self, _writer: &mut W) -> std::io::Result<()> {
        Err(std::io::Error::new(std::io::ErrorKind::InvalidData, "null or non-finite number in JSON output"))
    }
}

/// Compact JSON with fixed 17-significant-digit floats. Fails on anything
/// that would be written as `null`, which includes non-finite floats, so
/// optional fields must be skipped when absent.
pub fn to_json_17<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SeventeenDigits);
    value.serialize(&mut ser).map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

pub fn embedding_to_csv(v: &Embedding) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> =
        std::iter::once("vertex".to_string()).chain((1..=v.dim()).map(|c| format!("x{c}"))).collect();
    w.write_record(&header).expect("in-memory write");
    for (i, p) in v.coords().iter().enumerate() {
        let row: Vec<String> = std::iter::once((i + 1).to_string()).chain(p.iter().map(f64::to_string)).collect();
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv writes UTF-8")
}

pub fn embedding_from_csv(text: &str) -> Result<Embedding> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    let dim = header.len().saturating_sub(1);
    let expected: Vec<String> =
        std::iter::once("vertex".to_string()).chain((1..=dim).map(|c| format!("x{c}"))).collect();
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::Parse("header must be vertex,x1,...,xd".into()));
    }
    let mut coords = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.get(0) != Some((row + 1).to_string().as_str()) {
            return Err(Error::Parse(format!("row {} must be vertex {}", row + 1, row + 1)));
        }
        let p = rec
            .iter()
            .skip(1)
            .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{x:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        coords.push(p);
    }
    Embedding::new(coords)
}
