//! File formats: edge lists, signal tables, dense matrices, spectral fields
//! and long-format reports.
//!
//! Numbers are written with 17 significant digits so that files re-read to the
//! same bits. Complex entries use the literal `re+imj` (`re-imj`); an entry
//! with zero imaginary part is written as a plain real number.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph, Graph};
use crate::scalar::{CMatrix, Complex};
use crate::signal::MultivariateGraphSignal;
use crate::spectral::SpectralMatrixField;

pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_complex(z: Complex<f64>) -> String {
    if z.im == 0.0 {
        return format_real(z.re);
    }
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}j", format_real(z.re), sign, format_real(z.im.abs()))
}

/// Parses `a`, `a+bj`, `a-bj`, `bj` (also with `i` as the imaginary unit).
pub fn parse_complex(s: &str) -> Result<Complex<f64>> {
    let t = s.trim();
    let bad = || Error::Parse(format!("invalid number '{t}'"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['j', 'i']) else {
        return t.parse::<f64>().map(|re| Complex::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "+" | "" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.trim_start_matches('+').parse().map_err(|_| bad())?;
    Ok(Complex::new(re, im))
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r)
}

/// Reads an edge list with header `src,dst,weight`. The node count is
/// `node_count` when given, otherwise one more than the largest index.
pub fn read_edges<R: Read>(r: R, node_count: Option<usize>, directed: bool) -> Result<Graph<f64>> {
    let mut rdr = csv_reader(r);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("edge file lacks column '{name}'")))
    };
    let (s, d, w) = (col("src")?, col("dst")?, col("weight")?);
    let mut edges = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |k: usize| rec.get(k).ok_or_else(|| Error::Parse(format!("edge row {}: missing field", line + 1)));
        let src: usize = field(s)?.parse().map_err(|_| Error::Parse(format!("edge row {}: bad src", line + 1)))?;
        let dst: usize = field(d)?.parse().map_err(|_| Error::Parse(format!("edge row {}: bad dst", line + 1)))?;
        let weight: f64 = field(w)?.parse().map_err(|_| Error::Parse(format!("edge row {}: bad weight", line + 1)))?;
        edges.push((src, dst, weight));
    }
    let n = node_count.unwrap_or_else(|| edges.iter().map(|&(a, b, _)| a.max(b) + 1).max().unwrap_or(0));
    build_graph(edges, n, directed)
}

pub fn read_edges_file(path: &Path, node_count: Option<usize>, directed: bool) -> Result<Graph<f64>> {
    read_edges(open(path)?, node_count, directed)
}

pub fn write_edges<W: Write>(w: W, g: &Graph<f64>) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["src", "dst", "weight"])?;
    for e in g.edges() {
        wr.write_record([e.source.to_string(), e.target.to_string(), format_real(e.weight)])?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads a signal table with header `node,realization,<labels…>`.
pub fn read_signal<R: Read>(r: R) -> Result<MultivariateGraphSignal<f64>> {
    let mut rdr = csv_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.len() < 3 || &headers[0] != "node" || &headers[1] != "realization" {
        return Err(Error::Parse("signal file must start with columns 'node,realization'".into()));
    }
    let labels: Vec<String> = headers.iter().skip(2).map(str::to_string).collect();
    let d = labels.len();
    let mut cells: BTreeMap<(usize, usize), Vec<Complex<f64>>> = BTreeMap::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != d + 2 {
            return Err(Error::Parse(format!("signal row {}: expected {} fields, found {}", line + 1, d + 2, rec.len())));
        }
        let node: usize = rec[0].parse().map_err(|_| Error::Parse(format!("signal row {}: bad node", line + 1)))?;
        let m: usize = rec[1].parse().map_err(|_| Error::Parse(format!("signal row {}: bad realization", line + 1)))?;
        let vals = rec.iter().skip(2).map(parse_complex).collect::<Result<Vec<_>>>()?;
        if cells.insert((m, node), vals).is_some() {
            return Err(Error::Parse(format!("signal row {}: duplicate (node {node}, realization {m})", line + 1)));
        }
    }
    let reals = cells.keys().map(|k| k.0).max().map_or(0, |m| m + 1);
    let nodes = cells.keys().map(|k| k.1).max().map_or(0, |v| v + 1);
    if cells.len() != reals * nodes {
        return Err(Error::Parse(format!(
            "signal table is incomplete: {} rows for {nodes} nodes × {reals} realizations",
            cells.len()
        )));
    }
    let mut out = vec![CMatrix::<f64>::zeros(nodes, d); reals];
    for ((m, node), vals) in cells {
        for (j, v) in vals.into_iter().enumerate() {
            out[m][(node, j)] = v;
        }
    }
    MultivariateGraphSignal::new(out, Some(labels))
}

pub fn read_signal_file(path: &Path) -> Result<MultivariateGraphSignal<f64>> {
    read_signal(open(path)?)
}

pub fn write_signal<W: Write>(w: W, x: &MultivariateGraphSignal<f64>) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let mut header = vec!["node".to_string(), "realization".to_string()];
    header.extend(x.labels().iter().cloned());
    wr.write_record(&header)?;
    for (m, r) in x.realizations().iter().enumerate() {
        for i in 0..x.nodes() {
            let mut row = vec![i.to_string(), m.to_string()];
            row.extend(r.row(i).iter().map(|z| format_complex(*z)));
            wr.write_record(&row)?;
        }
    }
    wr.flush()?;
    Ok(())
}

/// Reads a headerless dense matrix of (possibly complex) entries.
pub fn read_matrix<R: Read>(r: R) -> Result<CMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(r);
    let mut rows: Vec<Vec<Complex<f64>>> = Vec::new();
    for rec in rdr.records() {
        rows.push(rec?.iter().map(parse_complex).collect::<Result<Vec<_>>>()?);
    }
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if nr == 0 || rows.iter().any(|r| r.len() != nc) {
        return Err(Error::Parse("matrix file must be a non-empty rectangular table".into()));
    }
    Ok(CMatrix::from_fn(nr, nc, |i, j| rows[i][j]))
}

pub fn read_matrix_file(path: &Path) -> Result<CMatrix<f64>> {
    read_matrix(open(path)?)
}

pub fn write_matrix<W: Write>(w: W, m: &CMatrix<f64>) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for i in 0..m.nrows() {
        wr.write_record(m.row(i).iter().map(|z| format_complex(*z)))?;
    }
    wr.flush()?;
    Ok(())
}

/// Complex matrix as nested `[[re, im], …]` rows.
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMatrix<f64>) -> JsonMatrix {
    (0..m.nrows()).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
}

pub fn matrix_from_json(rows: &JsonMatrix) -> Result<CMatrix<f64>> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != nc) {
        return Err(Error::Parse("ragged matrix in JSON".into()));
    }
    Ok(CMatrix::from_fn(nr, nc, |i, j| Complex::new(rows[i][j][0], rows[i][j][1])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldJson {
    pub p: usize,
    pub q: usize,
    pub frequencies: Vec<[f64; 2]>,
    pub p_x: Vec<JsonMatrix>,
    pub p_y: Vec<JsonMatrix>,
    pub p_xy: Vec<JsonMatrix>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl FieldJson {
    pub fn from_field(f: &SpectralMatrixField<f64>) -> Self {
        let n = f.len();
        FieldJson {
            p: f.p(),
            q: f.q(),
            frequencies: f.frequencies().iter().map(|z| [z.re, z.im]).collect(),
            p_x: (0..n).map(|l| matrix_to_json(f.p_x(l))).collect(),
            p_y: (0..n).map(|l| matrix_to_json(f.p_y(l))).collect(),
            p_xy: (0..n).map(|l| matrix_to_json(f.p_xy(l))).collect(),
            warnings: f.warnings().to_vec(),
        }
    }

    pub fn to_field(&self) -> Result<SpectralMatrixField<f64>> {
        let conv = |v: &[JsonMatrix]| v.iter().map(matrix_from_json).collect::<Result<Vec<_>>>();
        SpectralMatrixField::new(
            self.frequencies.iter().map(|z| Complex::new(z[0], z[1])).collect(),
            conv(&self.p_x)?,
            conv(&self.p_y)?,
            conv(&self.p_xy)?,
        )
    }
}

pub fn write_field<W: Write>(w: W, f: &SpectralMatrixField<f64>) -> Result<()> {
    serde_json::to_writer_pretty(w, &FieldJson::from_field(f))?;
    Ok(())
}

pub fn read_field<R: Read>(r: R) -> Result<SpectralMatrixField<f64>> {
    let j: FieldJson = serde_json::from_reader(r)?;
    j.to_field()
}

/// One line of the long-format report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub component: usize,
    pub channel: String,
    pub frequency_index: usize,
    pub lambda: Complex<f64>,
    pub quantity: String,
    pub value: f64,
}

pub const REPORT_HEADER: [&str; 6] = ["component", "channel", "frequency_index", "lambda", "quantity", "value"];

pub fn write_report<W: Write>(w: W, rows: &[ReportRow]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(REPORT_HEADER)?;
    for r in rows {
        wr.write_record([
            r.component.to_string(),
            r.channel.clone(),
            r.frequency_index.to_string(),
            format_complex(r.lambda),
            r.quantity.clone(),
            format_real(r.value),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

fn open(path: &Path) -> Result<std::io::BufReader<std::fs::File>> {
    std::fs::File::open(path)
        .map(std::io::BufReader::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals_round_trip() {
        for z in [
            Complex::new(1.5, 0.0),
            Complex::new(-2.0e-7, 3.25),
            Complex::new(0.1, -1.0e-300),
            Complex::new(f64::MAX, f64::MIN_POSITIVE),
        ] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
        assert_eq!(parse_complex("2j").unwrap(), Complex::new(0.0, 2.0));
        assert_eq!(parse_complex("1e-3-2.5e+2j").unwrap(), Complex::new(1e-3, -250.0));
        assert_eq!(format_complex(Complex::new(1.0, 0.0)), "1.0000000000000000e0");
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn signal_round_trip() {
        let r0 = CMatrix::from_fn(3, 2, |i, j| Complex::new(i as f64 * 0.1 + j as f64, 0.0));
        let r1 = CMatrix::from_fn(3, 2, |i, j| Complex::new(-(i as f64), j as f64 * 0.3));
        let x = MultivariateGraphSignal::new(vec![r0, r1], Some(vec!["a".into(), "b".into()])).unwrap();
        let mut buf = Vec::new();
        write_signal(&mut buf, &x).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("node,realization,a,b\n"));
        assert_eq!(read_signal(buf.as_slice()).unwrap(), x);
    }

    #[test]
    fn incomplete_signal_rejected() {
        let text = "node,realization,a\n0,0,1\n1,0,2\n0,1,3\n";
        assert!(matches!(read_signal(text.as_bytes()), Err(Error::Parse(_))));
    }

    #[test]
    fn edges_round_trip() {
        let g = build_graph([(0, 1, 0.5), (1, 2, 2.0)], 3, false).unwrap();
        let mut buf = Vec::new();
        write_edges(&mut buf, &g).unwrap();
        assert_eq!(read_edges(buf.as_slice(), None, false).unwrap(), g);
    }
}
