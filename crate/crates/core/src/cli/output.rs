use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ExperimentConfig, Format, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectra::{histogram, AtomicMeasure};

pub const CSV_HEADER: &str = "# checkerboard-rmt v1";
pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => (*v).into(),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(serde_json::Value::Null, Into::into),
            Cell::Text(s) => s.clone().into(),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.rows.len() + 2));
        out.push_str(CSV_HEADER);
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<serde_json::Value>> =
            self.rows.iter().map(|r| r.iter().map(Cell::json).collect()).collect();
        let doc = serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }
}

/// Files produced by a run, held in memory until the run has succeeded.
#[derive(Clone, Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, contents: impl Into<Vec<u8>>) {
        self.files.push((name.into(), contents.into()));
    }

    /// Adds `stem.csv` or `stem.json` depending on the format.
    pub fn table(&mut self, stem: &str, table: &Table, format: Format) {
        match format {
            Format::Csv => self.add(format!("{stem}.csv"), table.to_csv()),
            Format::Json => self.add(format!("{stem}.json"), table.to_json()),
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_slice())
    }

    /// Writes every file into `dir`. Files are staged under temporary names
    /// and renamed once all of them are written.
    pub fn commit(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let io = |what: &str, p: &Path, e: std::io::Error| Error::Io(format!("{what} {}: {e}", p.display()));
        fs::create_dir_all(dir).map_err(|e| io("cannot create", dir, e))?;
        let mut staged = Vec::with_capacity(self.files.len());
        for (name, contents) in &self.files {
            let tmp = dir.join(format!(".{name}.partial"));
            if let Err(e) = fs::write(&tmp, contents) {
                for (t, _) in &staged {
                    let _ = fs::remove_file(t);
                }
                let _ = fs::remove_file(&tmp);
                return Err(io("cannot write", &tmp, e));
            }
            staged.push((tmp, dir.join(name)));
        }
        let mut written = Vec::with_capacity(staged.len());
        for (tmp, dst) in staged {
            fs::rename(&tmp, &dst).map_err(|e| io("cannot rename", &tmp, e))?;
            written.push(dst);
        }
        Ok(written)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    tool_version: &'static str,
    #[serde(flatten)]
    config: &'a ExperimentConfig,
}

pub fn manifest(config: &ExperimentConfig) -> String {
    let m = Manifest {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        config,
    };
    let mut s = serde_json::to_string_pretty(&m).expect("manifest serializes");
    s.push('\n');
    s
}

/// Histogram CSV plus a gnuplot script that renders it.
pub fn emit_histogram_bundle<T: Real>(
    artifacts: &mut Artifacts,
    stem: &str,
    measure: &AtomicMeasure<T>,
    config: &ExperimentConfig,
    range: Option<(f64, f64)>,
    xlabel: &str,
) -> Result<()> {
    let h = histogram(measure, config.bins, range)?;
    let mut t = Table::new(&["lo", "hi", "center", "density"]);
    for b in &h.bins {
        t.push(vec![b.lo.into(), b.hi.into(), (0.5 * (b.lo + b.hi)).into(), b.density.into()]);
    }
    let csv = format!("{stem}_histogram.csv");
    artifacts.add(csv.clone(), t.to_csv());
    let width = h.bins.first().map_or(1.0, |b| b.hi - b.lo);
    let mut gp = String::new();
    let _ = writeln!(gp, "# {}", measure.note());
    let _ = writeln!(
        gp,
        "# {} N={} k={} w={} algebra={} seed={}",
        config.command.as_str(),
        config.dimension,
        config.k,
        config.w,
        config.algebra,
        config.seed
    );
    gp.push_str("set datafile separator \",\"\n");
    gp.push_str("set style fill solid 0.5 border -1\n");
    let _ = writeln!(gp, "set boxwidth {width} absolute");
    let _ = writeln!(gp, "set xlabel \"{xlabel}\"");
    gp.push_str("set ylabel \"density\"\n");
    gp.push_str("set terminal pngcairo size 900,600\n");
    let _ = writeln!(gp, "set output \"{stem}_histogram.png\"");
    let _ = writeln!(gp, "plot \"{csv}\" skip 2 using 3:4 with boxes notitle");
    artifacts.add(format!("{stem}_histogram.gp"), gp);
    Ok(())
}
