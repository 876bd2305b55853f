use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::frenet_engine::{FrenetApparatus, FrenetSpace};

use super::{CliError, Command};

/// Numeric table written as CSV with 17 significant digits.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
        w.write_record(&self.header).map_err(|e| CliError::io(path, e))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| format!("{x:.16e}")))
                .map_err(|e| CliError::io(path, e))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }
}

/// Pretty JSON with floats written to 17 significant digits.
#[derive(Default)]
struct FixedDigits(PrettyFormatter<'static>);

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + std::io::Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JobStatus {
    Success,
    Rejected,
}

/// Results of one job: a flat key/value map and named tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: Command,
    pub status: JobStatus,
    pub values: BTreeMap<String, Value>,
    pub tables: Vec<(String, CsvTable)>,
}

impl Report {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            status: JobStatus::Success,
            values: BTreeMap::new(),
            tables: Vec::new(),
        }
    }

    pub fn rejected(command: Command, reason: String) -> Self {
        let mut r = Self::new(command);
        r.reject(reason);
        r
    }

    pub fn reject(&mut self, reason: String) {
        self.status = JobStatus::Rejected;
        self.set("reason", reason);
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.values.insert(key.to_string(), value.into());
    }

    pub fn number(&self, key: &str) -> Option<f64> {
        self.values.get(key).and_then(Value::as_f64)
    }

    pub fn table(&mut self, name: &str, table: CsvTable) {
        self.tables.push((name.to_string(), table));
    }

    /// JSON text of the flat map with `command` and `status` added.
    pub fn json(&self) -> String {
        let mut map = self.values.clone();
        map.insert("command".into(), self.command.as_str().into());
        let status = match self.status {
            JobStatus::Success => "ok",
            JobStatus::Rejected => "rejected",
        };
        map.insert("status".into(), status.into());
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits::default());
        map.serialize(&mut ser).expect("string keys");
        let mut text = String::from_utf8(out).expect("utf-8");
        text.push('\n');
        text
    }
}

/// Writes `<command>.json` and every table as `<name>.csv` into `dir`.
pub fn emit_report(report: &Report, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    let json_path = dir.join(format!("{}.json", report.command.as_str()));
    std::fs::write(&json_path, report.json()).map_err(|e| CliError::io(&json_path, e))?;
    written.push(json_path);
    for (name, table) in &report.tables {
        let path = dir.join(format!("{name}.csv"));
        table.write(&path)?;
        written.push(path);
    }
    Ok(written)
}

fn frame_names(space: FrenetSpace) -> &'static [&'static str] {
    match space {
        FrenetSpace::E12 => &["t", "n"],
        FrenetSpace::E13 => &["t", "n", "b"],
        FrenetSpace::E24 => &["t", "n1", "n2", "n3"],
    }
}

/// `s`, frame vector components and curvatures, one row per sample.
pub fn apparatus_table(app: &FrenetApparatus) -> CsvTable {
    let space = app.space();
    let dim = space.dimension();
    let mut header = vec!["s".to_string()];
    for name in frame_names(space) {
        header.extend((0..dim).map(|i| format!("{name}_{i}")));
    }
    header.extend((1..=space.curvature_count()).map(|i| format!("k{i}")));
    let mut table = CsvTable::new(header);
    for sample in app.samples() {
        let mut row = vec![sample.s];
        for v in sample.frame.vectors() {
            row.extend(v.iter().copied());
        }
        row.extend(sample.curvatures.iter().copied());
        table.push(row);
    }
    table
}
