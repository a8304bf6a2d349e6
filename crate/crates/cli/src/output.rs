//! CSV and JSON encoders. Floats are written in shortest round-trip form so
//! both encodings carry the same values.

use serde::Serialize;
use serde_json::{Map, Number, Value};

use pdm_dirac::transform::Grid;
use pdm_dirac::{MorseParams, VerificationReport};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:?}"),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Serialize)]
struct GridDescriptor {
    coordinate: String,
    lo: f64,
    hi: f64,
    n: usize,
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, CliError> {
    w.into_inner()
        .map_err(|e| CliError::Encode(e.to_string()))
}

pub fn table_csv(table: &Table) -> Result<Vec<u8>, CliError> {
    let mut w = csv_writer();
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv))?;
    }
    finish(w)
}

pub fn table_json(table: &Table, params: &MorseParams, grid: &Grid) -> Result<Vec<u8>, CliError> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = table
                .columns
                .iter()
                .zip(row)
                .map(|(c, v)| (c.to_string(), v.json()))
                .collect();
            Value::Object(obj)
        })
        .collect();
    let grid = GridDescriptor {
        coordinate: grid.coordinate().to_string(),
        lo: grid.lo(),
        hi: grid.hi(),
        n: grid.len(),
    };
    let mut doc = Map::new();
    doc.insert("params".into(), serde_json::to_value(params)?);
    doc.insert("grid".into(), serde_json::to_value(grid)?);
    doc.insert("rows".into(), Value::Array(rows));
    pretty(&Value::Object(doc))
}

pub fn report_csv(report: &VerificationReport) -> Result<Vec<u8>, CliError> {
    let mut w = csv_writer();
    w.write_record(["name", "kind", "value", "tolerance", "passed", "detail"])?;
    for c in &report.checks {
        let kind = serde_json::to_value(c.kind)?;
        w.write_record([
            c.name.clone(),
            kind.as_str().unwrap_or_default().to_string(),
            format!("{:?}", c.value),
            c.tolerance.map(|t| format!("{t:?}")).unwrap_or_default(),
            c.passed.to_string(),
            c.detail.clone(),
        ])?;
    }
    finish(w)
}

pub fn report_json(report: &VerificationReport) -> Result<Vec<u8>, CliError> {
    pretty(&serde_json::to_value(report)?)
}

/// Inverse of [`report_json`].
pub fn parse_report(bytes: &[u8]) -> Result<VerificationReport, CliError> {
    Ok(serde_json::from_slice(bytes)?)
}

fn pretty(value: &Value) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pdm_dirac::transform::Coordinate;

    fn sample() -> Table {
        let mut t = Table::new(vec!["n", "ksq"]);
        t.push(vec![Cell::Int(0), Cell::Float(0.0)]);
        t.push(vec![Cell::Int(1), Cell::Float(0.4375)]);
        t.push(vec![Cell::Int(2), Cell::Float(-1.2770037714674666e-7)]);
        t
    }

    #[test]
    fn csv_layout() {
        let text = String::from_utf8(table_csv(&sample()).unwrap()).unwrap();
        assert_eq!(text, "n,ksq\n0,0.0\n1,0.4375\n2,-1.2770037714674666e-7\n");
    }

    #[test]
    fn json_layout() {
        let params = MorseParams::new(1.0, 1.0, 0.25).unwrap();
        let grid = Grid::new(Coordinate::T, -80.0, 10.0, 65).unwrap();
        let doc: Value = serde_json::from_slice(&table_json(&sample(), &params, &grid).unwrap()).unwrap();
        let keys: Vec<&str> = doc.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["params", "grid", "rows"]);
        assert_eq!(doc["rows"][2]["ksq"].as_f64(), Some(-1.2770037714674666e-7));
        assert_eq!(doc["grid"]["n"], 65);
    }
}
