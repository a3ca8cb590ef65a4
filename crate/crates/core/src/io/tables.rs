use std::collections::HashSet;
use std::path::Path;

use super::{read_text, write_text, IoError};
use crate::aggregation::{AggregateMeasure, AggregateRow, AggregationResult};
use crate::model::AlternativeId;
use crate::rules::{AlternativeRef, EvaluationTable, RankColumn};

const ATABLE_HEADER: [&str; 5] = ["id", "name", "borda", "simple_median", "averaged_rank_median"];

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Ranks with one decimal, columns in the table's order.
pub fn format_etable(etable: &EvaluationTable) -> String {
    let mut w = writer();
    let mut header = vec!["id".to_string(), "name".to_string()];
    header.extend(etable.columns().iter().map(|c| c.label.clone()));
    w.write_record(&header).expect("in-memory write");
    for (i, a) in etable.alternatives().iter().enumerate() {
        let mut rec = vec![a.id.to_string(), a.name.clone()];
        rec.extend(etable.row(i).iter().map(|v| format!("{v:.1}")));
        w.write_record(&rec).expect("in-memory write");
    }
    finish(w)
}

/// Aggregates with two decimals.
pub fn format_atable(atable: &AggregationResult) -> String {
    let mut w = writer();
    w.write_record(ATABLE_HEADER).expect("in-memory write");
    for r in &atable.rows {
        w.write_record([
            r.id.to_string(),
            r.name.clone(),
            format!("{:.2}", r.borda),
            format!("{:.2}", r.simple_median),
            format!("{:.2}", r.averaged_rank_median),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

pub fn save_etable(path: impl AsRef<Path>, etable: &EvaluationTable) -> Result<(), IoError> {
    write_text(path.as_ref(), &format_etable(etable))
}

pub fn save_atable(path: impl AsRef<Path>, atable: &AggregationResult) -> Result<(), IoError> {
    write_text(path.as_ref(), &format_atable(atable))
}

struct Rows {
    header: Vec<String>,
    ids: Vec<AlternativeId>,
    names: Vec<String>,
    values: Vec<Vec<f64>>,
}

fn parse_rows(text: &str, origin: &str) -> Result<Rows, IoError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> =
        reader.headers().map_err(|e| IoError::format(origin, e.to_string()))?.iter().map(String::from).collect();
    if header.len() < 3 || header[0] != "id" || header[1] != "name" {
        return Err(IoError::format(origin, "header must be `id,name,` followed by value columns"));
    }
    let mut rows = Rows { header, ids: Vec::new(), names: Vec::new(), values: Vec::new() };
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| IoError::format(origin, e.to_string()))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let cell_err = |column: &str, message: String| IoError::Cell { path: origin.into(), line, column: column.into(), message };
        if record.len() != rows.header.len() {
            return Err(cell_err("", format!("expected {} fields, found {}", rows.header.len(), record.len())));
        }
        let id: AlternativeId = record[0].parse().map_err(|_| cell_err("id", format!("`{}` is not an integer id", &record[0])))?;
        if !seen.insert(id) {
            return Err(IoError::Duplicate { path: origin.into(), what: "alternative", id: id.to_string() });
        }
        let mut vals = Vec::new();
        for (h, raw) in rows.header.iter().zip(record.iter()).skip(2) {
            let v: f64 = raw.parse().map_err(|_| cell_err(h, format!("`{raw}` is not a number")))?;
            if !v.is_finite() {
                return Err(cell_err(h, format!("`{raw}` is not finite")));
            }
            vals.push(v);
        }
        rows.ids.push(id);
        rows.names.push(record[1].to_string());
        rows.values.push(vals);
    }
    if rows.ids.is_empty() {
        return Err(IoError::format(origin, "table has no data rows"));
    }
    Ok(rows)
}

pub fn parse_etable(text: &str, origin: &str) -> Result<EvaluationTable, IoError> {
    let rows = parse_rows(text, origin)?;
    let alternatives =
        rows.ids.iter().zip(&rows.names).map(|(&id, name)| AlternativeRef { id, name: name.clone() }).collect();
    let columns = rows.header[2..]
        .iter()
        .enumerate()
        .map(|(j, label)| RankColumn { label: label.clone(), ranks: rows.values.iter().map(|r| r[j]).collect() })
        .collect();
    EvaluationTable::new(alternatives, columns).map_err(|e| IoError::format(origin, e.to_string()))
}

/// Rows keep their file order; the table is taken to be Borda-sorted.
pub fn parse_atable(text: &str, origin: &str) -> Result<AggregationResult, IoError> {
    let rows = parse_rows(text, origin)?;
    if rows.header != ATABLE_HEADER {
        return Err(IoError::format(origin, format!("header must be `{}`", ATABLE_HEADER.join(","))));
    }
    let rows = rows
        .ids
        .iter()
        .zip(rows.names)
        .zip(rows.values)
        .map(|((&id, name), v)| AggregateRow { id, name, borda: v[0], simple_median: v[1], averaged_rank_median: v[2] })
        .collect();
    Ok(AggregationResult { primary: AggregateMeasure::Borda, rows })
}

pub fn load_etable(path: impl AsRef<Path>) -> Result<EvaluationTable, IoError> {
    let path = path.as_ref();
    parse_etable(&read_text(path)?, &path.display().to_string())
}

pub fn load_atable(path: impl AsRef<Path>) -> Result<AggregationResult, IoError> {
    let path = path.as_ref();
    parse_atable(&read_text(path)?, &path.display().to_string())
}
