use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{fmt_score, read_text, write_text, IoError};
use crate::model::{AcsTable, Alternative, AlternativeId, Criterion, Provenance};

#[derive(Serialize, Deserialize)]
struct CriteriaFile {
    #[serde(default)]
    criterion: Vec<Criterion>,
}

/// `scores.csv` pairs with `scores.criteria.toml`.
pub fn sidecar_path(table_path: &Path) -> PathBuf {
    let stem = table_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    table_path.with_file_name(format!("{stem}.criteria.toml"))
}

pub fn parse_criteria_toml(text: &str, origin: &str) -> Result<Vec<Criterion>, IoError> {
    let file: CriteriaFile = toml::from_str(text).map_err(|e| IoError::format(origin, e.to_string()))?;
    let mut seen = HashSet::new();
    for c in &file.criterion {
        if !seen.insert(c.id.as_str()) {
            return Err(IoError::Duplicate { path: origin.into(), what: "criterion", id: c.id.clone() });
        }
        if c.scale_min.partial_cmp(&c.scale_max) != Some(std::cmp::Ordering::Less) {
            return Err(IoError::format(origin, format!("criterion `{}`: scale_min must be below scale_max", c.id)));
        }
    }
    Ok(file.criterion)
}

pub fn load_criteria(path: impl AsRef<Path>) -> Result<Vec<Criterion>, IoError> {
    let path = path.as_ref();
    parse_criteria_toml(&read_text(path)?, &path.display().to_string())
}

pub fn format_criteria_toml(criteria: &[Criterion]) -> String {
    toml::to_string(&CriteriaFile { criterion: criteria.to_vec() }).expect("criteria always serialize")
}

/// Parses `id,name,<criterion ids...>` rows against a criterion list.
///
/// Columns follow the header order; every listed criterion must appear
/// exactly once. Cells are checked against their criterion's scale.
pub fn parse_acs_csv(text: &str, criteria: &[Criterion], origin: &str) -> Result<AcsTable, IoError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| IoError::format(origin, e.to_string()))?.clone();
    if headers.len() < 3 || &headers[0] != "id" || &headers[1] != "name" {
        return Err(IoError::format(origin, "header must be `id,name,` followed by criterion ids"));
    }
    let mut columns = Vec::new();
    let mut seen = HashSet::new();
    for h in headers.iter().skip(2) {
        let c = criteria
            .iter()
            .find(|c| c.id == h)
            .ok_or_else(|| IoError::Cell { path: origin.into(), line: 1, column: h.into(), message: "unknown criterion".into() })?;
        if !seen.insert(h) {
            return Err(IoError::Duplicate { path: origin.into(), what: "criterion", id: h.into() });
        }
        columns.push(c.clone());
    }
    if let Some(missing) = criteria.iter().find(|c| !seen.contains(c.id.as_str())) {
        return Err(IoError::format(origin, format!("criterion `{}` has no column", missing.id)));
    }

    let mut alternatives = Vec::new();
    let mut scores = Vec::new();
    let mut ids = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| IoError::format(origin, e.to_string()))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let cell_err = |column: &str, message: String| IoError::Cell { path: origin.into(), line, column: column.into(), message };
        if record.len() != headers.len() {
            return Err(cell_err("", format!("expected {} fields, found {}", headers.len(), record.len())));
        }
        let id: AlternativeId = record[0].parse().map_err(|_| cell_err("id", format!("`{}` is not an integer id", &record[0])))?;
        if !ids.insert(id) {
            return Err(IoError::Duplicate { path: origin.into(), what: "alternative", id: id.to_string() });
        }
        let mut row = Vec::with_capacity(columns.len());
        for (c, raw) in columns.iter().zip(record.iter().skip(2)) {
            if raw.is_empty() {
                return Err(cell_err(&c.id, "missing cell".into()));
            }
            let v: f64 = raw.parse().map_err(|_| cell_err(&c.id, format!("`{raw}` is not a number")))?;
            if !v.is_finite() {
                return Err(cell_err(&c.id, format!("`{raw}` is not finite")));
            }
            if !c.in_scale(v) {
                return Err(cell_err(&c.id, format!("{v} is outside [{}, {}]", c.scale_min, c.scale_max)));
            }
            row.push(v);
        }
        alternatives.push(Alternative { id, name: record[1].to_string(), description: String::new() });
        scores.push(row);
    }
    if alternatives.is_empty() {
        return Err(IoError::format(origin, "table has no data rows"));
    }
    AcsTable::new(alternatives, columns, scores, Provenance::File).map_err(|source| IoError::Model { path: origin.into(), source })
}

/// Loads a table whose criteria live in the sidecar file next to it.
pub fn load_acs_csv(path: impl AsRef<Path>) -> Result<AcsTable, IoError> {
    let path = path.as_ref();
    let criteria = load_criteria(sidecar_path(path))?;
    load_acs_csv_with(path, &criteria)
}

pub fn load_acs_csv_with(path: impl AsRef<Path>, criteria: &[Criterion]) -> Result<AcsTable, IoError> {
    let path = path.as_ref();
    parse_acs_csv(&read_text(path)?, criteria, &path.display().to_string())
}

fn write_rows(
    alternatives: &[Alternative],
    criteria: &[Criterion],
    cells: impl Fn(usize, usize) -> Option<f64>,
) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec!["id".to_string(), "name".to_string()];
    header.extend(criteria.iter().map(|c| c.id.clone()));
    w.write_record(&header).expect("in-memory write");
    for (i, a) in alternatives.iter().enumerate() {
        let mut rec = vec![a.id.to_string(), a.name.clone()];
        rec.extend((0..criteria.len()).map(|j| cells(i, j).map(fmt_score).unwrap_or_default()));
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn format_acs_csv(table: &AcsTable) -> String {
    write_rows(table.alternatives(), table.criteria(), |i, j| Some(table.score(i, j)))
}

/// Writes the table and its criteria sidecar.
pub fn save_acs_csv(path: impl AsRef<Path>, table: &AcsTable) -> Result<(), IoError> {
    let path = path.as_ref();
    write_text(path, &format_acs_csv(table))?;
    write_text(&sidecar_path(path), &format_criteria_toml(table.criteria()))
}

/// A table with blank cells where no score exists yet.
pub fn format_partial_acs_csv(alternatives: &[Alternative], criteria: &[Criterion], scores: &[Vec<Option<f64>>]) -> String {
    write_rows(alternatives, criteria, |i, j| scores[i][j])
}

pub fn save_partial_acs_csv(
    path: impl AsRef<Path>,
    alternatives: &[Alternative],
    criteria: &[Criterion],
    scores: &[Vec<Option<f64>>],
) -> Result<(), IoError> {
    let path = path.as_ref();
    write_text(path, &format_partial_acs_csv(alternatives, criteria, scores))?;
    write_text(&sidecar_path(path), &format_criteria_toml(criteria))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn crits() -> Vec<Criterion> {
        vec![Criterion::new("a", "A", 0.0, 5.0), Criterion::new("b", "B", 0.0, 5.0)]
    }

    fn err(text: &str) -> String {
        parse_acs_csv(text, &crits(), "t.csv").unwrap_err().to_string()
    }

    #[test]
    fn cell_errors_carry_coordinates() {
        assert_eq!(err("id,name,a,b\n1,x,1.0,\n"), "t.csv, line 2, column `b`: missing cell");
        assert_eq!(err("id,name,a,b\n1,x,1.0,2.0\n2,y,abc,1\n"), "t.csv, line 3, column `a`: `abc` is not a number");
        assert_eq!(err("id,name,a,b\n1,x,1.0,7\n"), "t.csv, line 2, column `b`: 7 is outside [0, 5]");
        assert_eq!(err("id,name,a,z\n"), "t.csv, line 1, column `z`: unknown criterion");
        assert_eq!(err("id,name,a,b\n1,x,1,1\n1,y,2,2\n"), "t.csv: duplicate alternative id `1`");
        assert_eq!(err("id,name,a,b\n"), "t.csv: table has no data rows");
    }

    #[test]
    fn header_order_defines_columns() {
        let t = parse_acs_csv("id,name,b,a\n3,\"x, y\",1,2\n", &crits(), "t").unwrap();
        assert_eq!(t.criteria()[0].id, "b");
        assert_eq!(t.score(0, 1), 2.0);
        assert_eq!(format_acs_csv(&t), "id,name,b,a\n3,\"x, y\",1.0,2.0\n");
    }

    #[test]
    fn sidecar_naming() {
        assert_eq!(sidecar_path(Path::new("/d/scores.csv")), Path::new("/d/scores.criteria.toml"));
    }

    #[test]
    fn criteria_toml_round_trip() {
        let c = vec![Criterion::new("a", "A", 1.0, 10.0).with_prompt_text("p \"q\"\nline")];
        assert_eq!(parse_criteria_toml(&format_criteria_toml(&c), "x").unwrap(), c);
    }
}
