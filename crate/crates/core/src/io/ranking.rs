use std::path::Path;

use super::{read_text, IoError};
use crate::model::AlternativeId;

/// Reads an ordering, most preferred first.
///
/// Two layouts are accepted. A plain list holds ids separated by commas,
/// whitespace or newlines (`#` starts a comment). A CSV file with an `id`
/// header column gives its row order, or, when `by` names a column, the
/// ids sorted by that column descending with ties broken by ascending id.
/// That suits both A tables and E tables, whose larger ranks are better.
pub fn parse_ranking(text: &str, by: Option<&str>, origin: &str) -> Result<Vec<AlternativeId>, IoError> {
    let body: String = text.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join("\n");
    let first = body.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let is_csv = first.split(',').any(|f| f.trim() == "id");
    let ids = if is_csv {
        parse_csv(&body, by, origin)?
    } else {
        if by.is_some() {
            return Err(IoError::format(origin, "a column was requested but the file is a plain id list"));
        }
        body.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<AlternativeId>().map_err(|_| IoError::format(origin, format!("`{s}` is not an integer id"))))
            .collect::<Result<Vec<_>, _>>()?
    };
    if ids.is_empty() {
        return Err(IoError::format(origin, "ranking is empty"));
    }
    Ok(ids)
}

fn parse_csv(body: &str, by: Option<&str>, origin: &str) -> Result<Vec<AlternativeId>, IoError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(body.as_bytes());
    let headers = reader.headers().map_err(|e| IoError::format(origin, e.to_string()))?.clone();
    let id_col = headers.iter().position(|h| h == "id").expect("caller checked for an id column");
    let by_col = match by {
        Some(name) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| IoError::format(origin, format!("no column named `{name}`")))?,
        ),
        None => None,
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| IoError::format(origin, e.to_string()))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let id: AlternativeId = record[id_col].parse().map_err(|_| IoError::Cell {
            path: origin.into(),
            line,
            column: "id".into(),
            message: format!("`{}` is not an integer id", &record[id_col]),
        })?;
        let key = match by_col {
            Some(j) => record[j].parse::<f64>().map_err(|_| IoError::Cell {
                path: origin.into(),
                line,
                column: headers[j].to_string(),
                message: format!("`{}` is not a number", &record[j]),
            })?,
            None => 0.0,
        };
        rows.push((id, key));
    }
    if by_col.is_some() {
        rows.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    }
    Ok(rows.into_iter().map(|(id, _)| id).collect())
}

pub fn load_ranking(path: impl AsRef<Path>, by: Option<&str>) -> Result<Vec<AlternativeId>, IoError> {
    let path = path.as_ref();
    parse_ranking(&read_text(path)?, by, &path.display().to_string())
}
