//! Spec files, vector CSVs and list arguments.

use crate::error::CliError;
use crate::output::InputHash;
use reachkit::ReachSpec;
use std::path::Path;

pub fn read_file(path: &Path, hash: &mut InputHash) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(&path.display().to_string(), e))?;
    hash.add(text.as_bytes());
    Ok(text)
}

pub fn read_spec(path: &Path, hash: &mut InputHash) -> Result<ReachSpec, CliError> {
    Ok(ReachSpec::from_json(&read_file(path, hash)?)?)
}

/// Rows of numbers; blank lines, `#` comments and a non-numeric first row
/// (a header) are skipped. Every row must have `width` entries.
pub fn parse_vectors(text: &str, width: usize, field: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rows = Vec::new();
    let mut first = true;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Result<Vec<f64>, _> = line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        let was_first = std::mem::replace(&mut first, false);
        let row = match cells {
            Ok(row) => row,
            Err(_) if was_first => continue,
            Err(e) => return Err(CliError::validation(field, format!("line {}: {e}", i + 1))),
        };
        if row.len() != width {
            return Err(CliError::validation(
                field,
                format!("line {}: expected {width} values, got {}", i + 1, row.len()),
            ));
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn parse_list<T: std::str::FromStr>(s: &str, field: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    let out: Vec<T> = s
        .split(',')
        .map(|c| c.trim().parse::<T>().map_err(|e| CliError::validation(field, format!("`{c}`: {e}"))))
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err(CliError::validation(field, "empty list"));
    }
    Ok(out)
}

/// `a:step:b` (inclusive, `a + k step`) or a comma-separated list.
pub fn parse_grid(s: &str, field: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [_] => parse_list(s, field),
        [a, step, b] => {
            let num = |x: &str| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::validation(field, format!("`{x}`: {e}")))
            };
            let (a, step, b) = (num(a)?, num(step)?, num(b)?);
            if !(step > 0.0 && a.is_finite() && b.is_finite()) || b < a {
                return Err(CliError::validation(field, format!("bad range `{s}`")));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            if n > 1_000_000 {
                return Err(CliError::validation(field, format!("range `{s}` has too many points")));
            }
            Ok((0..=n).map(|k| a + k as f64 * step).collect())
        }
        _ => Err(CliError::validation(field, format!("expected a:step:b or a list, got `{s}`"))),
    }
}
