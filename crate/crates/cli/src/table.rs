//! CSV input and atomic file output.
//!
//! Covariates are the columns `x1..xd`, the response is `y`. Other columns
//! (for example `z_true` or `prediction`) are carried along but never read
//! by fitting.

use crate::error::{CliError, CliResult};
use copreg_core::Dataset;
use std::io::Write as _;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> CliResult<Self> {
        let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| csv_error(path, e))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| csv_error(path, e))?;
            rows.push(rec.iter().map(str::to_string).collect());
        }
        Ok(Self { headers, rows })
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn numeric_column(&self, name: &str) -> CliResult<Vec<f64>> {
        let j = self
            .position(name)
            .ok_or_else(|| CliError::Usage(format!("missing column `{name}`")))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| parse_cell(&r[j], name, i))
            .collect()
    }

    /// Number of covariates, from the `x1..xd` headers.
    pub fn dim(&self) -> CliResult<usize> {
        let mut idx: Vec<usize> = self
            .headers
            .iter()
            .filter_map(|h| h.strip_prefix('x').and_then(|k| k.parse::<usize>().ok()))
            .collect();
        idx.sort_unstable();
        if idx.is_empty() {
            return Err(CliError::Usage("no covariate columns (expected x1..xd)".into()));
        }
        if idx.iter().enumerate().any(|(i, &k)| k != i + 1) {
            return Err(CliError::Usage(format!(
                "covariate columns must be x1..x{} without gaps or repeats",
                idx.len()
            )));
        }
        Ok(idx.len())
    }

    pub fn covariates(&self) -> CliResult<Vec<Vec<f64>>> {
        let d = self.dim()?;
        let cols = (1..=d)
            .map(|j| self.numeric_column(&format!("x{j}")))
            .collect::<CliResult<Vec<_>>>()?;
        Ok((0..self.rows.len()).map(|i| cols.iter().map(|c| c[i]).collect()).collect())
    }

    pub fn dataset(&self) -> CliResult<Dataset> {
        let x = self.covariates()?;
        let y = self.numeric_column("y")?;
        Ok(Dataset::new(x, y)?)
    }
}

fn parse_cell(cell: &str, column: &str, row: usize) -> CliResult<f64> {
    let v: f64 = cell
        .parse()
        .map_err(|_| CliError::Usage(format!("column `{column}`, row {}: `{cell}` is not a number", row + 1)))?;
    if !v.is_finite() {
        return Err(CliError::Usage(format!("column `{column}`, row {}: non-finite value", row + 1)));
    }
    Ok(v)
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    if e.is_io_error() {
        CliError::io(path, e)
    } else {
        CliError::Usage(format!("{}: {e}", path.display()))
    }
}

pub fn to_csv(headers: &[String], rows: &[Vec<String>]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(headers).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// To `path` atomically, or to stdout.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(headers: &[&str]) -> Table {
        Table {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: vec![],
        }
    }

    #[test]
    fn covariate_headers_must_be_contiguous() {
        assert_eq!(table(&["x2", "x1", "y"]).dim().unwrap(), 2);
        assert!(table(&["x1", "x3", "y"]).dim().is_err());
        assert!(table(&["y"]).dim().is_err());
    }

    #[test]
    fn bad_cells_are_usage_errors() {
        let t = Table {
            headers: vec!["x1".into(), "y".into()],
            rows: vec![vec!["1".into(), "NaN".into()]],
        };
        assert_eq!(t.dataset().unwrap_err().code(), 2);
    }
}
