//! Benchmark cases on disk.
//!
//! A case is a directory holding `rows.csv` and optionally `examples.csv`,
//! both with a `source,target` header. A benchmark root holds one case
//! directory per case; anything else in it is ignored.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use celljoin_core::ExamplePair;

pub const ROWS_FILE: &str = "rows.csv";
pub const EXAMPLES_FILE: &str = "examples.csv";

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Format { path: PathBuf, line: u64, message: String },
    #[error("{}: no benchmark cases found", path.display())]
    EmptyRoot { path: PathBuf },
    #[error("{}: a case needs at least 2 rows, found {found}", path.display())]
    TooFewRows { path: PathBuf, found: usize },
}

impl DatasetError {
    fn format(path: &Path, line: u64, message: impl Into<String>) -> Self {
        DatasetError::Format { path: path.to_path_buf(), line, message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchmarkCase {
    pub name: String,
    /// Index-aligned source and target cells; `row_id` is the 0-based file order.
    pub rows: Vec<ExamplePair>,
    pub examples: Option<Vec<ExamplePair>>,
}

/// Reads a two-column `source,target` CSV file.
pub fn read_pairs(path: &Path) -> Result<Vec<ExamplePair>, DatasetError> {
    let file = fs::File::open(path).map_err(|source| DatasetError::Io { path: path.to_path_buf(), source })?;
    parse_pairs(file, path)
}

fn parse_pairs(input: impl io::Read, path: &Path) -> Result<Vec<ExamplePair>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input);
    let mut records = reader.records();

    let header = match records.next() {
        None => return Err(DatasetError::format(path, 1, "missing `source,target` header")),
        Some(r) => r.map_err(|e| csv_error(path, e))?,
    };
    let names: Vec<&str> = header.iter().map(|f| f.trim_start_matches('\u{feff}').trim()).collect();
    if names != ["source", "target"] {
        return Err(DatasetError::format(path, 1, "missing `source,target` header"));
    }

    let mut pairs = Vec::new();
    for record in records {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(DatasetError::format(path, line, format!("expected 2 fields, found {}", record.len())));
        }
        pairs.push(ExamplePair::new(pairs.len(), &record[0], &record[1]));
    }
    Ok(pairs)
}

fn csv_error(path: &Path, e: csv::Error) -> DatasetError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(source) => DatasetError::Io { path: path.to_path_buf(), source },
        csv::ErrorKind::Utf8 { err, .. } => DatasetError::format(path, line, format!("invalid UTF-8: {err}")),
        other => DatasetError::format(path, line, format!("{other:?}")),
    }
}

/// Loads a case directory, or a bare `rows.csv` file.
pub fn load_case(path: &Path) -> Result<BenchmarkCase, DatasetError> {
    let (dir, rows_path) = if path.is_dir() {
        (path.to_path_buf(), path.join(ROWS_FILE))
    } else {
        (path.parent().map(Path::to_path_buf).unwrap_or_default(), path.to_path_buf())
    };
    let rows = read_pairs(&rows_path)?;
    if rows.len() < 2 {
        return Err(DatasetError::TooFewRows { path: rows_path, found: rows.len() });
    }
    let examples_path = dir.join(EXAMPLES_FILE);
    let examples = if path.is_dir() && examples_path.is_file() { Some(read_pairs(&examples_path)?) } else { None };
    let name = if path.is_dir() { path } else { &dir };
    let name = name
        .canonicalize()
        .ok()
        .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_else(|| String::from("case"));
    Ok(BenchmarkCase { name, rows, examples })
}

/// Loads every case under a benchmark root, sorted by name.
///
/// A root that is itself a case directory yields that single case.
pub fn load_root(root: &Path) -> Result<Vec<BenchmarkCase>, DatasetError> {
    if root.join(ROWS_FILE).is_file() {
        return Ok(vec![load_case(root)?]);
    }
    let entries = fs::read_dir(root).map_err(|source| DatasetError::Io { path: root.to_path_buf(), source })?;
    let mut dirs = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| DatasetError::Io { path: root.to_path_buf(), source })?;
        let path = entry.path();
        if path.is_dir() && path.join(ROWS_FILE).is_file() {
            dirs.push(path);
        }
    }
    dirs.sort();
    if dirs.is_empty() {
        return Err(DatasetError::EmptyRoot { path: root.to_path_buf() });
    }
    dirs.iter().map(|d| load_case(d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Vec<ExamplePair>, DatasetError> {
        parse_pairs(text.as_bytes(), Path::new("rows.csv"))
    }

    fn line_of(e: DatasetError) -> u64 {
        match e {
            DatasetError::Format { line, .. } => line,
            other => panic!("expected a format error, got {other}"),
        }
    }

    #[test]
    fn rows_in_file_order() {
        let rows = parse("source,target\na,b\nc,d\ne,f\n").unwrap();
        assert_eq!(rows.iter().map(|r| r.row_id).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(rows[2], ExamplePair::new(2, "e", "f"));
    }

    #[test]
    fn quoted_fields() {
        let rows = parse("source,target\n\"hopper, grace\",\"say \"\"hi\"\"\"\n").unwrap();
        assert_eq!(rows, vec![ExamplePair::new(0, "hopper, grace", "say \"hi\"")]);
    }

    #[test]
    fn header_is_required() {
        assert_eq!(line_of(parse("a,b\nc,d\n").unwrap_err()), 1);
        assert_eq!(line_of(parse("").unwrap_err()), 1);
        assert_eq!(parse("\u{feff}source,target\na,b\n").unwrap().len(), 1);
    }

    #[test]
    fn malformed_rows_report_their_line() {
        assert_eq!(line_of(parse("source,target\na,b\nc\n").unwrap_err()), 3);
        assert_eq!(line_of(parse("source,target\na,b,c\n").unwrap_err()), 2);
    }

    #[test]
    fn invalid_utf8_is_a_format_error() {
        let bytes: &[u8] = b"source,target\na,\xff\n";
        assert_eq!(line_of(parse_pairs(bytes, Path::new("rows.csv")).unwrap_err()), 2);
    }
}
