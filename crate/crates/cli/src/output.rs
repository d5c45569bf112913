//! Output plumbing: provenance header, number formatting and atomic writes.

use crate::error::CliError;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// SHA-256 over the input files and the argument vector.
#[derive(Default)]
pub struct InputHash(Sha256);

impl InputHash {
    pub fn add(&mut self, bytes: &[u8]) {
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
    }

    pub fn hex(self) -> String {
        self.0.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Round-trip decimal with 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(hash: &str, columns: &[String]) -> Self {
        let mut buf = format!("# reachkit {VERSION} input-sha256 {hash}\n");
        buf.push_str(&columns.join(","));
        buf.push('\n');
        Self { buf }
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        let cells: Vec<String> = cells.into_iter().collect();
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

pub fn columns(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Prepends a `reachkit` metadata object to a JSON document.
pub fn json_with_header(hash: &str, body: Value) -> String {
    let mut out = Map::new();
    out.insert(
        "reachkit".into(),
        serde_json::json!({ "version": VERSION, "input_sha256": hash }),
    );
    match body {
        Value::Object(fields) => out.extend(fields),
        other => {
            out.insert("result".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(out)).expect("json serializes");
    s.push('\n');
    s
}

/// Writes `text` to `path` through a sibling temporary file and a rename,
/// or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(text.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| CliError::io("stdout", e));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir.display().to_string(), e))?;
    tmp.write_all(text.as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| CliError::io(&path.display().to_string(), e))?;
    tmp.persist(path)
        .map_err(|e| CliError::io(&path.display().to_string(), e.error))?;
    Ok(())
}
