//! JSONL and file helpers. `None` or `-` means standard input / output.

use std::fs;
use std::io::{self, BufRead, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

fn is_stdio(path: Option<&Path>) -> bool {
    path.is_none_or(|p| p.as_os_str() == "-")
}

pub fn read_input(path: Option<&Path>) -> Result<String> {
    if is_stdio(path) {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        let path = path.expect("checked");
        fs::read_to_string(path).map_err(|e| CliError::data(e).context(path.display()))
    }
}

/// JSON objects, one per non-blank line.
pub fn read_objects(path: Option<&Path>) -> Result<Vec<Map<String, Value>>> {
    let text = read_input(path)?;
    let mut out = Vec::new();
    for (i, line) in text.as_bytes().lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Value>(&line) {
            Ok(Value::Object(m)) => out.push(m),
            Ok(_) => return Err(CliError::data(format!("line {}: expected a JSON object", i + 1))),
            Err(e) => return Err(CliError::data(format!("line {}: {e}", i + 1))),
        }
    }
    Ok(out)
}

pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    if is_stdio(path) {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        let path = path.expect("checked");
        let f = fs::File::create(path).map_err(|e| CliError::data(e).context(path.display()))?;
        Ok(Box::new(BufWriter::new(f)))
    }
}

pub fn write_jsonl<T: Serialize>(out: &mut dyn Write, rows: impl IntoIterator<Item = T>) -> Result<()> {
    for row in rows {
        serde_json::to_writer(&mut *out, &row)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn jsonl_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_jsonl(&mut buf, rows)?;
    Ok(buf)
}

pub fn pretty_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(CliError::internal)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::data(e).context(path.display()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn str_field<'a>(obj: &'a Map<String, Value>, key: &str, line: usize) -> Result<&'a str> {
    obj.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::data(format!("record {line}: missing string field {key:?}")))
}

pub fn ensure_dir(path: &Path) -> Result<PathBuf> {
    fs::create_dir_all(path).map_err(|e| CliError::config(e).context(path.display()))?;
    Ok(path.to_path_buf())
}
