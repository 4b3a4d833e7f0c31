//! Output-directory layout and line-oriented record files.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};

pub const MANIFEST: &str = "manifest.json";
pub const CIRCUITS: &str = "circuits.jsonl";
pub const SHOTS: &str = "shots.jsonl";
pub const ESTIMATES: &str = "estimates.jsonl";
pub const ESTIMATES_CSV: &str = "estimates.csv";
pub const FITS: &str = "fits.json";
pub const REPORT: &str = "report.json";
pub const DECAY_CSV: &str = "decay.csv";
pub const ORACLE: &str = "oracle.json";

pub fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

/// Writes through a temporary file and renames, so readers never see a torn file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(HarnessError::io(parent))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(HarnessError::io(&tmp))?;
    fs::rename(&tmp, path).map_err(HarnessError::io(path))
}

pub fn write_lines<I, S>(path: &Path, lines: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut buf = String::new();
    for l in lines {
        buf.push_str(l.as_ref());
        buf.push('\n');
    }
    write_atomic(path, buf.as_bytes())
}

pub fn append_lines<I, S>(path: &Path, lines: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut buf = String::new();
    for l in lines {
        buf.push_str(l.as_ref());
        buf.push('\n');
    }
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(HarnessError::io(path))?;
    f.write_all(buf.as_bytes()).map_err(HarnessError::io(path))?;
    f.flush().map_err(HarnessError::io(path))
}

/// Complete lines of a record file. A trailing line without a newline is an
/// interrupted append; with `repair` it is cut off the file, otherwise it is an error.
pub fn read_lines(path: &Path, repair: bool) -> Result<Vec<String>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(HarnessError::io(path)(e)),
    };
    let complete = match text.rfind('\n') {
        Some(i) => i + 1,
        None => 0,
    };
    if complete < text.len() {
        if !repair {
            return Err(HarnessError::Data(format!("{}: truncated final record", path.display())));
        }
        let f = OpenOptions::new().write(true).open(path).map_err(HarnessError::io(path))?;
        f.set_len(complete as u64).map_err(HarnessError::io(path))?;
    }
    Ok(text[..complete]
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(str::to_owned)
        .collect())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(HarnessError::io(path))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
