//! Deterministic CSV/JSON writers. Every file opens with the config hash.

use crate::error::Result;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// A CSV file assembled in memory.
#[derive(Debug, Clone)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(config_hash: &str, command: &str, columns: &[&str]) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "# config_hash={config_hash}");
        let _ = writeln!(text, "# command={command}");
        let _ = writeln!(text, "{}", columns.join(","));
        Csv { text }
    }

    pub fn comment(&mut self, line: &str) {
        // comments belong above the column header, but appending keeps the
        // writer single-pass; readers skip every `#` line
        let _ = writeln!(self.text, "# {line}");
    }

    pub fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.text, "{}", fields.join(","));
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf> {
        write_file(dir, name, &self.text)
    }
}

pub fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    config_hash: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON with a leading `config_hash` key.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, config_hash: &str, body: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(&Stamped { config_hash, body })?;
    text.push('\n');
    write_file(dir, name, &text)
}
