//! CSV emission with `#` metadata headers, plus the per-run JSON manifest.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde_json::json;

use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct Output {
    dir: PathBuf,
    command: &'static str,
    seed: u64,
    config: serde_json::Value,
    files: Vec<String>,
}

impl Output {
    pub fn new(dir: &Path, command: &'static str, seed: u64, config: serde_json::Value) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command,
            seed,
            config,
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes `name` with the metadata header, a column line and one line
    /// per row.
    pub fn csv<I>(&mut self, name: &str, columns: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let path = self.dir.join(name);
        let mut w = BufWriter::new(fs::File::create(&path)?);
        writeln!(w, "# kicktop {VERSION}")?;
        writeln!(w, "# command: {}", self.command)?;
        writeln!(w, "# seed: {}", self.seed)?;
        writeln!(w, "# config: {}", self.config)?;
        writeln!(w, "{}", columns.join(","))?;
        for row in rows {
            debug_assert_eq!(row.len(), columns.len());
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Writes `manifest-<command>.json` and returns its path.
    pub fn finish(self, wall_time: Duration) -> Result<PathBuf> {
        let manifest = json!({
            "tool": "kicktop",
            "version": VERSION,
            "command": self.command,
            "seed": self.seed,
            "config": self.config,
            "files": self.files,
            "wall_time_seconds": wall_time.as_secs_f64(),
        });
        let path = self.dir.join(format!("manifest-{}.json", self.command));
        let text = serde_json::to_string_pretty(&manifest).expect("manifest is valid json");
        fs::write(&path, text + "\n")?;
        Ok(path)
    }
}

/// Round-trip formatting that stays readable: plain decimals in the usual
/// range, exponent form otherwise.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x == 0.0 || (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
