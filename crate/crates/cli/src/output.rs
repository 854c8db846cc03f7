use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CSV_FORMAT: u32 = 1;
pub const JSON_FORMAT: u32 = 1;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Output directory plus the record of everything written to it.
pub struct Output {
    dir: PathBuf,
    hash: String,
    manifest: Value,
    files: Vec<(String, String)>,
}

impl Output {
    /// Create the directory and write an incomplete manifest right away.
    pub fn create(dir: &Path, hash: String, manifest: Value) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        let out = Self { dir: dir.to_path_buf(), hash, manifest, files: Vec::new() };
        out.write_manifest("incomplete")?;
        Ok(out)
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn write_raw(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        std::fs::write(self.dir.join(name), text)?;
        self.files.push((name.to_string(), sha256_hex(text.as_bytes())));
        Ok(())
    }

    /// CSV with two comment lines naming the tool and the manifest hash.
    /// `body` may carry further `#` lines before its column header.
    pub fn csv(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let text = format!("# polaritonic {VERSION} csv v{CSV_FORMAT}\n# manifest {}\n{body}", self.hash);
        self.write_raw(name, &text)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let wrapped = json!({ "manifest": self.hash, "format": JSON_FORMAT, "data": value });
        let text = serde_json::to_string_pretty(&wrapped)? + "\n";
        self.write_raw(name, &text)
    }

    /// Arbitrary text file; the caller embeds the hash itself.
    pub fn text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        self.write_raw(name, text)
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.manifest[key] = value;
    }

    fn write_manifest(&self, status: &str) -> Result<(), CliError> {
        let mut m = self.manifest.clone();
        m["status"] = json!(status);
        m["files"] = self.files.iter().map(|(n, h)| json!({ "name": n, "sha256": h })).collect();
        std::fs::write(self.dir.join("manifest.json"), serde_json::to_string_pretty(&m)? + "\n")?;
        Ok(())
    }

    pub fn finish(self) -> Result<PathBuf, CliError> {
        self.write_manifest("complete")?;
        Ok(self.dir.join("manifest.json"))
    }
}

/// Rows of numbers as CSV lines in a fixed format.
pub fn rows_csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.12e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Coupling as used in file names.
pub fn g_tag(g: f64) -> String {
    format!("g{g}")
}
