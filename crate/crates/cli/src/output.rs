use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use radhydro::io::format_float;

/// Output directory of one command, created on the first write and
/// tracking the files written to it.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn new(root: &Path) -> Self {
        OutputDir { root: root.to_path_buf(), written: Vec::new() }
    }

    pub fn open(&mut self, name: &str) -> std::io::Result<BufWriter<File>> {
        fs::create_dir_all(&self.root)?;
        self.written.push(name.to_string());
        Ok(BufWriter::new(File::create(self.root.join(name))?))
    }

    pub fn json<S: Serialize>(&mut self, name: &str, value: &S) -> std::io::Result<()> {
        let mut w = self.open(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()
    }

    /// Writes a header row and numeric rows with 17 significant digits.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> std::io::Result<()> {
        let mut w = self.open(name)?;
        writeln!(w, "{}", header.join(","))?;
        for row in rows {
            writeln!(w, "{}", row.iter().map(|v| format_float(*v)).collect::<Vec<_>>().join(","))?;
        }
        w.flush()
    }

    pub fn files(&self) -> &[String] {
        &self.written
    }
}

#[derive(Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub version: &'a str,
    pub config_sha256: String,
    pub wall_time_seconds: f64,
    pub status: &'a str,
    pub outputs: &'a [String],
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
