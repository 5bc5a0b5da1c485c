//! Artifact writers and the run manifest.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::CliError;

/// Floats with 17 significant digits, `1.2345678901234567e-3`.
pub fn f17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Pretty JSON with fixed 17-significant-digit floats.
struct Fixed17<'a>(PrettyFormatter<'a>);

impl Formatter for Fixed17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        w.write_all(f17(v).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> std::io::Result<()> {
        self.write_f64(w, v as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(buf)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let d = Sha256::digest(bytes);
    d.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FileRecord {
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub precision: String,
    pub config: Config,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
    pub wall_time_s: f64,
    pub version: &'static str,
}

/// Tracks the artifacts of one run.
pub struct Session {
    pub config: Config,
    command: String,
    argv: Vec<String>,
    inputs: Vec<FileRecord>,
    outputs: Vec<FileRecord>,
    start: Instant,
}

impl Session {
    pub fn new(command: &str, config: Config) -> Self {
        Session {
            config,
            command: command.to_string(),
            argv: std::env::args().collect(),
            inputs: vec![],
            outputs: vec![],
            start: Instant::now(),
        }
    }

    /// `explicit`, or `default_name` inside the output directory.
    pub fn path(&self, explicit: Option<&Path>, default_name: &str) -> PathBuf {
        explicit
            .map(Path::to_path_buf)
            .unwrap_or_else(|| self.config.out_dir.join(default_name))
    }

    pub fn outputs(&self) -> &[FileRecord] {
        &self.outputs
    }

    /// Writes an artifact; the path `-` means standard output and is not
    /// recorded in the manifest.
    pub fn write_bytes(&mut self, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        if path == Path::new("-") {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(path, e))?;
            return Ok(());
        }
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))?;
        self.outputs.push(FileRecord {
            path: path.to_path_buf(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, path: &Path, value: &T) -> Result<(), CliError> {
        let bytes = to_json(value)?;
        self.write_bytes(path, &bytes)
    }

    /// CSV with a header row; `rows` are already formatted fields.
    pub fn write_csv(
        &mut self,
        path: &Path,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Arg(format!("csv buffer: {e}")))?;
        self.write_bytes(path, &bytes)
    }

    pub fn read_input(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.inputs.push(FileRecord {
            path: path.to_path_buf(),
            sha256: sha256_hex(&bytes),
            bytes: bytes.len() as u64,
        });
        Ok(bytes)
    }

    /// Writes `<command>.manifest.json` into the output directory.
    pub fn finish(self) -> Result<PathBuf, CliError> {
        let path = self
            .config
            .out_dir
            .join(format!("{}.manifest.json", self.command));
        let manifest = RunManifest {
            command: self.command,
            argv: self.argv,
            precision: self.config.precision.name().to_string(),
            config: self.config,
            inputs: self.inputs,
            outputs: self.outputs,
            wall_time_s: self.start.elapsed().as_secs_f64(),
            version: env!("CARGO_PKG_VERSION"),
        };
        let bytes = to_json(&manifest)?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}
