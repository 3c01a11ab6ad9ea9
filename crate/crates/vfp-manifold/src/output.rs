//! Run artifacts: JSON with 17 significant digits, CSV files, run manifests
//! keyed by a configuration hash, and the worker-pool size.

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::error::Result;

/// Environment variable capping the worker pool used by sweeps.
pub const THREADS_ENV: &str = "VFP_NUM_THREADS";

/// Pretty JSON with every finite float written as `{:.16e}` (17 significant digits).
/// Non-finite floats are written as `null`.
pub struct Sig17Formatter {
    inner: PrettyFormatter<'static>,
}

impl Default for Sig17Formatter {
    fn default() -> Self {
        Sig17Formatter {
            inner: PrettyFormatter::with_indent(b"  "),
        }
    }
}

impl Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// Serializes `value` with [`Sig17Formatter`].
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17Formatter::default());
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Writes `value` as JSON (with a trailing newline) to `path`.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = to_json_string(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Formats a float for CSV: 17 significant digits, `'.'` decimal, `NaN`/`inf` spelled out.
pub fn csv_float(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else {
        value.to_string()
    }
}

/// Writes a CSV file with a header row.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// First 16 hex digits of the SHA-256 of the canonical JSON of `(command, parameters)`.
pub fn config_hash(command: &str, parameters: &serde_json::Value) -> String {
    let canonical = serde_json::json!({ "command": command, "parameters": parameters });
    let digest = Sha256::digest(canonical.to_string().as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Record of one command invocation.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub parameters: serde_json::Value,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
    pub tool_version: String,
}

/// Output directory for one command; files are named `<stem>-<hash>...`.
///
/// The manifest is written by [`RunDir::finish`], or on drop when a command
/// returns early with an error.
pub struct RunDir {
    dir: PathBuf,
    stem: String,
    command: String,
    hash: String,
    parameters: serde_json::Value,
    outputs: Vec<String>,
    started: std::time::Instant,
    finished: bool,
}

impl RunDir {
    pub fn create<P: Serialize>(dir: &Path, command: &str, parameters: &P) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let parameters = serde_json::to_value(parameters)?;
        let hash = config_hash(command, &parameters);
        Ok(RunDir {
            dir: dir.to_path_buf(),
            stem: command.replace(' ', "-"),
            command: command.to_string(),
            hash,
            parameters,
            outputs: Vec::new(),
            started: std::time::Instant::now(),
            finished: false,
        })
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Path `<dir>/<stem>-<hash><suffix>`, recorded as an output.
    pub fn output_path(&mut self, suffix: &str) -> PathBuf {
        let path = self.dir.join(format!("{}-{}{}", self.stem, self.hash, suffix));
        self.outputs.push(path.display().to_string());
        path
    }

    /// Writes `<stem>-<hash>-manifest.json` and returns the manifest.
    pub fn finish(mut self) -> Result<RunManifest> {
        self.finished = true;
        self.write_manifest()
    }

    fn write_manifest(&mut self) -> Result<RunManifest> {
        let path = self.output_path("-manifest.json");
        let manifest = RunManifest {
            command: self.command.clone(),
            config_hash: self.hash.clone(),
            parameters: self.parameters.clone(),
            outputs: self.outputs.clone(),
            wall_time_s: self.started.elapsed().as_secs_f64(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        };
        write_json(&path, &manifest)?;
        Ok(manifest)
    }
}

impl Drop for RunDir {
    fn drop(&mut self) {
        if !self.finished {
            let _ = self.write_manifest();
        }
    }
}

/// Sizes the global worker pool from `VFP_NUM_THREADS` when it is set to a positive integer.
/// Has no effect if the pool was already initialised.
pub fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
