//! Output directory handling: atomic writes and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::Result;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Writes through a temporary sibling and a rename, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub code_version: String,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub workers: usize,
    pub started_unix: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finished_unix: Option<f64>,
    /// `running`, `ok`, or the error that ended the run.
    pub status: String,
    pub outputs: Vec<String>,
}

/// An output directory with its manifest. The manifest is written when the
/// run starts and rewritten as results land.
pub struct RunDir {
    dir: PathBuf,
    pub manifest: RunManifest,
    plot: bool,
}

impl RunDir {
    pub fn create(
        dir: &Path,
        command: &str,
        config: serde_json::Value,
        seed: Option<u64>,
        workers: usize,
        plot: bool,
    ) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let manifest = RunManifest {
            command: command.to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            seed,
            workers,
            started_unix: now(),
            finished_unix: None,
            status: "running".into(),
            outputs: Vec::new(),
        };
        let run = Self { dir: dir.to_path_buf(), manifest, plot };
        run.save_manifest()?;
        Ok(run)
    }

    pub fn emit_plot_data(&self) -> bool {
        self.plot
    }

    fn save_manifest(&self) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.manifest)?;
        write_atomic(&self.dir.join(MANIFEST_FILE), text.as_bytes())
    }

    fn record(&mut self, name: &str) -> Result<()> {
        if !self.manifest.outputs.iter().any(|o| o == name) {
            self.manifest.outputs.push(name.to_string());
        }
        self.save_manifest()
    }

    /// Registers the file in the manifest, then writes it.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        self.record(name)?;
        write_atomic(&self.dir.join(name), contents.as_bytes())
    }

    /// A JSON report; the top-level object gains a `manifest` key.
    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut v = serde_json::to_value(value)?;
        if let serde_json::Value::Object(map) = &mut v {
            map.insert("manifest".into(), MANIFEST_FILE.into());
        }
        let mut text = serde_json::to_string_pretty(&v)?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn finish(&mut self, status: &str) -> Result<()> {
        self.manifest.finished_unix = Some(now());
        self.manifest.status = status.to_string();
        self.save_manifest()
    }
}
