//! Result files and the JSON run manifest.

use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub struct Output {
    command: String,
    dir: Option<PathBuf>,
    config: Value,
    results: Map<String, Value>,
    timings: Map<String, Value>,
    files: Vec<(String, String)>,
}

impl Output {
    pub fn new(command: &str, dir: &Option<PathBuf>) -> Self {
        Output {
            command: command.to_string(),
            dir: dir.clone(),
            config: Value::Null,
            results: Map::new(),
            timings: Map::new(),
            files: Vec::new(),
        }
    }

    pub fn config(&mut self, config: Value) {
        self.config = config;
    }

    /// Merges the fields of `value` (or stores it under `data`).
    pub fn result(&mut self, value: Value) {
        match value {
            Value::Object(m) => self.results.extend(m),
            other => {
                self.results.insert("data".into(), other);
            }
        }
    }

    pub fn time<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.insert(label.to_string(), json!(start.elapsed().as_secs_f64()));
        out
    }

    pub fn csv(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn finish(self) -> anyhow::Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        std::fs::create_dir_all(dir)?;
        for (name, contents) in &self.files {
            std::fs::write(dir.join(name), contents)?;
        }
        let manifest = json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "argv": std::env::args().collect::<Vec<_>>(),
            "config": self.config,
            "results": self.results,
            "timings_s": self.timings,
            "files": self.files.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>(),
            "external_solver": std::env::var(nsmac_lp::EXTERNAL_SOLVER_ENV).ok(),
        });
        write_json(&dir.join("manifest.json"), &manifest)
    }
}

fn write_json(path: &Path, v: &Value) -> anyhow::Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(v)? + "\n")?;
    Ok(())
}
