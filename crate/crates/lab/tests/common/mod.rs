use std::fs;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

/// A finished `lab` invocation and its scratch directory.
pub struct Run {
    pub code: i32,
    pub stderr: String,
    pub dir: tempfile::TempDir,
}

impl Run {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join("out").join(name)
    }

    pub fn read(&self, name: &str) -> String {
        fs::read_to_string(self.path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
    }

    /// CSV records after the header row, comments dropped.
    pub fn rows(&self, name: &str) -> Vec<Vec<String>> {
        let body = timesq_lab::report::strip_comments(&self.read(name));
        let mut r = csv::Reader::from_reader(body.as_bytes());
        r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
    }

    pub fn summary(&self, sub: &str) -> Value {
        serde_json::from_str(&self.read(&format!("{sub}_summary.json"))).unwrap()
    }
}

/// Runs the `lab` binary on `config` with outputs in a fresh directory.
pub fn lab(sub: &str, config: &str, extra: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.toml");
    fs::write(&cfg, config).unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_lab"))
        .arg(sub)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .args(extra)
        .output()
        .unwrap();
    Run {
        code: output.status.code().expect("exit code"),
        stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
        dir,
    }
}
