//! CSV tables with provenance headers, JSON summaries and atomic writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::config::ExperimentConfig;
use crate::error::{exit, LabError, Result};

/// One CSV report: named columns and pre-formatted cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Table {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    /// The CSV body without header comments.
    pub fn body(&self) -> Result<String> {
        // Quote cells that start with `#` so no body line reads as a comment.
        let mut w = csv::WriterBuilder::new().comment(Some(b'#')).from_writer(Vec::new());
        let io = |e: csv::Error| LabError::Io(e.into());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv of utf-8 cells"))
    }

    pub fn file_name(&self, config: &ExperimentConfig) -> String {
        format!("{}_{}.csv", config.subcommand, self.name)
    }

    /// Header comments echoing the full config, then the body.
    pub fn render(&self, config: &ExperimentConfig) -> Result<String> {
        let mut out = provenance(config, &self.name);
        out.push_str(&self.body()?);
        Ok(out)
    }
}

fn provenance(config: &ExperimentConfig, report: &str) -> String {
    let mut out = format!("# lab {}\n# report: {report}\n# seed: {}\n# config:\n", config.subcommand, config.seed);
    for line in config.text.lines() {
        out.push_str("#   ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// Everything a subcommand produced. A `failure` still carries the tables
/// computed before it, and decides the exit code.
#[derive(Debug, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    pub results: Map<String, Value>,
    pub failure: Option<LabError>,
}

impl Report {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn insert(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }

    pub fn fail(&mut self, e: LabError) {
        self.failure.get_or_insert(e);
    }

    pub fn exit_code(&self) -> u8 {
        self.failure.as_ref().map_or(exit::SUCCESS, LabError::exit_code)
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| LabError::Io(e.error))?;
    Ok(())
}

/// Writes every table plus `<subcommand>_summary.json`; returns the paths.
pub fn write_outputs(dir: &Path, config: &ExperimentConfig, outcome: &Result<Report>) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut summary = Map::new();
    summary.insert("subcommand".into(), config.subcommand.name().into());
    summary.insert("seed".into(), config.seed.into());
    summary.insert("config".into(), config.text.clone().into());
    match outcome {
        Ok(report) => {
            let mut files = Vec::new();
            for table in &report.tables {
                let path = dir.join(table.file_name(config));
                write_atomic(&path, &table.render(config)?)?;
                files.push(Value::from(table.file_name(config)));
                written.push(path);
            }
            summary.insert("exit_code".into(), report.exit_code().into());
            match &report.failure {
                None => {
                    summary.insert("status".into(), "ok".into());
                }
                Some(e) => describe_failure(&mut summary, e),
            }
            summary.insert("files".into(), files.into());
            summary.insert("results".into(), Value::Object(report.results.clone()));
        }
        Err(e) => {
            summary.insert("exit_code".into(), e.exit_code().into());
            describe_failure(&mut summary, e);
        }
    }
    let path = dir.join(format!("{}_summary.json", config.subcommand));
    let mut text = serde_json::to_string_pretty(&Value::Object(summary)).expect("json values serialize");
    text.push('\n');
    write_atomic(&path, &text)?;
    written.push(path);
    Ok(written)
}

fn describe_failure(summary: &mut Map<String, Value>, e: &LabError) {
    let status = if e.exit_code() == exit::HYPOTHESIS { "hypothesis-violation" } else { "error" };
    summary.insert("status".into(), status.into());
    summary.insert("error".into(), e.to_string().into());
    if let Some(stage) = e.stage() {
        summary.insert("stage".into(), stage.label().into());
    }
}

/// Drops `#` comment lines, leaving the CSV body.
pub fn strip_comments(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Subcommand;

    fn config() -> ExperimentConfig {
        ExperimentConfig::parse(Subcommand::Orbit, "[orbit]\nx = \"1/7\"\nq = 3\nlength = 2\n", None).unwrap()
    }

    #[test]
    fn render_echoes_config_and_quotes_cells() {
        let mut t = Table::new("orbit", &["i", "spec"]);
        t.push(vec!["0".into(), "kind=geometric, c=2".into()]);
        let text = t.render(&config()).unwrap();
        assert!(text.starts_with("# lab orbit\n# report: orbit\n# seed: 0\n# config:\n#   [orbit]\n"));
        assert!(text.contains("#   x = \"1/7\"\n"));
        assert_eq!(strip_comments(&text), "i,spec\n0,\"kind=geometric, c=2\"\n");
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn ragged_rows_panic() {
        Table::new("t", &["a", "b"]).push(vec!["1".into()]);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
