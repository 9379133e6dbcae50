use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;

/// Writes each file through a temporary sibling that is renamed into place,
/// and prints one line per file written.
pub struct OutputDir {
    dir: PathBuf,
}

impl OutputDir {
    pub fn create(dir: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(OutputDir { dir: dir.to_path_buf() })
    }

    pub fn write(&self, name: &str, contents: &str, what: &str) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)
            .with_context(|| format!("cannot create a temporary file in {}", self.dir.display()))?;
        tmp.write_all(contents.as_bytes()).with_context(|| format!("cannot write {}", path.display()))?;
        tmp.persist(&path).with_context(|| format!("cannot move output into place at {}", path.display()))?;
        println!("wrote {} ({what})", path.display());
        Ok(())
    }
}

/// Builds a CSV document row by row.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
    rows: usize,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(header).expect("writing to memory");
        Table { writer, rows: 0 }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("writing to memory");
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn finish(self) -> String {
        String::from_utf8(self.writer.into_inner().expect("flushing to memory")).expect("CSV fields are UTF-8")
    }
}

/// A fraction rendered as a percentage with one decimal.
pub fn pct(v: f64) -> String {
    format!("{:.1}", v * 100.0)
}

pub fn fixed3(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.3}")).unwrap_or_default()
}

pub fn fixed2(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.2}")).unwrap_or_default()
}

pub fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}
