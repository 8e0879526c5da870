use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::CliError;
use crate::report::{format_float, RunReport};

/// Output directory whose files appear only once fully written.
pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(Output { dir: dir.to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes to a temporary file in the same directory, then renames it.
    pub fn write_atomic(&self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let mut tmp = NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.dir.join(name)).map_err(|e| CliError::Io(e.error))?;
        Ok(())
    }

    /// Writes a CSV table and lists it in the report.
    pub fn write_csv(&self, report: &mut RunReport, name: &str, table: &Table) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        self.write_atomic(name, &bytes)?;
        report.add_file(name);
        Ok(())
    }
}

/// A CSV table with cells already formatted.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(i64::try_from(v).expect("indices fit in i64"))
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width matches the header");
        self.rows.push(
            row.into_iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Num(v) => format_float(v).replace("null", "nan"),
                    Cell::Text(s) => s,
                })
                .collect(),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn files_land_complete() {
        let dir = tempfile::tempdir().unwrap();
        let out = Output::create(&dir.path().join("nested")).unwrap();
        let mut report = RunReport::new("demo", 0);
        let mut t = Table::new(&["k", "name", "value"]);
        t.push(vec![1usize.into(), "a,b".into(), 0.5.into()]);
        out.write_csv(&mut report, "t.csv", &t).unwrap();
        let text = std::fs::read_to_string(out.dir().join("t.csv")).unwrap();
        assert_eq!(text, "k,name,value\n1,\"a,b\",5.0000000000000000e-1\n");
        // only the final file remains
        assert_eq!(std::fs::read_dir(out.dir()).unwrap().count(), 1);
    }
}
