//! Output directory handling: JSON-lines results, CSV mirrors, SVG charts.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use sausage_core::experiments::ResultRecord;

use crate::svg::Chart;

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<OutDir> {
        fs::create_dir_all(root)
            .with_context(|| format!("cannot create output directory {}", root.display()))?;
        Ok(OutDir {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_jsonl<T: Serialize>(&self, name: &str, records: &[T]) -> Result<PathBuf> {
        let mut text = String::new();
        for r in records {
            text.push_str(&serde_json::to_string(r)?);
            text.push('\n');
        }
        let path = self.path(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }

    pub fn write_result_csv(&self, name: &str, records: &[ResultRecord]) -> Result<PathBuf> {
        let mut text = String::from(ResultRecord::CSV_HEADER);
        text.push('\n');
        for r in records {
            text.push_str(&r.to_csv_row());
            text.push('\n');
        }
        let path = self.path(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }

    pub fn write_csv_rows(&self, name: &str, header: &str, rows: &[String]) -> Result<PathBuf> {
        let mut text = String::from(header);
        text.push('\n');
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        let path = self.path(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }

    pub fn write_chart(&self, name: &str, chart: &Chart) -> Result<PathBuf> {
        let path = self.path(name);
        fs::write(&path, chart.render())
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }
}
