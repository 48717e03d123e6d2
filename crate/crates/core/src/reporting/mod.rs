//! Difficulty maps and report files.

mod color;
mod maps;
mod tables;

use std::io::Write;
use std::path::{Path, PathBuf};

pub use color::{ramp_color, ramp_position, ColorScale};
pub use maps::{export_difficulty_map, render_map, render_ply, render_vtk, vertex_values, MapFormat};
pub use tables::{
    comparison_csv, emit_report, render_report, report_csv, to_sorted_json, totals_csv, AnyReport,
    ReportFormat,
};

use crate::error::Result;

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(format!(".tmp-{}", std::process::id()));
    path.with_file_name(name)
}

/// Writes `bytes` to a sibling temp file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut batch = OutputBatch::default();
    batch.add(path, bytes.to_vec());
    batch.commit()
}

/// A set of output files that appear together or not at all.
#[derive(Debug, Default)]
pub struct OutputBatch {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl OutputBatch {
    pub fn add(&mut self, path: impl Into<PathBuf>, bytes: impl Into<Vec<u8>>) {
        self.files.push((path.into(), bytes.into()));
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    /// Stages every file as a temp sibling, then renames them into place.
    /// On a staging failure all temps are removed and no target is touched.
    pub fn commit(self) -> Result<()> {
        let mut staged: Vec<(PathBuf, &Path)> = Vec::new();
        let cleanup = |staged: &[(PathBuf, &Path)]| {
            for (tmp, _) in staged {
                let _ = std::fs::remove_file(tmp);
            }
        };
        for (path, bytes) in &self.files {
            let tmp = temp_path(path);
            let res = std::fs::File::create(&tmp).and_then(|mut f| {
                f.write_all(bytes)?;
                f.sync_all()
            });
            staged.push((tmp, path));
            if let Err(e) = res {
                cleanup(&staged);
                return Err(e.into());
            }
        }
        for (i, (tmp, path)) in staged.iter().enumerate() {
            if let Err(e) = std::fs::rename(tmp, path) {
                cleanup(&staged[i..]);
                return Err(e.into());
            }
        }
        Ok(())
    }
}
