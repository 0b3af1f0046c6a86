//! Directory-per-class dataset layout: `root/<class>/**/<file>.wav`.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub path: PathBuf,
    pub class: String,
    /// `<class>/<path below the class directory, without extension>`.
    pub source_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetScan {
    /// Sorted class directory names.
    pub classes: Vec<String>,
    /// Class-major, paths in lexicographic order within each class.
    pub entries: Vec<Entry>,
    /// Files ignored because they are not `.wav` or sit directly under the root.
    pub skipped: usize,
}

impl DatasetScan {
    pub fn class_index(&self, class: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == class)
    }
}

fn is_wav(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("wav"))
}

fn sorted_children(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for item in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        out.push(item.map_err(|e| Error::io(dir, e))?.path());
    }
    out.sort();
    Ok(out)
}

fn walk(dir: &Path, files: &mut Vec<PathBuf>, skipped: &mut usize) -> Result<()> {
    for path in sorted_children(dir)? {
        if path.is_dir() {
            walk(&path, files, skipped)?;
        } else if is_wav(&path) {
            files.push(path);
        } else {
            *skipped += 1;
        }
    }
    Ok(())
}

fn utf8_name(path: &Path) -> Result<String> {
    path.to_str()
        .map(|s| s.replace('\\', "/"))
        .ok_or_else(|| Error::Data(format!("{}: path is not valid UTF-8", path.display())))
}

pub fn scan_dataset(root: &Path) -> Result<DatasetScan> {
    if !root.is_dir() {
        return Err(Error::Data(format!(
            "dataset root {} is not a directory",
            root.display()
        )));
    }
    let mut classes = Vec::new();
    let mut entries = Vec::new();
    let mut skipped = 0;
    for child in sorted_children(root)? {
        if !child.is_dir() {
            skipped += 1;
            continue;
        }
        let class = utf8_name(child.file_name().map(Path::new).unwrap_or(&child))?;
        let mut files = Vec::new();
        walk(&child, &mut files, &mut skipped)?;
        if files.is_empty() {
            continue;
        }
        for path in files {
            let rel = path
                .strip_prefix(&child)
                .expect("walked below the class directory");
            let stem = utf8_name(&rel.with_extension(""))?;
            if stem.contains(['\t', '\n', '\r']) {
                return Err(Error::Data(format!(
                    "{}: file names may not contain tabs or newlines",
                    path.display()
                )));
            }
            entries.push(Entry {
                path,
                class: class.clone(),
                source_id: format!("{class}/{stem}"),
            });
        }
        classes.push(class);
    }
    if entries.is_empty() {
        return Err(Error::Data(format!(
            "no WAV files found under {}",
            root.display()
        )));
    }
    Ok(DatasetScan {
        classes,
        entries,
        skipped,
    })
}
