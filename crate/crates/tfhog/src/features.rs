//! Feature matrix files.
//!
//! Layout (little-endian): 64-byte header
//!
//! | offset | size | field                        |
//! |--------|------|------------------------------|
//! | 0      | 4    | magic `HFTR`                 |
//! | 4      | 4    | format version (u32)         |
//! | 8      | 8    | rows (u64)                   |
//! | 16     | 8    | dims (u64)                   |
//! | 24     | 32   | SHA-256 of the config text   |
//! | 56     | 8    | reserved, zero               |
//!
//! followed by `rows * dims` f32 values, row-major. Two text sidecars hold
//! one class label (`<file>.labels`) and one source id (`<file>.ids`) per row.

use std::path::Path;

use tfhog_core::Matrix;

use crate::atomic::{read, read_text, with_suffix, write_atomic};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"HFTR";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFile {
    /// Values as stored (already rounded to f32 once written).
    pub matrix: Matrix,
    pub labels: Vec<String>,
    pub ids: Vec<String>,
    pub config_hash: [u8; 32],
}

impl FeatureFile {
    pub fn new(
        matrix: Matrix,
        labels: Vec<String>,
        ids: Vec<String>,
        config_hash: [u8; 32],
    ) -> Result<Self> {
        if labels.len() != matrix.rows() || ids.len() != matrix.rows() {
            return Err(Error::Data(format!(
                "{} rows, {} labels, {} ids",
                matrix.rows(),
                labels.len(),
                ids.len()
            )));
        }
        for s in labels.iter().chain(&ids) {
            if s.is_empty() || s.contains(['\n', '\r']) {
                return Err(Error::Data(format!(
                    "label or id {s:?} is empty or spans lines"
                )));
            }
        }
        Ok(Self {
            matrix,
            labels,
            ids,
            config_hash,
        })
    }

    /// Sorted distinct labels and each row's index into them.
    pub fn class_indices(&self) -> (Vec<String>, Vec<usize>) {
        let mut classes = self.labels.clone();
        classes.sort();
        classes.dedup();
        let idx = self
            .labels
            .iter()
            .map(|l| {
                classes
                    .binary_search(l)
                    .expect("label is in the class list")
            })
            .collect();
        (classes, idx)
    }
}

pub fn labels_path(path: &Path) -> std::path::PathBuf {
    with_suffix(path, ".labels")
}

pub fn ids_path(path: &Path) -> std::path::PathBuf {
    with_suffix(path, ".ids")
}

pub fn encode(f: &FeatureFile) -> Vec<u8> {
    let m = &f.matrix;
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * m.as_slice().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    out.extend_from_slice(&f.config_hash);
    out.extend_from_slice(&[0u8; 8]);
    for &v in m.as_slice() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

fn lines(items: &[String]) -> String {
    let mut s = String::new();
    for item in items {
        s.push_str(item);
        s.push('\n');
    }
    s
}

pub fn write_features(path: &Path, f: &FeatureFile) -> Result<()> {
    write_atomic(&labels_path(path), lines(&f.labels).as_bytes())?;
    write_atomic(&ids_path(path), lines(&f.ids).as_bytes())?;
    write_atomic(path, &encode(f))
}

/// Parses the binary part; returns the matrix and the config hash.
pub fn decode(path: &Path, bytes: &[u8]) -> Result<(Matrix, [u8; 32])> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::format(
            path,
            format!(
                "truncated header: expected {HEADER_LEN} bytes, found {}",
                bytes.len()
            ),
        ));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::format(path, "not a feature file (bad magic)"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::format(
            path,
            format!("unsupported feature file version {version}"),
        ));
    }
    let (rows, dims) = (u64_at(8), u64_at(16));
    let expected = rows
        .checked_mul(dims)
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| n.checked_add(HEADER_LEN as u64))
        .ok_or_else(|| Error::format(path, "header sizes overflow"))?;
    if bytes.len() as u64 != expected {
        return Err(Error::format(
            path,
            format!(
                "payload size mismatch: expected {expected} bytes for {rows}x{dims}, found {}",
                bytes.len()
            ),
        ));
    }
    let mut hash = [0u8; 32];
    hash.copy_from_slice(&bytes[24..56]);
    let data = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f64::from(f32::from_le_bytes(c.try_into().unwrap())))
        .collect();
    let m = Matrix::from_vec(rows as usize, dims as usize, data)?;
    Ok((m, hash))
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    Ok(read_text(path)?.lines().map(str::to_string).collect())
}

pub fn read_features(path: &Path) -> Result<FeatureFile> {
    let (matrix, config_hash) = decode(path, &read(path)?)?;
    let labels = read_lines(&labels_path(path))?;
    let ids = read_lines(&ids_path(path))?;
    if labels.len() != matrix.rows() || ids.len() != matrix.rows() {
        return Err(Error::format(
            path,
            format!(
                "{} rows but {} labels and {} ids in the sidecar files",
                matrix.rows(),
                labels.len(),
                ids.len()
            ),
        ));
    }
    Ok(FeatureFile {
        matrix,
        labels,
        ids,
        config_hash,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(rows: usize, cols: usize) -> FeatureFile {
        let m = Matrix::from_fn(rows, cols, |i, j| (i * cols + j) as f64 * 0.25 - 1.0);
        let labels = (0..rows).map(|i| format!("c{}", i % 2)).collect();
        let ids = (0..rows).map(|i| format!("c{}/f{i}", i % 2)).collect();
        FeatureFile::new(m, labels, ids, [7; 32]).unwrap()
    }

    #[test]
    fn three_by_four_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.hftr");
        let f = sample(3, 4);
        write_features(&path, &f).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 64 + 48);
        assert_eq!(read_features(&path).unwrap(), f);
    }

    #[test]
    fn empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.hftr");
        let f = sample(0, 5);
        write_features(&path, &f).unwrap();
        let back = read_features(&path).unwrap();
        assert_eq!((back.matrix.rows(), back.matrix.cols()), (0, 5));
    }

    #[test]
    fn f32_rounding_happens_once() {
        let m = Matrix::from_vec(1, 2, vec![0.1, 1.0 / 3.0]).unwrap();
        let f = FeatureFile::new(m, vec!["a".into()], vec!["a/x".into()], [0; 32]).unwrap();
        let (once, _) = decode(Path::new("x"), &encode(&f)).unwrap();
        let again = FeatureFile {
            matrix: once.clone(),
            ..f
        };
        let (twice, _) = decode(Path::new("x"), &encode(&again)).unwrap();
        assert_eq!(once, twice);
        assert_eq!(once.as_slice()[0], f64::from(0.1f32));
    }

    #[test]
    fn corruption_is_reported() {
        let bytes = encode(&sample(3, 4));
        let p = Path::new("f");
        let err = decode(p, &bytes[..bytes.len() - 3])
            .unwrap_err()
            .to_string();
        assert!(
            err.contains("expected 112 bytes") && err.contains("found 109"),
            "{err}"
        );
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode(p, &bad).unwrap_err().to_string().contains("magic"));
        let mut bad = bytes;
        bad[4] = 9;
        assert!(decode(p, &bad).unwrap_err().to_string().contains("version"));
    }

    #[test]
    fn class_indices_are_sorted() {
        let f = sample(4, 1);
        let (classes, idx) = f.class_indices();
        assert_eq!(classes, vec!["c0", "c1"]);
        assert_eq!(idx, vec![0, 1, 0, 1]);
    }
}
