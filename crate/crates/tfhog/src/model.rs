//! Trained model files.
//!
//! Little-endian layout: magic `HSVM`, u32 version, u32 class count and
//! each class name as (u32 byte length, UTF-8 bytes), u64 feature
//! dimension, the standardizer mean and std (f64 each), the selected
//! hyperparameters (u8 kernel tag, f64 sigma, f64 C), u32 machine count,
//! then per machine: u32 first class, u32 second class, f64 bias,
//! u64 support-vector count, support vectors (row-major f64) and their
//! coefficients (f64).

use std::path::Path;

use tfhog_core::learn::{BinarySvm, Hyperparams, KernelSpec, PairMachine, Standardizer, SvmModel};
use tfhog_core::Matrix;

use crate::atomic::{read, write_atomic};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"HSVM";
pub const VERSION: u32 = 1;

const LINEAR: u8 = 0;
const GAUSSIAN: u8 = 1;

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64s(&mut self, v: &[f64]) {
        for &x in v {
            self.f64(x);
        }
    }
}

pub fn encode(model: &SvmModel) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.u32(VERSION);
    w.u32(model.classes().len() as u32);
    for c in model.classes() {
        w.u32(c.len() as u32);
        w.0.extend_from_slice(c.as_bytes());
    }
    let s = model.standardizer();
    w.u64(s.dim() as u64);
    w.f64s(s.mean());
    w.f64s(s.std());
    let hyper = model.hyperparams();
    match hyper.kernel {
        KernelSpec::Linear => {
            w.u8(LINEAR);
            w.f64(0.0);
        }
        KernelSpec::Gaussian { sigma } => {
            w.u8(GAUSSIAN);
            w.f64(sigma);
        }
    }
    w.f64(hyper.c);
    w.u32(model.machines().len() as u32);
    for m in model.machines() {
        w.u32(m.first as u32);
        w.u32(m.second as u32);
        w.f64(m.svm.bias());
        w.u64(m.svm.coef().len() as u64);
        w.f64s(m.svm.support_vectors().as_slice());
        w.f64s(m.svm.coef());
    }
    w.0
}

struct Reader<'a> {
    path: &'a Path,
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .at
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| {
                Error::format(
                    self.path,
                    format!(
                        "truncated model: needed {n} bytes at offset {}, file has {}",
                        self.at,
                        self.bytes.len()
                    ),
                )
            })?;
        let s = &self.bytes[self.at..end];
        self.at = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn count(&mut self, elem_size: usize) -> Result<usize> {
        let n = self.u64()?;
        let remaining = (self.bytes.len() - self.at) as u64;
        if n.saturating_mul(elem_size as u64) > remaining {
            return Err(Error::format(
                self.path,
                format!("count {n} exceeds the remaining {remaining} bytes"),
            ));
        }
        Ok(n as usize)
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }
}

pub fn decode(path: &Path, bytes: &[u8]) -> Result<SvmModel> {
    let mut r = Reader { path, bytes, at: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::format(path, "not a model file (bad magic)"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::format(
            path,
            format!("unsupported model version {version}"),
        ));
    }
    let n_classes = r.u32()? as usize;
    let mut classes = Vec::new();
    for _ in 0..n_classes {
        let len = r.u32()? as usize;
        let raw = r.take(len)?;
        classes.push(
            String::from_utf8(raw.to_vec())
                .map_err(|_| Error::format(path, "class name is not UTF-8"))?,
        );
    }
    let dim = r.count(16)?;
    let mean = r.f64s(dim)?;
    let std = r.f64s(dim)?;
    let standardizer = Standardizer::from_parts(mean, std)?;
    let kernel = match (r.u8()?, r.f64()?) {
        (LINEAR, _) => KernelSpec::Linear,
        (GAUSSIAN, sigma) => KernelSpec::gaussian(sigma)?,
        (tag, _) => return Err(Error::format(path, format!("unknown kernel tag {tag}"))),
    };
    let c = r.f64()?;
    let hyper = Hyperparams { c, kernel };
    let n_machines = r.u32()? as usize;
    let mut machines = Vec::new();
    for _ in 0..n_machines {
        let first = r.u32()? as usize;
        let second = r.u32()? as usize;
        let bias = r.f64()?;
        let n_sv = r.count(8 * (dim + 1))?;
        let sv = Matrix::from_vec(n_sv, dim, r.f64s(n_sv * dim)?)?;
        let coef = r.f64s(n_sv)?;
        let svm = BinarySvm::from_parts(sv, coef, bias, kernel, c)?;
        machines.push(PairMachine { first, second, svm });
    }
    if r.at != bytes.len() {
        return Err(Error::format(
            path,
            format!(
                "{} trailing bytes after the last machine",
                bytes.len() - r.at
            ),
        ));
    }
    Ok(SvmModel::from_parts(
        classes,
        standardizer,
        hyper,
        machines,
    )?)
}

pub fn write_model(path: &Path, model: &SvmModel) -> Result<()> {
    write_atomic(path, &encode(model))
}

pub fn read_model(path: &Path) -> Result<SvmModel> {
    decode(path, &read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tfhog_core::learn::DEFAULT_TOL;

    fn model(kernel: KernelSpec) -> (SvmModel, Matrix) {
        let x = Matrix::from_fn(24, 3, |i, j| {
            ((i * 7 + j * 3) % 11) as f64 / 5.0 + (i % 3) as f64 * (j as f64 - 1.0)
        });
        let labels: Vec<usize> = (0..24).map(|i| i % 3).collect();
        let classes = vec!["bus".to_string(), "park".into(), "street".into()];
        let m = SvmModel::fit(
            &x,
            &labels,
            classes,
            Hyperparams { c: 3.0, kernel },
            DEFAULT_TOL,
        )
        .unwrap();
        (m, x)
    }

    #[test]
    fn round_trip_is_bit_exact() {
        for kernel in [KernelSpec::Linear, KernelSpec::gaussian(2.0).unwrap()] {
            let (m, x) = model(kernel);
            let bytes = encode(&m);
            let back = decode(Path::new("m"), &bytes).unwrap();
            assert_eq!(back, m);
            assert_eq!(encode(&back), bytes);
            for i in 0..x.rows() {
                let (a, b) = (
                    m.predict(x.row(i)).unwrap(),
                    back.predict(x.row(i)).unwrap(),
                );
                assert_eq!(a.class, b.class);
                let bits = |p: &tfhog_core::learn::Prediction| {
                    p.strength.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
                };
                assert_eq!(bits(&a), bits(&b));
            }
        }
    }

    #[test]
    fn truncation_and_magic() {
        let (m, _) = model(KernelSpec::Linear);
        let bytes = encode(&m);
        for cut in [3, 10, bytes.len() / 2, bytes.len() - 1] {
            assert!(decode(Path::new("m"), &bytes[..cut]).is_err(), "cut {cut}");
        }
        let mut bad = bytes;
        bad[1] = 0;
        assert!(decode(Path::new("m"), &bad)
            .unwrap_err()
            .to_string()
            .contains("magic"));
    }
}
