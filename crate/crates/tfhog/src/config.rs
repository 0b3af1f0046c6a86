//! Run configuration as flat `key = value` text.
//!
//! Lines starting with `#` are comments. Settings apply in order, so a
//! later line (or a `--set key=value` flag) overrides an earlier one.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};
use tfhog_core::eval::{ProtocolConfig, TrainSize};
use tfhog_core::hog::HogVariant;
use tfhog_core::learn::{KernelKind, ModelGrid};
use tfhog_core::pipeline::{MaxFrequency, PipelineConfig};
use tfhog_core::pooling::PoolMode;

use crate::atomic::read_text;
use crate::error::{Error, Result};

/// Fraction of Nyquist used when `cqt.f_max_hz = auto`; `nyquist:R` picks
/// another fraction.
pub const AUTO_NYQUIST_FRACTION: f64 = 0.95;

/// A list of values or `log:LO:HI:N` for `N` log-spaced values, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    Log { lo: f64, hi: f64, n: usize },
    Values(Vec<f64>),
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::Log { lo, hi, n } => ModelGrid::log_spaced(*lo, *hi, *n),
            Self::Values(v) => v.clone(),
        }
    }

    fn parse(key: &str, s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("log:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(bad(key, s, "expected log:LO:HI:N"));
            }
            let (lo, hi) = (parse_f64(key, parts[0])?, parse_f64(key, parts[1])?);
            let n = parse_usize(key, parts[2])?;
            if !(lo > 0.0 && hi >= lo && n > 0) {
                return Err(bad(key, s, "need 0 < LO <= HI and N > 0"));
            }
            return Ok(Self::Log { lo, hi, n });
        }
        let v = s
            .split(',')
            .map(|p| parse_f64(key, p.trim()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::Values(v))
    }
}

impl std::fmt::Display for GridSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Log { lo, hi, n } => write!(f, "log:{lo}:{hi}:{n}"),
            Self::Values(v) => {
                let s: Vec<String> = v.iter().map(f64::to_string).collect();
                f.write_str(&s.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pipeline: PipelineConfig,
    /// Split recordings into non-overlapping pieces of this length; 0 keeps whole files.
    pub segment_seconds: f64,
    pub kernel: KernelKind,
    pub c_grid: GridSpec,
    pub sigma_grid: GridSpec,
    pub tol: f64,
    pub n_splits: usize,
    pub train_fraction: f64,
    /// When nonzero, each split trains on exactly this many examples instead.
    pub train_count: usize,
    pub n_resample: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let protocol = ProtocolConfig::default();
        Self {
            pipeline: PipelineConfig::default(),
            segment_seconds: 0.0,
            kernel: KernelKind::Linear,
            c_grid: GridSpec::Log {
                lo: 1e-3,
                hi: 100.0,
                n: 10,
            },
            sigma_grid: GridSpec::Values(vec![1.0, 5.0, 10.0, 20.0, 50.0, 100.0]),
            tol: protocol.tol,
            n_splits: protocol.n_splits,
            train_fraction: 0.8,
            train_count: 0,
            n_resample: protocol.n_resample,
            seed: protocol.seed,
        }
    }
}

fn bad(key: &str, value: &str, why: &str) -> Error {
    Error::Config(format!("{key} = {value}: {why}"))
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad(key, s, "expected a finite number"))
}

fn parse_usize(key: &str, s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| bad(key, s, "expected a nonnegative integer"))
}

fn parse_bool(key: &str, s: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, s, "expected true or false")),
    }
}

pub fn parse_variant(s: &str) -> Option<HogVariant> {
    match s {
        "both" => Some(HogVariant::Both),
        "signed" => Some(HogVariant::Signed),
        "unsigned" => Some(HogVariant::Unsigned),
        _ => None,
    }
}

fn variant_name(v: HogVariant) -> &'static str {
    match v {
        HogVariant::Both => "both",
        HogVariant::Signed => "signed",
        HogVariant::Unsigned => "unsigned",
    }
}

/// `marginalized`, `full` or `grid:FxT`.
pub fn parse_pool_mode(s: &str) -> Option<PoolMode> {
    match s {
        "marginalized" => Some(PoolMode::Marginalized),
        "full" => Some(PoolMode::Full),
        _ => {
            let (f, t) = s.strip_prefix("grid:")?.split_once('x')?;
            Some(PoolMode::Grid {
                freq: f.parse().ok()?,
                time: t.parse().ok()?,
            })
        }
    }
}

fn pool_mode_name(m: PoolMode) -> String {
    match m {
        PoolMode::Marginalized => "marginalized".into(),
        PoolMode::Full => "full".into(),
        PoolMode::Grid { freq, time } => format!("grid:{freq}x{time}"),
    }
}

pub fn parse_kernel(s: &str) -> Option<KernelKind> {
    match s {
        "linear" => Some(KernelKind::Linear),
        "gaussian" => Some(KernelKind::Gaussian),
        _ => None,
    }
}

fn kernel_name(k: KernelKind) -> &'static str {
    match k {
        KernelKind::Linear => "linear",
        KernelKind::Gaussian => "gaussian",
    }
}

/// Keys that change extracted features; everything else only affects learning.
const EXTRACTION_PREFIXES: [&str; 5] = ["cqt.", "image.", "hog.", "pool.", "data."];

impl RunConfig {
    /// Settings for the synthetic chirp dataset: analysis up to 95% of
    /// Nyquist, 64-sample hop and 40 training examples per split.
    pub fn toy() -> Self {
        Self {
            pipeline: PipelineConfig::toy(),
            train_count: 40,
            ..Self::default()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "default" => Ok(Self::default()),
            "toy" => Ok(Self::toy()),
            _ => Err(Error::Config(format!(
                "unknown preset {name:?} (expected default or toy)"
            ))),
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let p = &mut self.pipeline;
        match key.trim() {
            "cqt.f_min_hz" => p.f_min_hz = parse_f64(key, v)?,
            "cqt.f_max_hz" => {
                p.f_max = if v == "auto" {
                    MaxFrequency::NyquistFraction(AUTO_NYQUIST_FRACTION)
                } else if let Some(r) = v.strip_prefix("nyquist:") {
                    MaxFrequency::NyquistFraction(parse_f64(key, r)?)
                } else {
                    MaxFrequency::Hz(parse_f64(key, v)?)
                }
            }
            "cqt.bins_per_octave" => {
                p.bins_per_octave = v
                    .parse()
                    .map_err(|_| bad(key, v, "expected a positive integer"))?
            }
            "cqt.hop_samples" => p.hop_samples = parse_usize(key, v)?,
            "image.size" => p.image_size = parse_usize(key, v)?,
            "image.db_floor" => p.db_floor = parse_f64(key, v)?,
            "image.filter_size" => p.filter_size = parse_usize(key, v)?,
            "hog.cell_size" => p.hog.cell_size = parse_usize(key, v)?,
            "hog.n_orient" => p.hog.n_orient = parse_usize(key, v)?,
            "hog.variant" => {
                p.hog.variant = parse_variant(v)
                    .ok_or_else(|| bad(key, v, "expected both, signed or unsigned"))?
            }
            "hog.factors" => p.hog.include_factors = parse_bool(key, v)?,
            "hog.clip_tau" => p.hog.clip_tau = parse_f64(key, v)?,
            "hog.eps_norm" => p.hog.eps_norm = parse_f64(key, v)?,
            "pool.mode" => {
                p.pool_mode = parse_pool_mode(v)
                    .ok_or_else(|| bad(key, v, "expected marginalized, full or grid:FxT"))?
            }
            "data.segment_seconds" => self.segment_seconds = parse_f64(key, v)?,
            "svm.kernel" => {
                self.kernel =
                    parse_kernel(v).ok_or_else(|| bad(key, v, "expected linear or gaussian"))?
            }
            "svm.c_grid" => self.c_grid = GridSpec::parse(key, v)?,
            "svm.sigma_grid" => self.sigma_grid = GridSpec::parse(key, v)?,
            "svm.tol" => self.tol = parse_f64(key, v)?,
            "protocol.n_splits" => self.n_splits = parse_usize(key, v)?,
            "protocol.train_fraction" => self.train_fraction = parse_f64(key, v)?,
            "protocol.train_count" => self.train_count = parse_usize(key, v)?,
            "protocol.n_resample" => self.n_resample = parse_usize(key, v)?,
            "seed" => {
                self.seed = v
                    .parse()
                    .map_err(|_| bad(key, v, "expected an unsigned 64-bit integer"))?
            }
            other => return Err(Error::Config(format!("unknown setting {other:?}"))),
        }
        Ok(())
    }

    /// Applies one `key=value` assignment.
    pub fn apply_assignment(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got {assignment:?}")))?;
        self.set(k, v)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            self.apply_assignment(line)
                .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = read_text(path)?;
        self.apply_text(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Every setting in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let p = &self.pipeline;
        let f_max = match p.f_max {
            MaxFrequency::NyquistFraction(r) if r == AUTO_NYQUIST_FRACTION => "auto".to_string(),
            MaxFrequency::NyquistFraction(r) => format!("nyquist:{r}"),
            MaxFrequency::Hz(f) => f.to_string(),
        };
        vec![
            ("cqt.f_min_hz", p.f_min_hz.to_string()),
            ("cqt.f_max_hz", f_max),
            ("cqt.bins_per_octave", p.bins_per_octave.to_string()),
            ("cqt.hop_samples", p.hop_samples.to_string()),
            ("image.size", p.image_size.to_string()),
            ("image.db_floor", p.db_floor.to_string()),
            ("image.filter_size", p.filter_size.to_string()),
            ("hog.cell_size", p.hog.cell_size.to_string()),
            ("hog.n_orient", p.hog.n_orient.to_string()),
            ("hog.variant", variant_name(p.hog.variant).into()),
            ("hog.factors", p.hog.include_factors.to_string()),
            ("hog.clip_tau", p.hog.clip_tau.to_string()),
            ("hog.eps_norm", p.hog.eps_norm.to_string()),
            ("pool.mode", pool_mode_name(p.pool_mode)),
            ("data.segment_seconds", self.segment_seconds.to_string()),
            ("svm.kernel", kernel_name(self.kernel).into()),
            ("svm.c_grid", self.c_grid.to_string()),
            ("svm.sigma_grid", self.sigma_grid.to_string()),
            ("svm.tol", self.tol.to_string()),
            ("protocol.n_splits", self.n_splits.to_string()),
            ("protocol.train_fraction", self.train_fraction.to_string()),
            ("protocol.train_count", self.train_count.to_string()),
            ("protocol.n_resample", self.n_resample.to_string()),
            ("seed", self.seed.to_string()),
        ]
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# tfhog run configuration\n");
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// Canonical text of the settings that affect feature extraction.
    pub fn extraction_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            if EXTRACTION_PREFIXES.iter().any(|p| k.starts_with(p)) {
                let _ = writeln!(s, "{k} = {v}");
            }
        }
        s
    }

    /// SHA-256 of [`Self::extraction_text`]; stored in feature file headers.
    pub fn extraction_hash(&self) -> [u8; 32] {
        Sha256::digest(self.extraction_text().as_bytes()).into()
    }

    pub fn model_grid(&self) -> ModelGrid {
        ModelGrid {
            kernel: self.kernel,
            c_values: self.c_grid.values(),
            sigma_values: self.sigma_grid.values(),
        }
    }

    pub fn protocol(&self) -> ProtocolConfig {
        ProtocolConfig {
            n_splits: self.n_splits,
            train_size: if self.train_count > 0 {
                TrainSize::Count(self.train_count)
            } else {
                TrainSize::Fraction(self.train_fraction)
            },
            seed: self.seed,
            n_resample: self.n_resample,
            grid: self.model_grid(),
            tol: self.tol,
        }
    }

    /// All range and cross-field checks; run before any work starts.
    pub fn validate(&self) -> Result<()> {
        self.pipeline.validate()?;
        if !(self.segment_seconds >= 0.0) {
            return Err(Error::Config(
                "data.segment_seconds must be nonnegative".into(),
            ));
        }
        self.protocol().validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for cfg in [RunConfig::default(), RunConfig::toy()] {
            let mut back = RunConfig {
                seed: 99,
                ..RunConfig::default()
            };
            back.apply_text(&cfg.to_text()).unwrap();
            assert_eq!(back, cfg);
        }
        let mut cfg = RunConfig::default();
        cfg.apply_text("pool.mode = grid:4x2\nsvm.c_grid = 0.1, 1,10\nhog.factors = yes\ncqt.f_max_hz = nyquist:0.5")
            .unwrap();
        let mut back = RunConfig::toy();
        back.apply_text(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn default_grid_matches_standard() {
        let g = RunConfig::default().model_grid();
        assert_eq!(g, ModelGrid::standard(KernelKind::Linear));
    }

    #[test]
    fn errors_name_the_key() {
        let mut cfg = RunConfig::default();
        let e = cfg
            .apply_text("\n# c\nhog.cell_size = eight")
            .unwrap_err()
            .to_string();
        assert!(e.contains("line 3") && e.contains("hog.cell_size"), "{e}");
        assert!(cfg.apply_assignment("nope=1").is_err());
        assert!(cfg.apply_assignment("hog.variant").is_err());
    }

    #[test]
    fn cross_field_checks() {
        let mut cfg = RunConfig::default();
        cfg.set("hog.cell_size", "12").unwrap();
        assert!(matches!(
            cfg.validate(),
            Err(Error::Core(tfhog_core::Error::Config(_)))
        ));
        let mut cfg = RunConfig::default();
        cfg.set("pool.mode", "grid:5x1").unwrap();
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.set("protocol.train_fraction", "1.5").unwrap();
        assert!(cfg.validate().is_err());
        assert!(RunConfig::toy().validate().is_ok());
    }

    #[test]
    fn extraction_hash_ignores_learning_keys() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.set("svm.kernel", "gaussian").unwrap();
        b.set("seed", "5").unwrap();
        assert_eq!(a.extraction_hash(), b.extraction_hash());
        b.set("hog.cell_size", "16").unwrap();
        assert_ne!(a.extraction_hash(), b.extraction_hash());
    }
}
