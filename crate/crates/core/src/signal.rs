//! Audio clips, fixed-length segmentation and the synthetic chirp dataset.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{arg_err, config_err, Result};

/// Class label given to rising chirps in the synthetic dataset.
pub const TOY_POSITIVE: &str = "pos";
/// Class label given to falling chirps in the synthetic dataset.
pub const TOY_NEGATIVE: &str = "neg";

/// Mono audio at a fixed sample rate. The unit of classification.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate_hz: u32,
    label: Option<String>,
    source_id: String,
}

impl AudioClip {
    /// Fails if `samples` is empty, contains a non-finite value, or the rate is zero.
    pub fn new(
        samples: Vec<f64>,
        sample_rate_hz: u32,
        label: Option<String>,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(arg_err!("audio clip has no samples"));
        }
        if sample_rate_hz == 0 {
            return Err(arg_err!("sample rate must be positive"));
        }
        if let Some(k) = samples.iter().position(|s| !s.is_finite()) {
            return Err(arg_err!("sample {k} is not finite"));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            label,
            source_id: source_id.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate_hz)
    }
}

/// Splits a clip into consecutive non-overlapping pieces of `seg_seconds`.
///
/// The trailing remainder is dropped, so a clip shorter than one segment
/// yields an empty list. Segment `i` gets source id `<source_id>#<i>`.
pub fn segment(clip: &AudioClip, seg_seconds: f64) -> Result<Vec<AudioClip>> {
    if !(seg_seconds.is_finite() && seg_seconds > 0.0) {
        return Err(arg_err!(
            "segment length must be positive, got {seg_seconds}"
        ));
    }
    let seg_len = libm::round(seg_seconds * f64::from(clip.sample_rate_hz)) as usize;
    if seg_len == 0 {
        return Err(arg_err!(
            "segment length {seg_seconds} s is shorter than one sample"
        ));
    }
    Ok(clip
        .samples
        .chunks_exact(seg_len)
        .enumerate()
        .map(|(i, chunk)| AudioClip {
            samples: chunk.to_vec(),
            sample_rate_hz: clip.sample_rate_hz,
            label: clip.label.clone(),
            source_id: format!("{}#{i}", clip.source_id),
        })
        .collect())
}

/// Parameters of the two-class localized chirp problem.
///
/// Each class is `Π[t1,t2](t) · cos(2π(a·t + b)·t) + n(t)` on one second,
/// with `n` white Gaussian noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyConfig {
    pub a_pos: f64,
    pub b_pos: f64,
    pub a_neg: f64,
    pub b_neg: f64,
    pub t1: f64,
    pub t2: f64,
    pub noise_sigma: f64,
    pub sample_rate_hz: u32,
    pub n_per_class: usize,
    pub rng_seed: u64,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            a_pos: 1200.0,
            b_pos: 0.0,
            a_neg: -1200.0,
            b_neg: 2400.0,
            t1: 0.4,
            t2: 0.6,
            noise_sigma: 0.4,
            sample_rate_hz: 8000,
            n_per_class: 100,
            rng_seed: 0,
        }
    }
}

impl ToyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.t1 && self.t1 < self.t2 && self.t2 <= 1.0) {
            return Err(config_err!(
                "chirp support must satisfy 0 <= t1 < t2 <= 1, got [{}, {}]",
                self.t1,
                self.t2
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(config_err!(
                "noise_sigma must be finite and >= 0, got {}",
                self.noise_sigma
            ));
        }
        if self.sample_rate_hz == 0 {
            return Err(config_err!("toy sample rate must be positive"));
        }
        if self.n_per_class == 0 {
            return Err(config_err!("n_per_class must be positive"));
        }
        for v in [self.a_pos, self.b_pos, self.a_neg, self.b_neg] {
            if !v.is_finite() {
                return Err(config_err!("chirp coefficients must be finite"));
            }
        }
        Ok(())
    }
}

/// Generates `2 · n_per_class` one-second clips: all `pos` clips first,
/// then all `neg` clips.
///
/// Clip `i` (over the whole list) draws its noise from ChaCha8 seeded with
/// `rng_seed ^ i`, using the Marsaglia polar method on uniforms in `[0, 1)`.
/// Output is bit-reproducible for a given configuration.
pub fn make_toy_dataset(cfg: &ToyConfig) -> Result<Vec<AudioClip>> {
    cfg.validate()?;
    let n = cfg.n_per_class;
    let classes = [
        (TOY_POSITIVE, cfg.a_pos, cfg.b_pos),
        (TOY_NEGATIVE, cfg.a_neg, cfg.b_neg),
    ];
    let mut clips = Vec::with_capacity(2 * n);
    for (c, &(label, a, b)) in classes.iter().enumerate() {
        for k in 0..n {
            let index = c * n + k;
            let samples = toy_samples(cfg, a, b, cfg.rng_seed ^ index as u64);
            clips.push(AudioClip {
                samples,
                sample_rate_hz: cfg.sample_rate_hz,
                label: Some(label.to_string()),
                source_id: format!("{label}_{k:04}"),
            });
        }
    }
    Ok(clips)
}

fn toy_samples(cfg: &ToyConfig, a: f64, b: f64, seed: u64) -> Vec<f64> {
    let fs = f64::from(cfg.sample_rate_hz);
    let mut noise = GaussianSource::new(seed);
    (0..cfg.sample_rate_hz as usize)
        .map(|k| {
            let t = k as f64 / fs;
            let chirp = if cfg.t1 <= t && t <= cfg.t2 {
                libm::cos(TAU * (a * t + b) * t)
            } else {
                0.0
            };
            // Always draw so the noise sequence does not depend on sigma.
            let n = noise.next();
            chirp + cfg.noise_sigma * n
        })
        .collect()
}

/// Standard normal deviates by the Marsaglia polar method.
struct GaussianSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianSource {
    fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    fn next(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        loop {
            let u = 2.0 * self.rng.random::<f64>() - 1.0;
            let v = 2.0 * self.rng.random::<f64>() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = libm::sqrt(-2.0 * libm::log(s) / s);
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }
}
