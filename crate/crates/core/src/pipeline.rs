//! End-to-end feature extraction for one clip.

use alloc::format;

use crate::error::{config_err, Result};
use crate::hash::fnv1a64;
use crate::hog::{hog, HogConfig, HogGrid};
use crate::pooling::{dim_formula, pool, FeatureVector, PoolConfig, PoolMode};
use crate::signal::AudioClip;
use crate::tfr::{cqt, mean_filter, to_image, CqtConfig, TfrImage};

/// Upper analysis frequency, either absolute or relative to the clip's Nyquist frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaxFrequency {
    Hz(f64),
    NyquistFraction(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub f_min_hz: f64,
    pub f_max: MaxFrequency,
    pub bins_per_octave: u32,
    pub hop_samples: usize,
    /// Side of the square time-frequency image.
    pub image_size: usize,
    pub db_floor: f64,
    /// Mean filter side; 1 disables filtering.
    pub filter_size: usize,
    pub hog: HogConfig,
    pub pool_mode: PoolMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            f_min_hz: 20.0,
            f_max: MaxFrequency::Hz(10_000.0),
            bins_per_octave: 8,
            hop_samples: 256,
            image_size: 512,
            db_floor: -80.0,
            filter_size: 15,
            hog: HogConfig::default(),
            pool_mode: PoolMode::Marginalized,
        }
    }
}

impl PipelineConfig {
    /// Settings for the one-second synthetic chirps: analysis up to 95% of
    /// Nyquist and a 64-sample hop (126 frames at 8 kHz).
    pub fn toy() -> Self {
        Self {
            f_max: MaxFrequency::NyquistFraction(0.95),
            hop_samples: 64,
            ..Self::default()
        }
    }

    pub fn cqt_config(&self, sample_rate_hz: u32) -> CqtConfig {
        let f_max_hz = match self.f_max {
            MaxFrequency::Hz(f) => f,
            MaxFrequency::NyquistFraction(r) => r * f64::from(sample_rate_hz) / 2.0,
        };
        CqtConfig {
            f_min_hz: self.f_min_hz,
            f_max_hz,
            bins_per_octave: self.bins_per_octave,
            hop_samples: self.hop_samples,
        }
    }

    pub fn pool_config(&self) -> PoolConfig {
        PoolConfig::from_hog(self.pool_mode, &self.hog)
    }

    /// Cross-field checks that do not depend on the audio.
    pub fn validate(&self) -> Result<()> {
        if let MaxFrequency::NyquistFraction(r) = self.f_max {
            if !(r > 0.0 && r <= 1.0) {
                return Err(config_err!(
                    "f_max Nyquist fraction must be in (0, 1], got {r}"
                ));
            }
        }
        if self.image_size == 0 {
            return Err(config_err!("image size must be positive"));
        }
        if !(self.db_floor < 0.0 && self.db_floor.is_finite()) {
            return Err(config_err!(
                "db_floor must be negative, got {}",
                self.db_floor
            ));
        }
        if self.filter_size == 0 || self.filter_size > self.image_size {
            return Err(config_err!(
                "filter size {} must be in 1..={}",
                self.filter_size,
                self.image_size
            ));
        }
        self.hog.check_image(self.image_size, self.image_size)?;
        self.feature_dim().map(|_| ())
    }

    pub fn cells_per_side(&self) -> usize {
        self.image_size / self.hog.cell_size.max(1)
    }

    pub fn feature_dim(&self) -> Result<usize> {
        let cells = self.cells_per_side();
        dim_formula(cells, cells, self.hog.n_orient, &self.pool_config())
    }

    /// Stable hash of every setting.
    pub fn signature(&self) -> u64 {
        fnv1a64(format!("{self:?}").as_bytes())
    }
}

/// CQT magnitude rendered as a filtered `image_size` square image.
pub fn tfr_image(clip: &AudioClip, cfg: &PipelineConfig) -> Result<TfrImage> {
    let cqt_cfg = cfg.cqt_config(clip.sample_rate_hz());
    let spectrum = cqt(clip, &cqt_cfg)?;
    let mut img = to_image(&spectrum.magnitude(), cfg.image_size, cfg.db_floor)?;
    img.meta.source_id = clip.source_id().into();
    img.meta.config_hash = cfg.signature();
    mean_filter(&img, cfg.filter_size)
}

pub fn hog_grid(img: &TfrImage, cfg: &PipelineConfig) -> Result<HogGrid> {
    hog(img, &cfg.hog)
}

pub fn features_from_image(img: &TfrImage, cfg: &PipelineConfig) -> Result<FeatureVector> {
    pool(&hog_grid(img, cfg)?, &cfg.pool_config())
}

/// `clip -> cqt -> image -> mean filter -> hog -> pooling`.
pub fn extract(clip: &AudioClip, cfg: &PipelineConfig) -> Result<FeatureVector> {
    cfg.validate()?;
    features_from_image(&tfr_image(clip, cfg)?, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hog::HogVariant;
    use crate::signal::{make_toy_dataset, ToyConfig};

    #[test]
    fn default_dims() {
        assert_eq!(PipelineConfig::default().feature_dim().unwrap(), 3072);
        let mut cfg = PipelineConfig::default();
        cfg.hog.cell_size = 32;
        assert_eq!(cfg.feature_dim().unwrap(), 768);
        cfg.hog.variant = HogVariant::Signed;
        cfg.hog.include_factors = true;
        assert_eq!(cfg.feature_dim().unwrap(), 32 * 20);
    }

    #[test]
    fn validation() {
        let mut cfg = PipelineConfig::default();
        cfg.hog.cell_size = 7;
        assert!(cfg.validate().is_err());
        let cfg = PipelineConfig {
            filter_size: 0,
            ..PipelineConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = PipelineConfig {
            pool_mode: PoolMode::Grid { freq: 3, time: 1 },
            ..PipelineConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn toy_clip_extracts() {
        let clips = make_toy_dataset(&ToyConfig {
            n_per_class: 1,
            ..ToyConfig::default()
        })
        .unwrap();
        let mut cfg = PipelineConfig::toy();
        cfg.image_size = 128;
        cfg.filter_size = 5;
        let img = tfr_image(&clips[0], &cfg).unwrap();
        assert_eq!((img.height(), img.width()), (128, 128));
        assert_eq!(img.meta.source_id, "pos_0000");
        let fv = extract(&clips[0], &cfg).unwrap();
        assert_eq!(fv.dim(), cfg.feature_dim().unwrap());
        assert!(fv.values.iter().all(|v| v.is_finite() && *v >= 0.0));
    }
}
