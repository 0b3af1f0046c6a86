//! Average pooling of HOG cell descriptors and final feature layout.
//!
//! Blocks are emitted frequency-major (block row 0 holds the lowest
//! frequencies), and each block is laid out as `[signed | unsigned | factors]`
//! restricted to the enabled parts.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{config_err, Result};
use crate::hash::fnv1a64;
use crate::hog::{HogConfig, HogGrid, N_FACTORS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolMode {
    /// Time-pooled descriptors (one per cell row) followed by
    /// frequency-pooled descriptors (one per cell column).
    Marginalized,
    /// `freq x time` equal blocks.
    Grid { freq: usize, time: usize },
    /// Every cell, no pooling.
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolConfig {
    pub mode: PoolMode,
    pub use_signed: bool,
    pub use_unsigned: bool,
    pub use_factors: bool,
}

impl Default for PoolConfig {
    fn default() -> Self {
        Self::from_hog(PoolMode::Marginalized, &HogConfig::default())
    }
}

impl PoolConfig {
    /// Descriptor parts selected by a HOG configuration.
    pub fn from_hog(mode: PoolMode, hog: &HogConfig) -> Self {
        Self {
            mode,
            use_signed: hog.variant.uses_signed(),
            use_unsigned: hog.variant.uses_unsigned(),
            use_factors: hog.include_factors,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.use_signed || self.use_unsigned) {
            return Err(config_err!(
                "at least one of the signed or unsigned histograms must be enabled"
            ));
        }
        if let PoolMode::Grid { freq, time } = self.mode {
            if freq == 0 || time == 0 {
                return Err(config_err!("pooling grid must be at least 1x1"));
            }
        }
        Ok(())
    }

    /// Values contributed by one cell (or one pooled block).
    pub fn cell_width(&self, n_orient: usize) -> usize {
        2 * n_orient * usize::from(self.use_signed)
            + n_orient * usize::from(self.use_unsigned)
            + N_FACTORS * usize::from(self.use_factors)
    }
}

/// Feature dimension for a `rows x cols` cell grid with `n_orient` bins.
pub fn dim_formula(rows: usize, cols: usize, n_orient: usize, cfg: &PoolConfig) -> Result<usize> {
    cfg.validate()?;
    let blocks = match cfg.mode {
        PoolMode::Marginalized => rows + cols,
        PoolMode::Grid { freq, time } => {
            check_divides(rows, cols, freq, time)?;
            freq * time
        }
        PoolMode::Full => rows * cols,
    };
    Ok(blocks * cfg.cell_width(n_orient))
}

fn check_divides(rows: usize, cols: usize, freq: usize, time: usize) -> Result<()> {
    if freq == 0 || time == 0 || !rows.is_multiple_of(freq) || !cols.is_multiple_of(time) {
        return Err(config_err!(
            "a {freq}x{time} pooling grid does not divide the {rows}x{cols} cell grid"
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    /// Hash of the pooling configuration and grid geometry that produced it.
    pub signature: u64,
}

impl FeatureVector {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

fn signature(grid: &HogGrid, cfg: &PoolConfig, tag: &str) -> u64 {
    fnv1a64(
        format!(
            "{tag}|{:?}|{}x{}x{}",
            cfg,
            grid.rows(),
            grid.cols(),
            grid.n_orient()
        )
        .as_bytes(),
    )
}

fn average_part<'a>(
    rows: &core::ops::Range<usize>,
    cols: &core::ops::Range<usize>,
    width: usize,
    part: impl Fn(usize, usize) -> &'a [f64],
    out: &mut Vec<f64>,
) {
    let count = (rows.len() * cols.len()) as f64;
    let start = out.len();
    out.resize(start + width, 0.0);
    for r in rows.clone() {
        for c in cols.clone() {
            for (o, v) in out[start..].iter_mut().zip(part(r, c)) {
                *o += v;
            }
        }
    }
    for o in &mut out[start..] {
        *o /= count;
    }
}

/// Appends the averaged descriptor of cells `rows x cols` to `out`.
fn push_block(
    grid: &HogGrid,
    rows: core::ops::Range<usize>,
    cols: core::ops::Range<usize>,
    cfg: &PoolConfig,
    out: &mut Vec<f64>,
) {
    let b = grid.n_orient();
    if cfg.use_signed {
        average_part(&rows, &cols, 2 * b, |r, c| grid.signed(r, c), out);
    }
    if cfg.use_unsigned {
        average_part(&rows, &cols, b, |r, c| grid.unsigned(r, c), out);
    }
    if cfg.use_factors {
        average_part(&rows, &cols, N_FACTORS, |r, c| grid.factors(r, c), out);
    }
}

fn pool_blocks(grid: &HogGrid, freq: usize, time: usize, cfg: &PoolConfig, out: &mut Vec<f64>) {
    let (bh, bw) = (grid.rows() / freq, grid.cols() / time);
    for fr in 0..freq {
        for tc in 0..time {
            push_block(
                grid,
                fr * bh..(fr + 1) * bh,
                tc * bw..(tc + 1) * bw,
                cfg,
                out,
            );
        }
    }
}

/// Averages the grid over `freq x time` equal blocks.
pub fn pool_grid(
    grid: &HogGrid,
    freq: usize,
    time: usize,
    cfg: &PoolConfig,
) -> Result<FeatureVector> {
    cfg.validate()?;
    check_divides(grid.rows(), grid.cols(), freq, time)?;
    let mut values = Vec::with_capacity(freq * time * cfg.cell_width(grid.n_orient()));
    pool_blocks(grid, freq, time, cfg, &mut values);
    Ok(FeatureVector {
        values,
        signature: signature(grid, cfg, "grid"),
    })
}

/// Time pooling (`R x 1`) followed by frequency pooling (`1 x C`).
pub fn pool_marginalized(grid: &HogGrid, cfg: &PoolConfig) -> Result<FeatureVector> {
    cfg.validate()?;
    let (rows, cols) = (grid.rows(), grid.cols());
    let mut values = Vec::with_capacity((rows + cols) * cfg.cell_width(grid.n_orient()));
    pool_blocks(grid, rows, 1, cfg, &mut values);
    pool_blocks(grid, 1, cols, cfg, &mut values);
    Ok(FeatureVector {
        values,
        signature: signature(grid, cfg, "marginalized"),
    })
}

/// Every cell descriptor, frequency-major.
pub fn full_features(grid: &HogGrid, cfg: &PoolConfig) -> Result<FeatureVector> {
    let mut fv = pool_grid(grid, grid.rows(), grid.cols(), cfg)?;
    fv.signature = signature(grid, cfg, "full");
    Ok(fv)
}

/// Dispatches on `cfg.mode`.
pub fn pool(grid: &HogGrid, cfg: &PoolConfig) -> Result<FeatureVector> {
    match cfg.mode {
        PoolMode::Marginalized => pool_marginalized(grid, cfg),
        PoolMode::Grid { freq, time } => pool_grid(grid, freq, time, cfg),
        PoolMode::Full => full_features(grid, cfg),
    }
}
