//! Histograms of oriented gradients on a time-frequency image.
//!
//! Orientations are measured with `atan2(Gy, Gx)`, `Gx` along time
//! (columns) and `Gy` along frequency (rows). Each pixel votes its gradient
//! magnitude into one of `2B` signed bins covering `[0, 2π)`. The unsigned
//! histogram folds opposite directions together: `u[j] = s[j] + s[j + B]`.
//!
//! Each cell is normalized four times, once per 2x2 cell neighborhood it
//! belongs to (up-left, up-right, down-left, down-right). Every normalized
//! copy is clipped at `clip_tau`; the stored histograms are the average of
//! the four copies, and the four per-neighborhood sums of the clipped
//! unsigned copy are kept as the cell's normalization factors.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::error::{arg_err, config_err, Result};
use crate::tfr::TfrImage;
use crate::Matrix;

/// Number of neighborhood normalization factors per cell.
pub const N_FACTORS: usize = 4;

/// `(δ_row, δ_col)` of the four normalizing neighborhoods, in factor order.
pub const NEIGHBORHOODS: [(isize, isize); N_FACTORS] = [(-1, -1), (-1, 1), (1, -1), (1, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HogVariant {
    Signed,
    Unsigned,
    Both,
}

impl HogVariant {
    pub fn uses_signed(self) -> bool {
        matches!(self, Self::Signed | Self::Both)
    }

    pub fn uses_unsigned(self) -> bool {
        matches!(self, Self::Unsigned | Self::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HogConfig {
    /// Cell side in pixels.
    pub cell_size: usize,
    /// Unsigned orientation bins `B`; the signed histogram has `2B`.
    pub n_orient: usize,
    /// Which histograms the pooled feature keeps.
    pub variant: HogVariant,
    /// Whether the pooled feature keeps the 4 normalization factors.
    pub include_factors: bool,
    pub clip_tau: f64,
    pub eps_norm: f64,
}

impl Default for HogConfig {
    fn default() -> Self {
        Self {
            cell_size: 8,
            n_orient: 8,
            variant: HogVariant::Both,
            include_factors: false,
            clip_tau: 0.2,
            eps_norm: 1e-10,
        }
    }
}

impl HogConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cell_size == 0 {
            return Err(config_err!("cell_size must be positive"));
        }
        if self.n_orient == 0 {
            return Err(config_err!("n_orient must be positive"));
        }
        if !(self.clip_tau > 0.0 && self.clip_tau <= 1.0) {
            return Err(config_err!(
                "clip_tau must be in (0, 1], got {}",
                self.clip_tau
            ));
        }
        if !(self.eps_norm > 0.0 && self.eps_norm.is_finite()) {
            return Err(config_err!(
                "eps_norm must be positive, got {}",
                self.eps_norm
            ));
        }
        Ok(())
    }

    /// Fails unless both image sides are multiples of the cell size.
    pub fn check_image(&self, height: usize, width: usize) -> Result<()> {
        self.validate()?;
        if !height.is_multiple_of(self.cell_size) || !width.is_multiple_of(self.cell_size) {
            return Err(config_err!(
                "image {height}x{width} is not divisible by cell_size {}",
                self.cell_size
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    /// Derivative along time (columns).
    pub gx: Matrix,
    /// Derivative along frequency (rows).
    pub gy: Matrix,
}

/// Central differences, one-sided at the borders.
pub fn gradient(img: &Matrix) -> Result<Gradients> {
    let (h, w) = (img.rows(), img.cols());
    if h < 2 || w < 2 {
        return Err(arg_err!("gradient needs at least a 2x2 image, got {h}x{w}"));
    }
    let diff = |hi: f64, lo: f64, span: usize| (hi - lo) / span as f64;
    let gx = Matrix::from_fn(h, w, |i, j| {
        let (a, b) = (j.saturating_sub(1), (j + 1).min(w - 1));
        diff(img[(i, b)], img[(i, a)], b - a)
    });
    let gy = Matrix::from_fn(h, w, |i, j| {
        let (a, b) = (i.saturating_sub(1), (i + 1).min(h - 1));
        diff(img[(b, j)], img[(a, j)], b - a)
    });
    Ok(Gradients { gx, gy })
}

/// Magnitude-weighted signed orientation votes per cell, before normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct RawHistograms {
    rows: usize,
    cols: usize,
    n_orient: usize,
    data: Vec<f64>,
}

impl RawHistograms {
    /// Builds accumulators from explicit per-cell signed histograms
    /// (`rows * cols * 2 * n_orient` values, row-major cells).
    pub fn from_vec(rows: usize, cols: usize, n_orient: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols * 2 * n_orient {
            return Err(arg_err!(
                "expected {} accumulator values, got {}",
                rows * cols * 2 * n_orient,
                data.len()
            ));
        }
        if data.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(arg_err!("accumulators must be finite and nonnegative"));
        }
        Ok(Self {
            rows,
            cols,
            n_orient,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n_orient(&self) -> usize {
        self.n_orient
    }

    pub fn signed(&self, r: usize, c: usize) -> &[f64] {
        let width = 2 * self.n_orient;
        let at = (r * self.cols + c) * width;
        &self.data[at..at + width]
    }

    /// Opposite-direction fold of the signed accumulator.
    pub fn unsigned(&self, r: usize, c: usize) -> Vec<f64> {
        let s = self.signed(r, c);
        let b = self.n_orient;
        (0..b).map(|j| s[j] + s[j + b]).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.data.iter().sum()
    }
}

/// Signed orientation bin of a gradient, `floor(θ / (2π / 2B)) mod 2B`.
#[inline]
pub fn signed_bin(gx: f64, gy: f64, n_orient: usize) -> usize {
    let n = 2 * n_orient;
    let mut theta = libm::atan2(gy, gx);
    if theta < 0.0 {
        theta += TAU;
    }
    (libm::floor(theta / (TAU / n as f64)) as usize) % n
}

pub fn cell_histograms(grad: &Gradients, cfg: &HogConfig) -> Result<RawHistograms> {
    let (h, w) = (grad.gx.rows(), grad.gx.cols());
    if grad.gy.rows() != h || grad.gy.cols() != w {
        return Err(arg_err!("gradient components differ in shape"));
    }
    cfg.check_image(h, w)?;
    let cs = cfg.cell_size;
    let (rows, cols) = (h / cs, w / cs);
    let n_bins = 2 * cfg.n_orient;
    let mut data = vec![0.0; rows * cols * n_bins];

    for r in 0..rows {
        for c in 0..cols {
            let hist = &mut data[(r * cols + c) * n_bins..(r * cols + c + 1) * n_bins];
            for i in r * cs..(r + 1) * cs {
                for j in c * cs..(c + 1) * cs {
                    let (gx, gy) = (grad.gx[(i, j)], grad.gy[(i, j)]);
                    let m = libm::sqrt(gx * gx + gy * gy);
                    if m > 0.0 {
                        hist[signed_bin(gx, gy, cfg.n_orient)] += m;
                    }
                }
            }
        }
    }
    Ok(RawHistograms {
        rows,
        cols,
        n_orient: cfg.n_orient,
        data,
    })
}

/// Per-cell normalized descriptors on an `R x C` grid, row 0 lowest frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct HogGrid {
    rows: usize,
    cols: usize,
    n_orient: usize,
    signed: Vec<f64>,
    unsigned: Vec<f64>,
    factors: Vec<f64>,
}

impl HogGrid {
    /// Builds a grid from row-major per-cell blocks of `2B`, `B` and
    /// [`N_FACTORS`] values.
    pub fn from_parts(
        rows: usize,
        cols: usize,
        n_orient: usize,
        signed: Vec<f64>,
        unsigned: Vec<f64>,
        factors: Vec<f64>,
    ) -> Result<Self> {
        let cells = rows * cols;
        if cells == 0 || n_orient == 0 {
            return Err(arg_err!(
                "grid must have at least one cell and one orientation"
            ));
        }
        if signed.len() != cells * 2 * n_orient
            || unsigned.len() != cells * n_orient
            || factors.len() != cells * N_FACTORS
        {
            return Err(arg_err!(
                "part lengths do not match a {rows}x{cols} grid with {n_orient} orientations"
            ));
        }
        Ok(Self {
            rows,
            cols,
            n_orient,
            signed,
            unsigned,
            factors,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n_orient(&self) -> usize {
        self.n_orient
    }

    pub fn signed(&self, r: usize, c: usize) -> &[f64] {
        let w = 2 * self.n_orient;
        let at = (r * self.cols + c) * w;
        &self.signed[at..at + w]
    }

    pub fn unsigned(&self, r: usize, c: usize) -> &[f64] {
        let w = self.n_orient;
        let at = (r * self.cols + c) * w;
        &self.unsigned[at..at + w]
    }

    pub fn factors(&self, r: usize, c: usize) -> &[f64] {
        let at = (r * self.cols + c) * N_FACTORS;
        &self.factors[at..at + N_FACTORS]
    }

    /// Grid whose cell `(r, c)` is this grid's cell `(r, (c + shift) mod C)`.
    pub fn rotate_columns(&self, shift: usize) -> Self {
        let mut out = self.clone();
        let (b, cols) = (self.n_orient, self.cols);
        for r in 0..self.rows {
            for c in 0..cols {
                let src = r * cols + (c + shift) % cols;
                let dst = r * cols + c;
                out.signed[dst * 2 * b..(dst + 1) * 2 * b]
                    .copy_from_slice(&self.signed[src * 2 * b..(src + 1) * 2 * b]);
                out.unsigned[dst * b..(dst + 1) * b]
                    .copy_from_slice(&self.unsigned[src * b..(src + 1) * b]);
                out.factors[dst * N_FACTORS..(dst + 1) * N_FACTORS]
                    .copy_from_slice(&self.factors[src * N_FACTORS..(src + 1) * N_FACTORS]);
            }
        }
        out
    }

    /// Every stored value: signed, unsigned, then factors.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.signed
            .iter()
            .chain(&self.unsigned)
            .chain(&self.factors)
            .copied()
    }
}

pub fn normalize_cells(raw: &RawHistograms, cfg: &HogConfig) -> Result<HogGrid> {
    cfg.validate()?;
    if raw.n_orient != cfg.n_orient {
        return Err(arg_err!(
            "accumulators have {} orientations, config has {}",
            raw.n_orient,
            cfg.n_orient
        ));
    }
    let (rows, cols, b) = (raw.rows, raw.cols, raw.n_orient);
    let energy: Vec<f64> = (0..rows * cols)
        .map(|idx| {
            raw.unsigned(idx / cols, idx % cols)
                .iter()
                .map(|u| u * u)
                .sum()
        })
        .collect();
    let e = |r: isize, c: isize| {
        let r = r.clamp(0, rows as isize - 1) as usize;
        let c = c.clamp(0, cols as isize - 1) as usize;
        energy[r * cols + c]
    };

    let mut signed = vec![0.0; rows * cols * 2 * b];
    let mut unsigned = vec![0.0; rows * cols * b];
    let mut factors = vec![0.0; rows * cols * N_FACTORS];
    let tau = cfg.clip_tau;

    for r in 0..rows {
        for c in 0..cols {
            let idx = r * cols + c;
            let s_raw = raw.signed(r, c);
            let u_raw = raw.unsigned(r, c);
            let s_out = &mut signed[idx * 2 * b..(idx + 1) * 2 * b];
            let u_out = &mut unsigned[idx * b..(idx + 1) * b];
            let (ri, ci) = (r as isize, c as isize);
            for (f, &(dr, dc)) in NEIGHBORHOODS.iter().enumerate() {
                let norm = libm::sqrt(
                    e(ri, ci)
                        + e(ri + dr, ci)
                        + e(ri, ci + dc)
                        + e(ri + dr, ci + dc)
                        + cfg.eps_norm,
                );
                for (o, &v) in s_out.iter_mut().zip(s_raw) {
                    *o += (v / norm).min(tau);
                }
                let mut sum = 0.0;
                for (o, &v) in u_out.iter_mut().zip(&u_raw) {
                    let clipped = (v / norm).min(tau);
                    *o += clipped;
                    sum += clipped;
                }
                factors[idx * N_FACTORS + f] = sum;
            }
            for v in s_out.iter_mut().chain(u_out.iter_mut()) {
                *v /= N_FACTORS as f64;
            }
        }
    }
    Ok(HogGrid {
        rows,
        cols,
        n_orient: b,
        signed,
        unsigned,
        factors,
    })
}

/// Gradient, cell voting and normalization in one call.
pub fn hog(img: &TfrImage, cfg: &HogConfig) -> Result<HogGrid> {
    cfg.check_image(img.height(), img.width())?;
    let grad = gradient(img.pixels())?;
    let raw = cell_histograms(&grad, cfg)?;
    normalize_cells(&raw, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(cell: usize) -> HogConfig {
        HogConfig {
            cell_size: cell,
            ..HogConfig::default()
        }
    }

    #[test]
    fn ramp_gradients() {
        let w = 16;
        let ramp = Matrix::from_fn(8, w, |_, j| j as f64 / w as f64);
        let g = gradient(&ramp).unwrap();
        assert!(g
            .gx
            .as_slice()
            .iter()
            .all(|v| (v - 1.0 / w as f64).abs() < 1e-15));
        assert!(g.gy.as_slice().iter().all(|&v| v == 0.0));

        let h = 8;
        let ramp = Matrix::from_fn(h, 16, |i, _| i as f64 / h as f64);
        let g = gradient(&ramp).unwrap();
        assert!(g
            .gy
            .as_slice()
            .iter()
            .all(|v| (v - 1.0 / h as f64).abs() < 1e-15));
        assert!(g.gx.as_slice().iter().all(|&v| v == 0.0));

        let g = gradient(&Matrix::filled(4, 4, 0.3)).unwrap();
        assert!(g
            .gx
            .as_slice()
            .iter()
            .chain(g.gy.as_slice())
            .all(|&v| v == 0.0));
        assert!(gradient(&Matrix::zeros(1, 4)).is_err());
    }

    #[test]
    fn bin_edges() {
        assert_eq!(signed_bin(1.0, 0.0, 8), 0);
        assert_eq!(signed_bin(0.0, 1.0, 8), 4);
        assert_eq!(signed_bin(-1.0, 0.0, 8), 8);
        assert_eq!(signed_bin(0.0, -1.0, 8), 12);
        assert_eq!(signed_bin(1.0, -1e-3, 8), 15);
        assert_eq!(signed_bin(1.0, -1e-300, 8), 0);
    }

    #[test]
    fn ramp_votes_in_one_bin() {
        let horiz = Matrix::from_fn(16, 16, |_, j| j as f64 / 16.0);
        let raw = cell_histograms(&gradient(&horiz).unwrap(), &cfg(8)).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let s = raw.signed(r, c);
                assert!(s[0] > 0.0);
                assert!(s[1..].iter().all(|&v| v == 0.0));
            }
        }
        let vert = Matrix::from_fn(16, 16, |i, _| i as f64 / 16.0);
        let raw = cell_histograms(&gradient(&vert).unwrap(), &cfg(8)).unwrap();
        let s = raw.signed(1, 1);
        assert!(s[4] > 0.0);
        assert_eq!(s.iter().filter(|&&v| v != 0.0).count(), 1);
    }

    #[test]
    fn zero_accumulators_stay_zero() {
        let raw = RawHistograms::from_vec(3, 3, 8, vec![0.0; 3 * 3 * 16]).unwrap();
        let grid = normalize_cells(&raw, &cfg(8)).unwrap();
        assert!(grid.values().all(|v| v == 0.0));
    }

    #[test]
    fn uniform_accumulators_closed_form() {
        let (b, v, eps, tau) = (8usize, 0.01, 1e-10, 0.2);
        let raw = RawHistograms::from_vec(4, 5, b, vec![v; 4 * 5 * 2 * b]).unwrap();
        let grid = normalize_cells(&raw, &cfg(8)).unwrap();
        let norm = libm::sqrt(4.0 * b as f64 * (2.0 * v) * (2.0 * v) + eps);
        let u = (2.0 * v / norm).min(tau);
        let s = (v / norm).min(tau);
        for r in 0..4 {
            for c in 0..5 {
                assert!(grid.unsigned(r, c).iter().all(|x| (x - u).abs() < 1e-12));
                assert!(grid.signed(r, c).iter().all(|x| (x - s).abs() < 1e-12));
                assert!(grid
                    .factors(r, c)
                    .iter()
                    .all(|x| (x - b as f64 * u).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn lone_cell_saturates_clip() {
        let b = 8;
        let mut data = vec![0.0; 3 * 3 * 2 * b];
        let centre = (3 + 1) * 2 * b;
        data[centre + 2] = 5.0;
        let raw = RawHistograms::from_vec(3, 3, b, data).unwrap();
        let c = HogConfig {
            eps_norm: 1e-300,
            ..cfg(8)
        };
        let grid = normalize_cells(&raw, &c).unwrap();
        assert_eq!(grid.unsigned(1, 1)[2], 0.2);
        assert_eq!(grid.signed(1, 1)[2], 0.2);
        assert!(grid.factors(1, 1).iter().all(|&f| f == 0.2));
    }

    #[test]
    fn divisibility_is_enforced() {
        let img = TfrImage::new(Matrix::zeros(20, 16)).unwrap();
        assert!(matches!(hog(&img, &cfg(8)), Err(crate::Error::Config(_))));
    }

    #[test]
    fn constant_image_gives_zero_grid() {
        let img = TfrImage::new(Matrix::filled(64, 64, 0.5)).unwrap();
        let grid = hog(&img, &cfg(8)).unwrap();
        assert_eq!((grid.rows(), grid.cols()), (8, 8));
        assert!(grid.values().all(|v| v == 0.0));
    }

    #[test]
    fn horizontal_ramp_descriptor() {
        let img = TfrImage::new(Matrix::from_fn(32, 32, |_, j| j as f64 / 32.0)).unwrap();
        let grid = hog(&img, &cfg(8)).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                assert!(grid.signed(r, c)[0] > 0.0);
                assert!(grid.signed(r, c)[1..].iter().all(|&v| v == 0.0));
                assert!(grid.unsigned(r, c)[0] > 0.0);
                assert!(grid.unsigned(r, c)[1..].iter().all(|&v| v == 0.0));
            }
        }
    }
}
