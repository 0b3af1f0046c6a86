//! Constant-Q analysis and the fixed-size time-frequency image.
//!
//! Rows of every matrix here are frequency bins (row 0 is the lowest
//! frequency) and columns are analysis frames.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{arg_err, config_err, Result};
use crate::signal::AudioClip;
use crate::Matrix;

/// Added to magnitudes before taking decibels.
pub const EPS_MAG: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CqtConfig {
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub bins_per_octave: u32,
    pub hop_samples: usize,
}

impl Default for CqtConfig {
    fn default() -> Self {
        Self {
            f_min_hz: 20.0,
            f_max_hz: 10_000.0,
            bins_per_octave: 8,
            hop_samples: 256,
        }
    }
}

impl CqtConfig {
    /// Quality factor `1 / (2^(1/b) - 1)`.
    pub fn q(&self) -> f64 {
        1.0 / (libm::exp2(1.0 / f64::from(self.bins_per_octave)) - 1.0)
    }

    /// `floor(b · log2(f_max / f_min)) + 1`.
    pub fn n_bins(&self) -> usize {
        let octaves = libm::log2(self.f_max_hz / self.f_min_hz);
        // Nudge so exact octave ratios are not lost to rounding.
        libm::floor(f64::from(self.bins_per_octave) * octaves + 1e-9) as usize + 1
    }

    pub fn center_frequency(&self, bin: usize) -> f64 {
        self.f_min_hz * libm::exp2(bin as f64 / f64::from(self.bins_per_octave))
    }

    /// Analysis window length `ceil(Q · fs / f)` for a bin of center frequency `f`.
    pub fn window_length(&self, freq_hz: f64, sample_rate_hz: u32) -> usize {
        libm::ceil(self.q() * f64::from(sample_rate_hz) / freq_hz) as usize
    }

    pub fn n_frames(&self, n_samples: usize) -> usize {
        n_samples / self.hop_samples + 1
    }

    /// Checks the configuration against a clip's rate and length.
    pub fn validate(&self, sample_rate_hz: u32, n_samples: usize) -> Result<()> {
        if self.bins_per_octave == 0 {
            return Err(config_err!("bins_per_octave must be positive"));
        }
        if self.hop_samples == 0 {
            return Err(config_err!("hop_samples must be positive"));
        }
        if !(self.f_min_hz > 0.0 && self.f_min_hz.is_finite()) {
            return Err(config_err!("f_min must be positive, got {}", self.f_min_hz));
        }
        if !(self.f_min_hz < self.f_max_hz) {
            return Err(config_err!(
                "f_min ({}) must be below f_max ({})",
                self.f_min_hz,
                self.f_max_hz
            ));
        }
        let nyquist = f64::from(sample_rate_hz) / 2.0;
        if self.f_max_hz > nyquist {
            return Err(config_err!(
                "f_max ({} Hz) exceeds the Nyquist frequency ({nyquist} Hz)",
                self.f_max_hz
            ));
        }
        if self.n_bins() < 2 {
            return Err(config_err!(
                "frequency range [{}, {}] gives fewer than 2 bins",
                self.f_min_hz,
                self.f_max_hz
            ));
        }
        let longest = self.window_length(self.f_min_hz, sample_rate_hz);
        if longest > n_samples {
            return Err(config_err!(
                "longest analysis window ({longest} samples at f_min = {} Hz) exceeds clip length ({n_samples} samples)",
                self.f_min_hz
            ));
        }
        Ok(())
    }
}

/// Complex constant-Q coefficients, `bins x frames`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Cqt {
    bins: usize,
    frames: usize,
    data: Vec<Complex64>,
    frequencies: Vec<f64>,
}

impl Cqt {
    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    #[inline]
    pub fn get(&self, bin: usize, frame: usize) -> Complex64 {
        self.data[bin * self.frames + frame]
    }

    pub fn magnitude(&self) -> Matrix {
        let data = self.data.iter().map(|c| libm::hypot(c.re, c.im)).collect();
        Matrix::from_vec(self.bins, self.frames, data).expect("shape is consistent")
    }
}

/// One bin's analysis kernel: Hann window times a complex exponential,
/// divided by the window length.
struct BinKernel {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl BinKernel {
    fn new(freq_hz: f64, len: usize, sample_rate_hz: u32) -> Self {
        let fs = f64::from(sample_rate_hz);
        let norm = 1.0 / len as f64;
        let mut re = Vec::with_capacity(len);
        let mut im = Vec::with_capacity(len);
        for n in 0..len {
            let w = hann(n, len) * norm;
            let phase = TAU * freq_hz * n as f64 / fs;
            re.push(w * libm::cos(phase));
            im.push(-w * libm::sin(phase));
        }
        Self { re, im }
    }

    fn len(&self) -> usize {
        self.re.len()
    }
}

/// Periodic Hann window `0.5 - 0.5 cos(2πn/N)`.
#[inline]
pub fn hann(n: usize, len: usize) -> f64 {
    0.5 - 0.5 * libm::cos(TAU * n as f64 / len as f64)
}

/// Direct constant-Q transform.
///
/// Frame `t` of bin `k` is the inner product of the signal around sample
/// `t · hop` (window starting at `t · hop - floor(N_k / 2)`, zero outside
/// the clip) with that bin's kernel.
pub fn cqt(clip: &AudioClip, cfg: &CqtConfig) -> Result<Cqt> {
    let fs = clip.sample_rate_hz();
    let x = clip.samples();
    cfg.validate(fs, x.len())?;

    let bins = cfg.n_bins();
    let frames = cfg.n_frames(x.len());
    let frequencies: Vec<f64> = (0..bins).map(|k| cfg.center_frequency(k)).collect();
    let mut data = Vec::with_capacity(bins * frames);

    for &f in &frequencies {
        let kernel = BinKernel::new(f, cfg.window_length(f, fs), fs);
        let half = (kernel.len() / 2) as isize;
        for t in 0..frames {
            let start = (t * cfg.hop_samples) as isize - half;
            data.push(windowed_product(x, start, &kernel));
        }
    }
    Ok(Cqt {
        bins,
        frames,
        data,
        frequencies,
    })
}

fn windowed_product(x: &[f64], start: isize, kernel: &BinKernel) -> Complex64 {
    let len = kernel.len() as isize;
    let lo = (-start).clamp(0, len) as usize;
    let hi = (x.len() as isize - start).clamp(0, len) as usize;
    if lo >= hi {
        return Complex64::new(0.0, 0.0);
    }
    let offset = (start + lo as isize) as usize;
    let xs = &x[offset..offset + (hi - lo)];
    let (mut re, mut im) = (0.0, 0.0);
    for ((&s, &kr), &ki) in xs.iter().zip(&kernel.re[lo..hi]).zip(&kernel.im[lo..hi]) {
        re += s * kr;
        im += s * ki;
    }
    Complex64::new(re, im)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ImageMeta {
    pub source_id: String,
    pub config_hash: u64,
    /// Set when the magnitude input was identically zero.
    pub silent: bool,
}

/// A time-frequency image with pixels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TfrImage {
    pixels: Matrix,
    pub meta: ImageMeta,
}

impl TfrImage {
    pub fn new(pixels: Matrix) -> Result<Self> {
        if let Some(v) = pixels
            .as_slice()
            .iter()
            .find(|v| !(v.is_finite() && (0.0..=1.0).contains(*v)))
        {
            return Err(arg_err!("image pixel {v} is outside [0, 1]"));
        }
        Ok(Self {
            pixels,
            meta: ImageMeta::default(),
        })
    }

    pub fn pixels(&self) -> &Matrix {
        &self.pixels
    }

    pub fn height(&self) -> usize {
        self.pixels.rows()
    }

    pub fn width(&self) -> usize {
        self.pixels.cols()
    }
}

/// Converts CQT magnitudes to a `size x size` image.
///
/// Steps: `20·log10(mag + EPS_MAG)`, clamp to `[max + db_floor, max]`,
/// map affinely onto `[0, 1]`, then bicubic resize and clamp. An all-zero
/// input gives an all-zero image with `meta.silent` set.
pub fn to_image(mag: &Matrix, size: usize, db_floor: f64) -> Result<TfrImage> {
    if mag.rows() < 2 || mag.cols() < 2 {
        return Err(arg_err!(
            "magnitude matrix must be at least 2x2, got {}x{}",
            mag.rows(),
            mag.cols()
        ));
    }
    if size == 0 {
        return Err(arg_err!("image size must be positive"));
    }
    if !(db_floor < 0.0 && db_floor.is_finite()) {
        return Err(arg_err!("db_floor must be negative, got {db_floor}"));
    }
    if let Some(v) = mag
        .as_slice()
        .iter()
        .find(|v| !(v.is_finite() && **v >= 0.0))
    {
        return Err(arg_err!("magnitude {v} is negative or not finite"));
    }

    if mag.max() == 0.0 {
        let mut img = TfrImage::new(Matrix::zeros(size, size))?;
        img.meta.silent = true;
        return Ok(img);
    }

    let db = mag.map(|m| 20.0 * libm::log10(m + EPS_MAG));
    let top = db.max();
    let bottom = top + db_floor;
    let scaled = db.map(|v| (v.clamp(bottom, top) - bottom) / -db_floor);
    let resized = resize_bicubic(&scaled, size, size).map(|v| v.clamp(0.0, 1.0));
    TfrImage::new(resized)
}

/// Catmull-Rom cubic (`a = -0.5`).
#[inline]
fn cubic(x: f64) -> f64 {
    const A: f64 = -0.5;
    let x = x.abs();
    if x <= 1.0 {
        ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A
    } else {
        0.0
    }
}

/// Source taps and normalized weights for every output sample along one axis.
struct AxisWeights {
    taps: Vec<Vec<(usize, f64)>>,
}

impl AxisWeights {
    fn new(src_len: usize, dst_len: usize) -> Self {
        let ratio = src_len as f64 / dst_len as f64;
        // Stretch the kernel when shrinking so every source sample contributes.
        let stretch = ratio.max(1.0);
        let support = 2.0 * stretch;
        let last = src_len as isize - 1;
        let taps = (0..dst_len)
            .map(|d| {
                let center = (d as f64 + 0.5) * ratio - 0.5;
                let first = libm::ceil(center - support) as isize;
                let end = libm::floor(center + support) as isize;
                let mut row: Vec<(usize, f64)> = Vec::new();
                let mut total = 0.0;
                for s in first..=end {
                    let w = cubic((s as f64 - center) / stretch);
                    if w == 0.0 {
                        continue;
                    }
                    total += w;
                    row.push((s.clamp(0, last) as usize, w));
                }
                for tap in &mut row {
                    tap.1 /= total;
                }
                row
            })
            .collect();
        Self { taps }
    }
}

/// Separable bicubic resize with edge replication.
///
/// Output sample `d` is centered at source coordinate `(d + 0.5)·in/out - 0.5`.
/// When shrinking, the kernel is widened by the shrink ratio. Resizing to
/// the same shape is the identity.
pub fn resize_bicubic(src: &Matrix, rows: usize, cols: usize) -> Matrix {
    let col_w = AxisWeights::new(src.cols(), cols);
    let row_w = AxisWeights::new(src.rows(), rows);

    let mut horizontal = Matrix::zeros(src.rows(), cols);
    for i in 0..src.rows() {
        let line = src.row(i);
        let out = horizontal.row_mut(i);
        for (o, taps) in out.iter_mut().zip(&col_w.taps) {
            *o = taps.iter().map(|&(s, w)| line[s] * w).sum();
        }
    }

    let mut out = Matrix::zeros(rows, cols);
    for (i, taps) in row_w.taps.iter().enumerate() {
        let dst = out.row_mut(i);
        for &(s, w) in taps {
            for (d, &v) in dst.iter_mut().zip(horizontal.row(s)) {
                *d += v * w;
            }
        }
    }
    out
}

/// Replaces every pixel by the mean of its `k x k` neighborhood.
///
/// The window of pixel `(i, j)` covers rows `i - k/2 .. i - k/2 + k` (and the
/// same for columns), so an even `k` leans half a pixel toward the bottom
/// right. Out-of-range pixels repeat the nearest edge value.
pub fn mean_filter(img: &TfrImage, k: usize) -> Result<TfrImage> {
    let filtered = box_mean(img.pixels(), k)?;
    Ok(TfrImage {
        pixels: filtered,
        meta: img.meta.clone(),
    })
}

/// [`mean_filter`] on a bare matrix.
pub fn box_mean(src: &Matrix, k: usize) -> Result<Matrix> {
    let (h, w) = (src.rows(), src.cols());
    if k == 0 || k > h.min(w) {
        return Err(arg_err!(
            "filter size {k} must be in 1..={} for a {h}x{w} image",
            h.min(w)
        ));
    }
    if k == 1 {
        return Ok(src.clone());
    }
    let half = (k / 2) as isize;
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;

    let mut rows_summed = Matrix::zeros(h, w);
    for i in 0..h {
        let line = src.row(i);
        for j in 0..w {
            let start = j as isize - half;
            rows_summed[(i, j)] = (0..k as isize).map(|d| line[clamp(start + d, w)]).sum();
        }
    }

    let norm = (k * k) as f64;
    let mut out = Matrix::zeros(h, w);
    for i in 0..h {
        let start = i as isize - half;
        for d in 0..k as isize {
            let s = clamp(start + d, h);
            let src_row = rows_summed.row(s);
            for (o, &v) in out.row_mut(i).iter_mut().zip(src_row) {
                *o += v;
            }
        }
        for v in out.row_mut(i) {
            *v /= norm;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tone(freq: f64, fs: u32, len: usize) -> AudioClip {
        let s = (0..len)
            .map(|n| libm::cos(TAU * freq * n as f64 / f64::from(fs)))
            .collect();
        AudioClip::new(s, fs, None, "tone").unwrap()
    }

    #[test]
    fn config_geometry() {
        let cfg = CqtConfig {
            f_min_hz: 100.0,
            f_max_hz: 200.0,
            bins_per_octave: 8,
            hop_samples: 64,
        };
        assert_eq!(cfg.n_bins(), 9);
        assert!((cfg.center_frequency(8) - 200.0).abs() < 1e-9);
        assert!((cfg.q() - 11.048779707016791).abs() < 1e-12);
        assert_eq!(cfg.n_frames(8000), 126);
    }

    #[test]
    fn config_errors_name_the_bound() {
        let cfg = CqtConfig::default();
        let err = cfg.validate(8000, 8000).unwrap_err();
        assert!(matches!(err, crate::Error::Config(ref m) if m.contains("Nyquist")));
        let cfg = CqtConfig {
            f_max_hz: 3000.0,
            ..CqtConfig::default()
        };
        let err = cfg.validate(8000, 1000).unwrap_err();
        assert!(matches!(err, crate::Error::Config(ref m) if m.contains("window")));
        let cfg = CqtConfig {
            f_min_hz: 100.0,
            f_max_hz: 105.0,
            ..CqtConfig::default()
        };
        assert!(cfg.validate(8000, 8000).is_err());
    }

    #[test]
    fn zero_clip_gives_zero_cqt() {
        let clip = AudioClip::new(vec![0.0; 8000], 8000, None, "z").unwrap();
        let cfg = CqtConfig {
            f_max_hz: 3800.0,
            hop_samples: 64,
            ..CqtConfig::default()
        };
        let c = cqt(&clip, &cfg).unwrap();
        assert_eq!(c.frames(), 126);
        assert!(c.magnitude().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn octave_tone_peaks_at_bin_eight() {
        let cfg = CqtConfig {
            f_min_hz: 100.0,
            f_max_hz: 3800.0,
            bins_per_octave: 8,
            hop_samples: 64,
        };
        let c = cqt(&tone(200.0, 8000, 8000), &cfg).unwrap();
        let mag = c.magnitude();
        let means: Vec<f64> = (0..mag.rows())
            .map(|k| mag.row(k).iter().sum::<f64>() / mag.cols() as f64)
            .collect();
        let peak = (0..means.len())
            .max_by(|&a, &b| means[a].total_cmp(&means[b]))
            .unwrap();
        assert!((7..=9).contains(&peak), "peak {peak}");
    }

    #[test]
    fn image_of_constant_is_one() {
        let img = to_image(&Matrix::filled(20, 30, 0.3), 16, -80.0).unwrap();
        assert!(img
            .pixels()
            .as_slice()
            .iter()
            .all(|&v| (v - 1.0).abs() < 1e-12));
        assert!(!img.meta.silent);
    }

    #[test]
    fn image_of_silence_is_zero_and_flagged() {
        let img = to_image(&Matrix::zeros(4, 4), 8, -80.0).unwrap();
        assert!(img.meta.silent);
        assert!(img.pixels().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn two_level_image_hits_endpoints() {
        // 1.0 and 1e-4 are 80 dB apart.
        let mag = Matrix::from_fn(16, 16, |_, j| if j < 8 { 1.0 } else { 1e-4 });
        let img = to_image(&mag, 16, -80.0).unwrap();
        let p = img.pixels();
        for i in 0..16 {
            assert!((p[(i, 2)] - 1.0).abs() < 1e-6);
            assert!(p[(i, 13)].abs() < 1e-6);
        }
    }

    #[test]
    fn image_rejects_bad_input() {
        assert!(to_image(&Matrix::zeros(1, 4), 8, -80.0).is_err());
        assert!(to_image(&Matrix::filled(2, 2, 1.0), 8, 10.0).is_err());
        assert!(to_image(&Matrix::filled(2, 2, -1.0), 8, -80.0).is_err());
    }

    #[test]
    fn resize_same_size_is_identity() {
        let src = Matrix::from_fn(32, 32, |i, j| ((i * 7 + j * 13) % 17) as f64 / 17.0);
        let out = resize_bicubic(&src, 32, 32);
        for (a, b) in src.as_slice().iter().zip(out.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn resize_preserves_constants_and_ramps() {
        let c = resize_bicubic(&Matrix::filled(5, 300, 0.25), 64, 64);
        assert!(c.as_slice().iter().all(|v| (v - 0.25).abs() < 1e-12));
        // Cubic convolution reproduces linear functions away from the edges.
        let ramp = Matrix::from_fn(8, 40, |_, j| j as f64);
        let up = resize_bicubic(&ramp, 8, 80);
        for d in 8..72 {
            let expect = (d as f64 + 0.5) * 0.5 - 0.5;
            assert!((up[(3, d)] - expect).abs() < 1e-9, "d={d}");
        }
    }

    #[test]
    fn mean_filter_cases() {
        let src = Matrix::from_fn(9, 9, |i, j| if (i, j) == (4, 4) { 1.0 } else { 0.0 });
        let img = TfrImage::new(src.clone()).unwrap();
        assert_eq!(mean_filter(&img, 1).unwrap().pixels(), &src);

        let out = box_mean(&src, 3).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let inside = (3..=5).contains(&i) && (3..=5).contains(&j);
                let expect = if inside { 1.0 / 9.0 } else { 0.0 };
                assert_eq!(out[(i, j)], expect);
            }
        }

        let flat = Matrix::filled(12, 10, 0.7);
        let out = box_mean(&flat, 4).unwrap();
        assert!(out.as_slice().iter().all(|v| (v - 0.7).abs() < 1e-15));

        assert!(box_mean(&flat, 0).is_err());
        assert!(box_mean(&flat, 11).is_err());
    }

    #[test]
    fn even_kernel_anchor() {
        // k = 2 averages pixels (i-1..=i, j-1..=j).
        let src = Matrix::from_fn(4, 4, |i, j| if (i, j) == (1, 1) { 4.0 } else { 0.0 });
        let out = box_mean(&src, 2).unwrap();
        assert_eq!(out[(1, 1)], 1.0);
        assert_eq!(out[(2, 2)], 1.0);
        assert_eq!(out[(0, 0)], 0.0);
    }
}
