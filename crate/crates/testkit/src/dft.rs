//! Fourier sums evaluated term by term.

use std::f64::consts::PI;

/// Magnitude of `Σ_n x[n] e^{-2πi f n / fs}`.
pub fn dtft_magnitude(x: &[f64], freq_hz: f64, fs: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (n, v) in x.iter().enumerate() {
        let ph = 2.0 * PI * freq_hz * n as f64 / fs;
        re += v * ph.cos();
        im -= v * ph.sin();
    }
    re.hypot(im)
}

/// Frequency in `[lo, hi]` where the DTFT magnitude peaks: a coarse scan
/// followed by ternary refinement around the best grid point.
pub fn peak_frequency(x: &[f64], fs: f64, lo: f64, hi: f64) -> f64 {
    let steps = 2 * x.len().max(64);
    let step = (hi - lo) / steps as f64;
    let mut best = (lo, f64::NEG_INFINITY);
    for k in 0..=steps {
        let f = lo + k as f64 * step;
        let m = dtft_magnitude(x, f, fs);
        if m > best.1 {
            best = (f, m);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    for _ in 0..60 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if dtft_magnitude(x, m1, fs) < dtft_magnitude(x, m2, fs) {
            a = m1;
        } else {
            b = m2;
        }
    }
    0.5 * (a + b)
}

/// `(1/len) Σ_{n<len} x[start+n] w[n] e^{-2πi f n / fs}` with the periodic
/// Hann window `w[n] = ½ - ½cos(2πn/len)`; samples outside `x` count as 0.
pub fn hann_coefficient(x: &[f64], start: isize, len: usize, freq_hz: f64, fs: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for n in 0..len {
        let idx = start + n as isize;
        if idx < 0 || idx as usize >= x.len() {
            continue;
        }
        let w = 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos();
        let ph = 2.0 * PI * freq_hz * n as f64 / fs;
        let v = x[idx as usize] * w;
        re += v * ph.cos();
        im -= v * ph.sin();
    }
    re.hypot(im) / len as f64
}
