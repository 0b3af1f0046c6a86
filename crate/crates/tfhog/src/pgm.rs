//! 8-bit binary PGM (P5) images.

use std::path::Path;

use tfhog_core::Matrix;

use crate::atomic::write_atomic;
use crate::error::Result;

/// Row 0 of `m` becomes the bottom image row, so low frequencies sit at the
/// bottom of a spectrogram. Values are clamped to `[0, 1]` and stored as
/// `round(255 v)`. Each entry is drawn as a `scale x scale` block.
pub fn encode(m: &Matrix, scale: usize, bottom_up: bool) -> Vec<u8> {
    let scale = scale.max(1);
    let (h, w) = (m.rows() * scale, m.cols() * scale);
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    for y in 0..h {
        let r = if bottom_up {
            m.rows() - 1 - y / scale
        } else {
            y / scale
        };
        for x in 0..w {
            let v = m[(r, x / scale)].clamp(0.0, 1.0);
            out.push((255.0 * v).round() as u8);
        }
    }
    out
}

pub fn write_pgm(path: &Path, m: &Matrix, scale: usize, bottom_up: bool) -> Result<()> {
    write_atomic(path, &encode(m, scale, bottom_up))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_values() {
        let m = Matrix::from_vec(2, 2, vec![0.0, 1.0, 0.5, 2.0]).unwrap();
        let b = encode(&m, 1, false);
        assert_eq!(&b[..11], b"P5\n2 2\n255\n");
        assert_eq!(&b[11..], &[0, 255, 128, 255]);
        let b = encode(&m, 1, true);
        assert_eq!(&b[11..], &[128, 255, 0, 255]);
        assert_eq!(encode(&m, 3, false).len(), 11 + 36);
    }
}
