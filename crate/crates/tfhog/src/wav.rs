//! WAV reading (any channel count, integer PCM or 32-bit float) and writing.

use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use tfhog_core::signal::AudioClip;

use crate::error::{Error, Result};

fn wav_error(path: &Path, e: hound::Error) -> Error {
    match e {
        // hound reports short reads as io errors; the file itself opened fine.
        hound::Error::IoError(io) => {
            Error::format(path, format!("truncated or unreadable WAV data: {io}"))
        }
        hound::Error::Unsupported => Error::format(path, "unsupported WAV codec or sample layout"),
        other => Error::format(path, format!("malformed WAV file: {other}")),
    }
}

/// Decodes `path` to mono samples in `[-1, 1]` by averaging channels.
/// Integer PCM is scaled by `2^(bits - 1)`.
pub fn read_samples(path: &Path) -> Result<(Vec<f64>, u32)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader =
        WavReader::new(std::io::BufReader::new(file)).map_err(|e| wav_error(path, e))?;
    let spec = reader.spec();
    let channels = usize::from(spec.channels);
    if channels == 0 {
        return Err(Error::format(path, "WAV header declares zero channels"));
    }
    let interleaved: Vec<f64> = match spec.sample_format {
        SampleFormat::Float => {
            if spec.bits_per_sample != 32 {
                return Err(Error::format(
                    path,
                    format!("unsupported {}-bit float samples", spec.bits_per_sample),
                ));
            }
            reader
                .samples::<f32>()
                .map(|s| s.map(f64::from))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| wav_error(path, e))?
        }
        SampleFormat::Int => {
            let scale = f64::from(1u32 << (spec.bits_per_sample.clamp(1, 32) - 1));
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| f64::from(v) / scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| wav_error(path, e))?
        }
    };
    let mono = interleaved
        .chunks_exact(channels)
        .map(|frame| frame.iter().sum::<f64>() / channels as f64)
        .collect();
    Ok((mono, spec.sample_rate))
}

pub fn read_clip(path: &Path, label: Option<String>, source_id: &str) -> Result<AudioClip> {
    let (samples, rate) = read_samples(path)?;
    AudioClip::new(samples, rate, label, source_id)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

/// Writes mono 32-bit float samples.
pub fn write_wav_f32(path: &Path, samples: &[f64], sample_rate_hz: u32) -> Result<()> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: sample_rate_hz,
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let mut writer = WavWriter::create(path, spec).map_err(|e| wav_error(path, e))?;
    for &s in samples {
        writer
            .write_sample(s as f32)
            .map_err(|e| wav_error(path, e))?;
    }
    writer.finalize().map_err(|e| wav_error(path, e))
}
