//! Mono 16 kHz audio clips and 16-bit PCM WAV I/O.

use std::path::Path;

use crate::error::{Error, Result};
use crate::{HOP, SAMPLE_RATE, WINDOW_LEN};

/// A mono clip sampled at 16 kHz, amplitude nominally in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f32>,
}

impl AudioClip {
    /// Builds a clip, rejecting any rate other than 16 kHz and non-finite samples.
    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Result<Self> {
        if sample_rate != SAMPLE_RATE {
            return Err(Error::SampleRate(sample_rate));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFiniteSample(i));
        }
        Ok(AudioClip { samples })
    }

    pub fn from_samples(samples: Vec<f32>) -> Result<Self> {
        Self::new(samples, SAMPLE_RATE)
    }

    pub fn silence(len: usize) -> Self {
        AudioClip {
            samples: vec![0.0; len],
        }
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f32> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        SAMPLE_RATE
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / SAMPLE_RATE as f64
    }

    /// Number of complete 20 ms / 10 ms frames, zero when shorter than a window.
    pub fn frame_count(&self) -> usize {
        frame_count_for(self.samples.len())
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|&s| s as f64 * s as f64).sum()
    }

    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            0.0
        } else {
            (self.energy() / self.samples.len() as f64).sqrt()
        }
    }

    /// Reads a 16-bit PCM mono 16 kHz WAV file.
    pub fn read_wav(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        read_wav_inner(path).map_err(|e| e.in_file(path))
    }

    /// Writes the clip as 16-bit PCM, clipping to [-1, 1].
    pub fn write_wav(&self, path: impl AsRef<Path>) -> Result<()> {
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: SAMPLE_RATE,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut writer = hound::WavWriter::create(path.as_ref(), spec).map_err(wav_err)?;
        for &s in &self.samples {
            writer.write_sample(to_pcm16(s)).map_err(wav_err)?;
        }
        writer.finalize().map_err(wav_err)
    }
}

pub(crate) fn frame_count_for(len: usize) -> usize {
    if len < WINDOW_LEN {
        0
    } else {
        (len - WINDOW_LEN) / HOP + 1
    }
}

pub fn to_pcm16(s: f32) -> i16 {
    (s.clamp(-1.0, 1.0) * 32767.0).round() as i16
}

fn open_checked(path: &Path) -> Result<hound::WavReader<std::io::BufReader<std::fs::File>>> {
    let reader = hound::WavReader::open(path).map_err(wav_err)?;
    let spec = reader.spec();
    if spec.sample_rate != SAMPLE_RATE {
        return Err(Error::SampleRate(spec.sample_rate));
    }
    if spec.channels != 1 {
        return Err(Error::UnsupportedWav(format!(
            "{} channels, only mono is supported",
            spec.channels
        )));
    }
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(Error::UnsupportedWav(format!(
            "{:?} {}-bit samples, only 16-bit PCM is supported",
            spec.sample_format, spec.bits_per_sample
        )));
    }
    Ok(reader)
}

fn read_wav_inner(path: &Path) -> Result<AudioClip> {
    let samples = open_checked(path)?
        .into_samples::<i16>()
        .map(|s| s.map(|v| v as f32 / 32768.0))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(wav_err)?;
    AudioClip::from_samples(samples)
}

/// Chunked reader for 16 kHz mono 16-bit WAV files.
pub struct WavStream {
    reader: hound::WavReader<std::io::BufReader<std::fs::File>>,
    path: std::path::PathBuf,
}

impl WavStream {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let reader = open_checked(path).map_err(|e| e.in_file(path))?;
        Ok(WavStream {
            reader,
            path: path.to_path_buf(),
        })
    }

    /// Total samples in the file.
    pub fn len(&self) -> usize {
        self.reader.len() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Up to `max` further samples; empty at end of file.
    pub fn next_chunk(&mut self, max: usize) -> Result<Vec<f32>> {
        let mut out = Vec::with_capacity(max);
        for s in self.reader.samples::<i16>().take(max) {
            let v = s.map_err(|e| wav_err(e).in_file(&self.path))? as f32 / 32768.0;
            out.push(v);
        }
        Ok(out)
    }
}

fn wav_err(e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(io) => Error::Io(io),
        other => Error::UnsupportedWav(other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_other_rates_and_nan() {
        assert!(matches!(
            AudioClip::new(vec![0.0; 10], 44_100),
            Err(Error::SampleRate(44_100))
        ));
        assert!(matches!(
            AudioClip::from_samples(vec![0.0, f32::NAN]),
            Err(Error::NonFiniteSample(1))
        ));
    }

    #[test]
    fn wav_round_trip_and_rate_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.wav");
        let clip = AudioClip::from_samples((0..800).map(|i| (i as f32 * 0.01).sin() * 0.5).collect())
            .unwrap();
        clip.write_wav(&path).unwrap();
        let back = AudioClip::read_wav(&path).unwrap();
        assert_eq!(back.len(), 800);
        for (a, b) in clip.samples().iter().zip(back.samples()) {
            assert!((a - b).abs() < 1e-4);
        }

        let bad = dir.path().join("b.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&bad, spec).unwrap();
        w.write_sample(0i16).unwrap();
        w.finalize().unwrap();
        let err = AudioClip::read_wav(&bad).unwrap_err();
        assert!(err.to_string().contains("8000"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn frame_count_matches_grid_arithmetic() {
        assert_eq!(AudioClip::silence(16_000).frame_count(), 99);
        assert_eq!(AudioClip::silence(320).frame_count(), 1);
        assert_eq!(AudioClip::silence(319).frame_count(), 0);
    }
}
