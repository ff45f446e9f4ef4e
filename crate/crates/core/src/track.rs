//! Per-frame pitch tracks, the exchange format between estimators and the
//! evaluation harness.
//!
//! Text form is CSV with header `frame,time_s,f0_hz,confidence,voiced`.
//! The binary twin stores 9 bytes per frame: `f32` f0, `f32` confidence and
//! a `u8` voicing flag, all little-endian, with no header.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::{HOP, SAMPLE_RATE};

pub const CSV_HEADER: &str = "frame,time_s,f0_hz,confidence,voiced";
const BINARY_FRAME_BYTES: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchFrame {
    /// Estimated fundamental in Hz; 0 when the estimator has no candidate.
    pub f0_hz: f32,
    pub confidence: f32,
    pub voiced: bool,
}

impl PitchFrame {
    pub fn voiced(f0_hz: f32) -> Self {
        PitchFrame {
            f0_hz,
            confidence: 1.0,
            voiced: true,
        }
    }

    pub fn unvoiced() -> Self {
        PitchFrame {
            f0_hz: 0.0,
            confidence: 0.0,
            voiced: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PitchTrack {
    pub frames: Vec<PitchFrame>,
}

impl PitchTrack {
    pub fn new(frames: Vec<PitchFrame>) -> Self {
        PitchTrack { frames }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn voiced_count(&self) -> usize {
        self.frames.iter().filter(|f| f.voiced).count()
    }

    pub fn frame_time_s(frame: usize) -> f64 {
        (frame * HOP) as f64 / SAMPLE_RATE as f64
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(32 * (self.frames.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for (i, f) in self.frames.iter().enumerate() {
            out.push_str(&csv_row(i, f));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::from(e).in_file(path))?;
        Self::parse_csv(BufReader::new(file), path)
    }

    /// Parses either the full track CSV or the shorter label CSV
    /// (`frame,f0_hz,voiced`), picking columns by header name.
    pub fn parse_csv(reader: impl BufRead, path: &Path) -> Result<Self> {
        let parse_err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(h) => h?,
            None => return Err(parse_err(1, "empty file".into())),
        };
        let cols: Vec<&str> = header.trim().split(',').map(str::trim).collect();
        let col = |name: &str| cols.iter().position(|c| *c == name);
        let f0_col = col("f0_hz").ok_or_else(|| parse_err(1, "missing f0_hz column".into()))?;
        let voiced_col = col("voiced").ok_or_else(|| parse_err(1, "missing voiced column".into()))?;
        let conf_col = col("confidence");

        let mut frames = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            let line_no = i + 2;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let get = |c: usize| {
                fields
                    .get(c)
                    .ok_or_else(|| parse_err(line_no, format!("missing column {c}")))
            };
            let f0: f32 = get(f0_col)?
                .parse()
                .map_err(|e| parse_err(line_no, format!("f0_hz: {e}")))?;
            let voiced = match *get(voiced_col)? {
                "1" | "true" => true,
                "0" | "false" => false,
                other => return Err(parse_err(line_no, format!("voiced: bad value {other:?}"))),
            };
            let confidence = match conf_col {
                Some(c) => get(c)?
                    .parse()
                    .map_err(|e| parse_err(line_no, format!("confidence: {e}")))?,
                None => f32::from(u8::from(voiced)),
            };
            frames.push(PitchFrame {
                f0_hz: f0,
                confidence,
                voiced,
            });
        }
        Ok(PitchTrack { frames })
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.frames.len() * BINARY_FRAME_BYTES);
        for f in &self.frames {
            out.extend_from_slice(&f.f0_hz.to_le_bytes());
            out.extend_from_slice(&f.confidence.to_le_bytes());
            out.push(u8::from(f.voiced));
        }
        out
    }

    pub fn from_binary(bytes: &[u8]) -> Result<Self> {
        if bytes.len() % BINARY_FRAME_BYTES != 0 {
            return Err(Error::Truncated(format!(
                "pitch track of {} bytes is not a multiple of {BINARY_FRAME_BYTES}",
                bytes.len()
            )));
        }
        let frames = bytes
            .chunks_exact(BINARY_FRAME_BYTES)
            .map(|c| PitchFrame {
                f0_hz: f32::from_le_bytes([c[0], c[1], c[2], c[3]]),
                confidence: f32::from_le_bytes([c[4], c[5], c[6], c[7]]),
                voiced: c[8] != 0,
            })
            .collect();
        Ok(PitchTrack { frames })
    }

    pub fn write_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        w.write_all(&self.to_binary())?;
        w.flush()?;
        Ok(())
    }

    pub fn read_binary(path: impl AsRef<Path>) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path.as_ref())?.read_to_end(&mut bytes)?;
        Self::from_binary(&bytes).map_err(|e| e.in_file(path.as_ref()))
    }
}

/// One line of the track CSV, newline included.
pub fn csv_row(index: usize, f: &PitchFrame) -> String {
    format!(
        "{},{:.2},{:.3},{:.4},{}\n",
        index,
        PitchTrack::frame_time_s(index),
        f.f0_hz,
        f.confidence,
        u8::from(f.voiced)
    )
}

/// Label CSV used by corpus manifests: `frame,f0_hz,voiced`.
pub fn labels_to_csv(f0: &[f32], voiced: &[bool]) -> String {
    let mut out = String::from("frame,f0_hz,voiced\n");
    for (i, (f, v)) in f0.iter().zip(voiced).enumerate() {
        out.push_str(&format!("{i},{f:.4},{}\n", u8::from(*v)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn csv_has_expected_header_and_rows() {
        let t = PitchTrack::new(vec![PitchFrame::voiced(100.0), PitchFrame::unvoiced()]);
        let s = t.to_csv_string();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("0,0.00,100.000,1.0000,1"));
        assert_eq!(lines.next(), Some("1,0.01,0.000,0.0000,0"));
        let back = PitchTrack::parse_csv(s.as_bytes(), Path::new("mem")).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn label_csv_parses_as_track() {
        let s = labels_to_csv(&[0.0, 123.5], &[false, true]);
        let t = PitchTrack::parse_csv(s.as_bytes(), Path::new("mem")).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.frames[1].voiced);
        assert_eq!(t.frames[1].f0_hz, 123.5);
    }

    #[test]
    fn truncated_binary_is_rejected() {
        let t = PitchTrack::new(vec![PitchFrame::voiced(1.0)]);
        let b = t.to_binary();
        assert!(matches!(
            PitchTrack::from_binary(&b[..8]),
            Err(Error::Truncated(_))
        ));
    }

    proptest! {
        #[test]
        fn binary_round_trip(frames in proptest::collection::vec((0f32..600.0, 0f32..1.0, any::<bool>()), 0..50)) {
            let t = PitchTrack::new(frames.into_iter().map(|(f0_hz, confidence, voiced)| PitchFrame { f0_hz, confidence, voiced }).collect());
            prop_assert_eq!(PitchTrack::from_binary(&t.to_binary()).unwrap(), t);
        }
    }
}
