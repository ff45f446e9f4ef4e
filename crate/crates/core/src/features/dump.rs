//! Binary feature dump.
//!
//! Layout (little-endian): a 16-byte header `b"PKF1"`, `u32` kind code
//! (1 Xcorr, 2 IF, 3 both), `u32` frame count, `u32` dims per frame; then
//! `frames × dims` `f32` values, Xcorr before IF within a frame.

use std::path::Path;

use crate::error::{Error, Result};
use crate::features::extractor::{FeatureFrame, FeatureKind};
use crate::features::stft::IfFeatures;
use crate::features::xcorr::XcorrFeatures;
use crate::XCORR_DIM;

pub const MAGIC: [u8; 4] = *b"PKF1";
pub const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDump {
    pub kind: FeatureKind,
    pub frames: Vec<FeatureFrame>,
}

impl FeatureDump {
    pub fn new(kind: FeatureKind, frames: Vec<FeatureFrame>) -> Result<Self> {
        for f in &frames {
            if f.kind() != Some(kind) {
                return Err(Error::InvalidArgument(format!(
                    "frame of kind {:?} in a {kind:?} dump",
                    f.kind()
                )));
            }
        }
        Ok(FeatureDump { kind, frames })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let dims = self.kind.dims();
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * dims * self.frames.len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&self.kind.code().to_le_bytes());
        out.extend_from_slice(&(self.frames.len() as u32).to_le_bytes());
        out.extend_from_slice(&(dims as u32).to_le_bytes());
        for f in &self.frames {
            for v in f.to_vec() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Truncated(format!(
                "feature header needs {HEADER_LEN} bytes, got {}",
                bytes.len()
            )));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let magic: [u8; 4] = bytes[..4].try_into().unwrap();
        if magic != MAGIC {
            return Err(Error::BadMagic {
                expected: MAGIC,
                found: magic,
            });
        }
        let code = word(4);
        let kind = FeatureKind::from_code(code)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown feature kind code {code}")))?;
        let count = word(8) as usize;
        let dims = word(12) as usize;
        if dims != kind.dims() {
            return Err(Error::dim("feature dump dims", kind.dims(), dims));
        }
        let need = HEADER_LEN + 4 * dims * count;
        if bytes.len() < need {
            return Err(Error::Truncated(format!(
                "{count} frames of {dims} values need {need} bytes, got {}",
                bytes.len()
            )));
        }
        let values: Vec<f32> = bytes[HEADER_LEN..need]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let frames = values
            .chunks_exact(dims)
            .map(|v| {
                let (x, rest) = if kind.has_xcorr() {
                    (XcorrFeatures::from_slice(&v[..XCORR_DIM]), &v[XCORR_DIM..])
                } else {
                    (None, v)
                };
                FeatureFrame {
                    xcorr: x,
                    if_feats: kind.has_if().then(|| IfFeatures::from_slice(rest).unwrap()),
                }
            })
            .collect();
        Ok(FeatureDump { kind, frames })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::from(e).in_file(path))?;
        Self::from_bytes(&bytes).map_err(|e| e.in_file(path))
    }
}
