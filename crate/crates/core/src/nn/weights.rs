//! Named-tensor weight files.
//!
//! Little-endian layout:
//!
//! ```text
//! header   b"PKW1" | u32 version (1) | u32 arch code | u32 tensor count
//! toc      per tensor: u32 name_len | name (utf-8) | u32 ndim | u32 dims[ndim]
//!                      | u64 element offset into the data section
//! data     f32 values of every tensor, row-major, in toc order
//! ```

use std::path::Path;

use crate::error::{Error, Result};
use crate::nn::arch::{ArchKind, ArchSpec};

pub const MAGIC: [u8; 4] = *b"PKW1";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelWeights {
    spec: ArchSpec,
    tensors: Vec<Tensor>,
}

impl ModelWeights {
    pub fn zeros(spec: ArchSpec) -> Self {
        let tensors = spec
            .tensors()
            .into_iter()
            .map(|t| Tensor {
                name: t.name.to_string(),
                data: vec![0.0; t.len()],
                shape: t.shape,
            })
            .collect();
        ModelWeights { spec, tensors }
    }

    /// Builds weights from tensors, checking them against `spec`.
    pub fn from_tensors(spec: ArchSpec, tensors: Vec<Tensor>) -> Result<Self> {
        check_layout(&spec, tensors.iter().map(|t| (t.name.as_str(), t.shape.as_slice())))?;
        for t in &tensors {
            if t.data.len() != t.shape.iter().product::<usize>() {
                return Err(Error::dim(format!("tensor {}", t.name), t.shape.iter().product(), t.data.len()));
            }
        }
        Ok(ModelWeights { spec, tensors })
    }

    pub fn spec(&self) -> &ArchSpec {
        &self.spec
    }

    pub fn arch(&self) -> ArchKind {
        self.spec.kind
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn tensors_mut(&mut self) -> &mut [Tensor] {
        &mut self.tensors
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.tensors.iter().find(|t| t.name == name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Tensor> {
        self.tensors.iter_mut().find(|t| t.name == name)
    }

    pub(crate) fn data(&self, name: &str) -> Result<&[f32]> {
        self.get(name)
            .map(|t| t.data.as_slice())
            .ok_or_else(|| Error::InvalidArgument(format!("missing tensor {name}")))
    }

    pub fn param_count(&self) -> usize {
        self.tensors.iter().map(|t| t.data.len()).sum()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64 * self.tensors.len() + 4 * self.param_count());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.spec.kind.code().to_le_bytes());
        out.extend_from_slice(&(self.tensors.len() as u32).to_le_bytes());
        let mut offset = 0u64;
        for t in &self.tensors {
            out.extend_from_slice(&(t.name.len() as u32).to_le_bytes());
            out.extend_from_slice(t.name.as_bytes());
            out.extend_from_slice(&(t.shape.len() as u32).to_le_bytes());
            for &d in &t.shape {
                out.extend_from_slice(&(d as u32).to_le_bytes());
            }
            out.extend_from_slice(&offset.to_le_bytes());
            offset += t.data.len() as u64;
        }
        for t in &self.tensors {
            for v in &t.data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    /// Parses a weight file. With `expected` set, the tensor table must match
    /// that architecture's layout, otherwise the file's own arch tag is used.
    pub fn from_bytes(bytes: &[u8], expected: Option<ArchKind>) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        let magic: [u8; 4] = r.take(4, "magic")?.try_into().unwrap();
        if magic != MAGIC {
            return Err(Error::BadMagic {
                expected: MAGIC,
                found: magic,
            });
        }
        let version = r.u32("version")?;
        if version != VERSION {
            return Err(Error::Version {
                expected: VERSION,
                found: version,
            });
        }
        let code = r.u32("arch code")?;
        let tagged = ArchKind::from_code(code)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown arch code {code}")))?;
        let count = r.u32("tensor count")? as usize;

        let mut toc = Vec::with_capacity(count.min(64));
        for i in 0..count {
            let name_len = r.u32("tensor name length")? as usize;
            let name = std::str::from_utf8(r.take(name_len, "tensor name")?)
                .map_err(|_| Error::InvalidArgument(format!("tensor {i} name is not utf-8")))?
                .to_string();
            let ndim = r.u32("tensor rank")? as usize;
            let mut shape = Vec::with_capacity(ndim.min(8));
            for _ in 0..ndim {
                shape.push(r.u32("tensor dims")? as usize);
            }
            let offset = r.u64("tensor offset")? as usize;
            toc.push((name, shape, offset));
        }

        let spec = ArchSpec::standard(expected.unwrap_or(tagged));
        if tagged != spec.kind {
            return Err(Error::ArchMismatch {
                expected: spec.kind.to_string(),
                found: tagged.to_string(),
            });
        }
        check_layout(&spec, toc.iter().map(|(n, s, _)| (n.as_str(), s.as_slice())))?;

        let data_start = r.pos;
        let mut tensors = Vec::with_capacity(toc.len());
        for (name, shape, offset) in toc {
            let len: usize = shape.iter().product();
            let begin = data_start + 4 * offset;
            let end = begin + 4 * len;
            if end > bytes.len() {
                return Err(Error::Truncated(format!(
                    "data of tensor {name} ends at byte {end}, file has {}",
                    bytes.len()
                )));
            }
            let data = bytes[begin..end]
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                .collect();
            tensors.push(Tensor { name, shape, data });
        }
        Ok(ModelWeights { spec, tensors })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::load_inner(path.as_ref(), None)
    }

    /// Loads a file that must contain weights for `arch`.
    pub fn load_as(path: impl AsRef<Path>, arch: ArchKind) -> Result<Self> {
        Self::load_inner(path.as_ref(), Some(arch))
    }

    fn load_inner(path: &Path, arch: Option<ArchKind>) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::from(e).in_file(path))?;
        Self::from_bytes(&bytes, arch).map_err(|e| e.in_file(path))
    }
}

fn check_layout<'a>(spec: &ArchSpec, found: impl Iterator<Item = (&'a str, &'a [usize])>) -> Result<()> {
    let expected = spec.tensors();
    let found: Vec<_> = found.collect();
    for (i, exp) in expected.iter().enumerate() {
        match found.get(i) {
            Some((name, shape)) if *name == exp.name && *shape == exp.shape.as_slice() => {}
            Some((name, shape)) => {
                let shape = if *name == exp.name {
                    shape.to_vec()
                } else {
                    found
                        .iter()
                        .find(|(n, _)| *n == exp.name)
                        .map(|(_, s)| s.to_vec())
                        .unwrap_or_default()
                };
                return Err(Error::ShapeMismatch {
                    name: exp.name.to_string(),
                    expected: exp.shape.clone(),
                    found: shape,
                });
            }
            None => {
                return Err(Error::ShapeMismatch {
                    name: exp.name.to_string(),
                    expected: exp.shape.clone(),
                    found: vec![],
                })
            }
        }
    }
    if found.len() != expected.len() {
        return Err(Error::dim(format!("{} tensor count", spec.kind), expected.len(), found.len()));
    }
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Truncated(format!("while reading {what} at byte {}", self.pos)));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(kind: ArchKind) -> ModelWeights {
        let mut rng = ChaCha8Rng::seed_from_u64(kind.code() as u64);
        let mut w = ModelWeights::zeros(ArchSpec::standard(kind));
        for t in w.tensors_mut() {
            t.data.iter_mut().for_each(|v| *v = rng.gen_range(-1.0..1.0));
        }
        w
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        for kind in ArchKind::ALL {
            let w = random(kind);
            let p = dir.path().join(format!("{kind}.pkw"));
            w.save(&p).unwrap();
            let back = ModelWeights::load(&p).unwrap();
            assert_eq!(back.to_bytes(), w.to_bytes());
            assert_eq!(back, w);
        }
    }

    #[test]
    fn distinct_diagnostics() {
        let bytes = random(ArchKind::Xcorr).to_bytes();
        assert!(matches!(
            ModelWeights::from_bytes(&bytes[..bytes.len() - 3], None),
            Err(Error::Truncated(_))
        ));
        assert!(matches!(
            ModelWeights::from_bytes(&bytes[..30], None),
            Err(Error::Truncated(_))
        ));
        assert!(matches!(
            ModelWeights::from_bytes(&bytes, Some(ArchKind::If)),
            Err(Error::ArchMismatch { .. })
        ));
        // header relabelled as IF over an Xcorr tensor table
        let mut bad = bytes.clone();
        bad[8..12].copy_from_slice(&ArchKind::If.code().to_le_bytes());
        assert!(matches!(ModelWeights::from_bytes(&bad, None), Err(Error::ShapeMismatch { .. })));
        let mut bad = bytes.clone();
        bad[..4].copy_from_slice(b"NOPE");
        assert!(matches!(ModelWeights::from_bytes(&bad, None), Err(Error::BadMagic { .. })));
        let mut bad = bytes;
        bad[4] = 9;
        assert!(matches!(
            ModelWeights::from_bytes(&bad, None),
            Err(Error::Version { found: 9, .. })
        ));
    }

    #[test]
    fn element_count_equals_param_count() {
        for kind in ArchKind::ALL {
            assert_eq!(ModelWeights::zeros(ArchSpec::standard(kind)).param_count(), crate::nn::count_params(kind));
        }
    }
}
