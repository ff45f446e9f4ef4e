use crate::audio::AudioClip;
use crate::error::{Error, Result};
use crate::{HOP, WINDOW_LEN};

/// Frame layout over a sample stream: frame `m` covers `[m*hop, m*hop + window_len)`.
///
/// The analysis window is rectangular.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameGrid {
    pub window_len: usize,
    pub hop: usize,
}

impl Default for FrameGrid {
    fn default() -> Self {
        FrameGrid {
            window_len: WINDOW_LEN,
            hop: HOP,
        }
    }
}

impl FrameGrid {
    pub fn frame_count(&self, len: usize) -> Result<usize> {
        if len < self.window_len {
            return Err(Error::TooShort {
                len,
                needed: self.window_len,
            });
        }
        Ok((len - self.window_len) / self.hop + 1)
    }

    pub fn frame_start(&self, m: usize) -> usize {
        m * self.hop
    }

    /// Last sample index a frame depends on.
    pub fn frame_end(&self, m: usize) -> usize {
        m * self.hop + self.window_len - 1
    }
}

/// Splits a clip into complete frames; the trailing partial frame is dropped.
pub fn frame_signal<'a>(clip: &'a AudioClip, grid: &FrameGrid) -> Result<Vec<&'a [f32]>> {
    let count = grid.frame_count(clip.len())?;
    let s = clip.samples();
    Ok((0..count)
        .map(|m| &s[grid.frame_start(m)..grid.frame_start(m) + grid.window_len])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize) -> AudioClip {
        AudioClip::from_samples((0..n).map(|i| i as f32).collect()).unwrap()
    }

    #[test]
    fn frame_counts() {
        let g = FrameGrid::default();
        let clip = ramp(480);
        let frames = frame_signal(&clip, &g).unwrap();
        assert_eq!(frames.len(), 2);
        assert_eq!(frames[1][0], 160.0);
        assert_eq!(frames[1].len(), 320);
        assert_eq!(frame_signal(&ramp(320), &g).unwrap().len(), 1);
        assert!(matches!(
            frame_signal(&ramp(319), &g),
            Err(Error::TooShort { len: 319, needed: 320 })
        ));
    }
}
