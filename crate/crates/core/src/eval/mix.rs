use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::audio::AudioClip;
use crate::error::{Error, Result};

/// An evaluation condition: a finite SNR in dB, or the clean signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Snr {
    Clean,
    Db(f64),
}

impl Snr {
    pub fn db(self) -> Option<f64> {
        match self {
            Snr::Clean => None,
            Snr::Db(d) => Some(d),
        }
    }
}

impl std::fmt::Display for Snr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Snr::Clean => f.write_str("clean"),
            Snr::Db(d) => write!(f, "{d}"),
        }
    }
}

impl std::str::FromStr for Snr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("clean") || s.eq_ignore_ascii_case("inf") {
            return Ok(Snr::Clean);
        }
        s.trim_end_matches("dB")
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|d| d.is_finite())
            .map(Snr::Db)
            .ok_or_else(|| Error::InvalidArgument(format!("bad SNR {s:?} (a number in dB or \"clean\")")))
    }
}

impl Serialize for Snr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Snr::Clean => s.serialize_str("clean"),
            Snr::Db(d) => s.serialize_f64(*d),
        }
    }
}

impl<'de> Deserialize<'de> for Snr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Snr::Db(v)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// What to do when the noise is shorter than the clean clip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseFit {
    #[default]
    Tile,
    Error,
}

/// Adds `noise` scaled so that the whole-clip energy ratio is `snr`.
pub fn mix_at_snr(clean: &AudioClip, noise: &AudioClip, snr: Snr, fit: NoiseFit) -> Result<AudioClip> {
    let db = match snr {
        Snr::Clean => return Ok(clean.clone()),
        Snr::Db(d) => d,
    };
    if noise.is_empty() || (noise.len() < clean.len() && fit == NoiseFit::Error) {
        return Err(Error::TooShort {
            len: noise.len(),
            needed: clean.len(),
        });
    }
    let n = noise.samples();
    let aligned = (0..clean.len()).map(|i| n[i % n.len()] as f64);
    let e_clean = clean.energy();
    let e_noise: f64 = aligned.clone().map(|v| v * v).sum();
    if e_clean <= 0.0 || e_noise <= 0.0 {
        return Err(Error::InvalidArgument("cannot mix at an SNR with a zero-energy signal".into()));
    }
    let gain = (e_clean / (e_noise * 10f64.powf(db / 10.0))).sqrt();
    AudioClip::from_samples(
        clean
            .samples()
            .iter()
            .zip(aligned)
            .map(|(&c, v)| (c as f64 + gain * v) as f32)
            .collect(),
    )
}
