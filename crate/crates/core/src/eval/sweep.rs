//! Estimators and the SNR-sweep evaluation.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::audio::AudioClip;
use crate::error::{Error, Result};
use crate::eval::corpus::ReferenceCorpus;
use crate::eval::metrics::{rca_counts, RcaCounts, RCA_THRESHOLD_CENTS};
use crate::eval::mix::{mix_at_snr, NoiseFit, Snr};
use crate::features::FeatureExtractor;
use crate::lpe::{LpeConfig, LpeTracker};
use crate::nn::{PitchClassDist, PitchModel};
use crate::track::{PitchFrame, PitchTrack};

/// Anything that turns a clip into one pitch frame per 10 ms hop.
pub trait PitchEstimator: Sync {
    fn id(&self) -> String;
    fn estimate(&self, clip: &AudioClip) -> Result<PitchTrack>;
}

/// Default posterior threshold for the network's voicing flag.
pub const NN_VOICING_THRESHOLD: f32 = 0.25;

pub struct NnEstimator {
    pub name: String,
    pub model: PitchModel,
    pub voicing_threshold: f32,
}

impl NnEstimator {
    pub fn new(model: PitchModel) -> Self {
        NnEstimator {
            name: model.arch().to_string(),
            model,
            voicing_threshold: NN_VOICING_THRESHOLD,
        }
    }

    /// Decoded pitch, voiced when the winning posterior reaches the threshold.
    pub fn frame(&self, d: &PitchClassDist) -> PitchFrame {
        let (f0, conf) = d.decode();
        PitchFrame {
            f0_hz: f0 as f32,
            confidence: conf,
            voiced: conf >= self.voicing_threshold,
        }
    }
}

impl PitchEstimator for NnEstimator {
    fn id(&self) -> String {
        self.name.clone()
    }

    fn estimate(&self, clip: &AudioClip) -> Result<PitchTrack> {
        let frames = FeatureExtractor::process_clip(self.model.arch().feature_kind(), clip);
        let dists = self.model.run(&frames)?;
        Ok(PitchTrack::new(dists.iter().map(|d| self.frame(d)).collect()))
    }
}

#[derive(Debug, Clone, Default)]
pub struct LpeEstimator {
    pub config: LpeConfig,
}

impl PitchEstimator for LpeEstimator {
    fn id(&self) -> String {
        "lpe".into()
    }

    fn estimate(&self, clip: &AudioClip) -> Result<PitchTrack> {
        Ok(LpeTracker::track(self.config, clip))
    }
}

/// Named noise recordings used for mixing.
#[derive(Debug, Clone, Default)]
pub struct NoiseBank {
    pub clips: Vec<(String, AudioClip)>,
}

impl NoiseBank {
    /// Every `.wav` directly inside `dir`, sorted by name.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| Error::from(e).in_file(dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav")))
            .collect();
        paths.sort();
        let mut clips = Vec::with_capacity(paths.len());
        for p in paths {
            let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            clips.push((name, AudioClip::read_wav(&p)?));
        }
        Self::from_clips(clips)
    }

    pub fn from_clips(clips: Vec<(String, AudioClip)>) -> Result<Self> {
        if clips.is_empty() || clips.iter().any(|(_, c)| c.is_empty()) {
            return Err(Error::InvalidArgument("noise bank needs at least one non-empty clip".into()));
        }
        Ok(NoiseBank { clips })
    }

    pub fn get(&self, name: &str) -> Option<&AudioClip> {
        self.clips.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    /// `len` samples of recording `name` from `offset`, wrapping around.
    pub fn excerpt(&self, name: &str, offset: usize, len: usize) -> Result<AudioClip> {
        let s = self
            .get(name)
            .ok_or_else(|| Error::InvalidArgument(format!("noise {name:?} not in the noise library")))?
            .samples();
        AudioClip::from_samples((0..len).map(|i| s[(offset + i) % s.len()]).collect())
    }

    /// Noise segment for corpus clip `index`: a clip and start offset drawn
    /// from `seed`, the same for every model and SNR.
    pub fn segment(&self, seed: u64, index: usize, len: usize) -> AudioClip {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let (_, noise) = &self.clips[rng.gen_range(0..self.clips.len())];
        let s = noise.samples();
        let start = if s.len() > len { rng.gen_range(0..=s.len() - len) } else { 0 };
        let seg = (0..len).map(|i| s[(start + i) % s.len()]).collect();
        AudioClip::from_samples(seg).expect("noise samples are finite")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepConfig {
    pub seed: u64,
    pub threshold_cents: f64,
    pub fit: NoiseFit,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            seed: 0,
            threshold_cents: RCA_THRESHOLD_CENTS,
            fit: NoiseFit::Tile,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRow {
    pub model: String,
    pub snr_db: Snr,
    pub rca: f64,
    pub voiced_frames: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub corpus_id: String,
    pub seed: u64,
    pub threshold_cents: f64,
    pub rows: Vec<EvalRow>,
    /// Per-clip failures; those clips are left out of the affected rows.
    pub failures: Vec<String>,
}

impl EvalReport {
    pub fn row(&self, model: &str, snr: Snr) -> Option<&EvalRow> {
        self.rows.iter().find(|r| r.model == model && r.snr_db == snr)
    }

    pub fn rca(&self, model: &str, snr: Snr) -> Option<f64> {
        self.row(model, snr).map(|r| r.rca)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("model,snr_db,rca,voiced_frames\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{:.6},{}\n", r.model, r.snr_db, r.rca, r.voiced_frames));
        }
        s
    }

    /// One row per SNR, one column per model.
    pub fn plot_data_csv(&self) -> String {
        let mut models: Vec<&str> = Vec::new();
        let mut snrs: Vec<Snr> = Vec::new();
        for r in &self.rows {
            if !models.contains(&r.model.as_str()) {
                models.push(&r.model);
            }
            if !snrs.contains(&r.snr_db) {
                snrs.push(r.snr_db);
            }
        }
        let mut s = format!("snr_db,{}\n", models.join(","));
        for snr in snrs {
            s.push_str(&snr.to_string());
            for m in &models {
                match self.rca(m, snr) {
                    Some(v) => s.push_str(&format!(",{v:.6}")),
                    None => s.push(','),
                }
            }
            s.push('\n');
        }
        s
    }

    /// Models whose RCA is higher at some noisy condition than when clean.
    pub fn monotonicity_violations(&self) -> Vec<(String, Snr)> {
        let mut out = Vec::new();
        for r in &self.rows {
            if let (Snr::Db(_), Some(clean)) = (r.snr_db, self.rca(&r.model, Snr::Clean)) {
                if r.rca > clean {
                    out.push((r.model.clone(), r.snr_db));
                }
            }
        }
        out
    }
}

/// Evaluates every model at every SNR. Noise placement depends only on the
/// seed and clip index. Clips are processed on all available cores; merging
/// is in clip order.
pub fn snr_sweep(
    models: &[&dyn PitchEstimator],
    corpus: &ReferenceCorpus,
    noise: &NoiseBank,
    snrs: &[Snr],
    cfg: &SweepConfig,
) -> Result<EvalReport> {
    if models.is_empty() || snrs.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one model and one SNR".into()));
    }
    let per_clip = |i: usize| -> Vec<std::result::Result<RcaCounts, String>> {
        let clip = &corpus.clips[i];
        let seg = noise.segment(cfg.seed, i, clip.audio.len());
        let mut out = Vec::with_capacity(snrs.len() * models.len());
        for &snr in snrs {
            let mixed = mix_at_snr(&clip.audio, &seg, snr, cfg.fit);
            for m in models {
                let res = mixed
                    .as_ref()
                    .map_err(|e| e.to_string())
                    .and_then(|audio| m.estimate(audio).map_err(|e| e.to_string()))
                    .and_then(|est| rca_counts(&est, &clip.reference, cfg.threshold_cents).map_err(|e| e.to_string()))
                    .map_err(|e| format!("{} @ {snr}: clip {}: {e}", m.id(), clip.id));
                out.push(res);
            }
        }
        out
    };

    let results = crate::par::par_map(corpus.clips.len(), per_clip);

    let mut totals = vec![RcaCounts::default(); snrs.len() * models.len()];
    let mut failures = Vec::new();
    for clip_res in results {
        for (k, r) in clip_res.into_iter().enumerate() {
            match r {
                Ok(c) => totals[k].add(c),
                Err(e) => failures.push(e),
            }
        }
    }
    let mut rows = Vec::with_capacity(totals.len());
    for (k, m) in models.iter().enumerate() {
        for (j, &snr) in snrs.iter().enumerate() {
            let c = totals[j * models.len() + k];
            rows.push(EvalRow {
                model: m.id(),
                snr_db: snr,
                rca: c.rca()?,
                voiced_frames: c.voiced,
            });
        }
    }
    Ok(EvalReport {
        corpus_id: corpus.id.clone(),
        seed: cfg.seed,
        threshold_cents: cfg.threshold_cents,
        rows,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::corpus::{CorpusSource, ReferenceClip};
    use std::f64::consts::PI;

    struct Oracle;

    impl PitchEstimator for Oracle {
        fn id(&self) -> String {
            "const100".into()
        }

        fn estimate(&self, clip: &AudioClip) -> Result<PitchTrack> {
            Ok(PitchTrack::new(vec![PitchFrame::voiced(100.0); clip.frame_count()]))
        }
    }

    fn corpus() -> ReferenceCorpus {
        let clips = (0..3)
            .map(|k| {
                let f0 = 100.0 + 40.0 * k as f64;
                let audio = AudioClip::from_samples(
                    (0..16_000)
                        .map(|i| {
                            let t = i as f64 / 16_000.0;
                            (1..=20).map(|h| (2.0 * PI * h as f64 * f0 * t).sin() / h as f64).sum::<f64>() as f32 * 0.2
                        })
                        .collect(),
                )
                .unwrap();
                ReferenceClip {
                    id: format!("c{k}"),
                    reference: PitchTrack::new(vec![PitchFrame::voiced(f0 as f32); audio.frame_count()]),
                    audio,
                    sex: None,
                }
            })
            .collect();
        ReferenceCorpus {
            id: "toy".into(),
            source: CorpusSource::Synthetic,
            clips,
        }
    }

    fn noise() -> NoiseBank {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        NoiseBank::from_clips(vec![(
            "white".into(),
            AudioClip::from_samples((0..40_000).map(|_| rng.gen_range(-0.5f32..0.5)).collect()).unwrap(),
        )])
        .unwrap()
    }

    #[test]
    fn report_shape_and_ordering() {
        let lpe = LpeEstimator::default();
        let snrs = [Snr::Clean, Snr::Db(20.0), Snr::Db(0.0)];
        let models: [&dyn PitchEstimator; 2] = [&lpe, &Oracle];
        let r = snr_sweep(&models, &corpus(), &noise(), &snrs, &SweepConfig::default()).unwrap();
        assert_eq!(r.rows.len(), 6);
        assert!(r.failures.is_empty());
        assert!((r.rca("const100", Snr::Clean).unwrap() - 1.0 / 3.0).abs() < 0.02);
        assert!(r.rca("lpe", Snr::Clean).unwrap() >= 0.95);
        assert!(r.rca("lpe", Snr::Clean).unwrap() >= r.rca("lpe", Snr::Db(0.0)).unwrap());
        assert!(r.to_csv().starts_with("model,snr_db,rca,voiced_frames\nlpe,clean,"));
        let plot = r.plot_data_csv();
        assert!(plot.starts_with("snr_db,lpe,const100\nclean,"));
        assert_eq!(plot.lines().count(), 4);
    }

    #[test]
    fn deterministic_noise_placement() {
        let b = noise();
        assert_eq!(b.segment(3, 1, 500), b.segment(3, 1, 500));
        assert_ne!(b.segment(3, 1, 500), b.segment(4, 1, 500));
        assert_ne!(b.segment(3, 1, 500), b.segment(3, 2, 500));
    }

    #[test]
    fn failures_are_collected() {
        let mut c = corpus();
        c.clips[1].reference.frames.pop();
        let models: [&dyn PitchEstimator; 1] = [&Oracle];
        let r = snr_sweep(&models, &c, &noise(), &[Snr::Clean], &SweepConfig::default()).unwrap();
        assert_eq!(r.failures.len(), 1);
        assert!(r.failures[0].contains("clip c1"));
        assert_eq!(r.rows[0].voiced_frames, 2 * 99);
    }
}
