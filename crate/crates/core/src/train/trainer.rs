//! Mini-batch training loop.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{ArchKind, ArchSpec, ModelWeights, PitchModel};
use crate::train::adam::{adam_step, AdamConfig, AdamState};
use crate::train::data::Dataset;
use crate::train::net::Net;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub seq_len: usize,
    pub epochs: usize,
    pub seed: u64,
    pub adam: AdamConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 256,
            seq_len: 100,
            epochs: 10,
            seed: 0,
            adam: AdamConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.seq_len < 2 {
            return Err(Error::InvalidArgument(format!(
                "batch_size {} and seq_len {} must be at least 1 and 2",
                self.batch_size, self.seq_len
            )));
        }
        if !(self.adam.learning_rate > 0.0) {
            return Err(Error::InvalidArgument("learning rate must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainLogRow {
    pub epoch: usize,
    pub step: u64,
    /// Mean per-batch loss over the epoch.
    pub loss: f64,
    pub heldout_rca: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TrainLog {
    pub rows: Vec<TrainLogRow>,
}

impl TrainLog {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epoch,step,loss,heldout_rca\n");
        for r in &self.rows {
            let rca = r.heldout_rca.map(|v| format!("{v:.6}")).unwrap_or_default();
            s.push_str(&format!("{},{},{:.6},{rca}\n", r.epoch, r.step, r.loss));
        }
        s
    }

    pub fn last(&self) -> Option<&TrainLogRow> {
        self.rows.last()
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub weights: ModelWeights,
    pub log: TrainLog,
}

/// Trains `arch` from a seeded initialization. One log row per epoch, plus
/// row 0 for the untrained model. With `checkpoints`, the weights after each
/// epoch are written there as `epoch_NNN.pkw`. The result is a pure function
/// of the inputs and `cfg`.
pub fn train(
    arch: ArchKind,
    data: &Dataset,
    heldout: Option<&Dataset>,
    cfg: &TrainConfig,
    checkpoints: Option<&Path>,
    mut on_epoch: impl FnMut(&TrainLogRow),
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if !data.kind.covers(arch.feature_kind()) || heldout.is_some_and(|h| !h.kind.covers(arch.feature_kind())) {
        return Err(Error::InvalidArgument(format!("{arch} needs {:?} features", arch.feature_kind())));
    }
    let windows = data.windows(cfg.seq_len).len();
    if cfg.epochs > 0 && windows < cfg.batch_size {
        return Err(Error::InvalidArgument(format!(
            "corpus has {windows} windows of {} frames, fewer than one batch of {}",
            cfg.seq_len, cfg.batch_size
        )));
    }
    if let Some(dir) = checkpoints {
        std::fs::create_dir_all(dir).map_err(|e| Error::from(e).in_file(dir))?;
    }

    let mut init_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    init_rng.set_stream(1);
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    shuffle_rng.set_stream(2);

    let mut net = Net::<f32>::init(ArchSpec::standard(arch), &mut init_rng);
    let mut adam = AdamState::new(net.tensors().iter().map(|t| t.len()));
    let mut log = TrainLog::default();
    let score = |net: &Net<f32>| -> Result<Option<f64>> {
        heldout
            .map(|h| h.rca(&PitchModel::from_weights(&net.to_weights())?))
            .transpose()
    };

    // Untrained baseline row, on the first epoch's batches.
    {
        let plan = data.epoch_plan(cfg.seq_len, cfg.batch_size, &mut shuffle_rng.clone());
        let mut total = 0.0;
        for w in &plan {
            total += net.forward(&data.batch(w, cfg.seq_len))?.0 as f64;
        }
        let row = TrainLogRow {
            epoch: 0,
            step: 0,
            loss: if plan.is_empty() { f64::NAN } else { total / plan.len() as f64 },
            heldout_rca: score(&net)?,
        };
        on_epoch(&row);
        log.rows.push(row);
    }

    for epoch in 1..=cfg.epochs {
        let plan = data.epoch_plan(cfg.seq_len, cfg.batch_size, &mut shuffle_rng);
        let mut total = 0.0;
        for w in &plan {
            let batch = data.batch(w, cfg.seq_len);
            let diverged = || Error::Diverged { epoch, step: adam.t as usize + 1 };
            let (loss, cache) = net.forward(&batch).map_err(|_| diverged())?;
            if !loss.is_finite() {
                return Err(diverged());
            }
            let grad = net.backward(&batch, &cache).map_err(|_| diverged())?;
            adam_step(&mut net.tensors_mut(), &grad.tensors(), &mut adam, &cfg.adam);
            total += loss as f64;
        }
        let row = TrainLogRow {
            epoch,
            step: adam.t,
            loss: total / plan.len() as f64,
            heldout_rca: score(&net)?,
        };
        if let Some(dir) = checkpoints {
            net.to_weights().save(dir.join(format!("epoch_{epoch:03}.pkw")))?;
        }
        on_epoch(&row);
        log.rows.push(row);
    }
    Ok(TrainOutcome {
        weights: net.to_weights(),
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureKind;
    use crate::train::synth::{synth_corpus, VoiceProfile};

    fn data(kind: FeatureKind) -> Dataset {
        let profile = VoiceProfile {
            clip_frames: 200,
            ..VoiceProfile::default()
        };
        Dataset::prepare(kind, &synth_corpus(11, 0.2, &profile)).unwrap()
    }

    fn quick() -> TrainConfig {
        TrainConfig {
            batch_size: 4,
            seq_len: 50,
            epochs: 3,
            seed: 3,
            adam: AdamConfig {
                learning_rate: 3e-3,
                ..AdamConfig::default()
            },
        }
    }

    #[test]
    fn loss_decreases_and_is_deterministic() {
        let d = data(FeatureKind::If);
        let a = train(ArchKind::If, &d, Some(&d), &quick(), None, |_| {}).unwrap();
        let b = train(ArchKind::If, &d, Some(&d), &quick(), None, |_| {}).unwrap();
        assert_eq!(a.weights.to_bytes(), b.weights.to_bytes());
        assert_eq!(a.log, b.log);
        let rows = &a.log.rows;
        assert_eq!(rows.len(), 4);
        assert!((rows[0].loss - (192f64).ln()).abs() < 0.5, "{}", rows[0].loss);
        assert!(rows[3].loss < rows[0].loss - 0.5, "{:?}", rows);
        assert!(a.log.to_csv().starts_with("epoch,step,loss,heldout_rca\n0,0,"));
    }

    #[test]
    fn zero_epochs_returns_the_initialization() {
        let d = data(FeatureKind::If);
        let cfg = TrainConfig { epochs: 0, ..quick() };
        let out = train(ArchKind::If, &d, None, &cfg, None, |_| {}).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(1);
        assert_eq!(out.weights, Net::<f32>::init(ArchSpec::standard(ArchKind::If), &mut rng).to_weights());
        assert_eq!(out.log.rows.len(), 1);
    }

    #[test]
    fn rejects_undersized_corpus_and_wrong_features() {
        let d = data(FeatureKind::If);
        let big = TrainConfig {
            batch_size: 10_000,
            ..quick()
        };
        assert!(matches!(train(ArchKind::If, &d, None, &big, None, |_| {}), Err(Error::InvalidArgument(_))));
        assert!(train(ArchKind::Xcorr, &d, None, &quick(), None, |_| {}).is_err());
    }

    #[test]
    fn huge_learning_rate_reports_divergence() {
        let d = data(FeatureKind::If);
        let cfg = TrainConfig {
            epochs: 30,
            adam: AdamConfig {
                learning_rate: 1e38,
                ..AdamConfig::default()
            },
            ..quick()
        };
        match train(ArchKind::If, &d, None, &cfg, None, |_| {}) {
            Err(Error::Diverged { .. }) => {}
            other => panic!("expected divergence, got {:?}", other.map(|o| o.log)),
        }
    }

    #[test]
    fn checkpoints_every_epoch() {
        let d = data(FeatureKind::If);
        let dir = tempfile::tempdir().unwrap();
        let cfg = TrainConfig { epochs: 2, ..quick() };
        let out = train(ArchKind::If, &d, None, &cfg, Some(dir.path()), |_| {}).unwrap();
        let last = ModelWeights::load(dir.path().join("epoch_002.pkw")).unwrap();
        assert!(dir.path().join("epoch_001.pkw").exists());
        assert_eq!(last, out.weights);
    }
}
