//! Desk-scale training of the IF model on a synthetic, augmented corpus.
//!
//! ```bash
//! cargo run --release --example train_if_model -- [MINUTES] [EPOCHS] [OUT.pkw]
//! ```
//!
//! 20 minutes and 8 epochs take well under a minute on one core.

use pitchkit::eval::NoiseBank;
use pitchkit::nn::ArchKind;
use pitchkit::train::{
    augment, synth_corpus, synth_noise_library, train, AdamConfig, AugmentConfig, Dataset, TrainConfig, VoiceProfile,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pitchkit::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let minutes: f64 = args.next().map_or(20.0, |a| a.parse().expect("MINUTES"));
    let epochs: usize = args.next().map_or(8, |a| a.parse().expect("EPOCHS"));
    let out = args.next().unwrap_or_else(|| "if.pkw".into());

    let profile = VoiceProfile::default();
    let noise = NoiseBank::from_clips(synth_noise_library(100, 30.0))?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let clips = synth_corpus(1, minutes, &profile)
        .iter()
        .map(|c| augment(c, &AugmentConfig::default(), Some(&noise), &mut rng))
        .collect::<Result<Vec<_>, _>>()?;
    let heldout = synth_corpus(2, 3.0, &profile);

    let data = Dataset::prepare(ArchKind::If.feature_kind(), &clips)?;
    let held = Dataset::prepare(ArchKind::If.feature_kind(), &heldout)?;
    println!("{} training frames, {} voiced", data.frames(), data.voiced_frames());

    let cfg = TrainConfig {
        batch_size: 32,
        epochs,
        seed: 1,
        adam: AdamConfig {
            learning_rate: 3e-3,
            ..AdamConfig::default()
        },
        ..TrainConfig::default()
    };
    let outcome = train(ArchKind::If, &data, Some(&held), &cfg, None, |r| {
        println!("epoch {:2}  loss {:.3}  held-out RCA {:.3}", r.epoch, r.loss, r.heldout_rca.unwrap_or(f64::NAN));
    })?;
    outcome.weights.save(&out)?;
    println!("wrote {out}");
    Ok(())
}
