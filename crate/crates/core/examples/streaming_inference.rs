//! Frame-by-frame inference from 10 ms audio chunks. Each frame needs only
//! the samples up to its own window end, so the estimate for a window is
//! available as soon as its last hop arrives.
//!
//! ```bash
//! cargo run --release --example streaming_inference -- [WEIGHTS.pkw]
//! ```
//!
//! Without weights, a seeded untrained Joint model is used.

use pitchkit::features::FeatureExtractor;
use pitchkit::nn::{ArchKind, ArchSpec, ModelWeights, PitchModel};
use pitchkit::train::{synth_clip, Net, VoiceProfile};
use pitchkit::{HOP, SAMPLE_RATE, WINDOW_LEN};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pitchkit::error::Result<()> {
    let weights = match std::env::args().nth(1) {
        Some(p) => ModelWeights::load(p)?,
        None => Net::<f32>::init(ArchSpec::standard(ArchKind::Joint), &mut ChaCha8Rng::seed_from_u64(0)).to_weights(),
    };
    let model = PitchModel::from_weights(&weights)?;
    let clip = synth_clip(&mut ChaCha8Rng::seed_from_u64(3), &VoiceProfile::constant(140.0), "c");

    let mut fx = FeatureExtractor::new(model.arch().feature_kind());
    let mut state = model.new_stream();
    let mut received = 0;
    for chunk in clip.audio.samples().chunks(HOP) {
        received += chunk.len();
        for frame in fx.push(chunk) {
            let m = state.frames_processed();
            let (f0, conf) = model.step(&mut state, &frame)?.decode();
            let window_end = m * HOP + WINDOW_LEN;
            assert!(window_end <= received);
            if m % 100 == 0 {
                println!(
                    "frame {m:4}: {f0:6.1} Hz (p = {conf:.2}), window ends at {:.3} s, {} samples received",
                    window_end as f64 / SAMPLE_RATE as f64,
                    received
                );
            }
        }
    }
    println!("{} frames from {} samples", state.frames_processed(), received);
    Ok(())
}
