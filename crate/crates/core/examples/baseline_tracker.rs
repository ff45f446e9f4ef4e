//! The DSP baseline on a gliding synthetic voice, and how much the integer
//! lag grid costs at high pitch.

use pitchkit::eval::rca;
use pitchkit::lpe::{lag_quantization_error_cents, LpeConfig, LpeTracker};
use pitchkit::train::{synth_clip, VoiceProfile};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pitchkit::error::Result<()> {
    let profile = VoiceProfile::default();
    let mut total = (0.0, 0);
    for i in 0..5 {
        let clip = synth_clip(&mut ChaCha8Rng::seed_from_u64(40 + i), &profile, format!("c{i}"));
        let track = LpeTracker::track(LpeConfig::default(), &clip.audio);
        let score = rca(&track, &clip.reference(), 50.0)?;
        println!("{}: {} frames, {} voiced, RCA {score:.3}", clip.id, track.len(), clip.voiced_count());
        total.0 += score;
        total.1 += 1;
    }
    println!("mean RCA {:.3}\n", total.0 / total.1 as f64);

    // Worst-case error of the nearest integer period, half a lag step.
    println!("f0 Hz   period   worst-case error (cents)");
    for f0 in [62.5, 100.0, 200.0, 300.0, 400.0, 500.0] {
        println!("{f0:6.1}  {:7.1}  {:6.2}", 16_000.0 / f0, lag_quantization_error_cents(f0));
    }
    Ok(())
}
