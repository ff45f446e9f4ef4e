//! Per-frame Xcorr and IF features for a synthetic vowel, written as a
//! feature file.
//!
//! ```bash
//! cargo run --release --example extract_features [OUT.pkf]
//! ```

use pitchkit::features::{FeatureDump, FeatureExtractor, FeatureKind};
use pitchkit::train::{synth_clip, VoiceProfile};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pitchkit::error::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "features.pkf".into());
    let profile = VoiceProfile {
        clip_frames: 200,
        ..VoiceProfile::constant(150.0)
    };
    let clip = synth_clip(&mut ChaCha8Rng::seed_from_u64(1), &profile, "vowel");

    let frames = FeatureExtractor::process_clip(FeatureKind::Both, &clip.audio);
    println!("{} samples -> {} frames", clip.audio.len(), frames.len());

    // The correlation peak sits at the period, 16000 / 150 = 106.7 samples.
    let m = (5..clip.voiced.len() - 5)
        .find(|&m| clip.voiced[m - 5..m + 5].iter().all(|&v| v))
        .expect("a voiced stretch");
    let mid = &frames[m];
    println!("frame {m}, labelled f0 {:.1} Hz", clip.f0[m]);
    let x = mid.xcorr.as_ref().unwrap();
    let peak = x.argmax_in(32, 256);
    println!("xcorr peak at lag {peak} ({:.1} Hz), value {:.3}", 16_000.0 / peak as f64, x.at(peak));

    // 150 Hz is bin 3 (50 Hz spacing at N = 320). It advances 1.5 cycles
    // per 160-sample hop, so the normalized phase step is close to (-1, 0).
    let f = mid.if_feats.as_ref().unwrap();
    println!(
        "bin 3: log|X| {:.2}, delta = ({:.3}, {:.3})",
        f.log_mag()[3],
        f.delta_re()[3],
        f.delta_im()[3]
    );

    FeatureDump::new(FeatureKind::Both, frames)?.write(&out)?;
    println!("wrote {out}");
    Ok(())
}
