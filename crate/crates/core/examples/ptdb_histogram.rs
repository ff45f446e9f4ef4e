//! Ingests a PTDB-style directory tree and prints per-sex pitch histograms.
//!
//! ```bash
//! cargo run --release --example ptdb_histogram -- [ROOT]
//! ```
//!
//! Without ROOT a small tree is synthesized in a temporary directory:
//! `FEMALE/MIC/F01/mic_F01_si001.wav` next to `FEMALE/REF/F01/ref_F01_si001.f0`,
//! one whitespace-separated reference row per 10 ms frame.

use std::path::{Path, PathBuf};

use pitchkit::eval::{ingest_ptdb_layout, pitch_histogram, PtdbLayout};
use pitchkit::train::{synth_clip, VoiceProfile};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn write_speaker(root: &Path, sex: &str, spk: &str, f0: f64, seed: u64) -> std::io::Result<()> {
    let mic = root.join(sex).join("MIC").join(spk);
    let refd = root.join(sex).join("REF").join(spk);
    std::fs::create_dir_all(&mic)?;
    std::fs::create_dir_all(&refd)?;
    for utt in 0..3 {
        let profile = VoiceProfile {
            clip_frames: 300,
            ..VoiceProfile::constant(f0 * (1.0 + 0.05 * utt as f64))
        };
        let clip = synth_clip(&mut ChaCha8Rng::seed_from_u64(seed + utt), &profile, "");
        let name = format!("{spk}_si{utt:03}");
        clip.audio.write_wav(mic.join(format!("mic_{name}.wav"))).map_err(std::io::Error::other)?;
        let rows: String = clip.f0.iter().map(|f| format!("{f:.2} 0 0 0\n")).collect();
        std::fs::write(refd.join(format!("ref_{name}.f0")), rows)?;
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tmp;
    let root: PathBuf = match std::env::args().nth(1) {
        Some(r) => r.into(),
        None => {
            tmp = tempfile::tempdir()?;
            write_speaker(tmp.path(), "FEMALE", "F01", 210.0, 1)?;
            write_speaker(tmp.path(), "FEMALE", "F02", 180.0, 10)?;
            write_speaker(tmp.path(), "MALE", "M01", 110.0, 20)?;
            tmp.path().to_path_buf()
        }
    };

    let ingested = ingest_ptdb_layout(&root, &PtdbLayout::default())?;
    for e in &ingested.failures {
        eprintln!("skipped: {e}");
    }
    let corpus = ingested.corpus;
    println!("{} clips, {:.1} s, {} voiced frames", corpus.clips.len(), corpus.duration_s(), corpus.voiced_frames());

    let hist = pitch_histogram(&corpus);
    for group in ["female", "male"] {
        let modes: Vec<String> = hist.modes(group, 20).iter().map(|m| format!("{m:.0}")).collect();
        println!("{group}: modes near {} Hz", modes.join(", "));
    }
    std::fs::write("pitch_histogram.csv", hist.to_csv())?;
    println!("wrote pitch_histogram.csv");
    Ok(())
}
