//! RCA against SNR for the baseline and, optionally, trained models.
//!
//! ```bash
//! cargo run --release --example snr_sweep -- [WEIGHTS.pkw ...]
//! ```

use pitchkit::eval::{snr_sweep, LpeEstimator, NnEstimator, NoiseBank, PitchEstimator, Snr, SweepConfig};
use pitchkit::nn::{ModelWeights, PitchModel};
use pitchkit::train::{reference_corpus, synth_corpus, synth_noise_library, VoiceProfile};

fn main() -> pitchkit::error::Result<()> {
    let corpus = reference_corpus("heldout", &synth_corpus(2, 2.0, &VoiceProfile::default()));
    let noise = NoiseBank::from_clips(synth_noise_library(200, 30.0))?;

    let mut nets = Vec::new();
    for path in std::env::args().skip(1) {
        let mut est = NnEstimator::new(PitchModel::from_weights(&ModelWeights::load(&path)?)?);
        est.name = path;
        nets.push(est);
    }
    let lpe = LpeEstimator::default();
    let mut models: Vec<&dyn PitchEstimator> = nets.iter().map(|n| n as &dyn PitchEstimator).collect();
    models.push(&lpe);

    let snrs = [Snr::Clean, Snr::Db(20.0), Snr::Db(10.0), Snr::Db(5.0), Snr::Db(0.0), Snr::Db(-5.0)];
    let report = snr_sweep(&models, &corpus, &noise, &snrs, &SweepConfig::default())?;
    print!("{}", report.plot_data_csv());
    for (model, snr) in report.monotonicity_violations() {
        println!("note: {model} scores higher at {snr} dB than clean");
    }
    Ok(())
}
