//! The `pitchkit` command line.
//!
//! Settings resolve as flag, then `--config` file, then built-in default.
//! The seed additionally falls back to `PITCHKIT_SEED` before the default.
//! Logs go to stderr, data to stdout or `--out`.
//!
//! Config file schema (every field optional):
//!
//! ```json
//! {
//!   "seed": 7,
//!   "train": { "batch_size": 256, "seq_len": 100, "epochs": 10,
//!              "adam": { "learning_rate": 0.001, "beta1": 0.9, "beta2": 0.999, "eps": 1e-8 } },
//!   "augment": { "gain_db_range": [-60, 10], "iir_coeff_range": 0.375,
//!                "snr_db_choices": ["clean", 20, 10, 5, 0], "clean_fraction": 0.2 },
//!   "profile": { "f0_min": 70, "f0_max": 400, "clip_frames": 600 },
//!   "lpe": { "transition_cost": 0.1, "voicing_threshold": 0.3 },
//!   "eval": { "snrs": ["clean", 20, 10, 5, 0, -5], "threshold_cents": 50, "fit": "tile" },
//!   "voicing_threshold": 0.25
//! }
//! ```

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::audio::{AudioClip, WavStream};
use crate::error::{Error, Result};
use crate::eval::{
    rca_counts, snr_sweep, EvalReport, EvalRow, LpeEstimator, NnEstimator, NoiseBank, NoiseFit, PitchEstimator,
    Snr, SweepConfig, NN_VOICING_THRESHOLD, RCA_THRESHOLD_CENTS,
};
use crate::features::{FeatureDump, FeatureExtractor, FeatureKind};
use crate::lpe::{LpeConfig, LpeTracker};
use crate::nn::{complexity, ArchKind, ModelWeights, PitchModel};
use crate::track::{csv_row, PitchTrack, CSV_HEADER};
use crate::train::{
    draw_augmentation, synth_corpus, synth_noise_library, train, AugmentConfig, CorpusManifest, Dataset, Replay,
    TrainConfig, VoiceProfile,
};
use crate::WINDOW_LEN;

pub const SEED_ENV: &str = "PITCHKIT_SEED";

#[derive(Debug, Parser)]
#[command(name = "pitchkit", version, about = "Pitch estimation with DSP features and tiny neural networks")]
pub struct Cli {
    /// JSON file overriding built-in defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run seed; falls back to the config file, then $PITCHKIT_SEED, then 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Machine-readable JSON on stdout instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract a feature file from a WAV.
    Features(FeaturesArgs),
    /// Write a pitch track for a WAV.
    Estimate(EstimateArgs),
    /// Train a model on a corpus manifest.
    Train(TrainArgs),
    /// Synthesize a labelled corpus with augmentation records.
    #[command(name = "synth-data")]
    SynthData(SynthArgs),
    /// Raw cent accuracy of estimators, over SNR conditions or for one track pair.
    Eval(EvalArgs),
    /// Per-frame complexity breakdown.
    Flops(FlopsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArchArg {
    If,
    Xcorr,
    Joint,
}

impl From<ArchArg> for ArchKind {
    fn from(a: ArchArg) -> Self {
        match a {
            ArchArg::If => ArchKind::If,
            ArchArg::Xcorr => ArchKind::Xcorr,
            ArchArg::Joint => ArchKind::Joint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    If,
    Xcorr,
    Both,
}

impl From<KindArg> for FeatureKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::If => FeatureKind::If,
            KindArg::Xcorr => FeatureKind::Xcorr,
            KindArg::Both => FeatureKind::Both,
        }
    }
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub kind: KindArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    pub input: PathBuf,
    #[arg(long, required_unless_present = "baseline", conflicts_with = "baseline")]
    pub weights: Option<PathBuf>,
    /// Use the DSP baseline tracker.
    #[arg(long)]
    pub baseline: bool,
    /// Expected architecture; a mismatching weight file is rejected.
    #[arg(long, value_enum)]
    pub arch: Option<ArchArg>,
    #[arg(long)]
    pub voicing_threshold: Option<f32>,
    /// Track CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum)]
    pub arch: ArchArg,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub seq_len: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// Corpus scored after every epoch; clean audio is used.
    #[arg(long)]
    pub heldout: Option<PathBuf>,
    /// Noise recordings for replaying augmentation, instead of the manifest's.
    #[arg(long)]
    pub noise_dir: Option<PathBuf>,
    #[arg(long)]
    pub checkpoints: Option<PathBuf>,
    /// Training log CSV.
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Directory receiving `manifest.json`, `clips/` and `noise/`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 20.0)]
    pub minutes: f64,
    #[arg(long, default_value = "synthetic")]
    pub id: String,
    /// Skip augmentation records.
    #[arg(long)]
    pub clean: bool,
    /// Existing noise WAVs; synthesized into `<out>/noise` when absent.
    #[arg(long)]
    pub noise_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 30.0)]
    pub noise_seconds: f64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, conflicts_with_all = ["est", "reference"])]
    pub corpus: Option<PathBuf>,
    /// Model weights; repeatable.
    #[arg(long)]
    pub weights: Vec<PathBuf>,
    /// Include the DSP baseline tracker.
    #[arg(long)]
    pub baseline: bool,
    #[arg(long)]
    pub noise_dir: Option<PathBuf>,
    /// Comma-separated SNR grid in dB, `clean` for no noise.
    #[arg(long, value_delimiter = ',')]
    pub snr: Option<Vec<Snr>>,
    #[arg(long)]
    pub threshold_cents: Option<f64>,
    /// Estimated track CSV, scored against `--ref`.
    #[arg(long, requires = "reference")]
    pub est: Option<PathBuf>,
    #[arg(long = "ref", requires = "est")]
    pub reference: Option<PathBuf>,
    /// Report CSV (or JSON with `--json`); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// One row per SNR, one column per model.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FlopsArgs {
    /// All architectures when absent.
    #[arg(long, value_enum)]
    pub arch: Option<ArchArg>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalSettings {
    pub snrs: Vec<Snr>,
    pub threshold_cents: f64,
    pub fit: NoiseFit,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            snrs: vec![Snr::Clean, Snr::Db(20.0), Snr::Db(10.0), Snr::Db(5.0), Snr::Db(0.0), Snr::Db(-5.0)],
            threshold_cents: RCA_THRESHOLD_CENTS,
            fit: NoiseFit::Tile,
        }
    }
}

/// Effective settings of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub train: TrainConfig,
    pub augment: AugmentConfig,
    pub profile: VoiceProfile,
    pub lpe: LpeConfig,
    pub eval: EvalSettings,
    pub voicing_threshold: f32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: None,
            train: TrainConfig::default(),
            augment: AugmentConfig::default(),
            profile: VoiceProfile::default(),
            lpe: LpeConfig::default(),
            eval: EvalSettings::default(),
            voicing_threshold: NN_VOICING_THRESHOLD,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        serde_json::from_str(&text).map_err(|e| Error::from(e).in_file(path))
    }

    /// Flag, config, environment, 0.
    fn resolve_seed(&mut self, flag: Option<u64>, env: Option<String>) -> Result<u64> {
        let env = env
            .map(|v| {
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidArgument(format!("{SEED_ENV}={v:?} is not an unsigned integer")))
            })
            .transpose()?;
        let seed = flag.or(self.seed).or(env).unwrap_or(0);
        self.seed = Some(seed);
        Ok(seed)
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli, &mut std::io::stdout().lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let seed = cfg.resolve_seed(cli.seed, std::env::var(SEED_ENV).ok())?;
    cfg.train.seed = seed;
    let json = cli.json;
    match cli.command {
        Command::Features(a) => cmd_features(&a),
        Command::Estimate(a) => cmd_estimate(&a, &cfg, stdout),
        Command::Train(a) => {
            apply_train_flags(&mut cfg, &a);
            log_config(&cfg);
            cmd_train(&a, &cfg, json, stdout)
        }
        Command::SynthData(a) => {
            log_config(&cfg);
            cmd_synth(&a, &cfg, seed, json, stdout)
        }
        Command::Eval(a) => {
            if let Some(s) = &a.snr {
                cfg.eval.snrs = s.clone();
            }
            if let Some(t) = a.threshold_cents {
                cfg.eval.threshold_cents = t;
            }
            log_config(&cfg);
            cmd_eval(&a, &cfg, seed, json, stdout)
        }
        Command::Flops(a) => cmd_flops(&a, json, stdout),
    }
}

fn log_config(cfg: &RunConfig) {
    eprintln!("config: {}", serde_json::to_string(cfg).expect("config serializes"));
}

fn write_out(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::from(e).in_file(p)),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn cmd_features(a: &FeaturesArgs) -> Result<()> {
    let clip = AudioClip::read_wav(&a.input)?;
    let kind = FeatureKind::from(a.kind);
    let frames = FeatureExtractor::process_clip(kind, &clip);
    let dump = FeatureDump::new(kind, frames)?;
    dump.write(&a.out)?;
    eprintln!("{}: {} frames of {} features", a.out.display(), dump.frames.len(), kind.dims());
    Ok(())
}

fn cmd_estimate(a: &EstimateArgs, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let mut wav = WavStream::open(&a.input)?;
    if wav.len() < WINDOW_LEN {
        return Err(Error::TooShort {
            len: wav.len(),
            needed: WINDOW_LEN,
        }
        .in_file(&a.input));
    }
    let est = match &a.weights {
        Some(wp) => {
            let weights = match a.arch {
                Some(arch) => ModelWeights::load_as(wp, arch.into())?,
                None => ModelWeights::load(wp)?,
            };
            Some(NnEstimator {
                voicing_threshold: a.voicing_threshold.unwrap_or(cfg.voicing_threshold),
                ..NnEstimator::new(PitchModel::from_weights(&weights)?)
            })
        }
        None => None,
    };
    let mut sink: Box<dyn Write + '_> = match &a.out {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).map_err(|e| Error::from(e).in_file(p))?,
        )),
        None => Box::new(&mut *stdout),
    };
    writeln!(sink, "{CSV_HEADER}")?;
    let mut index = 0;
    const CHUNK: usize = 16_000;
    if let Some(est) = est {
        let mut fx = FeatureExtractor::new(est.model.arch().feature_kind());
        let mut state = est.model.new_stream();
        loop {
            let chunk = wav.next_chunk(CHUNK)?;
            if chunk.is_empty() {
                break;
            }
            for f in fx.push(&chunk) {
                let d = est.model.step(&mut state, &f)?;
                sink.write_all(csv_row(index, &est.frame(&d)).as_bytes())?;
                index += 1;
            }
        }
    } else {
        let mut t = LpeTracker::new(cfg.lpe);
        loop {
            let chunk = wav.next_chunk(CHUNK)?;
            if chunk.is_empty() {
                break;
            }
            for d in t.push(&chunk) {
                sink.write_all(csv_row(index, &d.frame()).as_bytes())?;
                index += 1;
            }
        }
    }
    sink.flush()?;
    eprintln!("{} frames", index);
    Ok(())
}

fn apply_train_flags(cfg: &mut RunConfig, a: &TrainArgs) {
    let t = &mut cfg.train;
    if let Some(v) = a.epochs {
        t.epochs = v;
    }
    if let Some(v) = a.batch_size {
        t.batch_size = v;
    }
    if let Some(v) = a.seq_len {
        t.seq_len = v;
    }
    if let Some(v) = a.lr {
        t.adam.learning_rate = v;
    }
}

fn manifest_root(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn cmd_train(a: &TrainArgs, cfg: &RunConfig, json: bool, stdout: &mut dyn Write) -> Result<()> {
    let arch = ArchKind::from(a.arch);
    let mut manifest = CorpusManifest::load(&a.corpus)?;
    let root = manifest_root(&a.corpus);
    if let Some(nd) = &a.noise_dir {
        manifest.noise_dir = Some(std::path::absolute(nd)?);
    }
    let clips = manifest.load_clips(&root, Replay::Augmented)?;
    let data = Dataset::prepare(arch.feature_kind(), &clips)?;
    eprintln!("corpus {}: {} clips, {} frames ({} voiced)", manifest.id, clips.len(), data.frames(), data.voiced_frames());
    let heldout = match &a.heldout {
        Some(p) => {
            let m = CorpusManifest::load(p)?;
            let clips = m.load_clips(&manifest_root(p), Replay::Clean)?;
            Some(Dataset::prepare(arch.feature_kind(), &clips)?)
        }
        None => None,
    };
    let out = train(arch, &data, heldout.as_ref(), &cfg.train, a.checkpoints.as_deref(), |r| {
        let rca = r.heldout_rca.map(|v| format!(" heldout_rca {v:.4}")).unwrap_or_default();
        eprintln!("epoch {} step {} loss {:.4}{rca}", r.epoch, r.step, r.loss);
    })?;
    out.weights.save(&a.out)?;
    if let Some(p) = &a.log {
        std::fs::write(p, out.log.to_csv()).map_err(|e| Error::from(e).in_file(p))?;
    }
    if json {
        stdout.write_all(to_json(&out.log).as_bytes())?;
    }
    eprintln!("wrote {}", a.out.display());
    Ok(())
}

fn cmd_synth(a: &SynthArgs, cfg: &RunConfig, seed: u64, json: bool, stdout: &mut dyn Write) -> Result<()> {
    if !(a.minutes > 0.0) {
        return Err(Error::InvalidArgument("--minutes must be positive".into()));
    }
    std::fs::create_dir_all(&a.out).map_err(|e| Error::from(e).in_file(&a.out))?;
    let mut clips = synth_corpus(seed, a.minutes, &cfg.profile);
    let mut noise_dir = None;
    if !a.clean {
        let bank = match &a.noise_dir {
            Some(d) => {
                noise_dir = Some(std::path::absolute(d)?);
                NoiseBank::load_dir(d)?
            }
            None => {
                let d = a.out.join("noise");
                std::fs::create_dir_all(&d).map_err(|e| Error::from(e).in_file(&d))?;
                for (name, clip) in synth_noise_library(seed, a.noise_seconds) {
                    clip.write_wav(d.join(format!("{name}.wav")))?;
                }
                noise_dir = Some(PathBuf::from("noise"));
                NoiseBank::load_dir(&d)?
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(3);
        for c in &mut clips {
            c.augmentation = draw_augmentation(&cfg.augment, Some(&bank), &mut rng)?;
        }
    }
    let path = CorpusManifest::write(&a.out, &a.id, seed, Some(&cfg.profile), noise_dir, &clips)?;
    let frames: usize = clips.iter().map(|c| c.frame_count()).sum();
    let voiced: usize = clips.iter().map(|c| c.voiced_count()).sum();
    eprintln!("{} clips, {frames} frames ({voiced} voiced)", clips.len());
    if json {
        let summary = serde_json::json!({
            "manifest": path,
            "clips": clips.len(),
            "frames": frames,
            "voiced_frames": voiced,
        });
        stdout.write_all(to_json(&summary).as_bytes())?;
    } else {
        writeln!(stdout, "{}", path.display())?;
    }
    Ok(())
}

fn cmd_eval(a: &EvalArgs, cfg: &RunConfig, seed: u64, json: bool, stdout: &mut dyn Write) -> Result<()> {
    let threshold = cfg.eval.threshold_cents;
    let report = if let (Some(est), Some(reference)) = (&a.est, &a.reference) {
        let e = PitchTrack::read_csv(est)?;
        let r = PitchTrack::read_csv(reference)?;
        let c = rca_counts(&e, &r, threshold)?;
        EvalReport {
            corpus_id: reference.display().to_string(),
            seed,
            threshold_cents: threshold,
            rows: vec![EvalRow {
                model: est.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
                snr_db: Snr::Clean,
                rca: c.rca()?,
                voiced_frames: c.voiced,
            }],
            failures: Vec::new(),
        }
    } else {
        let path = a
            .corpus
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("eval needs --corpus or --est with --ref".into()))?;
        let manifest = CorpusManifest::load(path)?;
        let root = manifest_root(path);
        let corpus = manifest.reference_corpus(&root)?;
        let mut models: Vec<Box<dyn PitchEstimator>> = Vec::new();
        for w in &a.weights {
            let model = PitchModel::from_weights(&ModelWeights::load(w)?)?;
            let mut est = NnEstimator::new(model);
            est.voicing_threshold = cfg.voicing_threshold;
            est.name = w.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            models.push(Box::new(est));
        }
        if a.baseline {
            models.push(Box::new(LpeEstimator { config: cfg.lpe }));
        }
        if models.is_empty() {
            return Err(Error::InvalidArgument("eval needs --weights or --baseline".into()));
        }
        let noisy = cfg.eval.snrs.iter().any(|s| matches!(s, Snr::Db(_)));
        let noise = match (&a.noise_dir, noisy) {
            (Some(d), _) => NoiseBank::load_dir(d)?,
            (None, true) => {
                return Err(Error::InvalidArgument("noisy SNR conditions need --noise-dir".into()));
            }
            // Never sampled when every condition is clean.
            (None, false) => NoiseBank::from_clips(vec![("none".into(), AudioClip::silence(1))])?,
        };
        let refs: Vec<&dyn PitchEstimator> = models.iter().map(|m| m.as_ref()).collect();
        let sweep = SweepConfig {
            seed,
            threshold_cents: threshold,
            fit: cfg.eval.fit,
        };
        let report = snr_sweep(&refs, &corpus, &noise, &cfg.eval.snrs, &sweep)?;
        for f in &report.failures {
            eprintln!("warning: {f}");
        }
        report
    };
    if let Some(p) = &a.plot_data {
        std::fs::write(p, report.plot_data_csv()).map_err(|e| Error::from(e).in_file(p))?;
    }
    let text = if json { to_json(&report) } else { report.to_csv() };
    write_out(a.out.as_deref(), &text, stdout)
}

fn cmd_flops(a: &FlopsArgs, json: bool, stdout: &mut dyn Write) -> Result<()> {
    let archs: Vec<ArchKind> = match a.arch {
        Some(x) => vec![x.into()],
        None => ArchKind::ALL.to_vec(),
    };
    let rows: Vec<_> = archs.into_iter().map(complexity).collect();
    if json {
        stdout.write_all(to_json(&rows).as_bytes())?;
    } else {
        for c in &rows {
            writeln!(stdout, "{c}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("pitchkit").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn seed_precedence() {
        let mut c = RunConfig::default();
        assert_eq!(c.resolve_seed(None, None).unwrap(), 0);
        let mut c2 = RunConfig::default();
        assert_eq!(c2.resolve_seed(None, Some("9".into())).unwrap(), 9);
        c.seed = Some(4);
        assert_eq!(c.resolve_seed(None, Some("9".into())).unwrap(), 4);
        assert_eq!(c.resolve_seed(Some(1), Some("9".into())).unwrap(), 1);
        assert!(RunConfig::default().resolve_seed(None, Some("x".into())).is_err());
    }

    #[test]
    fn config_file_is_partial_and_strict() {
        let c: RunConfig = serde_json::from_str(r#"{"train": {"epochs": 3}, "eval": {"snrs": ["clean", 5]}}"#).unwrap();
        assert_eq!(c.train.epochs, 3);
        assert_eq!(c.train.batch_size, 256);
        assert_eq!(c.eval.snrs, vec![Snr::Clean, Snr::Db(5.0)]);
        assert!(serde_json::from_str::<RunConfig>(r#"{"epochs": 3}"#).is_err());
    }

    #[test]
    fn flags_parse() {
        let c = parse(&["--seed", "5", "eval", "--corpus", "m.json", "--baseline", "--snr", "clean,0,-5"]);
        assert_eq!(c.seed, Some(5));
        match c.command {
            Command::Eval(e) => assert_eq!(e.snr.unwrap(), vec![Snr::Clean, Snr::Db(0.0), Snr::Db(-5.0)]),
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["pitchkit", "estimate", "a.wav"]).is_err());
        assert!(Cli::try_parse_from(["pitchkit", "estimate", "a.wav", "--baseline", "--weights", "w"]).is_err());
    }

    #[test]
    fn flops_if_prints_dnn_figure() {
        let mut out = Vec::new();
        run(parse(&["flops", "--arch", "if"]), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("dnn       0.009"), "{text}");
    }
}
