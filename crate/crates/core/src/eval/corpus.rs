//! Reference corpora and the PTDB-style directory reader.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use regex::Regex;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::audio::AudioClip;
use crate::error::{Error, Result};
use crate::track::{PitchFrame, PitchTrack};
use crate::{HOP, WINDOW_LEN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusSource {
    Synthetic,
    PtdbLayout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sex {
    Female,
    Male,
}

impl Sex {
    pub fn name(self) -> &'static str {
        match self {
            Sex::Female => "female",
            Sex::Male => "male",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceClip {
    pub id: String,
    pub audio: AudioClip,
    pub reference: PitchTrack,
    pub sex: Option<Sex>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceCorpus {
    pub id: String,
    pub source: CorpusSource,
    pub clips: Vec<ReferenceClip>,
}

impl ReferenceCorpus {
    pub fn voiced_frames(&self) -> usize {
        self.clips.iter().map(|c| c.reference.voiced_count()).sum()
    }

    pub fn duration_s(&self) -> f64 {
        self.clips.iter().map(|c| c.audio.duration_s()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleanupRules {
    /// Female reference frames below this are treated as tracking errors.
    pub female_min_hz: f64,
    /// Frames more than this far below the clip's loudest frame are unvoiced.
    pub energy_floor_db: f64,
}

impl Default for CleanupRules {
    fn default() -> Self {
        CleanupRules {
            female_min_hz: 125.0,
            energy_floor_db: 40.0,
        }
    }
}

/// Energy of each analysis window of the clip.
pub fn frame_energies(audio: &AudioClip) -> Vec<f64> {
    let s = audio.samples();
    (0..audio.frame_count())
        .map(|m| s[m * HOP..m * HOP + WINDOW_LEN].iter().map(|&v| v as f64 * v as f64).sum())
        .collect()
}

/// Marks reference frames unvoiced according to `rules`; returns how many
/// frames changed. Applying it again changes nothing.
pub fn apply_cleanup(clip: &mut ReferenceClip, rules: &CleanupRules) -> usize {
    let energies = frame_energies(&clip.audio);
    let peak = energies.iter().cloned().fold(0.0f64, f64::max);
    let floor = peak * 10f64.powf(-rules.energy_floor_db / 10.0);
    let mut changed = 0;
    for (m, f) in clip.reference.frames.iter_mut().enumerate() {
        if !f.voiced {
            continue;
        }
        let too_low = clip.sex == Some(Sex::Female) && (f.f0_hz as f64) < rules.female_min_hz;
        let quiet = energies.get(m).is_none_or(|&e| peak <= 0.0 || e < floor);
        if too_low || quiet {
            f.voiced = false;
            changed += 1;
        }
    }
    changed
}

/// How to find the reference file that belongs to a recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PtdbLayout {
    /// Substring replacements applied in order to the wav path.
    pub replace: Vec<(String, String)>,
    /// Extension of the reference file, without the dot.
    pub reference_ext: String,
    pub pitch_column: usize,
    /// First capture group starting with f/F means female, m/M male.
    pub sex_pattern: String,
    /// Only wav paths matching this are read, when set.
    pub include: Option<String>,
    pub cleanup: CleanupRules,
}

impl Default for PtdbLayout {
    fn default() -> Self {
        PtdbLayout {
            replace: vec![("MIC".into(), "REF".into()), ("mic_".into(), "ref_".into())],
            reference_ext: "f0".into(),
            pitch_column: 0,
            sex_pattern: r"(?i)(?:^|[/\\_])(female|male|f|m)\d*(?:[/\\_]|$)".into(),
            include: None,
            cleanup: CleanupRules::default(),
        }
    }
}

impl PtdbLayout {
    pub fn reference_path(&self, wav: &Path) -> PathBuf {
        let mut s = wav.to_string_lossy().into_owned();
        for (from, to) in &self.replace {
            s = s.replace(from.as_str(), to.as_str());
        }
        PathBuf::from(s).with_extension(&self.reference_ext)
    }
}

#[derive(Debug)]
pub struct Ingested {
    pub corpus: ReferenceCorpus,
    /// Files that could not be read, with the reason.
    pub failures: Vec<Error>,
}

/// Parses a whitespace-delimited reference file, one row per 10 ms frame.
pub fn read_reference_rows(path: &Path, column: usize) -> Result<Vec<f32>> {
    let file = std::fs::File::open(path).map_err(|e| Error::from(e).in_file(path))?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::from(e).in_file(path))?;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let field = line.split_whitespace().nth(column).ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: format!("no column {column}"),
        })?;
        let v: f32 = field.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: format!("not a number: {field:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: "non-finite pitch".into(),
            });
        }
        out.push(v);
    }
    Ok(out)
}

/// Reads every wav under `root` with its reference track and applies the
/// cleanup rules. Unreadable files are collected, not fatal.
pub fn ingest_ptdb_layout(root: impl AsRef<Path>, layout: &PtdbLayout) -> Result<Ingested> {
    let root = root.as_ref();
    let sex_re = Regex::new(&layout.sex_pattern)
        .map_err(|e| Error::InvalidArgument(format!("sex_pattern: {e}")))?;
    let include = layout
        .include
        .as_deref()
        .map(Regex::new)
        .transpose()
        .map_err(|e| Error::InvalidArgument(format!("include: {e}")))?;

    let mut clips = Vec::new();
    let mut failures = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::InvalidArgument(format!("walking {}: {e}", root.display())))?;
        let path = entry.path();
        let is_wav = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav"));
        if !entry.file_type().is_file() || !is_wav {
            continue;
        }
        let rel = path.strip_prefix(root).unwrap_or(path).to_string_lossy().replace('\\', "/");
        if include.as_ref().is_some_and(|re| !re.is_match(&rel)) {
            continue;
        }
        match load_pair(path, &rel, layout, &sex_re) {
            Ok(clip) => clips.push(clip),
            Err(e) => failures.push(e),
        }
    }
    Ok(Ingested {
        corpus: ReferenceCorpus {
            id: root.display().to_string(),
            source: CorpusSource::PtdbLayout,
            clips,
        },
        failures,
    })
}

fn load_pair(wav: &Path, rel: &str, layout: &PtdbLayout, sex_re: &Regex) -> Result<ReferenceClip> {
    let ref_path = layout.reference_path(wav);
    if !ref_path.is_file() {
        return Err(Error::MissingPair(wav.to_path_buf()));
    }
    let audio = AudioClip::read_wav(wav)?;
    let rows = read_reference_rows(&ref_path, layout.pitch_column)?;
    let frames = audio.frame_count();
    let reference = PitchTrack::new(
        (0..frames)
            .map(|m| match rows.get(m) {
                Some(&f) if f > 0.0 => PitchFrame::voiced(f),
                _ => PitchFrame::unvoiced(),
            })
            .collect(),
    );
    let sex = sex_re
        .captures(rel)
        .and_then(|c| c.get(1))
        .and_then(|m| match m.as_str().chars().next()?.to_ascii_lowercase() {
            'f' => Some(Sex::Female),
            'm' => Some(Sex::Male),
            _ => None,
        });
    let mut clip = ReferenceClip {
        id: rel.to_string(),
        audio,
        reference,
        sex,
    };
    apply_cleanup(&mut clip, &layout.cleanup);
    Ok(clip)
}

pub const HISTOGRAM_BIN_HZ: f64 = 10.0;

/// Voiced reference pitch counts per 10 Hz bin and speaker group.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PitchHistogram {
    pub groups: BTreeMap<String, BTreeMap<u32, usize>>,
}

impl PitchHistogram {
    pub fn group(&self, name: &str) -> Option<&BTreeMap<u32, usize>> {
        self.groups.get(name)
    }

    /// Lower edges (Hz) of the bins that are local maxima with at least
    /// `min_count` frames.
    pub fn modes(&self, name: &str, min_count: usize) -> Vec<f64> {
        let Some(g) = self.groups.get(name) else {
            return vec![];
        };
        let count = |b: u32| g.get(&b).copied().unwrap_or(0);
        g.iter()
            .filter(|&(&b, &c)| {
                c >= min_count && c > count(b.wrapping_sub(1)) && c >= count(b + 1)
            })
            .map(|(&b, _)| b as f64 * HISTOGRAM_BIN_HZ)
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("group,bin_low_hz,count\n");
        for (group, bins) in &self.groups {
            for (b, c) in bins {
                s.push_str(&format!("{group},{},{c}\n", *b as f64 * HISTOGRAM_BIN_HZ));
            }
        }
        s
    }
}

/// Histogram of voiced reference pitch, grouped by speaker sex. The female
/// and male groups are always present, possibly empty.
pub fn pitch_histogram(corpus: &ReferenceCorpus) -> PitchHistogram {
    let mut h = PitchHistogram::default();
    h.groups.insert("female".into(), BTreeMap::new());
    h.groups.insert("male".into(), BTreeMap::new());
    for clip in &corpus.clips {
        let group = clip.sex.map_or("unknown", Sex::name);
        let bins = h.groups.entry(group.to_string()).or_default();
        for f in clip.reference.frames.iter().filter(|f| f.voiced) {
            *bins.entry((f.f0_hz as f64 / HISTOGRAM_BIN_HZ).floor() as u32).or_default() += 1;
        }
    }
    h
}
