//! Accuracy evaluation of the classifier over a labeled image corpus.
//!
//! A corpus is a directory with `interesting/` and `uninteresting/`
//! subdirectories. Each file is resized to 80x80, scored and compared with
//! the label implied by its directory.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::entropy::{complexity_score, DEFAULT_BOTTOM_THRESHOLD};
use crate::imaging::{load_image, resize, RgbImage, NONCE_IMAGE_SIDE};

pub const DEFAULT_TOP_THRESHOLD: u64 = 9_999_999;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("corpus directory missing: {0}")]
    MissingDirectory(PathBuf),
    #[error("corpus at {0} contains no images")]
    EmptyCorpus(PathBuf),
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Interesting,
    Uninteresting,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Interesting, Label::Uninteresting];

    pub fn dir_name(self) -> &'static str {
        match self {
            Label::Interesting => "interesting",
            Label::Uninteresting => "uninteresting",
        }
    }

    /// Prediction column text used in the per-row log.
    pub fn verdict_text(self) -> &'static str {
        match self {
            Label::Interesting => "INTERESTING",
            Label::Uninteresting => "NONINTERESTING",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.dir_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Thresholds {
    pub bottom: u64,
    pub top: u64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            bottom: DEFAULT_BOTTOM_THRESHOLD,
            top: DEFAULT_TOP_THRESHOLD,
        }
    }
}

impl Thresholds {
    /// Interesting iff `bottom < score < top`.
    pub fn predict(&self, score: u64) -> Label {
        if self.bottom < score && score < self.top {
            Label::Interesting
        } else {
            Label::Uninteresting
        }
    }
}

/// Resizes to 80x80, scores and predicts.
pub fn classify_one(img: &RgbImage, thresholds: &Thresholds) -> (u64, Label) {
    let score = complexity_score(&resize(img, NONCE_IMAGE_SIDE, NONCE_IMAGE_SIDE));
    (score, thresholds.predict(score))
}

/// Correct/incorrect counts with percentage helpers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub correct: usize,
    pub incorrect: usize,
}

impl Tally {
    pub fn new(correct: usize, incorrect: usize) -> Self {
        Tally { correct, incorrect }
    }

    pub fn total(&self) -> usize {
        self.correct + self.incorrect
    }

    pub fn accuracy(&self) -> f64 {
        percent(self.correct, self.total())
    }

    pub fn error_rate(&self) -> f64 {
        percent(self.incorrect, self.total())
    }

    fn record(&mut self, correct: bool) {
        if correct {
            self.correct += 1;
        } else {
            self.incorrect += 1;
        }
    }
}

impl std::ops::Add for Tally {
    type Output = Tally;

    fn add(self, o: Tally) -> Tally {
        Tally::new(self.correct + o.correct, self.incorrect + o.incorrect)
    }
}

fn percent(part: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        part as f64 / total as f64 * 100.0
    }
}

/// Two decimals followed by `%`.
pub fn format_percent(p: f64) -> String {
    format!("{p:.2}%")
}

/// Summary table in the shape of the reference accuracy tables.
pub fn render_tally_table(title: &str, tally: &Tally) -> String {
    format!(
        "{title}\n\tAbsolute\tRatio\nCorrect Classifications\t{}\t{}\nIncorrect Classifications\t{}\t{}\nTotal Classifications\t{}\t{}",
        tally.correct,
        format_percent(tally.accuracy()),
        tally.incorrect,
        format_percent(tally.error_rate()),
        tally.total(),
        format_percent(if tally.total() == 0 { 0.0 } else { 100.0 }),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalRow {
    pub filename: String,
    pub expected: Label,
    pub score: u64,
    pub predicted: Label,
    pub correct: bool,
}

impl EvalRow {
    /// `type, filename, score<TAB><TAB>VERDICT<TAB>(correct|incorrect)`
    pub fn log_line(&self) -> String {
        format!(
            "{}, {}, {}\t\t{}\t({})",
            self.expected,
            self.filename,
            self.score,
            self.predicted.verdict_text(),
            if self.correct { "correct" } else { "incorrect" }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetStats {
    pub label: Label,
    pub min: Option<u64>,
    pub max: Option<u64>,
    pub tally: Tally,
}

impl SetStats {
    pub fn range(&self) -> Option<u64> {
        Some(self.max? - self.min?)
    }

    pub fn accuracy(&self) -> f64 {
        self.tally.accuracy()
    }

    /// `min: A, max: B, range: C, accuracy: D%`
    pub fn log_line(&self) -> String {
        let show = |v: Option<u64>| v.map_or_else(|| "-".to_owned(), |v| v.to_string());
        format!(
            "min: {}, max: {}, range: {}, accuracy: {}",
            show(self.min),
            show(self.max),
            show(self.range()),
            format_percent(self.accuracy())
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub filename: String,
    pub expected: Label,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    pub sets: Vec<SetStats>,
    pub totals: Tally,
    /// Files that could not be decoded. They are not counted in any tally.
    pub failures: Vec<Failure>,
}

impl EvalReport {
    pub fn set(&self, label: Label) -> Option<&SetStats> {
        self.sets.iter().find(|s| s.label == label)
    }

    pub fn false_negatives(&self) -> impl Iterator<Item = &EvalRow> {
        self.rows
            .iter()
            .filter(|r| r.expected == Label::Interesting && r.predicted == Label::Uninteresting)
    }

    pub fn false_positives(&self) -> impl Iterator<Item = &EvalRow> {
        self.rows
            .iter()
            .filter(|r| r.expected == Label::Uninteresting && r.predicted == Label::Interesting)
    }

    /// Builds a report from already-scored rows.
    pub fn from_rows(mut rows: Vec<EvalRow>, failures: Vec<Failure>) -> Self {
        rows.sort_by(|a, b| {
            label_order(a.expected)
                .cmp(&label_order(b.expected))
                .then_with(|| a.filename.cmp(&b.filename))
        });
        let sets: Vec<SetStats> = Label::ALL
            .iter()
            .map(|&label| {
                let mut stats = SetStats {
                    label,
                    min: None,
                    max: None,
                    tally: Tally::default(),
                };
                for row in rows.iter().filter(|r| r.expected == label) {
                    stats.min = Some(stats.min.map_or(row.score, |m| m.min(row.score)));
                    stats.max = Some(stats.max.map_or(row.score, |m| m.max(row.score)));
                    stats.tally.record(row.correct);
                }
                stats
            })
            .collect();
        let totals = sets.iter().fold(Tally::default(), |acc, s| acc + s.tally);
        EvalReport {
            rows,
            sets,
            totals,
            failures,
        }
    }
}

fn label_order(l: Label) -> u8 {
    match l {
        Label::Interesting => 0,
        Label::Uninteresting => 1,
    }
}

/// A validated corpus root, with files listed in filename order.
#[derive(Debug, Clone)]
pub struct LabeledCorpus {
    root: PathBuf,
    files: Vec<(Label, PathBuf)>,
}

impl LabeledCorpus {
    pub fn open(root: impl AsRef<Path>) -> Result<Self, EvalError> {
        let root = root.as_ref().to_path_buf();
        let mut files = Vec::new();
        for label in Label::ALL {
            let dir = root.join(label.dir_name());
            if !dir.is_dir() {
                return Err(EvalError::MissingDirectory(dir));
            }
            let entries = fs::read_dir(&dir).map_err(|source| EvalError::Io {
                path: dir.clone(),
                source,
            })?;
            let mut paths = Vec::new();
            for entry in entries {
                let entry = entry.map_err(|source| EvalError::Io {
                    path: dir.clone(),
                    source,
                })?;
                let path = entry.path();
                if path.is_file() {
                    paths.push(path);
                }
            }
            paths.sort();
            files.extend(paths.into_iter().map(|p| (label, p)));
        }
        Ok(LabeledCorpus { root, files })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[(Label, PathBuf)] {
        &self.files
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }
}

/// Scores every file in the corpus.
pub fn evaluate_corpus(corpus: &LabeledCorpus, thresholds: &Thresholds) -> Result<EvalReport, EvalError> {
    if corpus.is_empty() {
        return Err(EvalError::EmptyCorpus(corpus.root.clone()));
    }
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (expected, path) in &corpus.files {
        let filename = path
            .file_name()
            .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        match load_image(path) {
            Ok(img) => {
                let (score, predicted) = classify_one(&img, thresholds);
                rows.push(EvalRow {
                    filename,
                    expected: *expected,
                    score,
                    predicted,
                    correct: predicted == *expected,
                });
            }
            Err(e) => failures.push(Failure {
                filename,
                expected: *expected,
                error: e.to_string(),
            }),
        }
    }
    if rows.is_empty() {
        return Err(EvalError::EmptyCorpus(corpus.root.clone()));
    }
    Ok(EvalReport::from_rows(rows, failures))
}
