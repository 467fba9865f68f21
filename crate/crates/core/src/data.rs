//! Scaling observations: one measured accuracy per (data hours, parameter
//! count, pixel count) configuration, tagged with the benchmark and
//! finetuning condition it was measured under.
//!
//! Accuracy is stored in percent (0–100) everywhere in the crate.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact header line of an observations CSV.
pub const CSV_HEADER: &str = "benchmark,condition,hours,params,pixels,accuracy,repeat,arch_label";

const COLUMNS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    ImagenetTop5,
    OodImagenetTop1,
}

impl Benchmark {
    pub const ALL: [Benchmark; 2] = [Benchmark::ImagenetTop5, Benchmark::OodImagenetTop1];

    /// Human-level accuracy in percent: 90% top-5 on ImageNet (a lower bound),
    /// 72.3% average top-1 on the out-of-distribution variants.
    pub fn human_threshold(self) -> f64 {
        match self {
            Benchmark::ImagenetTop5 => 90.0,
            Benchmark::OodImagenetTop1 => 72.3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Benchmark::ImagenetTop5 => "imagenet_top5",
            Benchmark::OodImagenetTop1 => "ood_imagenet_top1",
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Benchmark {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "imagenet_top5" => Ok(Benchmark::ImagenetTop5),
            "ood_imagenet_top1" => Ok(Benchmark::OodImagenetTop1),
            other => Err(format!("unknown benchmark `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinetuneCondition {
    Stringent,
    Permissive,
}

impl FinetuneCondition {
    pub const ALL: [FinetuneCondition; 2] = [FinetuneCondition::Stringent, FinetuneCondition::Permissive];

    pub fn as_str(self) -> &'static str {
        match self {
            FinetuneCondition::Stringent => "stringent",
            FinetuneCondition::Permissive => "permissive",
        }
    }
}

impl fmt::Display for FinetuneCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FinetuneCondition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stringent" => Ok(FinetuneCondition::Stringent),
            "permissive" => Ok(FinetuneCondition::Permissive),
            other => Err(format!("unknown condition `{other}`")),
        }
    }
}

/// A single measured point.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub benchmark: Benchmark,
    pub condition: FinetuneCondition,
    /// Hours of pretraining video.
    pub hours: f64,
    /// Model parameter count.
    pub params: u64,
    /// Image pixel count (side²).
    pub pixels: u64,
    /// Accuracy in percent.
    pub accuracy: f64,
    /// Subset-sampling repeat index.
    pub repeat: u32,
    pub arch_label: String,
}

impl Observation {
    /// Checks the field invariants. `pixels` must be the square of a positive
    /// side length.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.hours.is_finite() && self.hours > 0.0) {
            return Err(format!("hours must be positive and finite, got {}", self.hours));
        }
        if self.params == 0 {
            return Err("params must be positive".into());
        }
        if self.pixels == 0 {
            return Err("pixels must be positive".into());
        }
        if exact_sqrt(self.pixels).is_none() {
            return Err(format!("pixels {} is not a perfect square", self.pixels));
        }
        if !(0.0..=100.0).contains(&self.accuracy) {
            return Err(format!("accuracy {} outside [0, 100]", self.accuracy));
        }
        Ok(())
    }

    /// Image side length in pixels.
    pub fn side(&self) -> u64 {
        exact_sqrt(self.pixels).expect("validated observations have square pixel counts")
    }
}

/// Integer square root when `n` is a perfect square.
pub fn exact_sqrt(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt().round() as u64;
    // guard against floating error for large n
    (r.saturating_sub(1)..=r + 1).find(|&s| s.checked_mul(s) == Some(n))
}

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("malformed header: expected `{CSV_HEADER}`, found `{found}`")]
    MalformedHeader { found: String },
    #[error("line {line}: {message}")]
    RowParseError { line: u64, message: String },
    #[error("line {line}: duplicate of line {first}")]
    DuplicateRow { line: u64, first: u64 },
}

/// An ordered collection of observations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservationSet {
    pub observations: Vec<Observation>,
    pub source_label: String,
}

impl ObservationSet {
    pub fn new(observations: Vec<Observation>, source_label: impl Into<String>) -> Self {
        Self {
            observations,
            source_label: source_label.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Observation> {
        self.observations.iter()
    }

    /// Observations matching one benchmark × condition slice, in order.
    pub fn filter(&self, benchmark: Benchmark, condition: FinetuneCondition) -> ObservationSet {
        ObservationSet {
            observations: self
                .observations
                .iter()
                .filter(|o| o.benchmark == benchmark && o.condition == condition)
                .cloned()
                .collect(),
            source_label: self.source_label.clone(),
        }
    }

    /// The single (benchmark, condition) slice this set belongs to, if any.
    /// Returns `None` for an empty set and for mixed sets.
    pub fn slice(&self) -> Option<(Benchmark, FinetuneCondition)> {
        let first = self.observations.first()?;
        let key = (first.benchmark, first.condition);
        self.observations
            .iter()
            .all(|o| (o.benchmark, o.condition) == key)
            .then_some(key)
    }

    /// Distinct (benchmark, condition) slices in first-seen order.
    pub fn slices(&self) -> Vec<(Benchmark, FinetuneCondition)> {
        let mut out = Vec::new();
        for o in &self.observations {
            let key = (o.benchmark, o.condition);
            if !out.contains(&key) {
                out.push(key);
            }
        }
        out
    }

    /// Serializes to the observations CSV format, header included.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
        for o in &self.observations {
            w.write_record([
                o.benchmark.as_str().to_string(),
                o.condition.as_str().to_string(),
                o.hours.to_string(),
                o.params.to_string(),
                o.pixels.to_string(),
                o.accuracy.to_string(),
                o.repeat.to_string(),
                o.arch_label.clone(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }
}

impl<'a> IntoIterator for &'a ObservationSet {
    type Item = &'a Observation;
    type IntoIter = std::slice::Iter<'a, Observation>;

    fn into_iter(self) -> Self::IntoIter {
        self.observations.iter()
    }
}

/// Parses an observations CSV. Every column is mandatory, rows keep their
/// order, and byte-identical rows are rejected.
pub fn ingest_observations(csv_text: &str) -> Result<ObservationSet, IngestError> {
    let header = csv_text.lines().next().unwrap_or("");
    let header = header.strip_suffix('\r').unwrap_or(header);
    if header != CSV_HEADER {
        return Err(IngestError::MalformedHeader {
            found: header.to_string(),
        });
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(csv_text.as_bytes());

    let mut observations = Vec::new();
    let mut seen: HashSet<Vec<String>> = HashSet::new();
    let mut first_line: Vec<(Vec<String>, u64)> = Vec::new();

    for record in reader.records() {
        let record = record.map_err(|e| IngestError::RowParseError {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row_err = |message: String| IngestError::RowParseError { line, message };

        if record.len() != COLUMNS {
            return Err(row_err(format!("expected {COLUMNS} fields, found {}", record.len())));
        }
        let fields: Vec<String> = record.iter().map(str::to_string).collect();
        if !seen.insert(fields.clone()) {
            let first = first_line
                .iter()
                .find(|(f, _)| *f == fields)
                .map(|(_, l)| *l)
                .unwrap_or(0);
            return Err(IngestError::DuplicateRow { line, first });
        }
        first_line.push((fields.clone(), line));

        let obs = Observation {
            benchmark: fields[0].parse().map_err(row_err)?,
            condition: fields[1].parse().map_err(row_err)?,
            hours: parse_field(&fields[2], "hours").map_err(row_err)?,
            params: parse_field(&fields[3], "params").map_err(row_err)?,
            pixels: parse_field(&fields[4], "pixels").map_err(row_err)?,
            accuracy: parse_field(&fields[5], "accuracy").map_err(row_err)?,
            repeat: parse_field(&fields[6], "repeat").map_err(row_err)?,
            arch_label: fields[7].clone(),
        };
        obs.validate().map_err(row_err)?;
        observations.push(obs);
    }

    Ok(ObservationSet {
        observations,
        source_label: String::new(),
    })
}

fn parse_field<T: FromStr>(raw: &str, name: &str) -> Result<T, String> {
    raw.trim()
        .parse()
        .map_err(|_| format!("cannot parse {name} from `{raw}`"))
}
