//! Reproducible continuous-chunk subsampling of a video corpus.
//!
//! Videos are laid end to end in manifest order to form one timeline. A
//! subset of `fraction · total` hours is a single contiguous run starting at
//! a uniformly random offset; it is split into segments wherever it crosses
//! a video boundary and wraps from the end of the timeline back to the
//! start. With `num_chunks = k > 1` the timeline is cut into `k` equal
//! strata and one run of `target / k` hours is placed at a random position
//! inside each, so chunks never overlap.
//!
//! Plans are continuous-time; [`frame_count`] is the only quantization.

use std::collections::HashSet;

use rand::Rng;
use thiserror::Error;

use crate::rng;
use crate::scalar::floor_tolerant;

pub const MANIFEST_CSV_HEADER: &str = "video_id,duration_hours";
pub const PLAN_CSV_HEADER: &str = "video_id,start_hours,end_hours";

const BUNDLED_MANIFEST_CSV: &str = include_str!("../fixtures/corpus_manifest.csv");

#[derive(Debug, Error, PartialEq)]
pub enum SamplerError {
    #[error("fraction must lie in (0, 1], got {0}")]
    FractionOutOfRange(f64),
    #[error("number of chunks must be at least 1")]
    InvalidChunkCount,
    #[error("manifest is empty")]
    EmptyManifest,
    #[error("duplicate video id `{0}`")]
    DuplicateVideo(String),
    #[error("video `{0}` must have a positive, finite duration")]
    InvalidDuration(String),
    #[error("malformed manifest header: expected `{MANIFEST_CSV_HEADER}`, found `{0}`")]
    MalformedHeader(String),
    #[error("manifest line {line}: {message}")]
    RowParseError { line: u64, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VideoEntry {
    pub video_id: String,
    pub duration_hours: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VideoManifest {
    entries: Vec<VideoEntry>,
    total_hours: f64,
}

impl VideoManifest {
    pub fn new(entries: Vec<VideoEntry>) -> Result<Self, SamplerError> {
        if entries.is_empty() {
            return Err(SamplerError::EmptyManifest);
        }
        let mut ids = HashSet::new();
        for e in &entries {
            if !(e.duration_hours.is_finite() && e.duration_hours > 0.0) {
                return Err(SamplerError::InvalidDuration(e.video_id.clone()));
            }
            if !ids.insert(e.video_id.as_str()) {
                return Err(SamplerError::DuplicateVideo(e.video_id.clone()));
            }
        }
        let total_hours = entries.iter().map(|e| e.duration_hours).sum();
        Ok(Self { entries, total_hours })
    }

    /// The six-source, 4971-hour corpus. The UT Ego duration (17 h) is the
    /// remainder after the five larger sources and is approximate.
    pub fn bundled() -> Self {
        Self::from_csv(BUNDLED_MANIFEST_CSV).expect("bundled manifest is valid")
    }

    pub fn entries(&self) -> &[VideoEntry] {
        &self.entries
    }

    pub fn total_hours(&self) -> f64 {
        self.total_hours
    }

    pub fn duration_of(&self, video_id: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.video_id == video_id)
            .map(|e| e.duration_hours)
    }

    pub fn from_csv(text: &str) -> Result<Self, SamplerError> {
        let header = text.lines().next().unwrap_or("").trim_end_matches('\r');
        if header != MANIFEST_CSV_HEADER {
            return Err(SamplerError::MalformedHeader(header.to_string()));
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut entries = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| SamplerError::RowParseError {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != 2 {
                return Err(SamplerError::RowParseError {
                    line,
                    message: format!("expected 2 fields, found {}", record.len()),
                });
            }
            let duration_hours = record[1].trim().parse().map_err(|_| SamplerError::RowParseError {
                line,
                message: format!("cannot parse duration from `{}`", &record[1]),
            })?;
            entries.push(VideoEntry {
                video_id: record[0].to_string(),
                duration_hours,
            });
        }
        Self::new(entries)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(MANIFEST_CSV_HEADER);
        out.push('\n');
        for e in &self.entries {
            out.push_str(&format!("{},{}\n", e.video_id, e.duration_hours));
        }
        out
    }

    /// Video index and local offset of a timeline position in `[0, total)`.
    fn locate(&self, mut t: f64) -> (usize, f64) {
        for (i, e) in self.entries.iter().enumerate() {
            if t < e.duration_hours {
                return (i, t);
            }
            t -= e.duration_hours;
        }
        // t == total after rounding: start of the timeline
        (0, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub video_id: String,
    pub start_hours: f64,
    pub end_hours: f64,
}

impl Segment {
    pub fn hours(&self) -> f64 {
        self.end_hours - self.start_hours
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChunkPlan {
    pub segments: Vec<Segment>,
    pub fraction: f64,
    pub seed: u64,
    pub repeat: u32,
    pub num_chunks: usize,
}

impl ChunkPlan {
    pub fn total_hours(&self) -> f64 {
        self.segments.iter().map(Segment::hours).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(PLAN_CSV_HEADER.split(',')).expect("in-memory write");
        for s in &self.segments {
            w.write_record([s.video_id.clone(), s.start_hours.to_string(), s.end_hours.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// One contiguous run of `fraction · total` hours; see the module docs.
pub fn sample_chunks(
    manifest: &VideoManifest,
    fraction: f64,
    seed: u64,
    repeat: u32,
) -> Result<ChunkPlan, SamplerError> {
    sample_chunks_k(manifest, fraction, 1, seed, repeat)
}

/// [`sample_chunks`] generalized to `num_chunks` non-overlapping runs.
pub fn sample_chunks_k(
    manifest: &VideoManifest,
    fraction: f64,
    num_chunks: usize,
    seed: u64,
    repeat: u32,
) -> Result<ChunkPlan, SamplerError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(SamplerError::FractionOutOfRange(fraction));
    }
    if num_chunks == 0 {
        return Err(SamplerError::InvalidChunkCount);
    }
    let plan = |segments| ChunkPlan {
        segments,
        fraction,
        seed,
        repeat,
        num_chunks,
    };

    if fraction == 1.0 {
        return Ok(plan(
            manifest
                .entries
                .iter()
                .map(|e| Segment {
                    video_id: e.video_id.clone(),
                    start_hours: 0.0,
                    end_hours: e.duration_hours,
                })
                .collect(),
        ));
    }

    let total = manifest.total_hours;
    let target = fraction * total;
    let mut rng = rng::stream(seed, repeat as u64);
    let mut segments = Vec::new();

    if num_chunks == 1 {
        let offset = rng.random::<f64>() * total;
        walk(manifest, offset, target, &mut segments);
    } else {
        let stratum = total / num_chunks as f64;
        let run = target / num_chunks as f64;
        for j in 0..num_chunks {
            let offset = j as f64 * stratum + rng.random::<f64>() * (stratum - run);
            walk(manifest, offset, run, &mut segments);
        }
    }
    Ok(plan(segments))
}

/// Appends the segments of a run of `length` hours starting at timeline
/// position `offset`, wrapping at the end of the timeline.
fn walk(manifest: &VideoManifest, offset: f64, length: f64, out: &mut Vec<Segment>) {
    let entries = &manifest.entries;
    let dust = 1e-12 * manifest.total_hours;
    let (mut idx, mut local) = manifest.locate(offset);
    let mut remaining = length;
    while remaining > dust {
        let e = &entries[idx];
        let take = remaining.min(e.duration_hours - local);
        if take > 0.0 {
            let end = if take < remaining {
                e.duration_hours
            } else {
                (local + take).min(e.duration_hours)
            };
            out.push(Segment {
                video_id: e.video_id.clone(),
                start_hours: local,
                end_hours: end,
            });
            remaining -= take;
        }
        idx = (idx + 1) % entries.len();
        local = 0.0;
    }
}

/// Frames extracted from `hours` of video at `fps`: `floor(hours · 3600 · fps)`.
pub fn frame_count(hours: f64, fps: f64) -> u64 {
    floor_tolerant(hours * 3600.0 * fps) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_plan_valid(m: &VideoManifest, plan: &ChunkPlan) {
        for s in &plan.segments {
            let dur = m.duration_of(&s.video_id).unwrap();
            assert!(
                0.0 <= s.start_hours && s.start_hours < s.end_hours && s.end_hours <= dur,
                "{s:?}"
            );
        }
        for e in m.entries() {
            let mut own: Vec<&Segment> = plan.segments.iter().filter(|s| s.video_id == e.video_id).collect();
            own.sort_by(|a, b| a.start_hours.partial_cmp(&b.start_hours).unwrap());
            for w in own.windows(2) {
                assert!(w[0].end_hours <= w[1].start_hours, "overlap {:?}", w);
            }
        }
    }

    #[test]
    fn bundled_manifest_totals() {
        let m = VideoManifest::bundled();
        assert_eq!(m.total_hours(), 4971.0);
        assert_eq!(m.entries().len(), 6);
        assert_eq!(m.duration_of("ego4d"), Some(3670.0));
        assert_eq!(VideoManifest::from_csv(&m.to_csv()).unwrap(), m);
    }

    #[test]
    fn full_fraction_covers_everything() {
        let m = VideoManifest::bundled();
        let plan = sample_chunks(&m, 1.0, 0, 0).unwrap();
        assert_eq!(plan.segments.len(), 6);
        assert_eq!(plan.total_hours(), 4971.0);
        assert_plan_valid(&m, &plan);
    }

    #[test]
    fn smallest_subset() {
        let m = VideoManifest::bundled();
        let plan = sample_chunks(&m, 0.0001, 5, 1).unwrap();
        assert!((plan.total_hours() - 0.4971).abs() < 1e-9);
        assert_eq!(format!("{:.1}", plan.total_hours()), "0.5");
        assert_plan_valid(&m, &plan);
    }

    #[test]
    fn determinism_and_repeats() {
        let m = VideoManifest::bundled();
        let a = sample_chunks(&m, 0.01, 42, 0).unwrap();
        assert_eq!(a, sample_chunks(&m, 0.01, 42, 0).unwrap());
        let b = sample_chunks(&m, 0.01, 42, 1).unwrap();
        let c = sample_chunks(&m, 0.01, 42, 2).unwrap();
        assert_ne!(a.segments, b.segments);
        assert_ne!(b.segments, c.segments);
    }

    #[test]
    fn boundary_and_wrap_split() {
        let m = VideoManifest::new(vec![
            VideoEntry {
                video_id: "a".into(),
                duration_hours: 1.0,
            },
            VideoEntry {
                video_id: "b".into(),
                duration_hours: 1.0,
            },
        ])
        .unwrap();
        let mut segs = Vec::new();
        walk(&m, 1.5, 1.0, &mut segs);
        assert_eq!(
            segs,
            vec![
                Segment {
                    video_id: "b".into(),
                    start_hours: 0.5,
                    end_hours: 1.0
                },
                Segment {
                    video_id: "a".into(),
                    start_hours: 0.0,
                    end_hours: 0.5
                },
            ]
        );
        let mut segs = Vec::new();
        walk(&m, 0.25, 1.0, &mut segs);
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].start_hours, 0.25);
        assert_eq!(segs[1].end_hours, 0.25);
    }

    #[test]
    fn many_chunks() {
        let m = VideoManifest::bundled();
        for k in [2, 3, 10] {
            let plan = sample_chunks_k(&m, 0.05, k, 9, 0).unwrap();
            assert!((plan.total_hours() - 0.05 * 4971.0).abs() < 1e-9 * 4971.0);
            assert_plan_valid(&m, &plan);
        }
        assert_eq!(
            sample_chunks_k(&m, 0.05, 0, 9, 0).unwrap_err(),
            SamplerError::InvalidChunkCount
        );
    }

    #[test]
    fn errors() {
        let m = VideoManifest::bundled();
        assert_eq!(
            sample_chunks(&m, 0.0, 0, 0).unwrap_err(),
            SamplerError::FractionOutOfRange(0.0)
        );
        assert!(sample_chunks(&m, 1.5, 0, 0).is_err());
        assert!(sample_chunks(&m, f64::NAN, 0, 0).is_err());
        assert_eq!(VideoManifest::new(vec![]).unwrap_err(), SamplerError::EmptyManifest);
        assert!(matches!(
            VideoManifest::from_csv("video_id,duration_hours\na,1\na,2\n").unwrap_err(),
            SamplerError::DuplicateVideo(_)
        ));
        assert!(matches!(
            VideoManifest::from_csv("video_id,duration_hours\na,-1\n").unwrap_err(),
            SamplerError::InvalidDuration(_)
        ));
        assert!(matches!(
            VideoManifest::from_csv("video_id,duration_hours\na,x\n").unwrap_err(),
            SamplerError::RowParseError { line: 2, .. }
        ));
        assert!(matches!(
            VideoManifest::from_csv("id,hours\n").unwrap_err(),
            SamplerError::MalformedHeader(_)
        ));
    }

    #[test]
    fn frames() {
        assert_eq!(frame_count(4971.0, 1.0), 17_895_600);
        assert_eq!(frame_count(1.0, 1.0), 3600);
        assert_eq!(frame_count(0.5, 2.0), 3600);
        assert_eq!(frame_count(1.0 / 3600.0, 1.0), 1);
    }

    #[test]
    fn plan_csv() {
        let m = VideoManifest::bundled();
        let csv = sample_chunks(&m, 1.0, 0, 0).unwrap().to_csv();
        assert!(csv.starts_with("video_id,start_hours,end_hours\nego4d,0,3670\n"));
    }
}
