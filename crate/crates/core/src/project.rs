//! Uniform scale-up scenarios and human-threshold crossings.
//!
//! A `×m` scenario multiplies data hours, parameter count and pixel count by
//! `m`. Pixel count scaling means the image side grows by `√m`, after which
//! it is snapped to the nearest multiple of the patch size (ties round up):
//! from 476 px, `×2` gives 672, `×4` 952, `×5` 1064 and `×25` 2380.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Benchmark;
use crate::models::{InputPoint, ModelError, Predictor};
use crate::scalar::Scalar;

pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Hours to calendar years (24 h/day, 365 days).
pub fn hours_to_years(hours: f64) -> f64 {
    hours / HOURS_PER_YEAR
}

#[derive(Debug, Error, PartialEq)]
pub enum ProjectError {
    #[error("multiplier must be positive and finite, got {0}")]
    InvalidMultiplier(f64),
    #[error("scenario `{0}` has non-positive values")]
    InvalidScenario(String),
    #[error("search bound m_max must exceed 1, got {0}")]
    InvalidBracket(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("malformed scenario JSON: {0}")]
    Json(String),
}

/// The configuration scenarios scale from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferencePoint {
    pub hours: f64,
    pub params: u64,
    pub pixel_side: u64,
    pub patch: u64,
}

impl ReferencePoint {
    /// ViT-H/14 trained on all 4971 hours at 476×476.
    pub const VIT_H_476: ReferencePoint = ReferencePoint {
        hours: 4971.0,
        params: 633_000_000,
        pixel_side: 476,
        patch: 14,
    };
}

impl Default for ReferencePoint {
    fn default() -> Self {
        Self::VIT_H_476
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPoint {
    pub hours: f64,
    pub params: f64,
    pub pixel_side: u64,
}

impl ScaledPoint {
    pub fn pixels(&self) -> u64 {
        self.pixel_side * self.pixel_side
    }
}

/// Scales `reference` by `m`; see the module docs for the side-length rule.
pub fn apply_multiplier(reference: &ReferencePoint, m: f64) -> Result<ScaledPoint, ProjectError> {
    if !(m.is_finite() && m > 0.0) {
        return Err(ProjectError::InvalidMultiplier(m));
    }
    let patch = reference.patch as f64;
    let raw_side = reference.pixel_side as f64 * m.sqrt();
    let patches = (raw_side / patch + 0.5).floor().max(1.0);
    Ok(ScaledPoint {
        hours: m * reference.hours,
        params: m * reference.params as f64,
        pixel_side: patches as u64 * reference.patch,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioValues {
    Multiplier { multiplier: f64 },
    Explicit { hours: f64, params: f64, pixel_side: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(flatten)]
    pub values: ScenarioValues,
}

impl Scenario {
    pub fn multiplier(name: impl Into<String>, m: f64) -> Self {
        Self {
            name: name.into(),
            values: ScenarioValues::Multiplier { multiplier: m },
        }
    }

    pub fn explicit(name: impl Into<String>, hours: f64, params: f64, pixel_side: u64) -> Self {
        Self {
            name: name.into(),
            values: ScenarioValues::Explicit {
                hours,
                params,
                pixel_side,
            },
        }
    }

    pub fn resolve(&self, reference: &ReferencePoint) -> Result<ScaledPoint, ProjectError> {
        match self.values {
            ScenarioValues::Multiplier { multiplier } => apply_multiplier(reference, multiplier),
            ScenarioValues::Explicit {
                hours,
                params,
                pixel_side,
            } => {
                let ok = |x: f64| x.is_finite() && x > 0.0;
                if !ok(hours) || !ok(params) || pixel_side == 0 {
                    return Err(ProjectError::InvalidScenario(self.name.clone()));
                }
                Ok(ScaledPoint {
                    hours,
                    params,
                    pixel_side,
                })
            }
        }
    }
}

/// Scenario file: a JSON array of scenarios.
pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>, ProjectError> {
    serde_json::from_str(text).map_err(|e| ProjectError::Json(e.to_string()))
}

/// The four scale-ups reported for the two benchmarks.
pub fn standard_scenarios(benchmark: Benchmark) -> Vec<Scenario> {
    match benchmark {
        Benchmark::ImagenetTop5 => vec![
            Scenario::multiplier("Scenario A", 2.0),
            Scenario::multiplier("Scenario B", 4.0),
        ],
        Benchmark::OodImagenetTop1 => vec![
            Scenario::multiplier("Scenario C", 5.0),
            Scenario::multiplier("Scenario D", 25.0),
        ],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub scenario: Scenario,
    pub hours: f64,
    pub years: f64,
    pub params: f64,
    pub pixel_side: u64,
    pub pixels: u64,
    pub projected_accuracy: f64,
    pub threshold_reached: bool,
}

pub fn project<T, P>(
    fit: &P,
    reference: &ReferencePoint,
    scenario: &Scenario,
    benchmark: Benchmark,
) -> Result<Projection, ProjectError>
where
    T: Scalar,
    P: Predictor<T> + ?Sized,
{
    let point = scenario.resolve(reference)?;
    let projected_accuracy = predict_at(fit, &point)?;
    Ok(Projection {
        scenario: scenario.clone(),
        hours: point.hours,
        years: hours_to_years(point.hours),
        params: point.params,
        pixel_side: point.pixel_side,
        pixels: point.pixels(),
        projected_accuracy,
        threshold_reached: projected_accuracy >= benchmark.human_threshold(),
    })
}

fn predict_at<T: Scalar, P: Predictor<T> + ?Sized>(fit: &P, point: &ScaledPoint) -> Result<f64, ModelError> {
    let input = InputPoint::<T>::from_f64(point.hours, point.params, point.pixels() as f64)?;
    Ok(fit.predict(&input)?.to_f64_lossy())
}

pub const PROJECTION_CSV_HEADER: &str = "scenario,hours,years,params,pixel_side,projected_accuracy,threshold_reached";

pub fn projections_to_csv(rows: &[Projection]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(PROJECTION_CSV_HEADER.split(','))
        .expect("in-memory write");
    for p in rows {
        w.write_record([
            p.scenario.name.clone(),
            p.hours.to_string(),
            p.years.to_string(),
            p.params.to_string(),
            p.pixel_side.to_string(),
            p.projected_accuracy.to_string(),
            p.threshold_reached.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Three significant figures, for display only.
pub fn sig3(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let digits = 2 - x.abs().log10().floor() as i32;
    if digits > 0 {
        format!("{:.*}", digits as usize, x)
    } else {
        let scale = 10f64.powi(-digits);
        format!("{}", (x / scale).round() * scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdCrossing {
    /// Smallest multiplier at which the projection reaches the threshold.
    pub multiplier: f64,
    /// False when the projection was not monotone over the bracket; the
    /// multiplier is then the first crossing of the coarse scan.
    pub confident: bool,
}

const SCAN_POINTS: usize = 64;

/// Smallest `m ∈ [1, m_max]` whose `×m` projection reaches the benchmark's
/// human threshold, to relative precision 1e-3. `None` when the threshold is
/// never reached.
pub fn solve_threshold<T, P>(
    fit: &P,
    reference: &ReferencePoint,
    benchmark: Benchmark,
    m_max: f64,
) -> Result<Option<ThresholdCrossing>, ProjectError>
where
    T: Scalar,
    P: Predictor<T> + ?Sized,
{
    if !(m_max.is_finite() && m_max > 1.0) {
        return Err(ProjectError::InvalidBracket(m_max));
    }
    let threshold = benchmark.human_threshold();
    let gap =
        |m: f64| -> Result<f64, ProjectError> { Ok(predict_at(fit, &apply_multiplier(reference, m)?)? - threshold) };

    if gap(1.0)? >= 0.0 {
        return Ok(Some(ThresholdCrossing {
            multiplier: 1.0,
            confident: true,
        }));
    }

    // log-spaced scan, both ends included
    let ln_max = m_max.ln();
    let scan: Vec<(f64, f64)> = (0..SCAN_POINTS)
        .map(|i| {
            let m = if i == SCAN_POINTS - 1 {
                m_max
            } else {
                (ln_max * i as f64 / (SCAN_POINTS - 1) as f64).exp()
            };
            gap(m).map(|g| (m, g))
        })
        .collect::<Result<_, _>>()?;

    let monotone = scan.windows(2).all(|w| w[1].1 >= w[0].1);
    let first = scan.iter().position(|&(_, g)| g >= 0.0);
    let Some(k) = first else {
        return Ok(None);
    };
    if !monotone {
        return Ok(Some(ThresholdCrossing {
            multiplier: scan[k].0,
            confident: false,
        }));
    }

    let (mut lo, mut hi) = (scan[k - 1].0, scan[k].0);
    while hi - lo > 1e-4 * lo {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(ThresholdCrossing {
        multiplier: hi,
        confident: true,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ModelFamily, ScalingModel};

    const REF: ReferencePoint = ReferencePoint::VIT_H_476;

    #[test]
    fn year_conversion() {
        assert!((hours_to_years(20_000.0) - 2.283).abs() < 1e-3);
        assert_eq!(format!("{:.1}", hours_to_years(20_000.0)), "2.3");
        assert_eq!(hours_to_years(8760.0), 1.0);
        assert_eq!(format!("{:.1}", hours_to_years(4971.0)), "0.6");
        assert!((hours_to_years(4971.0) - 0.567).abs() < 1e-3);
    }

    #[test]
    fn table_scenarios() {
        let b = apply_multiplier(&REF, 4.0).unwrap();
        assert_eq!(b.hours, 19_884.0);
        assert_eq!(b.params, 2.532e9);
        assert_eq!(b.pixel_side, 952);
        assert_eq!(format!("{:.1}", hours_to_years(b.hours)), "2.3");

        assert_eq!(apply_multiplier(&REF, 2.0).unwrap().pixel_side, 672);
        assert_eq!(apply_multiplier(&REF, 5.0).unwrap().pixel_side, 1064);

        let d = apply_multiplier(&REF, 25.0).unwrap();
        assert_eq!(d.hours, 124_275.0);
        assert_eq!(d.params, 15.825e9);
        assert_eq!(d.pixel_side, 2380);
        assert_eq!(format!("{:.1}", hours_to_years(d.hours)), "14.2");

        let one = apply_multiplier(&REF, 1.0).unwrap();
        assert_eq!((one.hours, one.params, one.pixel_side), (4971.0, 633e6, 476));
    }

    #[test]
    fn snapping_edge_cases() {
        let r = ReferencePoint {
            hours: 1.0,
            params: 1,
            pixel_side: 21,
            patch: 14,
        };
        // 21 / 14 = 1.5 → ties round up to 2 patches
        assert_eq!(apply_multiplier(&r, 1.0).unwrap().pixel_side, 28);
        // tiny multipliers still keep one patch
        assert_eq!(apply_multiplier(&REF, 1e-6).unwrap().pixel_side, 14);
        assert!(apply_multiplier(&REF, 0.0).is_err());
        assert!(apply_multiplier(&REF, f64::NAN).is_err());
    }

    #[test]
    fn scenario_json() {
        let text = r#"[{"name":"B","multiplier":4},{"name":"ref","hours":4971,"params":633000000,"pixel_side":476}]"#;
        let s = parse_scenarios(text).unwrap();
        assert_eq!(s[0], Scenario::multiplier("B", 4.0));
        assert_eq!(s[1], Scenario::explicit("ref", 4971.0, 633e6, 476));
        assert!(parse_scenarios(r#"[{"name":"x"}]"#).is_err());
        let back: Vec<Scenario> = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    fn model() -> ScalingModel<f64> {
        ScalingModel::from_f64(ModelFamily::LogPoly6, &[0.05, 0.5, 0.1, 0.2, 2.0, 15.0]).unwrap()
    }

    #[test]
    fn identity_paths_agree() {
        let m = model();
        let via_mult = project(&m, &REF, &Scenario::multiplier("x", 1.0), Benchmark::ImagenetTop5).unwrap();
        let via_explicit = project(
            &m,
            &REF,
            &Scenario::explicit("x", 4971.0, 633e6, 476),
            Benchmark::ImagenetTop5,
        )
        .unwrap();
        assert_eq!(via_mult.projected_accuracy, via_explicit.projected_accuracy);
        assert_eq!(via_mult.pixels, 476 * 476);
        let direct = m.evaluate(&InputPoint::new(4971.0, 633e6, 226_576.0).unwrap()).unwrap();
        assert_eq!(via_mult.projected_accuracy, direct);
        assert_eq!(via_mult.threshold_reached, direct >= 90.0);
    }

    #[test]
    fn threshold_trivial_cases() {
        // constant 95 > 90: already reached at the reference
        let high = ScalingModel::<f64>::from_f64(ModelFamily::LogPoly6, &[0.0, 95.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(
            solve_threshold(&high, &REF, Benchmark::ImagenetTop5, 100.0).unwrap(),
            Some(ThresholdCrossing {
                multiplier: 1.0,
                confident: true
            })
        );
        let low = ScalingModel::<f64>::from_f64(ModelFamily::LogPoly6, &[0.0, 50.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(
            solve_threshold(&low, &REF, Benchmark::ImagenetTop5, 100.0).unwrap(),
            None
        );
        assert!(solve_threshold(&low, &REF, Benchmark::ImagenetTop5, 1.0).is_err());
    }

    #[test]
    fn non_monotone_projection_is_flagged() {
        // quadratic in ln n peaking between the reference and m_max:
        // accuracy = 100 − (ln n − ln(40·4971))² crosses 90 then falls back
        let c = (40.0 * 4971.0f64).ln();
        struct Bump(f64);
        impl Predictor<f64> for Bump {
            fn predict(&self, x: &InputPoint<f64>) -> Result<f64, ModelError> {
                Ok(100.0 - (x.n.ln() - self.0).powi(2))
            }
        }
        let hit = solve_threshold(&Bump(c), &REF, Benchmark::ImagenetTop5, 1e4)
            .unwrap()
            .unwrap();
        assert!(!hit.confident);
        // first scan point with ln m ≥ ln 40 − √10
        assert!(hit.multiplier >= (40f64.ln() - 10f64.sqrt()).exp());
    }

    #[test]
    fn sig3_display() {
        assert_eq!(sig3(2.532e9), "2530000000");
        assert_eq!(sig3(2.2831), "2.28");
        assert_eq!(sig3(0.4971), "0.497");
        assert_eq!(sig3(15.825), "15.8");
    }

    #[test]
    fn projection_csv_header() {
        let m = model();
        let rows: Vec<Projection> = standard_scenarios(Benchmark::ImagenetTop5)
            .iter()
            .map(|s| project(&m, &REF, s, Benchmark::ImagenetTop5).unwrap())
            .collect();
        let csv = projections_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(PROJECTION_CSV_HEADER));
        assert!(lines.next().unwrap().starts_with("Scenario A,9942,"));
        assert_eq!(csv.lines().count(), 3);
    }
}
