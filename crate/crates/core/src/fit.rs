//! Least-squares fitting of scaling models with multi-start Nelder–Mead,
//! and a seeded synthetic-data generator with a known ground-truth model.
//!
//! The loss is the unweighted sum of squared errors in percent-accuracy
//! space. Each restart starts from a parameter vector drawn uniformly from
//! `[init_low, init_high)` per coordinate; restart `i` draws from the
//! ChaCha20 stream keyed by `(seed, i)`, so a fit is reproducible no matter
//! how the restarts are scheduled across threads.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{exact_sqrt, Benchmark, FinetuneCondition, Observation, ObservationSet};
use crate::models::{evaluate_logs, InputPoint, ModelError, ModelFamily, Predictor, ScalingModel};
use crate::optim::{minimize, OptimError, OptimOptions};
use crate::rng;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("observation set is empty")]
    EmptySet,
    #[error("observation set mixes {0} benchmark/condition slices; filter it first")]
    MixedSlice(usize),
    #[error("every restart produced a non-finite loss")]
    AllRestartsInfeasible,
    #[error("invalid fit spec: {0}")]
    InvalidSpec(String),
    #[error("invalid synthetic spec: {0}")]
    InvalidSynthetic(String),
    #[error("true model is not finite at grid point ({hours}, {params}, {pixels})")]
    NonFiniteTruth { hours: f64, params: u64, pixels: u64 },
    #[error("true model gives accuracy {accuracy} outside [0, 100] at grid point ({hours}, {params}, {pixels})")]
    TruthOutOfRange {
        hours: f64,
        params: u64,
        pixels: u64,
        accuracy: f64,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Optim(#[from] OptimError),
    #[error("malformed fit JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitSpec<T> {
    pub family: ModelFamily,
    pub restarts: usize,
    pub init_low: T,
    pub init_high: T,
    pub seed: u64,
    pub optim_options: OptimOptions<T>,
}

impl<T: Scalar> FitSpec<T> {
    /// 32 restarts from `U[0, 0.1)` with default optimizer options.
    pub fn new(family: ModelFamily) -> Self {
        Self {
            family,
            restarts: 32,
            init_low: T::zero(),
            init_high: T::lit(0.1),
            seed: 0,
            optim_options: OptimOptions::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    fn validate(&self) -> Result<(), FitError> {
        if self.restarts == 0 {
            return Err(FitError::InvalidSpec("restarts must be at least 1".into()));
        }
        if self.init_low >= self.init_high || !self.init_low.is_finite() || !self.init_high.is_finite() {
            return Err(FitError::InvalidSpec("init_low must be below init_high".into()));
        }
        self.optim_options.validate()?;
        Ok(())
    }

    /// Start point of restart `index`.
    pub fn initial_point(&self, index: usize) -> Vec<T> {
        let mut rng = rng::stream(self.seed, index as u64);
        let width = self.init_high - self.init_low;
        (0..self.family.param_count())
            .map(|_| self.init_low + width * T::lit(rng.random::<f64>()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult<T> {
    /// Best model across restarts (ties go to the lowest restart index).
    pub model: ScalingModel<T>,
    pub benchmark: Benchmark,
    pub condition: FinetuneCondition,
    pub sse: T,
    pub rmse: T,
    /// Prediction minus observation, in set order.
    pub residuals: Vec<T>,
    /// Final loss of each restart; `+inf` for restarts that never left an
    /// infeasible region.
    pub restart_losses: Vec<T>,
    pub best_restart: usize,
    pub converged: bool,
    /// Fewer observations than free parameters.
    pub degenerate: bool,
}

impl<T: Scalar> FitResult<T> {
    pub fn predict(&self, point: &InputPoint<T>) -> Result<T, ModelError> {
        self.model.evaluate(point)
    }

    pub fn observation_count(&self) -> usize {
        self.residuals.len()
    }
}

impl<T: Scalar> Predictor<T> for FitResult<T> {
    fn predict(&self, point: &InputPoint<T>) -> Result<T, ModelError> {
        self.model.evaluate(point)
    }
}

/// On-disk form of a [`FitResult`]. Infeasible restart losses are written as
/// `null`.
#[derive(Debug, Serialize, Deserialize)]
struct FitReport {
    family: ModelFamily,
    params: Vec<f64>,
    benchmark: Benchmark,
    condition: FinetuneCondition,
    sse: f64,
    rmse: f64,
    converged: bool,
    degenerate: bool,
    best_restart: usize,
    restart_losses: Vec<Option<f64>>,
    residuals: Vec<f64>,
}

impl<T: Scalar> FitResult<T> {
    pub fn to_json(&self) -> String {
        let report = FitReport {
            family: self.model.family(),
            params: self.model.params().iter().map(|p| p.to_f64_lossy()).collect(),
            benchmark: self.benchmark,
            condition: self.condition,
            sse: self.sse.to_f64_lossy(),
            rmse: self.rmse.to_f64_lossy(),
            converged: self.converged,
            degenerate: self.degenerate,
            best_restart: self.best_restart,
            restart_losses: self
                .restart_losses
                .iter()
                .map(|l| l.is_finite().then(|| l.to_f64_lossy()))
                .collect(),
            residuals: self.residuals.iter().map(|r| r.to_f64_lossy()).collect(),
        };
        serde_json::to_string_pretty(&report).expect("fit report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, FitError> {
        let r: FitReport = serde_json::from_str(text)?;
        let model = ScalingModel::from_f64(r.family, &r.params)?;
        Ok(FitResult {
            model,
            benchmark: r.benchmark,
            condition: r.condition,
            sse: T::lit(r.sse),
            rmse: T::lit(r.rmse),
            residuals: r.residuals.into_iter().map(T::lit).collect(),
            restart_losses: r
                .restart_losses
                .into_iter()
                .map(|l| l.map(T::lit).unwrap_or_else(T::infinity))
                .collect(),
            best_restart: r.best_restart,
            converged: r.converged,
            degenerate: r.degenerate,
        })
    }
}

/// Log-space design matrix and targets, computed once per fit.
struct Prepared<T> {
    logs: Vec<[T; 3]>,
    targets: Vec<T>,
}

impl<T: Scalar> Prepared<T> {
    fn new(set: &ObservationSet) -> Result<Self, FitError> {
        let mut logs = Vec::with_capacity(set.len());
        let mut targets = Vec::with_capacity(set.len());
        for o in set {
            let p = InputPoint::<T>::from_f64(o.hours, o.params as f64, o.pixels as f64)?;
            logs.push(p.logs());
            targets.push(T::lit(o.accuracy));
        }
        Ok(Self { logs, targets })
    }

    /// Sum of squared residuals, `+inf` when any prediction is non-finite.
    fn sse(&self, family: ModelFamily, params: &[T]) -> T {
        let mut acc = T::zero();
        for (l, &y) in self.logs.iter().zip(&self.targets) {
            let e = evaluate_logs(family, params, *l) - y;
            if !e.is_finite() {
                return T::infinity();
            }
            acc = acc + e * e;
        }
        acc
    }

    fn residuals(&self, family: ModelFamily, params: &[T]) -> Vec<T> {
        self.logs
            .iter()
            .zip(&self.targets)
            .map(|(l, &y)| evaluate_logs(family, params, *l) - y)
            .collect()
    }
}

/// Σ (prediction − accuracy)² over `set`; `+inf` if any prediction is
/// non-finite.
pub fn sse_loss<T: Scalar>(model: &ScalingModel<T>, set: &ObservationSet) -> Result<T, FitError> {
    if set.is_empty() {
        return Err(FitError::EmptySet);
    }
    Ok(Prepared::new(set)?.sse(model.family(), model.params()))
}

struct RestartOutcome<T> {
    loss: T,
    params: Option<Vec<T>>,
    converged: bool,
}

/// Fits `spec.family` to a single benchmark × condition slice.
pub fn fit<T: Scalar>(set: &ObservationSet, spec: &FitSpec<T>) -> Result<FitResult<T>, FitError> {
    spec.validate()?;
    if set.is_empty() {
        return Err(FitError::EmptySet);
    }
    let (benchmark, condition) = set.slice().ok_or_else(|| FitError::MixedSlice(set.slices().len()))?;

    let data = Prepared::<T>::new(set)?;
    let family = spec.family;

    let outcomes: Vec<RestartOutcome<T>> = (0..spec.restarts)
        .into_par_iter()
        .map(|i| {
            let x0 = spec.initial_point(i);
            match minimize(|p: &[T]| data.sse(family, p), &x0, &spec.optim_options) {
                Ok(r) => RestartOutcome {
                    loss: r.f_min,
                    params: r.f_min.is_finite().then_some(r.x_min),
                    converged: r.converged,
                },
                Err(_) => RestartOutcome {
                    loss: T::infinity(),
                    params: None,
                    converged: false,
                },
            }
        })
        .collect();

    let mut best: Option<usize> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if o.params.is_some() && best.is_none_or(|b| o.loss < outcomes[b].loss) {
            best = Some(i);
        }
    }
    let best_restart = best.ok_or(FitError::AllRestartsInfeasible)?;
    let params = outcomes[best_restart].params.clone().expect("best restart is feasible");

    let residuals = data.residuals(family, &params);
    let sse = data.sse(family, &params);
    let n = T::from_usize_lossy(set.len());
    Ok(FitResult {
        model: ScalingModel::new(family, params)?,
        benchmark,
        condition,
        sse,
        rmse: (sse / n).sqrt(),
        residuals,
        restart_losses: outcomes.iter().map(|o| o.loss).collect(),
        best_restart,
        converged: outcomes[best_restart].converged,
        degenerate: set.len() < family.param_count(),
    })
}

/// One architecture column of a synthetic design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchPoint {
    pub label: String,
    pub params: f64,
    pub pixels: f64,
}

impl ArchPoint {
    pub fn new(label: impl Into<String>, params: f64, side: u64) -> Self {
        Self {
            label: label.into(),
            params,
            pixels: (side * side) as f64,
        }
    }
}

/// Hours for the full 4971 h corpus and its 10%, 1%, 0.1% and 0.01% subsets.
pub fn standard_hours_grid() -> Vec<f64> {
    [1.0, 0.1, 0.01, 0.001, 0.0001].iter().map(|f| 4971.0 * f).collect()
}

/// The six trained architectures: four sizes at 224 px plus ViT-H at 448 and
/// 476 px.
pub fn standard_architectures() -> Vec<ArchPoint> {
    vec![
        ArchPoint::new("ViT-S/14", 22e6, 224),
        ArchPoint::new("ViT-B/14", 87e6, 224),
        ArchPoint::new("ViT-L/14", 304e6, 224),
        ArchPoint::new("ViT-H/14", 633e6, 224),
        ArchPoint::new("ViT-H/14@448", 633e6, 448),
        ArchPoint::new("ViT-H/14@476", 633e6, 476),
    ]
}

fn default_repeats() -> u32 {
    3
}

fn default_true() -> bool {
    true
}

fn default_benchmark() -> Benchmark {
    Benchmark::ImagenetTop5
}

fn default_condition() -> FinetuneCondition {
    FinetuneCondition::Permissive
}

/// Description of a synthetic observation grid.
///
/// Architectures come from `architectures` when non-empty, otherwise from
/// the cross product `params_grid × pixels_grid`; when all three are empty
/// the six standard architectures are used. With `standard_design`, the largest
/// hours value is measured once and every other value `repeats` times (the
/// full corpus cannot be resampled), which gives 6 × (1 + 4 × 3) = 78
/// observations for the default grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct SyntheticSpec<T> {
    pub true_model: ScalingModel<T>,
    #[serde(default = "standard_hours_grid")]
    pub hours_grid: Vec<f64>,
    #[serde(default)]
    pub params_grid: Vec<f64>,
    #[serde(default)]
    pub pixels_grid: Vec<f64>,
    #[serde(default)]
    pub architectures: Vec<ArchPoint>,
    #[serde(default = "default_repeats")]
    pub repeats: u32,
    #[serde(default)]
    pub noise_sd: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub standard_design: bool,
    #[serde(default = "default_benchmark")]
    pub benchmark: Benchmark,
    #[serde(default = "default_condition")]
    pub condition: FinetuneCondition,
}

impl<T: Scalar> SyntheticSpec<T> {
    /// The 78-point design: standard hours grid, the six architectures, three
    /// repeats of every proper subset.
    pub fn standard(true_model: ScalingModel<T>, seed: u64) -> Self {
        Self {
            true_model,
            hours_grid: standard_hours_grid(),
            params_grid: Vec::new(),
            pixels_grid: Vec::new(),
            architectures: standard_architectures(),
            repeats: 3,
            noise_sd: 0.0,
            seed,
            standard_design: true,
            benchmark: Benchmark::ImagenetTop5,
            condition: FinetuneCondition::Permissive,
        }
    }

    /// Full cross product of the three grids, each point repeated `repeats`
    /// times.
    pub fn grid(true_model: ScalingModel<T>, hours: &[f64], params: &[f64], pixels: &[f64], repeats: u32) -> Self {
        Self {
            true_model,
            hours_grid: hours.to_vec(),
            params_grid: params.to_vec(),
            pixels_grid: pixels.to_vec(),
            architectures: Vec::new(),
            repeats,
            noise_sd: 0.0,
            seed: 0,
            standard_design: false,
            benchmark: Benchmark::ImagenetTop5,
            condition: FinetuneCondition::Permissive,
        }
    }

    pub fn with_noise(mut self, noise_sd: f64, seed: u64) -> Self {
        self.noise_sd = noise_sd;
        self.seed = seed;
        self
    }

    fn resolved_architectures(&self) -> Vec<ArchPoint> {
        if !self.architectures.is_empty() {
            return self.architectures.clone();
        }
        if self.params_grid.is_empty() && self.pixels_grid.is_empty() {
            return standard_architectures();
        }
        let mut out = Vec::new();
        for &p in &self.params_grid {
            for &px in &self.pixels_grid {
                out.push(ArchPoint {
                    label: format!("d={p:e},r={px}"),
                    params: p,
                    pixels: px,
                });
            }
        }
        out
    }
}

fn positive_finite(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

/// Generates one observation per (architecture, hours, repeat) in that
/// nesting order. Parameter and pixel counts are rounded to integers before
/// the truth is evaluated, so noiseless accuracies equal the model's value at
/// the stored point. Noisy accuracies are clamped to `[0, 100]`.
pub fn generate_synthetic<T: Scalar>(spec: &SyntheticSpec<T>) -> Result<ObservationSet, FitError> {
    let archs = spec.resolved_architectures();
    if spec.hours_grid.is_empty() || archs.is_empty() {
        return Err(FitError::InvalidSynthetic("grids must be non-empty".into()));
    }
    if spec.repeats == 0 {
        return Err(FitError::InvalidSynthetic("repeats must be at least 1".into()));
    }
    if !(spec.noise_sd.is_finite() && spec.noise_sd >= 0.0) {
        return Err(FitError::InvalidSynthetic("noise_sd must be non-negative".into()));
    }
    if !spec.hours_grid.iter().all(|&h| positive_finite(h)) {
        return Err(FitError::InvalidSynthetic("hours must be positive".into()));
    }
    let max_hours = spec.hours_grid.iter().copied().fold(f64::MIN, f64::max);

    let noise = (spec.noise_sd > 0.0).then(|| Normal::new(0.0, spec.noise_sd).expect("validated noise_sd"));
    let mut rng = rng::stream(spec.seed, 0);

    let mut observations = Vec::new();
    for arch in &archs {
        if !positive_finite(arch.params) || !positive_finite(arch.pixels) {
            return Err(FitError::InvalidSynthetic(format!(
                "architecture `{}` needs positive params and pixels",
                arch.label
            )));
        }
        let params = arch.params.round().max(1.0) as u64;
        let pixels = arch.pixels.round() as u64;
        if exact_sqrt(pixels).is_none() {
            return Err(FitError::InvalidSynthetic(format!(
                "pixel count {pixels} of `{}` is not a perfect square",
                arch.label
            )));
        }
        for &hours in &spec.hours_grid {
            let point = InputPoint::<T>::from_f64(hours, params as f64, pixels as f64)?;
            let truth = spec
                .true_model
                .evaluate(&point)
                .map_err(|_| FitError::NonFiniteTruth { hours, params, pixels })?
                .to_f64_lossy();
            if !(0.0..=100.0).contains(&truth) {
                return Err(FitError::TruthOutOfRange {
                    hours,
                    params,
                    pixels,
                    accuracy: truth,
                });
            }
            let repeats = if spec.standard_design && hours == max_hours {
                1
            } else {
                spec.repeats
            };
            for repeat in 0..repeats {
                let accuracy = match &noise {
                    Some(dist) => (truth + dist.sample(&mut rng)).clamp(0.0, 100.0),
                    None => truth,
                };
                observations.push(Observation {
                    benchmark: spec.benchmark,
                    condition: spec.condition,
                    hours,
                    params,
                    pixels,
                    accuracy,
                    repeat,
                    arch_label: arch.label.clone(),
                });
            }
        }
    }
    Ok(ObservationSet::new(observations, "synthetic"))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn truth_logpoly() -> ScalingModel<f64> {
        ScalingModel::from_f64(ModelFamily::LogPoly6, &[0.05, 0.5, 0.1, 0.2, 2.0, 15.0]).unwrap()
    }

    fn constant(g: f64) -> ScalingModel<f64> {
        ScalingModel::from_f64(ModelFamily::InteractionPoly8, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, g]).unwrap()
    }

    fn single(acc: f64, hours: f64) -> Observation {
        Observation {
            benchmark: Benchmark::ImagenetTop5,
            condition: FinetuneCondition::Permissive,
            hours,
            params: 22_000_000,
            pixels: 50176,
            accuracy: acc,
            repeat: 0,
            arch_label: "x".into(),
        }
    }

    #[test]
    fn standard_design_has_78_points() {
        let set = generate_synthetic(&SyntheticSpec::standard(truth_logpoly(), 1)).unwrap();
        assert_eq!(set.len(), 78);
        let full = set.iter().filter(|o| o.hours == 4971.0).count();
        assert_eq!(full, 6);
        let labels: std::collections::BTreeSet<_> = set.iter().map(|o| o.arch_label.clone()).collect();
        assert_eq!(labels.len(), 6);
    }

    #[test]
    fn cross_product_counts() {
        let spec = SyntheticSpec::grid(truth_logpoly(), &[10.0, 100.0], &[1e7, 1e8, 1e9], &[50176.0], 2);
        assert_eq!(generate_synthetic(&spec).unwrap().len(), 12);
    }

    #[test]
    fn noiseless_equals_truth_and_is_deterministic() {
        let spec = SyntheticSpec::standard(truth_logpoly(), 3);
        let a = generate_synthetic(&spec).unwrap();
        let b = generate_synthetic(&spec).unwrap();
        assert_eq!(a, b);
        let preds = truth_logpoly().evaluate_batch(&a).unwrap();
        for (o, p) in a.iter().zip(preds) {
            assert_eq!(o.accuracy, p);
        }
        let noisy = spec.clone().with_noise(1.0, 9);
        assert_eq!(generate_synthetic(&noisy).unwrap(), generate_synthetic(&noisy).unwrap());
        assert_ne!(generate_synthetic(&noisy).unwrap(), a);
    }

    #[test]
    fn generator_errors() {
        let mut spec = SyntheticSpec::standard(truth_logpoly(), 0);
        spec.architectures = vec![ArchPoint {
            label: "bad".into(),
            params: 1e6,
            pixels: 1000.0,
        }];
        assert!(matches!(generate_synthetic(&spec), Err(FitError::InvalidSynthetic(_))));

        let hazard = ScalingModel::<f64>::from_f64(
            ModelFamily::PowerProduct10,
            &[0.01, 0.5, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0],
        )
        .unwrap();
        let got = generate_synthetic(&SyntheticSpec::standard(hazard, 0));
        assert!(matches!(got, Err(FitError::NonFiniteTruth { .. })), "{got:?}");

        assert!(matches!(
            generate_synthetic(&SyntheticSpec::standard(constant(150.0), 0)),
            Err(FitError::TruthOutOfRange { .. })
        ));
    }

    #[test]
    fn sse_examples() {
        let set = ObservationSet::new(vec![single(40.0, 10.0), single(60.0, 20.0)], "");
        assert_eq!(sse_loss(&constant(50.0), &set).unwrap(), 200.0);
        assert!(matches!(
            sse_loss(&constant(50.0), &ObservationSet::default()),
            Err(FitError::EmptySet)
        ));

        let perfect = generate_synthetic(&SyntheticSpec::standard(truth_logpoly(), 0)).unwrap();
        assert_eq!(sse_loss(&truth_logpoly(), &perfect).unwrap(), 0.0);
    }

    #[test]
    fn sse_infinite_on_hazard() {
        let set = ObservationSet::new(vec![single(40.0, 0.5)], "");
        let hazard = ScalingModel::<f64>::from_f64(
            ModelFamily::PowerProduct10,
            &[1.0, 0.5, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0],
        )
        .unwrap();
        assert_eq!(sse_loss(&hazard, &set).unwrap(), f64::INFINITY);
    }

    #[test]
    fn single_point_interaction_fit() {
        let set = ObservationSet::new(vec![single(37.5, 10.0)], "");
        let r = fit(
            &set,
            &FitSpec::<f64>::new(ModelFamily::InteractionPoly8).with_restarts(4),
        )
        .unwrap();
        assert!(r.degenerate);
        assert!(r.rmse < 1e-6, "rmse {}", r.rmse);
    }

    #[test]
    fn fit_rejects_bad_input() {
        let spec = FitSpec::<f64>::new(ModelFamily::LogPoly6);
        assert!(matches!(
            fit(&ObservationSet::default(), &spec),
            Err(FitError::EmptySet)
        ));
        let mut other = single(40.0, 10.0);
        other.condition = FinetuneCondition::Stringent;
        let mixed = ObservationSet::new(vec![single(40.0, 10.0), other], "");
        assert!(matches!(fit(&mixed, &spec), Err(FitError::MixedSlice(2))));
        let set = ObservationSet::new(vec![single(40.0, 10.0)], "");
        assert!(matches!(
            fit(&set, &spec.clone().with_restarts(0)),
            Err(FitError::InvalidSpec(_))
        ));
        let mut inverted = spec;
        inverted.init_low = 1.0;
        inverted.init_high = 0.5;
        assert!(matches!(fit(&set, &inverted), Err(FitError::InvalidSpec(_))));
    }

    #[test]
    fn all_restarts_infeasible() {
        // every hours value is below 1, so (ln n)^β is undefined for any
        // fractional β near the small-value start region
        let set = ObservationSet::new(vec![single(40.0, 0.5), single(41.0, 0.6)], "");
        let mut spec = FitSpec::<f64>::new(ModelFamily::PowerProduct10).with_restarts(3);
        spec.init_low = 0.2;
        spec.init_high = 0.3;
        spec.optim_options.initial_step = 1e-3;
        assert!(matches!(fit(&set, &spec), Err(FitError::AllRestartsInfeasible)));
    }

    #[test]
    fn initial_points_in_band_and_seeded() {
        let spec = FitSpec::<f64>::new(ModelFamily::PowerProduct10).with_seed(11);
        let a = spec.initial_point(0);
        assert_eq!(a.len(), 10);
        assert!(a.iter().all(|&x| (0.0..0.1).contains(&x)));
        assert_eq!(a, spec.initial_point(0));
        assert_ne!(a, spec.initial_point(1));
        assert_ne!(a, spec.clone().with_seed(12).initial_point(0));
    }

    #[test]
    fn json_round_trip() {
        let set = generate_synthetic(&SyntheticSpec::standard(truth_logpoly(), 0)).unwrap();
        let r = fit(&set, &FitSpec::<f64>::new(ModelFamily::LogPoly6).with_restarts(2)).unwrap();
        let text = r.to_json();
        let back = FitResult::<f64>::from_json(&text).unwrap();
        assert_eq!(back, r);
        let mut with_inf = r.clone();
        with_inf.restart_losses[1] = f64::INFINITY;
        assert!(with_inf.to_json().contains("null"));
        assert_eq!(FitResult::<f64>::from_json(&with_inf.to_json()).unwrap(), with_inf);
    }
}
