//! The three parametric scaling families.
//!
//! With `ñ = ln n`, `d̃ = ln d`, `r̃ = ln r` (natural logarithm throughout):
//!
//! * [`ModelFamily::LogPoly6`]: `(α_n ñ + β_n)(α_d d̃ + β_d)(α_r r̃ + β_r)`
//! * [`ModelFamily::PowerProduct10`]:
//!   `(α_n ñ^β_n + γ_n)(α_d d̃^β_d + γ_d)(α_r r̃^β_r + γ_r) + δ`
//! * [`ModelFamily::InteractionPoly8`]:
//!   `α_n ñ + α_d d̃ + α_r r̃ + α_nd ñd̃ + α_nr ñr̃ + α_dr d̃r̃ + α_ndr ñd̃r̃ + γ`
//!
//! Here `n` is hours of pretraining video, `d` the parameter count and `r`
//! the pixel count. Predictions are accuracy in percent and are never
//! clamped. Using a different logarithm base only reparameterizes each
//! family; see [`ScalingModel::from_log_base`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::ObservationSet;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    LogPoly6,
    PowerProduct10,
    InteractionPoly8,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 3] = [
        ModelFamily::LogPoly6,
        ModelFamily::PowerProduct10,
        ModelFamily::InteractionPoly8,
    ];

    pub fn param_count(self) -> usize {
        self.param_names().len()
    }

    /// Parameter symbols in vector order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            ModelFamily::LogPoly6 => &["α_n", "β_n", "α_d", "β_d", "α_r", "β_r"],
            ModelFamily::PowerProduct10 => &["α_n", "β_n", "γ_n", "α_d", "β_d", "γ_d", "α_r", "β_r", "γ_r", "δ"],
            ModelFamily::InteractionPoly8 => &["α_n", "α_d", "α_r", "α_nd", "α_nr", "α_dr", "α_ndr", "γ"],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModelFamily::LogPoly6 => "log_poly6",
            ModelFamily::PowerProduct10 => "power_product10",
            ModelFamily::InteractionPoly8 => "interaction_poly8",
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelFamily::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown model family `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{family} expects {expected} parameters, got {found}")]
    ParamCountMismatch {
        family: ModelFamily,
        expected: usize,
        found: usize,
    },
    #[error("parameter {index} is not finite")]
    NonFiniteParam { index: usize },
    #[error("input point must have n, d, r > 0 and finite")]
    InvalidPoint,
    #[error("non-finite prediction{}", .index.map(|i| format!(" at observation {i}")).unwrap_or_default())]
    NonFiniteResult { index: Option<usize> },
}

/// A (data hours, parameter count, pixel count) query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputPoint<T> {
    pub n: T,
    pub d: T,
    pub r: T,
}

impl<T: Scalar> InputPoint<T> {
    pub fn new(n: T, d: T, r: T) -> Result<Self, ModelError> {
        let ok = |x: T| x.is_finite() && x > T::zero();
        if ok(n) && ok(d) && ok(r) {
            Ok(Self { n, d, r })
        } else {
            Err(ModelError::InvalidPoint)
        }
    }

    pub fn from_f64(n: f64, d: f64, r: f64) -> Result<Self, ModelError> {
        Self::new(T::lit(n), T::lit(d), T::lit(r))
    }

    /// Coordinates at or below 1 give non-positive logarithms, which is legal
    /// but usually a unit mistake (and undefined for fractional powers in
    /// `PowerProduct10`).
    pub fn has_sub_unit_coordinate(&self) -> bool {
        self.n <= T::one() || self.d <= T::one() || self.r <= T::one()
    }

    pub(crate) fn logs(&self) -> [T; 3] {
        [self.n.ln(), self.d.ln(), self.r.ln()]
    }
}

/// A model family together with its parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScalingModel<T>", into = "RawScalingModel<T>")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ScalingModel<T> {
    family: ModelFamily,
    params: Vec<T>,
}

#[derive(Serialize, Deserialize)]
struct RawScalingModel<T> {
    family: ModelFamily,
    params: Vec<T>,
}

impl<T: Scalar> TryFrom<RawScalingModel<T>> for ScalingModel<T> {
    type Error = ModelError;

    fn try_from(raw: RawScalingModel<T>) -> Result<Self, Self::Error> {
        ScalingModel::new(raw.family, raw.params)
    }
}

impl<T: Scalar> From<ScalingModel<T>> for RawScalingModel<T> {
    fn from(m: ScalingModel<T>) -> Self {
        RawScalingModel {
            family: m.family,
            params: m.params,
        }
    }
}

impl<T: Scalar> ScalingModel<T> {
    pub fn new(family: ModelFamily, params: Vec<T>) -> Result<Self, ModelError> {
        if params.len() != family.param_count() {
            return Err(ModelError::ParamCountMismatch {
                family,
                expected: family.param_count(),
                found: params.len(),
            });
        }
        if let Some(index) = params.iter().position(|p| !p.is_finite()) {
            return Err(ModelError::NonFiniteParam { index });
        }
        Ok(Self { family, params })
    }

    pub fn from_f64(family: ModelFamily, params: &[f64]) -> Result<Self, ModelError> {
        Self::new(family, params.iter().map(|&p| T::lit(p)).collect())
    }

    pub fn family(&self) -> ModelFamily {
        self.family
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    /// Predicted accuracy (percent) at `point`.
    pub fn evaluate(&self, point: &InputPoint<T>) -> Result<T, ModelError> {
        let y = evaluate_logs(self.family, &self.params, point.logs());
        if y.is_finite() {
            Ok(y)
        } else {
            Err(ModelError::NonFiniteResult { index: None })
        }
    }

    /// Predictions aligned with `set` order.
    pub fn evaluate_batch(&self, set: &ObservationSet) -> Result<Vec<T>, ModelError> {
        set.iter()
            .enumerate()
            .map(|(i, o)| {
                let point = InputPoint::from_f64(o.hours, o.params as f64, o.pixels as f64)?;
                self.evaluate(&point)
                    .map_err(|_| ModelError::NonFiniteResult { index: Some(i) })
            })
            .collect()
    }

    /// Converts parameters that were expressed against `log_base` (e.g. 10)
    /// into the equivalent natural-log parameters, so that the returned
    /// model predicts exactly what the base-`log_base` model would.
    pub fn from_log_base(family: ModelFamily, params: &[T], log_base: T) -> Result<Self, ModelError> {
        let model = Self::new(family, params.to_vec())?;
        let k = T::one() / log_base.ln();
        let mut p = model.params;
        match family {
            ModelFamily::LogPoly6 => {
                p[0] = p[0] * k;
                p[2] = p[2] * k;
                p[4] = p[4] * k;
            }
            ModelFamily::PowerProduct10 => {
                // α (ln x / ln b)^β = α (ln b)^(-β) (ln x)^β
                for block in 0..3 {
                    let (a, b) = (3 * block, 3 * block + 1);
                    p[a] = p[a] * k.powf(p[b]);
                }
            }
            ModelFamily::InteractionPoly8 => {
                let k2 = k * k;
                p[0] = p[0] * k;
                p[1] = p[1] * k;
                p[2] = p[2] * k;
                p[3] = p[3] * k2;
                p[4] = p[4] * k2;
                p[5] = p[5] * k2;
                p[6] = p[6] * k2 * k;
            }
        }
        Self::new(family, p)
    }
}

/// Anything that turns an input point into a predicted accuracy: a bare
/// model, or a fit wrapping one.
pub trait Predictor<T> {
    fn predict(&self, point: &InputPoint<T>) -> Result<T, ModelError>;
}

impl<T: Scalar> Predictor<T> for ScalingModel<T> {
    fn predict(&self, point: &InputPoint<T>) -> Result<T, ModelError> {
        self.evaluate(point)
    }
}

/// Raw evaluation from precomputed logs `[ln n, ln d, ln r]`. May return a
/// non-finite value; callers decide whether that is an error or a penalty.
pub(crate) fn evaluate_logs<T: Scalar>(family: ModelFamily, p: &[T], logs: [T; 3]) -> T {
    let [ln_n, ln_d, ln_r] = logs;
    match family {
        ModelFamily::LogPoly6 => (p[0] * ln_n + p[1]) * (p[2] * ln_d + p[3]) * (p[4] * ln_r + p[5]),
        ModelFamily::PowerProduct10 => {
            let factor = |a: T, b: T, g: T, x: T| a * x.powf(b) + g;
            factor(p[0], p[1], p[2], ln_n) * factor(p[3], p[4], p[5], ln_d) * factor(p[6], p[7], p[8], ln_r) + p[9]
        }
        ModelFamily::InteractionPoly8 => {
            p[0] * ln_n
                + p[1] * ln_d
                + p[2] * ln_r
                + p[3] * ln_n * ln_d
                + p[4] * ln_n * ln_r
                + p[5] * ln_d * ln_r
                + p[6] * ln_n * ln_d * ln_r
                + p[7]
        }
    }
}
