//! JSON report records. Field names are stable; infinite quality factors are
//! written as the string `"inf"`.

use std::fmt;

use fanofit::{CircleFitResult64, Complex64, MeasurementMode, QiRange64, Quality, Triple};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::ErrorRecord;

/// A quality factor that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Q(pub f64);

impl Q {
    pub fn is_inf(self) -> bool {
        self.0.is_infinite()
    }
}

impl From<Quality<f64>> for Q {
    fn from(q: Quality<f64>) -> Self {
        Q(q.value())
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Q;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Q, E> {
                Ok(Q(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
                Ok(Q(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
                Ok(Q(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
                match v {
                    "inf" => Ok(Q(f64::INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range<V> {
    pub min: V,
    pub mid: V,
    pub max: V,
}

impl<V: Copy, U: Into<V> + Copy> From<Triple<U>> for Range<V> {
    fn from(t: Triple<U>) -> Self {
        Range {
            min: t.min.into(),
            mid: t.mid.into(),
            max: t.max.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub code: String,
    pub message: String,
}

impl Warning {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Self {
            code: code.into(),
            message: message.into(),
        }
    }
}

pub fn mode_name(mode: MeasurementMode) -> String {
    mode.name().to_owned()
}

/// Result of fitting one trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub input_path: String,
    pub label: Option<String>,
    pub mode: String,
    pub f_r_hz: f64,
    pub kappa_hz: f64,
    pub q_l: f64,
    pub q_i: Range<Q>,
    pub q_c: Range<Q>,
    /// Circle radii behind the quality factor range.
    pub r: Range<f64>,
    pub b_assumed: f64,
    pub b_assumed_db: f64,
    pub b_min: f64,
    pub feasible: bool,
    pub delay_s: f64,
    pub off_resonant: ComplexValue,
    pub m_prime: ComplexValue,
    pub rms_residual: f64,
    pub warnings: Vec<Warning>,
}

impl FitReport {
    pub fn new(input_path: &str, label: Option<String>, fit: &CircleFitResult64, range: &QiRange64) -> Self {
        let mut warnings: Vec<Warning> = fit
            .warnings
            .iter()
            .map(|w| Warning::new(w.code(), w.to_string()))
            .collect();
        if !range.feasible {
            warnings.push(Warning::new(
                "INFEASIBLE_BOUND",
                format!(
                    "bound b = {} is below the minimum b_min = {} implied by the circle tilt; range evaluated at b_min",
                    range.b_assumed, range.b_min
                ),
            ));
        }
        if range.is_unbounded() {
            warnings.push(Warning::new(
                "UNBOUNDED_QI",
                "largest radius reaches the lossless limit; Q_i,max is unbounded",
            ));
        }
        Self {
            input_path: input_path.to_owned(),
            label,
            mode: mode_name(range.mode),
            f_r_hz: fit.f_r,
            kappa_hz: fit.kappa,
            q_l: fit.q_l,
            q_i: range.q_i.into(),
            q_c: range.q_c.into(),
            r: range.r.into(),
            b_assumed: range.b_assumed,
            b_assumed_db: fanofit::leakage_linear_to_db(range.b_assumed),
            b_min: range.b_min,
            feasible: range.feasible,
            delay_s: fit.delay,
            off_resonant: fit.off_resonant.into(),
            m_prime: fit.m_prime.into(),
            rms_residual: fit.rms_residual,
            warnings,
        }
    }
}

/// One entry of a batch, in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum SweepRecord {
    Ok(Box<FitReport>),
    Error(ErrorRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub label: String,
    pub input_path: String,
    pub q_i: Range<Q>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
    pub summary: Vec<SummaryRow>,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub label: f64,
    pub input_path: Option<String>,
    pub m_prime: ComplexValue,
    pub q_l: f64,
    /// Signed radial distance from the fitted trajectory circle.
    pub residual: f64,
    pub inlier: bool,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlaggedRun {
    pub first_label: f64,
    pub last_label: f64,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub mode: String,
    pub robust: bool,
    pub b: f64,
    pub b_db: f64,
    /// Leakage-free centerpoint on the real axis.
    pub m_true: f64,
    pub q_i_true: Q,
    pub q_c_true: Q,
    pub q_l_median: f64,
    pub x_c: f64,
    pub r_c: f64,
    pub arc_coverage_rad: f64,
    pub rms: f64,
    pub residual_threshold: f64,
    pub kendall_tau: f64,
    pub points: Vec<TrajectoryPoint>,
    pub runs: Vec<FlaggedRun>,
    pub skipped: Vec<ErrorRecord>,
    pub warnings: Vec<Warning>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
