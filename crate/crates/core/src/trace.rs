use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Fewest samples a trace may carry.
pub const MIN_TRACE_SAMPLES: usize = 16;

/// Frequency-ordered complex scattering samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T> {
    freqs: Vec<T>,
    points: Vec<Complex<T>>,
    /// Free-form labels such as drive power, field or timestamp.
    pub meta: BTreeMap<String, String>,
}

impl<T: Scalar> Trace<T> {
    pub fn new(freqs: Vec<T>, points: Vec<Complex<T>>) -> Result<Self> {
        if freqs.len() != points.len() {
            return Err(Error::InvalidInput(format!(
                "{} frequencies but {} samples",
                freqs.len(),
                points.len()
            )));
        }
        if freqs.len() < MIN_TRACE_SAMPLES {
            return Err(Error::InvalidInput(format!(
                "trace needs at least {MIN_TRACE_SAMPLES} samples, got {}",
                freqs.len()
            )));
        }
        if let Some(i) = freqs.iter().position(|f| !f.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite frequency at index {i}")));
        }
        if let Some(i) = points.iter().position(|p| !(p.re.is_finite() && p.im.is_finite())) {
            return Err(Error::InvalidInput(format!("non-finite sample at index {i}")));
        }
        if let Some(i) = freqs.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!(
                "frequencies must be strictly increasing (index {})",
                i + 1
            )));
        }
        Ok(Self {
            freqs,
            points,
            meta: BTreeMap::new(),
        })
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.meta.insert(key.into(), value.into());
        self
    }

    pub fn freqs(&self) -> &[T] {
        &self.freqs
    }

    pub fn points(&self) -> &[Complex<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn span(&self) -> T {
        self.freqs[self.freqs.len() - 1] - self.freqs[0]
    }

    pub fn center_frequency(&self) -> T {
        (self.freqs[0] + self.freqs[self.freqs.len() - 1]) / T::lit(2.0)
    }

    /// Same frequencies and metadata with every sample transformed by `f(freq, point)`.
    pub fn map_points(&self, mut f: impl FnMut(T, Complex<T>) -> Complex<T>) -> Self {
        Self {
            freqs: self.freqs.clone(),
            points: self.freqs.iter().zip(&self.points).map(|(&fr, &p)| f(fr, p)).collect(),
            meta: self.meta.clone(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, Complex<T>)> + '_ {
        self.freqs.iter().copied().zip(self.points.iter().copied())
    }
}
