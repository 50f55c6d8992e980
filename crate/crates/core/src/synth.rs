//! Deterministic synthetic measurements: resonator response, Fano leakage,
//! line gain and delay, and additive complex Gaussian noise.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{apply_fano, background_phase_in, normalize_fano, response, FanoBackground, ResonatorParams};
use crate::model::{b_tilde, CableMedium, MeasurementMode, Quality};
use crate::scalar::Scalar;
use crate::trace::{Trace, MIN_TRACE_SAMPLES};
use crate::trajectory::CenterTrajectory;

/// Default half-span in linewidths.
pub const DEFAULT_HALF_SPAN_LINEWIDTHS: f64 = 10.0;
pub const DEFAULT_POINTS: usize = 801;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec<T> {
    pub params: ResonatorParams<T>,
    pub bg: FanoBackground<T>,
    /// Complex line gain applied to the whole signal.
    pub gain: Complex<T>,
    /// Propagation delay (s).
    pub delay: T,
    pub f_start: T,
    pub f_stop: T,
    pub n_points: usize,
    /// Per-quadrature standard deviation, relative to the baseline amplitude `|gain|`.
    pub noise_sigma: T,
    pub seed: u64,
}

impl<T: Scalar> SynthSpec<T> {
    /// Noiseless spec spanning +/-10 linewidths around the resonance with 801 points.
    pub fn around_resonance(params: ResonatorParams<T>, bg: FanoBackground<T>) -> Self {
        let half = T::lit(DEFAULT_HALF_SPAN_LINEWIDTHS) * params.kappa();
        Self {
            params,
            bg,
            gain: Complex::new(T::one(), T::zero()),
            delay: T::zero(),
            f_start: params.f_r - half,
            f_stop: params.f_r + half,
            n_points: DEFAULT_POINTS,
            noise_sigma: T::zero(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_start.is_finite() && self.f_stop.is_finite() && self.f_start < self.f_stop) {
            return Err(Error::InvalidInput(format!(
                "frequency span must satisfy f_start < f_stop, got [{}, {}]",
                self.f_start, self.f_stop
            )));
        }
        if self.f_start <= T::zero() {
            return Err(Error::InvalidInput("frequencies must be positive".into()));
        }
        if self.n_points < MIN_TRACE_SAMPLES {
            return Err(Error::InvalidInput(format!(
                "need at least {MIN_TRACE_SAMPLES} points, got {}",
                self.n_points
            )));
        }
        if !(self.noise_sigma >= T::zero() && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "noise sigma must be >= 0, got {}",
                self.noise_sigma
            )));
        }
        if !(self.delay.is_finite() && self.gain.re.is_finite() && self.gain.im.is_finite()) {
            return Err(Error::InvalidInput("gain and delay must be finite".into()));
        }
        if self.gain.norm() == T::zero() {
            return Err(Error::InvalidInput("gain must be non-zero".into()));
        }
        Ok(())
    }

    pub fn frequencies(&self) -> Vec<T> {
        linspace(self.f_start, self.f_stop, self.n_points)
    }
}

pub(crate) fn linspace<T: Scalar>(start: T, stop: T, n: usize) -> Vec<T> {
    let last = T::from_usize(n.saturating_sub(1).max(1)).unwrap();
    (0..n)
        .map(|i| start + (stop - start) * T::from_usize(i).unwrap() / last)
        .collect()
}

fn gaussian_pair<T: Scalar>(rng: &mut ChaCha8Rng, sigma: T) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re), T::lit(im)).scale(sigma)
}

/// `gain e^{-2 pi i f delay} [(1-b) S(f) + b e^{i phi(f)}] + noise`.
pub fn synth_trace<T: Scalar>(spec: &SynthSpec<T>) -> Result<Trace<T>> {
    spec.validate()?;
    let freqs = spec.frequencies();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let sigma = spec.noise_sigma * spec.gain.norm();
    let points = freqs
        .iter()
        .map(|&f| {
            let s = response(&spec.params, f)?;
            let measured = apply_fano(s, &spec.bg.at_detuning(f - spec.f_start));
            let line = spec.gain * Complex::from_polar(T::one(), -T::TAU() * f * spec.delay);
            let mut p = line * measured;
            if sigma > T::zero() {
                p = p + gaussian_pair(&mut rng, sigma);
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    Trace::new(freqs, points)
}

/// A sampled curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
}

/// Normalized amplitude lineshape of a lossless resonator for one leakage phase.
#[derive(Debug, Clone, PartialEq)]
pub struct Lineshape<T> {
    pub phi: T,
    /// Detuning `(f - f_r)/kappa` against normalized amplitude `|S'|`.
    pub curve: Curve<T>,
}

/// Lossless lineshapes `|S'(f)|` over +/-5 linewidths, one per leakage phase.
pub fn synth_lineshape_gallery<T: Scalar>(b: T, phis: &[T], n_points: usize) -> Result<Vec<Lineshape<T>>> {
    if n_points < 3 {
        return Err(Error::InvalidInput("gallery needs at least 3 points".into()));
    }
    // Any lossless resonator gives the same curves in units of the linewidth.
    let params = ResonatorParams::new(T::lit(1e9), Quality::Infinite, T::lit(1e4), MeasurementMode::Reflection)?;
    let kappa = params.kappa();
    let detuning = linspace(T::lit(-5.0), T::lit(5.0), n_points);
    phis.iter()
        .map(|&phi| {
            let bg = FanoBackground::new(b, phi)?;
            let y = detuning
                .iter()
                .map(|&x| Ok(normalize_fano(response(&params, params.f_r + x * kappa)?, &bg)?.norm()))
                .collect::<Result<Vec<_>>>()?;
            Ok(Lineshape {
                phi,
                curve: Curve { x: detuning.clone(), y },
            })
        })
        .collect()
}

/// Five leakage phases spread over `[0, pi]` used for the default gallery.
pub fn gallery_phases<T: Scalar>() -> Vec<T> {
    (0..5).map(|k| T::PI() * T::lit(k as f64 / 4.0)).collect()
}

/// Off-resonant baseline `|(1-b) + b e^{i phi(f)}|` for a background path of the given length.
pub fn synth_background_pattern<T: Scalar>(
    b: T,
    path_length_m: T,
    medium: CableMedium<T>,
    f_start: T,
    f_stop: T,
    n_points: usize,
) -> Result<Curve<T>> {
    let bg = FanoBackground::new(b, T::zero())?
        .with_path_length(path_length_m)?
        .with_medium(medium);
    if !(f_start < f_stop) || n_points < 2 {
        return Err(Error::InvalidInput(
            "background pattern needs f_start < f_stop and >= 2 points".into(),
        ));
    }
    let x = linspace(f_start, f_stop, n_points);
    let one = Complex::new(T::one(), T::zero());
    let y = x
        .iter()
        .map(|&f| apply_fano(one, &bg.at_detuning(f - f_start)).norm())
        .collect();
    Ok(Curve { x, y })
}

/// Leakage phases along a centerpoint trajectory.
#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryPhases<T> {
    /// Phases given directly; they double as labels.
    Explicit(Vec<T>),
    /// Resonance frequencies swept against a background path; frequencies are the labels.
    Swept {
        path_length_m: T,
        phi0: T,
        medium: CableMedium<T>,
        freqs: Vec<T>,
    },
}

/// Centerpoints `M'` obtained by mapping `M = (x, 0)` through the normalized Fano transform.
pub fn synth_trajectory<T: Scalar>(
    x: T,
    b: T,
    phases: &TrajectoryPhases<T>,
    q_l: T,
    noise_sigma: T,
    seed: u64,
) -> Result<CenterTrajectory<T>> {
    if !(b >= T::zero() && b < T::lit(0.5)) {
        return Err(Error::InvalidInput(format!("trajectory needs 0 <= b < 0.5, got {b}")));
    }
    if !(noise_sigma >= T::zero()) {
        return Err(Error::InvalidInput(format!(
            "noise sigma must be >= 0, got {noise_sigma}"
        )));
    }
    let (labels, phis): (Vec<T>, Vec<T>) = match phases {
        TrajectoryPhases::Explicit(phis) => (phis.clone(), phis.clone()),
        TrajectoryPhases::Swept {
            path_length_m,
            phi0,
            medium,
            freqs,
        } => {
            let reference = freqs.first().copied().unwrap_or_else(T::zero);
            let phis = freqs
                .iter()
                .map(|&f| *phi0 + background_phase_in(*medium, *path_length_m, f - reference))
                .collect();
            (freqs.clone(), phis)
        }
    };
    let bt = b_tilde(b);
    let m = Complex::new(x, T::zero());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = phis
        .iter()
        .map(|&phi| {
            let shift = Complex::from_polar(bt, phi);
            let mut c = (m + shift) / (shift + T::one());
            if noise_sigma > T::zero() {
                c = c + gaussian_pair(&mut rng, noise_sigma);
            }
            c
        })
        .collect();
    let q_l = vec![q_l; labels.len()];
    CenterTrajectory::new(labels, centers, q_l)
}
