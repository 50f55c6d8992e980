//! Closed-form resonator physics: reflection and notch responses, the Fano
//! leakage phasor and its normalized (Möbius) form, and the algebra linking
//! circle radii to quality factors.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// A quality factor that may be unbounded.
///
/// Lossless resonators (and radii beyond the physical limit) carry
/// `Infinite` rather than a large sentinel number.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Quality<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> Quality<T> {
    /// Wraps a value, mapping `+inf` onto [`Quality::Infinite`].
    pub fn new(value: T) -> Self {
        if value.is_infinite() && value > T::zero() {
            Quality::Infinite
        } else {
            Quality::Finite(value)
        }
    }

    pub fn value(self) -> T {
        match self {
            Quality::Finite(v) => v,
            Quality::Infinite => T::infinity(),
        }
    }

    pub fn finite(self) -> Option<T> {
        match self {
            Quality::Finite(v) => Some(v),
            Quality::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Quality::Infinite)
    }

    /// `1/Q`, zero for an infinite quality factor.
    pub fn recip(self) -> T {
        match self {
            Quality::Finite(v) => v.recip(),
            Quality::Infinite => T::zero(),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Quality<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quality::Finite(v) => v.fmt(f),
            Quality::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MeasurementMode {
    /// Single-port reflection, S11.
    #[default]
    Reflection,
    /// Hanger-type two-port transmission, S21.
    NotchTransmission,
}

impl MeasurementMode {
    pub fn name(self) -> &'static str {
        match self {
            MeasurementMode::Reflection => "reflection",
            MeasurementMode::NotchTransmission => "notch",
        }
    }

    /// Ratio between the circle diameter and `Q_l/Q_c`: 2 in reflection, 1 in notch transmission.
    fn diameter_factor<T: Scalar>(self) -> T {
        match self {
            MeasurementMode::Reflection => T::lit(2.0),
            MeasurementMode::NotchTransmission => T::one(),
        }
    }

    /// Radius at which the internal losses vanish.
    pub fn lossless_radius<T: Scalar>(self) -> T {
        self.diameter_factor::<T>() / T::lit(2.0)
    }
}

impl fmt::Display for MeasurementMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Resonance frequency (Hz) and quality factors of a single mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonatorParams<T> {
    pub f_r: T,
    pub q_i: Quality<T>,
    pub q_c: T,
    pub mode: MeasurementMode,
}

impl<T: Scalar> ResonatorParams<T> {
    pub fn new(f_r: T, q_i: Quality<T>, q_c: T, mode: MeasurementMode) -> Result<Self> {
        if !(f_r.is_finite() && f_r > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "resonance frequency must be positive, got {f_r}"
            )));
        }
        if !(q_c.is_finite() && q_c > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "Q_c must be positive and finite, got {q_c}"
            )));
        }
        if let Quality::Finite(q) = q_i {
            if !(q.is_finite() && q > T::zero()) {
                return Err(Error::InvalidInput(format!("Q_i must be positive, got {q}")));
            }
        }
        Ok(Self { f_r, q_i, q_c, mode })
    }

    /// Builds parameters from the loaded quality factor and the coupling coefficient `Q_i/Q_c`.
    pub fn from_loaded(f_r: T, q_l: T, coupling: Quality<T>, mode: MeasurementMode) -> Result<Self> {
        if !(q_l.is_finite() && q_l > T::zero()) {
            return Err(Error::InvalidInput(format!("Q_l must be positive, got {q_l}")));
        }
        let (q_i, q_c) = match coupling {
            Quality::Infinite => (Quality::Infinite, q_l),
            Quality::Finite(c) if c > T::zero() && c.is_finite() => {
                // 1/Q_l = 1/Q_c + 1/(c Q_c)
                let q_c = q_l * (T::one() + c.recip());
                (Quality::Finite(c * q_c), q_c)
            }
            Quality::Finite(c) => return Err(Error::InvalidInput(format!("coupling must be positive, got {c}"))),
        };
        Self::new(f_r, q_i, q_c, mode)
    }

    pub fn q_l(&self) -> T {
        loaded_q(self.q_i, self.q_c)
    }

    /// Linewidth in Hz.
    pub fn kappa(&self) -> T {
        kappa(self.f_r, self.q_l())
    }

    /// Coupling coefficient `Q_i/Q_c`.
    pub fn coupling(&self) -> Quality<T> {
        match self.q_i {
            Quality::Finite(q) => Quality::Finite(q / self.q_c),
            Quality::Infinite => Quality::Infinite,
        }
    }

    /// Radius of the response circle in the complex plane.
    pub fn radius(&self) -> T {
        self.q_l() / self.q_c * self.mode.lossless_radius::<T>()
    }
}

/// Propagation medium of the background path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CableMedium<T> {
    /// Phase velocity relative to `c`.
    pub velocity_factor: T,
}

impl<T: Scalar> Default for CableMedium<T> {
    fn default() -> Self {
        Self {
            velocity_factor: T::lit(0.7),
        }
    }
}

impl<T: Scalar> CableMedium<T> {
    pub fn from_permittivity(eps_r: T) -> Result<Self> {
        if !(eps_r.is_finite() && eps_r >= T::one()) {
            return Err(Error::InvalidInput(format!(
                "relative permittivity must be >= 1, got {eps_r}"
            )));
        }
        Ok(Self {
            velocity_factor: eps_r.sqrt().recip(),
        })
    }

    pub fn effective_speed(&self) -> T {
        self.velocity_factor * T::lit(SPEED_OF_LIGHT)
    }
}

/// Fano leakage phasor `b e^{i phi}` relative to the resonant signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanoBackground<T> {
    pub b: T,
    pub phi: T,
    /// Optical path length (m) between sample and leakage point; makes `phi` frequency dependent.
    pub path_length_m: Option<T>,
    pub medium: CableMedium<T>,
}

impl<T: Scalar> FanoBackground<T> {
    pub fn new(b: T, phi: T) -> Result<Self> {
        if !(b >= T::zero() && b < T::one()) {
            return Err(Error::InvalidInput(format!(
                "leakage amplitude must lie in [0, 1), got {b}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidInput(format!("leakage phase must be finite, got {phi}")));
        }
        Ok(Self {
            b,
            phi,
            path_length_m: None,
            medium: CableMedium::default(),
        })
    }

    pub fn none() -> Self {
        Self {
            b: T::zero(),
            phi: T::zero(),
            path_length_m: None,
            medium: CableMedium::default(),
        }
    }

    pub fn with_path_length(mut self, length_m: T) -> Result<Self> {
        if !(length_m.is_finite() && length_m >= T::zero()) {
            return Err(Error::InvalidInput(format!("path length must be >= 0, got {length_m}")));
        }
        self.path_length_m = Some(length_m);
        Ok(self)
    }

    pub fn with_medium(mut self, medium: CableMedium<T>) -> Self {
        self.medium = medium;
        self
    }

    /// `b/(1-b)`, the amplitude relative to the reduced signal.
    pub fn b_tilde(&self) -> T {
        b_tilde(self.b)
    }

    /// Leakage phase at a detuning `delta_f` from the reference frequency.
    pub fn phase_at(&self, delta_f: T) -> T {
        match self.path_length_m {
            Some(l) => self.phi + background_phase_in(self.medium, l, delta_f),
            None => self.phi,
        }
    }

    /// Same amplitude, phase frozen at `delta_f`.
    pub fn at_detuning(&self, delta_f: T) -> Self {
        Self {
            phi: self.phase_at(delta_f),
            path_length_m: None,
            ..*self
        }
    }

    pub fn phasor(&self) -> Complex<T> {
        Complex::from_polar(self.b, self.phi)
    }
}

pub fn b_tilde<T: Scalar>(b: T) -> T {
    b / (T::one() - b)
}

/// Inverse of [`b_tilde`].
pub fn b_from_tilde<T: Scalar>(b_tilde: T) -> T {
    b_tilde / (T::one() + b_tilde)
}

fn check_frequency<T: Scalar>(f: T) -> Result<()> {
    if f.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("frequency must be finite, got {f}")))
    }
}

/// `1 - d (Q_l/Q_c) / (1 + 2i Q_l (f - f_r)/f_r)` with `d` the mode's diameter factor.
fn circle_response<T: Scalar>(params: &ResonatorParams<T>, f: T) -> Complex<T> {
    let q_l = params.q_l();
    let depth = params.mode.diameter_factor::<T>() * q_l / params.q_c;
    let detuning = T::lit(2.0) * q_l * (f - params.f_r) / params.f_r;
    Complex::new(T::one(), T::zero()) - Complex::new(depth, T::zero()) / Complex::new(T::one(), detuning)
}

/// Reflection coefficient S11 of a single-port resonator.
pub fn reflection_response<T: Scalar>(params: &ResonatorParams<T>, f: T) -> Result<Complex<T>> {
    check_frequency(f)?;
    if params.mode != MeasurementMode::Reflection {
        return Err(Error::ModeMismatch {
            expected: MeasurementMode::Reflection.name(),
            found: params.mode.name(),
        });
    }
    Ok(circle_response(params, f))
}

/// Transmission coefficient S21 of a hanger (notch) resonator.
pub fn transmission_response<T: Scalar>(params: &ResonatorParams<T>, f: T) -> Result<Complex<T>> {
    check_frequency(f)?;
    if params.mode != MeasurementMode::NotchTransmission {
        return Err(Error::ModeMismatch {
            expected: MeasurementMode::NotchTransmission.name(),
            found: params.mode.name(),
        });
    }
    Ok(circle_response(params, f))
}

/// Response for whichever mode `params` carries.
pub fn response<T: Scalar>(params: &ResonatorParams<T>, f: T) -> Result<Complex<T>> {
    check_frequency(f)?;
    Ok(circle_response(params, f))
}

/// Measured signal `(1-b) S + b e^{i phi}`.
pub fn apply_fano<T: Scalar>(signal: Complex<T>, bg: &FanoBackground<T>) -> Complex<T> {
    signal.scale(T::one() - bg.b) + bg.phasor()
}

/// Signal normalized to its off-resonant value: `(S + b~ e^{i phi}) / (1 + b~ e^{i phi})`.
pub fn normalize_fano<T: Scalar>(signal: Complex<T>, bg: &FanoBackground<T>) -> Result<Complex<T>> {
    let shift = Complex::from_polar(bg.b_tilde(), bg.phi);
    let den = Complex::new(T::one(), T::zero()) + shift;
    if den.norm() <= T::lit(16.0) * T::epsilon() {
        return Err(Error::DegenerateNormalization);
    }
    Ok((signal + shift) / den)
}

/// Round-trip phase of the background path for a detuning `delta_f`, using a 0.7 c cable.
pub fn background_phase<T: Scalar>(path_length_m: T, delta_f: T) -> T {
    background_phase_in(CableMedium::default(), path_length_m, delta_f)
}

pub fn background_phase_in<T: Scalar>(medium: CableMedium<T>, path_length_m: T, delta_f: T) -> T {
    T::TAU() * T::lit(2.0) * path_length_m * delta_f / medium.effective_speed()
}

/// Frequency period of the background phase for a given path length.
pub fn background_period<T: Scalar>(medium: CableMedium<T>, path_length_m: T) -> T {
    medium.effective_speed() / (T::lit(2.0) * path_length_m)
}

/// Circle radius for a coupling coefficient `Q_i/Q_c`.
pub fn coupling_to_radius<T: Scalar>(coupling: Quality<T>, mode: MeasurementMode) -> Result<T> {
    let full = match coupling {
        Quality::Infinite => T::one(),
        Quality::Finite(c) if c >= T::zero() && !c.is_nan() => {
            if c.is_infinite() {
                T::one()
            } else {
                c / (c + T::one())
            }
        }
        Quality::Finite(c) => return Err(Error::InvalidInput(format!("coupling must be non-negative, got {c}"))),
    };
    Ok(full * mode.lossless_radius::<T>())
}

/// Coupling coefficient for a circle radius. Radii at or beyond the lossless limit map to infinity.
pub fn radius_to_coupling<T: Scalar>(radius: T, mode: MeasurementMode) -> Result<Quality<T>> {
    if !(radius >= T::zero()) {
        return Err(Error::InvalidInput(format!(
            "radius must be non-negative, got {radius}"
        )));
    }
    let r = radius / mode.lossless_radius::<T>();
    if r >= T::one() {
        Ok(Quality::Infinite)
    } else {
        Ok(Quality::Finite(r / (T::one() - r)))
    }
}

/// Internal and coupling quality factors for a radius at fixed `Q_l`.
///
/// Unphysical radii (at or beyond the lossless limit) give `Q_i = inf`, `Q_c = Q_l`.
pub fn qualities_from_radius<T: Scalar>(q_l: T, radius: T, mode: MeasurementMode) -> (Quality<T>, Quality<T>) {
    let r = radius / mode.lossless_radius::<T>();
    if r >= T::one() {
        return (Quality::Infinite, Quality::Finite(q_l));
    }
    let q_c = if r > T::zero() {
        Quality::Finite(q_l / r)
    } else {
        Quality::Infinite
    };
    (Quality::Finite(q_l / (T::one() - r)), q_c)
}

/// `Q_l = (1/Q_c + 1/Q_i)^-1`.
pub fn loaded_q<T: Scalar>(q_i: Quality<T>, q_c: T) -> T {
    (q_c.recip() + q_i.recip()).recip()
}

/// Linewidth in Hz.
pub fn kappa<T: Scalar>(f_r: T, q_l: T) -> T {
    f_r / q_l
}

/// Linewidth in rad/s.
pub fn kappa_angular<T: Scalar>(f_r: T, q_l: T) -> T {
    T::TAU() * kappa(f_r, q_l)
}

/// Amplitude `b` for an isolation quoted as a power ratio in dB (`b^2 = db`).
pub fn leakage_db_to_linear<T: Scalar>(isolation_db: T) -> Result<T> {
    if !(isolation_db <= T::zero()) {
        return Err(Error::InvalidInput(format!(
            "leakage isolation must be <= 0 dB, got {isolation_db}"
        )));
    }
    Ok(T::lit(10.0).powf(isolation_db / T::lit(20.0)))
}

pub fn leakage_linear_to_db<T: Scalar>(b: T) -> T {
    T::lit(20.0) * b.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn refl(q_i: Quality<f64>, q_c: f64) -> ResonatorParams<f64> {
        ResonatorParams::new(5e9, q_i, q_c, MeasurementMode::Reflection).unwrap()
    }

    #[test]
    fn critical_reflection_vanishes_at_resonance() {
        let p = refl(Quality::Finite(1e4), 1e4);
        let s = reflection_response(&p, 5e9).unwrap();
        assert!(s.norm() < 1e-15);
    }

    #[test]
    fn lossless_reflection_at_half_linewidth() {
        let p = refl(Quality::Infinite, 1e4);
        let s = reflection_response(&p, p.f_r + p.kappa() / 2.0).unwrap();
        assert_relative_eq!(s.re, 0.0, epsilon = 1e-12);
        assert_relative_eq!(s.im, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn overcoupled_reflection_at_resonance() {
        let p = refl(Quality::Finite(3e4), 1e4);
        let s = reflection_response(&p, 5e9).unwrap();
        assert_relative_eq!(s.re, -0.5, epsilon = 1e-12);
        assert!(s.im.abs() < 1e-15);
    }

    #[test]
    fn reflection_rejects_non_finite_frequency() {
        let p = refl(Quality::Infinite, 1e4);
        assert!(matches!(reflection_response(&p, f64::NAN), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn transmission_values() {
        let p = ResonatorParams::new(5e9, Quality::Finite(1e4), 1e4, MeasurementMode::NotchTransmission).unwrap();
        let s = transmission_response(&p, 5e9).unwrap();
        assert_relative_eq!(s.re, 0.5, epsilon = 1e-12);
        let far = transmission_response(&p, 5e9 + 1e6 * p.kappa()).unwrap();
        assert!((far - Complex::new(1.0, 0.0)).norm() < 1e-6);

        let lossless = ResonatorParams::new(5e9, Quality::Infinite, 1e4, MeasurementMode::NotchTransmission).unwrap();
        assert!(transmission_response(&lossless, 5e9).unwrap().norm() < 1e-15);
    }

    #[test]
    fn transmission_requires_notch_mode() {
        let p = refl(Quality::Infinite, 1e4);
        assert!(matches!(
            transmission_response(&p, 5e9),
            Err(Error::ModeMismatch { .. })
        ));
    }

    #[test]
    fn fano_phasor_sum() {
        let bg = FanoBackground::new(0.18, 0.0).unwrap();
        let s = apply_fano(Complex::new(-1.0, 0.0), &bg);
        assert_relative_eq!(s.re, -0.64, epsilon = 1e-12);
        let bg = FanoBackground::new(0.18, PI).unwrap();
        let s = apply_fano(Complex::new(1.0, 0.0), &bg);
        assert_relative_eq!(s.re, 0.64, epsilon = 1e-12);
        assert!(s.im.abs() < 1e-12);
        let z = Complex::new(0.3, -0.7);
        assert_eq!(apply_fano(z, &FanoBackground::none()), z);
    }

    #[test]
    fn normalized_fano_values() {
        let bg = FanoBackground::new(0.18, 0.0).unwrap();
        assert_relative_eq!(bg.b_tilde(), 0.219_512_195_121_951_2, epsilon = 1e-15);
        let s = normalize_fano(Complex::new(-1.0, 0.0), &bg).unwrap();
        assert_relative_eq!(s.re, -0.64, epsilon = 1e-12);

        // (-1 + i b~) / (1 + i b~)
        let bg = FanoBackground::new(0.18, PI / 2.0).unwrap();
        let s = normalize_fano(Complex::new(-1.0, 0.0), &bg).unwrap();
        assert_relative_eq!(s.re, -0.908_059_023_836_549_4, epsilon = 1e-12);
        assert_relative_eq!(s.im, 0.418_842_224_744_608_4, epsilon = 1e-12);

        for phi in [0.0, 1.0, 2.5, 4.0] {
            let bg = FanoBackground::new(0.3, phi).unwrap();
            let one = normalize_fano(Complex::new(1.0, 0.0), &bg).unwrap();
            assert!((one - Complex::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn normalized_fano_pole() {
        let bg = FanoBackground::new(0.5, PI).unwrap();
        assert_eq!(
            normalize_fano(Complex::new(0.2, 0.0), &bg),
            Err(Error::DegenerateNormalization)
        );
    }

    #[test]
    fn background_validation() {
        assert!(FanoBackground::new(1.0, 0.0).is_err());
        assert!(FanoBackground::new(-0.1, 0.0).is_err());
        assert!(FanoBackground::new(0.1, f64::NAN).is_err());
        assert!(FanoBackground::new(0.1, 0.0).unwrap().with_path_length(-1.0).is_err());
    }

    #[test]
    fn background_phase_periods() {
        let phi = background_phase(0.10, 1e9);
        assert!((phi / (2.0 * PI) - 1.0).abs() < 0.05, "{phi}");
        let period = background_period(CableMedium::default(), 0.40f64);
        assert!((period / 250e6 - 1.0).abs() < 0.06, "{period}");
        assert_eq!(background_phase(0.0, 3e9), 0.0);

        let medium = CableMedium::<f64>::from_permittivity(2.1).unwrap();
        assert_relative_eq!(medium.velocity_factor, 0.690_065_559_342_354, epsilon = 1e-12);
    }

    #[test]
    fn radius_coupling_relations() {
        let refl = MeasurementMode::Reflection;
        let notch = MeasurementMode::NotchTransmission;
        assert_relative_eq!(coupling_to_radius(Quality::Finite(1.0), refl).unwrap(), 0.5);
        assert_relative_eq!(coupling_to_radius(Quality::Finite(3.0), refl).unwrap(), 0.75);
        assert_relative_eq!(coupling_to_radius(Quality::Finite(1.0), notch).unwrap(), 0.25);
        assert!(coupling_to_radius(Quality::Finite(-1.0), refl).is_err());

        assert_eq!(radius_to_coupling(0.5, refl).unwrap(), Quality::Finite(1.0));
        assert_eq!(radius_to_coupling(1.2, refl).unwrap(), Quality::Infinite);
        assert_eq!(radius_to_coupling(0.25, notch).unwrap(), Quality::Finite(1.0));
    }

    #[test]
    fn quality_factor_relations() {
        assert_relative_eq!(loaded_q(Quality::Finite(2e4), 2e4), 1e4);
        assert_relative_eq!(loaded_q(Quality::Infinite, 2e4), 2e4);

        let q_l = loaded_q(Quality::Finite(80e3f64), 211e3);
        assert!((q_l - 58.0e3).abs() < 0.1e3, "{q_l}");
        let from_linewidth = 5.003e9 / 0.09e6;
        assert!((q_l / from_linewidth - 1.0).abs() < 0.05);
        assert_relative_eq!(kappa_angular(5e9, 1e4), 2.0 * PI * 5e5);
    }

    #[test]
    fn radius_to_quality_factors() {
        let (qi, qc) = qualities_from_radius(1e4, 0.5, MeasurementMode::Reflection);
        assert_eq!(qi, Quality::Finite(2e4));
        assert_eq!(qc, Quality::Finite(2e4));
        let (qi, qc) = qualities_from_radius(1e4, 1.2, MeasurementMode::Reflection);
        assert_eq!(qi, Quality::Infinite);
        assert_eq!(qc, Quality::Finite(1e4));
        let (qi, qc) = qualities_from_radius(1e4, 0.0, MeasurementMode::Reflection);
        assert_eq!(qi, Quality::Finite(1e4));
        assert_eq!(qc, Quality::Infinite);
    }

    #[test]
    fn from_loaded_matches_direct() {
        let p = ResonatorParams::from_loaded(6e9, 1e4, Quality::Finite(3.0), MeasurementMode::Reflection).unwrap();
        assert_relative_eq!(p.q_l(), 1e4, max_relative = 1e-14);
        assert_relative_eq!(p.coupling().value(), 3.0, max_relative = 1e-14);
        assert_relative_eq!(p.radius(), 0.75, max_relative = 1e-14);
        let notch =
            ResonatorParams::from_loaded(6e9, 1e4, Quality::Finite(1.0), MeasurementMode::NotchTransmission).unwrap();
        assert_relative_eq!(notch.radius(), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn decibel_conversion() {
        assert!((leakage_db_to_linear(-15.0f64).unwrap() - 0.1778).abs() < 5e-4);
        assert!((leakage_db_to_linear(-24.0f64).unwrap() - 0.0631).abs() < 5e-4);
        let unity: f64 = leakage_db_to_linear(0.0).unwrap();
        assert!(FanoBackground::new(unity, 0.0).is_err());
        assert!(leakage_db_to_linear(3.0).is_err());
        assert_relative_eq!(leakage_linear_to_db(0.061), -24.293, epsilon = 1e-3);
    }

    #[test]
    fn works_in_single_precision() {
        let p = ResonatorParams::<f32>::new(5e9, Quality::Finite(3e4), 1e4, MeasurementMode::Reflection).unwrap();
        let s = reflection_response(&p, 5e9).unwrap();
        assert!((s.re + 0.5).abs() < 1e-5);
    }
}
