//! Systematic uncertainty of the internal quality factor under an unknown
//! leakage phase.
//!
//! For a leakage amplitude bound `b`, the true centerpoint `M` lies on a circle
//! of radius `|R'| b~` around the measured `M'`. Intersecting that circle with
//! the real axis gives the extreme radii and hence the range of `Q_i`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fit::CircleFitResult;
use crate::model::{b_from_tilde, b_tilde, coupling_to_radius, leakage_db_to_linear, leakage_linear_to_db};
use crate::model::{qualities_from_radius, MeasurementMode, Quality};
use crate::scalar::Scalar;

/// Default leakage bounds of the band chart (dB).
pub const DEFAULT_BAND_DB: [f64; 4] = [-25.0, -20.0, -15.0, -10.0];
pub const DEFAULT_BAND_POINTS: usize = 61;
pub const DEFAULT_COUPLING_RANGE: (f64, f64) = (0.1, 100.0);

/// Lower, median and upper value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple<V> {
    pub min: V,
    pub mid: V,
    pub max: V,
}

impl<V: Copy> Triple<V> {
    pub fn splat(v: V) -> Self {
        Self { min: v, mid: v, max: v }
    }
}

/// Leakage amplitude bound, linear or in dB relative to the signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeakageBound<T> {
    Amplitude(T),
    Decibels(T),
}

impl<T: Scalar> LeakageBound<T> {
    pub fn amplitude(self) -> Result<T> {
        let b = match self {
            LeakageBound::Amplitude(b) => b,
            LeakageBound::Decibels(db) => leakage_db_to_linear(db)?,
        };
        if !(b >= T::zero() && b < T::one()) {
            return Err(Error::InvalidInput(format!(
                "leakage bound must lie in [0, 1), got {b}"
            )));
        }
        Ok(b)
    }
}

/// Smallest leakage consistent with a tilted circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageFloor<T> {
    pub b_tilde: T,
    pub b: T,
}

impl<T: Scalar> LeakageFloor<T> {
    /// False when no leakage below `b = 0.5` can explain the tilt.
    pub fn is_feasible(&self) -> bool {
        self.b_tilde < T::one()
    }
}

fn check_r_prime<T: Scalar>(r_prime: Complex<T>) -> Result<T> {
    let norm = r_prime.norm();
    if !(norm > T::zero()) || !norm.is_finite() {
        return Err(Error::DegenerateGeometry(
            "zero circle radius: resonance indistinguishable from the baseline".into(),
        ));
    }
    Ok(norm)
}

fn check_b<T: Scalar>(b: T) -> Result<()> {
    if !(b >= T::zero() && b < T::one()) {
        return Err(Error::InvalidInput(format!(
            "leakage amplitude must lie in [0, 1), got {b}"
        )));
    }
    Ok(())
}

pub fn min_leakage<T: Scalar>(r_prime: Complex<T>) -> Result<LeakageFloor<T>> {
    let norm = check_r_prime(r_prime)?;
    let bt = r_prime.im.abs() / norm;
    Ok(LeakageFloor {
        b_tilde: bt,
        b: b_from_tilde(bt),
    })
}

/// Fano-free centerpoint for a given leakage phase: `M' - |R'| b~ e^{i(phi + arg R')}`.
pub fn invert_center<T: Scalar>(m_prime: Complex<T>, b: T, phi: T) -> Complex<T> {
    let r_prime = Complex::new(T::one(), T::zero()) - m_prime;
    let arg = if r_prime.norm() > T::zero() {
        r_prime.arg()
    } else {
        T::zero()
    };
    m_prime - Complex::from_polar(r_prime.norm() * b_tilde(b), phi + arg)
}

/// Radii of the real-axis intersections, `Re R' -/+ sqrt((|R'| b~)^2 - Im^2 R')`.
pub fn radii_range<T: Scalar>(r_prime: Complex<T>, b: T) -> Result<Triple<T>> {
    check_b(b)?;
    let norm = check_r_prime(r_prime)?;
    let floor = min_leakage(r_prime)?;
    let reach = norm * b_tilde(b);
    let disc = reach * reach - r_prime.im * r_prime.im;
    if disc < T::zero() {
        // Allow rounding at the boundary b = b_min.
        let tol = T::lit(64.0) * T::epsilon() * norm * norm;
        if -disc > tol {
            return Err(Error::InfeasibleBound {
                b: b.as_f64(),
                b_min: floor.b.as_f64(),
            });
        }
    }
    let half = disc.max(T::zero()).sqrt();
    let mid = r_prime.re;
    Ok(Triple {
        min: (mid - half).max(T::zero()),
        mid,
        max: mid + half,
    })
}

/// Range of internal and coupling quality factors for one trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QiRange<T> {
    pub q_l: T,
    pub q_i: Triple<Quality<T>>,
    /// Sorted ascending, so `q_c.min` belongs to the largest radius.
    pub q_c: Triple<Quality<T>>,
    pub r: Triple<T>,
    pub b_assumed: T,
    pub b_min: T,
    /// False when the bound was below `b_min` and the range was evaluated at `b_min`.
    pub feasible: bool,
    pub mode: MeasurementMode,
}

impl<T: Scalar> QiRange<T> {
    pub fn is_unbounded(&self) -> bool {
        self.q_i.max.is_infinite()
    }

    /// Relative spread `(Q_i,min/Q_i,mid, Q_i,max/Q_i,mid)`; the upper value may be infinite.
    pub fn relative(&self) -> (T, T) {
        let mid = self.q_i.mid.value();
        (self.q_i.min.value() / mid, self.q_i.max.value() / mid)
    }
}

pub fn qi_range<T: Scalar>(
    fit: &CircleFitResult<T>,
    bound: LeakageBound<T>,
    mode: MeasurementMode,
) -> Result<QiRange<T>> {
    qi_range_from(fit.r_prime, fit.q_l, bound.amplitude()?, mode)
}

/// Same as [`qi_range`] from the raw circle vector and loaded quality factor.
pub fn qi_range_from<T: Scalar>(r_prime: Complex<T>, q_l: T, b: T, mode: MeasurementMode) -> Result<QiRange<T>> {
    check_b(b)?;
    if !(q_l > T::zero() && q_l.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "loaded quality factor must be positive, got {q_l}"
        )));
    }
    let floor = min_leakage(r_prime)?;
    let feasible = b >= floor.b;
    let b_eval = if feasible { b } else { floor.b };
    let r = if b_eval < T::one() {
        radii_range(r_prime, b_eval)?
    } else {
        Triple::splat(r_prime.re.max(T::zero()))
    };
    let (qi_min, qc_max) = qualities_from_radius(q_l, r.min, mode);
    let (qi_mid, qc_mid) = qualities_from_radius(q_l, r.mid, mode);
    let (qi_max, qc_min) = qualities_from_radius(q_l, r.max, mode);
    Ok(QiRange {
        q_l,
        q_i: Triple {
            min: qi_min,
            mid: qi_mid,
            max: qi_max,
        },
        q_c: Triple {
            min: qc_min,
            mid: qc_mid,
            max: qc_max,
        },
        r,
        b_assumed: b,
        b_min: floor.b,
        feasible,
        mode,
    })
}

/// Projection estimate: `Q_i` from `Re R'` alone, ignoring the tilt.
pub fn diameter_correction_qi<T: Scalar>(r_prime: Complex<T>, q_l: T, mode: MeasurementMode) -> Quality<T> {
    qualities_from_radius(q_l, r_prime.re, mode).0
}

/// Circle traced by `M'` as the leakage phase runs over a full turn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterCircle<T> {
    pub x_c: T,
    pub r_c: T,
    /// Half opening angle of the bounding lines through the off-resonant point.
    pub beta: T,
}

pub fn center_circle<T: Scalar>(x: T, b: T) -> Result<CenterCircle<T>> {
    check_b(b)?;
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("centerpoint must be finite, got {x}")));
    }
    let bt = b_tilde(b);
    if bt >= T::one() {
        return Err(Error::DivergentGeometry { b_tilde: bt.as_f64() });
    }
    let den = T::one() - bt * bt;
    Ok(CenterCircle {
        x_c: (x - bt * bt) / den,
        r_c: (T::one() - x) * bt / den,
        beta: bt.asin(),
    })
}

/// One row of the relative uncertainty chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandRow<T> {
    pub coupling: T,
    pub b: T,
    pub b_db: T,
    pub rel_min: T,
    /// Infinite once the upper radius reaches the lossless limit.
    pub rel_max: T,
    /// `1 - |S11(f_r)|`.
    pub dip_reflection: T,
    /// `1 - |S21(f_r)|`.
    pub dip_transmission: T,
    /// `|S21(f_r)|` of a notch resonator with the same coupling.
    pub s21_at_resonance: T,
}

/// `n` log-spaced couplings between `lo` and `hi`.
pub fn log_couplings<T: Scalar>(lo: T, hi: T, n: usize) -> Result<Vec<T>> {
    if !(lo > T::zero() && hi >= lo && lo.is_finite() && hi.is_finite()) || n == 0 {
        return Err(Error::InvalidInput(format!(
            "invalid coupling range [{lo}, {hi}] with {n} points"
        )));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, z) = (lo.ln(), hi.ln());
    let last = T::from_usize(n - 1).unwrap();
    let mut v: Vec<T> = (0..n)
        .map(|i| (a + (z - a) * T::from_usize(i).unwrap() / last).exp())
        .collect();
    v[0] = lo;
    v[n - 1] = hi;
    Ok(v)
}

pub fn default_band_couplings<T: Scalar>() -> Vec<T> {
    log_couplings(
        T::lit(DEFAULT_COUPLING_RANGE.0),
        T::lit(DEFAULT_COUPLING_RANGE.1),
        DEFAULT_BAND_POINTS,
    )
    .expect("default range is valid")
}

pub fn default_band_leakage<T: Scalar>() -> Vec<T> {
    DEFAULT_BAND_DB
        .iter()
        .map(|&db| leakage_db_to_linear(T::lit(db)).expect("negative dB"))
        .collect()
}

fn band_row<T: Scalar>(coupling: T, b: T, mode: MeasurementMode) -> Result<BandRow<T>> {
    let radius = coupling_to_radius(Quality::Finite(coupling), mode)?;
    let r = radii_range(Complex::new(radius, T::zero()), b)?;
    let q = |r: T| qualities_from_radius(T::one(), r, mode).0;
    let mid = q(r.mid).value();
    let refl = coupling_to_radius(Quality::Finite(coupling), MeasurementMode::Reflection)?;
    let s21 = T::one() - refl;
    Ok(BandRow {
        coupling,
        b,
        b_db: leakage_linear_to_db(b),
        rel_min: q(r.min).value() / mid,
        rel_max: q(r.max).value() / mid,
        dip_reflection: T::one() - (T::one() - T::lit(2.0) * refl).abs(),
        dip_transmission: T::one() - s21,
        s21_at_resonance: s21,
    })
}

/// Rows ordered by leakage first, coupling second.
pub fn uncertainty_band<T: Scalar>(couplings: &[T], b_list: &[T], mode: MeasurementMode) -> Result<Vec<BandRow<T>>> {
    if let Some(c) = couplings.iter().find(|c| !(**c > T::zero() && c.is_finite())) {
        return Err(Error::InvalidInput(format!("couplings must be positive, got {c}")));
    }
    for &b in b_list {
        check_b(b)?;
    }
    let mut rows = Vec::with_capacity(couplings.len() * b_list.len());
    for &b in b_list {
        for &c in couplings {
            rows.push(band_row(c, b, mode)?);
        }
    }
    Ok(rows)
}
