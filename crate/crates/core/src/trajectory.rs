//! Leakage calibration from the trajectory of fitted centerpoints.
//!
//! When the leakage phase sweeps (for example because the resonance is tuned
//! against a background path), `M'` runs over a circle whose center and
//! radius determine both `b` and the Fano-free centerpoint.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex;

use crate::circle::{fit_circle_weighted, Circle};
use crate::error::{Error, Result};
use crate::model::{b_from_tilde, qualities_from_radius, MeasurementMode, Quality};
use crate::scalar::Scalar;

pub const MIN_TRAJECTORY_POINTS: usize = 5;
pub const ROBUST_ITERATIONS: usize = 3;
/// Tukey cutoff in units of the MAD-based scale estimate.
pub const ROBUST_CUTOFF: f64 = 3.5;
/// Arc coverage below which the leakage amplitude is poorly determined.
pub const LOW_ARC_RAD: f64 = std::f64::consts::FRAC_PI_4;
/// Shortest run of consecutive large residuals that is flagged.
pub const MIN_FLAG_RUN: usize = 3;
pub const DRIFT_TAU: f64 = 0.8;

const MAD_TO_SIGMA: f64 = 1.4826;
/// Residual scale floor relative to the circle radius.
const SCALE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CenterTrajectory<T> {
    /// Sweep coordinate of each fit, e.g. resonance frequency or drive power.
    pub labels: Vec<T>,
    pub centers: Vec<Complex<T>>,
    pub q_l: Vec<T>,
}

impl<T: Scalar> CenterTrajectory<T> {
    pub fn new(labels: Vec<T>, centers: Vec<Complex<T>>, q_l: Vec<T>) -> Result<Self> {
        if labels.len() != centers.len() || q_l.len() != centers.len() {
            return Err(Error::InvalidInput(format!(
                "trajectory lengths differ: {} labels, {} centers, {} Q_l",
                labels.len(),
                centers.len(),
                q_l.len()
            )));
        }
        if centers.len() < MIN_TRAJECTORY_POINTS {
            return Err(Error::InvalidInput(format!(
                "trajectory needs at least {MIN_TRAJECTORY_POINTS} points, got {}",
                centers.len()
            )));
        }
        if centers.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) || labels.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidInput("trajectory contains non-finite values".into()));
        }
        Ok(Self { labels, centers, q_l })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Median loaded quality factor over the finite entries.
    pub fn median_q_l(&self) -> Option<T> {
        let finite: Vec<T> = self
            .q_l
            .iter()
            .copied()
            .filter(|q| q.is_finite() && *q > T::zero())
            .collect();
        median(&finite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryWarning {
    LowArc,
    Nonstationary,
    Drift,
}

impl TrajectoryWarning {
    pub fn code(&self) -> &'static str {
        match self {
            TrajectoryWarning::LowArc => "LOW_ARC",
            TrajectoryWarning::Nonstationary => "NONSTATIONARY",
            TrajectoryWarning::Drift => "DRIFT",
        }
    }
}

impl fmt::Display for TrajectoryWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryFit<T> {
    pub circle: Circle<T>,
    /// Real coordinate of the center, measured along the axis through the off-resonant point.
    pub x_c: T,
    pub r_c: T,
    /// RMS radial residual over the inliers.
    pub rms: T,
    pub weights: Vec<T>,
    pub inliers: Vec<bool>,
    /// Angular extent covered by the inliers (rad).
    pub arc_coverage: T,
    pub warnings: Vec<TrajectoryWarning>,
}

pub(crate) fn median<T: Scalar>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / T::lit(2.0)
    })
}

/// Median and `1.4826 * MAD`, the latter floored relative to `scale`.
fn robust_location_scale<T: Scalar>(residuals: &[T], scale: T) -> (T, T) {
    let m = median(residuals).unwrap_or_else(T::zero);
    let dev: Vec<T> = residuals.iter().map(|r| (*r - m).abs()).collect();
    let mad = median(&dev).unwrap_or_else(T::zero);
    (
        m,
        (T::lit(MAD_TO_SIGMA) * mad).max(T::lit(SCALE_FLOOR) * scale.max(T::lit(1e-6))),
    )
}

/// `2 pi` minus the largest angular gap between the points as seen from `center`.
pub fn arc_coverage<T: Scalar>(center: Complex<T>, points: &[Complex<T>]) -> T {
    if points.len() < 2 {
        return T::zero();
    }
    let mut angles: Vec<T> = points.iter().map(|p| (p - center).arg()).collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let mut gap = angles[0] + T::TAU() - angles[angles.len() - 1];
    for w in angles.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    (T::TAU() - gap).max(T::zero())
}

const LMEDS_SAMPLES: usize = 500;

/// Circle through three points, `None` when they are (nearly) collinear.
fn circumcircle<T: Scalar>(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> Option<Circle<T>> {
    let (ab, ac) = (b - a, c - a);
    let d = T::lit(2.0) * (ab.re * ac.im - ab.im * ac.re);
    let scale = ab.norm_sqr().max(ac.norm_sqr());
    if !(d.abs() > T::lit(1e-12) * scale) {
        return None;
    }
    let (nb, nc) = (ab.norm_sqr(), ac.norm_sqr());
    let ux = (ac.im * nb - ab.im * nc) / d;
    let uy = (ab.re * nc - ac.re * nb) / d;
    let offset = Complex::new(ux, uy);
    Some(Circle {
        center: a + offset,
        radius: offset.norm(),
    })
}

fn median_sq_residual<T: Scalar>(circle: &Circle<T>, pts: &[Complex<T>]) -> T {
    let sq: Vec<T> = pts.iter().map(|&p| circle.residual(p).powi(2)).collect();
    median(&sq).unwrap_or_else(T::infinity)
}

/// Least-median-of-squares circle over three-point samples (exhaustive for
/// small sets, otherwise a fixed pseudo-random subset).
fn least_median_circle<T: Scalar>(pts: &[Complex<T>]) -> Option<Circle<T>> {
    use rand::{Rng, SeedableRng};
    let n = pts.len();
    let mut triples = Vec::new();
    if n * (n - 1) * (n - 2) / 6 <= LMEDS_SAMPLES {
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    triples.push((i, j, k));
                }
            }
        }
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        while triples.len() < LMEDS_SAMPLES {
            let (i, j, k) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
            if i != j && j != k && i != k {
                triples.push((i, j, k));
            }
        }
    }
    triples
        .into_iter()
        .filter_map(|(i, j, k)| circumcircle(pts[i], pts[j], pts[k]))
        .map(|c| (median_sq_residual(&c, pts), c))
        .filter(|(m, _)| m.is_finite())
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal))
        .map(|(_, c)| c)
}

pub fn fit_center_trajectory<T: Scalar>(traj: &CenterTrajectory<T>, robust: bool) -> Result<TrajectoryFit<T>> {
    let pts = &traj.centers;
    if pts.len() < MIN_TRAJECTORY_POINTS {
        return Err(Error::InvalidInput(format!(
            "trajectory needs at least {MIN_TRAJECTORY_POINTS} points"
        )));
    }
    let mut fit = fit_circle_weighted(pts, None, true)?;
    let mut weights = vec![T::one(); pts.len()];
    if robust {
        // A gross share of outliers drags the least-squares start too far for
        // the reweighting to recover, so start from a least-median circle.
        if let Some(start) = least_median_circle(pts) {
            if median_sq_residual(&start, pts) < median_sq_residual(&fit.circle, pts) {
                fit.circle = start;
            }
        }
        for _ in 0..ROBUST_ITERATIONS {
            let res: Vec<T> = pts.iter().map(|&p| fit.circle.residual(p)).collect();
            // Outliers bias the radius, so residuals are measured from their median.
            let (loc, sigma) = robust_location_scale(&res, fit.circle.radius);
            let cutoff = T::lit(ROBUST_CUTOFF) * sigma;
            weights = res
                .iter()
                .map(|r| {
                    let u = (*r - loc) / cutoff;
                    if u.abs() < T::one() {
                        (T::one() - u * u).powi(2)
                    } else {
                        T::zero()
                    }
                })
                .collect();
            fit = fit_circle_weighted(pts, Some(&weights), true)?;
        }
    }
    let inliers: Vec<bool> = weights.iter().map(|w| *w > T::zero()).collect();
    let inlier_pts: Vec<Complex<T>> = pts.iter().zip(&inliers).filter(|(_, k)| **k).map(|(p, _)| *p).collect();
    let circle = fit.circle;
    let rms = circle.rms(&inlier_pts);
    let coverage = arc_coverage(circle.center, &inlier_pts);
    let mut warnings = Vec::new();
    if coverage < T::lit(LOW_ARC_RAD) {
        warnings.push(TrajectoryWarning::LowArc);
    }
    let off = Complex::new(T::one(), T::zero());
    Ok(TrajectoryFit {
        circle,
        x_c: T::one() - (off - circle.center).norm(),
        r_c: circle.radius,
        rms,
        weights,
        inliers,
        arc_coverage: coverage,
        warnings,
    })
}

/// Leakage amplitude and Fano-free centerpoint from the centerpoint circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageCalibration<T> {
    pub b: T,
    pub b_tilde: T,
    /// Fano-free centerpoint on the real axis.
    pub m_true: T,
    pub q_l: T,
    pub q_i: Quality<T>,
    pub q_c: Quality<T>,
    pub mode: MeasurementMode,
}

pub fn calibrate_leakage<T: Scalar>(
    x_c: T,
    r_c: T,
    q_l_median: T,
    mode: MeasurementMode,
) -> Result<LeakageCalibration<T>> {
    if !(x_c < T::one()) {
        return Err(Error::InvalidInput(format!(
            "centerpoint circle must satisfy x_c < 1, got {x_c}"
        )));
    }
    if !(r_c >= T::zero() && r_c.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "centerpoint circle radius must be >= 0, got {r_c}"
        )));
    }
    if !(q_l_median > T::zero() && q_l_median.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "loaded quality factor must be positive, got {q_l_median}"
        )));
    }
    let bt = r_c / (T::one() - x_c);
    if bt >= T::one() {
        return Err(Error::InfeasibleCalibration { b_tilde: bt.as_f64() });
    }
    let x = T::one() - (T::one() - x_c) * (T::one() - bt * bt);
    // In transmission the centerpoint sits at 1 - R with R = Q_l/(2 Q_c).
    let (q_i, q_c) = qualities_from_radius(q_l_median, T::one() - x, mode);
    Ok(LeakageCalibration {
        b: b_from_tilde(bt),
        b_tilde: bt,
        m_true: x,
        q_l: q_l_median,
        q_i,
        q_c,
        mode,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult<T> {
    pub b: T,
    pub m_true: T,
    pub q_i: Quality<T>,
    pub q_c: Quality<T>,
    pub q_l: T,
    pub arc_coverage: T,
    pub rms: T,
    pub per_point_residuals: Vec<T>,
    pub fit: TrajectoryFit<T>,
    pub calibration: LeakageCalibration<T>,
}

/// Trajectory fit followed by [`calibrate_leakage`] with the median loaded Q.
pub fn calibrate_trajectory<T: Scalar>(
    traj: &CenterTrajectory<T>,
    robust: bool,
    mode: MeasurementMode,
) -> Result<CalibrationResult<T>> {
    let fit = fit_center_trajectory(traj, robust)?;
    let q_l = traj
        .median_q_l()
        .ok_or_else(|| Error::InvalidInput("no finite loaded quality factor in trajectory".into()))?;
    let cal = calibrate_leakage(fit.x_c, fit.r_c, q_l, mode)?;
    Ok(CalibrationResult {
        b: cal.b,
        m_true: cal.m_true,
        q_i: cal.q_i,
        q_c: cal.q_c,
        q_l,
        arc_coverage: fit.arc_coverage,
        rms: fit.rms,
        per_point_residuals: traj.centers.iter().map(|&p| fit.circle.residual(p)).collect(),
        fit,
        calibration: cal,
    })
}

/// Consecutive samples (in label order) whose residual exceeds the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlaggedRun<T> {
    pub first_label: T,
    pub last_label: T,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryReport<T> {
    /// Labels sorted ascending, with the matching signed radial residuals.
    pub labels: Vec<T>,
    pub residuals: Vec<T>,
    pub large: Vec<bool>,
    pub threshold: T,
    pub runs: Vec<FlaggedRun<T>>,
    /// Rank correlation of residual against label.
    pub kendall_tau: f64,
    pub warnings: Vec<TrajectoryWarning>,
}

/// Kendall tau-b between two equally long sequences.
pub fn kendall_tau<T: Scalar>(x: &[T], y: &[T]) -> f64 {
    let n = x.len().min(y.len());
    let (mut concordant, mut discordant, mut tie_x, mut tie_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[j].partial_cmp(&x[i]).unwrap_or(Ordering::Equal);
            let dy = y[j].partial_cmp(&y[i]).unwrap_or(Ordering::Equal);
            match (dx, dy) {
                (Ordering::Equal, Ordering::Equal) => {}
                (Ordering::Equal, _) => tie_x += 1,
                (_, Ordering::Equal) => tie_y += 1,
                (a, b) if a == b => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let denom = (((concordant + discordant + tie_x) * (concordant + discordant + tie_y)) as f64).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        (concordant - discordant) as f64 / denom
    }
}

pub fn trajectory_report<T: Scalar>(traj: &CenterTrajectory<T>, fit: &TrajectoryFit<T>) -> TrajectoryReport<T> {
    let mut order: Vec<usize> = (0..traj.len()).collect();
    order.sort_by(|&a, &b| traj.labels[a].partial_cmp(&traj.labels[b]).unwrap_or(Ordering::Equal));
    let labels: Vec<T> = order.iter().map(|&i| traj.labels[i]).collect();
    let residuals: Vec<T> = order.iter().map(|&i| fit.circle.residual(traj.centers[i])).collect();

    let threshold = T::lit(ROBUST_CUTOFF) * robust_location_scale(&residuals, fit.circle.radius).1;
    let threshold = threshold.max(T::lit(1e-8) * fit.circle.radius.max(T::lit(1e-6)));
    let large: Vec<bool> = residuals.iter().map(|r| r.abs() > threshold).collect();

    let mut runs = Vec::new();
    let mut start = None;
    for i in 0..=large.len() {
        let on = i < large.len() && large[i];
        match (on, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                if i - s >= MIN_FLAG_RUN {
                    runs.push(FlaggedRun {
                        first_label: labels[s],
                        last_label: labels[i - 1],
                        len: i - s,
                    });
                }
                start = None;
            }
            _ => {}
        }
    }

    let tau = kendall_tau(&labels, &residuals);
    let mut warnings = fit.warnings.clone();
    if !runs.is_empty() {
        warnings.push(TrajectoryWarning::Nonstationary);
    }
    if tau.abs() > DRIFT_TAU {
        warnings.push(TrajectoryWarning::Drift);
    }
    TrajectoryReport {
        labels,
        residuals,
        large,
        threshold,
        runs,
        kendall_tau: tau,
        warnings,
    }
}
