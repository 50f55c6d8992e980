//! Circle fitting in the complex plane.
//!
//! The algebraic Taubin fit (Newton iteration on the characteristic
//! polynomial) gives the initial estimate; an optional Levenberg-Marquardt
//! pass then minimizes the geometric (radial) residuals. Both stages accept
//! per-point weights, which the robust trajectory fit relies on.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle<T> {
    pub center: Complex<T>,
    pub radius: T,
}

impl<T: Scalar> Circle<T> {
    /// Signed radial distance of `p` from the circle.
    pub fn residual(&self, p: Complex<T>) -> T {
        (p - self.center).norm() - self.radius
    }

    pub fn rms(&self, points: &[Complex<T>]) -> T {
        let n = T::from_usize(points.len()).unwrap_or_else(T::one);
        let ss: T = points.iter().map(|&p| self.residual(p).powi(2)).sum();
        (ss / n).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFit<T> {
    pub circle: Circle<T>,
    /// Root-mean-square radial residual (unweighted).
    pub rms: T,
}

/// Algebraic fit followed by geometric refinement.
pub fn fit_circle<T: Scalar>(points: &[Complex<T>]) -> Result<CircleFit<T>> {
    fit_circle_weighted(points, None, true)
}

/// Circle fit with optional weights and optional geometric refinement.
pub fn fit_circle_weighted<T: Scalar>(
    points: &[Complex<T>],
    weights: Option<&[T]>,
    refine: bool,
) -> Result<CircleFit<T>> {
    if let Some(w) = weights {
        if w.len() != points.len() {
            return Err(Error::InvalidInput(format!(
                "{} weights for {} points",
                w.len(),
                points.len()
            )));
        }
    }
    let mut circle = taubin(points, weights)?;
    if refine {
        circle = refine_geometric(points, weights, circle);
    }
    Ok(CircleFit {
        circle,
        rms: circle.rms(points),
    })
}

/// Taubin algebraic circle fit.
pub fn taubin<T: Scalar>(points: &[Complex<T>], weights: Option<&[T]>) -> Result<Circle<T>> {
    if points.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
        return Err(Error::InvalidInput("non-finite point".into()));
    }
    let weight = |i: usize| weights.map_or(T::one(), |w| w[i]);
    let total: T = (0..points.len()).map(weight).sum();
    let active = (0..points.len()).filter(|&i| weight(i) > T::zero()).count();
    if active < 3 || !(total > T::zero()) {
        return Err(Error::DegenerateGeometry(format!(
            "circle fit needs at least 3 weighted points, got {active}"
        )));
    }

    let mean = points
        .iter()
        .enumerate()
        .fold(Complex::new(T::zero(), T::zero()), |acc, (i, &p)| {
            acc + p.scale(weight(i))
        })
        .unscale(total);

    // Work in coordinates centred on the mean and scaled to unit spread.
    let spread = (points
        .iter()
        .enumerate()
        .map(|(i, &p)| weight(i) * (p - mean).norm_sqr())
        .sum::<T>()
        / total)
        .sqrt();
    if !(spread > T::zero()) {
        return Err(Error::DegenerateGeometry("all points coincide".into()));
    }

    let (mut mxx, mut myy, mut mxy, mut mxz, mut myz, mut mzz) =
        (T::zero(), T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    for (i, &p) in points.iter().enumerate() {
        let w = weight(i);
        let q = (p - mean).unscale(spread);
        let (x, y) = (q.re, q.im);
        let z = x * x + y * y;
        mxx = mxx + w * x * x;
        myy = myy + w * y * y;
        mxy = mxy + w * x * y;
        mxz = mxz + w * x * z;
        myz = myz + w * y * z;
        mzz = mzz + w * z * z;
    }
    mxx = mxx / total;
    myy = myy / total;
    mxy = mxy / total;
    mxz = mxz / total;
    myz = myz / total;
    mzz = mzz / total;

    let mz = mxx + myy;
    let cov_xy = mxx * myy - mxy * mxy;
    // Scatter matrix nearly singular: the points lie on a line.
    if cov_xy <= T::lit(1e3) * T::epsilon() * mz * mz {
        return Err(Error::DegenerateGeometry("points are collinear".into()));
    }

    let three = T::lit(3.0);
    let four = T::lit(4.0);
    let a3 = four * mz;
    let a2 = -three * mz * mz - mzz;
    let a1 = mzz * mz + four * cov_xy * mz - mxz * mxz - myz * myz - mz * mz * mz;
    let a0 = mxz * mxz * myy + myz * myz * mxx - mzz * cov_xy - T::lit(2.0) * mxz * myz * mxy + mz * mz * cov_xy;
    let a22 = a2 + a2;
    let a33 = a3 + a3 + a3;

    let mut x = T::zero();
    let mut y = T::max_value();
    for _ in 0..100 {
        let y_old = y;
        y = a0 + x * (a1 + x * (a2 + x * a3));
        if y.abs() > y_old.abs() {
            // Newton heading the wrong way; fall back to the initial root.
            x = T::zero();
            break;
        }
        let dy = a1 + x * (a22 + x * a33);
        if dy == T::zero() {
            break;
        }
        let x_old = x;
        x = x_old - y / dy;
        if x == T::zero() || ((x - x_old) / x).abs() < T::epsilon() {
            break;
        }
    }
    if x < T::zero() || !x.is_finite() {
        x = T::zero();
    }

    let det = x * x - x * mz + cov_xy;
    if det.abs() <= T::epsilon() * mz * mz {
        return Err(Error::DegenerateGeometry("singular Taubin system".into()));
    }
    let two = T::lit(2.0);
    let cx = (mxz * (myy - x) - myz * mxy) / det / two;
    let cy = (myz * (mxx - x) - mxz * mxy) / det / two;
    let radius = (cx * cx + cy * cy + mz).sqrt();
    let center = Complex::new(cx, cy).scale(spread) + mean;
    let radius = radius * spread;
    if !(radius.is_finite() && center.re.is_finite() && center.im.is_finite()) {
        return Err(Error::DegenerateGeometry("circle fit diverged".into()));
    }
    Ok(Circle { center, radius })
}

/// Levenberg-Marquardt minimization of the weighted squared radial residuals.
pub fn refine_geometric<T: Scalar>(points: &[Complex<T>], weights: Option<&[T]>, init: Circle<T>) -> Circle<T> {
    let weight = |i: usize| weights.map_or(T::one(), |w| w[i]);
    let cost = |c: &Circle<T>| -> T {
        points
            .iter()
            .enumerate()
            .map(|(i, &p)| weight(i) * c.residual(p).powi(2))
            .sum()
    };

    let mut circle = init;
    let mut current = cost(&circle);
    let mut lambda = T::lit(1e-3);
    let tiny = T::epsilon() * T::epsilon();

    for _ in 0..200 {
        if current <= tiny * circle.radius * circle.radius {
            break;
        }
        // Normal equations J^T W J and J^T W r for (cx, cy, r).
        let mut jtj = [[T::zero(); 3]; 3];
        let mut jtr = [T::zero(); 3];
        for (i, &p) in points.iter().enumerate() {
            let w = weight(i);
            if w == T::zero() {
                continue;
            }
            let d = p - circle.center;
            let dist = d.norm();
            if dist == T::zero() {
                continue;
            }
            let j = [-d.re / dist, -d.im / dist, -T::one()];
            let r = dist - circle.radius;
            for a in 0..3 {
                jtr[a] = jtr[a] + w * j[a] * r;
                for b in 0..3 {
                    jtj[a][b] = jtj[a][b] + w * j[a] * j[b];
                }
            }
        }

        let mut improved = false;
        for _ in 0..20 {
            let mut m = jtj;
            for (a, row) in m.iter_mut().enumerate() {
                row[a] = row[a] * (T::one() + lambda);
            }
            let Some(step) = solve3(m, jtr.map(|v| -v)) else {
                lambda = lambda * T::lit(10.0);
                continue;
            };
            let trial = Circle {
                center: circle.center + Complex::new(step[0], step[1]),
                radius: circle.radius + step[2],
            };
            let trial_cost = cost(&trial);
            if trial_cost.is_finite() && trial_cost < current {
                let gain = (current - trial_cost) / current;
                circle = trial;
                current = trial_cost;
                lambda = (lambda / T::lit(10.0)).max(T::lit(1e-12));
                improved = gain > T::epsilon();
                break;
            }
            lambda = lambda * T::lit(10.0);
        }
        if !improved {
            break;
        }
    }
    circle.radius = circle.radius.abs();
    circle
}

/// Solves a 3x3 linear system by Gaussian elimination with partial pivoting.
pub(crate) fn solve3<T: Scalar>(a: [[T; 3]; 3], b: [T; 3]) -> Option<[T; 3]> {
    solve(a, b)
}

/// Gaussian elimination with partial pivoting.
pub(crate) fn solve<T: Scalar, const N: usize>(mut a: [[T; N]; N], mut b: [T; N]) -> Option<[T; N]> {
    for col in 0..N {
        let pivot = (col..N).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if !(a[pivot][col].abs() > T::zero()) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] = a[row][k] - f * a[col][k];
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let mut x = [T::zero(); N];
    for row in (0..N).rev() {
        let mut s = b[row];
        for k in row + 1..N {
            s = s - a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}
