//! Trace fitting pipeline: cable-delay removal, normalization to the
//! off-resonant point, circle fit of the normalized data and a phase fit of
//! the frequency response around the fitted center.

use std::fmt;

use num_complex::Complex;

use crate::circle::{fit_circle_weighted, solve, solve3, taubin};
use crate::error::{Error, Result, Stage};
use crate::model::MeasurementMode;
use crate::scalar::Scalar;
use crate::trace::Trace;

/// Half-width of the cable-delay search window (s).
pub const DELAY_WINDOW_S: f64 = 100e-9;

/// Fraction of samples on each edge averaged by the edge-mean estimator.
pub const EDGE_FRACTION: f64 = 0.05;

/// Spans shorter than this many linewidths bias the edge-mean baseline.
pub const SHORT_SPAN_LINEWIDTHS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayRemoval<T> {
    /// Search the delay minimizing the circle-fit residual.
    Auto,
    /// Remove a known delay (s).
    Fixed(T),
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OffResonantEstimator {
    /// Mean of the outermost samples on both edges of the span.
    EdgeMean,
    /// Point of the fitted circle diametrically opposite the resonance.
    #[default]
    CircleIntersection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig<T> {
    pub mode: MeasurementMode,
    pub delay_removal: DelayRemoval<T>,
    pub off_resonant: OffResonantEstimator,
    /// Geometric refinement after the algebraic circle fit, and a final joint
    /// least-squares fit of the complete model to the raw samples.
    pub refine: bool,
}

impl<T: Scalar> Default for FitConfig<T> {
    fn default() -> Self {
        Self {
            mode: MeasurementMode::Reflection,
            delay_removal: DelayRemoval::Auto,
            off_resonant: OffResonantEstimator::default(),
            refine: true,
        }
    }
}

/// Non-fatal findings attached to a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitWarning {
    /// The span covers fewer than three linewidths; edge-mean baselines are biased.
    ShortSpan { span_over_kappa: f64 },
}

impl FitWarning {
    pub fn code(&self) -> &'static str {
        match self {
            FitWarning::ShortSpan { .. } => "SHORT_SPAN",
        }
    }
}

impl fmt::Display for FitWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitWarning::ShortSpan { span_over_kappa } => write!(
                f,
                "span covers only {span_over_kappa:.2} linewidths; edge-mean baseline is biased"
            ),
        }
    }
}

/// Geometry and frequency parameters extracted from one trace.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleFitResult<T> {
    /// Center of the normalized circle, M'.
    pub m_prime: Complex<T>,
    /// Vector from M' to the off-resonant point, `1 - M'`.
    pub r_prime: Complex<T>,
    pub f_r: T,
    /// Linewidth in Hz.
    pub kappa: T,
    pub q_l: T,
    /// Removed cable delay (s).
    pub delay: T,
    /// Off-resonant point of the delay-corrected data before normalization.
    pub off_resonant: Complex<T>,
    /// RMS radial residual of the normalized circle fit.
    pub rms_residual: T,
    pub warnings: Vec<FitWarning>,
}

/// Least-squares fit of the phase around the circle center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFit<T> {
    pub f_r: T,
    pub q_l: T,
    /// Phase at resonance (rad).
    pub theta0: T,
    /// `+1` when the phase decreases with frequency, `-1` for the conjugate convention.
    pub direction: T,
    pub rms: T,
}

impl<T: Scalar> PhaseFit<T> {
    pub fn kappa(&self) -> T {
        self.f_r / self.q_l
    }

    /// Direction (angle) from the circle center towards the off-resonant point.
    pub fn off_resonant_angle(&self) -> T {
        self.theta0 + T::PI()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Normalized<T> {
    pub trace: Trace<T>,
    pub off_resonant: Complex<T>,
    pub warnings: Vec<FitWarning>,
}

fn rotate_by_delay<T: Scalar>(trace: &Trace<T>, delay: T, reference: T) -> Trace<T> {
    trace.map_points(|f, p| p * Complex::from_polar(T::one(), T::TAU() * (f - reference) * delay))
}

/// Removes the propagation delay, multiplying each sample by `exp(+2 pi i f tau)`.
pub fn remove_cable_delay<T: Scalar>(trace: &Trace<T>, cfg: &FitConfig<T>) -> Result<(Trace<T>, T)> {
    let delay = match cfg.delay_removal {
        DelayRemoval::Off => return Ok((trace.clone(), T::zero())),
        DelayRemoval::Fixed(tau) => {
            if !tau.is_finite() {
                return Err(Error::InvalidInput(format!("fixed delay must be finite, got {tau}")));
            }
            tau
        }
        DelayRemoval::Auto => estimate_delay(trace)?,
    };
    Ok((rotate_by_delay(trace, delay, T::zero()), delay))
}

fn estimate_delay<T: Scalar>(trace: &Trace<T>) -> Result<T> {
    let reference = trace.center_frequency();
    let offsets: Vec<T> = trace.freqs().iter().map(|&f| f - reference).collect();
    let mut buf = vec![Complex::new(T::zero(), T::zero()); trace.len()];
    let mut objective = |tau: T| -> T {
        for ((slot, &p), &df) in buf.iter_mut().zip(trace.points()).zip(&offsets) {
            *slot = p * Complex::from_polar(T::one(), T::TAU() * df * tau);
        }
        match taubin(&buf, None) {
            Ok(c) => c.rms(&buf),
            Err(_) => T::infinity(),
        }
    };

    // Grid fine enough that neighbouring delays rotate the span edges by <= 0.05 rad.
    let window = T::lit(DELAY_WINDOW_S);
    let span = trace.span();
    let wanted = (T::lit(2.0) * window * T::TAU() * span / T::lit(0.05))
        .ceil()
        .to_usize()
        .unwrap_or(4001);
    let n = wanted.clamp(101, 4001) | 1;
    let step = T::lit(2.0) * window / T::from_usize(n - 1).unwrap();
    let grid: Vec<(T, T)> = (0..n)
        .map(|k| {
            let tau = -window + step * T::from_usize(k).unwrap();
            (tau, objective(tau))
        })
        .collect();
    let (best, &(best_tau, best_rms)) = grid
        .iter()
        .enumerate()
        .filter(|(_, (_, v))| v.is_finite())
        .min_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
        .ok_or_else(|| Error::DelayEstimation {
            best_delay: 0.0,
            reason: "circle fit failed for every trial delay".into(),
        })?;
    if best == 0 || best == n - 1 {
        return Err(Error::DelayEstimation {
            best_delay: best_tau.as_f64(),
            reason: format!("residual minimum at the edge of the +/-{DELAY_WINDOW_S:e} s window"),
        });
    }

    // Golden-section refinement inside the bracketing grid cells.
    let inv_phi = T::lit(0.618_033_988_749_894_9);
    let mut a = grid[best - 1].0;
    let mut b = grid[best + 1].0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c);
    let mut fd = objective(d);
    for _ in 0..200 {
        if (b - a).abs() <= T::lit(1e-19) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    let mid = (a + b) / T::lit(2.0);
    let candidates = [(mid, objective(mid)), (c, fc), (d, fd), (best_tau, best_rms)];
    let (tau, _) = candidates
        .into_iter()
        .filter(|(_, v)| v.is_finite())
        .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
        .unwrap_or((best_tau, best_rms));
    // Below the rounding floor every delay fits equally well; prefer none.
    let floor = T::lit(16.0) * T::epsilon() * trace.points().iter().map(|p| p.norm()).fold(T::zero(), T::max);
    let at_zero = objective(T::zero());
    if at_zero <= objective(tau) + floor {
        return Ok(T::zero());
    }
    Ok(tau)
}

/// Divides the trace by its off-resonant point so that the baseline sits at `(1, 0)`.
pub fn normalize_offresonant<T: Scalar>(trace: &Trace<T>, cfg: &FitConfig<T>) -> Result<Normalized<T>> {
    let circle = fit_circle_weighted(trace.points(), None, cfg.refine)?.circle;
    let centered: Vec<_> = trace.points().iter().map(|&p| p - circle.center).collect();
    let phase = fit_phase_response(trace.freqs(), &centered)?;

    let mut warnings = Vec::new();
    let off_resonant = match cfg.off_resonant {
        OffResonantEstimator::EdgeMean => {
            let n = trace.len();
            let k = ((n as f64 * EDGE_FRACTION).ceil() as usize).max(1);
            let pts = trace.points();
            let sum = pts[..k]
                .iter()
                .chain(&pts[n - k..])
                .fold(Complex::new(T::zero(), T::zero()), |acc, &p| acc + p);
            let span_over_kappa = trace.span() / phase.kappa();
            if span_over_kappa < T::lit(SHORT_SPAN_LINEWIDTHS) {
                warnings.push(FitWarning::ShortSpan {
                    span_over_kappa: span_over_kappa.as_f64(),
                });
            }
            sum.unscale(T::from_usize(2 * k).unwrap())
        }
        OffResonantEstimator::CircleIntersection => {
            circle.center + Complex::from_polar(circle.radius, phase.off_resonant_angle())
        }
    };
    if !(off_resonant.norm() >= T::lit(1e-12)) {
        return Err(Error::Normalization(format!(
            "off-resonant point too close to the origin (|O| = {})",
            off_resonant.norm()
        )));
    }
    Ok(Normalized {
        trace: trace.map_points(|_, p| p / off_resonant),
        off_resonant,
        warnings,
    })
}

/// Cumulative nearest-branch phase unwrapping.
pub fn unwrap_phase<T: Scalar>(phases: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(phases.len());
    let mut offset = T::zero();
    let mut prev: Option<T> = None;
    for &raw in phases {
        if let Some(p) = prev {
            let mut jump = raw + offset - p;
            while jump > T::PI() {
                offset = offset - T::TAU();
                jump = jump - T::TAU();
            }
            while jump < -T::PI() {
                offset = offset + T::TAU();
                jump = jump + T::TAU();
            }
        }
        let v = raw + offset;
        out.push(v);
        prev = Some(v);
    }
    out
}

/// Fits `theta(f) = theta0 + 2 atan(2 Q_l (1 - f/f_r))` to the phase of points centered on the circle.
pub fn fit_phase_response<T: Scalar>(freqs: &[T], centered: &[Complex<T>]) -> Result<PhaseFit<T>> {
    if freqs.len() != centered.len() || freqs.len() < 5 {
        return Err(Error::PhaseFit(format!(
            "need at least 5 matched samples, got {} frequencies and {} points",
            freqs.len(),
            centered.len()
        )));
    }
    let raw: Vec<T> = centered.iter().map(|z| z.arg()).collect();
    let unwrapped = unwrap_phase(&raw);
    let n = unwrapped.len();
    let direction = if unwrapped[n - 1] <= unwrapped[0] {
        T::one()
    } else {
        -T::one()
    };
    let y: Vec<T> = unwrapped.iter().map(|&v| v * direction).collect();

    let sweep = y[0] - y[n - 1];
    if sweep < T::FRAC_PI_2() {
        return Err(Error::PhaseFit(format!(
            "phase sweeps only {sweep} rad across the span"
        )));
    }
    let mut running_min = y[0];
    for &v in &y[1..] {
        if v - running_min > T::FRAC_PI_4() {
            return Err(Error::PhaseFit("unwrapped phase is not monotonic".into()));
        }
        running_min = running_min.min(v);
    }

    let mut best: Option<(T, [T; 3], T, T)> = None;
    for (f0, theta0, kappa0) in initial_guesses(freqs, &y) {
        if !(kappa0 > T::zero() && kappa0.is_finite() && f0 > T::zero()) {
            continue;
        }
        let (p, cost) = levenberg_phase(freqs, &y, f0, theta0, kappa0);
        if cost.is_finite() && best.as_ref().is_none_or(|b| cost < b.0) {
            best = Some((cost, p, f0, kappa0));
        }
    }
    let (cost, p, f0, kappa0) = best.ok_or_else(|| Error::PhaseFit("no usable initial estimate".into()))?;
    let f_r = f0 + p[1] * kappa0;
    let q_l = f0 / kappa0 * p[2].exp();
    if !(f_r > T::zero() && q_l > T::zero() && f_r.is_finite() && q_l.is_finite()) {
        return Err(Error::PhaseFit("fit diverged".into()));
    }
    Ok(PhaseFit {
        f_r,
        q_l,
        theta0: p[0] * direction,
        direction,
        rms: (cost / T::from_usize(n).unwrap()).sqrt(),
    })
}

/// Starting points `(f_r, theta0, kappa)` from the steepest phase slope and from the mid-level crossing.
fn initial_guesses<T: Scalar>(freqs: &[T], y: &[T]) -> Vec<(T, T, T)> {
    let n = y.len();
    let h = (n / 100).max(1);
    let mut guesses = Vec::new();

    let steepest = (h..n - h)
        .map(|i| (i, (y[i + h] - y[i - h]) / (freqs[i + h] - freqs[i - h])))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    if let Some((k, slope)) = steepest {
        let theta0 = y[k];
        let kappa = half_width_kappa(freqs, y, theta0).unwrap_or(T::lit(4.0) / slope.abs());
        guesses.push((freqs[k], theta0, kappa));
    }

    let level = (y[0] + y[n - 1]) / T::lit(2.0);
    if let Some(f0) = crossing(freqs, y, level) {
        let kappa = half_width_kappa(freqs, y, level).unwrap_or(freqs[n - 1] - freqs[0]);
        guesses.push((f0, level, kappa));
    }
    guesses
}

/// Frequency at which the (decreasing) phase first drops below `level`.
fn crossing<T: Scalar>(freqs: &[T], y: &[T], level: T) -> Option<T> {
    (1..y.len()).find_map(|i| {
        if y[i - 1] >= level && y[i] < level {
            let t = (y[i - 1] - level) / (y[i - 1] - y[i]);
            Some(freqs[i - 1] + t * (freqs[i] - freqs[i - 1]))
        } else {
            None
        }
    })
}

fn half_width_kappa<T: Scalar>(freqs: &[T], y: &[T], theta0: T) -> Option<T> {
    let lo = crossing(freqs, y, theta0 + T::FRAC_PI_2())?;
    let hi = crossing(freqs, y, theta0 - T::FRAC_PI_2())?;
    let kappa = hi - lo;
    (kappa > T::zero()).then_some(kappa)
}

/// Levenberg-Marquardt over `(theta0, (f_r - f0)/kappa0, ln(Q_l/Q0))`.
fn levenberg_phase<T: Scalar>(freqs: &[T], y: &[T], f0: T, theta0: T, kappa0: T) -> ([T; 3], T) {
    let q0 = f0 / kappa0;
    let two = T::lit(2.0);
    let eval = |p: &[T; 3]| -> T {
        let f_r = f0 + p[1] * kappa0;
        let q = q0 * p[2].exp();
        freqs
            .iter()
            .zip(y)
            .map(|(&f, &v)| {
                let g = two * q * (f_r - f) / f_r;
                (v - p[0] - two * g.atan()).powi(2)
            })
            .sum()
    };

    let mut p = [theta0, T::zero(), T::zero()];
    let mut cost = eval(&p);
    let mut lambda = T::lit(1e-3);
    for _ in 0..500 {
        if cost <= T::epsilon() * T::epsilon() {
            break;
        }
        let f_r = f0 + p[1] * kappa0;
        let q = q0 * p[2].exp();
        let mut jtj = [[T::zero(); 3]; 3];
        let mut jtr = [T::zero(); 3];
        for (&f, &v) in freqs.iter().zip(y) {
            let g = two * q * (f_r - f) / f_r;
            let dm_dg = two / (T::one() + g * g);
            let j = [T::one(), dm_dg * two * q * f / (f_r * f_r) * kappa0, dm_dg * g];
            let r = v - p[0] - two * g.atan();
            for a in 0..3 {
                jtr[a] = jtr[a] + j[a] * r;
                for b in 0..3 {
                    jtj[a][b] = jtj[a][b] + j[a] * j[b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut m = jtj;
            for (a, row) in m.iter_mut().enumerate() {
                row[a] = row[a] * (T::one() + lambda);
            }
            let Some(step) = solve3(m, jtr) else {
                lambda = lambda * T::lit(10.0);
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let trial_cost = eval(&trial);
            if trial_cost.is_finite() && trial_cost < cost {
                improved = (cost - trial_cost) > T::epsilon() * cost;
                p = trial;
                cost = trial_cost;
                lambda = (lambda / T::lit(10.0)).max(T::lit(1e-15));
                break;
            }
            lambda = lambda * T::lit(10.0);
        }
        if !improved {
            break;
        }
    }
    (p, cost)
}

/// Model of the raw samples, `A e^{-2 pi i (f - f_c) tau} (1 - D/(1 + 2i Q_l (f - f_r)/f_r))`.
#[derive(Debug, Clone, Copy)]
struct JointModel<T> {
    gain: Complex<T>,
    delay: T,
    depth: Complex<T>,
    f_r: T,
    q_l: T,
}

const JOINT_PARAMS: usize = 7;

/// Levenberg-Marquardt over all model parameters at once, seeded by the
/// staged estimates. Delay, linewidth and baseline are partly degenerate in
/// the circle residual alone; the complex residual separates them.
fn joint_refine<T: Scalar>(trace: &Trace<T>, start: JointModel<T>, free_delay: bool) -> Option<JointModel<T>> {
    let f_c = trace.center_frequency();
    let kappa0 = start.f_r / start.q_l;
    let tau_scale = (T::TAU() * trace.span()).recip();
    let unpack = |p: &[T; JOINT_PARAMS]| JointModel {
        gain: Complex::new(p[0], p[1]),
        delay: start.delay + p[2] * tau_scale,
        depth: Complex::new(p[3], p[4]),
        f_r: start.f_r + p[5] * kappa0,
        q_l: start.q_l * p[6].exp(),
    };
    let two = T::lit(2.0);
    let i = Complex::new(T::zero(), T::one());
    let one = Complex::new(T::one(), T::zero());
    let cost = |m: &JointModel<T>| -> T {
        trace
            .iter()
            .map(|(f, y)| {
                let line = Complex::from_polar(T::one(), -T::TAU() * (f - f_c) * m.delay);
                let lor = (one + i * (two * m.q_l * (f - m.f_r) / m.f_r)).inv();
                (y - m.gain * line * (one - m.depth * lor)).norm_sqr()
            })
            .sum()
    };

    let mut p = [
        start.gain.re,
        start.gain.im,
        T::zero(),
        start.depth.re,
        start.depth.im,
        T::zero(),
        T::zero(),
    ];
    let mut model = unpack(&p);
    let mut c = cost(&model);
    let initial = c;
    let mut lambda = T::lit(1e-3);
    for _ in 0..200 {
        if !(c > T::epsilon() * T::epsilon()) {
            break;
        }
        let mut jtj = [[T::zero(); JOINT_PARAMS]; JOINT_PARAMS];
        let mut jtr = [T::zero(); JOINT_PARAMS];
        for (f, y) in trace.iter() {
            let line = Complex::from_polar(T::one(), -T::TAU() * (f - f_c) * model.delay);
            let lor = (one + i * (two * model.q_l * (f - model.f_r) / model.f_r)).inv();
            let shape = one - model.depth * lor;
            let g_line = model.gain * line;
            let r = y - g_line * shape;
            let u = f / model.f_r;
            let d_lor_dfr = lor * lor * i * (two * model.q_l * u / model.f_r);
            let d_lor_dq = -(lor * lor) * i * (two * (u - T::one()));
            let mut j = [Complex::new(T::zero(), T::zero()); JOINT_PARAMS];
            j[0] = line * shape;
            j[1] = i * line * shape;
            if free_delay {
                j[2] = g_line * shape * (-i * (T::TAU() * (f - f_c) * tau_scale));
            }
            j[3] = -(g_line * lor);
            j[4] = -(g_line * lor * i);
            j[5] = -(g_line * model.depth * d_lor_dfr) * kappa0;
            j[6] = -(g_line * model.depth * d_lor_dq) * model.q_l;
            for a in 0..JOINT_PARAMS {
                jtr[a] = jtr[a] + (j[a].conj() * r).re;
                for b in a..JOINT_PARAMS {
                    jtj[a][b] = jtj[a][b] + (j[a].conj() * j[b]).re;
                }
            }
        }
        for a in 0..JOINT_PARAMS {
            for b in 0..a {
                jtj[a][b] = jtj[b][a];
            }
        }
        if !free_delay {
            jtj[2][2] = T::one();
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut m = jtj;
            for (a, row) in m.iter_mut().enumerate() {
                row[a] = row[a] * (T::one() + lambda);
            }
            let Some(step) = solve(m, jtr) else {
                lambda = lambda * T::lit(10.0);
                continue;
            };
            let mut trial = p;
            for (t, s) in trial.iter_mut().zip(step) {
                *t = *t + s;
            }
            let trial_model = unpack(&trial);
            let trial_cost = cost(&trial_model);
            if trial_cost.is_finite() && trial_cost < c && trial_model.f_r > T::zero() {
                improved = (c - trial_cost) > T::lit(1e-12) * c;
                p = trial;
                model = trial_model;
                c = trial_cost;
                lambda = (lambda / T::lit(10.0)).max(T::lit(1e-15));
                break;
            }
            lambda = lambda * T::lit(10.0);
        }
        if !improved {
            break;
        }
    }
    let finite = [
        model.gain.re,
        model.gain.im,
        model.delay,
        model.depth.re,
        model.depth.im,
        model.f_r,
        model.q_l,
    ]
    .iter()
    .all(|v| v.is_finite());
    (finite && c <= initial && model.q_l > T::zero() && model.gain.norm() > T::zero()).then_some(model)
}

/// Full pipeline: delay removal, normalization, circle fit and phase fit.
pub fn fit_pipeline<T: Scalar>(trace: &Trace<T>, cfg: &FitConfig<T>) -> Result<CircleFitResult<T>> {
    let (delay_free, delay) = remove_cable_delay(trace, cfg).map_err(|e| e.at(Stage::DelayRemoval))?;
    let normalized = normalize_offresonant(&delay_free, cfg).map_err(|e| e.at(Stage::Normalization))?;
    let points = normalized.trace.points();
    let circle = fit_circle_weighted(points, None, cfg.refine).map_err(|e| e.at(Stage::CircleFit))?;
    let m_prime = circle.circle.center;
    let centered: Vec<_> = points.iter().map(|&p| p - m_prime).collect();
    let phase = fit_phase_response(normalized.trace.freqs(), &centered).map_err(|e| e.at(Stage::PhaseFit))?;

    let one = Complex::new(T::one(), T::zero());
    let staged = CircleFitResult {
        m_prime,
        r_prime: one - m_prime,
        f_r: phase.f_r,
        kappa: phase.kappa(),
        q_l: phase.q_l,
        delay,
        off_resonant: normalized.off_resonant,
        rms_residual: circle.rms,
        warnings: normalized.warnings,
    };
    if !(cfg.refine && cfg.off_resonant == OffResonantEstimator::CircleIntersection) {
        return Ok(staged);
    }

    let f_c = trace.center_frequency();
    let start = JointModel {
        gain: staged.off_resonant * Complex::from_polar(T::one(), -T::TAU() * f_c * delay),
        delay,
        depth: (one - m_prime).scale(T::lit(2.0)),
        f_r: staged.f_r,
        q_l: staged.q_l,
    };
    let free_delay = cfg.delay_removal == DelayRemoval::Auto;
    let Some(m) = joint_refine(trace, start, free_delay) else {
        return Ok(staged);
    };
    let off_resonant = m.gain * Complex::from_polar(T::one(), T::TAU() * f_c * m.delay);
    let m_prime = one - m.depth.unscale(T::lit(2.0));
    let radius = m.depth.norm() / T::lit(2.0);
    let n = T::from_usize(trace.len()).unwrap();
    let rms = (trace
        .iter()
        .map(|(f, p)| {
            let z = p * Complex::from_polar(T::one(), T::TAU() * f * m.delay) / off_resonant;
            ((z - m_prime).norm() - radius).powi(2)
        })
        .sum::<T>()
        / n)
        .sqrt();
    Ok(CircleFitResult {
        m_prime,
        r_prime: one - m_prime,
        f_r: m.f_r,
        kappa: m.f_r / m.q_l,
        q_l: m.q_l,
        delay: m.delay,
        off_resonant,
        rms_residual: rms,
        warnings: staged.warnings,
    })
}
