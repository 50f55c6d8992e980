//! Acceptance suite. Runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line each; exits non-zero when any criterion fails.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use fanofit::model::b_tilde;
use fanofit::synth::{gallery_phases, TrajectoryPhases};
use fanofit::uncertainty::{default_band_couplings, default_band_leakage};
use fanofit::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn reflection(f_r: f64, q_l: f64, coupling: f64) -> ResonatorParams64 {
    ResonatorParams::from_loaded(f_r, q_l, Quality::Finite(coupling), MeasurementMode::Reflection).unwrap()
}

fn fit_noiseless(p: ResonatorParams64, b: f64, phi: f64) -> CircleFitResult64 {
    let trace = synth_trace(&SynthSpec::around_resonance(p, FanoBackground::new(b, phi).unwrap())).unwrap();
    fit_pipeline(&trace, &FitConfig::default()).unwrap()
}

/// Relative excess of `q` outside `[lo, hi]` (0 when inside).
fn excess(q: f64, lo: Quality64, hi: Quality64) -> f64 {
    let below = (lo.value() - q) / q;
    let above = if hi.is_infinite() { 0.0 } else { (q - hi.value()) / q };
    below.max(above).max(0.0)
}

fn containment() -> Outcome {
    // The true centerpoint always sits exactly on one end of the range, so
    // the comparison needs a rounding allowance.
    const ROUNDING: f64 = 1e-6;
    let start = Instant::now();
    let q_l = 2e4;
    let (mut cases, mut contained, mut worst_excess, mut worst_ql) = (0, 0, 0.0f64, 0.0f64);
    for coupling in [0.3, 1.0, 3.0, 30.0] {
        let p = reflection(6e9, q_l, coupling);
        let q_i = p.q_i.value();
        for b in [0.0, 0.05, 0.18] {
            for k in 0..16 {
                let fit = fit_noiseless(p, b, TAU * k as f64 / 16.0);
                let range = qi_range(&fit, LeakageBound::Amplitude(b), MeasurementMode::Reflection).unwrap();
                let e = excess(q_i, range.q_i.min, range.q_i.max);
                worst_excess = worst_excess.max(e);
                worst_ql = worst_ql.max((fit.q_l / q_l - 1.0).abs());
                cases += 1;
                if e <= ROUNDING {
                    contained += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        contained == cases && worst_ql < 1e-3 && elapsed < Duration::from_secs(10),
        format!(
            "{contained}/{cases} contained (worst excess {worst_excess:.1e}), worst Q_l error {worst_ql:.1e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn closed_form_vs_scan() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let r_prime: Complex64 = Complex::from_polar(rng.random_range(0.1..1.0), rng.random_range(-0.6..0.6));
        let m_prime = Complex::new(1.0, 0.0) - r_prime;
        let bt_min = r_prime.im.abs() / r_prime.norm();
        let bt = bt_min + (0.9 - bt_min) * rng.random_range(0.05..1.0);
        let b = bt / (1.0 + bt);
        let closed = radii_range(r_prime, b).unwrap();

        // Real-axis crossings of the inverted centerpoint as phi runs over a turn.
        let n = 4096;
        let ms: Vec<Complex64> = (0..=n)
            .map(|k| uncertainty::invert_center(m_prime, b, TAU * k as f64 / n as f64))
            .collect();
        let mut radii = Vec::new();
        for w in ms.windows(2) {
            if w[0].im == 0.0 || (w[0].im < 0.0) != (w[1].im < 0.0) {
                let t = w[0].im / (w[0].im - w[1].im);
                radii.push(1.0 - (w[0].re + t * (w[1].re - w[0].re)));
            }
        }
        let lo = radii.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
        let hi = radii.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max((lo - closed.min).abs()).max((hi - closed.max).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-3 && elapsed < Duration::from_secs(5),
        format!("max |scan - closed form| = {worst:.1e}, {:.2} s", elapsed.as_secs_f64()),
    )
}

fn centerpoint_geometry() -> Outcome {
    let (mut worst_fit, mut worst_beta) = (0.0f64, 0.0f64);
    for x in [-0.5, 0.0, 0.5, 0.9] {
        for b in [0.05, 0.18, 0.3] {
            let pts: Vec<Complex64> = (0..64)
                .map(|k| {
                    let bg = FanoBackground::new(b, TAU * k as f64 / 64.0).unwrap();
                    normalize_fano(Complex::new(x, 0.0), &bg).unwrap()
                })
                .collect();
            let fit = fit_circle(&pts).unwrap().circle;
            let bt = b_tilde(b);
            let r_c = (1.0 - x) * bt / (1.0 - bt * bt);
            let x_c = (x - bt * bt) / (1.0 - bt * bt);
            worst_fit = worst_fit
                .max((fit.radius - r_c).abs())
                .max((fit.center.re - x_c).abs())
                .max(fit.center.im.abs());
            worst_beta = worst_beta.max((center_circle(x, b).unwrap().beta.sin() - bt).abs());
        }
    }
    outcome(
        worst_fit <= 1e-9 && worst_beta <= 1e-12,
        format!("max circle deviation {worst_fit:.1e}, max |sin beta - b~| {worst_beta:.1e}"),
    )
}

fn strictly_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| {
        if w[0].is_infinite() {
            w[1].is_infinite()
        } else {
            w[1] > w[0]
        }
    })
}

fn band_anchors() -> Outcome {
    // The paper equates b^2 = -15 dB with b = 0.18; the anchor values follow from that b.
    let anchor = uncertainty_band(&[1.0f64], &[0.18], MeasurementMode::Reflection).unwrap()[0];
    let exact = uncertainty_band(
        &[1.0],
        &[leakage_db_to_linear(-15.0).unwrap()],
        MeasurementMode::Reflection,
    )
    .unwrap()[0];
    let anchors_ok = (anchor.rel_min - 0.8200).abs() <= 1e-3 && (anchor.rel_max - 1.2813).abs() <= 1e-3;

    let couplings = default_band_couplings::<f64>();
    let leakage = default_band_leakage::<f64>();
    let rows = uncertainty_band(&couplings, &leakage, MeasurementMode::Reflection).unwrap();
    let width = |r: &BandRow64| r.rel_max - r.rel_min;
    let n = couplings.len();
    let in_coupling = (0..leakage.len()).all(|j| {
        let w: Vec<f64> = rows[j * n..(j + 1) * n].iter().map(width).collect();
        strictly_increasing(&w)
    });
    let in_b = (0..n).all(|i| {
        let w: Vec<f64> = (0..leakage.len()).map(|j| width(&rows[j * n + i])).collect();
        strictly_increasing(&w)
    });
    outcome(
        anchors_ok && in_coupling && in_b,
        format!(
            "b = 0.18: ({:.4}, {:.4}); exact -15 dB (b = {:.4}): ({:.4}, {:.4}); width increasing in coupling: {in_coupling}, in b: {in_b}",
            anchor.rel_min,
            anchor.rel_max,
            exact.b,
            exact.rel_min,
            exact.rel_max
        ),
    )
}

fn calibration_regression() -> Outcome {
    let q_i = 5.7e5;
    let coupling = 30.0;
    let q_c = q_i / coupling;
    let q_l = 1.0 / (1.0 / q_i + 1.0 / q_c);
    let b = 0.061;

    // Noiseless: per-trace fits over a little more than half a turn of the leakage phase.
    let p = reflection(9.4e9, q_l, coupling);
    let n = 24;
    let (mut labels, mut centers, mut qls) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..n {
        let phi = 1.1 * PI * k as f64 / (n - 1) as f64;
        let fit = fit_noiseless(p, b, phi);
        labels.push(phi);
        centers.push(fit.m_prime);
        qls.push(fit.q_l);
    }
    let traj = CenterTrajectory::new(labels, centers, qls).unwrap();
    let cal = calibrate_trajectory(&traj, true, MeasurementMode::Reflection).unwrap();
    let b_err = (cal.b / b - 1.0).abs();
    let qi_err = (cal.q_i.value() / q_i - 1.0).abs();

    // Noisy: 64 points over half a turn, three gross outliers, robust fit.
    let x = q_l / q_i;
    let phases = TrajectoryPhases::Explicit((0..64).map(|k| PI * k as f64 / 63.0).collect());
    let (mut b_errs, mut qi_errs) = (Vec::new(), Vec::new());
    for seed in 0..100 {
        let mut t = synth_trajectory(x, b, &phases, q_l, 0.005, seed).unwrap();
        t.centers[7] += Complex::new(0.05, 0.04);
        t.centers[30] += Complex::new(-0.06, 0.02);
        t.centers[51] += Complex::new(0.03, -0.05);
        match calibrate_trajectory(&t, true, MeasurementMode::Reflection) {
            Ok(c) => {
                b_errs.push((c.b / b - 1.0).abs());
                qi_errs.push((c.q_i.value() / q_i - 1.0).abs());
            }
            Err(_) => {
                b_errs.push(f64::INFINITY);
                qi_errs.push(f64::INFINITY);
            }
        }
    }
    let (mb, mq) = (median(b_errs), median(qi_errs));
    outcome(
        b_err < 0.01 && qi_err < 0.01 && mb < 0.1 && mq < 0.1,
        format!(
            "noiseless b error {b_err:.1e}, Q_i error {qi_err:.1e} ({:.2} dB); noisy median b error {mb:.3}, Q_i error {mq:.3}",
            leakage_linear_to_db(cal.b)
        ),
    )
}

/// Overcoupled cooldown rows of the sample table that report no upper `Q_i`.
const UNBOUNDED_ROWS: [usize; 5] = [3, 5, 6, 7, 9];

struct TableRow {
    f_r_ghz: f64,
    kappa_mhz: f64,
    q_c: [f64; 3],
    q_i: [f64; 3],
}

fn table_rows() -> Vec<(&'static str, usize, TableRow)> {
    let under = [
        (5.003, 0.09, [179.0, 211.0, 257.0], [70.0, 80.0, 80.0]),
        (5.644, 0.09, [131.0, 154.0, 187.0], [100.0, 110.0, 130.0]),
        (6.247, 0.08, [140.0, 164.0, 200.0], [120.0, 130.0, 160.0]),
        (6.848, 0.06, [305.0, 357.0, 429.0], [150.0, 160.0, 170.0]),
        (7.469, 0.09, [138.0, 162.0, 197.0], [140.0, 170.0, 210.0]),
        (8.273, 0.16, [115.0, 134.0, 161.0], [80.0, 90.0, 100.0]),
        (9.474, 0.11, [250.0, 293.0, 354.0], [120.0, 120.0, 130.0]),
        (10.538, 0.12, [352.0, 414.0, 503.0], [110.0, 120.0, 120.0]),
        (11.310, 0.09, [279.0, 328.0, 397.0], [170.0, 190.0, 210.0]),
    ];
    let over = [
        (4.997, 0.49, [12.0, 14.0, 17.0], [30.0, 40.0, 80.0]),
        (5.641, 0.63, [9.0, 11.0, 13.0], [30.0, 60.0, 790.0]),
        (6.244, 0.60, [10.0, 12.0, 14.0], [40.0, 80.0, f64::INFINITY]),
        (6.846, 0.31, [23.0, 27.0, 33.0], [60.0, 110.0, 430.0]),
        (7.466, 0.68, [11.0, 12.0, 15.0], [40.0, 110.0, f64::INFINITY]),
        (8.269, 0.87, [10.0, 11.0, 14.0], [30.0, 70.0, f64::INFINITY]),
        (9.470, 0.48, [20.0, 22.0, 26.0], [80.0, 210.0, f64::INFINITY]),
        (10.535, 0.38, [28.0, 33.0, 40.0], [90.0, 160.0, 1120.0]),
        (11.307, 0.52, [22.0, 25.0, 30.0], [80.0, 170.0, f64::INFINITY]),
    ];
    let mk = |(f_r_ghz, kappa_mhz, q_c, q_i): (f64, f64, [f64; 3], [f64; 3])| TableRow {
        f_r_ghz,
        kappa_mhz,
        q_c: q_c.map(|q| q * 1e3),
        q_i: q_i.map(|q| q * 1e3),
    };
    under
        .into_iter()
        .enumerate()
        .map(|(i, r)| ("under", i + 1, mk(r)))
        .chain(over.into_iter().enumerate().map(|(i, r)| ("over", i + 1, mk(r))))
        .collect()
}

fn table_consistency() -> Outcome {
    // Quality factors are listed in units of 1e3, rounded to the last digit.
    const QC_ROUNDING: f64 = 500.0;
    let mut worst = 0.0f64;
    let mut unbounded_ok = true;
    for (cooldown, row, t) in table_rows() {
        let inv_q_l = t.kappa_mhz * 1e6 / (t.f_r_ghz * 1e9);
        let dev = ((1.0 / t.q_c[1] + 1.0 / t.q_i[1]) - inv_q_l).abs() / inv_q_l;
        worst = worst.max(dev);
        if cooldown == "over" && UNBOUNDED_ROWS.contains(&row) {
            // Largest radius consistent with the rounded Q_c,min = Q_l / R_max.
            let r_max = (1.0 / inv_q_l) / (t.q_c[0] - QC_ROUNDING);
            let (q_i_max, q_c_min) = qualities_from_radius(1.0 / inv_q_l, r_max, MeasurementMode::Reflection);
            unbounded_ok &=
                q_i_max.is_infinite() && t.q_i[2].is_infinite() && q_c_min == Quality::Finite(1.0 / inv_q_l);
        }
    }
    outcome(
        worst <= 0.10 && unbounded_ok,
        format!(
            "worst linewidth mismatch {:.1}%, unbounded rows map to infinite Q_i: {unbounded_ok}",
            worst * 100.0
        ),
    )
}

fn lineshape_anchors() -> Outcome {
    let shapes = synth_lineshape_gallery(0.18, &[0.0, PI], 1001).unwrap();
    let min0 = shapes[0].curve.y.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_pi = shapes[1].curve.y.iter().cloned().fold(0.0, f64::max);
    let mut worst_im = 0.0f64;
    for coupling in [1.0, 3.0] {
        let p = reflection(5e9, 3e4, coupling);
        for phi in [0.0, PI] {
            worst_im = worst_im.max(fit_noiseless(p, 0.18, phi).m_prime.im.abs());
        }
    }
    let lossless = ResonatorParams::new(5e9, Quality::Infinite, 3e4, MeasurementMode::Reflection).unwrap();
    for phi in [0.0, PI] {
        worst_im = worst_im.max(fit_noiseless(lossless, 0.18, phi).m_prime.im.abs());
    }
    assert_eq!(gallery_phases::<f64>().len(), 5);
    outcome(
        (min0 - 0.64).abs() <= 1e-6 && (max_pi - 1.5625).abs() <= 1e-6 && worst_im <= 1e-9,
        format!("min(phi=0) {min0:.7}, max(phi=pi) {max_pi:.7}, max |Im M'| {worst_im:.1e}"),
    )
}

fn db_conversion() -> Outcome {
    let b15: f64 = leakage_db_to_linear(-15.0).unwrap();
    let b24: f64 = leakage_db_to_linear(-24.0).unwrap();
    outcome(
        (b15 - 0.1778).abs() <= 5e-4 && (b24 - 0.0631).abs() <= 5e-4,
        format!("-15 dB -> {b15:.5}, -24 dB -> {b24:.5}"),
    )
}

fn noise_robustness() -> Outcome {
    let q_l = 2e4;
    let p = reflection(6e9, q_l, 1.0);
    let q_i = p.q_i.value();
    let (mut ql_errs, mut qi_errs) = (Vec::new(), Vec::new());
    for seed in 0..100 {
        let mut spec = SynthSpec::around_resonance(p, FanoBackground::none());
        spec.noise_sigma = 0.01;
        spec.seed = seed;
        let trace = synth_trace(&spec).unwrap();
        match fit_pipeline(&trace, &FitConfig::default())
            .and_then(|fit| qi_range(&fit, LeakageBound::Amplitude(0.0), MeasurementMode::Reflection).map(|r| (fit, r)))
        {
            Ok((fit, range)) => {
                ql_errs.push((fit.q_l / q_l - 1.0).abs());
                qi_errs.push((range.q_i.mid.value() / q_i - 1.0).abs());
            }
            Err(_) => {
                ql_errs.push(f64::INFINITY);
                qi_errs.push(f64::INFINITY);
            }
        }
    }
    let (mq, mi) = (median(ql_errs), median(qi_errs));
    outcome(
        mq < 0.01 && mi < 0.03,
        format!(
            "median Q_l error {:.3}%, median Q_i,mid error {:.3}%",
            mq * 100.0,
            mi * 100.0
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let start = Instant::now();
    let criteria: [Criterion; 9] = [
        ("1 containment of true Q_i, linewidth conservation", containment),
        ("2 closed-form radii vs phase scan", closed_form_vs_scan),
        ("3 centerpoint circle geometry", centerpoint_geometry),
        ("4 relative band anchors and monotonicity", band_anchors),
        ("5 trajectory calibration regression", calibration_regression),
        ("6 sample table consistency", table_consistency),
        ("7 lineshape anchors", lineshape_anchors),
        ("8 dB conversion", db_conversion),
        ("9 noise robustness", noise_robustness),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {name}: {} ({})",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let total = start.elapsed();
    let in_budget = total < Duration::from_secs(60);
    println!(
        "acceptance suite: {} in {:.2} s ({})",
        if failed == 0 && in_budget { "PASS" } else { "FAIL" },
        total.as_secs_f64(),
        if in_budget { "within 60 s" } else { "over 60 s budget" }
    );
    if failed > 0 || !in_budget {
        std::process::exit(1);
    }
}
